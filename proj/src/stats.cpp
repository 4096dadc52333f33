#include "entrogate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace entrogate {

namespace special {

namespace {

// Continued-fraction core of the incomplete beta (Lentz's algorithm).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("incomplete_beta requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double nu) {
    if (!(nu > 0.0))
        throw std::invalid_argument("degrees of freedom must be > 0");
    const double x = nu / (nu + t * t);
    double p = incomplete_beta(nu / 2.0, 0.5, x);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace special

Summary summarize(const std::vector<double>& values) {
    if (values.empty())
        throw std::invalid_argument("cannot summarize an empty series");
    Summary s;
    s.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count >= 2) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - s.mean;
            ss += d * d;
        }
        s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    auto rank = [&](double q) {
        const size_t r = static_cast<size_t>(
            std::ceil(q * static_cast<double>(sorted.size())));
        return sorted[std::max<size_t>(r, 1) - 1];
    };
    s.p50 = rank(0.50);
    s.p95 = rank(0.95);
    s.p99 = rank(0.99);
    return s;
}

Summary summarize(const SampleSeries& series) { return summarize(series.values); }

double percentile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty())
        throw std::invalid_argument("cannot take a percentile of nothing");
    std::sort(values.begin(), values.end());
    const size_t r =
        static_cast<size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<size_t>(r, 1) - 1];
}

PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("paired series must have equal length");
    if (a.size() < 2)
        throw std::invalid_argument("paired t-test needs at least 2 pairs");

    const size_t n = a.size();
    std::vector<double> diff(n);
    for (size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

    PairedTestResult r;
    r.n = n;
    r.degrees_of_freedom = n - 1;
    double sum = 0.0;
    for (double d : diff) sum += d;
    r.mean_diff = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double d : diff) {
        const double e = d - r.mean_diff;
        ss += e * e;
    }
    r.sd_diff = std::sqrt(ss / static_cast<double>(n - 1));

    if (r.sd_diff == 0.0) {
        if (r.mean_diff == 0.0) {
            r.t_statistic = 0.0;
            r.p_value_two_tailed = 1.0;
            r.method = "analytic";
            return r;
        }
        // All differences equal and nonzero: the t statistic diverges, so
        // report signed infinity plus the exact sign-flip permutation p.
        // Only the two all-same-sign assignments reach |mean| >= |observed|,
        // giving 2 / 2^n.
        r.t_statistic = r.mean_diff > 0
                            ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        r.p_value_two_tailed = std::ldexp(2.0, -static_cast<int>(n));
        r.method = "permutation";
        return r;
    }

    r.t_statistic =
        r.mean_diff / (r.sd_diff / std::sqrt(static_cast<double>(n)));
    r.p_value_two_tailed = special::student_t_two_tailed_p(
        r.t_statistic, static_cast<double>(n - 1));
    r.method = "analytic";
    return r;
}

PairedTestResult paired_t_test(const SampleSeries& a, const SampleSeries& b) {
    return paired_t_test(a.values, b.values);
}

double throughput_fps(uint64_t frames_inferred, int64_t wall_duration_ns) {
    if (wall_duration_ns <= 0)
        throw std::invalid_argument("throughput needs a positive duration");
    return static_cast<double>(frames_inferred) /
           (static_cast<double>(wall_duration_ns) / 1e9);
}

}  // namespace entrogate
