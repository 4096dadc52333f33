#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entrogate {

struct SampleSeries {
    std::vector<double> values;
    std::string unit;  // "ms", "fps", ...
};

struct Summary {
    size_t count = 0;
    double mean = 0.0;
    std::optional<double> sd;  // sample (n-1); absent for singletons
    double min = 0.0;
    double max = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
};

struct PairedTestResult {
    size_t n = 0;
    double mean_diff = 0.0;
    double sd_diff = 0.0;
    double t_statistic = 0.0;
    size_t degrees_of_freedom = 0;
    double p_value_two_tailed = 1.0;
    // "analytic" for the t-distribution route, "permutation" for the exact
    // sign-flip fallback when sd of the differences is zero.
    std::string method;
};

// Mean, sample standard deviation (n-1 denominator), extremes, and
// nearest-rank percentiles. Throws std::invalid_argument on an empty
// series; sd is reported absent (not zero) for a single sample.
Summary summarize(const SampleSeries& series);
Summary summarize(const std::vector<double>& values);

// Nearest-rank percentile: the ceil(q*n)-th smallest value.
double percentile_nearest_rank(std::vector<double> values, double q);

// Paired t-test on index-matched samples, d_i = a_i - b_i. The two-tailed
// p-value comes from the regularized incomplete beta function. When every
// difference is identical (sd = 0): t = 0 and p = 1 for zero differences;
// for a constant nonzero difference vector t diverges and is reported as
// signed infinity, with p the exact sign-flip permutation value 2^(1-n).
// Throws std::invalid_argument on length mismatch or fewer than 2 pairs.
PairedTestResult paired_t_test(const SampleSeries& a, const SampleSeries& b);
PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b);

// Frames inferred per second of wall time.
// Throws std::invalid_argument when wall_duration_ns <= 0.
double throughput_fps(uint64_t frames_inferred, int64_t wall_duration_ns);

namespace special {

// Regularized incomplete beta function I_x(a, b), via the standard
// continued fraction with Lentz's method.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of Student's t with nu degrees of freedom:
// p = I_{nu/(nu+t^2)}(nu/2, 1/2).
double student_t_two_tailed_p(double t, double nu);

}  // namespace special

}  // namespace entrogate
