#include "entrogate/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "entrogate/errors.hpp"

namespace entrogate {

bool Histogram::is_valid(double sum_tolerance) const {
    double sum = 0.0;
    for (double b : bins) {
        if (!(b >= 0.0)) return false;  // also rejects NaN
        sum += b;
    }
    return std::abs(sum - 1.0) <= sum_tolerance;
}

void GateConfig::validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (!(threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
    if (!(alpha + beta > 0.0))
        throw ConfigError("alpha + beta must be > 0 (all-zero scorer)");
}

Histogram compute_histogram(std::span<const uint8_t> pixels) {
    if (pixels.empty()) throw std::invalid_argument("empty frame");
    std::array<uint64_t, Histogram::kBins> counts{};
    for (uint8_t v : pixels) ++counts[v];
    Histogram hist;
    const double total = static_cast<double>(pixels.size());
    for (size_t i = 0; i < Histogram::kBins; ++i) {
        hist.bins[i] = static_cast<double>(counts[i]) / total;
    }
    return hist;
}

double shannon_entropy(const Histogram& hist) {
    if (!hist.is_valid())
        throw std::invalid_argument("histogram violates its invariants");
    double h = 0.0;
    for (double p : hist.bins) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    // Rounding can leave a tiny negative for near-degenerate inputs.
    return h < 0.0 ? 0.0 : h;
}

double entropy_delta(double h_current, double h_previous) {
    return std::abs(h_current - h_previous);
}

PriorityScore priority_score(double h, double delta_h, const GateConfig& cfg) {
    return PriorityScore{cfg.alpha * h + cfg.beta * delta_h, h, delta_h};
}

GateDecision gate(const PriorityScore& score, const GateConfig& cfg) {
    return score.p < cfg.threshold ? GateDecision::Drop : GateDecision::Keep;
}

}  // namespace entrogate
