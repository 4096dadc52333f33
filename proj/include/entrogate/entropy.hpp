#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace entrogate {

// Normalized 256-bin intensity distribution of one grayscale frame.
// bins[i] is the fraction of pixels with intensity i; bins sum to 1.
struct Histogram {
    static constexpr size_t kBins = 256;
    std::array<double, kBins> bins{};

    bool is_valid(double sum_tolerance = 1e-9) const;
};

// Weighted priority of a frame: p = alpha*h + beta*delta_h, with the
// spatial and temporal components kept alongside for the run ledger.
struct PriorityScore {
    double p = 0.0;
    double h = 0.0;
    double delta_h = 0.0;
};

enum class GateDecision { Keep, Drop };

// Scoring weights and the rejection cutoff. alpha weighs spatial entropy,
// beta weighs the temporal entropy change, threshold is the minimum
// priority a frame needs to reach the buffer.
struct GateConfig {
    double alpha = 0.6;
    double beta = 0.4;
    double threshold = 3.0;

    // Throws ConfigError naming the violated bound.
    void validate() const;
};

// Counts intensities and normalizes by the pixel total.
// Throws std::invalid_argument("empty frame") on an empty span.
Histogram compute_histogram(std::span<const uint8_t> pixels);

// Shannon entropy in bits (log base 2). Zero-probability bins contribute
// exactly 0. Result is in [0, 8] for any valid 256-bin histogram.
double shannon_entropy(const Histogram& hist);

// Magnitude of the entropy change between consecutive frames. Both rises
// and falls in complexity count as scene change, so the value is |a - b|.
double entropy_delta(double h_current, double h_previous);

PriorityScore priority_score(double h, double delta_h, const GateConfig& cfg);

// Drop strictly below the threshold; a score exactly at the threshold is
// kept.
GateDecision gate(const PriorityScore& score, const GateConfig& cfg);

}  // namespace entrogate
