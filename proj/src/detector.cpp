#include "entrogate/detector.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "entrogate/errors.hpp"
#include "entrogate/rng.hpp"

namespace entrogate {

void StubDetectorConfig::validate() const {
    if (base_latency_ns < 0) throw ConfigError("base latency must be >= 0");
    if (jitter_ns < 0) throw ConfigError("jitter must be >= 0");
    if (jitter_ns > base_latency_ns)
        throw ConfigError("jitter must be <= base latency");
}

StubDetector::StubDetector(const StubDetectorConfig& config,
                           bool sleep_for_latency, TruthFn truth)
    : config_(config),
      sleep_for_latency_(sleep_for_latency),
      truth_(std::move(truth)) {
    config_.validate();
}

int64_t StubDetector::planned_duration_ns(uint64_t frame_id) const {
    if (config_.jitter_ns == 0) return config_.base_latency_ns;
    // One SplitMix64 draw keyed on (seed, frame_id); uniform over
    // [base - jitter, base + jitter].
    SplitMix64 rng(config_.seed ^ (frame_id * 0x9E3779B97F4A7C15ULL));
    const double u = rng.next_double();
    const double offset =
        (2.0 * u - 1.0) * static_cast<double>(config_.jitter_ns);
    return config_.base_latency_ns + static_cast<int64_t>(std::llround(offset));
}

InferenceResult StubDetector::infer(const Frame& frame, uint64_t frame_id) {
    InferenceResult result;
    result.duration_ns = planned_duration_ns(frame_id);
    if (config_.synthetic_truth && truth_) {
        if (auto rect = truth_(frame_id)) {
            if (!rect->inside(frame.width, frame.height))
                throw FormatError("ground truth bbox outside frame bounds");
            result.detections.push_back(Detection{0, 1.0, *rect});
        }
    }
    if (sleep_for_latency_ && result.duration_ns > 0) {
        std::this_thread::sleep_for(
            std::chrono::nanoseconds(result.duration_ns));
    }
    return result;
}

}  // namespace entrogate
