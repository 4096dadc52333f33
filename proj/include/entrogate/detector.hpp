#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "entrogate/frame.hpp"

namespace entrogate {

// One detected object. class_id indexes the five monitored classes
// (0 person, 1 vehicle, 2 fire, 3 weapon, 4 intruder).
struct Detection {
    int class_id = 0;
    double confidence = 0.0;
    Rect bbox;
};

struct InferenceResult {
    std::vector<Detection> detections;
    // Time spent inside the call: simulated for a stub under a virtual
    // clock, wall time otherwise.
    int64_t duration_ns = 0;
};

// Inference stage. Exactly one frame per call; batching is deliberately
// not part of the interface, so throughput gains can only come from frame
// selection upstream. An instance is owned by a single inference thread.
class Detector {
public:
    virtual ~Detector() = default;
    virtual InferenceResult infer(const Frame& frame, uint64_t frame_id) = 0;
};

struct StubDetectorConfig {
    int64_t base_latency_ns = 30'000'000;
    int64_t jitter_ns = 0;  // half-width of a uniform perturbation
    uint64_t seed = 0;
    bool synthetic_truth = false;

    void validate() const;  // throws ConfigError
};

// Deterministic stand-in for a real detection backend. Per-call latency is
// base +- jitter, derived only from (seed, frame_id), so identical runs
// report identical durations. When sleeping is enabled the call really
// blocks for that long; under a virtual clock the pipeline advances
// simulated time by the reported duration instead.
//
// With synthetic_truth on and a ground-truth callback wired, each call
// returns one detection whose bbox is the generator's rectangle for that
// frame; otherwise the detection list is empty.
class StubDetector final : public Detector {
public:
    using TruthFn = std::function<std::optional<Rect>(uint64_t frame_id)>;

    StubDetector(const StubDetectorConfig& config, bool sleep_for_latency,
                 TruthFn truth = nullptr);

    InferenceResult infer(const Frame& frame, uint64_t frame_id) override;

    // The latency the stub charges for a given frame, without running it.
    int64_t planned_duration_ns(uint64_t frame_id) const;

private:
    StubDetectorConfig config_;
    bool sleep_for_latency_;
    TruthFn truth_;
};

}  // namespace entrogate
