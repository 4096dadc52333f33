#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "entrogate/clock.hpp"
#include "entrogate/detector.hpp"
#include "entrogate/entropy.hpp"
#include "entrogate/frame_buffer.hpp"
#include "entrogate/video_io.hpp"

namespace entrogate {

// Terminal fate of an ingested frame. Kept is the transient in-buffer
// state; after a clean drain no frame remains Kept.
enum class Decision { Kept, Dropped, Evicted, Rejected, Inferred };

std::string to_string(Decision d);
Decision decision_from_string(const std::string& s);

// One ledger row. Timestamps are only present along the path the frame
// actually took and are monotone: capture <= enter <= start <= end.
struct FrameRecord {
    uint64_t frame_id = 0;
    int64_t capture_time_ns = 0;
    double entropy_bits = 0.0;
    double delta_h_bits = 0.0;
    double priority = 0.0;
    Decision decision = Decision::Kept;
    std::optional<int64_t> buffer_enter_ns;
    std::optional<int64_t> infer_start_ns;
    std::optional<int64_t> infer_end_ns;
};

struct SourceConfig {
    enum class Kind { Scene, RawFile, Y4mFile };
    Kind kind = Kind::Scene;
    SceneSpec scene;
    std::filesystem::path path;  // RawFile / Y4mFile
};

struct PipelineConfig {
    GateConfig gate;
    size_t buffer_capacity = 16;
    bool gating_enabled = true;
    ClockMode clock_mode = ClockMode::Monotonic;
    // Inter-arrival spacing of the stream (~30 fps by default). The virtual
    // clock advances by exactly this much per frame; the monotonic path
    // paces ingestion reads at the same interval to emulate a live source.
    int64_t frame_interval_ns = 33'000'000;
    uint32_t width = 320;
    uint32_t height = 240;
    SourceConfig source;
    StubDetectorConfig detector;
    size_t segments = 10;

    void validate() const;  // throws ConfigError
};

struct RunMetrics {
    uint64_t frames_ingested = 0;
    uint64_t frames_inferred = 0;
    uint64_t frames_dropped_at_gate = 0;
    uint64_t frames_evicted = 0;
    uint64_t frames_rejected = 0;
    uint64_t frames_in_flight = 0;
    uint64_t detector_errors = 0;
    int64_t wall_duration_ns = 0;
    double throughput = 0.0;  // frames inferred per wall second
    std::vector<double> latency_ms;    // capture -> inference end
    std::vector<double> staleness_ms;  // capture -> inference start
    std::vector<double> scoring_ms;    // measured only on the real clock
    std::vector<double> inference_ms;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<FrameRecord> ledger;
};

// Runs ingest -> score -> gate -> buffer -> infer until the source is
// exhausted and the buffer drains. Monotonic mode runs an ingestion thread
// and an inference thread against the shared buffer; Virtual mode runs the
// same flow as a single-threaded discrete-event simulation so that every
// timestamp, and therefore the whole ledger, is reproducible.
RunResult run(const PipelineConfig& cfg);

// Rebuilds counters, latency/staleness/inference samples, wall duration,
// and throughput from a ledger alone. Used both to close out live runs and
// to reduce ledgers loaded back from CSV; per-frame scoring cost and
// detector error counts are not recoverable from a ledger.
RunMetrics summarize_ledger(const std::vector<FrameRecord>& ledger);

// Latency/throughput samples per stream segment, index-paired between the
// gated and ungated runs. Latency pairs exist only for segments where both
// runs inferred at least one frame; segment_indices records which.
struct SegmentSamples {
    std::vector<size_t> segment_indices;
    std::vector<double> latency_gated_ms;
    std::vector<double> latency_ungated_ms;
    std::vector<double> throughput_gated_fps;   // one per segment
    std::vector<double> throughput_ungated_fps;
};

struct AblationResult {
    RunResult gated;
    RunResult ungated;
    SegmentSamples segments;
    // (gated - ungated) / ungated * 100 of the runs' throughput.
    double throughput_delta_pct = 0.0;
};

// Runs the identical stream twice under identical seeds, entropy gating on
// then off. With gating off the gate never drops and the buffer falls back
// to bounded FIFO with drop-oldest overflow.
AblationResult run_ablation_pair(const PipelineConfig& cfg);

// Segment index of a frame when n_frames are split into n_segments
// near-equal contiguous runs.
size_t segment_of(uint64_t frame_id, uint64_t n_frames, size_t n_segments);

// Mean end-to-end latency of inferred frames per segment; empty segments
// yield nullopt.
std::vector<std::optional<double>> segment_mean_latency_ms(
    const std::vector<FrameRecord>& ledger, size_t n_segments);

// Inferred frames per second per segment, against equal slices of the
// run's wall duration.
std::vector<double> segment_throughput_fps(
    const std::vector<FrameRecord>& ledger, size_t n_segments,
    int64_t wall_duration_ns);

}  // namespace entrogate
