#include "entrogate/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>
#include <utility>

#include "entrogate/errors.hpp"

namespace entrogate {

namespace {

constexpr int64_t kNever = std::numeric_limits<int64_t>::max();

std::unique_ptr<FrameSource> make_source(const PipelineConfig& cfg,
                                         const Clock& clock) {
    switch (cfg.source.kind) {
        case SourceConfig::Kind::Scene:
            return std::make_unique<SceneGenerator>(cfg.source.scene, cfg.width,
                                                    cfg.height, clock);
        case SourceConfig::Kind::RawFile:
            return std::make_unique<RawSequenceReader>(cfg.source.path, cfg.width,
                                                       cfg.height, clock);
        case SourceConfig::Kind::Y4mFile:
            return std::make_unique<Y4mReader>(cfg.source.path, clock);
    }
    throw std::logic_error("unhandled source kind");
}

StubDetector::TruthFn make_truth(const PipelineConfig& cfg) {
    if (!cfg.detector.synthetic_truth ||
        cfg.source.kind != SourceConfig::Kind::Scene)
        return nullptr;
    const SceneSpec spec = cfg.source.scene;
    const uint32_t w = cfg.width;
    const uint32_t h = cfg.height;
    return [spec, w, h](uint64_t frame_id) {
        return SceneGenerator::truth_bbox(spec, w, h, frame_id);
    };
}

// Scores one captured frame, appends its ledger row, and routes it through
// the gate into the buffer. Owns the decision bookkeeping for Dropped,
// Rejected, and Evicted outcomes; scoring_ms is null when stage timing is
// not being measured (virtual clock).
void ingest_frame(Frame frame, const PipelineConfig& cfg, const Clock& clock,
                  FrameBuffer& buf, std::vector<FrameRecord>& records,
                  std::optional<double>& prev_h,
                  std::vector<double>* scoring_ms) {
    const uint64_t id = records.size();
    FrameRecord rec;
    rec.frame_id = id;
    rec.capture_time_ns = frame.capture_time_ns;

    const auto score_begin = std::chrono::steady_clock::now();
    const Histogram hist = compute_histogram(frame.pixels);
    const double h = shannon_entropy(hist);
    const double dh = prev_h ? entropy_delta(h, *prev_h) : 0.0;
    prev_h = h;
    const PriorityScore score = priority_score(h, dh, cfg.gate);
    if (scoring_ms) {
        const auto score_end = std::chrono::steady_clock::now();
        scoring_ms->push_back(
            std::chrono::duration<double, std::milli>(score_end - score_begin)
                .count());
    }

    rec.entropy_bits = h;
    rec.delta_h_bits = dh;
    rec.priority = score.p;
    records.push_back(rec);

    if (cfg.gating_enabled && gate(score, cfg.gate) == GateDecision::Drop) {
        records[id].decision = Decision::Dropped;
        return;
    }

    const PushOutcome out =
        buf.push(ScoredFrame{id, rec.capture_time_ns, std::move(frame), score});
    switch (out.kind) {
        case PushOutcome::Kind::Accepted:
        case PushOutcome::Kind::AcceptedEvicting:
            records[id].buffer_enter_ns = clock.now_ns();
            if (out.evicted_frame_id)
                records[*out.evicted_frame_id].decision = Decision::Evicted;
            break;
        case PushOutcome::Kind::Rejected:
            records[id].decision = Decision::Rejected;
            break;
    }
}

// Closes the books on a completed run. Ledger-derivable metrics come from
// summarize_ledger; scoring timings and detector error counts only exist
// in the live partial.
RunResult finalize(std::vector<FrameRecord> records, RunMetrics partial) {
    RunMetrics metrics = summarize_ledger(records);
    metrics.scoring_ms = std::move(partial.scoring_ms);
    metrics.detector_errors = partial.detector_errors;
    return RunResult{std::move(metrics), std::move(records)};
}

// Single-threaded discrete-event simulation of the two-stage pipeline.
// Arrivals land at i * frame_interval; the consumer starts a frame the
// instant it is idle and the buffer is non-empty; on a timestamp tie a
// completion is processed before the next arrival (the consumer frees up
// first, then the new frame lands).
RunResult run_virtual(const PipelineConfig& cfg) {
    VirtualClock clock(0);
    auto source = make_source(cfg, clock);
    StubDetector detector(cfg.detector, /*sleep_for_latency=*/false,
                          make_truth(cfg));
    FrameBuffer buf(cfg.buffer_capacity, cfg.gating_enabled
                                             ? BufferPolicy::Priority
                                             : BufferPolicy::Fifo);

    std::vector<FrameRecord> records;
    std::optional<double> prev_h;
    RunMetrics metrics;

    struct Service {
        uint64_t frame_id;
        int64_t end_ns;
    };
    std::optional<Service> in_service;
    uint64_t next_arrival = 0;
    bool exhausted = false;

    for (;;) {
        if (!in_service && buf.size() > 0) {
            std::optional<ScoredFrame> item = buf.pop_highest();
            const int64_t start = clock.now_ns();
            records[item->frame_id].infer_start_ns = start;
            int64_t duration = 0;
            try {
                duration = detector.infer(item->frame, item->frame_id).duration_ns;
            } catch (const std::exception&) {
                ++metrics.detector_errors;
            }
            in_service = Service{item->frame_id, start + duration};
            continue;
        }
        const int64_t t_arrival =
            exhausted ? kNever
                      : static_cast<int64_t>(next_arrival) * cfg.frame_interval_ns;
        const int64_t t_completion = in_service ? in_service->end_ns : kNever;
        if (t_arrival == kNever && t_completion == kNever) break;

        if (t_completion <= t_arrival) {
            clock.set_ns(t_completion);
            records[in_service->frame_id].infer_end_ns = t_completion;
            records[in_service->frame_id].decision = Decision::Inferred;
            in_service.reset();
        } else {
            clock.set_ns(t_arrival);
            std::optional<Frame> frame = source->next();
            if (!frame) {
                exhausted = true;
                continue;
            }
            ingest_frame(std::move(*frame), cfg, clock, buf, records, prev_h,
                         nullptr);
            ++next_arrival;
        }
    }
    return finalize(std::move(records), std::move(metrics));
}

// Real-time path: ingestion/scoring on the calling thread, inference on a
// second thread, the bounded buffer between them. Reads are paced at the
// frame interval to emulate a live source. The inference thread records
// bare (frame_id, start, end) events; the ledger is assembled on the
// ingestion side after the join, so the threads share nothing but the
// buffer and two atomics.
RunResult run_threaded(const PipelineConfig& cfg) {
    MonotonicClock clock;
    auto source = make_source(cfg, clock);
    StubDetector detector(cfg.detector, /*sleep_for_latency=*/true,
                          make_truth(cfg));
    FrameBuffer buf(cfg.buffer_capacity, cfg.gating_enabled
                                             ? BufferPolicy::Priority
                                             : BufferPolicy::Fifo);

    std::vector<FrameRecord> records;
    std::optional<double> prev_h;
    RunMetrics metrics;

    struct InferenceEvent {
        uint64_t frame_id;
        int64_t start_ns;
        int64_t end_ns;
        bool failed;
    };
    std::vector<InferenceEvent> events;
    std::atomic<bool> ingestion_done{false};

    std::thread consumer([&] {
        for (;;) {
            std::optional<ScoredFrame> item = buf.pop_highest();
            if (!item) {
                if (ingestion_done.load(std::memory_order_acquire) &&
                    buf.size() == 0)
                    break;
                buf.wait_for_item(std::chrono::milliseconds(1));
                continue;
            }
            InferenceEvent ev{item->frame_id, clock.now_ns(), 0, false};
            try {
                detector.infer(item->frame, item->frame_id);
            } catch (const std::exception&) {
                ev.failed = true;
            }
            ev.end_ns = clock.now_ns();
            events.push_back(ev);
        }
    });

    const auto t0 = std::chrono::steady_clock::now();
    const auto interval = std::chrono::nanoseconds(cfg.frame_interval_ns);
    try {
        for (uint64_t i = 0;; ++i) {
            std::this_thread::sleep_until(t0 + i * interval);
            std::optional<Frame> frame = source->next();
            if (!frame) break;
            ingest_frame(std::move(*frame), cfg, clock, buf, records, prev_h,
                         &metrics.scoring_ms);
        }
    } catch (...) {
        // A stream that fails mid-run must surface as an ordinary error,
        // which requires parking the inference thread first: unwinding past
        // a joinable thread would terminate the process.
        ingestion_done.store(true, std::memory_order_release);
        consumer.join();
        throw;
    }
    ingestion_done.store(true, std::memory_order_release);
    consumer.join();

    for (const InferenceEvent& ev : events) {
        FrameRecord& rec = records[ev.frame_id];
        rec.infer_start_ns = ev.start_ns;
        rec.infer_end_ns = ev.end_ns;
        rec.decision = Decision::Inferred;
        if (ev.failed) ++metrics.detector_errors;
    }
    return finalize(std::move(records), std::move(metrics));
}

}  // namespace

RunMetrics summarize_ledger(const std::vector<FrameRecord>& ledger) {
    RunMetrics metrics;
    metrics.frames_ingested = ledger.size();
    int64_t first_ns = kNever;
    int64_t last_ns = std::numeric_limits<int64_t>::min();

    for (const FrameRecord& rec : ledger) {
        first_ns = std::min(first_ns, rec.capture_time_ns);
        last_ns = std::max(last_ns, rec.capture_time_ns);
        if (rec.infer_end_ns) last_ns = std::max(last_ns, *rec.infer_end_ns);
        switch (rec.decision) {
            case Decision::Inferred: {
                // A ledger can come from disk, so a malformed shape must be
                // a clean error, not an invalid dereference.
                if (!rec.infer_start_ns || !rec.infer_end_ns)
                    throw FormatError(
                        "ledger marks frame " + std::to_string(rec.frame_id) +
                        " inferred but lacks its inference timestamps");
                ++metrics.frames_inferred;
                metrics.latency_ms.push_back(
                    static_cast<double>(*rec.infer_end_ns -
                                        rec.capture_time_ns) /
                    1e6);
                metrics.staleness_ms.push_back(
                    static_cast<double>(*rec.infer_start_ns -
                                        rec.capture_time_ns) /
                    1e6);
                metrics.inference_ms.push_back(
                    static_cast<double>(*rec.infer_end_ns -
                                        *rec.infer_start_ns) /
                    1e6);
                break;
            }
            case Decision::Dropped:
                ++metrics.frames_dropped_at_gate;
                break;
            case Decision::Evicted:
                ++metrics.frames_evicted;
                break;
            case Decision::Rejected:
                ++metrics.frames_rejected;
                break;
            case Decision::Kept:
                ++metrics.frames_in_flight;
                break;
        }
    }

    if (metrics.frames_ingested !=
        metrics.frames_inferred + metrics.frames_dropped_at_gate +
            metrics.frames_evicted + metrics.frames_rejected +
            metrics.frames_in_flight)
        throw std::logic_error("frame conservation violated");

    if (!ledger.empty() && last_ns > first_ns)
        metrics.wall_duration_ns = last_ns - first_ns;
    if (metrics.wall_duration_ns > 0)
        metrics.throughput = static_cast<double>(metrics.frames_inferred) *
                             1e9 /
                             static_cast<double>(metrics.wall_duration_ns);
    return metrics;
}

std::string to_string(Decision d) {
    switch (d) {
        case Decision::Kept: return "kept";
        case Decision::Dropped: return "dropped";
        case Decision::Evicted: return "evicted";
        case Decision::Rejected: return "rejected";
        case Decision::Inferred: return "inferred";
    }
    throw std::logic_error("unhandled decision");
}

Decision decision_from_string(const std::string& s) {
    if (s == "kept") return Decision::Kept;
    if (s == "dropped") return Decision::Dropped;
    if (s == "evicted") return Decision::Evicted;
    if (s == "rejected") return Decision::Rejected;
    if (s == "inferred") return Decision::Inferred;
    throw FormatError("unknown decision '" + s + "'");
}

void PipelineConfig::validate() const {
    gate.validate();
    detector.validate();
    if (buffer_capacity == 0)
        throw ConfigError("buffer capacity must be at least 1");
    if (frame_interval_ns <= 0)
        throw ConfigError("frame interval must be positive");
    if (segments == 0) throw ConfigError("segment count must be at least 1");
    if (source.kind == SourceConfig::Kind::Scene) {
        source.scene.validate();
        if (width == 0 || height == 0)
            throw ConfigError("frame geometry must be positive");
    }
    if (source.kind == SourceConfig::Kind::RawFile &&
        (width == 0 || height == 0))
        throw ConfigError("raw input needs a positive --width and --height");
}

RunResult run(const PipelineConfig& cfg) {
    cfg.validate();
    return cfg.clock_mode == ClockMode::Virtual ? run_virtual(cfg)
                                                : run_threaded(cfg);
}

size_t segment_of(uint64_t frame_id, uint64_t n_frames, size_t n_segments) {
    if (n_frames == 0 || n_segments == 0)
        throw std::invalid_argument("segmenting an empty stream");
    if (frame_id >= n_frames)
        throw std::invalid_argument("frame id outside the stream");
    // Proportional split: segment sizes differ by at most one frame.
    return static_cast<size_t>((frame_id * n_segments) / n_frames);
}

std::vector<std::optional<double>> segment_mean_latency_ms(
    const std::vector<FrameRecord>& ledger, size_t n_segments) {
    std::vector<double> sums(n_segments, 0.0);
    std::vector<uint64_t> counts(n_segments, 0);
    for (const FrameRecord& rec : ledger) {
        if (rec.decision != Decision::Inferred) continue;
        const size_t seg = segment_of(rec.frame_id, ledger.size(), n_segments);
        sums[seg] +=
            static_cast<double>(*rec.infer_end_ns - rec.capture_time_ns) / 1e6;
        ++counts[seg];
    }
    std::vector<std::optional<double>> means(n_segments);
    for (size_t i = 0; i < n_segments; ++i)
        if (counts[i] > 0) means[i] = sums[i] / static_cast<double>(counts[i]);
    return means;
}

std::vector<double> segment_throughput_fps(
    const std::vector<FrameRecord>& ledger, size_t n_segments,
    int64_t wall_duration_ns) {
    std::vector<uint64_t> counts(n_segments, 0);
    for (const FrameRecord& rec : ledger)
        if (rec.decision == Decision::Inferred)
            ++counts[segment_of(rec.frame_id, ledger.size(), n_segments)];
    const double slice_s = static_cast<double>(wall_duration_ns) /
                           static_cast<double>(n_segments) / 1e9;
    std::vector<double> fps(n_segments, 0.0);
    if (slice_s > 0)
        for (size_t i = 0; i < n_segments; ++i)
            fps[i] = static_cast<double>(counts[i]) / slice_s;
    return fps;
}

AblationResult run_ablation_pair(const PipelineConfig& cfg) {
    PipelineConfig gated_cfg = cfg;
    gated_cfg.gating_enabled = true;
    PipelineConfig ungated_cfg = cfg;
    ungated_cfg.gating_enabled = false;

    AblationResult result;
    result.gated = run(gated_cfg);
    result.ungated = run(ungated_cfg);

    if (result.gated.ledger.size() != result.ungated.ledger.size())
        throw std::logic_error("ablation arms saw different stream lengths");

    const auto lat_g = segment_mean_latency_ms(result.gated.ledger, cfg.segments);
    const auto lat_u =
        segment_mean_latency_ms(result.ungated.ledger, cfg.segments);
    result.segments.throughput_gated_fps = segment_throughput_fps(
        result.gated.ledger, cfg.segments, result.gated.metrics.wall_duration_ns);
    result.segments.throughput_ungated_fps =
        segment_throughput_fps(result.ungated.ledger, cfg.segments,
                               result.ungated.metrics.wall_duration_ns);
    for (size_t i = 0; i < cfg.segments; ++i) {
        if (!lat_g[i] || !lat_u[i]) continue;
        result.segments.segment_indices.push_back(i);
        result.segments.latency_gated_ms.push_back(*lat_g[i]);
        result.segments.latency_ungated_ms.push_back(*lat_u[i]);
    }

    const double tg = result.gated.metrics.throughput;
    const double tu = result.ungated.metrics.throughput;
    result.throughput_delta_pct = tu > 0 ? (tg - tu) / tu * 100.0 : 0.0;
    return result;
}

}  // namespace entrogate
