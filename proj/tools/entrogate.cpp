// Command-line front end: run / ablate / synth / stats subcommands over
// the pipeline library. Exit codes: 0 success, 1 runtime error (I/O,
// malformed input), 2 usage or configuration error.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrogate/config.hpp"
#include "entrogate/errors.hpp"
#include "entrogate/pipeline.hpp"
#include "entrogate/reports.hpp"

namespace {

using namespace entrogate;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------
// Logging, controlled by ENTROGATE_LOG (debug|info|warn|error|off).

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

LogLevel g_log_level = LogLevel::Warn;

void init_log_level() {
    const char* env = std::getenv("ENTROGATE_LOG");
    if (!env) return;
    std::string v(env);
    for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "debug")
        g_log_level = LogLevel::Debug;
    else if (v == "info")
        g_log_level = LogLevel::Info;
    else if (v == "warn" || v == "warning")
        g_log_level = LogLevel::Warn;
    else if (v == "error")
        g_log_level = LogLevel::Error;
    else if (v == "off" || v == "none")
        g_log_level = LogLevel::Off;
    else
        std::cerr << "[entrogate] warn: ENTROGATE_LOG='" << v
                  << "' not recognized (debug|info|warn|error|off); using warn\n";
}

void log_at(LogLevel lvl, const char* tag, const std::string& msg) {
    if (static_cast<int>(lvl) < static_cast<int>(g_log_level)) return;
    std::cerr << "[entrogate] " << tag << ": " << msg << "\n";
}

void log_debug(const std::string& m) { log_at(LogLevel::Debug, "debug", m); }
void log_info(const std::string& m) { log_at(LogLevel::Info, "info", m); }

// ---------------------------------------------------------------------
// Flag plumbing. Option pointers let the merge layer distinguish "flag
// was given" from "flag holds its default": flags beat config-file
// values, which beat built-in defaults.

struct CommonFlags {
    std::string config_path;
    uint64_t seed = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double threshold = 0.0;
    uint64_t buffer_capacity = 0;
    std::string virtual_clock;
    std::string scene;
    double redundancy = 0.0;
    uint64_t frames = 0;
    uint32_t width = 0;
    uint32_t height = 0;
    std::string input;
    std::string out_dir;
    uint64_t segments = 0;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_threshold = nullptr;
    CLI::Option* o_capacity = nullptr;
    CLI::Option* o_vclock = nullptr;
    CLI::Option* o_scene = nullptr;
    CLI::Option* o_redundancy = nullptr;
    CLI::Option* o_frames = nullptr;
    CLI::Option* o_width = nullptr;
    CLI::Option* o_height = nullptr;
    CLI::Option* o_input = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_segments = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    f.o_config = cmd->add_option("--config", f.config_path,
                                 "Config file (JSON, // and /* */ comments allowed)");
    f.o_seed = cmd->add_option("--seed", f.seed,
                               "Master seed for scene generation and detector jitter");
    f.o_alpha = cmd->add_option("--alpha", f.alpha,
                                "Spatial entropy weight (default 0.6)");
    f.o_beta = cmd->add_option("--beta", f.beta,
                               "Temporal entropy-delta weight (default 0.4)");
    f.o_threshold = cmd->add_option(
        "--threshold", f.threshold,
        "Minimum priority admitted to the buffer (default 3.0)");
    f.o_capacity = cmd->add_option("--buffer-capacity", f.buffer_capacity,
                                   "Frame buffer capacity (default 16)");
    f.o_vclock = cmd->add_option(
        "--virtual-clock", f.virtual_clock,
        "Run on a simulated clock with this frame interval (e.g. 33ms); "
        "makes all timing deterministic");
    f.o_scene =
        cmd->add_option("--scene", f.scene,
                        "Synthetic scene: static|moving|noise|composite "
                        "(default composite)");
    f.o_redundancy = cmd->add_option(
        "--redundancy", f.redundancy,
        "Fraction of exact repeat frames in a composite scene (default 0)");
    f.o_frames = cmd->add_option("--frames", f.frames,
                                 "Frames to generate (default 100)");
    f.o_width = cmd->add_option("--width", f.width,
                                "Frame width in pixels (default 320)");
    f.o_height = cmd->add_option("--height", f.height,
                                 "Frame height in pixels (default 240)");
    f.o_input = cmd->add_option(
        "--input", f.input,
        "Read frames from a file instead of a scene (.y4m, or raw with "
        "--width/--height)");
    f.o_out = cmd->add_option("--out", f.out_dir,
                              "Directory for reports (default .)");
    f.o_segments = cmd->add_option(
        "--segments", f.segments,
        "Segments for paired per-segment samples (default 10)");
}

ClockMode clock_mode_from_string(const std::string& s) {
    if (s == "monotonic") return ClockMode::Monotonic;
    if (s == "virtual") return ClockMode::Virtual;
    throw ConfigError("clock must be 'monotonic' or 'virtual', got '" + s +
                      "'");
}

struct AssembledRun {
    PipelineConfig cfg;
    fs::path out_dir;
};

AssembledRun assemble(const CommonFlags& f) {
    FileConfig file;
    if (f.o_config->count() > 0) file = parse_config_file(f.config_path);

    PipelineConfig cfg;
    cfg.source.kind = SourceConfig::Kind::Scene;
    cfg.source.scene.frame_count = 100;
    fs::path out_dir = ".";
    std::optional<std::string> input;

    if (file.alpha) cfg.gate.alpha = *file.alpha;
    if (file.beta) cfg.gate.beta = *file.beta;
    if (file.threshold) cfg.gate.threshold = *file.threshold;
    if (file.buffer_capacity)
        cfg.buffer_capacity = static_cast<size_t>(*file.buffer_capacity);
    if (file.gating_enabled) cfg.gating_enabled = *file.gating_enabled;
    if (file.clock) cfg.clock_mode = clock_mode_from_string(*file.clock);
    if (file.frame_interval_ns) cfg.frame_interval_ns = *file.frame_interval_ns;
    if (file.width) cfg.width = *file.width;
    if (file.height) cfg.height = *file.height;
    if (file.scene)
        cfg.source.scene.kind = scene_kind_from_string(*file.scene);
    if (file.frames) cfg.source.scene.frame_count = *file.frames;
    if (file.seed) {
        cfg.source.scene.seed = *file.seed;
        cfg.detector.seed = *file.seed;
    }
    if (file.redundancy) cfg.source.scene.redundancy_ratio = *file.redundancy;
    if (file.input) input = *file.input;
    if (file.out) out_dir = *file.out;
    if (file.segments) cfg.segments = static_cast<size_t>(*file.segments);
    if (file.stub_latency_ns) cfg.detector.base_latency_ns = *file.stub_latency_ns;
    if (file.stub_jitter_ns) cfg.detector.jitter_ns = *file.stub_jitter_ns;
    if (file.synthetic_truth) cfg.detector.synthetic_truth = *file.synthetic_truth;

    if (f.o_alpha->count()) cfg.gate.alpha = f.alpha;
    if (f.o_beta->count()) cfg.gate.beta = f.beta;
    if (f.o_threshold->count()) cfg.gate.threshold = f.threshold;
    if (f.o_capacity->count())
        cfg.buffer_capacity = static_cast<size_t>(f.buffer_capacity);
    if (f.o_vclock->count()) {
        cfg.clock_mode = ClockMode::Virtual;
        cfg.frame_interval_ns = parse_duration_ns(f.virtual_clock);
    }
    if (f.o_scene->count())
        cfg.source.scene.kind = scene_kind_from_string(f.scene);
    if (f.o_frames->count()) cfg.source.scene.frame_count = f.frames;
    if (f.o_seed->count()) {
        cfg.source.scene.seed = f.seed;
        cfg.detector.seed = f.seed;
    }
    if (f.o_redundancy->count())
        cfg.source.scene.redundancy_ratio = f.redundancy;
    if (f.o_width->count()) cfg.width = f.width;
    if (f.o_height->count()) cfg.height = f.height;
    if (f.o_input->count()) input = f.input;
    if (f.o_out->count()) out_dir = f.out_dir;
    if (f.o_segments->count()) cfg.segments = static_cast<size_t>(f.segments);

    if (input) {
        cfg.source.path = *input;
        cfg.source.kind = input->size() >= 4 &&
                                  input->compare(input->size() - 4, 4, ".y4m") == 0
                              ? SourceConfig::Kind::Y4mFile
                              : SourceConfig::Kind::RawFile;
    }
    return {cfg, out_dir};
}

std::string counters_line(const RunMetrics& m) {
    return "ingested=" + std::to_string(m.frames_ingested) +
           " inferred=" + std::to_string(m.frames_inferred) +
           " dropped=" + std::to_string(m.frames_dropped_at_gate) +
           " evicted=" + std::to_string(m.frames_evicted) +
           " rejected=" + std::to_string(m.frames_rejected);
}

// ---------------------------------------------------------------------
// Subcommands.

int do_run(const CommonFlags& f) {
    auto [cfg, out_dir] = assemble(f);
    log_debug("effective config: " + config_to_json(cfg).dump());
    const RunResult result = run(cfg);
    const fs::path metrics_path = out_dir / "metrics.json";
    const fs::path ledger_path = out_dir / "ledger.csv";
    write_json(metrics_path, metrics_report(cfg, result.metrics));
    write_ledger_csv(ledger_path, result.ledger);
    log_info("run complete: " + counters_line(result.metrics));
    std::cout << counters_line(result.metrics) << "\n"
              << "throughput_fps=" << result.metrics.throughput
              << " wall_ms=" << result.metrics.wall_duration_ns / 1e6 << "\n"
              << "wrote " << metrics_path.string() << " and "
              << ledger_path.string() << "\n";
    return 0;
}

int do_ablate(const CommonFlags& f) {
    auto [cfg, out_dir] = assemble(f);
    log_debug("effective config: " + config_to_json(cfg).dump());
    const AblationResult result = run_ablation_pair(cfg);
    const json report = ablation_report(cfg, result);
    write_json(out_dir / "ablation.json", report);
    write_ledger_csv(out_dir / "ledger_gated.csv", result.gated.ledger);
    write_ledger_csv(out_dir / "ledger_ungated.csv", result.ungated.ledger);
    std::cout << "gated:   " << counters_line(result.gated.metrics) << "\n"
              << "ungated: " << counters_line(result.ungated.metrics) << "\n"
              << "throughput_delta_pct=" << result.throughput_delta_pct << "\n";
    if (!report["paired_latency_test"].is_null())
        std::cout << "paired latency t="
                  << report["paired_latency_test"]["t_statistic"]
                  << " p=" << report["paired_latency_test"]["p_value_two_tailed"]
                  << "\n";
    std::cout << "wrote " << (out_dir / "ablation.json").string() << "\n";
    return 0;
}

struct SynthFlags {
    CommonFlags common;
    std::string output;
    bool inspect = false;
};

int do_synth(const SynthFlags& f) {
    FileConfig file;
    if (f.common.o_config->count() > 0)
        file = parse_config_file(f.common.config_path);

    SceneSpec spec;
    spec.frame_count = 100;
    uint32_t width = 320, height = 240;
    if (file.scene) spec.kind = scene_kind_from_string(*file.scene);
    if (file.frames) spec.frame_count = *file.frames;
    if (file.seed) spec.seed = *file.seed;
    if (file.redundancy) spec.redundancy_ratio = *file.redundancy;
    if (file.width) width = *file.width;
    if (file.height) height = *file.height;
    if (f.common.o_scene->count())
        spec.kind = scene_kind_from_string(f.common.scene);
    if (f.common.o_frames->count()) spec.frame_count = f.common.frames;
    if (f.common.o_seed->count()) spec.seed = f.common.seed;
    if (f.common.o_redundancy->count())
        spec.redundancy_ratio = f.common.redundancy;
    if (f.common.o_width->count()) width = f.common.width;
    if (f.common.o_height->count()) height = f.common.height;
    spec.validate();
    if (width == 0 || height == 0)
        throw ConfigError("frame geometry must be positive");

    VirtualClock clock(0);
    SceneGenerator gen(spec, width, height, clock);
    const std::vector<Frame> frames = collect_frames(gen);

    const fs::path out_path = f.output;
    const bool y4m = out_path.extension() == ".y4m";
    if (y4m)
        write_y4m_mono(out_path, frames);
    else
        write_raw_sequence(out_path, frames);

    if (f.inspect) {
        std::cout << "frame_id\tentropy_bits\tdelta_h_bits\n";
        std::optional<double> prev;
        for (size_t i = 0; i < frames.size(); ++i) {
            const double h = shannon_entropy(compute_histogram(frames[i].pixels));
            const double dh = prev ? entropy_delta(h, *prev) : 0.0;
            prev = h;
            std::printf("%zu\t%.6f\t%.6f\n", i, h, dh);
        }
    }
    std::cout << "wrote " << frames.size() << " frames (" << width << "x"
              << height << (y4m ? ", y4m mono" : ", raw") << ") to "
              << out_path.string() << "\n";
    return 0;
}

struct StatsFlags {
    std::vector<std::string> ledger_paths;
    uint64_t segments = 10;
    std::string out_dir = ".";
};

std::string index_list(const std::vector<size_t>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "}";
}

int do_stats(const StatsFlags& f) {
    const size_t segments = static_cast<size_t>(f.segments);
    if (segments == 0) throw ConfigError("segment count must be at least 1");

    json doc;
    doc["schema"] = "entrogate.stats.v1";
    json entries = json::array();
    std::vector<std::vector<FrameRecord>> ledgers;
    for (const std::string& path : f.ledger_paths) {
        std::vector<FrameRecord> ledger = read_ledger_csv(path);
        json entry;
        entry["path"] = path;
        entry.update(ledger_summary_report(ledger, segments));
        entries.push_back(entry);
        ledgers.push_back(std::move(ledger));
    }
    doc["ledgers"] = entries;

    doc["paired_latency_test"] = nullptr;
    if (ledgers.size() == 2) {
        if (ledgers[0].size() != ledgers[1].size())
            throw FormatError(
                "paired test requires both ledgers to segment identically: "
                "first covers " +
                std::to_string(ledgers[0].size()) + " frames, second " +
                std::to_string(ledgers[1].size()) +
                "; pair ledgers from the same stream");
        const auto a = segment_mean_latency_ms(ledgers[0], segments);
        const auto b = segment_mean_latency_ms(ledgers[1], segments);
        std::vector<size_t> ia, ib;
        for (size_t i = 0; i < segments; ++i) {
            if (a[i]) ia.push_back(i);
            if (b[i]) ib.push_back(i);
        }
        if (ia != ib)
            throw FormatError(
                "paired test requires latency samples in the same segments: "
                "first ledger has " +
                index_list(ia) + ", second has " + index_list(ib));
        if (ia.size() < 2)
            throw FormatError(
                "paired test needs at least 2 comparable segments, got " +
                std::to_string(ia.size()));
        std::vector<double> va, vb;
        for (size_t i : ia) {
            va.push_back(*a[i]);
            vb.push_back(*b[i]);
        }
        doc["paired_latency_test"] = paired_test_to_json(paired_t_test(va, vb));
    }

    const fs::path out_path = fs::path(f.out_dir) / "stats.json";
    write_json(out_path, doc);
    std::cout << doc.dump(2) << "\n";
    log_info("wrote " + out_path.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    init_log_level();

    CLI::App app{
        "entrogate: entropy-gated frame prioritization pipeline and "
        "benchmark harness"};
    app.set_version_flag("--version", "entrogate 1.0.0");
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* cmd_run = app.add_subcommand(
        "run", "Run one stream through the gated pipeline; write metrics "
               "JSON and a per-frame ledger CSV");
    add_common_flags(cmd_run, run_flags);

    CommonFlags ablate_flags;
    CLI::App* cmd_ablate = app.add_subcommand(
        "ablate", "Run the identical stream gated and ungated; write paired "
                  "metrics and the segment-paired t-test");
    add_common_flags(cmd_ablate, ablate_flags);

    SynthFlags synth_flags;
    CLI::App* cmd_synth = app.add_subcommand(
        "synth", "Write a deterministic synthetic stream to a raw or .y4m "
                 "file");
    add_common_flags(cmd_synth, synth_flags.common);
    cmd_synth->add_option("-o,--output", synth_flags.output,
                          "Output file (.y4m for YUV4MPEG2, anything else "
                          "is raw bytes)")
        ->required();
    cmd_synth->add_flag("--inspect", synth_flags.inspect,
                        "Print the per-frame entropy table to stdout");

    StatsFlags stats_flags;
    CLI::App* cmd_stats = app.add_subcommand(
        "stats", "Summarize ledger CSVs; with exactly two, run the "
                 "segment-paired t-test");
    cmd_stats->add_option("ledgers", stats_flags.ledger_paths,
                          "Ledger CSV paths")
        ->required()
        ->expected(-1);
    cmd_stats->add_option("--segments", stats_flags.segments,
                          "Segments for paired samples (default 10)");
    cmd_stats->add_option("--out", stats_flags.out_dir,
                          "Directory for stats.json (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) return do_run(run_flags);
        if (cmd_ablate->parsed()) return do_ablate(ablate_flags);
        if (cmd_synth->parsed()) return do_synth(synth_flags);
        if (cmd_stats->parsed()) return do_stats(stats_flags);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
