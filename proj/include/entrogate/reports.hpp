#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrogate/pipeline.hpp"
#include "entrogate/stats.hpp"

namespace entrogate {

// Key order in emitted reports is fixed, so byte-identical inputs produce
// byte-identical report files.
using json = nlohmann::ordered_json;

// Column order of the run ledger CSV. Frozen: external scripts replay
// ledgers by position as well as by name.
extern const std::array<std::string, 9> kLedgerColumns;

// Writes content to the final path via a temporary sibling plus rename, so
// an interrupted writer never leaves a partial file at the final path.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

std::string ledger_to_csv(const std::vector<FrameRecord>& ledger);
void write_ledger_csv(const std::filesystem::path& path,
                      const std::vector<FrameRecord>& ledger);

// Strict reader for the ledger schema above. Throws IoError when the file
// cannot be opened and FormatError naming the offending column or row on
// any mismatch.
std::vector<FrameRecord> read_ledger_csv(const std::filesystem::path& path);

json config_to_json(const PipelineConfig& cfg);
json summary_to_json(const std::vector<double>& samples);  // null when empty
json paired_test_to_json(const PairedTestResult& r);

// Full metrics report for one run: config echo, decision counters, wall
// duration/throughput, latency + staleness + per-stage summaries, and the
// latency-dispersion comparison block against the 1.2 ms reference
// deployment figure.
json metrics_report(const PipelineConfig& cfg, const RunMetrics& metrics);

// Paired gated/ungated report: both runs' metrics, the throughput delta
// percentage, per-segment samples, and the paired t-test on segment
// latencies (null when fewer than two segment pairs are comparable).
json ablation_report(const PipelineConfig& cfg, const AblationResult& result);

// Reduction of one loaded ledger: counters, latency/staleness summaries,
// throughput, and per-segment mean latencies (null for segments with no
// inferred frames). The stats subcommand emits one of these per input.
json ledger_summary_report(const std::vector<FrameRecord>& ledger,
                           size_t segments);

void write_json(const std::filesystem::path& path, const json& doc);

}  // namespace entrogate
