#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace entrogate {

// Values a config file may set. Every field is optional so the merge
// layer can tell "present in file" from "defaulted": command-line flags
// override file values, file values override built-in defaults.
//
// The file dialect is JSON with // and /* */ comments permitted. Unknown
// keys are a hard error. Durations accept either an integer (milliseconds)
// or a string with a unit suffix ("33ms", "1s", "500us", "250000ns").
struct FileConfig {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> threshold;
    std::optional<uint64_t> buffer_capacity;
    std::optional<bool> gating_enabled;
    std::optional<std::string> clock;  // "monotonic" | "virtual"
    std::optional<int64_t> frame_interval_ns;
    std::optional<uint32_t> width;
    std::optional<uint32_t> height;
    std::optional<std::string> scene;  // static|moving|noise|composite
    std::optional<uint64_t> frames;
    std::optional<uint64_t> seed;
    std::optional<double> redundancy;
    std::optional<std::string> input;
    std::optional<std::string> out;
    std::optional<uint64_t> segments;
    std::optional<int64_t> stub_latency_ns;
    std::optional<int64_t> stub_jitter_ns;
    std::optional<bool> synthetic_truth;
};

// Parses a config document. `origin` names the source in errors (a path
// or "<inline>"). Throws ConfigError with line/column on malformed JSON
// and on unknown keys or wrong value types.
FileConfig parse_config_text(const std::string& text,
                             const std::string& origin);

// Reads and parses the file. A missing or unreadable config file is a
// usage error (ConfigError), not a runtime I/O error.
FileConfig parse_config_file(const std::filesystem::path& path);

}  // namespace entrogate
