#include "entrogate/config.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "entrogate/clock.hpp"
#include "entrogate/errors.hpp"

namespace entrogate {

namespace {

using nlohmann::json;

// 1-based line/column of a byte offset, for parse diagnostics.
std::pair<size_t, size_t> line_col(const std::string& text, size_t byte) {
    size_t line = 1, col = 1;
    const size_t end = std::min(byte, text.size());
    for (size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError("config " + origin + ": " + what);
}

double take_number(const json& v, const std::string& origin,
                   const std::string& key) {
    if (!v.is_number())
        fail(origin, "key '" + key + "' must be a number");
    return v.get<double>();
}

bool take_bool(const json& v, const std::string& origin,
               const std::string& key) {
    if (!v.is_boolean())
        fail(origin, "key '" + key + "' must be true or false");
    return v.get<bool>();
}

std::string take_string(const json& v, const std::string& origin,
                        const std::string& key) {
    if (!v.is_string())
        fail(origin, "key '" + key + "' must be a string");
    return v.get<std::string>();
}

uint64_t take_unsigned(const json& v, const std::string& origin,
                       const std::string& key) {
    if (!v.is_number_unsigned())
        fail(origin, "key '" + key + "' must be a non-negative integer");
    return v.get<uint64_t>();
}

uint32_t take_u32(const json& v, const std::string& origin,
                  const std::string& key) {
    const uint64_t raw = take_unsigned(v, origin, key);
    if (raw > std::numeric_limits<uint32_t>::max())
        fail(origin, "key '" + key + "' is out of range");
    return static_cast<uint32_t>(raw);
}

bool is_zero_duration_text(const std::string& s) {
    size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t digits = 0;
    bool all_zero = true;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        all_zero = all_zero && s[i] == '0';
        ++digits;
        ++i;
    }
    return digits > 0 && all_zero;
}

// Integer milliseconds or a string duration with a unit suffix. Some
// durations (stub latency, jitter) may legitimately be zero; the frame
// interval may not.
int64_t take_duration_ns(const json& v, const std::string& origin,
                         const std::string& key, bool allow_zero) {
    std::string text;
    if (v.is_number_unsigned())
        text = std::to_string(v.get<uint64_t>());
    else if (v.is_string())
        text = v.get<std::string>();
    else
        fail(origin, "key '" + key +
                         "' must be a duration (integer milliseconds or a "
                         "string like \"33ms\")");

    if (is_zero_duration_text(text)) {
        if (allow_zero) return 0;
        fail(origin, "key '" + key + "' must be positive");
    }
    try {
        return parse_duration_ns(text);
    } catch (const ConfigError& e) {
        fail(origin, "key '" + key + "': " + e.what());
    }
}

}  // namespace

FileConfig parse_config_text(const std::string& text,
                             const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                          /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        fail(origin, "parse error at line " + std::to_string(line) +
                         ", column " + std::to_string(col));
    }
    if (!doc.is_object())
        fail(origin, "top level must be an object");

    FileConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "alpha")
            cfg.alpha = take_number(value, origin, key);
        else if (key == "beta")
            cfg.beta = take_number(value, origin, key);
        else if (key == "threshold")
            cfg.threshold = take_number(value, origin, key);
        else if (key == "buffer_capacity")
            cfg.buffer_capacity = take_unsigned(value, origin, key);
        else if (key == "gating_enabled")
            cfg.gating_enabled = take_bool(value, origin, key);
        else if (key == "clock")
            cfg.clock = take_string(value, origin, key);
        else if (key == "frame_interval")
            cfg.frame_interval_ns =
                take_duration_ns(value, origin, key, /*allow_zero=*/false);
        else if (key == "width")
            cfg.width = take_u32(value, origin, key);
        else if (key == "height")
            cfg.height = take_u32(value, origin, key);
        else if (key == "scene")
            cfg.scene = take_string(value, origin, key);
        else if (key == "frames")
            cfg.frames = take_unsigned(value, origin, key);
        else if (key == "seed")
            cfg.seed = take_unsigned(value, origin, key);
        else if (key == "redundancy")
            cfg.redundancy = take_number(value, origin, key);
        else if (key == "input")
            cfg.input = take_string(value, origin, key);
        else if (key == "out")
            cfg.out = take_string(value, origin, key);
        else if (key == "segments")
            cfg.segments = take_unsigned(value, origin, key);
        else if (key == "stub_latency")
            cfg.stub_latency_ns =
                take_duration_ns(value, origin, key, /*allow_zero=*/true);
        else if (key == "stub_jitter")
            cfg.stub_jitter_ns =
                take_duration_ns(value, origin, key, /*allow_zero=*/true);
        else if (key == "synthetic_truth")
            cfg.synthetic_truth = take_bool(value, origin, key);
        else
            fail(origin, "unknown key '" + key + "'");
    }
    return cfg;
}

FileConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config file '" + path.string() +
                          "' cannot be opened");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), "'" + path.string() + "'");
}

}  // namespace entrogate
