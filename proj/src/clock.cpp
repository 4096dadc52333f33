#include "entrogate/clock.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "entrogate/errors.hpp"

namespace entrogate {

// Accepts "<number><unit>" with unit one of ns/us/ms/s; a bare number
// means milliseconds. The value must be a positive integer.
int64_t parse_duration_ns(const std::string& text) {
    size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = text.size();
    while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
    const std::string s = text.substr(i, j - i);
    if (s.empty()) throw ConfigError("duration is empty");

    size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits == 0)
        throw ConfigError("duration '" + text + "' must start with a positive integer");

    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + digits, value);
    if (ec != std::errc() || ptr != s.data() + digits)
        throw ConfigError("duration '" + text + "' has an unparseable magnitude");

    const std::string unit = s.substr(digits);
    int64_t scale = 0;
    if (unit.empty() || unit == "ms")
        scale = 1'000'000;
    else if (unit == "ns")
        scale = 1;
    else if (unit == "us")
        scale = 1'000;
    else if (unit == "s")
        scale = 1'000'000'000;
    else
        throw ConfigError("duration '" + text + "' has unknown unit '" + unit +
                          "' (expected ns, us, ms, or s)");

    if (value <= 0) throw ConfigError("duration '" + text + "' must be positive");
    if (value > (INT64_MAX / scale))
        throw ConfigError("duration '" + text + "' overflows the nanosecond range");
    return value * scale;
}

}  // namespace entrogate
