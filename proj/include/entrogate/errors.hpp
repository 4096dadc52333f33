#pragma once

#include <stdexcept>
#include <string>

namespace entrogate {

// Invalid configuration or usage. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failure (missing file, unwritable path). Exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data that does not match a declared format. Exit code 1.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace entrogate
