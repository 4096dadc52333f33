#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace entrogate {

enum class ClockMode { Monotonic, Virtual };

// Time source for frame stamping. Monotonic wraps steady_clock; Virtual is
// a simulated clock advanced explicitly by the discrete-event pipeline so
// that every timestamp, and everything derived from one, is reproducible.
class Clock {
public:
    virtual ~Clock() = default;
    virtual int64_t now_ns() const = 0;
};

class MonotonicClock final : public Clock {
public:
    int64_t now_ns() const override {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
};

class VirtualClock final : public Clock {
public:
    explicit VirtualClock(int64_t start_ns = 0) : now_(start_ns) {}
    int64_t now_ns() const override { return now_; }
    void set_ns(int64_t t) { now_ = t; }
    void advance_ns(int64_t dt) { now_ += dt; }

private:
    int64_t now_;
};

// Parses "33ms", "1s", "500us", "250000ns"; a bare number means ms.
// Throws ConfigError on garbage or a non-positive result.
int64_t parse_duration_ns(const std::string& text);

}  // namespace entrogate
