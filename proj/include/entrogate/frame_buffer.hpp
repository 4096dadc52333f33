#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "entrogate/entropy.hpp"
#include "entrogate/frame.hpp"

namespace entrogate {

// A frame admitted past the gate, together with its score. frame_id is the
// capture sequence number and doubles as the age tie-breaker.
struct ScoredFrame {
    uint64_t frame_id = 0;
    int64_t capture_time_ns = 0;
    Frame frame;
    PriorityScore score;
};

struct PushOutcome {
    enum class Kind { Accepted, AcceptedEvicting, Rejected };
    Kind kind = Kind::Accepted;
    // Set only for AcceptedEvicting.
    std::optional<uint64_t> evicted_frame_id;
};

// Priority: push evicts the lowest-priority resident (oldest on ties) when
// full, pop returns the highest-priority resident (oldest on ties).
// Fifo: push evicts the oldest resident when full, pop returns the oldest.
// Fifo is the fallback ordering when entropy gating is disabled.
enum class BufferPolicy { Priority, Fifo };

// Bounded staging buffer between the scoring stage and the inference
// stage. Every operation is atomic under one internal mutex and returns
// without blocking; multiple producers and consumers may share the buffer.
// A full buffer never displaces a higher-priority resident for a
// lower-priority arrival.
class FrameBuffer {
public:
    // Throws ConfigError when capacity is 0.
    explicit FrameBuffer(size_t capacity,
                         BufferPolicy policy = BufferPolicy::Priority);

    PushOutcome push(ScoredFrame item);

    // Removes and returns the best entry per the policy; nullopt when empty.
    std::optional<ScoredFrame> pop_highest();

    size_t size() const;
    size_t capacity() const { return capacity_; }
    BufferPolicy policy() const { return policy_; }

    // (frame_id, priority) of every resident, unordered. Test and
    // diagnostics hook; takes the same mutex as push/pop.
    std::vector<std::pair<uint64_t, double>> snapshot() const;

    // Blocks until an entry is present or the timeout expires. Returns
    // whether an entry was present at wakeup. Consumer-side helper; the
    // core operations above stay non-blocking.
    bool wait_for_item(std::chrono::nanoseconds timeout) const;

private:
    size_t min_priority_index() const;  // lowest priority, oldest on ties
    size_t max_priority_index() const;  // highest priority, oldest on ties
    size_t oldest_index() const;        // lowest frame_id

    const size_t capacity_;
    const BufferPolicy policy_;
    mutable std::mutex mutex_;
    mutable std::condition_variable nonempty_;
    std::vector<ScoredFrame> entries_;
};

}  // namespace entrogate
