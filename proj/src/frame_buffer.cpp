#include "entrogate/frame_buffer.hpp"

#include "entrogate/errors.hpp"

namespace entrogate {

FrameBuffer::FrameBuffer(size_t capacity, BufferPolicy policy)
    : capacity_(capacity), policy_(policy) {
    if (capacity == 0) throw ConfigError("buffer capacity must be >= 1");
    entries_.reserve(capacity);
}

size_t FrameBuffer::min_priority_index() const {
    size_t best = 0;
    for (size_t i = 1; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        const auto& b = entries_[best];
        if (e.score.p < b.score.p ||
            (e.score.p == b.score.p && e.frame_id < b.frame_id)) {
            best = i;
        }
    }
    return best;
}

size_t FrameBuffer::max_priority_index() const {
    size_t best = 0;
    for (size_t i = 1; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        const auto& b = entries_[best];
        if (e.score.p > b.score.p ||
            (e.score.p == b.score.p && e.frame_id < b.frame_id)) {
            best = i;
        }
    }
    return best;
}

size_t FrameBuffer::oldest_index() const {
    size_t best = 0;
    for (size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].frame_id < entries_[best].frame_id) best = i;
    }
    return best;
}

PushOutcome FrameBuffer::push(ScoredFrame item) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (entries_.size() < capacity_) {
        entries_.push_back(std::move(item));
        nonempty_.notify_one();
        return {PushOutcome::Kind::Accepted, std::nullopt};
    }
    if (policy_ == BufferPolicy::Fifo) {
        // No priority order to defend; overflow keeps the stream fresh by
        // replacing the oldest resident.
        const size_t victim = oldest_index();
        const uint64_t evicted = entries_[victim].frame_id;
        entries_[victim] = std::move(item);
        nonempty_.notify_one();
        return {PushOutcome::Kind::AcceptedEvicting, evicted};
    }
    const size_t victim = min_priority_index();
    if (item.score.p > entries_[victim].score.p) {
        const uint64_t evicted = entries_[victim].frame_id;
        entries_[victim] = std::move(item);
        nonempty_.notify_one();
        return {PushOutcome::Kind::AcceptedEvicting, evicted};
    }
    return {PushOutcome::Kind::Rejected, std::nullopt};
}

std::optional<ScoredFrame> FrameBuffer::pop_highest() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (entries_.empty()) return std::nullopt;
    const size_t idx = policy_ == BufferPolicy::Fifo ? oldest_index()
                                                     : max_priority_index();
    ScoredFrame out = std::move(entries_[idx]);
    entries_[idx] = std::move(entries_.back());
    entries_.pop_back();
    return out;
}

size_t FrameBuffer::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

std::vector<std::pair<uint64_t, double>> FrameBuffer::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<std::pair<uint64_t, double>> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.emplace_back(e.frame_id, e.score.p);
    return out;
}

bool FrameBuffer::wait_for_item(std::chrono::nanoseconds timeout) const {
    std::unique_lock<std::mutex> lock(mutex_);
    return nonempty_.wait_for(lock, timeout,
                              [this] { return !entries_.empty(); });
}

}  // namespace entrogate
