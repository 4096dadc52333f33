#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "entrogate/clock.hpp"
#include "entrogate/frame.hpp"
#include "entrogate/rng.hpp"

namespace entrogate {

enum class SceneKind { Static, MovingObject, NoiseBurst, Composite };

// Recipe for a synthetic stream. Static repeats one textured frame;
// MovingObject slides a bright rectangle one pixel per frame over a
// textured background; NoiseBurst draws fresh uniform noise every frame;
// Composite interleaves exact predecessor repeats (redundancy_ratio of the
// stream, positions seeded) with MovingObject frames elsewhere.
struct SceneSpec {
    SceneKind kind = SceneKind::Composite;
    uint64_t frame_count = 1;
    uint64_t seed = 0;
    double redundancy_ratio = 0.0;

    void validate() const;  // throws ConfigError
};

SceneKind scene_kind_from_string(const std::string& name);
std::string to_string(SceneKind kind);

// Pull-based frame stream. Sources are single-reader; the pipeline owns
// its source on the ingestion thread.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    // nullopt once the stream is exhausted.
    virtual std::optional<Frame> next() = 0;
};

// Headerless concatenated frames, 1 byte per pixel, row-major.
class RawSequenceReader final : public FrameSource {
public:
    RawSequenceReader(const std::filesystem::path& path, uint32_t width,
                      uint32_t height, const Clock& clock);
    std::optional<Frame> next() override;

private:
    std::ifstream in_;
    uint32_t width_;
    uint32_t height_;
    const Clock& clock_;
    uint64_t frames_left_;
};

// YUV4MPEG2 reader. Accepts C420 and Cmono streams (a missing colorspace
// token means C420 per the usual convention) and yields the luma plane of
// each frame; chroma planes are skipped.
class Y4mReader final : public FrameSource {
public:
    Y4mReader(const std::filesystem::path& path, const Clock& clock);
    std::optional<Frame> next() override;

    uint32_t width() const { return width_; }
    uint32_t height() const { return height_; }
    bool mono() const { return mono_; }

private:
    std::ifstream in_;
    std::filesystem::path path_;
    const Clock& clock_;
    uint32_t width_ = 0;
    uint32_t height_ = 0;
    bool mono_ = false;
    uint64_t frame_index_ = 0;
};

// Deterministic synthetic stream: equal (spec, width, height) produce
// byte-identical frames on every platform.
class SceneGenerator final : public FrameSource {
public:
    SceneGenerator(const SceneSpec& spec, uint32_t width, uint32_t height,
                   const Clock& clock);
    std::optional<Frame> next() override;

    // Rectangle shown in the given frame, for scenes that have one.
    // Recomputable from the scene recipe alone, so a detector stub can
    // share it.
    static std::optional<Rect> truth_bbox(const SceneSpec& spec,
                                          uint32_t width, uint32_t height,
                                          uint64_t frame_id);

    // Frame indices (within 1..frame_count-1) that exactly repeat their
    // predecessor in a Composite stream. Exposed so tests and the truth
    // function agree with the generator byte for byte.
    static std::vector<bool> composite_repeat_mask(const SceneSpec& spec);

private:
    Frame make_frame(uint64_t index);

    SceneSpec spec_;
    uint32_t width_;
    uint32_t height_;
    const Clock& clock_;
    uint64_t emitted_ = 0;
    uint64_t mover_steps_ = 0;
    std::vector<uint8_t> base_texture_;
    std::vector<uint8_t> previous_pixels_;
    std::vector<bool> repeat_mask_;
    SplitMix64 noise_rng_;
};

// The moving rectangle for a MovingObject stream after `steps` one-pixel
// advances. Wraps at the right edge; always fully inside the frame.
Rect moving_object_rect(uint32_t width, uint32_t height, uint64_t steps);

// Writes frames as a raw sequence (atomic write-then-rename).
void write_raw_sequence(const std::filesystem::path& path,
                        const std::vector<Frame>& frames);

// Writes frames as a Cmono YUV4MPEG2 stream (atomic write-then-rename).
void write_y4m_mono(const std::filesystem::path& path,
                    const std::vector<Frame>& frames);

// Drains a source into memory. Test and CLI convenience.
std::vector<Frame> collect_frames(FrameSource& source);

}  // namespace entrogate
