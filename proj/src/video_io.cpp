#include "entrogate/video_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "entrogate/errors.hpp"

namespace entrogate {

namespace {

struct SceneSeeds {
    uint64_t texture;
    uint64_t mask;
    uint64_t noise;
};

SceneSeeds derive_seeds(const SceneSpec& spec) {
    SplitMix64 master(spec.seed);
    SceneSeeds s{};
    s.texture = master.next_u64();
    s.mask = master.next_u64();
    s.noise = master.next_u64();
    return s;
}

// 64-level texture: values {0, 4, ..., 252}. Entropy sits near 6 bits, so
// a textured frame scores well above flat content but stays clearly apart
// from full-range noise. 255 never appears, which leaves the bright moving
// rectangle uniquely identifiable in the pixel data.
void fill_texture(std::vector<uint8_t>& pixels, uint64_t seed) {
    SplitMix64 rng(seed);
    for (auto& px : pixels) {
        px = static_cast<uint8_t>((rng.next_u64() >> 58) << 2);
    }
}

void paint_rect(std::vector<uint8_t>& pixels, uint32_t width,
                const Rect& rect, uint8_t value) {
    for (uint32_t row = 0; row < rect.h; ++row) {
        auto* base = pixels.data() +
                     static_cast<size_t>(rect.y + row) * width + rect.x;
        std::memset(base, value, rect.w);
    }
}

void atomic_write(const std::filesystem::path& path, const std::string& data) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write to " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " +
                      path.string() + ": " + ec.message());
    }
}

}  // namespace

void SceneSpec::validate() const {
    if (frame_count < 1) throw ConfigError("frame count must be >= 1");
    if (!(redundancy_ratio >= 0.0 && redundancy_ratio <= 1.0))
        throw ConfigError("redundancy ratio must be in [0, 1]");
}

SceneKind scene_kind_from_string(const std::string& name) {
    if (name == "static") return SceneKind::Static;
    if (name == "moving") return SceneKind::MovingObject;
    if (name == "noise") return SceneKind::NoiseBurst;
    if (name == "composite") return SceneKind::Composite;
    throw ConfigError("unknown scene kind '" + name +
                      "' (expected static|moving|noise|composite)");
}

std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Static: return "static";
        case SceneKind::MovingObject: return "moving";
        case SceneKind::NoiseBurst: return "noise";
        case SceneKind::Composite: return "composite";
    }
    return "unknown";
}

RawSequenceReader::RawSequenceReader(const std::filesystem::path& path,
                                     uint32_t width, uint32_t height,
                                     const Clock& clock)
    : width_(width), height_(height), clock_(clock), frames_left_(0) {
    if (width < 1 || height < 1)
        throw ConfigError("frame geometry must be >= 1x1");
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot open raw sequence " + path.string());
    const uint64_t frame_bytes = static_cast<uint64_t>(width) * height;
    const uint64_t residue = size % frame_bytes;
    if (residue != 0) {
        std::ostringstream msg;
        msg << "raw sequence " << path.string() << " has " << size
            << " bytes, not a multiple of the " << frame_bytes
            << "-byte frame size (residue " << residue << " bytes)";
        throw FormatError(msg.str());
    }
    in_.open(path, std::ios::binary);
    if (!in_) throw IoError("cannot open raw sequence " + path.string());
    frames_left_ = size / frame_bytes;
}

std::optional<Frame> RawSequenceReader::next() {
    if (frames_left_ == 0) return std::nullopt;
    Frame frame;
    frame.width = width_;
    frame.height = height_;
    frame.pixels.resize(static_cast<size_t>(width_) * height_);
    in_.read(reinterpret_cast<char*>(frame.pixels.data()),
             static_cast<std::streamsize>(frame.pixels.size()));
    if (in_.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
        throw IoError("raw sequence shrank while reading");
    frame.capture_time_ns = clock_.now_ns();
    --frames_left_;
    return frame;
}

Y4mReader::Y4mReader(const std::filesystem::path& path, const Clock& clock)
    : path_(path), clock_(clock) {
    in_.open(path, std::ios::binary);
    if (!in_) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in_, header) || header.rfind("YUV4MPEG2", 0) != 0)
        throw FormatError(path.string() + ": not a Y4M stream");

    std::string colorspace = "420";  // convention when the C token is absent
    std::istringstream tokens(header);
    std::string tok;
    tokens >> tok;  // magic
    while (tokens >> tok) {
        if (tok.empty()) continue;
        switch (tok[0]) {
            case 'W': width_ = static_cast<uint32_t>(std::stoul(tok.substr(1))); break;
            case 'H': height_ = static_cast<uint32_t>(std::stoul(tok.substr(1))); break;
            case 'C': colorspace = tok.substr(1); break;
            default: break;  // frame rate, interlace, aspect, extensions
        }
    }
    if (width_ < 1 || height_ < 1)
        throw FormatError(path.string() + ": Y4M header missing W or H");
    if (colorspace == "mono") {
        mono_ = true;
    } else if (colorspace == "420") {
        mono_ = false;
        if (width_ % 2 != 0 || height_ % 2 != 0)
            throw FormatError(path.string() +
                              ": C420 requires even frame dimensions");
    } else {
        throw FormatError(path.string() + ": unsupported Y4M colorspace 'C" +
                          colorspace + "' (only C420 and Cmono are accepted)");
    }
}

std::optional<Frame> Y4mReader::next() {
    std::string marker;
    if (!std::getline(in_, marker)) return std::nullopt;  // clean EOF
    if (marker.rfind("FRAME", 0) != 0) {
        std::ostringstream msg;
        msg << path_.string() << ": malformed FRAME marker at frame index "
            << frame_index_;
        throw FormatError(msg.str());
    }
    Frame frame;
    frame.width = width_;
    frame.height = height_;
    frame.pixels.resize(static_cast<size_t>(width_) * height_);
    in_.read(reinterpret_cast<char*>(frame.pixels.data()),
             static_cast<std::streamsize>(frame.pixels.size()));
    bool truncated =
        in_.gcount() != static_cast<std::streamsize>(frame.pixels.size());
    if (!truncated && !mono_) {
        const std::streamsize chroma =
            static_cast<std::streamsize>(width_ / 2) * (height_ / 2) * 2;
        in_.ignore(chroma);
        truncated = in_.gcount() != chroma;
    }
    if (truncated) {
        std::ostringstream msg;
        msg << path_.string() << ": truncated frame payload at frame index "
            << frame_index_;
        throw FormatError(msg.str());
    }
    frame.capture_time_ns = clock_.now_ns();
    ++frame_index_;
    return frame;
}

Rect moving_object_rect(uint32_t width, uint32_t height, uint64_t steps) {
    Rect rect;
    rect.w = std::max(width / 8, 1u);
    rect.h = std::max(height / 8, 1u);
    const uint64_t span = width - rect.w + 1;
    rect.x = static_cast<uint32_t>(steps % span);
    rect.y = (height - rect.h) / 2;
    return rect;
}

std::vector<bool> SceneGenerator::composite_repeat_mask(const SceneSpec& spec) {
    const uint64_t n = spec.frame_count;
    std::vector<bool> mask(n, false);
    if (n < 2) return mask;
    // Frame 0 has no predecessor to repeat, so repeats are drawn from
    // frames 1..n-1 without replacement (partial Fisher-Yates).
    uint64_t k = static_cast<uint64_t>(
        std::llround(spec.redundancy_ratio * static_cast<double>(n)));
    k = std::min(k, n - 1);
    std::vector<uint64_t> positions(n - 1);
    for (uint64_t i = 0; i < n - 1; ++i) positions[i] = i + 1;
    SplitMix64 rng(derive_seeds(spec).mask);
    for (uint64_t i = 0; i < k; ++i) {
        const uint64_t j = i + rng.next_below(positions.size() - i);
        std::swap(positions[i], positions[j]);
        mask[positions[i]] = true;
    }
    return mask;
}

SceneGenerator::SceneGenerator(const SceneSpec& spec, uint32_t width,
                               uint32_t height, const Clock& clock)
    : spec_(spec),
      width_(width),
      height_(height),
      clock_(clock),
      noise_rng_(derive_seeds(spec).noise) {
    spec_.validate();
    if (width < 1 || height < 1)
        throw ConfigError("frame geometry must be >= 1x1");
    const size_t n = static_cast<size_t>(width) * height;
    if (spec_.kind != SceneKind::NoiseBurst) {
        base_texture_.resize(n);
        fill_texture(base_texture_, derive_seeds(spec_).texture);
    }
    if (spec_.kind == SceneKind::Composite) {
        repeat_mask_ = composite_repeat_mask(spec_);
    }
}

Frame SceneGenerator::make_frame(uint64_t index) {
    Frame frame;
    frame.width = width_;
    frame.height = height_;
    const size_t n = static_cast<size_t>(width_) * height_;
    switch (spec_.kind) {
        case SceneKind::Static:
            frame.pixels = base_texture_;
            break;
        case SceneKind::MovingObject:
            frame.pixels = base_texture_;
            paint_rect(frame.pixels, width_,
                       moving_object_rect(width_, height_, index), 255);
            break;
        case SceneKind::NoiseBurst:
            frame.pixels.resize(n);
            for (auto& px : frame.pixels)
                px = static_cast<uint8_t>(noise_rng_.next_u64() >> 56);
            break;
        case SceneKind::Composite:
            if (index > 0 && repeat_mask_[index]) {
                frame.pixels = previous_pixels_;
            } else {
                frame.pixels = base_texture_;
                paint_rect(frame.pixels, width_,
                           moving_object_rect(width_, height_, mover_steps_),
                           255);
                ++mover_steps_;
            }
            break;
    }
    previous_pixels_ = frame.pixels;
    return frame;
}

std::optional<Frame> SceneGenerator::next() {
    if (emitted_ >= spec_.frame_count) return std::nullopt;
    Frame frame = make_frame(emitted_);
    frame.capture_time_ns = clock_.now_ns();
    ++emitted_;
    return frame;
}

std::optional<Rect> SceneGenerator::truth_bbox(const SceneSpec& spec,
                                               uint32_t width, uint32_t height,
                                               uint64_t frame_id) {
    if (frame_id >= spec.frame_count) return std::nullopt;
    switch (spec.kind) {
        case SceneKind::Static:
        case SceneKind::NoiseBurst:
            return std::nullopt;
        case SceneKind::MovingObject:
            return moving_object_rect(width, height, frame_id);
        case SceneKind::Composite: {
            // A repeat shows its predecessor's pixels, so the visible
            // rectangle is the one from the most recent non-repeat frame.
            const auto mask = composite_repeat_mask(spec);
            uint64_t steps = 0;
            for (uint64_t i = 1; i <= frame_id; ++i) {
                if (!mask[i]) ++steps;
            }
            return moving_object_rect(width, height, steps);
        }
    }
    return std::nullopt;
}

void write_raw_sequence(const std::filesystem::path& path,
                        const std::vector<Frame>& frames) {
    std::string data;
    for (const auto& f : frames) {
        data.append(reinterpret_cast<const char*>(f.pixels.data()),
                    f.pixels.size());
    }
    atomic_write(path, data);
}

void write_y4m_mono(const std::filesystem::path& path,
                    const std::vector<Frame>& frames) {
    if (frames.empty()) throw ConfigError("cannot write an empty Y4M stream");
    std::ostringstream out;
    out << "YUV4MPEG2 W" << frames.front().width << " H"
        << frames.front().height << " F30:1 Ip A1:1 Cmono\n";
    for (const auto& f : frames) {
        if (f.width != frames.front().width ||
            f.height != frames.front().height)
            throw ConfigError("Y4M frames must share one geometry");
        out << "FRAME\n";
        out.write(reinterpret_cast<const char*>(f.pixels.data()),
                  static_cast<std::streamsize>(f.pixels.size()));
    }
    atomic_write(path, out.str());
}

std::vector<Frame> collect_frames(FrameSource& source) {
    std::vector<Frame> frames;
    while (auto f = source.next()) frames.push_back(std::move(*f));
    return frames;
}

}  // namespace entrogate
