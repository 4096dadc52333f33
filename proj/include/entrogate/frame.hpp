#pragma once

#include <cstdint>
#include <vector>

namespace entrogate {

// One grayscale frame, row-major, top-left origin, 1 byte per pixel.
struct Frame {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint8_t> pixels;
    int64_t capture_time_ns = 0;

    size_t pixel_count() const { return pixels.size(); }
    bool geometry_valid() const {
        return width >= 1 && height >= 1 &&
               pixels.size() == static_cast<size_t>(width) * height;
    }
};

// Axis-aligned rectangle in pixel coordinates.
struct Rect {
    uint32_t x = 0;
    uint32_t y = 0;
    uint32_t w = 0;
    uint32_t h = 0;

    bool operator==(const Rect&) const = default;
    bool inside(uint32_t frame_w, uint32_t frame_h) const {
        return w >= 1 && h >= 1 && x + w <= frame_w && y + h <= frame_h;
    }
};

}  // namespace entrogate
