#ifndef CBCSTI_IMAGE_HPP
#define CBCSTI_IMAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cbcsti {

// Channel-major byte image: data holds `channels` planes of width*height bytes.
// original_width/height remember the pre-padding shape (0 = never padded).
struct ImageBuffer {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 1;
    std::uint32_t original_width = 0;
    std::uint32_t original_height = 0;
    std::vector<std::uint8_t> data;

    ImageBuffer() = default;
    ImageBuffer(std::uint32_t w, std::uint32_t h, std::uint32_t c)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, 0) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c) {
        return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
        return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
    }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Zero-pads to the next square; a no-op for square input.
ImageBuffer pad_to_square(const ImageBuffer& img);

// Crops back to the dimensions recorded by pad_to_square.
ImageBuffer unpad(const ImageBuffer& img);

}  // namespace cbcsti

#endif
