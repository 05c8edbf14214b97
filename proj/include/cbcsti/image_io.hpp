#ifndef CBCSTI_IMAGE_IO_HPP
#define CBCSTI_IMAGE_IO_HPP

#include <string>

#include "cbcsti/image.hpp"

namespace cbcsti {

enum class ImageFormat { ppm, pgm, bmp };

// Decodes binary PPM (P6), binary PGM (P5) or uncompressed 24-bit BMP into
// channel-major bytes; the format is picked from the file contents.
ImageBuffer load_image(const std::string& path);

// Deterministic byte-exact writers. ppm/pgm must match the channel count;
// bmp writes 24-bit rows (gray images are expanded).
void save_image(const ImageBuffer& img, const std::string& path, ImageFormat format);

// Picks the format from the file extension (.ppm/.pgm/.bmp).
void save_image(const ImageBuffer& img, const std::string& path);

}  // namespace cbcsti

#endif
