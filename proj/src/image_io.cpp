#include "cbcsti/image_io.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cbcsti {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

// PNM header tokens separated by whitespace; '#' starts a comment line.
struct PnmParser {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    std::uint32_t next_int() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
            throw std::runtime_error("corrupt PNM header");
        std::uint64_t v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 0xFFFFFFFFull) throw std::runtime_error("corrupt PNM header");
            ++pos;
        }
        return static_cast<std::uint32_t>(v);
    }
};

ImageBuffer load_pnm(const std::vector<std::uint8_t>& bytes, unsigned channels) {
    PnmParser p{bytes, 2};
    const std::uint32_t w = p.next_int();
    const std::uint32_t h = p.next_int();
    const std::uint32_t maxval = p.next_int();
    if (w == 0 || h == 0 || maxval != 255)
        throw std::runtime_error("unsupported PNM dimensions or depth (need maxval 255)");
    ++p.pos;  // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() - p.pos < need) throw std::runtime_error("truncated PNM pixel data");
    ImageBuffer img(w, h, channels);
    const std::uint8_t* src = bytes.data() + p.pos;
    if (channels == 1) {
        std::copy(src, src + need, img.data.begin());
    } else {
        // interleaved RGB -> channel planes
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i)
            for (unsigned c = 0; c < 3; ++c) img.data[c * img.plane_size() + i] = src[i * 3 + c];
    }
    return img;
}

ImageBuffer load_bmp(const std::vector<std::uint8_t>& bytes) {
    auto u16 = [&](std::size_t off) {
        return static_cast<std::uint32_t>(bytes[off]) | static_cast<std::uint32_t>(bytes[off + 1]) << 8;
    };
    auto u32 = [&](std::size_t off) {
        return u16(off) | u16(off + 2) << 16;
    };
    if (bytes.size() < 54) throw std::runtime_error("truncated BMP header");
    const std::uint32_t data_offset = u32(10);
    const std::uint32_t header_size = u32(14);
    if (header_size < 40) throw std::runtime_error("unsupported BMP header");
    const std::int32_t w = static_cast<std::int32_t>(u32(18));
    const std::int32_t h = static_cast<std::int32_t>(u32(22));
    const std::uint32_t bpp = u16(28);
    const std::uint32_t compression = u32(30);
    if (w <= 0 || h == 0) throw std::runtime_error("unsupported BMP dimensions");
    if (bpp != 24 || compression != 0)
        throw std::runtime_error("only uncompressed 24-bit BMP is supported");
    const bool bottom_up = h > 0;
    const std::uint32_t height = static_cast<std::uint32_t>(bottom_up ? h : -h);
    const std::uint32_t width = static_cast<std::uint32_t>(w);
    const std::size_t row_bytes = (static_cast<std::size_t>(width) * 3 + 3) & ~std::size_t{3};
    if (bytes.size() < data_offset + row_bytes * height)
        throw std::runtime_error("truncated BMP pixel data");
    ImageBuffer img(width, height, 3);
    for (std::uint32_t row = 0; row < height; ++row) {
        const std::uint32_t y = bottom_up ? height - 1 - row : row;
        const std::uint8_t* src = bytes.data() + data_offset + static_cast<std::size_t>(row) * row_bytes;
        for (std::uint32_t x = 0; x < width; ++x) {
            img.at(x, y, 2) = src[x * 3];      // B
            img.at(x, y, 1) = src[x * 3 + 1];  // G
            img.at(x, y, 0) = src[x * 3 + 2];  // R
        }
    }
    return img;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

ImageBuffer load_image(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return load_pnm(bytes, 3);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return load_pnm(bytes, 1);
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return load_bmp(bytes);
    throw std::runtime_error("unsupported image format (expected P6/P5 PNM or 24-bit BMP)");
}

void save_image(const ImageBuffer& img, const std::string& path, ImageFormat format) {
    std::vector<std::uint8_t> out;
    switch (format) {
        case ImageFormat::pgm:
        case ImageFormat::ppm: {
            const bool color = format == ImageFormat::ppm;
            if ((color && img.channels != 3) || (!color && img.channels != 1))
                throw std::invalid_argument("channel count does not match the PNM format");
            const std::string header = std::string(color ? "P6" : "P5") + "\n" +
                                       std::to_string(img.width) + " " +
                                       std::to_string(img.height) + "\n255\n";
            out.assign(header.begin(), header.end());
            if (color) {
                for (std::size_t i = 0; i < img.plane_size(); ++i)
                    for (unsigned c = 0; c < 3; ++c)
                        out.push_back(img.data[c * img.plane_size() + i]);
            } else {
                out.insert(out.end(), img.data.begin(), img.data.end());
            }
            break;
        }
        case ImageFormat::bmp: {
            if (img.channels != 1 && img.channels != 3)
                throw std::invalid_argument("BMP writer supports 1 or 3 channels");
            const std::size_t row_bytes =
                (static_cast<std::size_t>(img.width) * 3 + 3) & ~std::size_t{3};
            const std::size_t data_size = row_bytes * img.height;
            const std::uint32_t file_size = static_cast<std::uint32_t>(54 + data_size);
            auto push_u16 = [&](std::uint32_t v) {
                out.push_back(static_cast<std::uint8_t>(v));
                out.push_back(static_cast<std::uint8_t>(v >> 8));
            };
            auto push_u32 = [&](std::uint32_t v) {
                push_u16(v & 0xFFFF);
                push_u16(v >> 16);
            };
            out.push_back('B');
            out.push_back('M');
            push_u32(file_size);
            push_u32(0);
            push_u32(54);
            push_u32(40);
            push_u32(img.width);
            push_u32(img.height);
            push_u16(1);
            push_u16(24);
            push_u32(0);
            push_u32(static_cast<std::uint32_t>(data_size));
            push_u32(2835);
            push_u32(2835);
            push_u32(0);
            push_u32(0);
            for (std::uint32_t row = 0; row < img.height; ++row) {
                const std::uint32_t y = img.height - 1 - row;
                for (std::uint32_t x = 0; x < img.width; ++x) {
                    const std::uint8_t r = img.at(x, y, 0);
                    const std::uint8_t g = img.channels == 3 ? img.at(x, y, 1) : r;
                    const std::uint8_t b = img.channels == 3 ? img.at(x, y, 2) : r;
                    out.push_back(b);
                    out.push_back(g);
                    out.push_back(r);
                }
                out.resize(out.size() + (row_bytes - static_cast<std::size_t>(img.width) * 3), 0);
            }
            break;
        }
    }
    write_file(path, out);
}

void save_image(const ImageBuffer& img, const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "ppm") return save_image(img, path, ImageFormat::ppm);
    if (ext == "pgm") return save_image(img, path, ImageFormat::pgm);
    if (ext == "bmp") return save_image(img, path, ImageFormat::bmp);
    throw std::invalid_argument("unsupported image extension: " + path);
}

}  // namespace cbcsti
