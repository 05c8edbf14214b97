#include "cbcsti/grid_permutation.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cbcsti {

ImageBuffer pad_to_square(const ImageBuffer& img) {
    if (img.width == img.height) {
        ImageBuffer out = img;
        if (out.original_width == 0) {
            out.original_width = img.width;
            out.original_height = img.height;
        }
        return out;
    }
    const std::uint32_t n = std::max(img.width, img.height);
    ImageBuffer out(n, n, img.channels);
    out.original_width = img.width;
    out.original_height = img.height;
    for (std::uint32_t c = 0; c < img.channels; ++c)
        for (std::uint32_t y = 0; y < img.height; ++y)
            for (std::uint32_t x = 0; x < img.width; ++x)
                out.at(x, y, c) = img.at(x, y, c);
    return out;
}

ImageBuffer unpad(const ImageBuffer& img) {
    const std::uint32_t ow = img.original_width ? img.original_width : img.width;
    const std::uint32_t oh = img.original_height ? img.original_height : img.height;
    if (ow == img.width && oh == img.height) {
        ImageBuffer out = img;
        out.original_width = ow;
        out.original_height = oh;
        return out;
    }
    ImageBuffer out(ow, oh, img.channels);
    out.original_width = ow;
    out.original_height = oh;
    for (std::uint32_t c = 0; c < img.channels; ++c)
        for (std::uint32_t y = 0; y < oh; ++y)
            for (std::uint32_t x = 0; x < ow; ++x)
                out.at(x, y, c) = img.at(x, y, c);
    return out;
}

GridPoint arnold_point(std::uint32_t x, std::uint32_t y, const ArnoldParams& params,
                       std::uint32_t n) {
    const std::uint64_t t = params.t, q = params.q;
    const std::uint64_t nx = (x + t * y) % n;
    const std::uint64_t ny = (q * x + (t * q + 1) * y) % n;
    return GridPoint{static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny)};
}

GridPoint standard_point(std::uint32_t x, std::uint32_t y, const StandardMapParams& params,
                         std::uint32_t n) {
    const std::uint32_t nx = (x + y) % n;
    const double arg = params.sine_convention == SineConvention::conventional
                           ? 2.0 * std::numbers::pi * nx / n
                           : nx * n / (2.0 * std::numbers::pi);
    const double s = params.k * std::sin(arg);
    // round half away from zero
    const long long shift = static_cast<long long>(s >= 0 ? std::floor(s + 0.5)
                                                          : std::ceil(s - 0.5));
    const long long m = static_cast<long long>(n);
    const long long ny = ((static_cast<long long>(y) + shift) % m + m) % m;
    return GridPoint{nx, static_cast<std::uint32_t>(ny)};
}

NonBijectiveError::NonBijectiveError(std::size_t a, std::size_t b, std::size_t tgt)
    : std::runtime_error("permutation is not bijective: sources " + std::to_string(a) +
                         " and " + std::to_string(b) + " both map to " + std::to_string(tgt)),
      source_a(a), source_b(b), target(tgt) {}

GridPermutation::GridPermutation(std::uint32_t n, std::vector<std::uint32_t> fwd)
    : n_(n), forward_(std::move(fwd)), inverse_(forward_.size(), 0) {
    std::vector<std::uint8_t> seen(forward_.size(), 0);
    std::vector<std::uint32_t> first_source(forward_.size(), 0);
    for (std::size_t i = 0; i < forward_.size(); ++i) {
        const std::uint32_t tgt = forward_[i];
        if (tgt >= forward_.size() || seen[tgt])
            throw NonBijectiveError(tgt < forward_.size() ? first_source[tgt] : i, i, tgt);
        seen[tgt] = 1;
        first_source[tgt] = static_cast<std::uint32_t>(i);
        inverse_[tgt] = static_cast<std::uint32_t>(i);
    }
}

GridPermutation GridPermutation::build(const MapParams& params, std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("grid side must be >= 2");
    std::vector<std::uint32_t> fwd(static_cast<std::size_t>(n) * n);
    for (std::uint32_t y = 0; y < n; ++y) {
        for (std::uint32_t x = 0; x < n; ++x) {
            GridPoint p{x, y};
            if (const auto* a = std::get_if<ArnoldParams>(&params)) {
                for (std::uint32_t it = 0; it < a->iterations; ++it)
                    p = arnold_point(p.x, p.y, *a, n);
            } else if (const auto* s = std::get_if<StandardMapParams>(&params)) {
                for (std::uint32_t it = 0; it < s->iterations; ++it)
                    p = standard_point(p.x, p.y, *s, n);
            }
            fwd[static_cast<std::size_t>(y) * n + x] =
                p.y * n + p.x;
        }
    }
    return GridPermutation(n, std::move(fwd));
}

GridPermutation GridPermutation::identity(std::uint32_t n) {
    std::vector<std::uint32_t> fwd(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < fwd.size(); ++i) fwd[i] = static_cast<std::uint32_t>(i);
    return GridPermutation(n, std::move(fwd));
}

ImageBuffer apply_permutation(const ImageBuffer& img, const GridPermutation& perm,
                              PermDirection direction) {
    if (img.width != perm.n() || img.height != perm.n())
        throw std::invalid_argument("image dimensions do not match the permutation grid");
    const auto& table =
        direction == PermDirection::forward ? perm.forward() : perm.inverse();
    ImageBuffer out = img;
    const std::size_t plane = img.plane_size();
    for (std::uint32_t c = 0; c < img.channels; ++c) {
        const std::uint8_t* src = img.data.data() + c * plane;
        std::uint8_t* dst = out.data.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) dst[table[i]] = src[i];
    }
    return out;
}

}  // namespace cbcsti
