#ifndef CBCSTI_GRID_PERMUTATION_HPP
#define CBCSTI_GRID_PERMUTATION_HPP

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cbcsti/image.hpp"

namespace cbcsti {

struct ArnoldParams {
    std::uint32_t t = 1;
    std::uint32_t q = 1;
    std::uint32_t iterations = 1;

    ArnoldParams() = default;
    ArnoldParams(std::uint32_t t_, std::uint32_t q_, std::uint32_t iterations_)
        : t(t_), q(q_), iterations(iterations_) {
        if (t < 1 || q < 1 || iterations < 1)
            throw std::invalid_argument("Arnold parameters must be >= 1");
    }
};

enum class SineConvention { conventional, paper_literal };

struct StandardMapParams {
    double k = 2048.0;
    std::uint32_t iterations = 3;
    SineConvention sine_convention = SineConvention::conventional;

    StandardMapParams() = default;
    StandardMapParams(double k_, std::uint32_t iterations_,
                      SineConvention conv = SineConvention::conventional)
        : k(k_), iterations(iterations_), sine_convention(conv) {
        if (!(k > 0.0) || iterations < 1)
            throw std::invalid_argument("Standard map needs k > 0 and iterations >= 1");
    }
};

using MapParams = std::variant<std::monostate, ArnoldParams, StandardMapParams>;

struct GridPoint {
    std::uint32_t x;
    std::uint32_t y;
};

// One application of the cat-map matrix [[1,t],[q,tq+1]] mod n.
GridPoint arnold_point(std::uint32_t x, std::uint32_t y, const ArnoldParams& params,
                       std::uint32_t n);

// Discretized Standard map: x' = (x+y) mod n, y' = (y + round(k sin(arg(x')))) mod n.
GridPoint standard_point(std::uint32_t x, std::uint32_t y, const StandardMapParams& params,
                         std::uint32_t n);

class NonBijectiveError : public std::runtime_error {
public:
    NonBijectiveError(std::size_t source_a, std::size_t source_b, std::size_t target);
    std::size_t source_a, source_b, target;
};

// Validated bijection on the n*n pixel grid with its inverse.
class GridPermutation {
public:
    static GridPermutation build(const MapParams& params, std::uint32_t n);
    static GridPermutation identity(std::uint32_t n);

    std::uint32_t n() const { return n_; }
    const std::vector<std::uint32_t>& forward() const { return forward_; }
    const std::vector<std::uint32_t>& inverse() const { return inverse_; }

private:
    GridPermutation(std::uint32_t n, std::vector<std::uint32_t> fwd);
    std::uint32_t n_;
    std::vector<std::uint32_t> forward_;
    std::vector<std::uint32_t> inverse_;
};

enum class PermDirection { forward, inverse };

// Moves pixels so that output[forward[i]] = input[i]; every channel shares the table.
ImageBuffer apply_permutation(const ImageBuffer& img, const GridPermutation& perm,
                              PermDirection direction);

}  // namespace cbcsti

#endif
