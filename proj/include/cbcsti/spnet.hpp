#ifndef CBCSTI_SPNET_HPP
#define CBCSTI_SPNET_HPP

#include <array>
#include <cstdint>
#include <stdexcept>

namespace cbcsti {

// Round-alternating byte substitution: XOR on even rounds, add mod 256 on odd.
inline std::uint8_t substitute(std::uint8_t u, std::uint8_t v, unsigned r) {
    return r % 2 == 0 ? static_cast<std::uint8_t>(u ^ v)
                      : static_cast<std::uint8_t>(u + v);
}

inline std::uint8_t substitute_inverse(std::uint8_t u, std::uint8_t v, unsigned r) {
    return r % 2 == 0 ? static_cast<std::uint8_t>(u ^ v)
                      : static_cast<std::uint8_t>(u - v);
}

// perm[i] is the destination position of source bit i.
struct BitPermutation {
    std::array<std::uint8_t, 8> perm;

    bool is_valid() const {
        std::uint8_t seen = 0;
        for (auto p : perm) {
            if (p > 7 || (seen & (1u << p))) return false;
            seen |= static_cast<std::uint8_t>(1u << p);
        }
        return true;
    }
};

// Derives a degree-8 permutation from a 16-bit control word via a forward
// Fisher-Yates shuffle. The word is consumed MSB-first in slices of
// 3,3,3,2,2,2,1 bits; slice i, reduced mod the remaining count, picks the swap
// offset for position i. ctrl = 0 performs no swaps.
BitPermutation socek_permutation_from_control(std::uint16_t ctrl);

std::uint8_t socek_permute(std::uint8_t b, const BitPermutation& perm);
std::uint8_t socek_inverse(std::uint8_t b, const BitPermutation& perm);

// Two butterfly stages over the byte. Stage distance m in {1,2,4} pairs bit i
// with bit i+m; cfg bits 0-3 drive the m1-stage pairs in ascending low-index
// order, bits 4-7 drive the m2 stage.
std::uint8_t cross_permute(std::uint8_t b, std::uint8_t cfg, unsigned m1, unsigned m2);
std::uint8_t cross_inverse(std::uint8_t b, std::uint8_t cfg, unsigned m1, unsigned m2);

enum class PermKind { socek, cross };

struct RoundSubKeys {
    std::array<std::uint8_t, 4> c;  // MSB-first bytes of one chaotic word
};

struct RoundMaterial {
    RoundSubKeys subkeys;
    std::array<std::uint16_t, 2> socek_controls;  // valid when kind == socek
    std::array<std::uint8_t, 4> cross_configs;    // valid when kind == cross
    PermKind kind;
};

// Splits one 32-bit chaotic word into substitution bytes and permutation
// control material.
RoundMaterial derive_round_material(std::uint32_t raw, PermKind kind);

}  // namespace cbcsti

#endif
