#include "cbcsti/spnet.hpp"

#include <utility>

namespace cbcsti {

BitPermutation socek_permutation_from_control(std::uint16_t ctrl) {
    static constexpr unsigned slice_bits[7] = {3, 3, 3, 2, 2, 2, 1};
    std::array<std::uint8_t, 8> a{0, 1, 2, 3, 4, 5, 6, 7};
    unsigned pos = 16;
    for (unsigned i = 0; i < 7; ++i) {
        pos -= slice_bits[i];
        const unsigned slice = (ctrl >> pos) & ((1u << slice_bits[i]) - 1u);
        const unsigned j = i + slice % (8 - i);
        std::swap(a[i], a[j]);
    }
    return BitPermutation{a};
}

std::uint8_t socek_permute(std::uint8_t b, const BitPermutation& perm) {
    std::uint8_t out = 0;
    for (unsigned i = 0; i < 8; ++i)
        if (b & (1u << i)) out |= static_cast<std::uint8_t>(1u << perm.perm[i]);
    return out;
}

std::uint8_t socek_inverse(std::uint8_t b, const BitPermutation& perm) {
    std::uint8_t out = 0;
    for (unsigned i = 0; i < 8; ++i)
        if (b & (1u << perm.perm[i])) out |= static_cast<std::uint8_t>(1u << i);
    return out;
}

namespace {

std::uint8_t butterfly_stage(std::uint8_t b, unsigned m, unsigned cfg_nibble) {
    // Pairs (i, i+m) for the four lowest-index positions not yet paired,
    // ascending; pair index selects the governing config bit.
    unsigned pair = 0;
    std::uint8_t paired = 0;
    for (unsigned i = 0; i < 8 && pair < 4; ++i) {
        if (paired & (1u << i)) continue;
        const unsigned j = i + m;
        paired |= static_cast<std::uint8_t>((1u << i) | (1u << j));
        if (cfg_nibble & (1u << pair)) {
            const std::uint8_t bi = (b >> i) & 1u;
            const std::uint8_t bj = (b >> j) & 1u;
            if (bi != bj) b ^= static_cast<std::uint8_t>((1u << i) | (1u << j));
        }
        ++pair;
    }
    return b;
}

void check_stage(unsigned m) {
    if (m != 1 && m != 2 && m != 4)
        throw std::invalid_argument("butterfly stage distance must be 1, 2 or 4");
}

}  // namespace

std::uint8_t cross_permute(std::uint8_t b, std::uint8_t cfg, unsigned m1, unsigned m2) {
    check_stage(m1);
    check_stage(m2);
    b = butterfly_stage(b, m1, cfg & 0x0Fu);
    b = butterfly_stage(b, m2, (cfg >> 4) & 0x0Fu);
    return b;
}

std::uint8_t cross_inverse(std::uint8_t b, std::uint8_t cfg, unsigned m1, unsigned m2) {
    check_stage(m1);
    check_stage(m2);
    b = butterfly_stage(b, m2, (cfg >> 4) & 0x0Fu);
    b = butterfly_stage(b, m1, cfg & 0x0Fu);
    return b;
}

RoundMaterial derive_round_material(std::uint32_t raw, PermKind kind) {
    RoundMaterial m;
    m.kind = kind;
    m.subkeys.c = {static_cast<std::uint8_t>(raw >> 24), static_cast<std::uint8_t>(raw >> 16),
                   static_cast<std::uint8_t>(raw >> 8), static_cast<std::uint8_t>(raw)};
    m.socek_controls = {static_cast<std::uint16_t>(raw >> 16),
                        static_cast<std::uint16_t>(raw & 0xFFFFu)};
    m.cross_configs = m.subkeys.c;
    return m;
}

}  // namespace cbcsti
