#include <bit>
#include <cstdint>

#include "cbcsti/spnet.hpp"
#include "doctest.h"

using namespace cbcsti;

TEST_CASE("substitution is exactly invertible") {
    for (unsigned r = 0; r < 2; ++r)
        for (int u = 0; u < 256; ++u)
            for (int v = 0; v < 256; ++v) {
                auto s = substitute(static_cast<std::uint8_t>(u),
                                    static_cast<std::uint8_t>(v), r);
                CHECK(substitute_inverse(s, static_cast<std::uint8_t>(v), r) == u);
            }
}

TEST_CASE("control word zero leaves the bit order unchanged") {
    BitPermutation p = socek_permutation_from_control(0);
    for (int i = 0; i < 8; ++i) CHECK(p.perm[i] == i);
    for (int b = 0; b < 256; ++b)
        CHECK(socek_permute(static_cast<std::uint8_t>(b), p) == b);
}

TEST_CASE("known control word fixture") {
    // 0x7215 sends source bits 0..7 to positions 3,5,6,0,2,7,1,4
    BitPermutation p = socek_permutation_from_control(0x7215);
    const std::uint8_t expect[8] = {3, 5, 6, 0, 2, 7, 1, 4};
    for (int i = 0; i < 8; ++i) CHECK(p.perm[i] == expect[i]);
}

TEST_CASE("every control word yields a valid permutation") {
    for (std::uint32_t ctrl = 0; ctrl < 65536; ctrl += 16) {
        BitPermutation p = socek_permutation_from_control(static_cast<std::uint16_t>(ctrl));
        CHECK(p.is_valid());
    }
    // and a dense sweep over the low words
    for (std::uint32_t ctrl = 0; ctrl < 4096; ++ctrl)
        CHECK(socek_permutation_from_control(static_cast<std::uint16_t>(ctrl)).is_valid());
}

TEST_CASE("socek permutation round trip and popcount") {
    BitPermutation p = socek_permutation_from_control(0xBEEF);
    for (int b = 0; b < 256; ++b) {
        std::uint8_t s = socek_permute(static_cast<std::uint8_t>(b), p);
        CHECK(socek_inverse(s, p) == b);
        CHECK(std::popcount(static_cast<unsigned>(s)) ==
              std::popcount(static_cast<unsigned>(b)));
    }
}

TEST_CASE("cross permutation round trip for all stage pairs") {
    const unsigned dists[3] = {1, 2, 4};
    for (unsigned m1 : dists)
        for (unsigned m2 : dists) {
            for (int cfg = 0; cfg < 256; ++cfg)
                for (int b = 0; b < 256; ++b) {
                    std::uint8_t s = cross_permute(static_cast<std::uint8_t>(b),
                                                   static_cast<std::uint8_t>(cfg), m1, m2);
                    CHECK(cross_inverse(s, static_cast<std::uint8_t>(cfg), m1, m2) == b);
                    CHECK(std::popcount(static_cast<unsigned>(s)) ==
                          std::popcount(static_cast<unsigned>(b)));
                }
        }
}

TEST_CASE("equal butterfly stages cancel") {
    // each stage is a set of disjoint bit swaps, so running the same stage
    // twice (equal distances, equal nibbles) restores the byte
    for (int cfg4 = 0; cfg4 < 16; ++cfg4) {
        std::uint8_t cfg = static_cast<std::uint8_t>(cfg4 | (cfg4 << 4));
        for (int b = 0; b < 256; ++b)
            CHECK(cross_permute(static_cast<std::uint8_t>(b), cfg, 4, 4) == b);
    }
}

TEST_CASE("cross config zero is the identity") {
    for (int b = 0; b < 256; ++b)
        CHECK(cross_permute(static_cast<std::uint8_t>(b), 0, 1, 4) == b);
}

TEST_CASE("round material split") {
    RoundMaterial m = derive_round_material(0x0123456789ABCDEFull >> 32, PermKind::socek);
    CHECK(m.subkeys.c[0] == 0x01);
    CHECK(m.subkeys.c[1] == 0x23);
    CHECK(m.subkeys.c[2] == 0x45);
    CHECK(m.subkeys.c[3] == 0x67);
    CHECK(m.socek_controls[0] == 0x0123);
    CHECK(m.socek_controls[1] == 0x4567);
    RoundMaterial c = derive_round_material(0xA1B2C3D4u, PermKind::cross);
    CHECK(c.cross_configs[0] == 0xA1);
    CHECK(c.cross_configs[3] == 0xD4);
}
