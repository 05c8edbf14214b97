// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical experiments run with fixed seeds so the outcome is
// reproducible bit for bit.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <vector>

#include "cbcsti/analysis.hpp"
#include "cbcsti/chaos.hpp"
#include "cbcsti/cipher.hpp"
#include "cbcsti/grid_permutation.hpp"
#include "cbcsti/spnet.hpp"
#include "support/test_images.hpp"

using namespace cbcsti;
using cbcsti::testing::make_random_image;
using cbcsti::testing::make_textured_image;

namespace {

int g_failures = 0;

void report(int num, const char* what, bool ok, double seconds = -1.0) {
    if (seconds >= 0.0)
        std::printf("%s criterion %2d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", num, what,
                    seconds);
    else
        std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", num, what);
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const SecretKey kKey = SecretKey::from_hex("3a94d1c2e8f05b7690aabbccddeeff12");

ImageBuffer cipher_image(const CipherText& ct) {
    ImageBuffer img(ct.header.width, ct.header.height, ct.header.channels);
    img.data = ct.body;
    return img;
}

const std::vector<Variant> kVariants = {Variant::A, Variant::B, Variant::C, Variant::D,
                                        Variant::E};
const std::vector<BlockMode> kModes = {BlockMode::CBC, BlockMode::OFB, BlockMode::CFB,
                                       BlockMode::CTR};

// 1: byte-exact decrypt(encrypt) for every variant and mode, two image sizes.
void criterion_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    ImageBuffer small = make_random_image(64, 64, 3, 101);
    ImageBuffer large = make_textured_image(512, 3, 102);
    bool ok = true;
    for (const ImageBuffer* img : {&small, &large})
        for (Variant v : kVariants)
            for (BlockMode m : kModes) {
                CipherConfig cfg = CipherConfig::defaults(v, m);
                CipherText ct = encrypt_image(*img, kKey, cfg);
                ImageBuffer back = decrypt_image(ct, kKey, config_from_header(ct.header));
                ok = ok && back.data == img->data;
            }
    const double dt = seconds_since(t0);
    report(1, "round trip, 5 variants x 4 modes, 64x64 and 512x512", ok && dt < 60.0, dt);
}

// 2: erroneous decrypted block counts after a single ciphertext bit flip.
void criterion_single_flip_counts() {
    ImageBuffer img = make_random_image(128, 128, 3, 103);
    struct Pos { std::uint32_t x, y, c; };
    const Pos positions[3] = {{120, 17, 1}, {5, 99, 0}, {64, 64, 2}};
    bool ok = true;
    for (const Pos& p : positions) {
        for (BlockMode m : {BlockMode::OFB, BlockMode::CTR}) {
            CipherConfig cfg = CipherConfig::defaults(Variant::A, m);
            ok = ok && count_erroneous_blocks(kKey, cfg, img, p.x, p.y, p.c) == 1;
        }
        CipherConfig cbc = CipherConfig::defaults(Variant::A, BlockMode::CBC);
        ok = ok && count_erroneous_blocks(kKey, cbc, img, p.x, p.y, p.c) == 2;
        CipherConfig cfb = CipherConfig::defaults(Variant::A, BlockMode::CFB);
        ok = ok && count_erroneous_blocks(kKey, cfb, img, p.x, p.y, p.c) == 2;
    }
    report(2, "single bit flip: 1 block in ofb/ctr, 2 in cbc and cfb(s=8)", ok);
}

// 3: Monte-Carlo decrypted error rate vs the closed-form prediction, all modes.
void criterion_error_theory() {
    const auto t0 = std::chrono::steady_clock::now();
    // 512x512 single channel: 2097152 body bits per run; 32 rounds pushes the
    // per-block inversion probability of a corrupted block to ~1/2
    ImageBuffer img = make_random_image(512, 512, 1, 104);
    bool ok = true;
    const std::uint64_t seed = 2000;
    for (double pe : {1e-3, 1e-2})
        for (BlockMode m : kModes) {
            CipherConfig cfg = CipherConfig::defaults(Variant::E, m, 32);
            ErrorPropagationReport r = measure_error_propagation(kKey, cfg, img, {pe, seed});
            const double se =
                std::sqrt(r.predicted * (1.0 - r.predicted) /
                          static_cast<double>(r.sample_bits));
            ok = ok && r.sample_bits >= 1000000 &&
                 std::fabs(r.measured - r.predicted) <= 3.0 * se;
        }
    for (double pe : {1e-3, 1e-2}) {
        CipherConfig cfg = CipherConfig::defaults(Variant::E, BlockMode::OFB, 32);
        ErrorPropagationReport r = measure_error_propagation_ecb(kKey, cfg, img, {pe, seed});
        const double se = std::sqrt(r.predicted * (1.0 - r.predicted) /
                                    static_cast<double>(r.sample_bits));
        ok = ok && std::fabs(r.measured - r.predicted) <= 3.0 * se;
    }
    // the cbc and cfb closed forms are one and the same function
    for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        ok = ok && predict_output_error(ErrorMode::CBC, p, 8) ==
                       predict_output_error(ErrorMode::CFB, p, 8);
    }
    const double dt = seconds_since(t0);
    report(3, "monte-carlo error rate within 3 binomial se of prediction", ok && dt < 30.0,
           dt);
}

// 4, 5, 6, 12 share one variant-A OFB ciphertext of the 512x512x3 image.
void criteria_statistics() {
    ImageBuffer plain = make_textured_image(512, 3, 7);
    CipherConfig cfg = CipherConfig::defaults(Variant::A, BlockMode::OFB);
    ImageBuffer cipher = cipher_image(encrypt_image(plain, kKey, cfg));

    bool entropy_ok = true;
    for (double h : entropy(cipher)) entropy_ok = entropy_ok && h >= 7.999;
    ImageBuffer small = make_textured_image(128, 3, 8);
    ImageBuffer small_cipher = cipher_image(encrypt_image(small, kKey, cfg));
    for (double h : entropy(small_cipher)) entropy_ok = entropy_ok && h >= 7.98;
    report(4, "ciphertext entropy >= 7.999 (512^2) and >= 7.98 (128^2)", entropy_ok);

    bool corr_ok = true;
    for (Direction d : {Direction::horizontal, Direction::vertical, Direction::diagonal})
        for (const CorrelationResult& r : adjacent_correlation(cipher, d))
            corr_ok = corr_ok && std::fabs(r.r) <= 0.02;
    report(5, "ciphertext adjacent correlation |r| <= 0.02, all directions", corr_ok);

    const double n = npcr(plain, cipher);
    const double u = uaci(plain, cipher);
    report(6, "plain vs cipher npcr >= 99.5 and uaci in [28, 34]",
           n >= 99.5 && u >= 28.0 && u <= 34.0);

    bool chi_ok = true;
    for (double c : histogram(cipher).chi_square) chi_ok = chi_ok && c < kChiSquare255Critical01;
    report(12, "ciphertext histogram chi-square below 310.457", chi_ok);
}

// 7: one flipped key bit in ofb.
void criterion_key_sensitivity() {
    ImageBuffer img = make_textured_image(128, 3, 9);
    CipherConfig cfg = CipherConfig::defaults(Variant::A, BlockMode::OFB);
    KeySensitivityReport r = key_sensitivity(img, kKey, cfg, KeyDelta::key_bit(77));
    report(7, "key bit flip: npcr >= 80 and uaci within 30 +/- 6",
           r.npcr_overall >= 80.0 && std::fabs(r.mean_uaci - 30.0) <= 6.0);
}

// 8: one flipped plaintext bit.
void criterion_plaintext_sensitivity() {
    ImageBuffer img = make_textured_image(128, 3, 10);
    bool ok = true;
    for (BlockMode m : {BlockMode::OFB, BlockMode::CTR}) {
        CipherConfig cfg = CipherConfig::defaults(Variant::A, m);
        ok = ok && plaintext_sensitivity(img, kKey, cfg, 30, 40, 1).changed_blocks == 1;
    }
    // cbc: flip the pixel whose scrambled position sits nearest the middle of
    // the first channel plane, so the diffusing suffix covers 5/6 of the body
    CipherConfig cbc = CipherConfig::defaults(Variant::A, BlockMode::CBC);
    GridPermutation perm = GridPermutation::build(cbc.map_params, 128);
    const std::uint32_t target = 128 * 128 / 2;
    std::uint32_t best = 0, best_dist = 0xFFFFFFFFu;
    for (std::uint32_t i = 0; i < 128 * 128; ++i) {
        const std::uint32_t d = perm.forward()[i] > target ? perm.forward()[i] - target
                                                           : target - perm.forward()[i];
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    PlaintextSensitivityReport r =
        plaintext_sensitivity(img, kKey, cbc, best % 128, best / 128, 0);
    ok = ok && r.npcr_from_flip >= 99.0 && std::fabs(r.uaci_whole - 27.0) <= 5.0;
    report(8, "plaintext bit flip: 1 block ofb/ctr; cbc suffix npcr/uaci", ok);
}

// 9: exhaustive inverse sweeps over the byte-level primitives.
void criterion_exhaustive_inverses() {
    bool ok = true;
    for (unsigned r = 0; r < 2; ++r)
        for (int u = 0; u < 256; ++u)
            for (int v = 0; v < 256; ++v)
                ok = ok && substitute_inverse(substitute(static_cast<std::uint8_t>(u),
                                                         static_cast<std::uint8_t>(v), r),
                                              static_cast<std::uint8_t>(v), r) == u;
    const unsigned pairs[3][2] = {{1, 2}, {1, 4}, {2, 4}};
    for (const auto& mm : pairs)
        for (int cfg = 0; cfg < 256 && ok; ++cfg)
            for (int b = 0; b < 256; ++b)
                ok = ok && cross_inverse(cross_permute(static_cast<std::uint8_t>(b),
                                                       static_cast<std::uint8_t>(cfg),
                                                       mm[0], mm[1]),
                                         static_cast<std::uint8_t>(cfg), mm[0], mm[1]) == b;
    for (std::uint32_t ctrl = 0; ctrl < 65536 && ok; ctrl += 16) {
        BitPermutation p = socek_permutation_from_control(static_cast<std::uint16_t>(ctrl));
        ok = ok && p.is_valid();
        for (int b = 0; b < 256; ++b)
            ok = ok && socek_inverse(socek_permute(static_cast<std::uint8_t>(b), p), p) == b;
    }
    report(9, "exhaustive substitution / cross / socek inverse sweeps", ok);
}

// 10: pixel permutation bijectivity and image round trip.
void criterion_bijectivity() {
    bool ok = true;
    for (std::uint32_t n : {16u, 64u, 512u}) {
        try {
            GridPermutation::build(MapParams(ArnoldParams(1, 1, 3)), n);
            GridPermutation::build(MapParams(StandardMapParams()), n);
        } catch (const std::exception&) {
            ok = false;
        }
    }
    ImageBuffer img = make_random_image(64, 64, 3, 105);
    for (const MapParams& m :
         {MapParams(ArnoldParams(1, 1, 3)), MapParams(StandardMapParams())}) {
        GridPermutation perm = GridPermutation::build(m, 64);
        ImageBuffer back = apply_permutation(
            apply_permutation(img, perm, PermDirection::forward), perm,
            PermDirection::inverse);
        ok = ok && back.data == img.data;
    }
    report(10, "grid permutations bijective at n = 16, 64, 512; round trip", ok);
}

// 11: register periods and the perturbed-orbit cycle bound.
void criterion_lfsr() {
    bool ok = true;
    const std::uint64_t expected[3] = {15, 255, 65535};
    const unsigned degrees[3] = {4, 8, 16};
    for (int i = 0; i < 3; ++i) {
        const std::uint32_t taps = primitive_taps(degrees[i]);
        std::uint32_t reg = 1;
        std::uint64_t period = 0;
        do {
            reg = lfsr_next(reg, taps, degrees[i]).new_register;
            ++period;
        } while (reg != 1u);
        ok = ok && period == expected[i];
    }
    // 16-bit state words, degree-8 register, delta 1: the joint state must not
    // repeat before 255 steps
    PwlcmParams p(0.2);
    LfsrConfig lf(8, 0x5A, 1);
    PerturbedOrbit orbit(p, discretize(0.25), lf, true, 16);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 255; ++i) {
        const std::uint64_t pair =
            (static_cast<std::uint64_t>(orbit.state_raw()) << 32) | orbit.lfsr_register();
        ok = ok && seen.insert(pair).second;
        orbit.next();
    }
    report(11, "lfsr periods 15/255/65535; perturbed orbit pre-repeat >= 255", ok);
}

}  // namespace

int main() {
    criterion_round_trip();
    criterion_single_flip_counts();
    criterion_error_theory();
    criteria_statistics();
    criterion_key_sensitivity();
    criterion_plaintext_sensitivity();
    criterion_exhaustive_inverses();
    criterion_bijectivity();
    criterion_lfsr();
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
