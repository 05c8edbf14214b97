#ifndef CBCSTI_CIPHER_HPP
#define CBCSTI_CIPHER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbcsti/chaos.hpp"
#include "cbcsti/grid_permutation.hpp"
#include "cbcsti/image.hpp"
#include "cbcsti/spnet.hpp"

namespace cbcsti {

struct SecretKey {
    std::array<std::uint8_t, 16> bytes{};

    static SecretKey from_hex(const std::string& hex);
    std::string to_hex() const;
    std::uint32_t word(unsigned i) const;  // w1..w4 as big-endian 32-bit words, i in 0..3
};

enum class Variant : std::uint8_t { A = 0, B, C, D, E };
enum class BlockMode : std::uint8_t { CBC = 0, OFB, CFB, CTR };

const char* to_string(Variant v);
const char* to_string(BlockMode m);

struct CipherConfig {
    Variant variant = Variant::A;
    BlockMode mode = BlockMode::OFB;
    unsigned rounds = 4;            // positive multiple of 4
    unsigned cfb_segment_bits = 8;  // 1..8, CFB only
    MapParams map_params;           // consistent with variant
    unsigned lfsr_degree = 32;
    std::uint32_t lfsr_delta = 1;
    unsigned cross_m1 = 1;          // butterfly stages for Cross variants
    unsigned cross_m2 = 4;
    std::optional<std::uint8_t> iv;  // nullopt: derived from a key-seeded warm-up orbit

    // Fills map_params with the per-variant default map.
    static CipherConfig defaults(Variant v, BlockMode m = BlockMode::OFB,
                                 unsigned rounds = 4);

    PermKind perm_kind() const {
        return (variant == Variant::B || variant == Variant::D) ? PermKind::cross
                                                                : PermKind::socek;
    }
    bool uses_pixel_permutation() const { return variant != Variant::E; }
    void validate() const;
};

struct ChaoticParameters {
    PwlcmParams alpha;
    PwlcmParams beta;
    FixedPointValue x0;
    FixedPointValue y0;
    std::uint32_t lfsr_seed;
};

// Bit-exact key expansion: the four big-endian key words scale to the two
// control parameters and two seeds, clamped away from the degenerate
// boundaries by eps = 2^-20. The LFSR seed is w3 ^ w4, forced nonzero.
ChaoticParameters derive_parameters(const SecretKey& key);

struct CipherTextHeader {
    std::uint8_t version = 1;
    Variant variant = Variant::A;
    BlockMode mode = BlockMode::OFB;
    std::uint8_t rounds = 4;
    std::uint8_t segment_bits = 8;
    std::uint8_t iv = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint8_t channels = 1;
    std::uint32_t original_width = 0;
    std::uint32_t original_height = 0;
    MapParams map_params;
};

struct CipherText {
    CipherTextHeader header;
    std::vector<std::uint8_t> body;

    std::vector<std::uint8_t> serialize() const;
    static CipherText parse(const std::vector<std::uint8_t>& bytes);
};

// Per-run round material drawn from the two perturbed orbits: every r blocks
// the schedule refreshes with r/4 words per orbit, and the (i+j) mod r index
// rotates the material across the blocks of a run.
class SpnSchedule {
public:
    SpnSchedule(const ChaoticParameters& params, const CipherConfig& cfg);

    std::uint8_t encrypt_byte(std::uint8_t b);
    std::uint8_t decrypt_byte(std::uint8_t b);

private:
    void refresh_if_needed();

    PerturbedOrbit orbit1_;
    PerturbedOrbit orbit2_;
    unsigned rounds_;
    PermKind kind_;
    unsigned m1_, m2_;
    std::uint64_t block_index_ = 0;
    std::vector<std::uint8_t> subs_;
    std::vector<BitPermutation> socek_perms_;
    std::vector<std::uint8_t> cross_cfgs_;
};

// Derived default IV: one warm-up orbit on the first key word, 16 discarded
// iterations, most significant byte of the next value.
std::uint8_t derive_iv(const ChaoticParameters& params, const CipherConfig& cfg);

// Mode-level byte-stream transforms (block size is one byte).
std::vector<std::uint8_t> encrypt_body(const std::vector<std::uint8_t>& plain,
                                       const SecretKey& key, const CipherConfig& cfg,
                                       std::uint8_t iv);
std::vector<std::uint8_t> encrypt_body_with_params(const std::vector<std::uint8_t>& plain,
                                                   const ChaoticParameters& params,
                                                   const CipherConfig& cfg,
                                                   std::uint8_t iv);
std::vector<std::uint8_t> decrypt_body(const std::vector<std::uint8_t>& cipher,
                                       const SecretKey& key, const CipherConfig& cfg,
                                       std::uint8_t iv);

// Mode-free SPN primitive, used by the error-propagation analysis only.
std::vector<std::uint8_t> ecb_encrypt_body(const std::vector<std::uint8_t>& plain,
                                           const SecretKey& key, const CipherConfig& cfg);
std::vector<std::uint8_t> ecb_decrypt_body(const std::vector<std::uint8_t>& cipher,
                                           const SecretKey& key, const CipherConfig& cfg);

CipherText encrypt_image(const ImageBuffer& img, const SecretKey& key,
                         const CipherConfig& cfg);
ImageBuffer decrypt_image(const CipherText& ct, const SecretKey& key,
                          const CipherConfig& cfg);

// Reconstructs a decryption config from a parsed header; LFSR settings are not
// part of the container and fall back to the given defaults.
CipherConfig config_from_header(const CipherTextHeader& header,
                                unsigned lfsr_degree = 32, std::uint32_t lfsr_delta = 1);

}  // namespace cbcsti

#endif
