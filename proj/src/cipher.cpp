#include "cbcsti/cipher.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace cbcsti {

namespace {

constexpr double kEps = 9.5367431640625e-07;  // 2^-20

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

SecretKey SecretKey::from_hex(const std::string& hex) {
    if (hex.size() != 32)
        throw std::invalid_argument("key must be exactly 32 hex characters (128 bits)");
    SecretKey key;
    for (std::size_t i = 0; i < 16; ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("key contains a non-hex character");
        key.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return key;
}

std::string SecretKey::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::uint32_t SecretKey::word(unsigned i) const {
    const std::size_t off = static_cast<std::size_t>(i) * 4;
    return static_cast<std::uint32_t>(bytes[off]) << 24 |
           static_cast<std::uint32_t>(bytes[off + 1]) << 16 |
           static_cast<std::uint32_t>(bytes[off + 2]) << 8 |
           static_cast<std::uint32_t>(bytes[off + 3]);
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::A: return "A";
        case Variant::B: return "B";
        case Variant::C: return "C";
        case Variant::D: return "D";
        case Variant::E: return "E";
    }
    return "?";
}

const char* to_string(BlockMode m) {
    switch (m) {
        case BlockMode::CBC: return "cbc";
        case BlockMode::OFB: return "ofb";
        case BlockMode::CFB: return "cfb";
        case BlockMode::CTR: return "ctr";
    }
    return "?";
}

CipherConfig CipherConfig::defaults(Variant v, BlockMode m, unsigned rounds) {
    CipherConfig cfg;
    cfg.variant = v;
    cfg.mode = m;
    cfg.rounds = rounds;
    switch (v) {
        case Variant::A:
        case Variant::B:
            cfg.map_params = StandardMapParams{};
            break;
        case Variant::C:
        case Variant::D:
            cfg.map_params = ArnoldParams{1, 1, 3};
            break;
        case Variant::E:
            cfg.map_params = std::monostate{};
            break;
    }
    return cfg;
}

void CipherConfig::validate() const {
    if (rounds < 4 || rounds % 4 != 0)
        throw std::invalid_argument("round count must be a positive multiple of 4");
    if (cfb_segment_bits < 1 || cfb_segment_bits > 8)
        throw std::invalid_argument("CFB segment size must be in [1, 8] bits");
    const bool wants_standard = variant == Variant::A || variant == Variant::B;
    const bool wants_arnold = variant == Variant::C || variant == Variant::D;
    if (wants_standard && !std::holds_alternative<StandardMapParams>(map_params))
        throw std::invalid_argument("variants A and B require Standard map parameters");
    if (wants_arnold && !std::holds_alternative<ArnoldParams>(map_params))
        throw std::invalid_argument("variants C and D require Arnold map parameters");
    if (variant == Variant::E && !std::holds_alternative<std::monostate>(map_params))
        throw std::invalid_argument("variant E takes no pixel-permutation map");
    if (cross_m1 != 1 && cross_m1 != 2 && cross_m1 != 4)
        throw std::invalid_argument("cross stage m1 must be 1, 2 or 4");
    if (cross_m2 != 1 && cross_m2 != 2 && cross_m2 != 4)
        throw std::invalid_argument("cross stage m2 must be 1, 2 or 4");
    primitive_taps(lfsr_degree);
    if (lfsr_delta < 1) throw std::invalid_argument("LFSR delta must be >= 1");
}

ChaoticParameters derive_parameters(const SecretKey& key) {
    const double scale = 4294967296.0;
    const auto unit = [&](std::uint32_t w) { return static_cast<double>(w) / scale; };
    const double alpha = std::clamp(unit(key.word(0)) * 0.5, kEps, 0.5 - kEps);
    const double beta = std::clamp(unit(key.word(1)) * 0.5, kEps, 0.5 - kEps);
    const double x0 = std::clamp(unit(key.word(2)), kEps, 1.0 - kEps);
    const double y0 = std::clamp(unit(key.word(3)), kEps, 1.0 - kEps);
    std::uint32_t seed = key.word(2) ^ key.word(3);
    if (seed == 0) seed = 1;
    return ChaoticParameters{PwlcmParams(alpha), PwlcmParams(beta), discretize(x0),
                             discretize(y0), seed};
}

SpnSchedule::SpnSchedule(const ChaoticParameters& params, const CipherConfig& cfg)
    : orbit1_(params.alpha, params.x0,
              LfsrConfig(cfg.lfsr_degree, params.lfsr_seed, cfg.lfsr_delta)),
      orbit2_(params.beta, params.y0,
              LfsrConfig(cfg.lfsr_degree, params.lfsr_seed, cfg.lfsr_delta)),
      rounds_(cfg.rounds), kind_(cfg.perm_kind()), m1_(cfg.cross_m1), m2_(cfg.cross_m2) {
    subs_.resize(rounds_);
    if (kind_ == PermKind::socek)
        socek_perms_.resize(rounds_);
    else
        cross_cfgs_.resize(rounds_);
}

void SpnSchedule::refresh_if_needed() {
    if (block_index_ % rounds_ != 0) return;
    const unsigned draws = rounds_ / 4;
    for (unsigned d = 0; d < draws; ++d) {
        const RoundMaterial m = derive_round_material(orbit1_.next().raw, kind_);
        for (unsigned k = 0; k < 4; ++k) subs_[d * 4 + k] = m.subkeys.c[k];
    }
    if (kind_ == PermKind::socek) {
        // r/4 words give r/2 controls; the schedule repeats them to cover r rounds.
        std::vector<BitPermutation> half(rounds_ / 2);
        for (unsigned d = 0; d < draws; ++d) {
            const RoundMaterial m = derive_round_material(orbit2_.next().raw, kind_);
            half[d * 2] = socek_permutation_from_control(m.socek_controls[0]);
            half[d * 2 + 1] = socek_permutation_from_control(m.socek_controls[1]);
        }
        for (unsigned j = 0; j < rounds_; ++j) socek_perms_[j] = half[j % (rounds_ / 2)];
    } else {
        for (unsigned d = 0; d < draws; ++d) {
            const RoundMaterial m = derive_round_material(orbit2_.next().raw, kind_);
            for (unsigned k = 0; k < 4; ++k) cross_cfgs_[d * 4 + k] = m.cross_configs[k];
        }
    }
}

std::uint8_t SpnSchedule::encrypt_byte(std::uint8_t b) {
    refresh_if_needed();
    const unsigned i = static_cast<unsigned>(block_index_ % rounds_);
    for (unsigned j = 0; j < rounds_; ++j) {
        const unsigned m = (i + j) % rounds_;
        b = substitute(b, subs_[m], j);
        b = kind_ == PermKind::socek ? socek_permute(b, socek_perms_[m])
                                     : cross_permute(b, cross_cfgs_[m], m1_, m2_);
    }
    ++block_index_;
    return b;
}

std::uint8_t SpnSchedule::decrypt_byte(std::uint8_t b) {
    refresh_if_needed();
    const unsigned i = static_cast<unsigned>(block_index_ % rounds_);
    for (unsigned j = rounds_; j-- > 0;) {
        const unsigned m = (i + j) % rounds_;
        b = kind_ == PermKind::socek ? socek_inverse(b, socek_perms_[m])
                                     : cross_inverse(b, cross_cfgs_[m], m1_, m2_);
        b = substitute_inverse(b, subs_[m], j);
    }
    ++block_index_;
    return b;
}

std::uint8_t derive_iv(const ChaoticParameters& params, const CipherConfig& cfg) {
    PerturbedOrbit warmup(params.alpha, params.x0,
                          LfsrConfig(cfg.lfsr_degree, params.lfsr_seed, cfg.lfsr_delta));
    for (int i = 0; i < 16; ++i) warmup.next();
    return static_cast<std::uint8_t>(warmup.next().raw >> 24);
}

namespace {

// CFB segments walk the body as a bit stream, most significant bit first.
struct BitCursor {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos = 0;  // bit position

    std::size_t remaining() const { return bytes->size() * 8 - pos; }
    std::uint8_t read(unsigned nbits) {
        std::uint8_t v = 0;
        for (unsigned i = 0; i < nbits; ++i, ++pos) {
            const std::uint8_t bit = ((*bytes)[pos / 8] >> (7 - pos % 8)) & 1u;
            v = static_cast<std::uint8_t>(v << 1 | bit);
        }
        return v;
    }
};

void write_bits(std::vector<std::uint8_t>& out, std::size_t& pos, std::uint8_t v,
                unsigned nbits) {
    for (unsigned i = 0; i < nbits; ++i, ++pos) {
        const std::uint8_t bit = (v >> (nbits - 1 - i)) & 1u;
        if (bit) out[pos / 8] |= static_cast<std::uint8_t>(1u << (7 - pos % 8));
    }
}

std::vector<std::uint8_t> cfb_transform(const std::vector<std::uint8_t>& input,
                                        SpnSchedule& sched, std::uint8_t iv, unsigned s,
                                        bool encrypting) {
    std::vector<std::uint8_t> out(input.size(), 0);
    BitCursor in{&input};
    std::size_t out_pos = 0;
    std::uint8_t reg = iv;
    while (in.remaining() > 0) {
        const unsigned nbits = static_cast<unsigned>(std::min<std::size_t>(s, in.remaining()));
        const std::uint8_t ks = static_cast<std::uint8_t>(sched.encrypt_byte(reg) >> (8 - nbits));
        const std::uint8_t seg_in = in.read(nbits);
        const std::uint8_t seg_out = static_cast<std::uint8_t>((seg_in ^ ks) & ((1u << nbits) - 1u));
        write_bits(out, out_pos, seg_out, nbits);
        const std::uint8_t cipher_seg = encrypting ? seg_out : seg_in;
        reg = static_cast<std::uint8_t>((reg << nbits) | cipher_seg);
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> encrypt_body(const std::vector<std::uint8_t>& plain,
                                       const SecretKey& key, const CipherConfig& cfg,
                                       std::uint8_t iv) {
    return encrypt_body_with_params(plain, derive_parameters(key), cfg, iv);
}

std::vector<std::uint8_t> encrypt_body_with_params(const std::vector<std::uint8_t>& plain,
                                                   const ChaoticParameters& params,
                                                   const CipherConfig& cfg,
                                                   std::uint8_t iv) {
    cfg.validate();
    SpnSchedule sched(params, cfg);
    std::vector<std::uint8_t> out(plain.size());
    switch (cfg.mode) {
        case BlockMode::CBC: {
            std::uint8_t prev = iv;
            for (std::size_t i = 0; i < plain.size(); ++i) {
                prev = sched.encrypt_byte(static_cast<std::uint8_t>(plain[i] ^ prev));
                out[i] = prev;
            }
            break;
        }
        case BlockMode::OFB: {
            std::uint8_t o = iv;
            for (std::size_t i = 0; i < plain.size(); ++i) {
                o = sched.encrypt_byte(o);
                out[i] = static_cast<std::uint8_t>(plain[i] ^ o);
            }
            break;
        }
        case BlockMode::CTR: {
            for (std::size_t i = 0; i < plain.size(); ++i) {
                const std::uint8_t ctr = static_cast<std::uint8_t>(iv + i);
                out[i] = static_cast<std::uint8_t>(plain[i] ^ sched.encrypt_byte(ctr));
            }
            break;
        }
        case BlockMode::CFB: {
            if (cfg.cfb_segment_bits == 8) {
                std::uint8_t reg = iv;
                for (std::size_t i = 0; i < plain.size(); ++i) {
                    reg = static_cast<std::uint8_t>(plain[i] ^ sched.encrypt_byte(reg));
                    out[i] = reg;
                }
            } else {
                out = cfb_transform(plain, sched, iv, cfg.cfb_segment_bits, true);
            }
            break;
        }
    }
    return out;
}

std::vector<std::uint8_t> decrypt_body(const std::vector<std::uint8_t>& cipher,
                                       const SecretKey& key, const CipherConfig& cfg,
                                       std::uint8_t iv) {
    cfg.validate();
    SpnSchedule sched(derive_parameters(key), cfg);
    std::vector<std::uint8_t> out(cipher.size());
    switch (cfg.mode) {
        case BlockMode::CBC: {
            std::uint8_t prev = iv;
            for (std::size_t i = 0; i < cipher.size(); ++i) {
                out[i] = static_cast<std::uint8_t>(sched.decrypt_byte(cipher[i]) ^ prev);
                prev = cipher[i];
            }
            break;
        }
        case BlockMode::OFB:
        case BlockMode::CTR:
            return encrypt_body(cipher, key, cfg, iv);
        case BlockMode::CFB: {
            if (cfg.cfb_segment_bits == 8) {
                std::uint8_t reg = iv;
                for (std::size_t i = 0; i < cipher.size(); ++i) {
                    out[i] = static_cast<std::uint8_t>(cipher[i] ^ sched.encrypt_byte(reg));
                    reg = cipher[i];
                }
            } else {
                out = cfb_transform(cipher, sched, iv, cfg.cfb_segment_bits, false);
            }
            break;
        }
    }
    return out;
}

std::vector<std::uint8_t> ecb_encrypt_body(const std::vector<std::uint8_t>& plain,
                                           const SecretKey& key, const CipherConfig& cfg) {
    SpnSchedule sched(derive_parameters(key), cfg);
    std::vector<std::uint8_t> out(plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) out[i] = sched.encrypt_byte(plain[i]);
    return out;
}

std::vector<std::uint8_t> ecb_decrypt_body(const std::vector<std::uint8_t>& cipher,
                                           const SecretKey& key, const CipherConfig& cfg) {
    SpnSchedule sched(derive_parameters(key), cfg);
    std::vector<std::uint8_t> out(cipher.size());
    for (std::size_t i = 0; i < cipher.size(); ++i) out[i] = sched.decrypt_byte(cipher[i]);
    return out;
}

CipherText encrypt_image(const ImageBuffer& img, const SecretKey& key,
                         const CipherConfig& cfg) {
    cfg.validate();
    if (img.data.empty()) throw std::invalid_argument("cannot encrypt an empty image");
    ImageBuffer padded = pad_to_square(img);
    if (cfg.uses_pixel_permutation()) {
        const GridPermutation perm = GridPermutation::build(cfg.map_params, padded.width);
        padded = apply_permutation(padded, perm, PermDirection::forward);
    }
    const ChaoticParameters params = derive_parameters(key);
    const std::uint8_t iv = cfg.iv ? *cfg.iv : derive_iv(params, cfg);

    CipherText ct;
    ct.header.variant = cfg.variant;
    ct.header.mode = cfg.mode;
    ct.header.rounds = static_cast<std::uint8_t>(cfg.rounds);
    ct.header.segment_bits = static_cast<std::uint8_t>(cfg.cfb_segment_bits);
    ct.header.iv = iv;
    ct.header.width = padded.width;
    ct.header.height = padded.height;
    ct.header.channels = static_cast<std::uint8_t>(padded.channels);
    ct.header.original_width = padded.original_width;
    ct.header.original_height = padded.original_height;
    ct.header.map_params = cfg.map_params;
    ct.body = encrypt_body(padded.data, key, cfg, iv);
    return ct;
}

namespace {

void check_header_consistency(const CipherTextHeader& h, const CipherConfig& cfg) {
    if (h.variant != cfg.variant || h.mode != cfg.mode || h.rounds != cfg.rounds ||
        (cfg.mode == BlockMode::CFB && h.segment_bits != cfg.cfb_segment_bits))
        throw std::runtime_error("ciphertext header does not match the supplied configuration");
}

}  // namespace

ImageBuffer decrypt_image(const CipherText& ct, const SecretKey& key,
                          const CipherConfig& cfg) {
    cfg.validate();
    check_header_consistency(ct.header, cfg);
    const std::size_t expected =
        static_cast<std::size_t>(ct.header.width) * ct.header.height * ct.header.channels;
    if (ct.body.size() != expected)
        throw std::runtime_error("ciphertext body is truncated or oversized");

    ImageBuffer padded(ct.header.width, ct.header.height, ct.header.channels);
    padded.original_width = ct.header.original_width;
    padded.original_height = ct.header.original_height;
    padded.data = decrypt_body(ct.body, key, cfg, ct.header.iv);
    if (cfg.uses_pixel_permutation()) {
        const GridPermutation perm = GridPermutation::build(cfg.map_params, padded.width);
        padded = apply_permutation(padded, perm, PermDirection::inverse);
    }
    return unpad(padded);
}

CipherConfig config_from_header(const CipherTextHeader& header, unsigned lfsr_degree,
                                std::uint32_t lfsr_delta) {
    CipherConfig cfg;
    cfg.variant = header.variant;
    cfg.mode = header.mode;
    cfg.rounds = header.rounds;
    cfg.cfb_segment_bits = header.segment_bits;
    cfg.map_params = header.map_params;
    cfg.lfsr_degree = lfsr_degree;
    cfg.lfsr_delta = lfsr_delta;
    cfg.iv = header.iv;
    return cfg;
}

// ---- container serialization -------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'B', 'S', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= bytes.size()) throw std::runtime_error("ciphertext container truncated");
        return bytes[pos++];
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> CipherText::serialize() const {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(header.version);
    out.push_back(static_cast<std::uint8_t>(header.variant));
    out.push_back(static_cast<std::uint8_t>(header.mode));
    out.push_back(header.rounds);
    out.push_back(header.segment_bits);
    out.push_back(header.iv);
    put_u32(out, header.width);
    put_u32(out, header.height);
    out.push_back(header.channels);
    put_u32(out, header.original_width);
    put_u32(out, header.original_height);
    if (const auto* a = std::get_if<ArnoldParams>(&header.map_params)) {
        out.push_back(1);
        put_u32(out, a->t);
        put_u32(out, a->q);
        put_u32(out, a->iterations);
    } else if (const auto* s = std::get_if<StandardMapParams>(&header.map_params)) {
        out.push_back(2);
        std::uint64_t kbits;
        std::memcpy(&kbits, &s->k, 8);
        put_u64(out, kbits);
        put_u32(out, s->iterations);
        out.push_back(s->sine_convention == SineConvention::conventional ? 0 : 1);
    } else {
        out.push_back(0);
    }
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

CipherText CipherText::parse(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    for (char m : kMagic)
        if (r.u8() != static_cast<std::uint8_t>(m))
            throw std::runtime_error("not a CBS1 ciphertext container");
    CipherText ct;
    ct.header.version = r.u8();
    if (ct.header.version != 1) throw std::runtime_error("unsupported container version");
    const std::uint8_t variant = r.u8();
    if (variant > 4) throw std::runtime_error("invalid variant in container header");
    ct.header.variant = static_cast<Variant>(variant);
    const std::uint8_t mode = r.u8();
    if (mode > 3) throw std::runtime_error("invalid mode in container header");
    ct.header.mode = static_cast<BlockMode>(mode);
    ct.header.rounds = r.u8();
    ct.header.segment_bits = r.u8();
    ct.header.iv = r.u8();
    ct.header.width = r.u32();
    ct.header.height = r.u32();
    ct.header.channels = r.u8();
    ct.header.original_width = r.u32();
    ct.header.original_height = r.u32();
    const std::uint8_t tag = r.u8();
    if (tag == 1) {
        const std::uint32_t t = r.u32(), q = r.u32(), it = r.u32();
        ct.header.map_params = ArnoldParams{t, q, it};
    } else if (tag == 2) {
        const std::uint64_t kbits = r.u64();
        double k;
        std::memcpy(&k, &kbits, 8);
        const std::uint32_t it = r.u32();
        const std::uint8_t conv = r.u8();
        ct.header.map_params = StandardMapParams{
            k, it, conv == 0 ? SineConvention::conventional : SineConvention::paper_literal};
    } else if (tag != 0) {
        throw std::runtime_error("invalid map-parameter tag in container header");
    }
    const std::size_t expected = static_cast<std::size_t>(ct.header.width) *
                                 ct.header.height * ct.header.channels;
    if (bytes.size() - r.pos != expected)
        throw std::runtime_error("ciphertext body is truncated or oversized");
    ct.body.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos), bytes.end());
    return ct;
}

}  // namespace cbcsti
