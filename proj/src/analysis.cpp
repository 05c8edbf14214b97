#include "cbcsti/analysis.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cbcsti {

ErrorMode error_mode_of(BlockMode mode) {
    switch (mode) {
        case BlockMode::CBC: return ErrorMode::CBC;
        case BlockMode::OFB: return ErrorMode::OFB;
        case BlockMode::CFB: return ErrorMode::CFB;
        case BlockMode::CTR: return ErrorMode::CTR;
    }
    throw std::invalid_argument("unknown block mode");
}

double predict_output_error(ErrorMode mode, double p_e, unsigned block_bits) {
    if (!(p_e >= 0.0 && p_e <= 1.0)) throw std::domain_error("p_e must lie in [0, 1]");
    if (block_bits < 1) throw std::domain_error("block size must be >= 1 bit");
    const double q0 = 1.0 - std::pow(1.0 - p_e, static_cast<double>(block_bits));
    switch (mode) {
        case ErrorMode::OFB:
        case ErrorMode::CTR:
            return p_e;
        case ErrorMode::ECB:
            return 0.5 * q0;
        case ErrorMode::CBC:
        case ErrorMode::CFB:
            return p_e * (1.0 - q0) + 0.5 * q0;
    }
    throw std::invalid_argument("unknown error mode");
}

double block_error_probability(unsigned x, double p_e, unsigned b) {
    if (x > b) throw std::domain_error("error count exceeds block size");
    if (!(p_e >= 0.0 && p_e <= 1.0)) throw std::domain_error("p_e must lie in [0, 1]");
    double comb = 1.0;
    for (unsigned i = 0; i < x; ++i) comb = comb * (b - i) / (i + 1);
    return comb * std::pow(p_e, static_cast<double>(x)) *
           std::pow(1.0 - p_e, static_cast<double>(b - x));
}

std::vector<std::uint8_t> simulate_channel(const std::vector<std::uint8_t>& body,
                                           const ChannelModel& ch) {
    if (!(ch.p_e >= 0.0 && ch.p_e <= 1.0))
        throw std::domain_error("channel p_e must lie in [0, 1]");
    std::vector<std::uint8_t> out = body;
    if (ch.p_e == 0.0) return out;
    if (ch.p_e == 1.0) {
        for (auto& b : out) b = static_cast<std::uint8_t>(~b);
        return out;
    }
    std::mt19937_64 rng(ch.seed);
    std::bernoulli_distribution flip(ch.p_e);
    for (auto& byte : out)
        for (unsigned bit = 0; bit < 8; ++bit)
            if (flip(rng)) byte ^= static_cast<std::uint8_t>(1u << bit);
    return out;
}

namespace {

std::uint64_t differing_bits(const std::vector<std::uint8_t>& a,
                             const std::vector<std::uint8_t>& b) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        bits += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return bits;
}

}  // namespace

ErrorPropagationReport measure_error_propagation(const SecretKey& key,
                                                 const CipherConfig& cfg,
                                                 const ImageBuffer& img,
                                                 const ChannelModel& ch) {
    CipherText ct = encrypt_image(img, key, cfg);
    ct.body = simulate_channel(ct.body, ch);
    const ImageBuffer decrypted = decrypt_image(ct, key, cfg);
    ErrorPropagationReport rep;
    rep.mode = error_mode_of(cfg.mode);
    rep.block_bits = 8;
    rep.p_e = ch.p_e;
    rep.predicted = predict_output_error(rep.mode, ch.p_e, 8);
    rep.sample_bits = img.data.size() * 8;
    rep.measured =
        static_cast<double>(differing_bits(img.data, decrypted.data)) / rep.sample_bits;
    return rep;
}

ErrorPropagationReport measure_error_propagation_ecb(const SecretKey& key,
                                                     const CipherConfig& cfg,
                                                     const ImageBuffer& img,
                                                     const ChannelModel& ch) {
    std::vector<std::uint8_t> cipher = ecb_encrypt_body(img.data, key, cfg);
    cipher = simulate_channel(cipher, ch);
    const std::vector<std::uint8_t> decrypted = ecb_decrypt_body(cipher, key, cfg);
    ErrorPropagationReport rep;
    rep.mode = ErrorMode::ECB;
    rep.block_bits = 8;
    rep.p_e = ch.p_e;
    rep.predicted = predict_output_error(ErrorMode::ECB, ch.p_e, 8);
    rep.sample_bits = img.data.size() * 8;
    rep.measured =
        static_cast<double>(differing_bits(img.data, decrypted)) / rep.sample_bits;
    return rep;
}

std::uint64_t count_erroneous_blocks(const SecretKey& key, const CipherConfig& cfg,
                                     const ImageBuffer& img, std::uint32_t x,
                                     std::uint32_t y, std::uint32_t channel, unsigned bit) {
    CipherText ct = encrypt_image(img, key, cfg);
    const std::size_t plane = static_cast<std::size_t>(ct.header.width) * ct.header.height;
    const std::size_t index =
        channel * plane + static_cast<std::size_t>(y) * ct.header.width + x;
    if (index >= ct.body.size() || bit > 7)
        throw std::invalid_argument("flip position outside the ciphertext body");
    ct.body[index] ^= static_cast<std::uint8_t>(1u << bit);
    const ImageBuffer decrypted = decrypt_image(ct, key, cfg);
    std::uint64_t blocks = 0;
    for (std::size_t i = 0; i < img.data.size(); ++i)
        if (img.data[i] != decrypted.data[i]) ++blocks;
    return blocks;
}

std::vector<CorrelationResult> adjacent_correlation(const ImageBuffer& img, Direction dir,
                                                    std::size_t samples, std::uint64_t seed) {
    const std::uint32_t dx = dir == Direction::vertical ? 0u : 1u;
    const std::uint32_t dy = dir == Direction::horizontal ? 0u : 1u;
    if (img.width <= dx || img.height <= dy)
        throw std::invalid_argument("image too small for this correlation direction");
    const std::uint32_t xs = img.width - dx;
    const std::uint32_t ys = img.height - dy;

    std::vector<CorrelationResult> out;
    for (std::uint32_t c = 0; c < img.channels; ++c) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        std::uint64_t n = 0;
        auto accumulate = [&](std::uint32_t x, std::uint32_t y) {
            const double a = img.at(x, y, c);
            const double b = img.at(x + dx, y + dy, c);
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
            ++n;
        };
        if (samples == 0) {
            for (std::uint32_t y = 0; y < ys; ++y)
                for (std::uint32_t x = 0; x < xs; ++x) accumulate(x, y);
        } else {
            std::mt19937_64 rng(seed + c);
            std::uniform_int_distribution<std::uint32_t> px(0, xs - 1), py(0, ys - 1);
            for (std::size_t i = 0; i < samples; ++i) accumulate(px(rng), py(rng));
        }
        const double nd = static_cast<double>(n);
        const double va = saa / nd - (sa / nd) * (sa / nd);
        const double vb = sbb / nd - (sb / nd) * (sb / nd);
        const double cov = sab / nd - (sa / nd) * (sb / nd);
        CorrelationResult res;
        if (va <= 0.0 || vb <= 0.0) {
            res.degenerate = true;
        } else {
            res.r = cov / std::sqrt(va * vb);
        }
        out.push_back(res);
    }
    return out;
}

std::vector<double> entropy(const ImageBuffer& img) {
    if (img.data.empty()) throw std::invalid_argument("entropy of an empty image");
    std::vector<double> out;
    const std::size_t plane = img.plane_size();
    for (std::uint32_t c = 0; c < img.channels; ++c) {
        std::array<std::uint64_t, 256> counts{};
        const std::uint8_t* p = img.data.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) ++counts[p[i]];
        double h = 0.0;
        for (auto cnt : counts) {
            if (cnt == 0) continue;
            const double prob = static_cast<double>(cnt) / static_cast<double>(plane);
            h -= prob * std::log2(prob);
        }
        out.push_back(h);
    }
    return out;
}

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("image dimensions differ");
}

}  // namespace

double npcr(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    std::uint64_t diff = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (a.data[i] != b.data[i]) ++diff;
    return 100.0 * static_cast<double>(diff) / static_cast<double>(a.data.size());
}

double uaci(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        sum += std::abs(static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]));
    return 100.0 * sum / (255.0 * static_cast<double>(a.data.size()));
}

std::vector<double> npcr_per_channel(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    const std::size_t plane = a.plane_size();
    std::vector<double> out;
    for (std::uint32_t c = 0; c < a.channels; ++c) {
        std::uint64_t diff = 0;
        for (std::size_t i = 0; i < plane; ++i)
            if (a.data[c * plane + i] != b.data[c * plane + i]) ++diff;
        out.push_back(100.0 * static_cast<double>(diff) / static_cast<double>(plane));
    }
    return out;
}

HistogramReport histogram(const ImageBuffer& img) {
    HistogramReport rep;
    const std::size_t plane = img.plane_size();
    for (std::uint32_t c = 0; c < img.channels; ++c) {
        std::array<std::uint64_t, 256> counts{};
        const std::uint8_t* p = img.data.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) ++counts[p[i]];
        const double expected = static_cast<double>(plane) / 256.0;
        double chi2 = 0.0;
        for (auto cnt : counts) {
            const double d = static_cast<double>(cnt) - expected;
            chi2 += d * d / expected;
        }
        rep.counts.push_back(counts);
        rep.chi_square.push_back(chi2);
    }
    return rep;
}

namespace {

ImageBuffer body_as_image(const CipherText& ct) {
    ImageBuffer img(ct.header.width, ct.header.height, ct.header.channels);
    img.data = ct.body;
    return img;
}

}  // namespace

KeySensitivityReport key_sensitivity(const ImageBuffer& img, const SecretKey& key,
                                     const CipherConfig& cfg, const KeyDelta& delta) {
    const CipherText base = encrypt_image(img, key, cfg);
    CipherText perturbed;
    if (const auto* bit = std::get_if<unsigned>(&delta.delta)) {
        if (*bit > 127) throw std::invalid_argument("key bit index must be in [0, 127]");
        SecretKey other = key;
        other.bytes[*bit / 8] ^= static_cast<std::uint8_t>(1u << (7 - *bit % 8));
        CipherConfig cfg2 = cfg;
        cfg2.iv = base.header.iv;  // isolate the keystream change from the derived IV
        perturbed = encrypt_image(img, other, cfg2);
    } else {
        const double shift = std::get<double>(delta.delta);
        ChaoticParameters params = derive_parameters(key);
        params.alpha = PwlcmParams(params.alpha.p + shift);
        // Re-run the mode transform under the perturbed parameters.
        ImageBuffer padded = pad_to_square(img);
        if (cfg.uses_pixel_permutation()) {
            const GridPermutation perm = GridPermutation::build(cfg.map_params, padded.width);
            padded = apply_permutation(padded, perm, PermDirection::forward);
        }
        perturbed = base;
        perturbed.body = encrypt_body_with_params(padded.data, params, cfg, base.header.iv);
    }
    const ImageBuffer a = body_as_image(base);
    const ImageBuffer b = body_as_image(perturbed);
    KeySensitivityReport rep;
    rep.npcr_channel = npcr_per_channel(a, b);
    rep.npcr_overall = npcr(a, b);
    rep.mean_uaci = uaci(a, b);
    return rep;
}

PlaintextSensitivityReport plaintext_sensitivity(const ImageBuffer& img,
                                                 const SecretKey& key,
                                                 const CipherConfig& cfg, std::uint32_t x,
                                                 std::uint32_t y, std::uint32_t channel,
                                                 unsigned bit) {
    if (x >= img.width || y >= img.height || channel >= img.channels || bit > 7)
        throw std::invalid_argument("plaintext flip position out of range");
    ImageBuffer flipped = img;
    flipped.at(x, y, channel) ^= static_cast<std::uint8_t>(1u << bit);

    const CipherText a = encrypt_image(img, key, cfg);
    CipherConfig cfg2 = cfg;
    cfg2.iv = a.header.iv;
    const CipherText b = encrypt_image(flipped, key, cfg2);

    PlaintextSensitivityReport rep;
    std::size_t first = a.body.size();
    for (std::size_t i = 0; i < a.body.size(); ++i) {
        if (a.body[i] != b.body[i]) {
            if (first == a.body.size()) first = i;
            ++rep.changed_blocks;
        }
    }
    rep.first_diff = first;
    if (rep.changed_blocks == 0) return rep;

    const std::size_t suffix = a.body.size() - first;
    std::uint64_t suffix_diff = 0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < a.body.size(); ++i) {
        const int d = std::abs(static_cast<int>(a.body[i]) - static_cast<int>(b.body[i]));
        abs_sum += d;
        if (i >= first && d != 0) ++suffix_diff;
    }
    rep.npcr_from_flip = 100.0 * static_cast<double>(suffix_diff) / static_cast<double>(suffix);
    rep.uaci_whole = 100.0 * abs_sum / (255.0 * static_cast<double>(a.body.size()));
    return rep;
}

void export_bitstream(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    if (bytes.empty()) throw std::invalid_argument("refusing to export an empty bitstream");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open bitstream output file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("bitstream write failed: " + path);
}

void FlatReport::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void FlatReport::add(const std::string& key, double value) {
    std::ostringstream ss;
    ss.precision(10);
    ss << value;
    entries_.emplace_back(key, ss.str());
}

void FlatReport::add(const std::string& key, std::uint64_t value) {
    entries_.emplace_back(key, std::to_string(value));
}

std::string FlatReport::to_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string channel_suffix(std::uint32_t channel) {
    static const char* names[3] = {"r", "g", "b"};
    if (channel < 3) return names[channel];
    return "c" + std::to_string(channel);
}

FlatReport build_stat_report(const ImageBuffer& img, const ImageBuffer* compare,
                             std::size_t corr_samples, std::uint64_t seed) {
    FlatReport rep;
    const std::vector<double> ent = entropy(img);
    for (std::uint32_t c = 0; c < img.channels; ++c)
        rep.add("entropy." + channel_suffix(c), ent[c]);
    const std::pair<const char*, Direction> dirs[3] = {{"h", Direction::horizontal},
                                                       {"v", Direction::vertical},
                                                       {"d", Direction::diagonal}};
    for (const auto& [name, dir] : dirs) {
        const auto corr = adjacent_correlation(img, dir, corr_samples, seed);
        for (std::uint32_t c = 0; c < img.channels; ++c) {
            rep.add(std::string("corr.") + name + "." + channel_suffix(c), corr[c].r);
            if (corr[c].degenerate)
                rep.add(std::string("corr.") + name + "." + channel_suffix(c) + ".degenerate",
                        std::string("true"));
        }
    }
    const HistogramReport hist = histogram(img);
    for (std::uint32_t c = 0; c < img.channels; ++c)
        rep.add("chi2." + channel_suffix(c), hist.chi_square[c]);
    if (compare != nullptr) {
        rep.add("npcr", npcr(img, *compare));
        rep.add("uaci", uaci(img, *compare));
    }
    return rep;
}

}  // namespace cbcsti
