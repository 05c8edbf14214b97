#ifndef CBCSTI_ANALYSIS_HPP
#define CBCSTI_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cbcsti/cipher.hpp"
#include "cbcsti/image.hpp"

namespace cbcsti {

enum class ErrorMode { ECB, CBC, CFB, OFB, CTR };

ErrorMode error_mode_of(BlockMode mode);

// Closed-form decrypted bit-error probability as a function of the channel
// bit-error probability, with the bit-inversion probability of a corrupted
// block fixed at 1/2.
double predict_output_error(ErrorMode mode, double p_e, unsigned block_bits);

// Binomial probability of exactly x error bits among b received bits.
double block_error_probability(unsigned x, double p_e, unsigned b);

// Memoryless binary symmetric channel.
struct ChannelModel {
    double p_e = 0.0;
    std::uint64_t seed = 0;
};

std::vector<std::uint8_t> simulate_channel(const std::vector<std::uint8_t>& body,
                                           const ChannelModel& ch);

struct ErrorPropagationReport {
    ErrorMode mode;
    unsigned block_bits;
    double p_e;
    double predicted;
    double measured;
    std::uint64_t sample_bits;
    std::uint64_t erroneous_blocks = 0;  // single-flip experiments only
};

// Encrypt, corrupt the body through the channel, decrypt, and compare bits.
ErrorPropagationReport measure_error_propagation(const SecretKey& key,
                                                 const CipherConfig& cfg,
                                                 const ImageBuffer& img,
                                                 const ChannelModel& ch);

// Same experiment against the mode-free SPN primitive.
ErrorPropagationReport measure_error_propagation_ecb(const SecretKey& key,
                                                     const CipherConfig& cfg,
                                                     const ImageBuffer& img,
                                                     const ChannelModel& ch);

// Flips one ciphertext bit at pixel (x, y, channel) and returns the number of
// byte positions that decrypt incorrectly.
std::uint64_t count_erroneous_blocks(const SecretKey& key, const CipherConfig& cfg,
                                     const ImageBuffer& img, std::uint32_t x,
                                     std::uint32_t y, std::uint32_t channel,
                                     unsigned bit = 0);

enum class Direction { horizontal, vertical, diagonal };

struct CorrelationResult {
    double r = 0.0;
    bool degenerate = false;  // zero variance; r reported as 0
};

// Pearson correlation between adjacent-pixel series, per channel. samples = 0
// uses every adjacent pair; otherwise `samples` seeded random pairs.
std::vector<CorrelationResult> adjacent_correlation(const ImageBuffer& img, Direction dir,
                                                    std::size_t samples = 0,
                                                    std::uint64_t seed = 0);

// Shannon entropy of the 256-bin histogram, bits per symbol, per channel.
std::vector<double> entropy(const ImageBuffer& img);

double npcr(const ImageBuffer& a, const ImageBuffer& b);
double uaci(const ImageBuffer& a, const ImageBuffer& b);
std::vector<double> npcr_per_channel(const ImageBuffer& a, const ImageBuffer& b);

struct HistogramReport {
    std::vector<std::array<std::uint64_t, 256>> counts;  // per channel
    std::vector<double> chi_square;                      // against uniform, 255 dof
};

HistogramReport histogram(const ImageBuffer& img);

// Critical value of the chi-square distribution with 255 dof at alpha = 0.01.
inline constexpr double kChiSquare255Critical01 = 310.457;

struct KeyDelta {
    // Exactly one of the two perturbations: a flipped key bit (0..127,
    // numbered from the most significant bit of the key) or an additive
    // perturbation of the derived alpha parameter.
    std::variant<unsigned, double> delta;

    static KeyDelta key_bit(unsigned bit) { return KeyDelta{bit}; }
    static KeyDelta alpha_shift(double d) { return KeyDelta{d}; }
};

struct KeySensitivityReport {
    std::vector<double> npcr_channel;
    double npcr_overall = 0.0;
    double mean_uaci = 0.0;
};

KeySensitivityReport key_sensitivity(const ImageBuffer& img, const SecretKey& key,
                                     const CipherConfig& cfg, const KeyDelta& delta);

struct PlaintextSensitivityReport {
    std::uint64_t changed_blocks = 0;  // differing ciphertext bytes
    std::uint64_t first_diff = 0;      // stream position of the first difference
    double npcr_from_flip = 0.0;       // over the body suffix starting at first_diff
    double uaci_whole = 0.0;           // over the whole body
};

PlaintextSensitivityReport plaintext_sensitivity(const ImageBuffer& img,
                                                 const SecretKey& key,
                                                 const CipherConfig& cfg,
                                                 std::uint32_t x = 0, std::uint32_t y = 0,
                                                 std::uint32_t channel = 0,
                                                 unsigned bit = 0);

// Raw bytes, most significant bit first, for external randomness suites.
void export_bitstream(const std::vector<std::uint8_t>& bytes, const std::string& path);

// Flat key=value report; keys follow the fixed naming scheme
// (entropy.r, corr.h.r, npcr, uaci, chi2, ep.predicted, ...).
class FlatReport {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::uint64_t value);

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }
    std::string to_text() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Channel key suffix: "r", "g", "b" for the first three channels.
std::string channel_suffix(std::uint32_t channel);

// Full statistics block for one image (entropy, correlations, histogram chi2),
// plus npcr/uaci when a comparison image is given.
FlatReport build_stat_report(const ImageBuffer& img, const ImageBuffer* compare = nullptr,
                             std::size_t corr_samples = 0, std::uint64_t seed = 0);

}  // namespace cbcsti

#endif
