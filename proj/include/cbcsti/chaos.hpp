#ifndef CBCSTI_CHAOS_HPP
#define CBCSTI_CHAOS_HPP

#include <cstdint>
#include <stdexcept>

namespace cbcsti {

// Control parameter of the piecewise linear chaotic map, restricted to (0, 0.5).
struct PwlcmParams {
    double p;

    explicit PwlcmParams(double p_) : p(p_) {
        if (!(p > 0.0 && p < 0.5))
            throw std::invalid_argument("PWLCM control parameter must lie strictly in (0, 0.5)");
    }
};

// A value in [0,1) stored as raw/2^32.
struct FixedPointValue {
    std::uint32_t raw = 0;

    double to_real() const { return static_cast<double>(raw) / 4294967296.0; }
};

// Three-branch piecewise linear map on [0,1). The upper half folds onto the
// lower half through F[1-x].
double pwlcm_step(double x, const PwlcmParams& params);

// round(x * 2^32); an exact 1.0 wraps to raw 0 so the codomain stays closed.
FixedPointValue discretize(double x);

// Maximal-length Fibonacci LFSR. Register bit i holds Q_i; the feedback bit is
// the parity of the tapped bits and enters at position k-1.
struct LfsrConfig {
    unsigned degree;              // k
    std::uint32_t taps;           // k-bit tap mask
    std::uint32_t initial_state;  // nonzero k-bit seed
    std::uint32_t delta;          // perturbation period, >= 1

    LfsrConfig(unsigned degree_, std::uint32_t initial_state_, std::uint32_t delta_ = 1);

    std::uint32_t mask() const { return degree >= 32 ? 0xFFFFFFFFu : ((1u << degree) - 1u); }
};

// Primitive tap mask for k in {4, 8, 16, 32}; throws for unsupported degrees.
std::uint32_t primitive_taps(unsigned degree);

struct LfsrStep {
    std::uint32_t output_bits;  // register contents after the shift
    std::uint32_t new_register;
};

LfsrStep lfsr_next(std::uint32_t reg, std::uint32_t taps, unsigned degree);

// One PWLCM trajectory held in fixed point, with its low bits XOR-perturbed by
// the LFSR every delta iterations. word_bits < 32 shrinks the state space for
// exhaustive cycle measurements.
class PerturbedOrbit {
public:
    PerturbedOrbit(PwlcmParams params, FixedPointValue seed, LfsrConfig lfsr,
                   bool perturb_enabled = true, unsigned word_bits = 32);

    FixedPointValue next();

    std::uint32_t state_raw() const { return state_; }
    std::uint32_t lfsr_register() const { return lfsr_reg_; }
    std::uint64_t iteration() const { return n_; }

private:
    PwlcmParams params_;
    LfsrConfig lfsr_;
    std::uint32_t state_;
    std::uint32_t lfsr_reg_;
    std::uint64_t n_ = 0;
    bool perturb_enabled_;
    unsigned word_bits_;

    std::uint32_t word_mask() const {
        return word_bits_ >= 32 ? 0xFFFFFFFFu : ((1u << word_bits_) - 1u);
    }
    void perturb();
};

// Lower bound on the perturbed cycle length: delta * (2^k - 1).
std::uint64_t min_cycle_length(const LfsrConfig& cfg);

}  // namespace cbcsti

#endif
