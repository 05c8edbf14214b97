#include "cbcsti/chaos.hpp"

#include <bit>
#include <cmath>

namespace cbcsti {

double pwlcm_step(double x, const PwlcmParams& params) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("pwlcm_step: input outside [0, 1)");
    const double p = params.p;
    if (x >= 0.5) x = 1.0 - x;  // symmetry branch; 1-x is exact for fixed-point inputs
    double out;
    if (x < p)
        out = x / p;
    else
        out = (x - p) / (0.5 - p);
    // x == 0.5 maps to exactly 1.0, which wraps to 0 like the discretized value would.
    if (out >= 1.0) out = 0.0;
    return out;
}

FixedPointValue discretize(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("discretize: input outside [0, 1]");
    const std::uint64_t raw = static_cast<std::uint64_t>(std::llround(x * 4294967296.0));
    return FixedPointValue{static_cast<std::uint32_t>(raw & 0xFFFFFFFFull)};
}

std::uint32_t primitive_taps(unsigned degree) {
    // Characteristic polynomials: x^4+x+1, x^8+x^6+x^5+x^4+1,
    // x^16+x^14+x^13+x^11+1, x^32+x^22+x^2+x+1.
    switch (degree) {
        case 4: return 0x3u;
        case 8: return 0x71u;
        case 16: return 0x6801u;
        case 32: return 0x400007u;
        default:
            throw std::invalid_argument("unsupported LFSR degree (use 4, 8, 16 or 32)");
    }
}

LfsrConfig::LfsrConfig(unsigned degree_, std::uint32_t initial_state_, std::uint32_t delta_)
    : degree(degree_), taps(primitive_taps(degree_)), initial_state(initial_state_), delta(delta_) {
    initial_state &= mask();
    if (initial_state == 0)
        throw std::invalid_argument("LFSR initial state must be nonzero");
    if (delta < 1) throw std::invalid_argument("perturbation period delta must be >= 1");
}

LfsrStep lfsr_next(std::uint32_t reg, std::uint32_t taps, unsigned degree) {
    const std::uint32_t mask = degree >= 32 ? 0xFFFFFFFFu : ((1u << degree) - 1u);
    reg &= mask;
    if (reg == 0) throw std::invalid_argument("lfsr_next: all-zero register");
    const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(reg & taps) & 1);
    const std::uint32_t next = ((reg >> 1) | (fb << (degree - 1))) & mask;
    return LfsrStep{next, next};
}

PerturbedOrbit::PerturbedOrbit(PwlcmParams params, FixedPointValue seed, LfsrConfig lfsr,
                               bool perturb_enabled, unsigned word_bits)
    : params_(params), lfsr_(lfsr), state_(seed.raw), lfsr_reg_(lfsr.initial_state),
      perturb_enabled_(perturb_enabled), word_bits_(word_bits) {
    if (word_bits_ < 8 || word_bits_ > 32)
        throw std::invalid_argument("orbit word size must be in [8, 32] bits");
    state_ &= word_mask();
    // Perturbation begins at n = 0, i.e. on the seed itself.
    if (perturb_enabled_) perturb();
}

void PerturbedOrbit::perturb() {
    const std::uint32_t bits = lfsr_reg_ & lfsr_.mask();
    state_ = (state_ ^ bits) & word_mask();
    lfsr_reg_ = lfsr_next(lfsr_reg_, lfsr_.taps, lfsr_.degree).new_register;
}

FixedPointValue PerturbedOrbit::next() {
    const double scale = std::ldexp(1.0, static_cast<int>(word_bits_));
    const double x = static_cast<double>(state_) / scale;
    const double fx = pwlcm_step(x, params_);
    std::uint64_t raw = static_cast<std::uint64_t>(std::llround(fx * scale));
    state_ = static_cast<std::uint32_t>(raw) & word_mask();
    ++n_;
    if (perturb_enabled_ && n_ % lfsr_.delta == 0) perturb();
    return FixedPointValue{word_bits_ == 32 ? state_ : (state_ << (32 - word_bits_))};
}

std::uint64_t min_cycle_length(const LfsrConfig& cfg) {
    return static_cast<std::uint64_t>(cfg.delta) *
           ((cfg.degree >= 32 ? 0xFFFFFFFFull : ((1ull << cfg.degree) - 1ull)));
}

}  // namespace cbcsti
