#ifndef EOS_OBSERVABLES_HPP
#define EOS_OBSERVABLES_HPP

#include <array>

#include "eos/config.hpp"
#include "eos/elements.hpp"

namespace eos {

struct NegativityReport {
    double negativity = 0.0;
    double e1 = 0.0;
    cplx m_bar;
    double l11_bar = 0.0;
    double phi_m = 0.0;  // Re[m̄]/|m̄|, 0 when m̄ = 0
};

NegativityReport negativity(const ProbeMatrixElements& e);

// Sum of |negative eigenvalues| of the partial transpose over mode 2.
double negativity_oracle(const ProbeState& state);

double witness_expectation(const ProbeMatrixElements& e);

struct WitnessBudget {
    WavePlateSetting theta, theta_prime;
    double g_theta = 0.0, g_theta_prime = 0.0;  // two-beam correlations at (Θ,Θ) and (Θ',Θ')
    // shot-noise-free single-beam sums G^SB(π/2,π/2) + G^SB(π,π) for each beam, = 4 <a_i†a_i>/N_d
    double single_beam_1 = 0.0, single_beam_2 = 0.0;
    double combination = 0.0;          // l11 + x - |m|: <W> up to the fourth-order x
    double printed_combination = 0.0;  // the literal four-term sum with P(Θ) = e^{-iφ}
    double expectation = 0.0;          // witness_expectation
};

WitnessBudget witness_budget(const ProbeMatrixElements& e, double n_d);

// <S_i> at the quarter-wave setting in the printed convention 2 Re[l_i]
// (√C N_d absorbed into the elements)
double mean_signal(const ProbeMatrixElements& e, int beam);

// operator-level moments, built on a two-mode Fock space large enough that
// every quadratic operator acts exactly on the six basis states
struct ModeMoments {
    cplx a;         // <a>
    cplx aa;        // <a a>
    double ada = 0; // <a† a>
};
ModeMoments mode_moments(const ProbeState& state, int beam);
cplx pair_moment(const ProbeState& state, bool dagger_first);  // <a1† a2> or <a1 a2>

double two_beam_correlation(const ProbeState& state, const WavePlateSetting& t1, const WavePlateSetting& t2,
                            double n_d);
double two_beam_correlation(const ProbeState& state, cplx p1, cplx p2, double n_d);

// Second moment <S²> of one ellipsometry signal, the shot-noise-limited
// single-beam quantity (equal to the variance when <a> = 0).
double single_beam_variance(const ProbeState& state, int beam, const WavePlateSetting& t, double n_d);
double single_beam_variance(const ProbeState& state, int beam, cplx p, double n_d);

// Shot-noise-free correlation of the two beam-splitter outputs (T = 1/√2, R = i/√2).
double shot_noise_removed(const ProbeState& state, int beam, const WavePlateSetting& reflected,
                          const WavePlateSetting& transmitted, double n_d);
double shot_noise_removed(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d);
// same with the product of the two output means subtracted
double shot_noise_removed_connected(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d);

struct BellSettings {
    WavePlateSetting t1, t1p, t2, t2p;
    double n_lo = 1.0;
};

double bell_correlation(const ProbeMatrixElements& e, cplx p1, cplx p2, double n_lo, bool split_denominator = false);
double bell_value(const ProbeMatrixElements& e, const BellSettings& s, bool split_denominator = false);

struct BellResult {
    double b_max = 0.0;
    BellSettings settings;
    double b_split = 0.0;  // same settings, denominator N_LO² + N_LO(L11 + L22) + X
};

BellResult bell_optimize(const ProbeMatrixElements& e, double n_lo);

}  // namespace eos

#endif
