#ifndef EOS_ORACLES_HPP
#define EOS_ORACLES_HPP

#include <string>
#include <vector>

#include "eos/config.hpp"
#include "eos/elements.hpp"

namespace eos {

// Slow reference implementations. They use GSL integrators and their own
// formulas, never the production integration paths.

struct OracleReport {
    std::string name;
    cplx reference;
    cplx fast;
    double rel_error = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

OracleReport make_report(std::string name, cplx reference, cplx fast, double threshold, std::string note = {});

// (1/L²)∫∫ e^{-iΩ n_g (z-z')/c} e^{i q_z |z-z'|}/q_z over the crystal, by a
// product trapezoid rule on n, 2n and 4n points with two Romberg steps
cplx oracle_pi(cplx qz, double omega, double length, double group_index, int grid_n = 1000);
// the same without extrapolation (for convergence-order checks)
cplx oracle_pi_trapezoid(cplx qz, double omega, double length, double group_index, int grid_n);

// ∫d²q R(q, Ω) e^{i q_y δr} by nested adaptive quadrature in q_x and q_y
cplx oracle_cartesian_q(double omega, double separation, const ExperimentConfig& cfg, double rel_tol = 1e-8);

// overlap of Gaussian spectra over the filter window by composite Simpson on grid_n points
double oracle_autocorrelation(const SpectralFilter& filter, double pulse_duration, double omega_c, double omega,
                              int grid_n = 200001);

// -∫ F_i <E> over crystal, beam plane and time by Gauss-Legendre on nodes^4 points
cplx oracle_classical_overlap(const ExperimentConfig& cfg, const ClassicalWaveform& waveform, int pulse_index,
                              int nodes = 48);

// K_ii by GSL integration of the angular-reduced kernel over q and Ω
// (unfiltered pulses only)
cplx oracle_exchange_self(const ExperimentConfig& cfg, double rel_tol = 1e-6);

// (1/π)∫_0^π cos(n φ - x sin φ) dφ
double oracle_bessel(int order, double x);

// beam-splitter computation on signal ⊗ vacuum ancilla, means subtracted
double oracle_shot_noise_removed(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d);

std::vector<OracleReport> run_verification_suite(const ExperimentConfig& cfg, int threads = 0);

}  // namespace eos

#endif
