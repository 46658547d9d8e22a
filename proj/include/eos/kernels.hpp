#ifndef EOS_KERNELS_HPP
#define EOS_KERNELS_HPP

#include "eos/config.hpp"
#include "eos/constants.hpp"

namespace eos {

// Normalised Gaussian laser spectrum, peaked at ±ω_c with width σω.
double laser_spectrum(const ExperimentConfig& cfg, double omega);

// f(Ω): overlap of the spectrum with its copy shifted by Ω, over the filter
// window, normalised by the window's self-overlap.
double spectral_autocorrelation(const ExperimentConfig& cfg, double omega);
// Band filters only: the same ratio written with complementary error functions.
double spectral_autocorrelation_closed(const ExperimentConfig& cfg, double omega);

double thermal_occupation(double temperature, double omega);

cplx vacuum_mode_density(const ExperimentConfig& cfg, double omega);

// Longitudinal wavevector √(q_c² − q²) on the branch Im ≥ 0 (ties: Re ≥ 0).
cplx longitudinal_wavevector(cplx qc_sq_minus_q_sq);

// Crystal average of e^{-iΩ n_g (z-z')/c} e^{i q_z |z-z'|}/q_z over both
// pulse positions.
cplx propagation_factor(cplx qz, double omega, double length, double group_index);

// Per-frequency data shared by all transverse integrals at one Ω.
struct KernelContext {
    double omega = 0.0;
    cplx n;           // THz refractive index
    cplx qc;          // n Ω / c
    cplx e2vac;       // vacuum mode density
    double f_pos = 0.0, f_neg = 0.0;
    double occupation = 0.0;
    double k_group = 0.0;  // Ω n_g / c
};

KernelContext make_kernel_context(const ExperimentConfig& cfg, double omega);

// R(q_x, q_y, Ω)
cplx transverse_kernel(double qx, double qy, double omega, const ExperimentConfig& cfg);

// The q_x-independent part A(q, Ω) of R, given q_z directly.
cplx kernel_amplitude(const KernelContext& ctx, double q, cplx qz, const ExperimentConfig& cfg);

// q A(q) [2π J0(q δr) − (q²/q_c²) π (J0(q δr) + J2(q δr))]
cplx angular_reduced_kernel(double q, double omega, double separation, const ExperimentConfig& cfg);

// Integration limits beyond which the Gaussian envelopes are below 1e-12.
double q_cutoff(const ExperimentConfig& cfg);
double omega_cutoff(const ExperimentConfig& cfg);

cplx ellipsometry_phase(const WavePlateSetting& setting);
WavePlateSetting invert_phase(cplx target);

// C from √C = 2 L χ ω_c / (ε0 c n_c)
double detection_efficiency(double chi2, double length, double omega_c, double probe_index);

// L_i for a classical plane-wave field; reduced units (√(C N_d) = 1).
cplx classical_overlap(const ExperimentConfig& cfg, const ClassicalWaveform& waveform, int pulse_index);

}  // namespace eos

#endif
