#include "eos/kernels.hpp"

#include <cmath>
#include <limits>

#include "eos/quadrature.hpp"

namespace eos {

namespace {

double tau(const ExperimentConfig& cfg) { return cfg.pulse_duration; }

// ∫_{x_lo}^{x_hi} exp(-τ²(x - c)²/2 + shift) dx, where `shift` is chosen so
// the largest integrand value in the window is 1; returns the integral and
// writes the shift used.
double window_gaussian(double tau_s, double c, double x_lo, double x_hi, double& shift)
{
    const double reach = 12.0 * std::sqrt(2.0) / tau_s;
    double lo = x_lo, hi = x_hi;
    if (x_lo >= c) {
        const double d = x_lo - c;
        hi = std::min(x_hi, x_lo + std::min(reach, 60.0 / (tau_s * tau_s * std::max(d, 1e-300))));
        shift = 0.5 * tau_s * tau_s * d * d;
    } else if (x_hi <= c) {
        const double d = c - x_hi;
        lo = std::max(x_lo, x_hi - std::min(reach, 60.0 / (tau_s * tau_s * std::max(d, 1e-300))));
        shift = 0.5 * tau_s * tau_s * d * d;
    } else {
        lo = std::max(x_lo, c - reach);
        hi = std::min(x_hi, c + reach);
        shift = 0.0;
    }
    if (!(lo < hi))
        return 0.0;
    QuadOptions o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-300;
    const double sh = shift;
    auto g = [&](double x) {
        const double d = x - c;
        return std::exp(-0.5 * tau_s * tau_s * d * d + sh);
    };
    // scale the partition to the Gaussian width so narrow peaks are seen
    std::vector<double> br;
    const double step = 1.0 / tau_s;
    const auto n = static_cast<long>(std::min(200.0, std::ceil((hi - lo) / step)));
    for (long i = 1; i < n; ++i)
        br.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    return integrate_adaptive_v<double>(g, lo, hi, o, br).value;
}

// 2/√π ∫_a^b e^{-t²} dt without cancellation in either tail
double erf_window(double a, double b)
{
    if (a >= 0.0)
        return std::erfc(a) - std::erfc(b);
    if (b <= 0.0)
        return std::erfc(-b) - std::erfc(-a);
    return 2.0 - std::erfc(b) - std::erfc(-a);
}

}  // namespace

double laser_spectrum(const ExperimentConfig& cfg, double omega)
{
    const double t = tau(cfg);
    const double d = std::abs(omega) - cfg.central_frequency;
    return std::pow(t * t / (2.0 * pi), 0.25) * std::exp(-t * t * d * d / 4.0);
}

double spectral_autocorrelation(const ExperimentConfig& cfg, double omega)
{
    const double t = tau(cfg);
    if (std::holds_alternative<filter::Full>(cfg.filter))
        return std::exp(-t * t * omega * omega / 8.0);
    if (auto m = std::get_if<filter::Monochromatic>(&cfg.filter)) {
        const double sw = 2.0 / t;
        if (std::abs(m->omega_d - cfg.central_frequency) > 8.0 * sw)
            throw std::domain_error("monochromatic filter more than 8 sigma_omega from the spectrum centre");
        const double a = std::abs(m->omega_d + omega) - cfg.central_frequency;
        const double b = m->omega_d - cfg.central_frequency;
        return std::exp(-t * t * (a * a - b * b) / 4.0);
    }
    const auto& b = std::get<filter::Band>(cfg.filter);
    // E(ω)E(ω+Ω) = e^{-τ²Ω²/8} e^{-τ²(x+Ω/2)²/2} (times the normalisation), x = ω - ω_c
    const double x_lo = b.omega_min - cfg.central_frequency;
    const double x_hi = b.omega_max - cfg.central_frequency;
    double s_num = 0.0, s_den = 0.0;
    const double num = window_gaussian(t, -0.5 * omega, x_lo, x_hi, s_num);
    const double den = window_gaussian(t, 0.0, x_lo, x_hi, s_den);
    if (!(den > 0.0))
        throw std::domain_error("band filter window holds no spectral weight");
    if (num == 0.0)
        return 0.0;
    return std::exp(-t * t * omega * omega / 8.0 - s_num + s_den) * num / den;
}

double spectral_autocorrelation_closed(const ExperimentConfig& cfg, double omega)
{
    const auto* b = std::get_if<filter::Band>(&cfg.filter);
    if (!b)
        throw std::invalid_argument("closed-form autocorrelation is only provided for band filters");
    const double t = tau(cfg);
    const double s = t / std::sqrt(2.0);
    const double x_lo = b->omega_min - cfg.central_frequency;
    const double x_hi = b->omega_max - cfg.central_frequency;
    const double num = erf_window(s * (x_lo + 0.5 * omega), s * (x_hi + 0.5 * omega));
    const double den = erf_window(s * x_lo, s * x_hi);
    return std::exp(-t * t * omega * omega / 8.0) * num / den;
}

double thermal_occupation(double temperature, double omega)
{
    if (!(temperature >= 0.0))
        throw std::domain_error("thermal_occupation: temperature must be >= 0");
    if (!(omega > 0.0))
        throw std::domain_error("thermal_occupation: frequency must be > 0");
    if (temperature == 0.0)
        return 0.0;
    const double x = phys.hbar * omega / (phys.kB * temperature);
    if (x > 700.0)
        return 0.0;
    return 1.0 / std::expm1(x);
}

cplx vacuum_mode_density(const ExperimentConfig& cfg, double omega)
{
    const cplx n = cfg.material.refractive_index(omega);
    const double c3 = phys.c * phys.c * phys.c;
    return phys.hbar * n * omega * omega * omega / (2.0 * pi * pi * phys.eps0 * c3);
}

cplx longitudinal_wavevector(cplx qc_sq_minus_q_sq) { return sqrt_upper(qc_sq_minus_q_sq); }

namespace {

// g(x) = (i x + 1 - e^{ix}) / x², with a series near the removable singularity
cplx edge_term(cplx x)
{
    if (std::abs(x) < 1e-4) {
        // -Σ_{m≥0} i^{m+2} x^m / (m+2)!
        return 0.5 + x * (I / 6.0 + x * (-1.0 / 24.0 + x * (-I / 120.0 + x / 720.0)));
    }
    return (I * x + 1.0 - std::exp(I * x)) / (x * x);
}

}  // namespace

cplx propagation_factor(cplx qz, double omega, double length, double group_index)
{
    if (qz == cplx{0.0, 0.0})
        throw std::domain_error("propagation_factor: q_z = 0");
    const double k = omega * group_index / phys.c;
    return (edge_term(length * (qz + k)) + edge_term(length * (qz - k))) / qz;
}

KernelContext make_kernel_context(const ExperimentConfig& cfg, double omega)
{
    KernelContext ctx;
    ctx.omega = omega;
    ctx.n = cfg.material.refractive_index(omega);
    ctx.qc = ctx.n * omega / phys.c;
    ctx.e2vac = vacuum_mode_density(cfg, omega);
    ctx.f_pos = spectral_autocorrelation(cfg, omega);
    ctx.f_neg = spectral_autocorrelation(cfg, -omega);
    ctx.occupation = omega > 0.0 ? thermal_occupation(cfg.temperature, omega) : 0.0;
    ctx.k_group = omega * cfg.group_index / phys.c;
    return ctx;
}

cplx kernel_amplitude(const KernelContext& ctx, double q, cplx qz, const ExperimentConfig& cfg)
{
    const double re_q = ctx.qc.real();
    if (!(re_q > 0.0))
        throw std::domain_error("transverse kernel: Re q(Omega) must be > 0");
    const double w = cfg.beam_waist;
    const cplx pi_f = propagation_factor(qz, ctx.omega, cfg.crystal_length, cfg.group_index);
    return ctx.e2vac * std::exp(-q * q * w * w / 4.0) * pi_f / (4.0 * pi * re_q);
}

cplx transverse_kernel(double qx, double qy, double omega, const ExperimentConfig& cfg)
{
    if (!(omega > 0.0))
        throw std::domain_error("transverse_kernel: frequency must be > 0");
    const KernelContext ctx = make_kernel_context(cfg, omega);
    const double q2 = qx * qx + qy * qy;
    const cplx qc2 = ctx.qc * ctx.qc;
    const cplx qz = longitudinal_wavevector(qc2 - q2);
    return kernel_amplitude(ctx, std::sqrt(q2), qz, cfg) * (1.0 - qx * qx / qc2);
}

cplx angular_reduced_kernel(double q, double omega, double separation, const ExperimentConfig& cfg)
{
    if (!(q >= 0.0))
        throw std::domain_error("angular_reduced_kernel: q must be >= 0");
    const KernelContext ctx = make_kernel_context(cfg, omega);
    const cplx qc2 = ctx.qc * ctx.qc;
    const cplx qz = longitudinal_wavevector(qc2 - q * q);
    const double x = q * std::abs(separation);
    const double j0 = bessel_j(0, x), j2 = bessel_j(2, x);
    return q * kernel_amplitude(ctx, q, qz, cfg) * (2.0 * pi * j0 - (q * q / qc2) * pi * (j0 + j2));
}

double q_cutoff(const ExperimentConfig& cfg) { return 2.0 / cfg.beam_waist * std::sqrt(std::log(1e12)); }

double omega_cutoff(const ExperimentConfig& cfg)
{
    const double t = tau(cfg);
    const double base = 2.0 / t * std::sqrt(std::log(1e12));
    if (std::holds_alternative<filter::Full>(cfg.filter))
        return base;
    // Filters skew f(Ω) and f(-Ω); push the cut out until every weight that
    // enters an element integral has fallen below 1e-12 of its peak.
    auto f = [&](double om) {
        if (std::holds_alternative<filter::Band>(cfg.filter))
            return spectral_autocorrelation_closed(cfg, om);
        return spectral_autocorrelation(cfg, om);
    };
    const bool thermal = cfg.temperature > 0.0;
    const double step = 0.02 / t;
    const int n = 2500;
    std::vector<double> w(n + 1);
    double peak = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double om = i * step;
        const double fp = f(om), fn = f(-om);
        double v = std::max(fp * fp, std::abs(fp * fn));
        if (thermal)
            v = std::max(v, fn * fn);
        w[i] = std::isfinite(v) ? v : 0.0;
        peak = std::max(peak, w[i]);
    }
    int last = 0;
    for (int i = 0; i <= n; ++i)
        if (w[i] >= 1e-12 * peak)
            last = i;
    return std::max(base, (last + 1) * step);
}

cplx ellipsometry_phase(const WavePlateSetting& setting)
{
    setting.validate();
    const double re = std::sqrt(std::max(0.0, -std::cos(setting.theta)));
    const double im = std::sqrt(2.0) * std::cos(setting.theta / 2.0);
    return static_cast<double>(setting.sign) * cplx{re, im};
}

WavePlateSetting invert_phase(cplx target)
{
    if (std::abs(std::abs(target) - 1.0) > 1e-9)
        throw std::domain_error("invert_phase: target must have unit modulus");
    WavePlateSetting s;
    s.sign = target.real() >= 0.0 ? 1 : -1;
    const double lim = 1.0 / std::sqrt(2.0);
    const double u = std::clamp(target.imag() / (s.sign * std::sqrt(2.0)), -lim, lim);
    s.theta = std::clamp(2.0 * std::acos(u), pi / 2, 3 * pi / 2);
    return s;
}

double detection_efficiency(double chi2, double length, double omega_c, double probe_index)
{
    if (!(chi2 > 0.0) || !(length > 0.0) || !(omega_c > 0.0) || !(probe_index > 0.0))
        throw std::domain_error("detection_efficiency: all inputs must be positive");
    const double root = 2.0 * length * chi2 * omega_c / (phys.eps0 * phys.c * probe_index);
    return root * root;
}

cplx classical_overlap(const ExperimentConfig& cfg, const ClassicalWaveform& waveform, int pulse_index)
{
    if (!std::holds_alternative<filter::Full>(cfg.filter))
        throw std::invalid_argument(
            "classical_overlap: the real pulse weight F_i = sqrt(C N_d) E^2/2 only holds without a frequency filter");
    if (pulse_index != 1 && pulse_index != 2)
        throw std::invalid_argument("classical_overlap: pulse index must be 1 or 2");
    waveform.validate();
    const double y0 = pulse_index == 2 ? cfg.beam_separation : 0.0;
    const double t0 = pulse_index == 2 ? cfg.time_delay : 0.0;
    const double w = cfg.beam_waist, t = tau(cfg), L = cfg.crystal_length;
    double sum = 0.0;
    for (const auto& c : waveform.components) {
        const double kperp2 = c.kx * c.kx + c.ky * c.ky;
        const double mismatch = (c.kz - c.omega * cfg.group_index / phys.c) * L / 2.0;
        const double sinc = mismatch == 0.0 ? 1.0 : std::sin(mismatch) / mismatch;
        const double env = std::exp(-kperp2 * w * w / 8.0 - c.omega * c.omega * t * t / 8.0) * sinc;
        const double phase = c.phase + c.ky * y0 - c.omega * t0;
        sum += c.amplitude * env * std::cos(phase);
    }
    return -0.5 * sum;
}

}  // namespace eos
