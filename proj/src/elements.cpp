#include "eos/elements.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "eos/kernels.hpp"
#include "eos/quadrature.hpp"

namespace eos {

double element_prefactor(const ExperimentConfig& cfg)
{
    if (cfg.scale)
        return detection_efficiency(cfg.scale->chi2, cfg.crystal_length, cfg.central_frequency,
                                    cfg.scale->probe_index) *
               cfg.scale->photons;
    return cfg.coupling;
}

namespace {

using Pair = std::array<cplx, 2>;
using Quad = std::array<cplx, 4>;

// The radial integral is split at q = Re q_c and rewritten in u = √|Re q_c² − q²|;
// q dq = ±u du absorbs the 1/q_z of the propagation factor where q_z → 0.
Pair transverse_pair(const ExperimentConfig& cfg, const KernelContext& ctx, const ElementOptions& opt)
{
    const double sep = std::abs(cfg.beam_separation);
    const double qr = ctx.qc.real(), qi = ctx.qc.imag();
    if (!(qr > 0.0))
        throw std::domain_error("transverse integral: Re q(Omega) must be > 0");
    const cplx qc2 = ctx.qc * ctx.qc;
    const double qmax = q_cutoff(cfg);
    const double L = cfg.crystal_length;

    auto point = [&](double q, double u, cplx qz2) -> Pair {
        const cplx qz = longitudinal_wavevector(qz2);
        const cplx a = kernel_amplitude(ctx, q, qz, cfg) * u;
        const cplx ratio = q * q / qc2;
        const cplx s0 = a * (2.0 * pi - ratio * pi);
        if (sep == 0.0)
            return {s0, s0};
        const double x = q * sep;
        const double j0 = bessel_j(0, x), j2 = bessel_j(2, x);
        return {s0, a * (2.0 * pi * j0 - ratio * pi * (j0 + j2))};
    };

    QuadOptions qo;
    qo.rel_tol = opt.inner_rel_tol;
    qo.abs_tol = 1e-300;
    qo.cross_rel = opt.inner_rel_tol;
    qo.max_intervals = opt.max_intervals;

    Pair total{};
    const cplx shift{-qi * qi, 2.0 * qr * qi};

    // propagating side, q < Re q_c
    {
        const double u_hi = qr;
        const double u_lo = qr > qmax ? std::sqrt(qr * qr - qmax * qmax) : 0.0;
        if (u_hi > u_lo) {
            auto f = [&](double u) {
                const double q = std::sqrt(std::max(0.0, qr * qr - u * u));
                return point(q, u, u * u + shift);
            };
            double period = 2.0 * pi / L;
            if (sep > 0.0)
                period = std::min(period, 2.0 * pi / sep);
            std::vector<double> br{ctx.k_group};
            total = total + oscillation_panels_v<Pair>(f, u_lo, u_hi, period, opt.nodes_per_period, qo, br).value;
        }
    }
    // evanescent side, q > Re q_c
    if (qr < qmax) {
        const double u_hi = std::sqrt(qmax * qmax - qr * qr);
        auto f = [&](double u) {
            const double q = std::sqrt(qr * qr + u * u);
            return point(q, u, -u * u + shift);
        };
        const double period = sep > 0.0 ? 2.0 * pi / sep : u_hi / 4.0;
        std::vector<double> br{1.0 / L, 5.0 / L, 20.0 / L, 50.0 / L};
        total = total + oscillation_panels_v<Pair>(f, 0.0, u_hi, period, opt.nodes_per_period, qo, br).value;
    }
    return total;
}

std::vector<double> omega_breaks(const ExperimentConfig& cfg, double hi)
{
    std::vector<double> br;
    for (double w : cfg.material.resonance_breakpoints())
        if (w > 0.0 && w < hi)
            br.push_back(w);
    // a coarse uniform partition keeps narrow spectral features from being skipped
    for (int i = 1; i < 16; ++i)
        br.push_back(hi * i / 16.0);
    return br;
}

template <class F>
Quad integrate_omega(const ExperimentConfig& cfg, double hi, F&& f, const ElementOptions& opt)
{
    QuadOptions qo;
    qo.rel_tol = opt.rel_tol;
    qo.abs_tol = 1e-300;
    qo.cross_rel = opt.rel_tol;
    qo.max_intervals = opt.max_intervals;
    auto br = omega_breaks(cfg, hi);
    AdaptiveResult<Quad> r;
    if (cfg.time_delay != 0.0)
        r = oscillation_panels_v<Quad>(f, 0.0, hi, 2.0 * pi / std::abs(cfg.time_delay), opt.nodes_per_period, qo, br);
    else
        r = integrate_adaptive_v<Quad>(f, 0.0, hi, qo, br);
    if (!r.converged)
        throw QuadratureError("frequency integral did not converge within the interval budget");
    return r.value;
}

// [L11, L12, M, √2 K] of the zero-temperature part, before the C·N_d/4 prefactor
Quad vacuum_integrals(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    ExperimentConfig cold = cfg;
    cold.temperature = 0.0;
    const double hi = omega_cutoff(cold);
    const double dt = cfg.time_delay;
    auto f = [&](double om) -> Quad {
        const KernelContext ctx = make_kernel_context(cold, om);
        const double ff = ctx.f_pos * ctx.f_pos, fm = ctx.f_pos * ctx.f_neg;
        if (ff == 0.0 && fm == 0.0)
            return {};
        const Pair s = transverse_pair(cold, ctx, opt);
        const double c = std::cos(om * dt);
        return {ff * s[0].real(), ff * std::exp(I * (dt * om)) * s[1].real(), fm * c * s[1], fm * s[0]};
    };
    return integrate_omega(cold, hi, f, opt);
}

// thermal additions in the same layout
Quad thermal_integrals(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    if (cfg.temperature == 0.0)
        return {};
    const double hi = omega_cutoff(cfg);
    const double dt = cfg.time_delay;
    auto f = [&](double om) -> Quad {
        const double occ = thermal_occupation(cfg.temperature, om);
        if (occ == 0.0)
            return {};
        const KernelContext ctx = make_kernel_context(cfg, om);
        const double fp2 = ctx.f_pos * ctx.f_pos, fn2 = ctx.f_neg * ctx.f_neg, fm = ctx.f_pos * ctx.f_neg;
        if (fp2 == 0.0 && fn2 == 0.0)
            return {};
        const Pair s = transverse_pair(cfg, ctx, opt);
        const double c = std::cos(om * dt);
        const cplx ph = std::exp(I * (dt * om));
        return {occ * (fp2 + fn2) * s[0].real(), occ * s[1].real() * (ph * fp2 + std::conj(ph) * fn2),
                2.0 * occ * fm * c * s[1].real(), 2.0 * occ * fm * s[0].real()};
    };
    return integrate_omega(cfg, hi, f, opt);
}

ProbeMatrixElements from_integrals(const ExperimentConfig& cfg, const Quad& v)
{
    const double pre = element_prefactor(cfg) / 4.0;
    ProbeMatrixElements e;
    e.l11 = e.l22 = pre * v[0].real();
    e.l12 = pre * v[1];
    e.m = pre * v[2];
    e.k11 = e.k22 = pre * v[3] / std::sqrt(2.0);
    e.x = x_fourth_order(e);
    return e;
}

}  // namespace

std::array<cplx, 2> transverse_integrals(const ExperimentConfig& cfg, double omega, const ElementOptions& opt)
{
    return transverse_pair(cfg, make_kernel_context(cfg, omega), opt);
}

ProbeMatrixElements vacuum_elements(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    cfg.validate();
    return from_integrals(cfg, vacuum_integrals(cfg, opt));
}

ProbeMatrixElements thermal_elements(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    cfg.validate();
    const Quad vac = vacuum_integrals(cfg, opt);
    if (cfg.temperature == 0.0)
        return from_integrals(cfg, vac);
    return from_integrals(cfg, vac + thermal_integrals(cfg, opt));
}

ProbeMatrixElements displace(const ProbeMatrixElements& base, cplx l1, cplx l2)
{
    ProbeMatrixElements e = base;
    e.l1 = base.l1 + l1;
    e.l2 = base.l2 + l2;
    e.l11 = base.l11 + std::norm(l1);
    e.l22 = base.l22 + std::norm(l2);
    e.l12 = base.l12 + l1 * std::conj(l2);
    e.m = base.m + l1 * l2;
    e.k11 = base.k11 + l1 * l1 / std::sqrt(2.0);
    e.k22 = base.k22 + l2 * l2 / std::sqrt(2.0);
    e.x = x_fourth_order(e);
    return e;
}

ProbeMatrixElements coherent_elements(const ExperimentConfig& cfg, const ClassicalWaveform& waveform,
                                      const ElementOptions& opt)
{
    // classical_overlap works in √(C N_d) = 1; rescale to the element prefactor
    const double root = std::sqrt(element_prefactor(cfg));
    const cplx l1 = root * classical_overlap(cfg, waveform, 1);
    const cplx l2 = root * classical_overlap(cfg, waveform, 2);
    return displace(vacuum_elements(cfg, opt), l1, l2);
}

cplx exchange_self(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    ExperimentConfig same = cfg;
    same.beam_separation = 0.0;
    same.time_delay = 0.0;
    return thermal_elements(same, opt).m / std::sqrt(2.0);
}

double x_fourth_order(const ProbeMatrixElements& e)
{
    return e.l11 * e.l22 + std::norm(e.l12) + std::norm(e.m);
}

ProbeMatrixElements scale_elements(const ProbeMatrixElements& e, double lambda)
{
    const double r = std::sqrt(lambda);
    ProbeMatrixElements s = e;
    s.l1 *= r;
    s.l2 *= r;
    s.l11 *= lambda;
    s.l22 *= lambda;
    s.l12 *= lambda;
    s.m *= lambda;
    s.k11 *= lambda;
    s.k22 *= lambda;
    s.x = e.x * lambda * lambda;
    return s;
}

ProbeState assemble_state(const ProbeMatrixElements& e)
{
    const cplx vals[] = {e.l1, e.l2, e.l12, e.m, e.k11, e.k22};
    for (const cplx& v : vals)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw StateError("assemble_state: non-finite element");
    if (!std::isfinite(e.l11) || !std::isfinite(e.l22) || !std::isfinite(e.x))
        throw StateError("assemble_state: non-finite element");
    if (1.0 - e.l11 - e.l22 - e.x < -1e-9)
        throw StateError("assemble_state: vacuum population is negative; elements are outside the perturbative regime");
    return state_matrix(e);
}

ProbeState state_matrix(const ProbeMatrixElements& e)
{
    ProbeState r = ProbeState::Zero();
    r(0, 0) = 1.0 - e.l11 - e.l22 - e.x;
    r(1, 0) = e.l1;
    r(2, 0) = e.l2;
    r(3, 0) = e.m;
    r(4, 0) = e.k11;
    r(5, 0) = e.k22;
    for (int i = 1; i < 6; ++i)
        r(0, i) = std::conj(r(i, 0));
    r(1, 1) = e.l11;
    r(2, 2) = e.l22;
    r(1, 2) = std::conj(e.l12);
    r(2, 1) = e.l12;
    r(3, 3) = e.x;
    return r;
}

struct ElementCache::Impl {
    mutable std::mutex mu;
    std::map<std::string, ProbeMatrixElements> store;
};

ElementCache::ElementCache() : impl_(std::make_shared<Impl>()) {}

namespace {

std::string options_key(const ElementOptions& o)
{
    std::ostringstream s;
    s.precision(17);
    s << o.rel_tol << '|' << o.inner_rel_tol << '|' << o.nodes_per_period << '|' << o.max_intervals;
    return s.str();
}

}  // namespace

ProbeMatrixElements ElementCache::thermal(const ExperimentConfig& cfg, const ElementOptions& opt)
{
    const std::string key = "T|" + serialize_config(cfg) + options_key(opt);
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->store.find(key);
        if (it != impl_->store.end())
            return it->second;
    }
    ProbeMatrixElements e = thermal_elements(cfg, opt);
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->store[key] = e;
    return e;
}

ProbeMatrixElements ElementCache::coherent(const ExperimentConfig& cfg, const ClassicalWaveform& w,
                                           const ElementOptions& opt)
{
    std::ostringstream k;
    k.precision(17);
    k << "C|" << serialize_config(cfg) << options_key(opt);
    for (const auto& c : w.components)
        k << '|' << c.amplitude << ',' << c.kx << ',' << c.ky << ',' << c.kz << ',' << c.omega << ',' << c.phase;
    const std::string key = k.str();
    {
        std::lock_guard<std::mutex> g(impl_->mu);
        auto it = impl_->store.find(key);
        if (it != impl_->store.end())
            return it->second;
    }
    ProbeMatrixElements e = coherent_elements(cfg, w, opt);
    std::lock_guard<std::mutex> g(impl_->mu);
    impl_->store[key] = e;
    return e;
}

size_t ElementCache::size() const
{
    std::lock_guard<std::mutex> g(impl_->mu);
    return impl_->store.size();
}

}  // namespace eos
