#include "eos/oracles.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <future>
#include <thread>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "eos/kernels.hpp"
#include "eos/observables.hpp"
#include "eos/quadrature.hpp"

namespace eos {

OracleReport make_report(std::string name, cplx reference, cplx fast, double threshold, std::string note)
{
    OracleReport r;
    r.name = std::move(name);
    r.reference = reference;
    r.fast = fast;
    const double scale = std::abs(reference);
    r.rel_error = scale > 0.0 ? std::abs(fast - reference) / scale : std::abs(fast - reference);
    r.threshold = threshold;
    r.pass = std::isfinite(r.rel_error) && r.rel_error <= threshold;
    r.note = std::move(note);
    return r;
}

namespace {

// GSL adaptive rule panel by panel, so each break is a hard endpoint. The
// absolute floor is rel times ∫|f| over the whole range: cancelling
// integrands then stop at the accuracy the data supports.
double gsl_quad(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks, double rel,
                size_t limit = 2000)
{
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > pts.back() && x < b)
            pts.push_back(x);
    pts.push_back(b);
    gsl_set_error_handler_off();
    gsl_function gf;
    gf.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    gf.params = const_cast<std::function<double(double)>*>(&f);
    const size_t panels = pts.size() - 1;
    double magnitude = 0.0;
    for (size_t i = 0; i < panels; ++i) {
        double r = 0.0, e = 0.0, ra = 0.0, rasc = 0.0;
        gsl_integration_qk21(&gf, pts[i], pts[i + 1], &r, &e, &ra, &rasc);
        magnitude += ra;
    }
    const double floor = rel * magnitude / static_cast<double>(panels);
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(limit);
    double total = 0.0;
    for (size_t i = 0; i < panels; ++i) {
        double result = 0.0, err = 0.0;
        gsl_integration_qag(&gf, pts[i], pts[i + 1], floor, rel, limit, GSL_INTEG_GAUSS21, w, &result, &err);
        total += result;
    }
    gsl_integration_workspace_free(w);
    return total;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

cplx trapezoid_pi(cplx qz, double k, double length, int n)
{
    const double h = length / n;
    std::vector<cplx> left(n + 1), right(n + 1), lag(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double z = -0.5 * length + i * h;
        const double w = (i == 0 || i == n) ? 0.5 * h : h;
        left[i] = w * std::exp(-I * (k * z));
        right[i] = w * std::exp(I * (k * z));
        lag[i] = std::exp(I * qz * (i * h));
    }
    cplx sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        cplx row = 0.0;
        for (int j = 0; j <= n; ++j)
            row += right[j] * lag[std::abs(i - j)];
        sum += left[i] * row;
    }
    return sum / (qz * length * length);
}

}  // namespace

cplx oracle_pi_trapezoid(cplx qz, double omega, double length, double group_index, int grid_n)
{
    if (grid_n < 2)
        throw std::invalid_argument("oracle_pi: grid too small");
    return trapezoid_pi(qz, omega * group_index / phys.c, length, grid_n);
}

cplx oracle_pi(cplx qz, double omega, double length, double group_index, int grid_n)
{
    if (grid_n < 200)
        throw std::invalid_argument("oracle_pi: need at least 200 grid points");
    const double k = omega * group_index / phys.c;
    const cplx t1 = trapezoid_pi(qz, k, length, grid_n);
    const cplx t2 = trapezoid_pi(qz, k, length, 2 * grid_n);
    const cplx t4 = trapezoid_pi(qz, k, length, 4 * grid_n);
    // Romberg: the product rule has an even error expansion in h
    const cplx r1 = (4.0 * t2 - t1) / 3.0, r2 = (4.0 * t4 - t2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

cplx oracle_cartesian_q(double omega, double separation, const ExperimentConfig& cfg_in, double rel_tol)
{
    ExperimentConfig cfg = cfg_in;
    cfg.filter = filter::Full{};  // the kernel itself does not depend on the filter
    const cplx n = cfg.material.refractive_index(omega);
    const double qr = (n * omega / phys.c).real();
    const double qmax = 2.0 / cfg.beam_waist * std::sqrt(std::log(1e12));
    const double sep = std::abs(separation);
    const double L = cfg.crystal_length;

    auto inner = [&](double qx, bool imag_part) {
        std::vector<double> br;
        if (qx < qr)
            br.push_back(std::sqrt(qr * qr - qx * qx));
        const int panels = 64;
        for (int i = 1; i < panels; ++i)
            br.push_back(qmax * i / panels);
        auto f = [&](double qy) {
            const cplx v = transverse_kernel(qx, qy, omega, cfg) * std::cos(qy * sep);
            return imag_part ? v.imag() : v.real();
        };
        return gsl_quad(f, 0.0, qmax, br, rel_tol);
    };
    std::vector<double> br{qr};
    const int panels = std::max(16, static_cast<int>(std::ceil(qmax * L / (2.0 * pi) / 4.0)));
    for (int i = 1; i < panels; ++i)
        br.push_back(qmax * i / panels);
    const double re = gsl_quad([&](double qx) { return inner(qx, false); }, 0.0, qmax, br, rel_tol);
    const double im = gsl_quad([&](double qx) { return inner(qx, true); }, 0.0, qmax, br, rel_tol);
    // four quadrants; the kernel is even in q_x and q_y and the sine part cancels
    return 4.0 * cplx{re, im};
}

double oracle_autocorrelation(const SpectralFilter& filt, double pulse_duration, double omega_c, double omega,
                              int grid_n)
{
    const double t = pulse_duration;
    auto spectrum = [&](double w) {
        const double d = std::abs(w) - omega_c;
        return std::exp(-t * t * d * d / 4.0);
    };
    if (auto m = std::get_if<filter::Monochromatic>(&filt))
        return spectrum(m->omega_d + omega) / spectrum(m->omega_d);
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    if (auto b = std::get_if<filter::Band>(&filt)) {
        lo = b->omega_min;
        hi = b->omega_max;
    }
    if (grid_n % 2 == 0)
        ++grid_n;
    auto simpson = [&](double shift) {
        const double reach = 40.0 / t;
        const double centre = omega_c - 0.5 * shift;
        const double a = std::max(lo, centre - reach), b = std::min(hi, centre + reach);
        if (!(a < b))
            return 0.0;
        const double h = (b - a) / (grid_n - 1);
        double s = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            const double w = a + i * h;
            const double c = (i == 0 || i == grid_n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += c * spectrum(w) * spectrum(w + shift);
        }
        return s * h / 3.0;
    };
    return simpson(omega) / simpson(0.0);
}

cplx oracle_classical_overlap(const ExperimentConfig& cfg, const ClassicalWaveform& waveform, int pulse_index,
                              int nodes)
{
    const double w = cfg.beam_waist, t = cfg.pulse_duration, L = cfg.crystal_length;
    const double y0 = pulse_index == 2 ? cfg.beam_separation : 0.0;
    const double t0 = pulse_index == 2 ? cfg.time_delay : 0.0;
    gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(static_cast<size_t>(nodes));
    std::vector<double> xs(nodes), ws(nodes);
    for (int i = 0; i < nodes; ++i)
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &xs[i], &ws[i], tab);
    gsl_integration_glfixed_table_free(tab);

    // normalised squared envelope: ∫d²r dt = 1 on every slice, averaged over z
    const double norm = (2.0 / (pi * w * w)) * std::sqrt(2.0 / pi) / t / L;
    const double rx = 3.5 * w, rt = 3.5 * t;
    double total = 0.0;
    for (int iz = 0; iz < nodes; ++iz) {
        const double z = 0.5 * L * xs[iz], wz = 0.5 * L * ws[iz];
        const double tc = t0 + cfg.group_index * z / phys.c;
        for (int it = 0; it < nodes; ++it) {
            const double tt = tc + rt * xs[it], wt = rt * ws[it];
            const double et = std::exp(-2.0 * (tt - tc) * (tt - tc) / (t * t));
            for (int ix = 0; ix < nodes; ++ix) {
                const double x = rx * xs[ix], wx = rx * ws[ix];
                for (int iy = 0; iy < nodes; ++iy) {
                    const double y = y0 + rx * xs[iy], wy = rx * ws[iy];
                    const double r2 = x * x + (y - y0) * (y - y0);
                    const double env = norm * std::exp(-2.0 * r2 / (w * w)) * et;
                    double field = 0.0;
                    for (const auto& c : waveform.components)
                        field += c.amplitude * std::cos(c.kx * x + c.ky * y + c.kz * z - c.omega * tt + c.phase);
                    total += wz * wt * wx * wy * 0.5 * env * field;
                }
            }
        }
    }
    return -total;
}

cplx oracle_exchange_self(const ExperimentConfig& cfg, double rel_tol)
{
    if (!std::holds_alternative<filter::Full>(cfg.filter))
        throw std::invalid_argument("oracle_exchange_self: unfiltered pulses only");
    const double t = cfg.pulse_duration;
    const double hi = 2.0 / t * std::sqrt(std::log(1e14));
    std::vector<double> br = cfg.material.resonance_breakpoints();
    for (int i = 1; i < 24; ++i)
        br.push_back(hi * i / 24.0);
    auto weight = [&](double om) {
        // f(Ω) f(-Ω) = e^{-τ²Ω²/4} for unfiltered pulses, plus the thermal term
        double wv = std::exp(-t * t * om * om / 4.0);
        double wt = 0.0;
        if (cfg.temperature > 0.0) {
            const double x = phys.hbar * om / (phys.kB * cfg.temperature);
            wt = x > 700.0 ? 0.0 : 2.0 * wv / std::expm1(x);
        }
        return std::pair{wv, wt};
    };
    const double qmax = 2.0 / cfg.beam_waist * std::sqrt(std::log(1e12));
    auto radial = [&](double om) {
        const cplx n = cfg.material.refractive_index(om);
        const double qr = (n * om / phys.c).real();
        std::vector<double> qb{qr};
        const int panels = std::max(16, static_cast<int>(std::ceil(qmax * cfg.crystal_length / (2.0 * pi) / 2.0)));
        for (int i = 1; i < panels; ++i)
            qb.push_back(qmax * i / panels);
        auto re = [&](double q) { return angular_reduced_kernel(q, om, 0.0, cfg).real(); };
        auto im = [&](double q) { return angular_reduced_kernel(q, om, 0.0, cfg).imag(); };
        return cplx{gsl_quad(re, 0.0, qmax, qb, rel_tol * 0.01), gsl_quad(im, 0.0, qmax, qb, rel_tol * 0.01)};
    };
    auto part = [&](bool imag_part) {
        auto f = [&](double om) {
            const cplx s = radial(om);
            const auto [wv, wt] = weight(om);
            const cplx v = wv * s + wt * s.real();
            return imag_part ? v.imag() : v.real();
        };
        return gsl_quad(f, 0.0, hi, br, rel_tol);
    };
    const double pre = element_prefactor(cfg);
    return pre / 4.0 / std::sqrt(2.0) * cplx{part(false), part(true)};
}

double oracle_bessel(int order, double x)
{
    std::function<double(double)> f = [&](double phi) { return std::cos(order * phi - x * std::sin(phi)) / pi; };
    std::vector<double> br;
    const int panels = 8 + static_cast<int>(x);
    for (int i = 1; i < panels; ++i)
        br.push_back(pi * i / panels);
    return gsl_quad(f, 0.0, pi, br, 1e-14);
}

double oracle_shot_noise_removed(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d)
{
    if (beam != 1 && beam != 2)
        throw std::invalid_argument("beam index must be 1 or 2");
    constexpr int basis[6][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
    // single-mode reduced state, photon numbers 0..2
    Eigen::Matrix3cd red = Eigen::Matrix3cd::Zero();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const int ni = basis[i][beam - 1], nj = basis[j][beam - 1];
            const int oi = basis[i][2 - beam], oj = basis[j][2 - beam];
            if (oi == oj)
                red(ni, nj) += state(i, j);
        }
    constexpr int D = 5;
    using M = Eigen::MatrixXcd;
    M a1 = M::Zero(D, D);
    for (int k = 1; k < D; ++k)
        a1(k - 1, k) = std::sqrt(static_cast<double>(k));
    const M id = M::Identity(D, D);
    auto kron = [](const M& x, const M& y) {
        M r(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                r.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return r;
    };
    M sig = M::Zero(D, D);
    sig.topLeftCorner(3, 3) = red;
    M anc = M::Zero(D, D);
    anc(0, 0) = 1.0;
    const M rho = kron(sig, anc);
    const M a = kron(a1, id), v = kron(id, a1);
    const cplx T = 1.0 / std::sqrt(2.0), R = I / std::sqrt(2.0);
    const M aT = T * a + R * v, aR = R * a + T * v;
    auto S = [&](const M& op, cplx J, cplx P) -> M {
        return std::sqrt(n_d) * (I * std::conj(J) * P * op - I * J * std::conj(P) * M(op.adjoint()));
    };
    const M sT = S(aT, T, p_t), sR = S(aR, R, p_r);
    const cplx joint = (rho * sT * sR).trace();
    const cplx mT = (rho * sT).trace(), mR = (rho * sR).trace();
    return ((joint - mT * mR) / (std::norm(R) * std::norm(T) * n_d * n_d)).real();
}

std::vector<OracleReport> run_verification_suite(const ExperimentConfig& cfg, int threads)
{
    gsl_set_error_handler_off();
    using Item = std::function<std::vector<OracleReport>()>;
    std::vector<Item> items;

    items.push_back([] {
        std::vector<OracleReport> out;
        const double L = 1e-3, ng = 3.18;
        const cplx qzl[] = {{0.3, 0.05}, {1.0, 0.1}, {3.0, 0.2}, {10.0, 0.5}, {30.0, 1.0}};
        const double kl[] = {0.1, 0.5, 2.0, 8.0, 25.0};
        for (cplx q : qzl)
            for (double k : kl) {
                const double om = k / L * phys.c / ng;
                const cplx qz = q / L;
                out.push_back(make_report("pi_grid qzL=" + std::to_string(q.real()) + " kL=" + std::to_string(k),
                                          oracle_pi(qz, om, L, ng), propagation_factor(qz, om, L, ng), 1e-6));
            }
        const double om = 0.5 / L * phys.c / ng;
        const cplx qz = (0.5 + 1e-6) / L;
        out.push_back(make_report("pi_near_resonance", oracle_pi(qz, om, L, ng), propagation_factor(qz, om, L, ng), 1e-6));
        return out;
    });

    for (double mult : {0.0, 5.0, 10.0}) {
        items.push_back([&cfg, mult] {
            std::vector<OracleReport> out;
            for (double nu : {1.0, 2.5}) {
                ExperimentConfig c = cfg;
                c.beam_separation = mult * cfg.beam_waist;
                const double om = nu * thz;
                const cplx fast = transverse_integrals(c, om)[1];
                const cplx ref = oracle_cartesian_q(om, c.beam_separation, c, 1e-7);
                out.push_back(make_report("cartesian_q dr=" + std::to_string(static_cast<int>(mult)) +
                                              "w nu=" + std::to_string(nu) + "THz",
                                          ref, fast, 1e-4));
            }
            return out;
        });
    }

    items.push_back([&cfg] {
        std::vector<OracleReport> out;
        const double s = sigma_omega(cfg);
        for (double om : {-2.0 * s, 0.5 * s, 3.0 * s}) {
            ExperimentConfig full = cfg;
            full.filter = filter::Full{};
            out.push_back(make_report("autocorrelation_full W=" + std::to_string(om / s) + "sigma",
                                      oracle_autocorrelation(full.filter, cfg.pulse_duration, cfg.central_frequency, om),
                                      spectral_autocorrelation(full, om), 1e-8));
            ExperimentConfig band = cfg;
            band.filter = filter::Band{cfg.central_frequency + 3.0 * s, std::numeric_limits<double>::infinity()};
            out.push_back(make_report("autocorrelation_band W=" + std::to_string(om / s) + "sigma",
                                      spectral_autocorrelation_closed(band, om), spectral_autocorrelation(band, om),
                                      1e-8, "erfc closed form vs numeric"));
            out.push_back(make_report("autocorrelation_band_grid W=" + std::to_string(om / s) + "sigma",
                                      oracle_autocorrelation(band.filter, cfg.pulse_duration, cfg.central_frequency, om),
                                      spectral_autocorrelation(band, om), 1e-8));
        }
        return out;
    });

    items.push_back([&cfg] {
        std::vector<OracleReport> out;
        ExperimentConfig c = cfg;
        c.filter = filter::Full{};
        c.crystal_length = 0.2e-3;
        c.beam_separation = 0.7 * c.beam_waist;
        c.time_delay = 40e-15;
        ClassicalWaveform wf;
        wf.components.push_back({1.0e3, 0.0, 1.2e5, 3.0e4, 1.5 * thz, 0.3});
        wf.components.push_back({0.4e3, 0.8e5, -0.5e5, 6.0e4, 2.2 * thz, -1.1});
        for (int i = 1; i <= 2; ++i)
            out.push_back(make_report("classical_overlap pulse " + std::to_string(i), oracle_classical_overlap(c, wf, i),
                                      classical_overlap(c, wf, i), 1e-4));
        return out;
    });

    items.push_back([] {
        std::vector<OracleReport> out;
        for (double x : {0.5, 1.0, 5.0, 20.0})
            for (int n : {0, 2})
                out.push_back(make_report("bessel J" + std::to_string(n) + "(" + std::to_string(x) + ")",
                                          oracle_bessel(n, x), bessel_j(n, x), 1e-10 / std::max(1e-3, std::abs(oracle_bessel(n, x))),
                                          "absolute 1e-10"));
        return out;
    });

    items.push_back([&cfg] {
        ExperimentConfig c = cfg;
        c.filter = filter::Full{};
        c.temperature = 0.0;
        return std::vector<OracleReport>{
            make_report("exchange_self vs direct", oracle_exchange_self(c), exchange_self(c), 1e-4)};
    });

    items.push_back([&cfg] {
        std::vector<OracleReport> out;
        for (double mult : {0.0, 5.0, 10.0}) {
            for (bool high_pass : {false, true}) {
                ExperimentConfig c = cfg;
                c.beam_separation = mult * cfg.beam_waist;
                if (high_pass)
                    c.filter = filter::Band{cfg.central_frequency + 3.0 * sigma_omega(cfg),
                                            std::numeric_limits<double>::infinity()};
                const ProbeMatrixElements e = thermal_elements(c);
                const ProbeState st = assemble_state(e);
                const double scale = std::max({std::abs(e.l11), std::abs(e.l12), std::abs(e.m), std::abs(e.k11)});
                const double tol = std::max(1e-10, 10.0 * scale * scale);
                const double closed = negativity(e).negativity, oracle = negativity_oracle(st);
                OracleReport r = make_report(std::string("negativity_closed_vs_pt dr=") + std::to_string(static_cast<int>(mult)) +
                                                 "w" + (high_pass ? " high-pass" : ""),
                                             oracle, closed, 0.0);
                r.rel_error = std::abs(closed - oracle);
                r.threshold = tol;
                r.pass = r.rel_error <= tol;
                r.note = "absolute difference";
                out.push_back(r);
                const double herm = (st - st.adjoint()).cwiseAbs().maxCoeff();
                const double tr = std::abs(st.trace() - 1.0);
                OracleReport s = make_report("state_sanity dr=" + std::to_string(static_cast<int>(mult)) + "w" +
                                                 (high_pass ? " high-pass" : ""),
                                             1.0, 1.0 + std::max(herm, tr), 1e-12, "trace and hermiticity");
                out.push_back(s);
            }
        }
        return out;
    });

    items.push_back([&cfg] {
        std::vector<OracleReport> out;
        for (double mult : {0.0, 5.0, 10.0}) {
            ExperimentConfig c = cfg;
            c.beam_separation = mult * cfg.beam_waist;
            c.temperature = 0.0;
            const double vac = negativity(vacuum_elements(c)).negativity;
            double prev = std::numeric_limits<double>::infinity();
            bool ok = true;
            std::string trace;
            for (double T : {0.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
                c.temperature = T;
                const double n = negativity(thermal_elements(c)).negativity;
                trace += sci(n) + " ";
                if (n > prev + 1e-12 * std::abs(prev) || (T == 0.0 && std::abs(n - vac) > 1e-12))
                    ok = false;
                prev = n;
            }
            OracleReport r;
            r.name = "thermal_monotonicity dr=" + std::to_string(static_cast<int>(mult)) + "w";
            r.pass = ok;
            r.note = "N(T): " + trace;
            out.push_back(r);
        }
        return out;
    });

    items.push_back([] {
        std::vector<OracleReport> out;
        ProbeMatrixElements e;
        e.l1 = {2e-3, -1e-3};
        e.l2 = {-1e-3, 5e-4};
        e.l11 = 3e-3;
        e.l22 = 2e-3;
        e.l12 = {4e-4, 1e-4};
        e.m = {1e-3, -2e-3};
        e.k11 = {5e-4, 5e-4};
        e.k22 = {-3e-4, 1e-4};
        e.x = x_fourth_order(e);
        const ProbeState st = assemble_state(e);
        const cplx pr = std::exp(I * 0.4), pt = std::exp(-I * 1.3);
        for (int beam = 1; beam <= 2; ++beam)
            out.push_back(make_report("shot_noise_removed beam " + std::to_string(beam),
                                      oracle_shot_noise_removed(st, beam, pr, pt, 2.0),
                                      shot_noise_removed_connected(st, beam, pr, pt, 2.0), 1e-10));
        return out;
    });

    std::vector<std::vector<OracleReport>> results(items.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const size_t workers = threads > 0 ? static_cast<size_t>(threads) : hw;
    std::vector<std::future<void>> pending;
    size_t next = 0;
    auto run = [&](size_t i) {
        try {
            results[i] = items[i]();
        } catch (const std::exception& ex) {
            OracleReport r;
            r.name = "item " + std::to_string(i);
            r.pass = false;
            r.note = std::string("exception: ") + ex.what();
            results[i] = {r};
        }
    };
    while (next < items.size()) {
        pending.clear();
        for (size_t k = 0; k < workers && next < items.size(); ++k, ++next)
            pending.push_back(std::async(std::launch::async, run, next));
        for (auto& f : pending)
            f.get();
    }
    std::vector<OracleReport> out;
    for (auto& r : results)
        out.insert(out.end(), r.begin(), r.end());
    std::stable_sort(out.begin(), out.end(), [](const OracleReport& a, const OracleReport& b) { return a.name < b.name; });
    return out;
}

}  // namespace eos
