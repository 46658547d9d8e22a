#include "eos/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "eos/kernels.hpp"

namespace eos {

namespace {

// two modes with 0..3 photons each: quadratic operators never leave this space
// when they act on states of the six-dimensional basis
constexpr int kLevels = 4;
constexpr int kDim = kLevels * kLevels;
using Big = Eigen::Matrix<cplx, kDim, kDim>;

int fock(int n1, int n2) { return n1 * kLevels + n2; }

constexpr int kBasis[6][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};

Big embed(const ProbeState& s)
{
    Big r = Big::Zero();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            r(fock(kBasis[i][0], kBasis[i][1]), fock(kBasis[j][0], kBasis[j][1])) = s(i, j);
    return r;
}

Big make_lowering(int beam)
{
    Big a = Big::Zero();
    for (int n1 = 0; n1 < kLevels; ++n1)
        for (int n2 = 0; n2 < kLevels; ++n2) {
            if (beam == 1 && n1 > 0)
                a(fock(n1 - 1, n2), fock(n1, n2)) = std::sqrt(static_cast<double>(n1));
            if (beam == 2 && n2 > 0)
                a(fock(n1, n2 - 1), fock(n1, n2)) = std::sqrt(static_cast<double>(n2));
        }
    return a;
}

const Big& lowering(int beam)
{
    static const Big a1 = make_lowering(1);
    static const Big a2 = make_lowering(2);
    if (beam == 1)
        return a1;
    if (beam == 2)
        return a2;
    throw std::invalid_argument("beam index must be 1 or 2");
}

cplx expect(const Big& rho, const Big& op) { return (rho * op).trace(); }

// S = √N_d (i P a − i P* a†)
Big signal(int beam, cplx p, double n_d)
{
    const Big& a = lowering(beam);
    return std::sqrt(n_d) * (I * p * a - I * std::conj(p) * Big(a.adjoint()));
}

void check_nd(double n_d)
{
    if (!(n_d > 0.0))
        throw std::domain_error("photon number N_d must be > 0");
}

}  // namespace

NegativityReport negativity(const ProbeMatrixElements& e)
{
    NegativityReport r;
    r.m_bar = e.m - e.l1 * e.l2;
    r.l11_bar = e.l11 - std::norm(e.l1);
    const double am = std::abs(r.m_bar);
    r.e1 = am - r.l11_bar;
    r.negativity = std::max(0.0, r.e1);
    r.phi_m = am > 0.0 ? r.m_bar.real() / am : 0.0;
    return r;
}

double negativity_oracle(const ProbeState& state)
{
    const Big rho = embed(state);
    Big pt = Big::Zero();
    for (int n1 = 0; n1 < kLevels; ++n1)
        for (int n2 = 0; n2 < kLevels; ++n2)
            for (int m1 = 0; m1 < kLevels; ++m1)
                for (int m2 = 0; m2 < kLevels; ++m2)
                    pt(fock(n1, n2), fock(m1, m2)) = rho(fock(n1, m2), fock(m1, n2));
    Eigen::SelfAdjointEigenSolver<Big> es(pt, Eigen::EigenvaluesOnly);
    double n = 0.0;
    for (int i = 0; i < kDim; ++i)
        if (es.eigenvalues()(i) < 0.0)
            n -= es.eigenvalues()(i);
    return n;
}

double witness_expectation(const ProbeMatrixElements& e) { return e.l11 - std::abs(e.m); }

ModeMoments mode_moments(const ProbeState& state, int beam)
{
    const Big rho = embed(state);
    const Big& a = lowering(beam);
    ModeMoments m;
    m.a = expect(rho, a);
    m.aa = expect(rho, a * a);
    m.ada = expect(rho, Big(a.adjoint()) * a).real();
    return m;
}

cplx pair_moment(const ProbeState& state, bool dagger_first)
{
    const Big rho = embed(state);
    const Big& a1 = lowering(1);
    const Big& a2 = lowering(2);
    return dagger_first ? expect(rho, Big(a1.adjoint()) * a2) : expect(rho, a1 * a2);
}

double two_beam_correlation(const ProbeState& state, cplx p1, cplx p2, double n_d)
{
    check_nd(n_d);
    const Big rho = embed(state);
    const Big s1 = signal(1, p1, n_d), s2 = signal(2, p2, n_d);
    const cplx joint = expect(rho, s1 * s2);
    const cplx m1 = expect(rho, s1), m2 = expect(rho, s2);
    return (joint - m1 * m2).real() / (n_d * n_d);
}

double two_beam_correlation(const ProbeState& state, const WavePlateSetting& t1, const WavePlateSetting& t2,
                            double n_d)
{
    return two_beam_correlation(state, ellipsometry_phase(t1), ellipsometry_phase(t2), n_d);
}

double single_beam_variance(const ProbeState& state, int beam, cplx p, double n_d)
{
    check_nd(n_d);
    const Big rho = embed(state);
    const Big s = signal(beam, p, n_d);
    return expect(rho, s * s).real();
}

double single_beam_variance(const ProbeState& state, int beam, const WavePlateSetting& t, double n_d)
{
    return single_beam_variance(state, beam, ellipsometry_phase(t), n_d);
}

double shot_noise_removed(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d)
{
    check_nd(n_d);
    const ModeMoments m = mode_moments(state, beam);
    return 2.0 * (std::conj(p_r) * p_t * m.ada - p_r * p_t * m.aa).real() / n_d;
}

double shot_noise_removed(const ProbeState& state, int beam, const WavePlateSetting& reflected,
                          const WavePlateSetting& transmitted, double n_d)
{
    return shot_noise_removed(state, beam, ellipsometry_phase(reflected), ellipsometry_phase(transmitted), n_d);
}

double shot_noise_removed_connected(const ProbeState& state, int beam, cplx p_r, cplx p_t, double n_d)
{
    const ModeMoments m = mode_moments(state, beam);
    return shot_noise_removed(state, beam, p_r, p_t, n_d) - 4.0 * (p_r * m.a).imag() * (p_t * m.a).imag() / n_d;
}

double mean_signal(const ProbeMatrixElements& e, int beam)
{
    if (beam != 1 && beam != 2)
        throw std::invalid_argument("beam index must be 1 or 2");
    return 2.0 * (beam == 1 ? e.l1 : e.l2).real();
}

WitnessBudget witness_budget(const ProbeMatrixElements& e, double n_d)
{
    check_nd(n_d);
    if (!(std::abs(e.m) > 0.0))
        throw std::domain_error("witness: |m| = 0, the phase of m is undefined");
    const double phi = std::arg(e.m);
    const ProbeState rho = state_matrix(e);

    WitnessBudget b;
    // settings from the partial-transpose construction: P² must carry e^{-iφ}
    const cplx p = std::exp(-I * (phi / 2.0));
    b.theta = invert_phase(p);
    b.theta_prime = invert_phase(I * p);
    const cplx pt = ellipsometry_phase(b.theta), ptp = ellipsometry_phase(b.theta_prime);
    b.g_theta = two_beam_correlation(rho, pt, pt, n_d);
    b.g_theta_prime = two_beam_correlation(rho, ptp, ptp, n_d);
    const cplx quarter = ellipsometry_phase({pi / 2, 1}), half = ellipsometry_phase({pi, 1});
    for (int beam = 1; beam <= 2; ++beam) {
        const double s = shot_noise_removed(rho, beam, quarter, quarter, n_d) + shot_noise_removed(rho, beam, half, half, n_d);
        (beam == 1 ? b.single_beam_1 : b.single_beam_2) = s;
    }
    b.combination = n_d / 4.0 * (b.g_theta - b.g_theta_prime) + n_d / 8.0 * (b.single_beam_1 + b.single_beam_2);

    const cplx q = std::exp(-I * phi);
    const double g = two_beam_correlation(rho, q, q, n_d), gp = two_beam_correlation(rho, I * q, I * q, n_d);
    b.printed_combination = n_d / 4.0 * (g - gp + b.single_beam_1 + b.single_beam_2);
    b.expectation = witness_expectation(e);
    return b;
}

double bell_correlation(const ProbeMatrixElements& e, cplx p1, cplx p2, double n_lo, bool split_denominator)
{
    if (!(n_lo > 0.0))
        throw std::domain_error("N_LO must be > 0");
    const double local = split_denominator ? e.l11 + e.l22 : e.l11;
    const double den = n_lo * n_lo + n_lo * local + e.x;
    return 2.0 * n_lo * (std::conj(p1) * p2 * e.l12 + p1 * p2 * e.m).real() / den;
}

double bell_value(const ProbeMatrixElements& e, const BellSettings& s, bool split_denominator)
{
    const cplx a = ellipsometry_phase(s.t1), ap = ellipsometry_phase(s.t1p);
    const cplx b = ellipsometry_phase(s.t2), bp = ellipsometry_phase(s.t2p);
    auto g = [&](cplx x, cplx y) { return bell_correlation(e, x, y, s.n_lo, split_denominator); };
    return std::abs(g(a, b) - g(a, bp) + g(ap, b) + g(ap, bp));
}

namespace {

struct BellProblem {
    const ProbeMatrixElements* e;
    double n_lo;
    int signs[4];
};

double angle_of(double u) { return pi + 0.5 * pi * std::sin(u); }

BellSettings settings_from(const double* u, const int* signs, double n_lo)
{
    BellSettings s;
    s.t1 = {angle_of(u[0]), signs[0]};
    s.t1p = {angle_of(u[1]), signs[1]};
    s.t2 = {angle_of(u[2]), signs[2]};
    s.t2p = {angle_of(u[3]), signs[3]};
    s.n_lo = n_lo;
    return s;
}

double bell_objective(const gsl_vector* v, void* params)
{
    const auto* p = static_cast<const BellProblem*>(params);
    double u[4];
    for (int i = 0; i < 4; ++i)
        u[i] = gsl_vector_get(v, i);
    return -bell_value(*p->e, settings_from(u, p->signs, p->n_lo));
}

}  // namespace

BellResult bell_optimize(const ProbeMatrixElements& e, double n_lo)
{
    if (!(n_lo > 0.0))
        throw std::domain_error("N_LO must be > 0");
    // coarse grid: 8 angles × 2 signs per setting
    constexpr int kAngles = 8;
    constexpr int kOpts = 2 * kAngles;
    double theta[kOpts];
    int sign[kOpts];
    cplx phase[kOpts];
    for (int k = 0; k < kOpts; ++k) {
        theta[k] = pi / 2 + pi * (k % kAngles) / (kAngles - 1);
        sign[k] = k < kAngles ? 1 : -1;
        phase[k] = ellipsometry_phase({theta[k], sign[k]});
    }
    double table[kOpts][kOpts];
    for (int i = 0; i < kOpts; ++i)
        for (int j = 0; j < kOpts; ++j)
            table[i][j] = bell_correlation(e, phase[i], phase[j], n_lo);

    // keep the best few grid cells, one per sign pattern, as simplex seeds
    struct Seed {
        double value;
        int idx[4];
    };
    std::vector<Seed> best(16, Seed{-1.0, {0, 0, 0, 0}});
    for (int a = 0; a < kOpts; ++a)
        for (int ap = 0; ap < kOpts; ++ap)
            for (int b = 0; b < kOpts; ++b)
                for (int bp = 0; bp < kOpts; ++bp) {
                    const double v = std::abs(table[a][b] - table[a][bp] + table[ap][b] + table[ap][bp]);
                    const int pattern = (sign[a] < 0) | (sign[ap] < 0) << 1 | (sign[b] < 0) << 2 | (sign[bp] < 0) << 3;
                    if (v > best[pattern].value)
                        best[pattern] = Seed{v, {a, ap, b, bp}};
                }

    BellResult out;
    out.b_max = -1.0;
    gsl_set_error_handler_off();
    const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
    for (const Seed& seed : best) {
        BellProblem prob{&e, n_lo, {sign[seed.idx[0]], sign[seed.idx[1]], sign[seed.idx[2]], sign[seed.idx[3]]}};
        gsl_vector* x = gsl_vector_alloc(4);
        gsl_vector* step = gsl_vector_alloc(4);
        for (int i = 0; i < 4; ++i) {
            // invert θ = π + (π/2) sin u on the principal branch
            const double t = theta[seed.idx[i]];
            gsl_vector_set(x, i, std::asin(std::clamp((t - pi) / (0.5 * pi), -1.0, 1.0)));
            gsl_vector_set(step, i, 0.2);
        }
        gsl_multimin_function fn{bell_objective, 4, &prob};
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(type, 4);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        for (int it = 0; it < 500; ++it) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
                break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS)
                break;
        }
        double u[4];
        for (int i = 0; i < 4; ++i)
            u[i] = gsl_vector_get(s->x, i);
        const BellSettings cand = settings_from(u, prob.signs, n_lo);
        const double v = bell_value(e, cand);
        const double start = seed.value;
        const double val = std::max(v, start);
        if (val > out.b_max) {
            out.b_max = val;
            if (v >= start) {
                out.settings = cand;
            } else {
                out.settings = BellSettings{{theta[seed.idx[0]], sign[seed.idx[0]]},
                                            {theta[seed.idx[1]], sign[seed.idx[1]]},
                                            {theta[seed.idx[2]], sign[seed.idx[2]]},
                                            {theta[seed.idx[3]], sign[seed.idx[3]]},
                                            n_lo};
            }
        }
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(x);
        gsl_vector_free(step);
    }
    out.b_split = bell_value(e, out.settings, true);
    return out;
}

}  // namespace eos
