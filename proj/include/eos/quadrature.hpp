#ifndef EOS_QUADRATURE_HPP
#define EOS_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "eos/constants.hpp"

namespace eos {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationResult {
    cplx value{};
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

struct QuadOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-14;
    int max_intervals = 4000;
    // components sharing nodes may also stop once their error is below
    // cross_rel times the largest component (0 disables)
    double cross_rel = 0.0;
};

// Component access for the value types the integrator understands:
// double, cplx, and fixed arrays of cplx (several integrals sharing nodes).
template <class V>
struct QuadTraits;

template <>
struct QuadTraits<double> {
    static constexpr int size = 1;
    static double abs(const double& v, int) { return std::abs(v); }
    static double zero() { return 0.0; }
};

template <>
struct QuadTraits<cplx> {
    static constexpr int size = 1;
    static double abs(const cplx& v, int) { return std::abs(v); }
    static cplx zero() { return {}; }
};

template <size_t N>
struct QuadTraits<std::array<cplx, N>> {
    static constexpr int size = static_cast<int>(N);
    static double abs(const std::array<cplx, N>& v, int k) { return std::abs(v[k]); }
    static std::array<cplx, N> zero() { return {}; }
};

template <size_t N>
std::array<cplx, N> operator+(std::array<cplx, N> a, const std::array<cplx, N>& b)
{
    for (size_t i = 0; i < N; ++i)
        a[i] += b[i];
    return a;
}

template <size_t N>
std::array<cplx, N> operator-(std::array<cplx, N> a, const std::array<cplx, N>& b)
{
    for (size_t i = 0; i < N; ++i)
        a[i] -= b[i];
    return a;
}

template <size_t N>
std::array<cplx, N> operator*(double s, std::array<cplx, N> a)
{
    for (auto& x : a)
        x *= s;
    return a;
}

template <class V>
struct AdaptiveResult {
    V value{};
    std::array<double, 16> error{};  // per component, first QuadTraits<V>::size used
    long evaluations = 0;
    bool converged = true;
    double max_error() const { return *std::max_element(error.begin(), error.end()); }
};

namespace gk21 {
// 21-point Kronrod extension of the 10-point Gauss rule (abscissae on [0,1] half)
inline constexpr std::array<double, 11> xk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> wk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod abscissae 1,3,5,7,9
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};
}  // namespace gk21

template <class V>
struct Segment {
    double a, b;
    V value;
    std::array<double, 16> err;
};

template <class V, class F>
Segment<V> gk21_segment(F& f, double a, double b)
{
    using T = QuadTraits<V>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V fc = f(c);
    V resk = gk21::wk[10] * fc;
    V resg = T::zero();
    std::array<V, 10> f1, f2;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * gk21::xk[j];
        f1[j] = f(c - dx);
        f2[j] = f(c + dx);
        resk = resk + gk21::wk[j] * (f1[j] + f2[j]);
        if (j % 2 == 1)
            resg = resg + gk21::wg[j / 2] * (f1[j] + f2[j]);
    }
    Segment<V> s{a, b, h * resk, {}};
    const V diff = h * (resk - resg);
    for (int k = 0; k < T::size; ++k) {
        const double mean = T::abs(resk, k) * 0.5;
        double resasc = gk21::wk[10] * std::abs(T::abs(fc, k) - mean);
        double resabs = gk21::wk[10] * T::abs(fc, k);
        for (int j = 0; j < 10; ++j) {
            resasc += gk21::wk[j] * (std::abs(T::abs(f1[j], k) - mean) + std::abs(T::abs(f2[j], k) - mean));
            resabs += gk21::wk[j] * (T::abs(f1[j], k) + T::abs(f2[j], k));
        }
        resasc *= std::abs(h);
        resabs *= std::abs(h);
        double e = T::abs(diff, k);
        if (resasc != 0.0 && e != 0.0)
            e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
        const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
        s.err[k] = std::max(e, floor);
    }
    return s;
}

// Global adaptive Gauss-Kronrod (21 point) integration on [a, b].
// `breaks` seeds the initial partition (points outside (a, b) are ignored).
// A component is converged when err_k <= max(rel_tol |I_k|, abs_tol, cross_rel max_j |I_j|).
template <class V, class F>
AdaptiveResult<V> integrate_adaptive_v(F&& f, double a, double b, const QuadOptions& opt,
                                       std::vector<double> breaks = {})
{
    using T = QuadTraits<V>;
    static_assert(T::size <= 16, "too many components");
    if (!(a < b))
        throw std::invalid_argument("integrate_adaptive: need a < b");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
        throw std::invalid_argument("integrate_adaptive: tolerances must be positive");

    long evals = 0;
    auto counted = [&](double x) {
        ++evals;
        return f(x);
    };

    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > a && x < b && x > pts.back())
            pts.push_back(x);
    pts.push_back(b);

    std::vector<Segment<V>> segs;
    segs.reserve(pts.size() * 4);
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        segs.push_back(gk21_segment<V>(counted, pts[i], pts[i + 1]));

    AdaptiveResult<V> out;
    while (true) {
        // totals are re-summed in a fixed order so results are reproducible
        V total = T::zero();
        std::array<double, 16> err{};
        for (const auto& s : segs) {
            total = total + s.value;
            for (int k = 0; k < T::size; ++k)
                err[k] += s.err[k];
        }
        std::array<double, 16> tol{};
        bool done = true;
        double largest = 0.0;
        for (int k = 0; k < T::size; ++k)
            largest = std::max(largest, T::abs(total, k));
        for (int k = 0; k < T::size; ++k) {
            tol[k] = std::max({opt.rel_tol * T::abs(total, k), opt.abs_tol, opt.cross_rel * largest});
            if (err[k] > tol[k])
                done = false;
        }
        out.value = total;
        out.error = err;
        if (done)
            break;
        if (static_cast<int>(segs.size()) >= opt.max_intervals) {
            out.converged = false;
            break;
        }
        size_t worst = 0;
        double worst_score = -1.0;
        for (size_t i = 0; i < segs.size(); ++i) {
            double score = 0.0;
            for (int k = 0; k < T::size; ++k)
                if (err[k] > tol[k])
                    score = std::max(score, segs[i].err[k] / tol[k]);
            if (score > worst_score) {
                worst_score = score;
                worst = i;
            }
        }
        const double a0 = segs[worst].a, b0 = segs[worst].b, mid = 0.5 * (a0 + b0);
        if (!(mid > a0 && mid < b0)) {
            out.converged = false;
            break;
        }
        segs[worst] = gk21_segment<V>(counted, a0, mid);
        segs.insert(segs.begin() + static_cast<long>(worst) + 1, gk21_segment<V>(counted, mid, b0));
    }
    out.evaluations = evals;
    return out;
}

// Breakpoints that give every initial panel at least `nodes_per_period`
// nodes per oscillation of the given period.
std::vector<double> oscillation_breaks(double a, double b, double period_hint, int nodes_per_period);

template <class V, class F>
AdaptiveResult<V> oscillation_panels_v(F&& f, double a, double b, double period_hint, int nodes_per_period,
                                       const QuadOptions& opt, std::vector<double> extra_breaks = {})
{
    if (!(period_hint > 0.0))
        throw std::invalid_argument("oscillation_panels: period_hint must be > 0");
    auto br = oscillation_breaks(a, b, period_hint, nodes_per_period);
    br.insert(br.end(), extra_breaks.begin(), extra_breaks.end());
    QuadOptions o = opt;
    o.max_intervals = std::max<int>(opt.max_intervals, static_cast<int>(br.size()) * 8 + 64);
    return integrate_adaptive_v<V>(std::forward<F>(f), a, b, o, std::move(br));
}

using ComplexIntegrand = std::function<cplx(double)>;

IntegrationResult integrate_adaptive(const ComplexIntegrand& f, double a, double b, double rel_tol = 1e-6,
                                     double abs_tol = 1e-14);
IntegrationResult oscillation_panels(const ComplexIntegrand& f, double a, double b, double period_hint,
                                     int nodes_per_period = 10, double rel_tol = 1e-6, double abs_tol = 1e-14);

// J_0 and J_2 for x >= 0
double bessel_j(int order, double x);

}  // namespace eos

#endif
