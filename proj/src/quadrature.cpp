#include "eos/quadrature.hpp"

#include <cmath>

namespace eos {

std::vector<double> oscillation_breaks(double a, double b, double period_hint, int nodes_per_period)
{
    if (nodes_per_period < 1)
        throw std::invalid_argument("oscillation_panels: nodes_per_period must be >= 1");
    std::vector<double> br;
    if (!std::isfinite(period_hint) || period_hint >= (b - a))
        return br;
    const double width = 21.0 * period_hint / nodes_per_period;
    const auto n = static_cast<long>(std::ceil((b - a) / width));
    for (long i = 1; i < n; ++i)
        br.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    return br;
}

IntegrationResult integrate_adaptive(const ComplexIntegrand& f, double a, double b, double rel_tol, double abs_tol)
{
    QuadOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    auto r = integrate_adaptive_v<cplx>(f, a, b, o);
    return {r.value, r.error[0], r.evaluations, r.converged};
}

IntegrationResult oscillation_panels(const ComplexIntegrand& f, double a, double b, double period_hint,
                                     int nodes_per_period, double rel_tol, double abs_tol)
{
    QuadOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    auto r = oscillation_panels_v<cplx>(f, a, b, period_hint, nodes_per_period, o);
    return {r.value, r.error[0], r.evaluations, r.converged};
}

double bessel_j(int order, double x)
{
    if (order != 0 && order != 2)
        throw std::invalid_argument("bessel_j: only orders 0 and 2 are provided");
    if (!(x >= 0.0))
        throw std::domain_error("bessel_j: x must be >= 0");
    return std::cyl_bessel_j(static_cast<double>(order), x);
}

}  // namespace eos
