#ifndef EOS_MATERIALS_HPP
#define EOS_MATERIALS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "eos/constants.hpp"

namespace eos {

struct MaterialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Oscillator {
    double omega_to = 0.0;  // rad/s
    double omega_lo = 0.0;  // rad/s
    double gamma = 0.0;     // rad/s
};

class PermittivityModel {
public:
    enum class Kind { Constant, Lorentz };

    static PermittivityModel constant(cplx eps);
    static PermittivityModel lorentz(double eps_inf, std::vector<Oscillator> oscillators);

    Kind kind() const { return kind_; }
    cplx constant_value() const { return eps_const_; }
    double eps_inf() const { return eps_inf_; }
    const std::vector<Oscillator>& oscillators() const { return osc_; }

    // throws MaterialError on a lossless pole hit
    cplx permittivity(double omega) const;
    cplx refractive_index(double omega) const;

    // frequencies where the integrators should break intervals (ω_TO ± 3γ, ω_TO)
    std::vector<double> resonance_breakpoints() const;

private:
    Kind kind_ = Kind::Constant;
    cplx eps_const_{1.0, 0.0};
    double eps_inf_ = 1.0;
    std::vector<Oscillator> osc_;
};

cplx permittivity(const PermittivityModel& model, double omega);
cplx refractive_index(const PermittivityModel& model, double omega);

// principal root with Im ≥ 0; on the negative real axis returns +i|.|^{1/2}
cplx sqrt_upper(cplx z);

PermittivityModel parse_material(const std::string& text);
PermittivityModel load_material(const std::string& path);
std::string serialize_material(const PermittivityModel& model);

}  // namespace eos

#endif
