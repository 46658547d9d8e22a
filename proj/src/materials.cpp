#include "eos/materials.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace eos {

PermittivityModel PermittivityModel::constant(cplx eps)
{
    if (eps.imag() < 0.0)
        throw MaterialError("constant permittivity must have Im eps >= 0");
    PermittivityModel m;
    m.kind_ = Kind::Constant;
    m.eps_const_ = eps;
    return m;
}

PermittivityModel PermittivityModel::lorentz(double eps_inf, std::vector<Oscillator> oscillators)
{
    if (!(eps_inf > 0.0))
        throw MaterialError("eps_inf must be positive");
    for (const auto& o : oscillators) {
        if (!(o.omega_to > 0.0) || !(o.omega_lo > 0.0))
            throw MaterialError("oscillator frequencies must be positive");
        if (!(o.gamma >= 0.0))
            throw MaterialError("oscillator damping must be non-negative");
    }
    PermittivityModel m;
    m.kind_ = Kind::Lorentz;
    m.eps_inf_ = eps_inf;
    m.osc_ = std::move(oscillators);
    return m;
}

cplx PermittivityModel::permittivity(double omega) const
{
    if (kind_ == Kind::Constant)
        return eps_const_;
    cplx sum = 1.0;
    for (const auto& o : osc_) {
        cplx den{o.omega_to * o.omega_to - omega * omega, -o.gamma * omega};
        if (den == cplx{0.0, 0.0})
            throw MaterialError("undamped oscillator evaluated on its pole");
        sum += (o.omega_lo * o.omega_lo - o.omega_to * o.omega_to) / den;
    }
    return eps_inf_ * sum;
}

cplx sqrt_upper(cplx z)
{
    cplx r = std::sqrt(z);
    if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0))
        r = -r;
    return r;
}

cplx PermittivityModel::refractive_index(double omega) const
{
    return sqrt_upper(permittivity(omega));
}

std::vector<double> PermittivityModel::resonance_breakpoints() const
{
    std::vector<double> pts;
    for (const auto& o : osc_) {
        pts.push_back(o.omega_to);
        if (o.gamma > 0.0) {
            pts.push_back(o.omega_to - 3.0 * o.gamma);
            pts.push_back(o.omega_to + 3.0 * o.gamma);
        }
        pts.push_back(o.omega_lo);
    }
    return pts;
}

cplx permittivity(const PermittivityModel& model, double omega) { return model.permittivity(omega); }
cplx refractive_index(const PermittivityModel& model, double omega) { return model.refractive_index(omega); }

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& tok, const std::string& what)
{
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MaterialError("cannot parse number for " + what + ": '" + tok + "'");
    }
}

}  // namespace

// Material files: '#' comments, then key = value lines.
//   model = constant | lorentz
//   n = 3.18            (constant, real index)   or  eps = re [im]
//   eps_inf = 7.38
//   oscillator = nu_TO nu_LO gamma   (THz, cyclic; repeatable)
PermittivityModel parse_material(const std::string& text)
{
    std::istringstream in(text);
    std::string line, model;
    std::optional<double> n, eps_inf;
    std::optional<cplx> eps;
    std::vector<Oscillator> osc;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MaterialError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::istringstream vs(val);
        std::vector<std::string> toks;
        for (std::string t; vs >> t;)
            toks.push_back(t);
        if (toks.empty())
            throw MaterialError("line " + std::to_string(lineno) + ": empty value for " + key);
        if (key == "model") {
            model = toks[0];
        } else if (key == "n") {
            n = to_number(toks[0], key);
        } else if (key == "eps") {
            double im = toks.size() > 1 ? to_number(toks[1], key) : 0.0;
            eps = cplx{to_number(toks[0], key), im};
        } else if (key == "eps_inf") {
            eps_inf = to_number(toks[0], key);
        } else if (key == "oscillator") {
            if (toks.size() != 3)
                throw MaterialError("line " + std::to_string(lineno) + ": oscillator needs nu_TO nu_LO gamma");
            osc.push_back({to_number(toks[0], key) * thz, to_number(toks[1], key) * thz,
                           to_number(toks[2], key) * thz});
        } else {
            throw MaterialError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (model == "constant") {
        if (n && eps)
            throw MaterialError("give either n or eps for a constant material, not both");
        if (n) {
            if (!(*n > 0.0))
                throw MaterialError("refractive index must be positive");
            return PermittivityModel::constant({*n * *n, 0.0});
        }
        if (eps)
            return PermittivityModel::constant(*eps);
        throw MaterialError("constant material needs n or eps");
    }
    if (model == "lorentz") {
        if (!eps_inf)
            throw MaterialError("lorentz material needs eps_inf");
        return PermittivityModel::lorentz(*eps_inf, std::move(osc));
    }
    throw MaterialError("model must be 'constant' or 'lorentz'");
}

PermittivityModel load_material(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw MaterialError("cannot open material file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_material(ss.str());
}

std::string serialize_material(const PermittivityModel& model)
{
    std::ostringstream out;
    out.precision(17);
    if (model.kind() == PermittivityModel::Kind::Constant) {
        out << "model = constant\neps = " << model.constant_value().real() << ' '
            << model.constant_value().imag() << '\n';
    } else {
        out << "model = lorentz\neps_inf = " << model.eps_inf() << '\n';
        for (const auto& o : model.oscillators())
            out << "oscillator = " << o.omega_to / thz << ' ' << o.omega_lo / thz << ' ' << o.gamma / thz << '\n';
    }
    return out.str();
}

}  // namespace eos
