#include "eos/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

#include "eos/elements.hpp"
#include "eos/kernels.hpp"
#include "eos/observables.hpp"

namespace eos {

namespace {

struct SweepTarget {
    const char* name;
    const char* key;
    std::vector<const char*> conflicts;
    const char* filter;  // nullptr: leave the filter kind alone
    const char* unit;
};

const std::vector<SweepTarget>& targets()
{
    static const std::vector<SweepTarget> t = {
        {"dr", "beam_separation_w", {"beam_separation_um"}, nullptr, "beam waists"},
        {"dr_um", "beam_separation_um", {"beam_separation_w"}, nullptr, "um"},
        {"dt", "time_delay_fs", {}, nullptr, "fs"},
        {"T", "temperature_k", {}, nullptr, "K"},
        {"omega_min", "filter_min_offset_sigma", {"filter_min_thz"}, "band", "sigma_omega above omega_c"},
        {"omega_min_thz", "filter_min_thz", {"filter_min_offset_sigma"}, "band", "THz"},
        {"omega_d", "detect_offset_sigma", {"detect_thz"}, "monochromatic", "sigma_omega from omega_c"},
        {"omega_d_thz", "detect_thz", {"detect_offset_sigma"}, "monochromatic", "THz"},
    };
    return t;
}

const SweepTarget& target(const std::string& name)
{
    for (const auto& t : targets())
        if (name == t.name)
            return t;
    std::string known;
    for (const auto& t : targets())
        known += std::string(known.empty() ? "" : ", ") + t.name;
    throw ConfigError("unknown sweep parameter '" + name + "' (expected one of " + known + ")");
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// runs job(i) for every row on a bounded pool; results keep sweep order
template <class Job>
std::vector<std::vector<double>> run_rows(size_t n, int threads, Job job)
{
    std::vector<std::vector<double>> rows(n);
    const size_t workers =
        threads > 0 ? static_cast<size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
    size_t next = 0;
    while (next < n) {
        std::vector<std::future<void>> batch;
        for (size_t k = 0; k < workers && next < n; ++k, ++next)
            batch.push_back(std::async(std::launch::async, [&rows, &job, i = next] { rows[i] = job(i); }));
        for (auto& f : batch)
            f.get();
    }
    return rows;
}

ScanTable make_table(const ExperimentConfig& base, const ScanSpec* spec, const std::string& command,
                     std::vector<std::string> columns)
{
    ScanTable t;
    t.metadata.push_back("command: " + command);
    t.metadata.push_back("config_hash: " + config_hash(base));
    if (spec) {
        const SweepTarget& tg = target(spec->parameter);
        t.metadata.push_back("sweep: " + spec->parameter + " from " + fmt(spec->start) + " to " + fmt(spec->stop) +
                             ", " + std::to_string(spec->count) + " points, " + (spec->log ? "log" : "linear") +
                             " spacing, unit " + tg.unit);
    }
    t.metadata.push_back("units: correlations and elements include the prefactor C*N_d = " +
                         fmt(element_prefactor(base)) + "; G_over_C divides it out");
    std::istringstream snap(serialize_config(base));
    std::string line;
    while (std::getline(snap, line))
        t.metadata.push_back("config: " + line);
    t.columns = std::move(columns);
    return t;
}

ProbeState checked_state(const ProbeMatrixElements& e)
{
    ProbeState st = assemble_state(e);
    check_state_sanity(st);
    return st;
}

}  // namespace

const std::vector<std::string>& sweep_parameters()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& t : targets())
            n.push_back(t.name);
        return n;
    }();
    return names;
}

void ScanSpec::validate() const
{
    target(parameter);
    if (count < 2)
        throw ConfigError("sweep count must be >= 2");
    if (!(std::isfinite(start) && std::isfinite(stop) && start < stop))
        throw ConfigError("sweep needs finite start < stop");
    if (log && !(start > 0.0))
        throw ConfigError("log sweep needs start > 0");
}

std::vector<double> ScanSpec::values() const
{
    validate();
    std::vector<double> v(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        v[i] = log ? start * std::pow(stop / start, f) : start + f * (stop - start);
    }
    v.back() = stop;
    return v;
}

ScanSpec parse_sweep(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':'))
        parts.push_back(p);
    if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("sweep must be name:start:stop:count[:log], got '" + text + "'");
    ScanSpec s;
    s.parameter = parts[0];
    try {
        size_t used = 0;
        s.start = std::stod(parts[1], &used);
        if (used != parts[1].size())
            throw std::invalid_argument(parts[1]);
        s.stop = std::stod(parts[2], &used);
        if (used != parts[2].size())
            throw std::invalid_argument(parts[2]);
        s.count = std::stoi(parts[3], &used);
        if (used != parts[3].size())
            throw std::invalid_argument(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("sweep '" + text + "': start, stop and count must be numbers");
    }
    if (parts.size() == 5) {
        if (parts[4] == "log")
            s.log = true;
        else if (parts[4] != "linear")
            throw ConfigError("sweep spacing must be 'log' or 'linear', got '" + parts[4] + "'");
    }
    s.validate();
    return s;
}

ConfigSource apply_sweep_value(const ConfigSource& src, const std::string& parameter, double value)
{
    const SweepTarget& t = target(parameter);
    ConfigSource out = src;
    for (const char* c : t.conflicts)
        out.values.erase(c);
    if (t.filter)
        out.values["filter"] = t.filter;
    out.values[t.key] = fmt(value);
    return out;
}

void check_state_sanity(const ProbeState& state)
{
    const double tr = std::abs(state.trace() - 1.0);
    const double herm = (state - state.adjoint()).cwiseAbs().maxCoeff();
    if (!(tr <= 1e-12) || !(herm <= 1e-12))
        throw StateError("state sanity check failed: |tr - 1| = " + fmt(tr) + ", hermiticity " + fmt(herm));
}

std::string config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : serialize_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScanTable cmd_scan_correlation(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt)
{
    const std::vector<double> xs = spec.values();
    // the swept key may be what makes the config valid (a filter kind, say)
    const ExperimentConfig base = build_config(apply_sweep_value(src, spec.parameter, xs.front()));
    ScanTable table = make_table(base, &spec, "scan-correlation",
                                 {spec.parameter, "G_over_C", "l11", "re_l12", "re_m"});
    std::vector<ExperimentConfig> cfgs;
    for (double x : xs) {
        cfgs.push_back(build_config(apply_sweep_value(src, spec.parameter, x)));
        if (!std::holds_alternative<filter::Full>(cfgs.back().filter))
            throw ConfigError("scan-correlation needs filter = full");
    }
    ElementCache cache;
    const cplx quarter = ellipsometry_phase({pi / 2, 1});
    table.rows = run_rows(xs.size(), opt.threads, [&](size_t i) {
        const ProbeMatrixElements e = cache.thermal(cfgs[i]);
        const double g = two_beam_correlation(checked_state(e), quarter, quarter, 1.0);
        return std::vector<double>{xs[i], g / element_prefactor(cfgs[i]), e.l11, e.l12.real(), e.m.real()};
    });
    return table;
}

ScanTable cmd_scan_negativity(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt)
{
    const std::vector<double> xs = spec.values();
    // the swept key may be what makes the config valid (a filter kind, say)
    const ExperimentConfig base = build_config(apply_sweep_value(src, spec.parameter, xs.front()));
    ScanTable table =
        make_table(base, &spec, "scan-negativity", {spec.parameter, "N", "E1", "phi_M", "l11", "abs_m"});
    std::vector<ExperimentConfig> cfgs;
    for (double x : xs)
        cfgs.push_back(build_config(apply_sweep_value(src, spec.parameter, x)));
    ElementCache cache;
    table.rows = run_rows(xs.size(), opt.threads, [&](size_t i) {
        const ProbeMatrixElements e = cache.thermal(cfgs[i]);
        checked_state(e);
        const NegativityReport n = negativity(e);
        return std::vector<double>{xs[i], n.negativity, n.e1, n.phi_m, e.l11, std::abs(e.m)};
    });
    return table;
}

ScanTable cmd_scan_bell(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt)
{
    const std::vector<double> xs = spec.values();
    // the swept key may be what makes the config valid (a filter kind, say)
    const ExperimentConfig base = build_config(apply_sweep_value(src, spec.parameter, xs.front()));
    ScanTable table = make_table(base, &spec, "scan-bell",
                                 {spec.parameter, "B_max", "theta1", "sign1", "theta1p", "sign1p", "theta2", "sign2",
                                  "theta2p", "sign2p", "phi_M"});
    table.metadata.push_back("N_LO = |m| at every point");
    std::vector<ExperimentConfig> cfgs;
    for (double x : xs) {
        cfgs.push_back(build_config(apply_sweep_value(src, spec.parameter, x)));
        if (!std::holds_alternative<filter::Monochromatic>(cfgs.back().filter))
            throw ConfigError("scan-bell needs filter = monochromatic");
    }
    ElementCache cache;
    table.rows = run_rows(xs.size(), opt.threads, [&](size_t i) {
        const ProbeMatrixElements e = cache.thermal(cfgs[i]);
        checked_state(e);
        const double n_lo = std::abs(e.m);
        if (!(n_lo > 0.0))
            throw std::domain_error("scan-bell: |m| = 0, no local-oscillator normalisation");
        const BellResult b = bell_optimize(e, n_lo);
        const BellSettings& s = b.settings;
        return std::vector<double>{xs[i],        b.b_max,       s.t1.theta,  double(s.t1.sign),
                                   s.t1p.theta,  double(s.t1p.sign), s.t2.theta, double(s.t2.sign),
                                   s.t2p.theta,  double(s.t2p.sign), negativity(e).phi_m};
    });
    return table;
}

ScanTable cmd_witness(const ConfigSource& src)
{
    const ExperimentConfig cfg = build_config(src);
    const ProbeMatrixElements e = thermal_elements(cfg);
    checked_state(e);
    if (!(std::abs(e.m) > 0.0))
        throw std::domain_error("witness: |m| = 0, the measurement settings are undefined");
    const double n_d = cfg.scale ? cfg.scale->photons : 1.0;
    const WitnessBudget w = witness_budget(e, n_d);
    ScanTable table = make_table(cfg, nullptr, "witness",
                                 {"theta", "theta_prime", "G_theta_theta", "G_thetap_thetap", "single_beam_1",
                                  "single_beam_2", "combination", "printed_combination", "expectation",
                                  "entangled"});
    table.metadata.push_back("N_d = " + fmt(n_d));
    table.metadata.push_back("combination = (N_d/4)(G_theta_theta - G_thetap_thetap) + (N_d/8)(single_beam_1 + "
                             "single_beam_2); entangled = 1 when it is negative");
    table.add_row({w.theta.theta, w.theta_prime.theta, w.g_theta, w.g_theta_prime, w.single_beam_1, w.single_beam_2,
                   w.combination, w.printed_combination, w.expectation, w.combination < 0.0 ? 1.0 : 0.0});
    return table;
}

VerifyOutcome cmd_verify(const ConfigSource& src, int threads)
{
    const ExperimentConfig cfg = build_config(src);
    VerifyOutcome out;
    out.reports = run_verification_suite(cfg, threads);
    out.pass = !out.reports.empty();
    std::ostringstream o;
    char buf[512];
    for (const auto& r : out.reports) {
        out.pass = out.pass && r.pass;
        std::snprintf(buf, sizeof buf, "%s  %-48s err %.3e  limit %.1e  %s\n", r.pass ? "PASS" : "FAIL",
                      r.name.c_str(), r.rel_error, r.threshold, r.note.c_str());
        o << buf;
    }
    o << (out.pass ? "verification passed" : "verification FAILED") << " (" << out.reports.size() << " checks)\n";
    out.text = o.str();
    return out;
}

std::string plot_script(const ScanTable& table, const std::string& csv_path)
{
    std::ostringstream o;
    o << "# gnuplot -p " << csv_path << ".gp\n";
    o << "set datafile separator ','\n";
    o << "set datafile commentschars '#'\n";
    o << "set key autotitle columnhead\n";
    o << "set xlabel '" << (table.columns.empty() ? "" : table.columns[0]) << "'\n";
    o << "set grid\n";
    o << "plot";
    for (size_t c = 2; c <= table.columns.size(); ++c)
        o << (c > 2 ? "," : "") << " '" << csv_path << "' using 1:" << c << " with linespoints";
    o << '\n';
    return o.str();
}

}  // namespace eos
