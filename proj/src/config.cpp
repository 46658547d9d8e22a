#include "eos/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace eos {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::vector<std::string> kKeys = {
    "beam_waist_um",
    "pulse_duration_fs",
    "crystal_length_mm",
    "group_index",
    "central_frequency_thz",
    "beam_separation_um",
    "beam_separation_w",
    "time_delay_fs",
    "filter",
    "filter_min_thz",
    "filter_max_thz",
    "filter_min_offset_sigma",
    "detect_thz",
    "detect_offset_sigma",
    "detect_width_thz",
    "material",
    "material_index",
    "temperature_k",
    "chi2_pm_per_v",
    "detected_photons",
    "probe_index",
    "coupling",
};

double number(const ConfigSource& src, const std::string& key)
{
    const std::string& tok = src.values.at(key);
    std::string low;
    for (char ch : tok)
        low += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (low == "inf" || low == "+inf" || low == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parse error: " + key + " expects a number, got '" + tok + "'");
    }
}

bool has(const ConfigSource& src, const std::string& key) { return src.values.count(key) > 0; }

std::string resolve_material_path(const std::string& name, const std::string& base_dir)
{
    namespace fs = std::filesystem;
    fs::path p(name);
    if (p.is_absolute())
        return p.string();
    fs::path local = fs::path(base_dir) / p;
    if (fs::exists(local))
        return local.string();
    fs::path shipped = fs::path(EOS_DATA_DIR) / p;
    if (fs::exists(shipped))
        return shipped.string();
    return local.string();
}

std::string fmt17(double v)
{
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

}  // namespace

const std::vector<std::string>& config_keys() { return kKeys; }

void ConfigSource::set(const std::string& key, const std::string& value)
{
    std::string k = trim(key);
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end())
        throw ConfigError("parse error: unknown key '" + k + "'");
    values[k] = trim(value);
}

void ConfigSource::set_assignment(const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("parse error: expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    set(key, assignment.substr(eq + 1));
    static const std::pair<const char*, const char*> kExclusive[] = {
        {"beam_separation_um", "beam_separation_w"},
        {"filter_min_thz", "filter_min_offset_sigma"},
        {"detect_thz", "detect_offset_sigma"},
        {"material", "material_index"},
    };
    for (const auto& [a, b] : kExclusive) {
        if (key == a)
            values.erase(b);
        if (key == b)
            values.erase(a);
    }
}

ConfigSource read_config_source(const std::string& text, const std::string& base_dir)
{
    ConfigSource src;
    src.base_dir = base_dir;
    std::istringstream in(text);
    std::string line;
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
            throw ConfigError("parse error at line " + std::to_string(lineno) + ": expected key = value");
        try {
            src.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
    return src;
}

ConfigSource load_config_source(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    auto dir = std::filesystem::path(path).parent_path().string();
    return read_config_source(ss.str(), dir.empty() ? "." : dir);
}

ExperimentConfig build_config(const ConfigSource& src)
{
    ExperimentConfig cfg;
    auto opt = [&](const std::string& key, double& field, double unit) {
        if (has(src, key))
            field = number(src, key) * unit;
    };
    opt("beam_waist_um", cfg.beam_waist, um);
    opt("pulse_duration_fs", cfg.pulse_duration, fs);
    opt("crystal_length_mm", cfg.crystal_length, mm);
    opt("group_index", cfg.group_index, 1.0);
    opt("central_frequency_thz", cfg.central_frequency, thz);
    opt("time_delay_fs", cfg.time_delay, fs);
    opt("temperature_k", cfg.temperature, 1.0);
    opt("coupling", cfg.coupling, 1.0);

    if (has(src, "beam_separation_um") && has(src, "beam_separation_w"))
        throw ConfigError("validation error: beam_separation_um and beam_separation_w are exclusive");
    opt("beam_separation_um", cfg.beam_separation, um);
    if (has(src, "beam_separation_w"))
        cfg.beam_separation = number(src, "beam_separation_w") * cfg.beam_waist;

    // σω is needed for offsets, so check τσ before using it
    if (!(cfg.pulse_duration > 0.0))
        throw ConfigError("validation error: pulse_duration_fs must be > 0");
    const double sw = 2.0 / cfg.pulse_duration;

    std::string kind = has(src, "filter") ? src.values.at("filter") : "full";
    if (kind == "full") {
        cfg.filter = filter::Full{};
    } else if (kind == "band") {
        filter::Band b;
        if (has(src, "filter_min_thz") && has(src, "filter_min_offset_sigma"))
            throw ConfigError("validation error: filter_min_thz and filter_min_offset_sigma are exclusive");
        b.omega_min = has(src, "filter_min_thz") ? number(src, "filter_min_thz") * thz : 0.0;
        if (has(src, "filter_min_offset_sigma"))
            b.omega_min = cfg.central_frequency + number(src, "filter_min_offset_sigma") * sw;
        b.omega_max = has(src, "filter_max_thz") ? number(src, "filter_max_thz") * thz
                                                 : std::numeric_limits<double>::infinity();
        cfg.filter = b;
    } else if (kind == "monochromatic") {
        filter::Monochromatic m;
        if (has(src, "detect_thz") == has(src, "detect_offset_sigma"))
            throw ConfigError("validation error: monochromatic filter needs exactly one of detect_thz, detect_offset_sigma");
        m.omega_d = has(src, "detect_thz") ? number(src, "detect_thz") * thz
                                           : cfg.central_frequency + number(src, "detect_offset_sigma") * sw;
        m.width = has(src, "detect_width_thz") ? number(src, "detect_width_thz") * thz : sw / 100.0;
        cfg.filter = m;
    } else {
        throw ConfigError("validation error: filter must be full, band or monochromatic (got '" + kind + "')");
    }

    if (has(src, "material") && has(src, "material_index"))
        throw ConfigError("validation error: material and material_index are exclusive");
    if (has(src, "material_index")) {
        double n = number(src, "material_index");
        if (!(n > 0.0))
            throw ConfigError("validation error: material_index must be > 0");
        cfg.material = PermittivityModel::constant({n * n, 0.0});
        cfg.material_source = "index:" + fmt17(n);
    } else {
        std::string name = has(src, "material") ? src.values.at("material") : "znte.material";
        std::string path = resolve_material_path(name, src.base_dir);
        try {
            cfg.material = load_material(path);
        } catch (const MaterialError& e) {
            throw ConfigError(std::string("validation error: material: ") + e.what());
        }
        cfg.material_source = std::filesystem::absolute(path).lexically_normal().string();
    }

    int phys_keys = has(src, "chi2_pm_per_v") + has(src, "detected_photons") + has(src, "probe_index");
    if (phys_keys != 0 && phys_keys != 3)
        throw ConfigError("validation error: chi2_pm_per_v, detected_photons and probe_index must be given together");
    if (phys_keys == 3)
        cfg.scale = PhysicalScale{number(src, "chi2_pm_per_v") * 1e-12, number(src, "detected_photons"),
                                  number(src, "probe_index")};

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("validation error: ") + name + " must be finite and > 0");
    };
    positive(beam_waist, "beam_waist_um");
    positive(pulse_duration, "pulse_duration_fs");
    positive(crystal_length, "crystal_length_mm");
    positive(central_frequency, "central_frequency_thz");
    positive(coupling, "coupling");
    if (!std::isfinite(group_index))
        throw ConfigError("validation error: group_index must be finite");
    if (!std::isfinite(beam_separation) || !std::isfinite(time_delay))
        throw ConfigError("validation error: beam_separation/time_delay must be finite");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw ConfigError("validation error: temperature_k must be >= 0");
    const double sw = 2.0 / pulse_duration;
    if (auto b = std::get_if<filter::Band>(&filter)) {
        if (!(b->omega_min >= 0.0))
            throw ConfigError("validation error: filter_min_thz must be >= 0");
        if (!(b->omega_min < b->omega_max))
            throw ConfigError("validation error: filter_min_thz must be < filter_max_thz");
    }
    if (auto m = std::get_if<filter::Monochromatic>(&filter)) {
        if (!(m->omega_d > 0.0))
            throw ConfigError("validation error: detect_thz must be > 0");
        if (!(m->width > 0.0) || !(m->width < sw / 50.0))
            throw ConfigError("validation error: detect_width_thz must satisfy 0 < width < sigma_omega/50");
        if (std::abs(m->omega_d - central_frequency) > 8.0 * sw)
            throw ConfigError("validation error: detect_thz lies more than 8 sigma_omega from the centre");
    }
    if (scale) {
        positive(scale->chi2, "chi2_pm_per_v");
        positive(scale->photons, "detected_photons");
        positive(scale->probe_index, "probe_index");
    }
}

double sigma_omega(const ExperimentConfig& cfg)
{
    if (!(cfg.pulse_duration > 0.0))
        throw ConfigError("sigma_omega: pulse duration must be > 0");
    return 2.0 / cfg.pulse_duration;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir)
{
    return build_config(read_config_source(text, base_dir));
}

ExperimentConfig load_config(const std::string& path) { return build_config(load_config_source(path)); }

std::string serialize_config(const ExperimentConfig& cfg)
{
    std::ostringstream o;
    auto line = [&](const char* key, double v) { o << key << " = " << fmt17(v) << '\n'; };
    line("beam_waist_um", cfg.beam_waist / um);
    line("pulse_duration_fs", cfg.pulse_duration / fs);
    line("crystal_length_mm", cfg.crystal_length / mm);
    line("group_index", cfg.group_index);
    line("central_frequency_thz", cfg.central_frequency / thz);
    line("beam_separation_um", cfg.beam_separation / um);
    line("time_delay_fs", cfg.time_delay / fs);
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, filter::Full>) {
                o << "filter = full\n";
            } else if constexpr (std::is_same_v<F, filter::Band>) {
                o << "filter = band\n";
                line("filter_min_thz", f.omega_min / thz);
                if (std::isfinite(f.omega_max))
                    line("filter_max_thz", f.omega_max / thz);
                else
                    o << "filter_max_thz = inf\n";
            } else {
                o << "filter = monochromatic\n";
                line("detect_thz", f.omega_d / thz);
                line("detect_width_thz", f.width / thz);
            }
        },
        cfg.filter);
    if (cfg.material_source.rfind("index:", 0) == 0)
        o << "material_index = " << cfg.material_source.substr(6) << '\n';
    else
        o << "material = " << cfg.material_source << '\n';
    line("temperature_k", cfg.temperature);
    line("coupling", cfg.coupling);
    if (cfg.scale) {
        line("chi2_pm_per_v", cfg.scale->chi2 / 1e-12);
        line("detected_photons", cfg.scale->photons);
        line("probe_index", cfg.scale->probe_index);
    }
    return o.str();
}

std::string default_config_path()
{
    if (const char* env = std::getenv("EOS_CONFIG"); env && *env)
        return env;
    return std::string(EOS_DATA_DIR) + "/baseline.cfg";
}

void WavePlateSetting::validate() const
{
    const double tol = 1e-12;
    if (!(theta >= pi / 2 - tol && theta <= 3 * pi / 2 + tol))
        throw std::domain_error("wave-plate phase must lie in [pi/2, 3pi/2]");
    if (sign != 1 && sign != -1)
        throw std::domain_error("wave-plate sign must be +1 or -1");
}

void ClassicalWaveform::validate() const
{
    for (const auto& c : components) {
        if (!(c.omega > 0.0))
            throw std::domain_error("waveform component frequency must be > 0");
        if (!std::isfinite(c.amplitude) || !std::isfinite(c.phase) || !std::isfinite(c.kx) ||
            !std::isfinite(c.ky) || !std::isfinite(c.kz))
            throw std::domain_error("waveform component must be finite");
    }
}

void ScanTable::add_row(std::vector<double> row)
{
    if (row.size() != columns.size())
        throw std::invalid_argument("scan row arity does not match column count");
    rows.push_back(std::move(row));
}

std::string ScanTable::to_csv() const
{
    std::ostringstream o;
    for (const auto& m : metadata)
        o << "# " << m << '\n';
    for (size_t i = 0; i < columns.size(); ++i)
        o << (i ? "," : "") << columns[i];
    o << '\n';
    char buf[64];
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17e", r[i]);
            o << (i ? "," : "") << buf;
        }
        o << '\n';
    }
    return o.str();
}

}  // namespace eos
