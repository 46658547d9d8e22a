#ifndef EOS_CONFIG_HPP
#define EOS_CONFIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eos/constants.hpp"
#include "eos/materials.hpp"

namespace eos {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace filter {
struct Full {};
struct Band {
    double omega_min = 0.0;  // rad/s
    double omega_max = 0.0;  // rad/s, may be +inf
};
struct Monochromatic {
    double omega_d = 0.0;
    double width = 0.0;
};
}  // namespace filter

using SpectralFilter = std::variant<filter::Full, filter::Band, filter::Monochromatic>;

struct PhysicalScale {
    double chi2 = 0.0;        // m/V
    double photons = 0.0;     // N_d
    double probe_index = 0.0; // n_c
};

struct ExperimentConfig {
    double beam_waist = 10.0 * um;
    double pulse_duration = 195.0 * fs;
    double crystal_length = 1.0 * mm;
    double group_index = 3.18;
    double central_frequency = 2.0 * pi * phys.c / 1.55e-6;
    double beam_separation = 0.0;
    double time_delay = 0.0;
    SpectralFilter filter = filter::Full{};
    PermittivityModel material = PermittivityModel::constant({3.18 * 3.18, 0.0});
    std::string material_source = "constant";
    double temperature = 0.0;
    std::optional<PhysicalScale> scale;
    // multiplies reduced-unit elements before a density matrix is assembled
    double coupling = 1e-6;

    void validate() const;
};

double sigma_omega(const ExperimentConfig& cfg);

// Raw key/value pairs in human units. Keys are resolved together so their
// order in a file does not matter (offsets in units of σω need τσ and ω_c).
struct ConfigSource {
    std::map<std::string, std::string> values;
    std::string base_dir = ".";
    void set(const std::string& key, const std::string& value);
    // "key=value" as an override: also drops the key's exclusive partner
    void set_assignment(const std::string& assignment);
};

ConfigSource read_config_source(const std::string& text, const std::string& base_dir = ".");
ConfigSource load_config_source(const std::string& path);
ExperimentConfig build_config(const ConfigSource& src);

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
const std::vector<std::string>& config_keys();

// resolve the default config path: explicit, then EOS_CONFIG, then the shipped baseline
std::string default_config_path();

struct WavePlateSetting {
    double theta = pi / 2;
    int sign = 1;
    void validate() const;
};

struct PlaneWave {
    double amplitude = 0.0;   // V/m
    double kx = 0.0, ky = 0.0, kz = 0.0;  // rad/m
    double omega = 0.0;       // rad/s
    double phase = 0.0;
};

struct ClassicalWaveform {
    std::vector<PlaneWave> components;
    void validate() const;
};

struct ScanTable {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    void add_row(std::vector<double> row);
    std::string to_csv() const;
};

}  // namespace eos

#endif
