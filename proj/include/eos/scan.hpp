#ifndef EOS_SCAN_HPP
#define EOS_SCAN_HPP

#include <string>
#include <vector>

#include "eos/config.hpp"
#include "eos/oracles.hpp"

namespace eos {

// Swept parameter and the config key it writes (human units):
//   dr            beam separation in beam waists     -> beam_separation_w
//   dr_um         beam separation in µm              -> beam_separation_um
//   dt            time delay in fs                   -> time_delay_fs
//   T             temperature in K                   -> temperature_k
//   omega_min     band lower edge, σω above ω_c      -> filter_min_offset_sigma (filter = band)
//   omega_min_thz band lower edge in THz             -> filter_min_thz (filter = band)
//   omega_d       detected frequency, σω from ω_c    -> detect_offset_sigma (filter = monochromatic)
//   omega_d_thz   detected frequency in THz          -> detect_thz (filter = monochromatic)
struct ScanSpec {
    std::string parameter;
    double start = 0.0, stop = 1.0;
    int count = 2;
    bool log = false;

    void validate() const;
    std::vector<double> values() const;
};

const std::vector<std::string>& sweep_parameters();

// "name:start:stop:count[:log]"
ScanSpec parse_sweep(const std::string& text);

// a copy of src with the swept key (and any key it conflicts with) replaced
ConfigSource apply_sweep_value(const ConfigSource& src, const std::string& parameter, double value);

struct ScanOptions {
    int threads = 0;  // 0: hardware concurrency
};

ScanTable cmd_scan_correlation(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt = {});
ScanTable cmd_scan_negativity(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt = {});
ScanTable cmd_scan_bell(const ConfigSource& src, const ScanSpec& spec, const ScanOptions& opt = {});
ScanTable cmd_witness(const ConfigSource& src);

struct VerifyOutcome {
    std::vector<OracleReport> reports;
    bool pass = false;
    std::string text;
};
VerifyOutcome cmd_verify(const ConfigSource& src, int threads = 0);

// trace and hermiticity of an assembled state, both ≤ 1e-12; throws StateError otherwise
void check_state_sanity(const ProbeState& state);

// gnuplot commands that plot every data column of a table against the first
std::string plot_script(const ScanTable& table, const std::string& csv_path);

// FNV-1a of the serialized config, as 16 hex digits
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace eos

#endif
