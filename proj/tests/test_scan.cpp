#include <doctest.h>

#include "eos/observables.hpp"
#include "eos/scan.hpp"
#include "support.hpp"

using namespace eos;

namespace {

ConfigSource base_source()
{
    return load_config_source(EOS_DATA_DIR "/baseline.cfg");
}

ConfigSource with(ConfigSource src, std::initializer_list<std::pair<const char*, const char*>> kv)
{
    for (const auto& [k, v] : kv)
        src.set_assignment(std::string(k) + "=" + v);
    return src;
}

size_t column(const ScanTable& t, const std::string& name)
{
    for (size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name)
            return i;
    throw std::runtime_error("no column " + name);
}

}  // namespace

TEST_CASE("sweep parsing")
{
    const ScanSpec s = parse_sweep("dr:0:10:6");
    CHECK(s.parameter == "dr");
    CHECK(s.count == 6);
    CHECK_FALSE(s.log);
    const auto v = s.values();
    CHECK(v.front() == 0.0);
    CHECK(v.back() == 10.0);
    CHECK(v[1] == doctest::Approx(2.0));
    const ScanSpec l = parse_sweep("T:1:100:3:log");
    CHECK(l.values()[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(parse_sweep("omega_d:1:2:2:linear").parameter == "omega_d");
    for (const char* bad : {"dr:0:10", "dr:0:10:1", "dr:5:1:3", "xx:0:1:3", "T:0:10:3:log", "dr:a:1:3",
                            "dr:0:1:3:cubic", "dr:0:1:2.5"})
        CHECK_THROWS_AS(parse_sweep(bad), ConfigError);
    CHECK(sweep_parameters().size() == 8);
}

TEST_CASE("sweep values rewrite the config")
{
    const ConfigSource src = with(base_source(), {{"beam_separation_um", "30"}});
    const ExperimentConfig a = build_config(apply_sweep_value(src, "dr", 2.0));
    CHECK(a.beam_separation == doctest::Approx(2.0 * a.beam_waist));
    const ExperimentConfig b = build_config(apply_sweep_value(src, "omega_min", 3.0));
    REQUIRE(std::holds_alternative<filter::Band>(b.filter));
    CHECK(std::get<filter::Band>(b.filter).omega_min == doctest::Approx(b.central_frequency + 3.0 * sigma_omega(b)));
    const ExperimentConfig c = build_config(apply_sweep_value(src, "omega_d_thz", 200.0));
    REQUIRE(std::holds_alternative<filter::Monochromatic>(c.filter));
    CHECK(std::get<filter::Monochromatic>(c.filter).omega_d == doctest::Approx(200.0 * thz));
    CHECK(build_config(apply_sweep_value(src, "T", 14.0)).temperature == 14.0);
    CHECK(build_config(apply_sweep_value(src, "dt", 50.0)).time_delay == doctest::Approx(50e-15));
}

TEST_CASE("correlation scan: G falls with separation and stays negative far out")
{
    const ScanTable t = cmd_scan_correlation(base_source(), parse_sweep("dr:0:30:4"));
    REQUIRE(t.rows.size() == 4);
    const size_t g = column(t, "G_over_C");
    // positive overlap peak, then a negative tail that decays back towards zero
    CHECK(t.rows[0][g] > t.rows[1][g]);
    CHECK(t.rows[1][g] > 0.0);
    CHECK(t.rows[2][g] < 0.0);
    CHECK(t.rows[3][g] < 0.0);
    CHECK(t.rows[3][g] > t.rows[2][g]);
    CHECK(t.metadata.front() == "command: scan-correlation");
    CHECK_THROWS_AS(cmd_scan_correlation(with(base_source(), {{"filter", "band"}, {"filter_min_offset_sigma", "3"}}),
                                         parse_sweep("dr:0:1:2")),
                    ConfigError);
}

TEST_CASE("rows are deterministic and keep sweep order across thread counts")
{
    const ScanSpec spec = parse_sweep("dr:0:3:4");
    const ScanTable a = cmd_scan_negativity(base_source(), spec, {1});
    const ScanTable b = cmd_scan_negativity(base_source(), spec, {3});
    CHECK(a.to_csv() == b.to_csv());
    const ScanTable same = cmd_scan_negativity(base_source(), parse_sweep("dr:1:1.0000001:2"));
    CHECK(same.rows[0][1] == same.rows[1][1]);
}

TEST_CASE("higher band edges extend the entangled range")
{
    auto reach = [](const ConfigSource& src) {
        const ScanTable t = cmd_scan_negativity(src, parse_sweep("dr:0:8:5"));
        double last = -1.0;
        for (const auto& r : t.rows)
            if (r[1] > 0.0)
                last = r[0];
        return last;
    };
    const double full = reach(base_source());
    const double band1 = reach(with(base_source(), {{"filter", "band"}, {"filter_min_offset_sigma", "1"}}));
    const double band3 = reach(with(base_source(), {{"filter", "band"}, {"filter_min_offset_sigma", "3"}}));
    CHECK(full == 0.0);
    CHECK(band1 >= full);
    CHECK(band3 >= band1);
    CHECK(band3 >= 6.0);
}

TEST_CASE("Bell scan")
{
    const ConfigSource mono = with(base_source(), {{"filter", "monochromatic"}, {"detect_offset_sigma", "5"}});
    const ScanTable d = cmd_scan_bell(mono, parse_sweep("dr:0:10:3"));
    const size_t b = column(d, "B_max");
    CHECK(std::abs(d.rows[0][b] - 2.0 * std::sqrt(2.0)) < 1e-2);
    CHECK(d.rows[1][b] < d.rows[0][b]);
    CHECK(d.rows[2][b] < d.rows[1][b]);
    const ScanTable w = cmd_scan_bell(base_source(), parse_sweep("omega_d:1:5:3"));
    CHECK(w.rows[1][b] > w.rows[0][b]);
    CHECK(w.rows[2][b] > w.rows[1][b]);
    CHECK(d.columns.size() == 11);
    CHECK_THROWS_AS(cmd_scan_bell(base_source(), parse_sweep("dr:0:1:2")), ConfigError);
}

TEST_CASE("witness budget table")
{
    const ScanTable hp = cmd_witness(
        with(base_source(), {{"filter", "band"}, {"filter_min_offset_sigma", "3"}, {"beam_separation_w", "5"}}));
    REQUIRE(hp.rows.size() == 1);
    const auto& r = hp.rows[0];
    const double comb = r[column(hp, "combination")];
    CHECK(comb < 0.0);
    CHECK(r[column(hp, "entangled")] == 1.0);
    CHECK(std::abs(comb - r[column(hp, "expectation")]) < 1e-8);

    const ScanTable hot = cmd_witness(with(base_source(), {{"filter", "band"}, {"filter_min_offset_sigma", "3"},
                                                           {"beam_separation_w", "5"}, {"temperature_k", "20"}}));
    CHECK(hot.rows[0][column(hot, "combination")] >= 0.0);
    CHECK(hot.rows[0][column(hot, "entangled")] == 0.0);
}

TEST_CASE("state sanity check")
{
    ProbeState ok = assemble_state(ProbeMatrixElements{});
    CHECK_NOTHROW(check_state_sanity(ok));
    ProbeState bad = ok;
    bad(1, 0) = 1e-9;
    CHECK_THROWS_AS(check_state_sanity(bad), StateError);
    bad = ok;
    bad(0, 0) = 1.0 + 1e-10;
    CHECK_THROWS_AS(check_state_sanity(bad), StateError);
}

TEST_CASE("metadata, hash and plot script")
{
    const ExperimentConfig cfg = build_config(base_source());
    CHECK(config_hash(cfg) == config_hash(build_config(base_source())));
    CHECK(config_hash(cfg).size() == 16);
    ExperimentConfig other = cfg;
    other.temperature = 1.0;
    CHECK(config_hash(other) != config_hash(cfg));

    const ScanTable t = cmd_scan_negativity(base_source(), parse_sweep("T:0:1:2"));
    bool has_hash = false, has_snapshot = false;
    for (const auto& m : t.metadata) {
        has_hash = has_hash || m.rfind("config_hash: ", 0) == 0;
        has_snapshot = has_snapshot || m.rfind("config: beam_waist_um", 0) == 0;
    }
    CHECK(has_hash);
    CHECK(has_snapshot);
    const std::string gp = plot_script(t, "neg.csv");
    CHECK(gp.find("set datafile separator ','") != std::string::npos);
    CHECK(gp.find("'neg.csv' using 1:6") != std::string::npos);
}
