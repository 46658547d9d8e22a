#include <doctest.h>

#include "eos/config.hpp"
#include "support.hpp"

using namespace eos;

TEST_CASE("baseline file reproduces the reference experiment")
{
    const ExperimentConfig cfg = testing::baseline();
    CHECK(cfg.beam_waist == doctest::Approx(10e-6).epsilon(1e-15));
    CHECK(cfg.pulse_duration == doctest::Approx(195e-15).epsilon(1e-15));
    CHECK(cfg.crystal_length == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(cfg.group_index == 3.18);
    CHECK(cfg.temperature == 0.0);
    CHECK(std::holds_alternative<filter::Full>(cfg.filter));
    CHECK(cfg.central_frequency == doctest::Approx(2.0 * pi * phys.c / 1.55e-6).epsilon(1e-14));
    CHECK(cfg.material.kind() == PermittivityModel::Kind::Lorentz);
}

TEST_CASE("temperature defaults to zero")
{
    const ExperimentConfig cfg = parse_config("beam_waist_um = 12\nmaterial_index = 3.18\n");
    CHECK(cfg.temperature == 0.0);
    CHECK(cfg.beam_waist == doctest::Approx(12e-6));
}

TEST_CASE("band filter with min above max is rejected")
{
    CHECK_THROWS_AS(parse_config("filter = band\nfilter_min_thz = 5\nfilter_max_thz = 2\nmaterial_index = 3\n"),
                    ConfigError);
}

TEST_CASE("malformed input is reported")
{
    CHECK_THROWS_AS(parse_config("beam_waist_um 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("beam_waist_um = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("beam_waist_um = -1\nmaterial_index = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("temperature_k = -3\nmaterial_index = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("beam_separation_um = 1\nbeam_separation_w = 1\nmaterial_index = 3\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("filter = monochromatic\nmaterial_index = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("chi2_pm_per_v = 4\nmaterial_index = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("filter = notch\nmaterial_index = 3\n"), ConfigError);
}

TEST_CASE("sigma_omega is 2 / tau")
{
    ExperimentConfig cfg;
    cfg.pulse_duration = 2.0;
    CHECK(sigma_omega(cfg) == 1.0);
    cfg.pulse_duration = 195e-15;
    CHECK(sigma_omega(cfg) == doctest::Approx(1.0256e13).epsilon(1e-4));
    cfg.pulse_duration = 0.0;
    CHECK_THROWS(sigma_omega(cfg));
}

TEST_CASE("separations and filter edges in derived units")
{
    const ExperimentConfig cfg = parse_config(
        "beam_waist_um = 10\nbeam_separation_w = 5\nfilter = band\nfilter_min_offset_sigma = 3\nmaterial_index = 3\n");
    CHECK(cfg.beam_separation == doctest::Approx(50e-6));
    const auto& b = std::get<filter::Band>(cfg.filter);
    CHECK(b.omega_min == doctest::Approx(cfg.central_frequency + 3.0 * sigma_omega(cfg)));
    CHECK(std::isinf(b.omega_max));
}

TEST_CASE("overrides replace file values")
{
    ConfigSource src = load_config_source(EOS_DATA_DIR "/baseline.cfg");
    src.set_assignment("temperature_k=14");
    src.set_assignment(" beam_separation_um = 200 ");
    const ExperimentConfig cfg = build_config(src);
    CHECK(cfg.temperature == 14.0);
    CHECK(cfg.beam_separation == doctest::Approx(200e-6));
    CHECK_THROWS_AS(src.set_assignment("temperature_k"), ConfigError);
    // an override in the other unit replaces the file's value
    src.set_assignment("beam_separation_w=3");
    CHECK(build_config(src).beam_separation == doctest::Approx(30e-6));
    src.set("beam_separation_um", "1");
    CHECK_THROWS_AS(build_config(src), ConfigError);
}

TEST_CASE("serialized config round-trips exactly")
{
    for (const char* extra : {"", "filter = band\nfilter_min_offset_sigma = 3\n",
                              "filter = monochromatic\ndetect_offset_sigma = 2\n",
                              "chi2_pm_per_v = 4\ndetected_photons = 1e8\nprobe_index = 2.8\n"}) {
        ConfigSource src = load_config_source(EOS_DATA_DIR "/baseline.cfg");
        for (const auto& [k, v] : read_config_source(extra).values)
            src.set(k, v);
        const ExperimentConfig a = build_config(src);
        const std::string text = serialize_config(a);
        const ExperimentConfig b = parse_config(text);
        CHECK(serialize_config(b) == text);
    }
}

TEST_CASE("wave-plate settings are range checked")
{
    CHECK_NOTHROW(WavePlateSetting{pi / 2, 1}.validate());
    CHECK_NOTHROW(WavePlateSetting{3 * pi / 2, -1}.validate());
    CHECK_THROWS(WavePlateSetting{0.1, 1}.validate());
    CHECK_THROWS(WavePlateSetting{pi, 0}.validate());
}

TEST_CASE("scan tables print metadata, header and full-precision rows")
{
    ScanTable t;
    t.metadata = {"config_hash: abc"};
    t.columns = {"x", "y"};
    t.add_row({1.0, 1.0 / 3.0});
    CHECK_THROWS(t.add_row({1.0}));
    const std::string csv = t.to_csv();
    CHECK(csv == "# config_hash: abc\nx,y\n1.00000000000000000e+00,3.33333333333333315e-01\n");
}

TEST_CASE("default config path honours the environment")
{
    CHECK(default_config_path().find("baseline.cfg") != std::string::npos);
}
