#include <doctest.h>

#include "eos/materials.hpp"
#include "support.hpp"

using namespace eos;

TEST_CASE("constant model")
{
    const auto m = PermittivityModel::constant({9.0, 0.0});
    CHECK(permittivity(m, 1e12) == cplx{9.0, 0.0});
    CHECK(permittivity(m, 7e13) == cplx{9.0, 0.0});
    CHECK(std::abs(refractive_index(m, 1e12) - 3.0) < 1e-15);
}

TEST_CASE("Lorentz asymptotes")
{
    const double to = 5.3 * thz, lo = 6.18 * thz;
    const auto m = PermittivityModel::lorentz(7.38, {{to, lo, 0.09 * thz}});
    CHECK(std::abs(permittivity(m, 1e20) - 7.38) < 1e-9);
    // Ω = 0: ε∞ ω_LO² / ω_TO² for any damping
    const cplx e0 = permittivity(m, 0.0);
    CHECK(std::abs(e0 - 7.38 * lo * lo / (to * to)) < 1e-12);
    const auto m2 = PermittivityModel::lorentz(7.38, {{to, lo, 2.0 * thz}});
    CHECK(std::abs(permittivity(m2, 0.0) - e0) < 1e-12);
    // loss is positive for Ω > 0
    CHECK(permittivity(m, 5.0 * thz).imag() > 0.0);
}

TEST_CASE("refractive index branch")
{
    CHECK(std::abs(sqrt_upper({9.0, 0.0}) - 3.0) < 1e-15);
    CHECK(std::abs(sqrt_upper({3.0, 4.0}) - cplx{2.0, 1.0}) < 1e-15);
    CHECK(std::abs(sqrt_upper({-1.0, 0.0}) - cplx{0.0, 1.0}) < 1e-15);
    CHECK(std::abs(sqrt_upper({-1.0, -0.0}) - cplx{0.0, 1.0}) < 1e-15);
    testing::Gen g(11);
    for (int i = 0; i < 200; ++i) {
        const cplx z = g.complex_normal() * 10.0;
        const cplx r = sqrt_upper(z);
        CHECK(r.imag() >= 0.0);
        CHECK(std::abs(r * r - z) < 1e-12 * std::abs(z));
    }
}

TEST_CASE("shipped ZnTe file")
{
    const auto m = load_material(EOS_DATA_DIR "/znte.material");
    CHECK(m.kind() == PermittivityModel::Kind::Lorentz);
    CHECK(m.eps_inf() == 7.38);
    REQUIRE(m.oscillators().size() == 1);
    CHECK(m.oscillators()[0].omega_to == doctest::Approx(5.3 * thz));
    // Re n near 3.2 well below the phonon band
    const double n1 = refractive_index(m, 1.0 * thz).real();
    CHECK(n1 > 3.0);
    CHECK(n1 < 3.3);
}

TEST_CASE("material validation")
{
    CHECK_THROWS_AS(parse_material("model = lorentz\neps_inf = 7\noscillator = 5.3 6.2 -0.1\n"), MaterialError);
    CHECK_THROWS_AS(parse_material("model = lorentz\noscillator = 5.3 6.2 0.1\n"), MaterialError);
    CHECK_THROWS_AS(parse_material("model = crystal\n"), MaterialError);
    CHECK_THROWS_AS(parse_material("model = constant\nn = -2\n"), MaterialError);
    CHECK_THROWS_AS(load_material("/nonexistent/file.material"), MaterialError);
    const auto c = parse_material("model = constant\nn = 3.18\n");
    CHECK(c.kind() == PermittivityModel::Kind::Constant);
    CHECK(std::abs(c.constant_value() - 3.18 * 3.18) < 1e-12);
}

TEST_CASE("lossless pole is reported")
{
    const auto m = PermittivityModel::lorentz(7.0, {{5.0 * thz, 6.0 * thz, 0.0}});
    CHECK_THROWS_AS(permittivity(m, 5.0 * thz), MaterialError);
}

TEST_CASE("material serialization round-trips")
{
    const auto m = load_material(EOS_DATA_DIR "/znte.material");
    const auto r = parse_material(serialize_material(m));
    for (double nu : {0.5, 2.0, 5.3, 8.0})
        CHECK(std::abs(permittivity(r, nu * thz) - permittivity(m, nu * thz)) < 1e-12 * std::abs(permittivity(m, nu * thz)));
    CHECK(!m.resonance_breakpoints().empty());
}
