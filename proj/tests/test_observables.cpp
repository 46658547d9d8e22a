#include <doctest.h>

#include "eos/observables.hpp"
#include "eos/oracles.hpp"
#include "support.hpp"

using namespace eos;
using testing::baseline;

namespace {

double mean_s(const ProbeState& st, int beam, cplx p, double n_d)
{
    return 2.0 * std::sqrt(n_d) * (I * p * mode_moments(st, beam).a).real();
}

const cplx kQuarter = I;
const cplx kHalf = 1.0;

}  // namespace

TEST_CASE("closed-form negativity")
{
    ProbeMatrixElements e;
    e.m = 0.2;
    e.l11 = e.l22 = 0.1;
    CHECK(negativity(e).negativity == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(negativity(e).phi_m == 1.0);
    e.l11 = 0.25;
    CHECK(negativity(e).negativity == 0.0);
    CHECK(negativity(e).e1 < 0.0);
    CHECK(negativity(ProbeMatrixElements{}).phi_m == 0.0);
}

TEST_CASE("partial-transpose negativity")
{
    CHECK(negativity_oracle(assemble_state(ProbeMatrixElements{})) == 0.0);
    ProbeMatrixElements e;
    e.l11 = e.l22 = 1e-4;
    e.m = 3e-4;
    e.x = x_fourth_order(e);
    CHECK(std::abs(negativity_oracle(assemble_state(e)) - 2e-4) < 1e-7);
    ProbeState mixed = ProbeState::Zero();
    mixed(0, 0) = mixed(3, 3) = 0.5;
    CHECK(negativity_oracle(mixed) < 1e-15);

    testing::Gen g(17);
    for (int i = 0; i < 300; ++i) {
        // equal beams give l11 = l22, where the closed form is exact to second order
        ProbeMatrixElements r = g.elements(std::pow(10.0, g.uniform(-7.0, -3.0)));
        r.l22 = r.l11;
        r.x = x_fourth_order(r);
        const double scale = std::max({r.l11, r.l22, std::abs(r.l12), std::abs(r.m), std::abs(r.k11), std::abs(r.k22)});
        CHECK(std::abs(negativity(r).negativity - negativity_oracle(assemble_state(r))) <=
              std::max(1e-10, 10.0 * scale * scale));
    }
}

TEST_CASE("witness expectation")
{
    ProbeMatrixElements e;
    e.l11 = e.l22 = 0.1;
    e.m = 0.2;
    CHECK(witness_expectation(e) == doctest::Approx(-0.1).epsilon(1e-15));
    testing::Gen g(2);
    for (int i = 0; i < 100; ++i) {
        const ProbeMatrixElements r = g.elements(1e-4);
        const NegativityReport n = negativity(r);
        if (n.negativity > 0.0)
            CHECK(witness_expectation(r) == doctest::Approx(-n.e1).epsilon(1e-14));
    }
}

TEST_CASE("witness budget")
{
    testing::Gen g(8);
    for (int i = 0; i < 100; ++i) {
        ProbeMatrixElements r = g.elements(1e-4);
        r.l22 = r.l11;  // identical pulses
        r.x = x_fourth_order(r);
        for (double n_d : {1.0, 1e6}) {
            const WitnessBudget b = witness_budget(r, n_d);
            // photon counts include the fourth-order x, so <W> = l11 - |m| up to x
            CHECK(std::abs(b.combination - (r.l11 + r.x - std::abs(r.m))) <= 1e-12 * std::abs(r.m));
            CHECK(b.expectation == witness_expectation(r));
            // single-beam sums carry 4 <a†a>/N_d = 4 (l11 + x)/N_d
            CHECK(std::abs(b.single_beam_1 * n_d - 4.0 * (r.l11 + r.x)) <= 1e-15);
            const double phi = std::arg(r.m);
            CHECK(std::abs(b.printed_combination - (2.0 * r.l11 + 2.0 * r.x - std::abs(r.m) * std::cos(phi))) <=
                  1e-12 * std::abs(r.m));
        }
    }
    ProbeMatrixElements real_m;
    real_m.m = 1e-4;
    const WitnessBudget b = witness_budget(real_m, 1.0);
    CHECK(b.theta.sign == 1);
    CHECK(std::abs(b.theta.theta - pi) < 1e-7);
    CHECK_THROWS(witness_budget(ProbeMatrixElements{}, 1.0));
}

TEST_CASE("mean signal")
{
    const ExperimentConfig cfg = testing::separated(baseline(), 0.5);
    CHECK(mean_signal(vacuum_elements(cfg), 1) == 0.0);
    ExperimentConfig small = cfg;
    small.crystal_length = 0.2e-3;
    ClassicalWaveform w;
    w.components.push_back({2.0e3, 0.0, 0.5e5, 2.5e4, 1.2 * thz, 0.4});
    ClassicalWaveform flipped = w;
    flipped.components[0].phase += pi;
    const ProbeMatrixElements c = coherent_elements(small, w), f = coherent_elements(small, flipped);
    for (int beam = 1; beam <= 2; ++beam) {
        CHECK(std::abs(mean_signal(c, beam) + mean_signal(f, beam)) <= 1e-12 * std::abs(mean_signal(c, beam)));
        const double ref = 2.0 * std::sqrt(element_prefactor(small)) * oracle_classical_overlap(small, w, beam, 32).real();
        CHECK(std::abs(mean_signal(c, beam) - ref) <= 1e-4 * std::abs(ref));
    }
    CHECK_THROWS(mean_signal(c, 3));
}

TEST_CASE("moments read off the state")
{
    testing::Gen g(12);
    const ProbeMatrixElements e = g.elements(1e-3, true);
    const ProbeState st = assemble_state(e);
    CHECK(std::abs(mode_moments(st, 1).a - e.l1) < 1e-15);
    CHECK(std::abs(mode_moments(st, 2).a - e.l2) < 1e-15);
    CHECK(std::abs(mode_moments(st, 1).aa - std::sqrt(2.0) * e.k11) < 1e-15);
    CHECK(std::abs(pair_moment(st, false) - e.m) < 1e-15);
    CHECK(std::abs(pair_moment(st, true) - e.l12) < 1e-15);
    CHECK(mode_moments(st, 1).ada == doctest::Approx(e.l11 + e.x).epsilon(1e-12));
}

TEST_CASE("two-beam correlation")
{
    const ProbeState vac = assemble_state(ProbeMatrixElements{});
    CHECK(two_beam_correlation(vac, WavePlateSetting{pi / 2, 1}, WavePlateSetting{pi / 2, 1}, 1.0) == 0.0);

    testing::Gen g(31);
    for (int i = 0; i < 50; ++i) {
        const ProbeMatrixElements e = g.elements(1e-3, true);
        const double n_d = g.uniform(0.5, 5.0);
        const double expected =
            2.0 / n_d * ((e.m + e.l12).real() - 2.0 * e.l1.real() * e.l2.real());
        CHECK(std::abs(two_beam_correlation(assemble_state(e), kQuarter, kQuarter, n_d) - expected) < 1e-13);
    }
    // the connected correlator of a mixture, built from joint moments
    for (int i = 0; i < 50; ++i) {
        const ProbeState r1 = g.density_matrix(), r2 = g.density_matrix();
        const double alpha = g.uniform(0.0, 1.0), n_d = 2.0;
        const cplx p1 = ellipsometry_phase(g.setting()), p2 = ellipsometry_phase(g.setting());
        auto joint = [&](const ProbeState& r) {
            return two_beam_correlation(r, p1, p2, n_d) * n_d * n_d + mean_s(r, 1, p1, n_d) * mean_s(r, 2, p2, n_d);
        };
        const ProbeState mix = alpha * r1 + (1.0 - alpha) * r2;
        const double m1 = alpha * mean_s(r1, 1, p1, n_d) + (1.0 - alpha) * mean_s(r2, 1, p1, n_d);
        const double m2 = alpha * mean_s(r1, 2, p2, n_d) + (1.0 - alpha) * mean_s(r2, 2, p2, n_d);
        const double expected = (alpha * joint(r1) + (1.0 - alpha) * joint(r2) - m1 * m2) / (n_d * n_d);
        CHECK(std::abs(two_beam_correlation(mix, p1, p2, n_d) - expected) < 1e-12);
    }
}

TEST_CASE("single-beam second moment")
{
    const ProbeState vac = assemble_state(ProbeMatrixElements{});
    testing::Gen g(40);
    for (int i = 0; i < 20; ++i) {
        const WavePlateSetting s = g.setting();
        CHECK(single_beam_variance(vac, 1, s, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
    }
    for (int i = 0; i < 100; ++i) {
        const ProbeState r = g.density_matrix();
        const double n_d = g.uniform(0.5, 10.0);
        for (int beam = 1; beam <= 2; ++beam) {
            const ModeMoments m = mode_moments(r, beam);
            const cplx p = ellipsometry_phase(g.setting());
            const double expected = n_d - 2.0 * n_d * (p * p * m.aa).real() + 2.0 * n_d * m.ada;
            CHECK(std::abs(single_beam_variance(r, beam, p, n_d) - expected) < 1e-10);
            // each setting carries its own shot noise N_d
            const double sum = single_beam_variance(r, beam, kQuarter, n_d) + single_beam_variance(r, beam, kHalf, n_d);
            CHECK(std::abs(sum - (2.0 * n_d + 4.0 * n_d * m.ada)) < 1e-10);
        }
    }
}

TEST_CASE("shot-noise-removed single beam")
{
    testing::Gen g(41);
    const ProbeState vac = assemble_state(ProbeMatrixElements{});
    for (int i = 0; i < 20; ++i)
        CHECK(shot_noise_removed(vac, 1, g.setting(), g.setting(), 2.0) == 0.0);
    for (int i = 0; i < 100; ++i) {
        const ProbeState r = g.density_matrix();
        const double n_d = g.uniform(0.5, 10.0);
        for (int beam = 1; beam <= 2; ++beam) {
            const double sum = shot_noise_removed(r, beam, kQuarter, kQuarter, n_d) +
                               shot_noise_removed(r, beam, kHalf, kHalf, n_d);
            CHECK(std::abs(sum - 4.0 * mode_moments(r, beam).ada / n_d) < 1e-10);
        }
    }
    // element form against the explicit beam-splitter computation
    for (int i = 0; i < 30; ++i) {
        const ProbeMatrixElements e = g.elements(1e-2, true);
        const ProbeState st = assemble_state(e);
        const cplx pr = ellipsometry_phase(g.setting()), pt = ellipsometry_phase(g.setting());
        for (int beam = 1; beam <= 2; ++beam)
            CHECK(std::abs(shot_noise_removed_connected(st, beam, pr, pt, 3.0) -
                           oracle_shot_noise_removed(st, beam, pr, pt, 3.0)) < 1e-12);
    }
}

TEST_CASE("Bell correlator limits")
{
    ProbeMatrixElements pure;
    pure.m = 2e-4;
    pure.x = x_fourth_order(pure);
    const double n_lo = std::abs(pure.m);
    testing::Gen g(50);
    for (int i = 0; i < 50; ++i) {
        const cplx p1 = ellipsometry_phase(g.setting()), p2 = ellipsometry_phase(g.setting());
        CHECK(std::abs(bell_correlation(pure, p1, p2, n_lo) - (p1 * p2).real()) < 1e-12);
    }
    const WavePlateSetting q{pi / 2, 1};
    const BellSettings same{q, q, q, q, n_lo};
    CHECK(bell_value(pure, same) <= 2.0 + 1e-12);

    for (int i = 0; i < 50; ++i) {
        const ProbeMatrixElements e = g.elements(1e-3);
        const double lambda = g.uniform(0.1, 10.0);
        const BellSettings s{g.setting(), g.setting(), g.setting(), g.setting(), std::abs(e.m)};
        BellSettings scaled = s;
        scaled.n_lo *= lambda;
        CHECK(std::abs(bell_value(e, s) - bell_value(scale_elements(e, lambda), scaled)) < 1e-12);
    }
}

TEST_CASE("Bell optimisation")
{
    ProbeMatrixElements pure;
    pure.m = std::polar(3e-4, 0.7);
    pure.x = x_fourth_order(pure);
    const BellResult r = bell_optimize(pure, std::abs(pure.m));
    CHECK(std::abs(r.b_max - 2.0 * std::sqrt(2.0)) < 1e-3);
    CHECK(bell_value(pure, r.settings) == doctest::Approx(r.b_max).epsilon(1e-12));

    ProbeMatrixElements none;
    none.l11 = none.l22 = 1e-4;
    none.x = x_fourth_order(none);
    CHECK(bell_optimize(none, 1e-4).b_max == 0.0);

    testing::Gen g(60);
    for (int i = 0; i < 20; ++i) {
        const ProbeMatrixElements e = g.elements(1e-3);
        const BellResult b = bell_optimize(e, std::abs(e.m));
        CHECK(b.b_max <= 2.0 * std::sqrt(2.0) + 1e-6);
        CHECK(b.b_split <= b.b_max + 1e-15);
    }
    CHECK_THROWS(bell_optimize(pure, 0.0));
}
