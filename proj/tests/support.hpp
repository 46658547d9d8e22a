#ifndef EOS_TESTS_SUPPORT_HPP
#define EOS_TESTS_SUPPORT_HPP

#include <cmath>
#include <limits>
#include <random>

#include "eos/config.hpp"
#include "eos/elements.hpp"
#include "eos/kernels.hpp"

namespace eos::testing {

inline ExperimentConfig baseline()
{
    static const ExperimentConfig cfg = load_config(EOS_DATA_DIR "/baseline.cfg");
    return cfg;
}

// Band{ω_c + 3σω, ∞}
inline ExperimentConfig high_pass(ExperimentConfig cfg)
{
    cfg.filter = filter::Band{cfg.central_frequency + 3.0 * sigma_omega(cfg), std::numeric_limits<double>::infinity()};
    return cfg;
}

inline ExperimentConfig separated(ExperimentConfig cfg, double waists)
{
    cfg.beam_separation = waists * cfg.beam_waist;
    return cfg;
}

// hand-rolled generators on a fixed-seed engine
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    double normal() { return std::normal_distribution<double>()(rng_); }
    cplx complex_normal() { return {normal(), normal()}; }
    int sign() { return uniform(0.0, 1.0) < 0.5 ? -1 : 1; }

    WavePlateSetting setting() { return {uniform(pi / 2, 3 * pi / 2), sign()}; }

    // random 6×6 density matrix: A A† / tr
    ProbeState density_matrix()
    {
        ProbeState a;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                a(i, j) = complex_normal();
        ProbeState r = a * a.adjoint();
        return r / r.trace();
    }

    // second-order elements of size ~scale with a non-negative diagonal and x by Wick
    ProbeMatrixElements elements(double scale, bool with_means = false)
    {
        ProbeMatrixElements e;
        e.l11 = scale * uniform(0.0, 1.0);
        e.l22 = scale * uniform(0.0, 1.0);
        e.l12 = scale * complex_normal() * 0.5;
        e.m = scale * complex_normal() * 0.7;
        e.k11 = scale * complex_normal() * 0.5;
        e.k22 = scale * complex_normal() * 0.5;
        if (with_means) {
            e.l1 = std::sqrt(scale) * complex_normal() * 0.3;
            e.l2 = std::sqrt(scale) * complex_normal() * 0.3;
        }
        e.x = x_fourth_order(e);
        return e;
    }

    ClassicalWaveform waveform(const ExperimentConfig& cfg, int components)
    {
        ClassicalWaveform w;
        for (int i = 0; i < components; ++i) {
            const double omega = uniform(0.3, 3.0) * thz;
            const double k = omega * 3.2 / phys.c;
            w.components.push_back({uniform(1e2, 1e4), uniform(-0.2, 0.2) * k, uniform(-0.2, 0.2) * k,
                                    uniform(0.8, 1.0) * k, omega, uniform(-pi, pi)});
        }
        (void)cfg;
        return w;
    }

private:
    std::mt19937_64 rng_;
};

inline double rel_diff(cplx a, cplx b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace eos::testing

#endif
