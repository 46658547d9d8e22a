#ifndef EOS_CONSTANTS_HPP
#define EOS_CONSTANTS_HPP

#include <complex>
#include <numbers>

namespace eos {

using cplx = std::complex<double>;

struct PhysicalConstants {
    double hbar = 1.054571817e-34;   // J s
    double c = 299792458.0;          // m/s
    double eps0 = 8.8541878128e-12;  // F/m
    double mu0 = 1.0 / (8.8541878128e-12 * 299792458.0 * 299792458.0);  // H/m
    double kB = 1.380649e-23;        // J/K
};

inline constexpr PhysicalConstants phys{};

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// human-unit conversions; frequencies are cyclic THz turned into rad/s
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double fs = 1e-15;
inline constexpr double thz = 2.0 * pi * 1e12;

}  // namespace eos

#endif
