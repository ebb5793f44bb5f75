#pragma once

#include "pillarqed/scattering.hpp"

#include <complex>
#include <cstdint>
#include <random>

namespace pillarqed::test
{

// Restatement of the reflection coefficient, written independently of the library
// kernel: one expression in absolute energies.
inline std::complex<double> reflection_oracle(double g, double kappa, double kappa_s, double gamma, double omega_c,
                                              double omega_qd, double omega)
{
    using C = std::complex<double>;
    const C i{0.0, 1.0};
    return 1.0 - kappa * (i * (omega_qd - omega) + gamma / 2.0) /
                     ((i * (omega_qd - omega) + gamma / 2.0) * (i * (omega_c - omega) + kappa / 2.0 + kappa_s / 2.0) +
                      g * g);
}

struct RandomParams
{
    std::mt19937_64 rng;
    explicit RandomParams(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    SystemParams draw(double omega_c_lo = 1.3e6, double omega_c_hi = 1.34e6)
    {
        return {uniform(0.0, 50.0), uniform(0.01, 50.0), uniform(0.0, 50.0), uniform(0.0, 20.0),
                uniform(omega_c_lo, omega_c_hi)};
    }
};

} // namespace pillarqed::test
