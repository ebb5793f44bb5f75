#pragma once

#include "pillarqed/spectrum.hpp"

#include <array>
#include <span>
#include <vector>

namespace pillarqed
{

// Rates and cavity energy of the dot-micropillar system. All values in ueV (hbar = 1).
//
//   g           dot-cavity field coupling
//   kappa_top   intracavity photon decay through the top mirror (outcoupling)
//   kappa_side  every other photon loss: sidewalls, bottom mirror, absorption
//   gamma       dot linewidth, used as gamma/2 in the reflection coefficient
//   omega_c     cavity resonance
class SystemParams
{
public:
    // Throws std::invalid_argument on non-finite values or violated signs
    // (g >= 0, kappa_top > 0, kappa_side >= 0, gamma >= 0, omega_c > 0).
    SystemParams(double g, double kappa_top, double kappa_side, double gamma, double omega_c);

    [[nodiscard]] double g() const { return g_; }
    [[nodiscard]] double kappa_top() const { return kappa_top_; }
    [[nodiscard]] double kappa_side() const { return kappa_side_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] double omega_c() const { return omega_c_; }
    [[nodiscard]] double kappa_total() const { return kappa_top_ + kappa_side_; }

    [[nodiscard]] SystemParams with_g(double g) const;
    [[nodiscard]] SystemParams with_kappa_top(double kappa_top) const;
    [[nodiscard]] SystemParams with_kappa_side(double kappa_side) const;
    [[nodiscard]] SystemParams with_gamma(double gamma) const;
    [[nodiscard]] SystemParams with_omega_c(double omega_c) const;

    bool operator==(const SystemParams&) const = default;

private:
    double g_;
    double kappa_top_;
    double kappa_side_;
    double gamma_;
    double omega_c_;
};

// Dot transition energy; an uncoupled state stands for the empty cavity (g = 0).
class QdState
{
public:
    static QdState at(double omega_qd);
    static QdState empty_cavity();

    [[nodiscard]] double omega_qd() const { return omega_qd_; }
    [[nodiscard]] bool coupled() const { return coupled_; }

    bool operator==(const QdState&) const = default;

private:
    QdState(double omega_qd, bool coupled) : omega_qd_(omega_qd), coupled_(coupled) {}

    double omega_qd_;
    bool coupled_;
};

// Parameters measured in the published fit, and the cavity line energy of the scan.
namespace reference
{
inline constexpr double g = 9.4;
inline constexpr double kappa_top = 1.2;
inline constexpr double kappa_side = 24.7;
inline constexpr double gamma = 5.0;
inline constexpr double omega_c = 1'333'596.0;

SystemParams fitted_params();
} // namespace reference

// Reflection coefficient in detuning form, delta_qd = omega_qd - omega, delta_c = omega_c - omega.
// This is the numerical kernel: callers that hold detunings directly avoid cancellation at
// absolute energies of ~1e6 ueV. Throws std::domain_error on a degenerate denominator.
[[nodiscard]] Complex reflection_from_detunings(double g, double kappa_top, double kappa_side, double gamma,
                                                double delta_qd, double delta_c);

[[nodiscard]] Complex reflection_amplitude(const SystemParams& p, const QdState& qd, double omega);
[[nodiscard]] double reflectivity(const SystemParams& p, const QdState& qd, double omega);

// Principal value in (-pi, pi]. The argument of an exactly zero amplitude is 0 (logged as a warning).
[[nodiscard]] double phase(const SystemParams& p, const QdState& qd, double omega);
[[nodiscard]] double principal_arg(Complex z);

[[nodiscard]] AmplitudeSpectrum amplitude_spectrum(const SystemParams& p, const QdState& qd,
                                                   std::span<const double> omega);
[[nodiscard]] Spectrum reflectivity_spectrum(const SystemParams& p, const QdState& qd, std::span<const double> omega);
// Unwrapped phase over the grid.
[[nodiscard]] Spectrum phase_spectrum(const SystemParams& p, const QdState& qd, std::span<const double> omega);

// Complex energies of the two dressed states, ascending real part, then ascending imaginary part.
// Requires a coupled dot.
[[nodiscard]] std::array<Complex, 2> polariton_eigenvalues(const SystemParams& p, const QdState& qd);

// Real-part gap of the dressed states at zero detuning; 0 in weak coupling.
[[nodiscard]] double rabi_splitting(const SystemParams& p);

enum class CouplingRegime
{
    weak,
    strong
};

// Strong iff g > (kappa_top + kappa_side + gamma) / 4.
[[nodiscard]] CouplingRegime coupling_regime(const SystemParams& p);
[[nodiscard]] const char* to_string(CouplingRegime regime);

[[nodiscard]] double q_factor(const SystemParams& p);

} // namespace pillarqed
