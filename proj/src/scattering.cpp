#include "pillarqed/scattering.hpp"

#include "pillarqed/log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pillarqed
{
namespace
{

void require(bool condition, const char* message)
{
    if (!condition)
        throw std::invalid_argument(message);
}

} // namespace

SystemParams::SystemParams(double g, double kappa_top, double kappa_side, double gamma, double omega_c)
    : g_(g), kappa_top_(kappa_top), kappa_side_(kappa_side), gamma_(gamma), omega_c_(omega_c)
{
    require(std::isfinite(g) && std::isfinite(kappa_top) && std::isfinite(kappa_side) && std::isfinite(gamma) &&
                std::isfinite(omega_c),
            "SystemParams: all values must be finite");
    require(g >= 0.0, "SystemParams: g must be >= 0");
    require(kappa_top > 0.0, "SystemParams: kappa_top must be > 0");
    require(kappa_side >= 0.0, "SystemParams: kappa_side must be >= 0");
    require(gamma >= 0.0, "SystemParams: gamma must be >= 0");
    require(omega_c > 0.0, "SystemParams: omega_c must be > 0");
}

SystemParams SystemParams::with_g(double g) const { return {g, kappa_top_, kappa_side_, gamma_, omega_c_}; }
SystemParams SystemParams::with_kappa_top(double k) const { return {g_, k, kappa_side_, gamma_, omega_c_}; }
SystemParams SystemParams::with_kappa_side(double k) const { return {g_, kappa_top_, k, gamma_, omega_c_}; }
SystemParams SystemParams::with_gamma(double gm) const { return {g_, kappa_top_, kappa_side_, gm, omega_c_}; }
SystemParams SystemParams::with_omega_c(double w) const { return {g_, kappa_top_, kappa_side_, gamma_, w}; }

QdState QdState::at(double omega_qd)
{
    require(std::isfinite(omega_qd) && omega_qd > 0.0, "QdState: omega_qd must be finite and > 0");
    return {omega_qd, true};
}

QdState QdState::empty_cavity() { return {0.0, false}; }

SystemParams reference::fitted_params() { return {g, kappa_top, kappa_side, gamma, omega_c}; }

Complex reflection_from_detunings(double g, double kappa_top, double kappa_side, double gamma, double delta_qd,
                                  double delta_c)
{
    const Complex dot{gamma / 2.0, delta_qd};
    const Complex cavity{(kappa_top + kappa_side) / 2.0, delta_c};
    const Complex denominator = dot * cavity + g * g;
    if (std::abs(denominator) < 1e-300)
        throw std::domain_error("reflection amplitude: degenerate denominator");
    return 1.0 - kappa_top * dot / denominator;
}

Complex reflection_amplitude(const SystemParams& p, const QdState& qd, double omega)
{
    const double delta_c = p.omega_c() - omega;
    if (!qd.coupled() || p.g() == 0.0)
    {
        // g = 0: the dot factor cancels, leaving the bare cavity response.
        const Complex cavity{p.kappa_total() / 2.0, delta_c};
        if (std::abs(cavity) < 1e-300)
            throw std::domain_error("reflection amplitude: degenerate denominator");
        return 1.0 - p.kappa_top() / cavity;
    }
    return reflection_from_detunings(p.g(), p.kappa_top(), p.kappa_side(), p.gamma(), qd.omega_qd() - omega,
                                     delta_c);
}

double reflectivity(const SystemParams& p, const QdState& qd, double omega)
{
    return std::norm(reflection_amplitude(p, qd, omega));
}

double principal_arg(Complex z)
{
    if (z == Complex{0.0, 0.0})
    {
        log().warn("phase of a zero amplitude is undefined; returning 0");
        return 0.0;
    }
    const double angle = std::arg(z);
    // std::arg gives -pi for (negative, -0.0); map onto (-pi, pi].
    return angle == -std::numbers::pi ? std::numbers::pi : angle;
}

double phase(const SystemParams& p, const QdState& qd, double omega)
{
    return principal_arg(reflection_amplitude(p, qd, omega));
}

AmplitudeSpectrum amplitude_spectrum(const SystemParams& p, const QdState& qd, std::span<const double> omega)
{
    std::vector<Complex> values(omega.size());
    std::transform(omega.begin(), omega.end(), values.begin(),
                   [&](double w) { return reflection_amplitude(p, qd, w); });
    return {std::vector<double>(omega.begin(), omega.end()), std::move(values)};
}

Spectrum reflectivity_spectrum(const SystemParams& p, const QdState& qd, std::span<const double> omega)
{
    std::vector<double> values(omega.size());
    std::transform(omega.begin(), omega.end(), values.begin(), [&](double w) { return reflectivity(p, qd, w); });
    return {std::vector<double>(omega.begin(), omega.end()), std::move(values)};
}

Spectrum phase_spectrum(const SystemParams& p, const QdState& qd, std::span<const double> omega)
{
    std::vector<double> wrapped(omega.size());
    std::transform(omega.begin(), omega.end(), wrapped.begin(), [&](double w) { return phase(p, qd, w); });
    return {std::vector<double>(omega.begin(), omega.end()), unwrap_phase(wrapped)};
}

std::array<Complex, 2> polariton_eigenvalues(const SystemParams& p, const QdState& qd)
{
    if (!qd.coupled())
        throw std::invalid_argument("polariton_eigenvalues: requires a coupled dot");
    const Complex dot{qd.omega_qd(), -p.gamma() / 2.0};
    const Complex cavity{p.omega_c(), -p.kappa_total() / 2.0};
    const Complex mean = 0.5 * (dot + cavity);
    const Complex half_difference = 0.5 * (dot - cavity);
    const Complex root = std::sqrt(half_difference * half_difference + p.g() * p.g());
    std::array<Complex, 2> eig{mean - root, mean + root};
    std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return eig;
}

double rabi_splitting(const SystemParams& p)
{
    // At zero detuning the discriminant g^2 - ((K - gamma)/4)^2 is real.
    const double quarter = (p.kappa_total() - p.gamma()) / 4.0;
    const double discriminant = p.g() * p.g() - quarter * quarter;
    return discriminant > 0.0 ? 2.0 * std::sqrt(discriminant) : 0.0;
}

CouplingRegime coupling_regime(const SystemParams& p)
{
    return p.g() > (p.kappa_total() + p.gamma()) / 4.0 ? CouplingRegime::strong : CouplingRegime::weak;
}

const char* to_string(CouplingRegime regime) { return regime == CouplingRegime::strong ? "strong" : "weak"; }

double q_factor(const SystemParams& p) { return p.omega_c() / p.kappa_total(); }

} // namespace pillarqed
