#pragma once

#include "pillarqed/interferometer.hpp"
#include "pillarqed/optimizer.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/spectrum.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pillarqed
{

enum class Param : std::size_t
{
    g,
    kappa_top,
    kappa_side,
    gamma,
    omega_c,
    omega_qd,
    background,
    beta,
};

inline constexpr std::size_t param_count = 8;
inline constexpr std::array<Param, param_count> all_params{Param::g,       Param::kappa_top, Param::kappa_side,
                                                           Param::gamma,   Param::omega_c,   Param::omega_qd,
                                                           Param::background, Param::beta};

[[nodiscard]] std::string_view param_name(Param p);
[[nodiscard]] std::optional<Param> param_from_name(std::string_view name);
[[nodiscard]] constexpr bool is_energy(Param p) { return p == Param::omega_c || p == Param::omega_qd; }

// Full forward-model vector: the scattering parameters, the coherent background fraction b and
// the reference amplitude |beta|, which scales every modelled intensity by |beta|^2.
struct ModelParams
{
    std::array<double, param_count> values{};

    [[nodiscard]] double& operator[](Param p) { return values[static_cast<std::size_t>(p)]; }
    [[nodiscard]] double operator[](Param p) const { return values[static_cast<std::size_t>(p)]; }

    [[nodiscard]] SystemParams system() const;
    [[nodiscard]] QdState dot(bool coupled) const;
    [[nodiscard]] BackgroundModel background_model(double background_phase = 0.0) const;

    static ModelParams from(const SystemParams& p, double omega_qd, double background = 0.0, double beta = 1.0);

    bool operator==(const ModelParams&) const = default;
};

enum class Observable
{
    intensity,
    phase,
};

struct Observation
{
    Observable kind = Observable::intensity;
    bool coupled = true;
    Spectrum data;
    // Empty means 1/sqrt(N) on every point so each block carries comparable weight.
    std::vector<double> weights;
};

struct Bounds
{
    double lower = 0.0;
    double upper = 0.0;
};

struct FitProblem
{
    std::vector<Observation> observed;
    std::array<bool, param_count> free_mask{};
    std::array<Bounds, param_count> bounds{};
    ModelParams initial_guess;
    double background_phase = 0.0;

    // Throws std::invalid_argument if there is no free parameter, a bound excludes the guess,
    // a weight vector has the wrong length or is negative, or every weight is zero.
    void validate() const;

    // Rates in [0, 1e3] ueV (kappa_top strictly positive), energies within the scan window,
    // b in [0, 0.999], |beta| in [1e-3, 1].
    static std::array<Bounds, param_count> default_bounds(std::span<const Observation> observed);
};

// Model intensity / unwrapped phase on an observation's grid.
[[nodiscard]] std::vector<double> model_values(const ModelParams& params, const Observation& obs,
                                               double background_phase = 0.0);

// Weighted (model - observed) for every observation, concatenated in order.
[[nodiscard]] std::vector<double> residuals(const ModelParams& params, const FitProblem& problem);

struct FitResult
{
    ModelParams params;
    double residual_norm = 0.0; // weighted sum of squares
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string message;
    // Standard errors for free parameters: NaN for fixed ones, +inf for ones sitting on a bound.
    std::array<double, param_count> std_errors{};
    double covariance_condition = 0.0;
    std::vector<double> cost_history;
};

[[nodiscard]] FitResult fit(const FitProblem& problem, const LeastSquaresOptions& options = {});

// Runs fit() from each guess and keeps the lowest residual norm (ties go to the earlier guess).
[[nodiscard]] FitResult fit_best_of(const FitProblem& problem, std::span<const ModelParams> guesses,
                                    const LeastSquaresOptions& options = {});

// Jacobian of residuals() w.r.t. the free parameters at params (row-major).
[[nodiscard]] std::vector<double> residual_jacobian(const ModelParams& params, const FitProblem& problem);

struct Uncertainty
{
    std::array<double, param_count> std_errors{};
    double condition = 0.0;
};

// s^2 (J^T J)^-1 with s^2 = SSR / (m - p), m the count of non-zero-weight residuals.
[[nodiscard]] Uncertainty uncertainty(const FitResult& result, const FitProblem& problem);

struct LorentzianDip
{
    double centre = 0.0;
    double fwhm = 0.0;
    double depth = 0.0;
    double baseline = 0.0;
    double q = 0.0;
    double residual_rms = 0.0;
    bool converged = false;
};

// baseline - depth * (fwhm/2)^2 / ((omega - centre)^2 + (fwhm/2)^2), Q = centre / fwhm.
// Throws std::domain_error when no dip stands out (depth < 3x residual scatter).
[[nodiscard]] LorentzianDip estimate_q_from_linewidth(const Spectrum& s, double omega_c_guess);

struct Minimum
{
    double omega = 0.0;
    double value = 0.0;
};

// Interior local minima refined by 3-point quadratic interpolation, in ascending omega.
[[nodiscard]] std::vector<Minimum> locate_minima(const Spectrum& s);

struct SplittingEstimate
{
    Minimum lower;
    Minimum upper;
    double g = 0.0; // half the separation
};

// Uses the two deepest local minima. Throws std::domain_error if fewer than two exist.
[[nodiscard]] SplittingEstimate estimate_g_from_splitting(const Spectrum& s);

} // namespace pillarqed
