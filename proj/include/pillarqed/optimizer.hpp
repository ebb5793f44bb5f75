#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pillarqed
{

// Fills `out` (size fixed by the problem) with residuals at `x`.
using ResidualFunction = std::function<void(std::span<const double> x, std::span<double> out)>;

struct LeastSquaresOptions
{
    std::size_t max_iterations = 500;
    double relative_decrease_tolerance = 1e-12;
    std::size_t stall_iterations = 3;
    double gradient_tolerance = 1e-10;
    double relative_step = 1e-6;
    // Finite-difference step is relative_step * max(|x|, step_floor).
    double step_floor = 1.0;
    double initial_damping = 1e-3;
    double max_damping = 1e20;
};

struct LeastSquaresResult
{
    std::vector<double> x;
    double cost = 0.0; // sum of squared residuals
    double gradient_norm = 0.0;
    std::size_t iterations = 0; // accepted steps
    std::size_t evaluations = 0;
    bool converged = false;
    std::string message;
    // Cost after every accepted step, starting with the initial cost.
    std::vector<double> cost_history;
};

// Central-difference Jacobian (row-major, residual_count x parameter_count). Steps are pulled
// inward near a bound so that every evaluation stays inside [lower, upper].
[[nodiscard]] std::vector<double> numeric_jacobian(const ResidualFunction& f, std::span<const double> x,
                                                   std::size_t residual_count, std::span<const double> lower,
                                                   std::span<const double> upper, const LeastSquaresOptions& options);

// Bound-clipped Levenberg-Marquardt with Marquardt diagonal scaling.
//
// Stops with converged = true when the gradient J^T r has infinity norm below
// gradient_tolerance, or after stall_iterations successive accepted steps whose relative cost
// decrease is below relative_decrease_tolerance. Reaching max_iterations, or damping above
// max_damping without an acceptable step, returns converged = false. Never throws on
// non-convergence; exceptions from `f` propagate.
[[nodiscard]] LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, std::vector<double> x0,
                                                     std::size_t residual_count, std::span<const double> lower,
                                                     std::span<const double> upper,
                                                     const LeastSquaresOptions& options = {});

} // namespace pillarqed
