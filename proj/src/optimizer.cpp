#include "pillarqed/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pillarqed
{
namespace
{

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

void clip(std::span<double> x, std::span<const double> lower, std::span<const double> upper)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], lower[i], upper[i]);
}

double sum_of_squares(std::span<const double> r)
{
    double total = 0.0;
    for (double v : r)
        total += v * v;
    return total;
}

} // namespace

std::vector<double> numeric_jacobian(const ResidualFunction& f, std::span<const double> x,
                                     std::size_t residual_count, std::span<const double> lower,
                                     std::span<const double> upper, const LeastSquaresOptions& options)
{
    const std::size_t n = x.size();
    std::vector<double> jac(residual_count * n);
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> plus(residual_count);
    std::vector<double> minus(residual_count);
    for (std::size_t j = 0; j < n; ++j)
    {
        const double h = options.relative_step * std::max(std::abs(x[j]), options.step_floor);
        const double hi = std::min(x[j] + h, upper[j]);
        const double lo = std::max(x[j] - h, lower[j]);
        const double width = hi - lo;
        if (!(width > 0.0))
            continue; // pinned between coincident bounds
        probe[j] = hi;
        f(probe, plus);
        probe[j] = lo;
        f(probe, minus);
        probe[j] = x[j];
        for (std::size_t i = 0; i < residual_count; ++i)
            jac[i * n + j] = (plus[i] - minus[i]) / width;
    }
    return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, std::vector<double> x0, std::size_t residual_count,
                                       std::span<const double> lower, std::span<const double> upper,
                                       const LeastSquaresOptions& options)
{
    const std::size_t n = x0.size();
    if (n == 0)
        throw std::invalid_argument("levenberg_marquardt: no free parameters");
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("levenberg_marquardt: bounds size mismatch");

    LeastSquaresResult result;
    result.x = std::move(x0);
    clip(result.x, lower, upper);

    std::vector<double> residual(residual_count);
    std::vector<double> trial_residual(residual_count);
    std::vector<double> trial(n);
    f(result.x, residual);
    ++result.evaluations;
    result.cost = sum_of_squares(residual);
    result.cost_history.push_back(result.cost);

    double damping = options.initial_damping;
    std::size_t stalled = 0;
    std::size_t loops = 0;

    while (true)
    {
        const auto jac_data = numeric_jacobian(f, result.x, residual_count, lower, upper, options);
        result.evaluations += 2 * n;
        const Eigen::Map<const Matrix> jac(jac_data.data(), static_cast<Eigen::Index>(residual_count),
                                           static_cast<Eigen::Index>(n));
        const Eigen::Map<const Vector> r(residual.data(), static_cast<Eigen::Index>(residual_count));
        const Vector gradient = jac.transpose() * r;
        const Matrix normal = jac.transpose() * jac;
        result.gradient_norm = gradient.lpNorm<Eigen::Infinity>();

        if (result.gradient_norm < options.gradient_tolerance)
        {
            result.converged = true;
            result.message = "gradient below tolerance";
            return result;
        }
        if (result.iterations >= options.max_iterations || loops >= 20 * options.max_iterations)
        {
            result.message = "iteration cap reached";
            return result;
        }

        const double diag_max = normal.diagonal().maxCoeff();
        const double diag_floor = std::max(diag_max * 1e-12, std::numeric_limits<double>::min());
        Vector scale(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < scale.size(); ++i)
            scale[i] = std::max(normal(i, i), diag_floor);

        bool accepted = false;
        while (!accepted)
        {
            ++loops;
            if (damping > options.max_damping)
            {
                result.message = "damping limit reached without an acceptable step";
                return result;
            }
            Matrix damped = normal;
            damped.diagonal() += damping * scale;
            const Eigen::LDLT<Matrix> ldlt(damped);
            Vector step = ldlt.solve(-gradient);
            if (ldlt.info() != Eigen::Success || !step.allFinite())
            {
                damping *= 10.0;
                continue;
            }
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = result.x[i] + step[static_cast<Eigen::Index>(i)];
            clip(trial, lower, upper);
            f(trial, trial_residual);
            ++result.evaluations;
            const double trial_cost = sum_of_squares(trial_residual);
            if (std::isfinite(trial_cost) && trial_cost <= result.cost)
            {
                const double decrease =
                    result.cost > 0.0 ? (result.cost - trial_cost) / result.cost : 0.0;
                result.x = trial;
                residual.swap(trial_residual);
                result.cost = trial_cost;
                result.cost_history.push_back(trial_cost);
                ++result.iterations;
                damping = std::max(damping * 0.3, 1e-12);
                stalled = decrease < options.relative_decrease_tolerance ? stalled + 1 : 0;
                accepted = true;
            }
            else
            {
                damping *= 10.0;
            }
        }

        if (stalled >= options.stall_iterations)
        {
            result.converged = true;
            result.message = "relative decrease below tolerance";
            // Refresh the gradient at the final point for diagnostics.
            const auto final_jac = numeric_jacobian(f, result.x, residual_count, lower, upper, options);
            result.evaluations += 2 * n;
            const Eigen::Map<const Matrix> fj(final_jac.data(), static_cast<Eigen::Index>(residual_count),
                                              static_cast<Eigen::Index>(n));
            const Eigen::Map<const Vector> fr(residual.data(), static_cast<Eigen::Index>(residual_count));
            result.gradient_norm = (fj.transpose() * fr).lpNorm<Eigen::Infinity>();
            return result;
        }
    }
}

} // namespace pillarqed
