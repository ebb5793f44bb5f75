#include "pillarqed/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pillarqed
{
namespace
{

double conditional_phase_at(const SystemParams& p, const QdState& dot, const BackgroundModel& bg, double omega)
{
    const Complex coupled = apply_background(reflection_amplitude(p, dot, omega), bg);
    const Complex empty = apply_background(reflection_amplitude(p, QdState::empty_cavity(), omega), bg);
    return principal_arg(coupled * std::conj(empty));
}

} // namespace

Spectrum conditional_phase_spectrum(const SystemParams& p, double omega_qd, std::span<const double> omega,
                                    const BackgroundModel& bg)
{
    const auto dot = QdState::at(omega_qd);
    std::vector<double> wrapped(omega.size());
    std::transform(omega.begin(), omega.end(), wrapped.begin(),
                   [&](double w) { return conditional_phase_at(p, dot, bg, w); });
    return {std::vector<double>(omega.begin(), omega.end()), unwrap_phase(wrapped)};
}

ConditionalPhaseMax max_conditional_phase(const SystemParams& p, double omega_qd, const BackgroundModel& bg)
{
    const auto dot = QdState::at(omega_qd);
    const auto objective = [&](double w) { return std::abs(conditional_phase_at(p, dot, bg, w)); };

    const auto grid = Grid::centred(p.omega_c(), 5.0 * p.kappa_total(), 10001).values();
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double v = objective(grid[i]);
        if (v > best_value)
        {
            best_value = v;
            best = i;
        }
    }

    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++iter)
    {
        if (fc > fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double refined = 0.5 * (a + b);
    const double refined_value = objective(refined);
    if (refined_value > best_value)
        return {refined_value, refined};
    return {best_value, grid[best]};
}

DesignPoint evaluate_design(const SystemParams& p)
{
    const auto dot = QdState::at(p.omega_c());
    const auto peak = max_conditional_phase(p, p.omega_c());
    DesignPoint point{p};
    point.max_conditional_phase = peak.magnitude;
    point.argmax_omega = peak.omega;
    point.on_resonance_conditional_phase = conditional_phase_at(p, dot, BackgroundModel{}, p.omega_c());
    point.on_resonance_reflectivity = reflectivity(p, dot, p.omega_c());
    point.kappa_over_4g = p.g() > 0.0 ? p.kappa_top() / (4.0 * p.g()) : std::numeric_limits<double>::infinity();
    point.feasible = interface_feasible(point);
    return point;
}

std::vector<DesignPoint> sweep_kappa(const SystemParams& base, std::span<const double> kappa_values)
{
    std::vector<double> kappas(kappa_values.begin(), kappa_values.end());
    std::sort(kappas.begin(), kappas.end());
    std::vector<DesignPoint> out;
    out.reserve(kappas.size());
    for (double k : kappas)
        out.push_back(evaluate_design(base.with_kappa_top(k)));
    return out;
}

bool interface_feasible(const DesignPoint& point) { return point.max_conditional_phase > std::numbers::pi / 2.0; }

double feasibility_threshold(const SystemParams& base, double lo, double hi, double tol)
{
    const auto feasible = [&](double k) { return evaluate_design(base.with_kappa_top(k)).feasible; };
    if (feasible(lo) || !feasible(hi))
        throw std::invalid_argument("feasibility_threshold: need infeasible lo and feasible hi");
    while (hi - lo > tol)
    {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace pillarqed
