#pragma once

#include "pillarqed/interferometer.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/spectrum.hpp"

#include <span>
#include <vector>

namespace pillarqed
{

// Unwrapped phase of (coupled * conj(empty)) over the grid, i.e. phi_d - phi_c with the
// branch fixed by the first sample. The background, if any, is applied to both amplitudes.
[[nodiscard]] Spectrum conditional_phase_spectrum(const SystemParams& p, double omega_qd, std::span<const double> omega,
                                                  const BackgroundModel& bg = BackgroundModel{});

struct ConditionalPhaseMax
{
    double magnitude = 0.0; // in [0, pi]
    double omega = 0.0;
};

// Largest |principal arg(coupled / empty)| over omega_c +- 5 (kappa_top + kappa_side):
// 10001-point scan, then golden-section refinement around the best sample.
[[nodiscard]] ConditionalPhaseMax max_conditional_phase(const SystemParams& p, double omega_qd,
                                                        const BackgroundModel& bg = BackgroundModel{});

struct DesignPoint
{
    SystemParams params;
    double max_conditional_phase = 0.0;
    double argmax_omega = 0.0;
    double on_resonance_conditional_phase = 0.0;
    double on_resonance_reflectivity = 0.0; // coupled, omega = omega_qd = omega_c
    bool feasible = false;
    // kappa_top / (4 g): advisory, the regime of interest keeps it near 1.
    double kappa_over_4g = 0.0;
};

// Evaluated at zero dot-cavity detuning, without background.
[[nodiscard]] DesignPoint evaluate_design(const SystemParams& p);

// One point per kappa_top (sorted ascending) with g, kappa_side, gamma and omega_c held fixed.
[[nodiscard]] std::vector<DesignPoint> sweep_kappa(const SystemParams& base, std::span<const double> kappa_values);

// max_conditional_phase > pi/2.
[[nodiscard]] bool interface_feasible(const DesignPoint& point);

// Smallest kappa_top in [lo, hi] at which the interface becomes feasible, by bisection to `tol`.
// Requires infeasible at lo and feasible at hi.
[[nodiscard]] double feasibility_threshold(const SystemParams& base, double lo, double hi, double tol = 1e-6);

} // namespace pillarqed
