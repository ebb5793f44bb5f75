#include "pillarqed/design.hpp"
#include "pillarqed/estimation.hpp"
#include "pillarqed/interferometer.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace pillarqed;

namespace
{

constexpr double pi = std::numbers::pi;
constexpr double wc = reference::omega_c;
const SystemParams device = reference::fitted_params();

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::complex<double> oracle(double g, double k, double ks, double gm, double w_c, double w_q, double w)
{
    const std::complex<double> i{0.0, 1.0};
    return 1.0 - k * (i * (w_q - w) + gm / 2.0) / ((i * (w_q - w) + gm / 2.0) * (i * (w_c - w) + (k + ks) / 2.0) + g * g);
}

void criterion_1()
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 10000; ++i)
    {
        const double g = 50.0 * u(rng);
        const double k = 0.01 + 50.0 * u(rng);
        const double ks = 50.0 * u(rng);
        const double gm = 20.0 * u(rng);
        const double w_c = 1.3e6 + 4e4 * u(rng);
        const double w_q = w_c + 200.0 * (u(rng) - 0.5);
        const double w = w_c + 200.0 * (u(rng) - 0.5);
        const auto got = reflection_amplitude({g, k, ks, gm, w_c}, QdState::at(w_q), w);
        const auto want = oracle(g, k, ks, gm, w_c, w_q, w);
        worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    const double t = seconds_since(t0);
    report(1, worst < 1e-12 && t < 1.0, fmt("max relative error %.3g over 1e4 draws, %.3f s", worst, t));
}

void criterion_2()
{
    const double q = q_factor(device);
    report(2, std::abs(q - 51490.0) <= 1.0 && std::abs(q - 51000.0) / 51000.0 <= 0.02, fmt("Q = %.3f", q));
}

void criterion_3()
{
    const bool strong = coupling_regime(device) == CouplingRegime::strong;
    const bool weak = coupling_regime(device.with_g(7.7)) == CouplingRegime::weak;
    report(3, strong && weak,
           fmt("g=9.4 -> %s, g=7.7 -> %s", to_string(coupling_regime(device)),
               to_string(coupling_regime(device.with_g(7.7)))));
}

FitProblem intensity_problem(const std::vector<double>& omega, double sigma, std::uint64_t seed)
{
    FitProblem problem;
    auto spectrum = measured_intensity(amplitude_spectrum(device, QdState::at(wc), omega), BackgroundModel{});
    if (sigma > 0.0)
        spectrum = with_multiplicative_noise(spectrum, sigma, seed);
    problem.observed.push_back({Observable::intensity, true, spectrum, {}});
    problem.bounds = FitProblem::default_bounds(problem.observed);
    for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
        problem.free_mask[static_cast<std::size_t>(p)] = true;
    return problem;
}

double worst_rate_error(const ModelParams& got)
{
    double worst = 0.0;
    for (auto [p, truth] : {std::pair{Param::g, reference::g}, std::pair{Param::kappa_top, reference::kappa_top},
                            std::pair{Param::kappa_side, reference::kappa_side}, std::pair{Param::gamma, reference::gamma}})
        worst = std::max(worst, std::abs(got[p] - truth) / truth);
    return worst;
}

void criterion_4()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> perturb(0.8, 1.2);

    double noiseless = 0.0;
    for (int trial = 0; trial < 4; ++trial)
    {
        auto problem = intensity_problem(omega, 0.0, 0);
        problem.initial_guess = ModelParams::from(device, wc);
        for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
            problem.initial_guess[p] *= perturb(rng);
        const auto result = fit(problem);
        noiseless = std::max(noiseless, result.converged ? worst_rate_error(result.params) : 1.0);
    }

    std::vector<double> noisy;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        auto problem = intensity_problem(omega, 0.01, seed);
        problem.initial_guess = ModelParams::from(device, wc);
        for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
            problem.initial_guess[p] *= perturb(rng);
        noisy.push_back(worst_rate_error(fit(problem).params));
    }
    const double med = median(noisy);
    const double t = seconds_since(t0);
    report(4, noiseless < 0.01 && med < 0.10 && t < 30.0,
           fmt("noiseless worst rel. error %.2g, noisy median worst rel. error %.3g, %.2f s", noiseless, med, t));
}

void criterion_5()
{
    const double intrinsic = max_conditional_phase(device, wc).magnitude;
    const double measured = max_conditional_phase(device, wc, BackgroundModel{0.7}).magnitude;
    report(5, std::abs(intrinsic - 0.12) <= 0.02 && std::abs(measured - 0.05) <= 0.01,
           fmt("intrinsic max %.4f rad (target 0.12 +- 0.02), b=0.7 max %.4f rad (target 0.05 +- 0.01)", intrinsic,
               measured));
}

void criterion_6()
{
    const auto design = evaluate_design(device.with_kappa_top(4.0 * reference::g));
    const auto built = evaluate_design(device);
    const bool pass = design.feasible && std::abs(std::abs(design.on_resonance_conditional_phase) - pi) < 1e-9 &&
                      std::abs(design.on_resonance_reflectivity - 0.19) <= 0.03 && !built.feasible;
    report(6, pass,
           fmt("kappa=37.6: feasible=%d, on-resonance phase %.6f, R %.4f; kappa=1.2: feasible=%d", design.feasible,
               design.on_resonance_conditional_phase, design.on_resonance_reflectivity, built.feasible));
}

void criterion_7()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_phase = 0.0;
    double worst_sum = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const double phi = (u(rng) - 0.5) * 0.999 * pi;
        const Complex r = std::polar(0.01 + 0.99 * u(rng), phi);
        const auto ref = ReferenceArm::calibrated(std::polar(0.05 + 0.95 * u(rng), 2.0 * pi * u(rng)));
        const auto rec = simulate_channels(r, ref);
        worst_phase = std::max(worst_phase, std::abs(extract_phase(rec, ref).phase - phi));
        worst_sum = std::max(worst_sum, std::abs(rec.d + rec.a - rec.h - rec.v));
    }
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    for (const auto& rec :
         simulate_channel_scan(amplitude_spectrum(device, QdState::at(wc), omega), ReferenceArm::calibrated({0.9, 0.0})))
        worst_sum = std::max(worst_sum, std::abs(rec.d + rec.a - rec.h - rec.v));
    report(7, worst_phase < 1e-9 && worst_sum < 1e-12,
           fmt("max phase error %.3g, max |d+a-h-v| %.3g", worst_phase, worst_sum));
}

struct ScanSummary
{
    double gap = 0.0;
    bool never_cross = true;
    double closed_form = 0.0;
    double eigen = 0.0;
};

ScanSummary anticrossing_summary()
{
    const TuningModel tuning;
    std::vector<double> temps;
    for (int i = 0; i <= 120; ++i)
        temps.push_back(14.0 + 0.1 * i);
    const auto omega = Grid::centred(wc, 150.0, 6001).values();
    const auto scan = synthesize_scan(device, tuning, temps, omega);
    ScanSummary s;
    s.gap = anticrossing_gap(scan).gap;
    for (std::size_t i = 0; i < temps.size(); ++i)
    {
        const auto pair = track_dips(scan)[i];
        if (pair && !(pair->separation() > 0.0))
            s.never_cross = false;
    }
    s.closed_form = rabi_splitting(device);
    const auto [lo, hi] = polariton_eigenvalues(device, QdState::at(wc));
    s.eigen = hi.real() - lo.real();
    return s;
}

void criterion_8(const ScanSummary& s)
{
    const double rel = std::abs(s.gap - s.closed_form) / s.closed_form;
    report(8, s.never_cross && rel <= 0.25 && std::abs(s.eigen - s.closed_form) < 1e-9,
           fmt("minimum dip gap %.4f ueV vs closed form %.4f ueV (eigen %.4f), off by %.1f%% (limit 25%%)", s.gap,
               s.closed_form, s.eigen, 100.0 * rel));
}

void criterion_9(const ScanSummary& s)
{
    const auto omega = Grid::centred(wc, 100.0, 4001).values();
    const auto empty = measured_intensity(amplitude_spectrum(device, QdState::empty_cavity(), omega), BackgroundModel{});
    const auto coupled = measured_intensity(amplitude_spectrum(device, QdState::at(wc), omega), BackgroundModel{});
    const std::size_t empty_dips = locate_minima(empty).size();
    const std::size_t coupled_dips = locate_minima(coupled).size();
    const bool double_dip = empty_dips == 1 && coupled_dips == 2;

    const double q = q_factor(device);
    const double intrinsic = max_conditional_phase(device, wc).magnitude;
    const double measured = max_conditional_phase(device, wc, BackgroundModel{0.7}).magnitude;
    const auto design = evaluate_design(device.with_kappa_top(37.6));
    const bool scalars = std::abs(q - 51000.0) / 51000.0 <= 0.02 && std::abs(intrinsic - 0.12) <= 0.02 &&
                         std::abs(measured - 0.05) <= 0.01 && std::abs(design.on_resonance_reflectivity - 0.19) <= 0.03 &&
                         std::abs(s.gap - s.closed_form) / s.closed_form <= 0.25;
    report(9, double_dip && scalars,
           fmt("dips empty=%zu coupled=%zu (double-dip emergence %s); quoted scalar summaries %s", empty_dips,
               coupled_dips, double_dip ? "ok" : "missing", scalars ? "reproduced" : "not all reproduced"));
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    const auto scan = anticrossing_summary();
    criterion_8(scan);
    criterion_9(scan);
    std::printf("%d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
