#include "unit/support.hpp"

#include "pillarqed/estimation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pillarqed;

namespace
{

const SystemParams device = reference::fitted_params();
constexpr double wc = reference::omega_c;

Spectrum intensity_of(const SystemParams& p, const QdState& qd, const std::vector<double>& omega,
                      const BackgroundModel& bg = BackgroundModel{})
{
    return measured_intensity(amplitude_spectrum(p, qd, omega), bg);
}

FitProblem device_problem(const std::vector<double>& omega, std::uint64_t noise_seed = 0, double sigma = 0.0)
{
    FitProblem problem;
    auto coupled = intensity_of(device, QdState::at(wc), omega);
    auto empty = intensity_of(device, QdState::empty_cavity(), omega);
    if (sigma > 0.0)
    {
        coupled = with_multiplicative_noise(coupled, sigma, noise_seed);
        empty = with_multiplicative_noise(empty, sigma, noise_seed + 1000);
    }
    problem.observed.push_back({Observable::intensity, true, coupled, {}});
    problem.observed.push_back({Observable::intensity, false, empty, {}});
    problem.initial_guess = ModelParams::from(device, wc);
    problem.bounds = FitProblem::default_bounds(problem.observed);
    for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
        problem.free_mask[static_cast<std::size_t>(p)] = true;
    return problem;
}

ModelParams scaled_guess(double factor)
{
    auto p = ModelParams::from(device, wc);
    for (auto k : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
        p[k] *= factor;
    return p;
}

} // namespace

TEST_CASE("parameter names round-trip")
{
    for (auto p : all_params)
        CHECK(param_from_name(param_name(p)) == p);
    CHECK_FALSE(param_from_name("nope"));
}

TEST_CASE("residuals at the truth")
{
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    auto problem = device_problem(omega);
    for (double r : residuals(problem.initial_guess, problem))
        REQUIRE(std::abs(r) < 1e-12);

    SUBCASE("zero weights give zero residuals everywhere")
    {
        problem.observed[0].weights.assign(omega.size(), 0.0);
        auto shifted = problem.initial_guess;
        shifted[Param::g] = 12.0;
        const auto r = residuals(shifted, problem);
        for (std::size_t i = 0; i < omega.size(); ++i)
            REQUIRE(r[i] == 0.0);
    }
    SUBCASE("one-point residual equals weight times model minus data")
    {
        problem.observed[1].weights.assign(omega.size(), 0.0);
        problem.observed[1].weights[1000] = 1.0;
        auto shifted = problem.initial_guess;
        shifted[Param::kappa_side] = 30.0;
        const auto r = residuals(shifted, problem);
        const double model = reflectivity(shifted.system(), QdState::empty_cavity(), omega[1000]);
        CHECK(r[omega.size() + 1000] == doctest::Approx(model - problem.observed[1].data.value_at(1000)).epsilon(1e-10));
    }
    SUBCASE("model_values agrees with the scattering kernel")
    {
        const auto v = model_values(problem.initial_guess, problem.observed[0]);
        for (std::size_t i = 0; i < omega.size(); i += 97)
            REQUIRE(v[i] == doctest::Approx(reflectivity(device, QdState::at(wc), omega[i])).epsilon(1e-12));
    }
}

TEST_CASE("problem validation")
{
    const auto omega = Grid::centred(wc, 100.0, 201).values();
    auto problem = device_problem(omega);
    CHECK_NOTHROW(problem.validate());

    auto none_free = problem;
    none_free.free_mask.fill(false);
    CHECK_THROWS_AS(none_free.validate(), std::invalid_argument);

    auto bad_weights = problem;
    bad_weights.observed[0].weights.assign(5, 1.0);
    CHECK_THROWS_AS(bad_weights.validate(), std::invalid_argument);

    auto outside = problem;
    outside.bounds[static_cast<std::size_t>(Param::g)] = {0.0, 5.0};
    CHECK_THROWS_AS(outside.validate(), std::invalid_argument);
}

TEST_CASE("fit recovers the device parameters from perturbed guesses")
{
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    for (double factor : {0.8, 1.2})
    {
        auto problem = device_problem(omega);
        problem.initial_guess = scaled_guess(factor);
        const auto result = fit(problem);
        CHECK(result.converged);
        CHECK(result.params[Param::g] == doctest::Approx(reference::g).epsilon(1e-6));
        CHECK(result.params[Param::kappa_top] == doctest::Approx(reference::kappa_top).epsilon(1e-6));
        CHECK(result.params[Param::kappa_side] == doctest::Approx(reference::kappa_side).epsilon(1e-6));
        CHECK(result.params[Param::gamma] == doctest::Approx(reference::gamma).epsilon(1e-6));
        CHECK(std::isnan(result.std_errors[static_cast<std::size_t>(Param::omega_c)]));
        for (std::size_t i = 1; i < result.cost_history.size(); ++i)
            REQUIRE(result.cost_history[i] <= result.cost_history[i - 1]);
    }
}

TEST_CASE("fit at the truth stops within two iterations")
{
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    const auto problem = device_problem(omega);
    const auto result = fit(problem);
    CHECK(result.converged);
    CHECK(result.iterations <= 2);
    for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
        CHECK(result.params[p] == doctest::Approx(problem.initial_guess[p]).epsilon(1e-10));
}

TEST_CASE("fit is deterministic")
{
    const auto omega = Grid::centred(wc, 100.0, 1001).values();
    auto problem = device_problem(omega, 7, 0.01);
    problem.initial_guess = scaled_guess(1.1);
    const auto a = fit(problem);
    const auto b = fit(problem);
    CHECK(a.params == b.params);
    CHECK(a.residual_norm == b.residual_norm);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("fit is invariant under a common energy shift")
{
    const double shift = 1234.5;
    const auto omega = Grid::centred(wc, 100.0, 1001).values();
    auto problem = device_problem(omega);
    problem.initial_guess = scaled_guess(1.15);
    const auto base = fit(problem);

    const auto moved = device.with_omega_c(wc + shift);
    std::vector<double> shifted_omega;
    for (double w : omega)
        shifted_omega.push_back(w + shift);
    FitProblem shifted = problem;
    shifted.observed[0].data = intensity_of(moved, QdState::at(wc + shift), shifted_omega);
    shifted.observed[1].data = intensity_of(moved, QdState::empty_cavity(), shifted_omega);
    shifted.initial_guess[Param::omega_c] += shift;
    shifted.initial_guess[Param::omega_qd] += shift;
    shifted.bounds = FitProblem::default_bounds(shifted.observed);
    const auto other = fit(shifted);
    for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
        CHECK(other.params[p] == doctest::Approx(base.params[p]).epsilon(1e-8));
}

TEST_CASE("fit with one percent noise stays within tolerance on every seed")
{
    const auto omega = Grid::centred(wc, 100.0, 2001).values();
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        auto problem = device_problem(omega, seed, 0.01);
        problem.initial_guess = scaled_guess(seed % 2 ? 0.85 : 1.15);
        const auto result = fit(problem);
        REQUIRE(result.converged);
        CHECK(std::abs(result.params[Param::g] - reference::g) / reference::g < 0.05);
        CHECK(std::abs(result.params[Param::kappa_side] - reference::kappa_side) / reference::kappa_side < 0.05);
    }
}

TEST_CASE("best-of-N keeps the lowest residual")
{
    const auto omega = Grid::centred(wc, 100.0, 1001).values();
    const auto problem = device_problem(omega);
    const std::vector<ModelParams> guesses{scaled_guess(0.7), scaled_guess(1.0), scaled_guess(1.3)};
    const auto best = fit_best_of(problem, guesses);
    for (const auto& g : guesses)
    {
        auto single = problem;
        single.initial_guess = g;
        CHECK(best.residual_norm <= fit(single).residual_norm);
    }
    CHECK_THROWS_AS((void)fit_best_of(problem, std::span<const ModelParams>{}), std::invalid_argument);
}

TEST_CASE("uncertainty")
{
    const auto omega = Grid::centred(wc, 100.0, 1001).values();

    SUBCASE("noiseless data gives vanishing errors")
    {
        const auto problem = device_problem(omega);
        const auto result = fit(problem);
        for (auto p : {Param::g, Param::kappa_top, Param::kappa_side, Param::gamma})
            CHECK(result.std_errors[static_cast<std::size_t>(p)] < 1e-8);
        CHECK(result.covariance_condition >= 1.0);
    }

    SUBCASE("duplicating the data shrinks errors by sqrt 2")
    {
        auto problem = device_problem(omega, 11, 0.01);
        for (auto& obs : problem.observed)
            obs.weights.assign(omega.size(), 1.0);
        const auto single = fit(problem);
        auto doubled = problem;
        doubled.observed.push_back(problem.observed[0]);
        doubled.observed.push_back(problem.observed[1]);
        const auto twice = fit(doubled);
        REQUIRE(single.converged);
        REQUIRE(twice.converged);
        const auto k = static_cast<std::size_t>(Param::g);
        const double m = static_cast<double>(2 * omega.size());
        // s^2 uses m - p degrees of freedom, so the ratio differs from 1/sqrt 2 by O(p/m).
        const double expect = std::sqrt((m - 4.0) / (2.0 * m - 4.0));
        CHECK(twice.std_errors[k] / single.std_errors[k] == doctest::Approx(expect).epsilon(1e-6));
    }

    SUBCASE("reported error tracks the Monte-Carlo scatter")
    {
        std::vector<double> estimates;
        double reported = 0.0;
        for (std::uint64_t seed = 100; seed < 200; ++seed)
        {
            const auto problem = device_problem(omega, seed, 0.01);
            const auto result = fit(problem);
            REQUIRE(result.converged);
            estimates.push_back(result.params[Param::g]);
            reported += result.std_errors[static_cast<std::size_t>(Param::g)] / 100.0;
        }
        double mean = 0.0;
        for (double e : estimates)
            mean += e / 100.0;
        double var = 0.0;
        for (double e : estimates)
            var += (e - mean) * (e - mean) / 99.0;
        const double scatter = std::sqrt(var);
        CHECK(reported / scatter > 0.5);
        CHECK(reported / scatter < 2.0);
    }

    SUBCASE("a parameter pinned on a bound reports infinity")
    {
        auto problem = device_problem(omega);
        problem.free_mask[static_cast<std::size_t>(Param::background)] = true;
        const auto result = fit(problem);
        CHECK(std::isinf(result.std_errors[static_cast<std::size_t>(Param::background)]));
    }

    SUBCASE("non-converged fits are rejected")
    {
        FitResult bad;
        bad.converged = false;
        CHECK_THROWS_AS((void)uncertainty(bad, device_problem(omega)), std::invalid_argument);
    }
}

TEST_CASE("Q from the empty-cavity linewidth")
{
    const auto omega = Grid::centred(wc, 150.0, 3001).values();
    const auto dip = estimate_q_from_linewidth(intensity_of(device, QdState::empty_cavity(), omega), wc + 3.0);
    CHECK(dip.converged);
    CHECK(dip.centre == doctest::Approx(wc).epsilon(1e-9));
    // K = 25.9 so Q = omega_c / K = 51490.19.
    CHECK(std::abs(dip.q - 51490.193) / 51490.193 < 0.02);
    CHECK(dip.fwhm == doctest::Approx(25.9).epsilon(1e-6));

    SUBCASE("halving the total loss doubles Q")
    {
        const auto narrow = device.with_kappa_top(0.6).with_kappa_side(12.35);
        const auto d2 = estimate_q_from_linewidth(intensity_of(narrow, QdState::empty_cavity(), omega), wc);
        CHECK(d2.q / dip.q == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("FWHM equal to the centre gives Q = 1")
    {
        std::vector<double> w;
        std::vector<double> y;
        for (int i = 0; i < 2001; ++i)
        {
            const double x = -40.0 + 0.05 * i;
            w.push_back(x);
            y.push_back(1.0 - 0.5 * 0.25 / ((x - 2.0) * (x - 2.0) + 0.25));
        }
        const auto d = estimate_q_from_linewidth(Spectrum(w, y), 2.0);
        CHECK(d.q == doctest::Approx(2.0).epsilon(1e-6));
        // centre 2, FWHM 1 gives Q = 2; FWHM 2 gives 1.
        for (int i = 0; i < 2001; ++i)
            y[static_cast<std::size_t>(i)] = 1.0 - 0.5 / ((w[static_cast<std::size_t>(i)] - 2.0) *
                                                              (w[static_cast<std::size_t>(i)] - 2.0) + 1.0);
        CHECK(estimate_q_from_linewidth(Spectrum(w, y), 2.0).q == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("flat data has no dip")
    {
        CHECK_THROWS_AS((void)estimate_q_from_linewidth(Spectrum(omega, std::vector<double>(omega.size(), 1.0)), wc),
                        std::domain_error);
    }
}

TEST_CASE("g from the vacuum Rabi splitting")
{
    SUBCASE("two synthetic dips 22 ueV apart")
    {
        std::vector<double> w;
        std::vector<double> y;
        for (int i = 0; i <= 2000; ++i)
        {
            const double x = -50.0 + 0.05 * i;
            w.push_back(x);
            y.push_back(1.0 - 1.0 / (1.0 + (x + 11.0) * (x + 11.0)) - 0.8 / (1.0 + (x - 11.0) * (x - 11.0)));
        }
        const auto est = estimate_g_from_splitting(Spectrum(w, y));
        CHECK(est.g == doctest::Approx(11.0).epsilon(1e-3));

        std::vector<double> mirrored_w;
        std::vector<double> mirrored_y;
        for (std::size_t i = w.size(); i-- > 0;)
        {
            mirrored_w.push_back(-w[i]);
            mirrored_y.push_back(y[i]);
        }
        const auto mirror = estimate_g_from_splitting(Spectrum(mirrored_w, mirrored_y));
        CHECK(mirror.g == doctest::Approx(est.g).epsilon(1e-12));
        CHECK(mirror.lower.omega == doctest::Approx(-est.upper.omega).epsilon(1e-12));
    }
    SUBCASE("device parameters on resonance")
    {
        const auto omega = Grid::centred(wc, 100.0, 20001).values();
        const auto est = estimate_g_from_splitting(intensity_of(device, QdState::at(wc), omega));
        // numpy oracle: reflectivity minima at +-9.963 ueV.
        CHECK(est.g == doctest::Approx(9.9634).epsilon(1e-3));
        CHECK(est.lower.omega - wc == doctest::Approx(-est.g).epsilon(1e-6));
    }
    SUBCASE("a single dip is an error")
    {
        const auto omega = Grid::centred(wc, 100.0, 2001).values();
        CHECK_THROWS_AS((void)estimate_g_from_splitting(intensity_of(device, QdState::empty_cavity(), omega)),
                        std::domain_error);
    }
}
