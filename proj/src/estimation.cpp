#include "pillarqed/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pillarqed
{
namespace
{

constexpr std::array<std::string_view, param_count> names{"g",       "kappa_top", "kappa_side", "gamma",
                                                          "omega_c", "omega_qd",  "background", "beta"};

constexpr std::size_t index(Param p) { return static_cast<std::size_t>(p); }

std::vector<double> resolved_weights(const Observation& obs)
{
    if (!obs.weights.empty())
        return obs.weights;
    return std::vector<double>(obs.data.size(), 1.0 / std::sqrt(static_cast<double>(obs.data.size())));
}

Complex empty_cavity(double kappa_top, double kappa_side, double delta_c)
{
    return 1.0 - kappa_top / Complex{(kappa_top + kappa_side) / 2.0, delta_c};
}

// Problem in a frame whose origin is the initial omega_c guess: energies become small offsets,
// so finite-difference steps and detunings keep full relative precision.
class LocalProblem
{
public:
    LocalProblem(const FitProblem& problem, const ModelParams& base)
        : problem_(problem), origin_(problem.initial_guess[Param::omega_c])
    {
        for (std::size_t k = 0; k < param_count; ++k)
        {
            base_[k] = to_local(k, base.values[k]);
            if (problem.free_mask[k])
                free_.push_back(k);
        }
        for (const auto& obs : problem.observed)
        {
            Block block;
            block.obs = &obs;
            block.offsets.reserve(obs.data.size());
            for (double w : obs.data.omega())
                block.offsets.push_back(w - origin_);
            block.weights = resolved_weights(obs);
            count_ += obs.data.size();
            blocks_.push_back(std::move(block));
        }
    }

    [[nodiscard]] std::size_t residual_count() const { return count_; }
    [[nodiscard]] const std::vector<std::size_t>& free() const { return free_; }

    [[nodiscard]] double to_local(std::size_t k, double value) const
    {
        return is_energy(all_params[k]) ? value - origin_ : value;
    }

    [[nodiscard]] std::vector<double> free_values(const ModelParams& p) const
    {
        std::vector<double> x;
        for (auto k : free_)
            x.push_back(to_local(k, p.values[k]));
        return x;
    }

    void free_bounds(std::vector<double>& lower, std::vector<double>& upper) const
    {
        for (auto k : free_)
        {
            lower.push_back(to_local(k, problem_.bounds[k].lower));
            upper.push_back(to_local(k, problem_.bounds[k].upper));
        }
    }

    [[nodiscard]] ModelParams to_params(std::span<const double> x) const
    {
        auto local = base_;
        for (std::size_t j = 0; j < free_.size(); ++j)
            local[free_[j]] = x[j];
        ModelParams out;
        for (std::size_t k = 0; k < param_count; ++k)
            out.values[k] = is_energy(all_params[k]) ? local[k] + origin_ : local[k];
        return out;
    }

    void evaluate(std::span<const double> x, std::span<double> out) const
    {
        auto v = base_;
        for (std::size_t j = 0; j < free_.size(); ++j)
            v[free_[j]] = x[j];
        const double g = v[index(Param::g)];
        const double kt = v[index(Param::kappa_top)];
        const double ks = v[index(Param::kappa_side)];
        const double gm = v[index(Param::gamma)];
        const double wc = v[index(Param::omega_c)];
        const double wq = v[index(Param::omega_qd)];
        const double b = v[index(Param::background)];
        const double beta_sq = v[index(Param::beta)] * v[index(Param::beta)];
        const Complex bg = std::polar(std::sqrt(b), problem_.background_phase);
        const double transmitted = std::sqrt(1.0 - b);

        std::size_t row = 0;
        for (const auto& block : blocks_)
        {
            const auto observed = block.obs->data.values();
            const std::size_t n = block.offsets.size();
            scratch_.resize(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                const double u = block.offsets[i];
                const Complex r = block.obs->coupled ? reflection_from_detunings(g, kt, ks, gm, wq - u, wc - u)
                                                     : empty_cavity(kt, ks, wc - u);
                const Complex m = bg + transmitted * r;
                scratch_[i] = block.obs->kind == Observable::intensity ? beta_sq * std::norm(m) : std::arg(m);
            }
            if (block.obs->kind == Observable::phase)
                scratch_ = unwrap_phase(scratch_);
            for (std::size_t i = 0; i < n; ++i)
                out[row + i] = block.weights[i] * (scratch_[i] - observed[i]);
            row += n;
        }
    }

    [[nodiscard]] ResidualFunction function() const
    {
        return [this](std::span<const double> x, std::span<double> out) { evaluate(x, out); };
    }

    [[nodiscard]] std::size_t nonzero_weight_count() const
    {
        std::size_t m = 0;
        for (const auto& block : blocks_)
            m += static_cast<std::size_t>(std::count_if(block.weights.begin(), block.weights.end(),
                                                        [](double w) { return w != 0.0; }));
        return m;
    }

private:
    struct Block
    {
        const Observation* obs = nullptr;
        std::vector<double> offsets;
        std::vector<double> weights;
    };

    const FitProblem& problem_;
    double origin_;
    std::array<double, param_count> base_{};
    std::vector<std::size_t> free_;
    std::vector<Block> blocks_;
    std::size_t count_ = 0;
    mutable std::vector<double> scratch_;
};

void require_within_bounds(const ModelParams& params, const FitProblem& problem)
{
    for (std::size_t k = 0; k < param_count; ++k)
    {
        const auto& b = problem.bounds[k];
        if (problem.free_mask[k] && !(params.values[k] >= b.lower && params.values[k] <= b.upper))
            throw std::invalid_argument("parameter " + std::string(names[k]) + " outside its bounds");
    }
}

Uncertainty uncertainty_at(const ModelParams& params, double residual_norm, const FitProblem& problem)
{
    Uncertainty out;
    out.std_errors.fill(std::numeric_limits<double>::quiet_NaN());
    const LocalProblem local(problem, params);
    const auto& free = local.free();
    const std::size_t n = free.size();
    const std::size_t m = local.residual_count();

    std::vector<double> lower;
    std::vector<double> upper;
    local.free_bounds(lower, upper);
    const auto x = local.free_values(params);
    const auto jac_data = numeric_jacobian(local.function(), x, m, lower, upper, LeastSquaresOptions{});
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> jac(
        jac_data.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd normal = jac.transpose() * jac;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const auto& lambda = eig.eigenvalues();
    const double lambda_max = lambda.maxCoeff();
    const double lambda_min = lambda.minCoeff();
    out.condition = lambda_min > 0.0 ? lambda_max / lambda_min : std::numeric_limits<double>::infinity();

    // Pseudo-inverse with a relative floor on the spectrum.
    const double floor = std::max(lambda_max * 1e-14, std::numeric_limits<double>::min());
    Eigen::VectorXd inv_lambda(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        inv_lambda[i] = 1.0 / std::max(lambda[i], floor);
    const Eigen::MatrixXd covariance_unscaled =
        eig.eigenvectors() * inv_lambda.asDiagonal() * eig.eigenvectors().transpose();

    const std::size_t usable = local.nonzero_weight_count();
    const double dof = usable > n ? static_cast<double>(usable - n) : 1.0;
    const double variance = residual_norm / dof;

    for (std::size_t j = 0; j < n; ++j)
    {
        const std::size_t k = free[j];
        const auto& b = problem.bounds[k];
        const double v = params.values[k];
        const double tol = 1e-12 * std::max(1.0, std::abs(v));
        if (std::abs(v - b.lower) <= tol || std::abs(v - b.upper) <= tol)
        {
            out.std_errors[k] = std::numeric_limits<double>::infinity();
            continue;
        }
        const auto jj = static_cast<Eigen::Index>(j);
        out.std_errors[k] = std::sqrt(std::max(0.0, variance * covariance_unscaled(jj, jj)));
    }
    return out;
}

} // namespace

std::string_view param_name(Param p) { return names[index(p)]; }

std::optional<Param> param_from_name(std::string_view name)
{
    for (std::size_t k = 0; k < param_count; ++k)
        if (names[k] == name)
            return all_params[k];
    return std::nullopt;
}

SystemParams ModelParams::system() const
{
    return {(*this)[Param::g], (*this)[Param::kappa_top], (*this)[Param::kappa_side], (*this)[Param::gamma],
            (*this)[Param::omega_c]};
}

QdState ModelParams::dot(bool coupled) const
{
    return coupled ? QdState::at((*this)[Param::omega_qd]) : QdState::empty_cavity();
}

BackgroundModel ModelParams::background_model(double background_phase) const
{
    return BackgroundModel{(*this)[Param::background], background_phase};
}

ModelParams ModelParams::from(const SystemParams& p, double omega_qd, double background, double beta)
{
    ModelParams out;
    out[Param::g] = p.g();
    out[Param::kappa_top] = p.kappa_top();
    out[Param::kappa_side] = p.kappa_side();
    out[Param::gamma] = p.gamma();
    out[Param::omega_c] = p.omega_c();
    out[Param::omega_qd] = omega_qd;
    out[Param::background] = background;
    out[Param::beta] = beta;
    return out;
}

void FitProblem::validate() const
{
    if (observed.empty())
        throw std::invalid_argument("FitProblem: no observations");
    if (std::none_of(free_mask.begin(), free_mask.end(), [](bool f) { return f; }))
        throw std::invalid_argument("FitProblem: at least one parameter must be free");
    for (std::size_t k = 0; k < param_count; ++k)
    {
        const auto& b = bounds[k];
        if (!free_mask[k])
            continue;
        if (!(b.lower <= b.upper))
            throw std::invalid_argument("FitProblem: empty bounds for " + std::string(names[k]));
        if (!(initial_guess.values[k] >= b.lower && initial_guess.values[k] <= b.upper))
            throw std::invalid_argument("FitProblem: initial guess outside bounds for " + std::string(names[k]));
    }
    if (free_mask[index(Param::kappa_top)] && !(bounds[index(Param::kappa_top)].lower > 0.0))
        throw std::invalid_argument("FitProblem: kappa_top lower bound must be > 0");
    if (free_mask[index(Param::background)] && !(bounds[index(Param::background)].upper < 1.0))
        throw std::invalid_argument("FitProblem: background upper bound must be < 1");
    bool any_weight = false;
    for (const auto& obs : observed)
    {
        if (obs.weights.empty())
        {
            any_weight = true;
            continue;
        }
        if (obs.weights.size() != obs.data.size())
            throw std::invalid_argument("FitProblem: weight vector length mismatch");
        for (double w : obs.weights)
        {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("FitProblem: weights must be finite and >= 0");
            any_weight = any_weight || w > 0.0;
        }
    }
    if (!any_weight)
        throw std::invalid_argument("FitProblem: all weights are zero");
    // Fixed values must still describe a valid system.
    (void)initial_guess.system();
    (void)initial_guess.background_model(background_phase);
}

std::array<Bounds, param_count> FitProblem::default_bounds(std::span<const Observation> observed)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& obs : observed)
    {
        lo = std::min(lo, obs.data.omega().front());
        hi = std::max(hi, obs.data.omega().back());
    }
    std::array<Bounds, param_count> b{};
    b[index(Param::g)] = {0.0, 1e3};
    b[index(Param::kappa_top)] = {1e-9, 1e3};
    b[index(Param::kappa_side)] = {0.0, 1e3};
    b[index(Param::gamma)] = {0.0, 1e3};
    b[index(Param::omega_c)] = {lo, hi};
    b[index(Param::omega_qd)] = {lo, hi};
    b[index(Param::background)] = {0.0, 0.999};
    b[index(Param::beta)] = {1e-3, 1.0};
    return b;
}

std::vector<double> model_values(const ModelParams& params, const Observation& obs, double background_phase)
{
    const auto p = params.system();
    const auto qd = params.dot(obs.coupled);
    const auto bg = params.background_model(background_phase);
    const double beta_sq = params[Param::beta] * params[Param::beta];
    std::vector<double> out;
    out.reserve(obs.data.size());
    for (double w : obs.data.omega())
    {
        const Complex m = apply_background(reflection_amplitude(p, qd, w), bg);
        out.push_back(obs.kind == Observable::intensity ? beta_sq * std::norm(m) : std::arg(m));
    }
    return obs.kind == Observable::phase ? unwrap_phase(out) : out;
}

std::vector<double> residuals(const ModelParams& params, const FitProblem& problem)
{
    problem.validate();
    require_within_bounds(params, problem);
    const LocalProblem local(problem, params);
    std::vector<double> out(local.residual_count());
    local.evaluate(local.free_values(params), out);
    return out;
}

std::vector<double> residual_jacobian(const ModelParams& params, const FitProblem& problem)
{
    problem.validate();
    require_within_bounds(params, problem);
    const LocalProblem local(problem, params);
    std::vector<double> lower;
    std::vector<double> upper;
    local.free_bounds(lower, upper);
    return numeric_jacobian(local.function(), local.free_values(params), local.residual_count(), lower, upper,
                            LeastSquaresOptions{});
}

FitResult fit(const FitProblem& problem, const LeastSquaresOptions& options)
{
    problem.validate();
    const LocalProblem local(problem, problem.initial_guess);
    std::vector<double> lower;
    std::vector<double> upper;
    local.free_bounds(lower, upper);

    auto ls = levenberg_marquardt(local.function(), local.free_values(problem.initial_guess),
                                  local.residual_count(), lower, upper, options);

    FitResult result;
    result.params = local.to_params(ls.x);
    result.residual_norm = ls.cost;
    result.gradient_norm = ls.gradient_norm;
    result.iterations = ls.iterations;
    result.converged = ls.converged;
    result.message = std::move(ls.message);
    result.cost_history = std::move(ls.cost_history);
    const auto u = uncertainty_at(result.params, result.residual_norm, problem);
    result.std_errors = u.std_errors;
    result.covariance_condition = u.condition;
    return result;
}

FitResult fit_best_of(const FitProblem& problem, std::span<const ModelParams> guesses,
                      const LeastSquaresOptions& options)
{
    if (guesses.empty())
        throw std::invalid_argument("fit_best_of: no guesses");
    std::optional<FitResult> best;
    for (const auto& guess : guesses)
    {
        auto attempt = problem;
        attempt.initial_guess = guess;
        auto result = fit(attempt, options);
        if (!best || result.residual_norm < best->residual_norm)
            best = std::move(result);
    }
    return *best;
}

Uncertainty uncertainty(const FitResult& result, const FitProblem& problem)
{
    if (!result.converged)
        throw std::invalid_argument("uncertainty: fit did not converge");
    problem.validate();
    return uncertainty_at(result.params, result.residual_norm, problem);
}

LorentzianDip estimate_q_from_linewidth(const Spectrum& s, double omega_c_guess)
{
    const std::size_t n = s.size();
    if (n < 5)
        throw std::invalid_argument("estimate_q_from_linewidth: need at least 5 points");
    const auto y = s.values();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = s.omega_at(i) - omega_c_guess;

    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> outer(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(edge));
    outer.insert(outer.end(), y.end() - static_cast<std::ptrdiff_t>(edge), y.end());
    const double baseline0 = median(std::move(outer));
    const auto min_it = std::min_element(y.begin(), y.end());
    const auto imin = static_cast<std::size_t>(min_it - y.begin());
    const double depth0 = baseline0 - *min_it;
    if (!(depth0 > 0.0))
        throw std::domain_error("estimate_q_from_linewidth: no dip found");

    const double half = baseline0 - depth0 / 2.0;
    const double span = u.back() - u.front();
    std::optional<double> left;
    std::optional<double> right;
    for (std::size_t i = imin; i-- > 0;)
        if (y[i] >= half)
        {
            left = u[i];
            break;
        }
    for (std::size_t i = imin + 1; i < n; ++i)
        if (y[i] >= half)
        {
            right = u[i];
            break;
        }
    double fwhm0 = span / 4.0;
    if (left && right)
        fwhm0 = *right - *left;
    else if (left)
        fwhm0 = 2.0 * (u[imin] - *left);
    else if (right)
        fwhm0 = 2.0 * (*right - u[imin]);
    fwhm0 = std::max(fwhm0, span * 1e-6);

    const auto model = [&](std::span<const double> x, std::span<double> out) {
        const double hw = 0.5 * x[1];
        for (std::size_t i = 0; i < n; ++i)
        {
            const double d = u[i] - x[0];
            out[i] = x[3] - x[2] * hw * hw / (d * d + hw * hw) - y[i];
        }
    };
    const std::vector<double> lower{u.front(), span * 1e-9, 0.0, -1e300};
    const std::vector<double> upper{u.back(), span * 100.0, 1e300, 1e300};
    const auto ls = levenberg_marquardt(model, {u[imin], fwhm0, depth0, baseline0}, n, lower, upper);

    LorentzianDip dip;
    dip.centre = omega_c_guess + ls.x[0];
    dip.fwhm = ls.x[1];
    dip.depth = ls.x[2];
    dip.baseline = ls.x[3];
    dip.q = dip.centre / dip.fwhm;
    dip.residual_rms = std::sqrt(ls.cost / static_cast<double>(n));
    dip.converged = ls.converged;
    if (!(dip.depth >= 3.0 * dip.residual_rms) || !(dip.depth > 0.0))
        throw std::domain_error("estimate_q_from_linewidth: dip depth below 3x residual scatter");
    return dip;
}

std::vector<Minimum> locate_minima(const Spectrum& s)
{
    const auto w = s.omega();
    const auto y = s.values();
    std::vector<Minimum> out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i)
    {
        if (!(y[i] < y[i - 1] && y[i] <= y[i + 1]))
            continue;
        // Parabola through the neighbourhood, in coordinates centred on w[i].
        const double t0 = w[i - 1] - w[i];
        const double t2 = w[i + 1] - w[i];
        const double s0 = (y[i - 1] - y[i]) / t0;
        const double s2 = (y[i + 1] - y[i]) / t2;
        const double a = (s0 - s2) / (t0 - t2);
        Minimum m{w[i], y[i]};
        if (a > 0.0)
        {
            const double b = s0 - a * t0;
            const double t = std::clamp(-b / (2.0 * a), t0, t2);
            m.omega = w[i] + t;
            m.value = y[i] + b * t + a * t * t;
        }
        out.push_back(m);
    }
    return out;
}

SplittingEstimate estimate_g_from_splitting(const Spectrum& s)
{
    auto minima = locate_minima(s);
    if (minima.size() < 2)
        throw std::domain_error("estimate_g_from_splitting: splitting not resolved (fewer than two minima)");
    std::stable_sort(minima.begin(), minima.end(), [](const Minimum& a, const Minimum& b) { return a.value < b.value; });
    Minimum first = minima[0];
    Minimum second = minima[1];
    if (second.omega < first.omega)
        std::swap(first, second);
    return {first, second, 0.5 * (second.omega - first.omega)};
}

} // namespace pillarqed
