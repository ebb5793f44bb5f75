#include "pillarqed/interferometer.hpp"

#include "pillarqed/log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pillarqed
{

ReferenceArm::ReferenceArm(Complex beta, double sb_offset) : beta_(beta), sb_offset_(sb_offset)
{
    const double magnitude = std::abs(beta);
    if (!std::isfinite(magnitude) || !(magnitude > 0.0) || magnitude > 1.0)
        throw std::invalid_argument("ReferenceArm: |beta| must lie in (0, 1]");
    if (!std::isfinite(sb_offset))
        throw std::invalid_argument("ReferenceArm: sb_offset must be finite");
}

ReferenceArm ReferenceArm::calibrated(Complex beta, double far_phase)
{
    return {beta, std::arg(beta) - std::numbers::pi / 2.0 - far_phase};
}

double ReferenceArm::residual_bias() const { return sb_offset_ - std::arg(beta_) + std::numbers::pi / 2.0; }

BackgroundModel::BackgroundModel(double fraction, double background_phase)
    : fraction_(fraction), background_phase_(background_phase)
{
    if (!std::isfinite(fraction) || fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("BackgroundModel: fraction must lie in [0, 1)");
    if (!std::isfinite(background_phase))
        throw std::invalid_argument("BackgroundModel: background_phase must be finite");
}

ChannelRecord simulate_channels(Complex r, const ReferenceArm& ref, double omega)
{
    const Complex e_h = r * std::polar(1.0, ref.sb_offset());
    const Complex e_v = ref.beta();
    return {omega, std::norm(e_h), std::norm(e_v), 0.5 * std::norm(e_h + e_v), 0.5 * std::norm(e_h - e_v)};
}

std::vector<ChannelRecord> simulate_channel_scan(const AmplitudeSpectrum& r, const ReferenceArm& ref)
{
    std::vector<ChannelRecord> out;
    out.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        out.push_back(simulate_channels(r.value_at(i), ref, r.omega_at(i)));
    return out;
}

PhaseExtraction extract_raw_phase(const ChannelRecord& rec)
{
    if (!(rec.h > 0.0) || !(rec.v > 0.0))
        throw std::domain_error("extract_phase: h and v must be > 0");
    double x = (rec.d - rec.a) / (2.0 * std::sqrt(rec.h * rec.v));
    bool clamped = false;
    if (std::abs(x) > 1.0 + 1e-9)
        clamped = true;
    x = std::clamp(x, -1.0, 1.0);
    return {std::asin(x), clamped};
}

PhaseExtraction extract_phase(const ChannelRecord& rec, const ReferenceArm& ref)
{
    auto out = extract_raw_phase(rec);
    out.phase -= ref.residual_bias();
    return out;
}

double edge_bias(std::span<const ChannelRecord> records)
{
    if (records.size() < 2)
        throw std::invalid_argument("edge_bias: need at least 2 records");
    return 0.5 * (extract_raw_phase(records.front()).phase + extract_raw_phase(records.back()).phase);
}

PhaseTrace extract_phase_trace(std::span<const ChannelRecord> records)
{
    const double bias = edge_bias(records);
    std::vector<double> omega;
    std::vector<double> values;
    omega.reserve(records.size());
    values.reserve(records.size());
    std::size_t clamped = 0;
    for (const auto& rec : records)
    {
        const auto extracted = extract_raw_phase(rec);
        clamped += extracted.clamped ? 1 : 0;
        omega.push_back(rec.omega);
        values.push_back(extracted.phase - bias);
    }
    if (clamped > 0)
        log().warn("extract_phase: {} of {} records were inconsistent and clamped", clamped, records.size());
    return {Spectrum{std::move(omega), std::move(values)}, clamped};
}

Complex apply_background(Complex r, const BackgroundModel& bg)
{
    const double b = bg.fraction();
    return std::polar(std::sqrt(b), bg.background_phase()) + std::sqrt(1.0 - b) * r;
}

Complex invert_background(Complex measured, const BackgroundModel& bg)
{
    const double b = bg.fraction();
    const double transmitted = std::sqrt(1.0 - b);
    if (1.0 / transmitted > 1e6)
        throw std::domain_error("invert_background: background fraction too close to 1");
    return (measured - std::polar(std::sqrt(b), bg.background_phase())) / transmitted;
}

Spectrum measured_intensity(const AmplitudeSpectrum& r, const BackgroundModel& bg)
{
    std::vector<double> values(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        values[i] = std::norm(apply_background(r.value_at(i), bg));
    return {std::vector<double>(r.omega().begin(), r.omega().end()), std::move(values)};
}

Spectrum with_multiplicative_noise(const Spectrum& s, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be finite and >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> values(s.values().begin(), s.values().end());
    for (double& v : values)
        v *= 1.0 + sigma * normal(rng);
    return {std::vector<double>(s.omega().begin(), s.omega().end()), std::move(values)};
}

double dip_visibility(const Spectrum& s)
{
    const auto n = s.size();
    if (n < 5)
        throw std::invalid_argument("dip_visibility: need at least 5 points");
    const auto values = s.values();
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> outer(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(edge));
    outer.insert(outer.end(), values.end() - static_cast<std::ptrdiff_t>(edge), values.end());
    const double baseline = median(std::move(outer));
    if (!(baseline > 0.0))
        throw std::domain_error("dip_visibility: baseline must be > 0");
    return 1.0 - *std::min_element(values.begin(), values.end()) / baseline;
}

double infer_background_fraction(double observed_visibility, const SystemParams& p, const QdState& qd,
                                 std::span<const double> omega)
{
    if (!(observed_visibility > 0.0 && observed_visibility < 1.0))
        throw std::invalid_argument("infer_background_fraction: visibility must lie in (0, 1)");
    const auto amplitudes = amplitude_spectrum(p, qd, omega);
    const auto visibility = [&](double b) { return dip_visibility(measured_intensity(amplitudes, BackgroundModel{b})); };

    const double intrinsic = visibility(0.0);
    if (intrinsic < observed_visibility)
        throw std::domain_error("infer_background_fraction: intrinsic visibility is below the observed value");

    // Visibility decreases monotonically with b.
    double lo = 0.0;
    double hi = 1.0 - 1e-9;
    while (hi - lo > 1e-7)
    {
        const double mid = 0.5 * (lo + hi);
        if (visibility(mid) > observed_visibility)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double infer_background_fraction(double observed_visibility, const SystemParams& p, const QdState& qd)
{
    return infer_background_fraction(observed_visibility, p, qd, Grid::centred(p.omega_c(), 100.0, 2001).values());
}

} // namespace pillarqed
