#pragma once

#include "pillarqed/scattering.hpp"
#include "pillarqed/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pillarqed
{

// One probe energy of interferometer output. h and v are the arm intensities, d and a the
// diagonal/antidiagonal outputs of the 50:50 analysis, so d + a = h + v.
struct ChannelRecord
{
    double omega = 0.0;
    double h = 0.0;
    double v = 0.0;
    double d = 0.0;
    double a = 0.0;

    bool operator==(const ChannelRecord&) const = default;
};

// Reference arm reflected from unetched material, with the compensator retardance applied to
// the pillar (H) arm.
class ReferenceArm
{
public:
    // |beta| in (0, 1], sb_offset finite.
    ReferenceArm(Complex beta, double sb_offset);

    // Offset that sets sin(phi) = 0 for a pillar amplitude of phase `far_phase` (the far-detuned
    // edge), so that d - a = 2 |r| |beta| sin(phi - far_phase).
    static ReferenceArm calibrated(Complex beta, double far_phase = 0.0);

    [[nodiscard]] Complex beta() const { return beta_; }
    [[nodiscard]] double sb_offset() const { return sb_offset_; }
    // Phase added to the pillar phase by an uncalibrated compensator; 0 after calibration.
    [[nodiscard]] double residual_bias() const;

private:
    Complex beta_;
    double sb_offset_;
};

// Fraction b of the collected light that never couples to the cavity mode, added coherently.
class BackgroundModel
{
public:
    explicit BackgroundModel(double fraction = 0.0, double background_phase = 0.0);

    [[nodiscard]] double fraction() const { return fraction_; }
    [[nodiscard]] double background_phase() const { return background_phase_; }

private:
    double fraction_;
    double background_phase_;
};

[[nodiscard]] ChannelRecord simulate_channels(Complex r, const ReferenceArm& ref, double omega = 0.0);
[[nodiscard]] std::vector<ChannelRecord> simulate_channel_scan(const AmplitudeSpectrum& r, const ReferenceArm& ref);

struct PhaseExtraction
{
    double phase = 0.0;
    // Set when |(d - a) / (2 sqrt(h v))| exceeded 1 + 1e-9 and was clamped.
    bool clamped = false;
};

// asin((d - a) / (2 sqrt(h v))) with the argument clamped to [-1, 1]; the bias is not removed.
[[nodiscard]] PhaseExtraction extract_raw_phase(const ChannelRecord& rec);

// Pillar phase relative to the calibration reference. Valid for |phase + residual bias| < pi/2.
// Requires h > 0 and v > 0.
[[nodiscard]] PhaseExtraction extract_phase(const ChannelRecord& rec, const ReferenceArm& ref);

// Software compensator zeroing: the mean raw phase of the first and last records, which are
// assumed far detuned.
[[nodiscard]] double edge_bias(std::span<const ChannelRecord> records);

struct PhaseTrace
{
    Spectrum phase;
    std::size_t clamped_rows = 0;
};

// Extracts every record and subtracts edge_bias.
[[nodiscard]] PhaseTrace extract_phase_trace(std::span<const ChannelRecord> records);

[[nodiscard]] Complex apply_background(Complex r, const BackgroundModel& bg);
// Exact inverse of apply_background. Throws std::domain_error if 1/sqrt(1 - b) > 1e6.
[[nodiscard]] Complex invert_background(Complex measured, const BackgroundModel& bg);

[[nodiscard]] Spectrum measured_intensity(const AmplitudeSpectrum& r, const BackgroundModel& bg);

// value * (1 + sigma * n), n standard normal from a mt19937_64 seeded with `seed`.
[[nodiscard]] Spectrum with_multiplicative_noise(const Spectrum& s, double sigma, std::uint64_t seed);

// 1 - min / baseline, baseline = median of the outer 10% of points on both sides.
// Requires >= 5 points; throws std::domain_error if the baseline is <= 0.
[[nodiscard]] double dip_visibility(const Spectrum& s);

// Background fraction whose coherent dilution of the synthesized spectrum yields the observed
// visibility. Bisection on [0, 1) to 1e-6 in b. Throws std::domain_error if even b = 0 gives
// less visibility than observed.
[[nodiscard]] double infer_background_fraction(double observed_visibility, const SystemParams& p, const QdState& qd,
                                               std::span<const double> omega);
// Uses omega_c +- 100 ueV on 2001 points.
[[nodiscard]] double infer_background_fraction(double observed_visibility, const SystemParams& p, const QdState& qd);

} // namespace pillarqed
