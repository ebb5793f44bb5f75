#pragma once

#include "pillarqed/interferometer.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/spectrum.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pillarqed
{

// Linear temperature shift of the dot and cavity lines. The dot must shift faster than the
// cavity for a crossing to exist. Slopes are sample-specific; the defaults are placeholders,
// not measured values.
struct TuningModel
{
    double qd_slope = -10.0;    // ueV / K
    double cavity_slope = -3.0; // ueV / K
    double qd_ref = reference::omega_c;
    double cavity_ref = reference::omega_c;
    double t_ref = 20.0; // K
    double t_min = 4.0;
    double t_max = 40.0;

    // Throws std::invalid_argument on non-finite values, t_min > t_max, or
    // |qd_slope| <= |cavity_slope|.
    void validate() const;
};

struct TunedEnergies
{
    double omega_qd = 0.0;
    double omega_c = 0.0;
    bool in_window = true;
};

// Out-of-window temperatures are evaluated anyway and logged as a warning.
[[nodiscard]] TunedEnergies energies_at(const TuningModel& m, double temperature);
[[nodiscard]] double crossing_temperature(const TuningModel& m);

struct TemperatureScan
{
    std::vector<double> temperatures;
    std::vector<Spectrum> spectra;
    SystemParams params;
    TuningModel tuning;
};

// Measured intensity |sqrt(b) e^{i psi} + sqrt(1 - b) r|^2 on the grid for every temperature,
// with the cavity and dot energies moved by the tuning model. Temperatures must be strictly
// increasing and non-empty.
[[nodiscard]] TemperatureScan synthesize_scan(const SystemParams& p, const TuningModel& m,
                                              std::span<const double> temperatures, std::span<const double> omega,
                                              const BackgroundModel& bg = BackgroundModel{});

struct DipPair
{
    double temperature = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    [[nodiscard]] double separation() const { return upper - lower; }
};

// The two deepest dips of each spectrum (absent where fewer than two dips resolve).
[[nodiscard]] std::vector<std::optional<DipPair>> track_dips(const TemperatureScan& scan);

struct AnticrossingGap
{
    double gap = 0.0;
    double temperature = 0.0;
};

// Smallest dip separation across the scan. Throws std::domain_error if two dips never resolve.
[[nodiscard]] AnticrossingGap anticrossing_gap(const TemperatureScan& scan);

} // namespace pillarqed
