#include "pillarqed/tuning.hpp"

#include "pillarqed/estimation.hpp"
#include "pillarqed/log.hpp"

#include <cmath>
#include <stdexcept>

namespace pillarqed
{

void TuningModel::validate() const
{
    for (double v : {qd_slope, cavity_slope, qd_ref, cavity_ref, t_ref, t_min, t_max})
        if (!std::isfinite(v))
            throw std::invalid_argument("TuningModel: values must be finite");
    if (t_min > t_max)
        throw std::invalid_argument("TuningModel: t_min must not exceed t_max");
    if (!(std::abs(qd_slope) > std::abs(cavity_slope)))
        throw std::invalid_argument("TuningModel: |qd_slope| must exceed |cavity_slope|");
}

TunedEnergies energies_at(const TuningModel& m, double temperature)
{
    m.validate();
    TunedEnergies e;
    e.omega_qd = m.qd_ref + m.qd_slope * (temperature - m.t_ref);
    e.omega_c = m.cavity_ref + m.cavity_slope * (temperature - m.t_ref);
    e.in_window = temperature >= m.t_min && temperature <= m.t_max;
    if (!e.in_window)
        log().warn("temperature {} K outside the tuning window [{}, {}] K", temperature, m.t_min, m.t_max);
    return e;
}

double crossing_temperature(const TuningModel& m)
{
    m.validate();
    return m.t_ref + (m.cavity_ref - m.qd_ref) / (m.qd_slope - m.cavity_slope);
}

TemperatureScan synthesize_scan(const SystemParams& p, const TuningModel& m, std::span<const double> temperatures,
                                std::span<const double> omega, const BackgroundModel& bg)
{
    if (temperatures.empty())
        throw std::invalid_argument("synthesize_scan: no temperatures");
    for (std::size_t i = 1; i < temperatures.size(); ++i)
        if (!(temperatures[i] > temperatures[i - 1]))
            throw std::invalid_argument("synthesize_scan: temperatures must be strictly increasing");

    TemperatureScan scan{{}, {}, p, m};
    scan.temperatures.assign(temperatures.begin(), temperatures.end());
    scan.spectra.reserve(temperatures.size());
    for (double t : temperatures)
    {
        const auto e = energies_at(m, t);
        const auto tuned = p.with_omega_c(e.omega_c);
        scan.spectra.push_back(measured_intensity(amplitude_spectrum(tuned, QdState::at(e.omega_qd), omega), bg));
    }
    return scan;
}

std::vector<std::optional<DipPair>> track_dips(const TemperatureScan& scan)
{
    std::vector<std::optional<DipPair>> out;
    out.reserve(scan.spectra.size());
    for (std::size_t i = 0; i < scan.spectra.size(); ++i)
    {
        try
        {
            const auto split = estimate_g_from_splitting(scan.spectra[i]);
            out.emplace_back(DipPair{scan.temperatures[i], split.lower.omega, split.upper.omega});
        }
        catch (const std::domain_error&)
        {
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

AnticrossingGap anticrossing_gap(const TemperatureScan& scan)
{
    std::optional<AnticrossingGap> best;
    for (const auto& pair : track_dips(scan))
    {
        if (!pair)
            continue;
        if (!best || pair->separation() < best->gap)
            best = AnticrossingGap{pair->separation(), pair->temperature};
    }
    if (!best)
        throw std::domain_error("anticrossing_gap: two dips never resolve in the scan");
    return *best;
}

} // namespace pillarqed
