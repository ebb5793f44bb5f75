#include "pillarqed/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pillarqed
{

void Grid::validate() const
{
    if (points < 2)
        throw std::invalid_argument("grid: need at least 2 points");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
        throw std::invalid_argument("grid: require finite start < stop");
}

std::vector<double> Grid::values() const
{
    validate();
    std::vector<double> out(points);
    const double h = step();
    for (std::size_t i = 0; i < points; ++i)
        out[i] = start + h * static_cast<double>(i);
    out.back() = stop;
    return out;
}

Grid Grid::centred(double centre, double half_width, std::size_t points)
{
    Grid g{centre - half_width, centre + half_width, points};
    g.validate();
    return g;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> out(wrapped.begin(), wrapped.end());
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i)
    {
        const double jump = wrapped[i] - wrapped[i - 1];
        offset -= two_pi * std::round(jump / two_pi);
        out[i] = wrapped[i] + offset;
    }
    return out;
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("median of empty set");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1)
        return hi;
    double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

} // namespace pillarqed
