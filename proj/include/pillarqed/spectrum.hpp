#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pillarqed
{

using Complex = std::complex<double>;

// Uniform probe-energy grid in ueV.
struct Grid
{
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 0;

    // Throws std::invalid_argument unless points >= 2 and start < stop.
    void validate() const;
    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] double step() const { return (stop - start) / static_cast<double>(points - 1); }

    // Symmetric grid centre +- half_width.
    static Grid centred(double centre, double half_width, std::size_t points);
};

// Ordered samples over a strictly increasing energy axis (ueV).
template <class T>
class BasicSpectrum
{
public:
    BasicSpectrum() = default;

    BasicSpectrum(std::vector<double> omega, std::vector<T> values)
        : omega_(std::move(omega)), values_(std::move(values))
    {
        if (omega_.size() != values_.size())
            throw std::invalid_argument("spectrum: omega/value length mismatch");
        if (omega_.size() < 2)
            throw std::invalid_argument("spectrum: need at least 2 points");
        for (std::size_t i = 1; i < omega_.size(); ++i)
        {
            if (!(omega_[i] > omega_[i - 1]))
                throw std::invalid_argument("spectrum: grid must be strictly increasing (index " +
                                            std::to_string(i) + ")");
        }
    }

    [[nodiscard]] std::size_t size() const { return omega_.size(); }
    [[nodiscard]] std::span<const double> omega() const { return omega_; }
    [[nodiscard]] std::span<const T> values() const { return values_; }
    [[nodiscard]] double omega_at(std::size_t i) const { return omega_[i]; }
    [[nodiscard]] const T& value_at(std::size_t i) const { return values_[i]; }

    bool operator==(const BasicSpectrum&) const = default;

private:
    std::vector<double> omega_;
    std::vector<T> values_;
};

using Spectrum = BasicSpectrum<double>;
using AmplitudeSpectrum = BasicSpectrum<Complex>;

// Removes 2*pi jumps by nearest-branch continuation; the first sample is kept as is.
[[nodiscard]] std::vector<double> unwrap_phase(std::span<const double> wrapped);

[[nodiscard]] double median(std::vector<double> values);

} // namespace pillarqed
