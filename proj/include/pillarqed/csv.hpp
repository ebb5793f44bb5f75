#pragma once

#include "pillarqed/design.hpp"
#include "pillarqed/interferometer.hpp"
#include "pillarqed/spectrum.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pillarqed::io
{

// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_double(double value);
// Strict full-string parse; throws std::invalid_argument.
[[nodiscard]] double parse_double(std::string_view text);

// Writes to a sibling temporary file then renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

// "omega_ueV,value" with LF line endings.
[[nodiscard]] std::string spectrum_csv(const Spectrum& s);
[[nodiscard]] Spectrum parse_spectrum_csv(std::string_view text);
void write_spectrum(const std::filesystem::path& path, const Spectrum& s);
[[nodiscard]] Spectrum read_spectrum(const std::filesystem::path& path);

// "omega_ueV,h,v,d,a".
[[nodiscard]] std::string channels_csv(std::span<const ChannelRecord> records);
[[nodiscard]] std::vector<ChannelRecord> parse_channels_csv(std::string_view text);
void write_channels(const std::filesystem::path& path, std::span<const ChannelRecord> records);
[[nodiscard]] std::vector<ChannelRecord> read_channels(const std::filesystem::path& path);

// "kappa,max_phase_rad,argmax_ueV,refl_on_res,feasible" with feasible as 0/1.
[[nodiscard]] std::string design_csv(std::span<const DesignPoint> points);

// "temperature_K,file".
[[nodiscard]] std::string manifest_csv(std::span<const std::pair<double, std::string>> entries);
[[nodiscard]] std::vector<std::pair<double, std::string>> parse_manifest_csv(std::string_view text);

} // namespace pillarqed::io
