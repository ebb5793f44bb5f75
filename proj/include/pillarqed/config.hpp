#pragma once

#include "pillarqed/estimation.hpp"
#include "pillarqed/scattering.hpp"
#include "pillarqed/spectrum.hpp"
#include "pillarqed/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pillarqed
{

// Raised for malformed or out-of-range configuration.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Flat `key = value` settings shared by every subcommand. Energies and rates are in ueV unless
// the value carries a `meV` / `ueV` suffix. Unset optionals derive from other keys:
// omega_qd and cavity_ref follow omega_c, qd_ref follows omega_qd, the grid is omega_c +- 100 ueV.
struct RunConfig
{
    double g = reference::g;
    double kappa_top = reference::kappa_top;
    double kappa_side = reference::kappa_side;
    double gamma = reference::gamma;
    double omega_c = reference::omega_c;
    std::optional<double> omega_qd;

    double background = 0.0;
    double background_phase = 0.0;
    double beta = 0.9;
    double noise = 0.0;
    std::uint64_t seed = 42;

    std::optional<Grid> grid;
    std::size_t grid_points = 2001;

    double qd_slope = -10.0;
    double cavity_slope = -3.0;
    std::optional<double> qd_ref;
    std::optional<double> cavity_ref;
    double t_ref = 20.0;
    double t_min = 4.0;
    double t_max = 40.0;
    std::vector<double> temperatures{17.0, 17.5, 18.0, 18.5, 19.0, 19.5, 20.0, 20.5, 21.0, 21.5, 22.0, 22.5, 23.0};

    std::vector<double> kappa_values{1.2, 2.5, 5.0, 10.0, 15.0, 20.0, 24.7, 30.0, 37.6, 50.0, 75.0, 100.0};

    std::vector<Param> fit_free{Param::g, Param::kappa_top, Param::kappa_side, Param::gamma};
    std::map<Param, Bounds> bounds;
    std::map<Param, double> guess;
    std::size_t max_iterations = 500;
    bool allow_nonconverged = false;

    std::filesystem::path out = ".";

    [[nodiscard]] SystemParams system() const;
    [[nodiscard]] double resolved_omega_qd() const;
    [[nodiscard]] Grid resolved_grid() const;
    [[nodiscard]] TuningModel tuning() const;
    [[nodiscard]] BackgroundModel background_model() const;
    // Config parameters overridden by guess_<name> entries.
    [[nodiscard]] ModelParams initial_guess() const;
};

// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Lines are `key = value`; `#` starts a comment; blank lines are skipped.
[[nodiscard]] RunConfig parse_config(std::string_view text, RunConfig base = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Energy with optional unit suffix, returned in ueV.
[[nodiscard]] double parse_energy(std::string_view text);
// `START:STOP:N` (energies may carry suffixes).
[[nodiscard]] Grid parse_grid(std::string_view text);
// Comma list, or `START:STOP:N` for an evenly spaced list.
[[nodiscard]] std::vector<double> parse_list(std::string_view text);

// Every key with its default, one `key = value` per line.
[[nodiscard]] std::string documented_defaults();

} // namespace pillarqed
