#pragma once

#include "pillarqed/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pillarqed::cli
{

enum ExitCode : int
{
    success = 0,
    usage_error = 1,
    numerical_failure = 2,
};

// Writes, under config.out:
//   {empty,coupled}_intensity.csv   measured intensity (background applied, optional noise)
//   {empty,coupled}_phase.csv       unwrapped measured phase
//   {empty,coupled}_channels.csv    H/V/D/A records with the compensator zeroed at the grid edges
//   conditional_phase.csv           unwrapped phase of coupled against empty
int cmd_synth(const RunConfig& config);

struct FitInputs
{
    std::optional<std::filesystem::path> coupled_intensity;
    std::optional<std::filesystem::path> empty_intensity;
    std::optional<std::filesystem::path> coupled_phase;
    std::optional<std::filesystem::path> empty_phase;
};

// Writes config.out/fit_report.txt. Returns numerical_failure when the fit does not converge
// unless config.allow_nonconverged is set.
int cmd_fit(const RunConfig& config, const FitInputs& inputs);

// Per-record phase with the bias zeroed at the first and last rows; writes `output`
// (default config.out/phase.csv).
int cmd_phase(const RunConfig& config, const std::filesystem::path& channels,
              const std::optional<std::filesystem::path>& output = std::nullopt);

// Writes config.out/scan_NNN.csv per temperature and config.out/scan_manifest.csv.
int cmd_scan(const RunConfig& config);

// Writes config.out/design.csv.
int cmd_design(const RunConfig& config);

// Report keys in order; used by the writer and by consumers that parse the report.
[[nodiscard]] std::string fit_report(const FitResult& result, const FitProblem& problem);

// Full command line front end: parses, dispatches, and maps exceptions onto exit codes
// (configuration and I/O problems -> 1, numerical failures -> 2).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

} // namespace pillarqed::cli
