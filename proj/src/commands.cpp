#include "pillarqed/commands.hpp"

#include "pillarqed/csv.hpp"
#include "pillarqed/design.hpp"
#include "pillarqed/estimation.hpp"
#include "pillarqed/interferometer.hpp"
#include "pillarqed/log.hpp"
#include "pillarqed/tuning.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace pillarqed::cli
{
namespace
{

namespace fs = std::filesystem;

Spectrum phase_of(const AmplitudeSpectrum& measured)
{
    std::vector<double> wrapped;
    wrapped.reserve(measured.size());
    for (const auto& m : measured.values())
        wrapped.push_back(principal_arg(m));
    return {std::vector<double>(measured.omega().begin(), measured.omega().end()), unwrap_phase(wrapped)};
}

AmplitudeSpectrum with_background(const AmplitudeSpectrum& r, const BackgroundModel& bg)
{
    std::vector<Complex> values;
    values.reserve(r.size());
    for (const auto& v : r.values())
        values.push_back(apply_background(v, bg));
    return {std::vector<double>(r.omega().begin(), r.omega().end()), std::move(values)};
}

std::vector<ChannelRecord> channels_for(const AmplitudeSpectrum& measured, double beta)
{
    const double far = 0.5 * (principal_arg(measured.values().front()) + principal_arg(measured.values().back()));
    return simulate_channel_scan(measured, ReferenceArm::calibrated(Complex{beta, 0.0}, far));
}

void written(const fs::path& path) { log().info("wrote {}", path.string()); }

std::string stderr_text(double value)
{
    if (std::isnan(value))
        return "fixed";
    if (std::isinf(value))
        return "inf";
    return io::format_double(value);
}

} // namespace

int cmd_synth(const RunConfig& config)
{
    const auto p = config.system();
    const auto bg = config.background_model();
    const auto omega = config.resolved_grid().values();
    const auto dot = QdState::at(config.resolved_omega_qd());

    struct Variant
    {
        const char* name;
        QdState qd;
        std::uint64_t seed_offset;
    };
    for (const auto& v : {Variant{"empty", QdState::empty_cavity(), 0}, Variant{"coupled", dot, 1}})
    {
        const auto measured = with_background(amplitude_spectrum(p, v.qd, omega), bg);
        auto intensity = measured_intensity(amplitude_spectrum(p, v.qd, omega), bg);
        if (config.noise > 0.0)
            intensity = with_multiplicative_noise(intensity, config.noise, config.seed + v.seed_offset);
        const std::string stem = v.name;
        io::write_spectrum(config.out / (stem + "_intensity.csv"), intensity);
        io::write_spectrum(config.out / (stem + "_phase.csv"), phase_of(measured));
        io::write_channels(config.out / (stem + "_channels.csv"), channels_for(measured, config.beta));
        written(config.out / (stem + "_*.csv"));
    }
    io::write_spectrum(config.out / "conditional_phase.csv",
                       conditional_phase_spectrum(p, config.resolved_omega_qd(), omega, bg));
    written(config.out / "conditional_phase.csv");
    return success;
}

std::string fit_report(const FitResult& result, const FitProblem& problem)
{
    std::ostringstream s;
    s << "converged = " << (result.converged ? "true" : "false") << "\n"
      << "message = " << result.message << "\n"
      << "iterations = " << result.iterations << "\n"
      << "residual_norm = " << io::format_double(result.residual_norm) << "\n"
      << "gradient_norm = " << io::format_double(result.gradient_norm) << "\n"
      << "covariance_condition = " << io::format_double(result.covariance_condition) << "\n";
    for (auto p : all_params)
    {
        const auto k = static_cast<std::size_t>(p);
        s << param_name(p) << " = " << io::format_double(result.params[p]) << "\n"
          << param_name(p) << "_stderr = " << (problem.free_mask[k] ? stderr_text(result.std_errors[k]) : "fixed")
          << "\n";
    }
    return s.str();
}

int cmd_fit(const RunConfig& config, const FitInputs& inputs)
{
    FitProblem problem;
    const auto add = [&](const std::optional<fs::path>& path, Observable kind, bool coupled) {
        if (path)
            problem.observed.push_back(Observation{kind, coupled, io::read_spectrum(*path), {}});
    };
    add(inputs.coupled_intensity, Observable::intensity, true);
    add(inputs.empty_intensity, Observable::intensity, false);
    add(inputs.coupled_phase, Observable::phase, true);
    add(inputs.empty_phase, Observable::phase, false);
    if (problem.observed.empty())
        throw ConfigError("fit: no input spectra given");

    problem.initial_guess = config.initial_guess();
    problem.background_phase = config.background_phase;
    problem.bounds = FitProblem::default_bounds(problem.observed);
    for (const auto& [p, b] : config.bounds)
        problem.bounds[static_cast<std::size_t>(p)] = b;
    for (auto p : config.fit_free)
        problem.free_mask[static_cast<std::size_t>(p)] = true;

    LeastSquaresOptions options;
    options.max_iterations = config.max_iterations;
    const auto result = fit(problem, options);
    const auto report_path = config.out / "fit_report.txt";
    io::atomic_write(report_path, fit_report(result, problem));
    written(report_path);
    if (!result.converged)
    {
        log().error("fit did not converge: {}", result.message);
        return config.allow_nonconverged ? success : numerical_failure;
    }
    return success;
}

int cmd_phase(const RunConfig& config, const fs::path& channels, const std::optional<fs::path>& output)
{
    const auto records = io::read_channels(channels);
    const auto trace = extract_phase_trace(records);
    const auto path = output.value_or(config.out / "phase.csv");
    io::write_spectrum(path, trace.phase);
    written(path);
    return success;
}

int cmd_scan(const RunConfig& config)
{
    if (config.temperatures.empty())
        throw ConfigError("scan: temperature list is empty");
    const auto scan = synthesize_scan(config.system(), config.tuning(), config.temperatures,
                                      config.resolved_grid().values(), config.background_model());
    std::vector<std::pair<double, std::string>> manifest;
    for (std::size_t i = 0; i < scan.spectra.size(); ++i)
    {
        char name[32];
        std::snprintf(name, sizeof name, "scan_%03zu.csv", i);
        io::write_spectrum(config.out / name, scan.spectra[i]);
        manifest.emplace_back(scan.temperatures[i], name);
    }
    io::atomic_write(config.out / "scan_manifest.csv", io::manifest_csv(manifest));
    written(config.out / "scan_manifest.csv");
    return success;
}

int cmd_design(const RunConfig& config)
{
    if (config.kappa_values.empty())
        throw ConfigError("design: kappa list is empty");
    for (double k : config.kappa_values)
        if (!(k > 0.0))
            throw ConfigError("design: kappa values must be > 0");
    const auto points = sweep_kappa(config.system(), config.kappa_values);
    io::atomic_write(config.out / "design.csv", io::design_csv(points));
    written(config.out / "design.csv");
    return success;
}

int run(int argc, const char* const* argv)
{
    CLI::App app{"Quantum dot / micropillar reflection simulator, fitter and design explorer", "pillar_qed"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> background;
    std::optional<std::string> grid;
    std::vector<std::string> settings;
    bool show_defaults = false;
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed (default 42)");
    app.add_option("--background", background, "coherent background fraction b in [0, 1)");
    app.add_option("--grid", grid, "probe grid START:STOP:N (ueV, or with meV suffix)");
    app.add_option("--set", settings, "override any configuration key: key=value");
    app.add_flag("--print-defaults", show_defaults, "print every configuration key with its default");

    auto* synth = app.add_subcommand("synth", "synthesize empty/coupled spectra and channel records");
    FitInputs fit_inputs;
    bool allow_nonconverged = false;
    auto* fit_cmd = app.add_subcommand("fit", "fit the reflection model to spectra");
    fit_cmd->add_option("--coupled", fit_inputs.coupled_intensity, "coupled-dot intensity CSV");
    fit_cmd->add_option("--empty", fit_inputs.empty_intensity, "empty-cavity intensity CSV");
    fit_cmd->add_option("--coupled-phase", fit_inputs.coupled_phase, "coupled-dot phase CSV");
    fit_cmd->add_option("--empty-phase", fit_inputs.empty_phase, "empty-cavity phase CSV");
    fit_cmd->add_flag("--allow-nonconverged", allow_nonconverged, "exit 0 even if the fit does not converge");
    std::string channels;
    std::optional<std::string> phase_output;
    auto* phase_cmd = app.add_subcommand("phase", "extract phase from H/V/D/A channel records");
    phase_cmd->add_option("channels", channels, "channel CSV (omega_ueV,h,v,d,a)")->required();
    phase_cmd->add_option("--output", phase_output, "output CSV (default <out>/phase.csv)");
    auto* scan_cmd = app.add_subcommand("scan", "synthesize a temperature-tuned scan");
    std::optional<std::string> temperatures;
    scan_cmd->add_option("--temperatures", temperatures, "comma list or START:STOP:N in kelvin");
    auto* design_cmd = app.add_subcommand("design", "sweep the outcoupling rate kappa");
    std::optional<std::string> kappas;
    design_cmd->add_option("--kappa", kappas, "comma list or START:STOP:N in ueV");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return usage_error;
    }

    if (show_defaults)
        std::cout << documented_defaults();

    try
    {
        RunConfig config = config_path ? load_config(*config_path) : RunConfig{};
        for (const auto& s : settings)
        {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + s + "'");
            apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
        }
        if (out_dir)
            config.out = *out_dir;
        if (seed)
            config.seed = *seed;
        if (background)
            apply_setting(config, "background", io::format_double(*background));
        if (grid)
            apply_setting(config, "grid", *grid);
        if (allow_nonconverged)
            config.allow_nonconverged = true;
        if (temperatures)
            apply_setting(config, "temperatures", *temperatures);
        if (kappas)
            apply_setting(config, "kappa_values", *kappas);
        (void)config.background_model();

        if (synth->parsed())
            return cmd_synth(config);
        if (fit_cmd->parsed())
            return cmd_fit(config, fit_inputs);
        if (phase_cmd->parsed())
            return cmd_phase(config, channels, phase_output ? std::optional<fs::path>(*phase_output) : std::nullopt);
        if (scan_cmd->parsed())
            return cmd_scan(config);
        if (design_cmd->parsed())
            return cmd_design(config);
        return usage_error;
    }
    catch (const std::domain_error& e)
    {
        std::cerr << "pillar_qed: numerical failure: " << e.what() << "\n";
        return numerical_failure;
    }
    catch (const std::exception& e)
    {
        std::cerr << "pillar_qed: " << e.what() << "\n";
        return usage_error;
    }
}

int run(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pillar_qed");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace pillarqed::cli
