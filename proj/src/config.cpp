#include "pillarqed/config.hpp"

#include "pillarqed/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pillarqed
{
namespace
{

std::string_view trim(std::string_view s)
{
    constexpr std::string_view space = " \t\r\n";
    const auto first = s.find_first_not_of(space);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(space);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

double number(std::string_view key, std::string_view text)
{
    try
    {
        const double v = io::parse_double(trim(text));
        if (!std::isfinite(v))
            throw ConfigError("non-finite");
        return v;
    }
    catch (const std::invalid_argument&)
    {
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    }
}

std::uint64_t unsigned_integer(std::string_view key, std::string_view text)
{
    const double v = number(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
        throw ConfigError("config: '" + std::string(key) + "' expects a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

bool boolean(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ConfigError("config: '" + std::string(key) + "' expects true/false");
}

Param param(std::string_view name)
{
    const auto p = param_from_name(trim(name));
    if (!p)
        throw ConfigError("config: unknown parameter '" + std::string(name) + "'");
    return *p;
}

double energy_value(std::string_view key, std::string_view text)
{
    try
    {
        return parse_energy(text);
    }
    catch (const ConfigError& e)
    {
        throw ConfigError("config: '" + std::string(key) + "': " + e.what());
    }
}

} // namespace

double parse_energy(std::string_view text)
{
    text = trim(text);
    double scale = 1.0;
    for (const auto& [suffix, factor] : {std::pair<std::string_view, double>{"meV", 1e3},
                                         {"ueV", 1.0},
                                         {"\xce\xbc" "eV", 1.0},
                                         {"\xc2\xb5" "eV", 1.0}})
    {
        if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix)
        {
            scale = factor;
            text = trim(text.substr(0, text.size() - suffix.size()));
            break;
        }
    }
    try
    {
        const double v = io::parse_double(text);
        if (!std::isfinite(v))
            throw ConfigError("non-finite energy");
        return v * scale;
    }
    catch (const std::invalid_argument&)
    {
        throw ConfigError("not an energy: '" + std::string(text) + "'");
    }
}

Grid parse_grid(std::string_view text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3)
        throw ConfigError("grid must be START:STOP:N, got '" + std::string(text) + "'");
    const auto n = unsigned_integer("grid points", parts[2]);
    Grid g{parse_energy(parts[0]), parse_energy(parts[1]), static_cast<std::size_t>(n)};
    try
    {
        g.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
    return g;
}

std::vector<double> parse_list(std::string_view text)
{
    text = trim(text);
    if (text.empty())
        return {};
    if (text.find(':') != std::string_view::npos)
    {
        const auto parts = split(text, ':');
        if (parts.size() != 3)
            throw ConfigError("range must be START:STOP:N, got '" + std::string(text) + "'");
        const double start = number("range start", parts[0]);
        const double stop = number("range stop", parts[1]);
        const auto n = unsigned_integer("range count", parts[2]);
        if (n == 1)
            return {start};
        if (n < 1 || !(stop > start))
            throw ConfigError("range needs N >= 1 and STOP > START");
        return Grid{start, stop, static_cast<std::size_t>(n)}.values();
    }
    std::vector<double> out;
    for (auto item : split(text, ','))
        out.push_back(number("list", item));
    return out;
}

SystemParams RunConfig::system() const
{
    try
    {
        return {g, kappa_top, kappa_side, gamma, omega_c};
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
}

double RunConfig::resolved_omega_qd() const { return omega_qd.value_or(omega_c); }

Grid RunConfig::resolved_grid() const
{
    if (grid)
        return *grid;
    return Grid::centred(omega_c, 100.0, grid_points);
}

TuningModel RunConfig::tuning() const
{
    TuningModel m;
    m.qd_slope = qd_slope;
    m.cavity_slope = cavity_slope;
    m.qd_ref = qd_ref.value_or(resolved_omega_qd());
    m.cavity_ref = cavity_ref.value_or(omega_c);
    m.t_ref = t_ref;
    m.t_min = t_min;
    m.t_max = t_max;
    try
    {
        m.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
    return m;
}

BackgroundModel RunConfig::background_model() const
{
    try
    {
        return BackgroundModel{background, background_phase};
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(e.what());
    }
}

ModelParams RunConfig::initial_guess() const
{
    auto p = ModelParams::from(system(), resolved_omega_qd(), background, 1.0);
    for (const auto& [k, v] : guess)
        p[k] = v;
    return p;
}

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view value)
{
    const auto key = trim(raw_key);
    value = trim(value);
    const auto energy = [&] { return energy_value(key, value); };

    if (key == "g")
        c.g = energy();
    else if (key == "kappa_top")
        c.kappa_top = energy();
    else if (key == "kappa_side")
        c.kappa_side = energy();
    else if (key == "gamma")
        c.gamma = energy();
    else if (key == "omega_c")
        c.omega_c = energy();
    else if (key == "omega_qd")
        c.omega_qd = energy();
    else if (key == "background")
        c.background = number(key, value);
    else if (key == "background_phase")
        c.background_phase = number(key, value);
    else if (key == "beta")
        c.beta = number(key, value);
    else if (key == "noise")
        c.noise = number(key, value);
    else if (key == "seed")
        c.seed = unsigned_integer(key, value);
    else if (key == "grid")
        c.grid = parse_grid(value);
    else if (key == "grid_points")
        c.grid_points = static_cast<std::size_t>(unsigned_integer(key, value));
    else if (key == "qd_slope")
        c.qd_slope = number(key, value);
    else if (key == "cavity_slope")
        c.cavity_slope = number(key, value);
    else if (key == "qd_ref")
        c.qd_ref = energy();
    else if (key == "cavity_ref")
        c.cavity_ref = energy();
    else if (key == "t_ref")
        c.t_ref = number(key, value);
    else if (key == "t_min")
        c.t_min = number(key, value);
    else if (key == "t_max")
        c.t_max = number(key, value);
    else if (key == "temperatures")
        c.temperatures = parse_list(value);
    else if (key == "kappa_values")
        c.kappa_values = parse_list(value);
    else if (key == "fit_free")
    {
        c.fit_free.clear();
        for (auto name : split(value, ','))
            if (!name.empty())
                c.fit_free.push_back(param(name));
    }
    else if (key.starts_with("bound_"))
    {
        const auto p = param(key.substr(6));
        const auto parts = split(value, ':');
        if (parts.size() != 2)
            throw ConfigError("config: '" + std::string(key) + "' expects LO:HI");
        const double lo = is_energy(p) || p <= Param::gamma ? energy_value(key, parts[0]) : number(key, parts[0]);
        const double hi = is_energy(p) || p <= Param::gamma ? energy_value(key, parts[1]) : number(key, parts[1]);
        c.bounds[p] = Bounds{lo, hi};
    }
    else if (key.starts_with("guess_"))
    {
        const auto p = param(key.substr(6));
        c.guess[p] = is_energy(p) || p <= Param::gamma ? energy() : number(key, value);
    }
    else if (key == "max_iterations")
        c.max_iterations = static_cast<std::size_t>(unsigned_integer(key, value));
    else if (key == "allow_nonconverged")
        c.allow_nonconverged = boolean(key, value);
    else if (key == "out")
        c.out = std::filesystem::path(std::string(value));
    else
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    std::size_t line_no = 0;
    for (auto line : split(text, '\n'))
    {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::string text;
    try
    {
        text = io::read_file(path);
    }
    catch (const std::runtime_error& e)
    {
        throw ConfigError(e.what());
    }
    return parse_config(text, std::move(base));
}

std::string documented_defaults()
{
    const RunConfig c;
    const auto list = [](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? "," : "") + io::format_double(v[i]);
        return out;
    };
    std::ostringstream s;
    s << "# rates and energies in ueV unless suffixed with meV\n"
      << "g = " << io::format_double(c.g) << "\n"
      << "kappa_top = " << io::format_double(c.kappa_top) << "\n"
      << "kappa_side = " << io::format_double(c.kappa_side) << "\n"
      << "gamma = " << io::format_double(c.gamma) << "\n"
      << "omega_c = " << io::format_double(c.omega_c) << "\n"
      << "omega_qd = <omega_c>\n"
      << "background = 0\n"
      << "background_phase = 0\n"
      << "beta = " << io::format_double(c.beta) << "\n"
      << "noise = 0            # multiplicative white noise on synthesized intensities\n"
      << "seed = 42\n"
      << "grid = <omega_c-100>:<omega_c+100>:<grid_points>\n"
      << "grid_points = " << c.grid_points << "\n"
      << "qd_slope = " << io::format_double(c.qd_slope) << "     # ueV/K, placeholder\n"
      << "cavity_slope = " << io::format_double(c.cavity_slope) << "   # ueV/K, placeholder\n"
      << "qd_ref = <omega_qd>\n"
      << "cavity_ref = <omega_c>\n"
      << "t_ref = " << io::format_double(c.t_ref) << "\n"
      << "t_min = " << io::format_double(c.t_min) << "\n"
      << "t_max = " << io::format_double(c.t_max) << "\n"
      << "temperatures = " << list(c.temperatures) << "\n"
      << "kappa_values = " << list(c.kappa_values) << "\n"
      << "fit_free = g,kappa_top,kappa_side,gamma\n"
      << "bound_<param> = LO:HI    # defaults: rates 0:1000, energies span the data\n"
      << "guess_<param> = VALUE    # defaults: the model parameters above\n"
      << "max_iterations = " << c.max_iterations << "\n"
      << "allow_nonconverged = false\n"
      << "out = .\n";
    return s.str();
}

} // namespace pillarqed
