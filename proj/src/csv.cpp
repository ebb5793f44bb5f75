#include "pillarqed/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace pillarqed::io
{
namespace
{

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

// Non-empty lines with a trailing CR removed.
std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> out;
    for (auto line : split(text, '\n'))
    {
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            out.push_back(line);
    }
    return out;
}

std::vector<std::vector<double>> parse_table(std::string_view text, std::string_view header, std::size_t columns)
{
    const auto rows = lines(text);
    if (rows.empty() || rows.front() != header)
        throw std::invalid_argument("csv: expected header '" + std::string(header) + "'");
    std::vector<std::vector<double>> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto fields = split(rows[i], ',');
        if (fields.size() != columns)
            throw std::invalid_argument("csv: row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                                        " fields, expected " + std::to_string(columns));
        std::vector<double> row;
        row.reserve(columns);
        for (auto f : fields)
            row.push_back(parse_double(f));
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{})
        throw std::runtime_error("format_double failed");
    return {buf.data(), end};
}

double parse_double(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return value;
}

void atomic_write(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
    {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string spectrum_csv(const Spectrum& s)
{
    std::string out = "omega_ueV,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += format_double(s.omega_at(i)) + ',' + format_double(s.value_at(i)) + '\n';
    return out;
}

Spectrum parse_spectrum_csv(std::string_view text)
{
    std::vector<double> omega;
    std::vector<double> values;
    for (const auto& row : parse_table(text, "omega_ueV,value", 2))
    {
        omega.push_back(row[0]);
        values.push_back(row[1]);
    }
    return {std::move(omega), std::move(values)};
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& s) { atomic_write(path, spectrum_csv(s)); }

Spectrum read_spectrum(const std::filesystem::path& path) { return parse_spectrum_csv(read_file(path)); }

std::string channels_csv(std::span<const ChannelRecord> records)
{
    std::string out = "omega_ueV,h,v,d,a\n";
    for (const auto& r : records)
        out += format_double(r.omega) + ',' + format_double(r.h) + ',' + format_double(r.v) + ',' +
               format_double(r.d) + ',' + format_double(r.a) + '\n';
    return out;
}

std::vector<ChannelRecord> parse_channels_csv(std::string_view text)
{
    std::vector<ChannelRecord> out;
    for (const auto& row : parse_table(text, "omega_ueV,h,v,d,a", 5))
    {
        const ChannelRecord rec{row[0], row[1], row[2], row[3], row[4]};
        if (rec.h < 0.0 || rec.v < 0.0 || rec.d < 0.0 || rec.a < 0.0)
            throw std::invalid_argument("channels csv: intensities must be >= 0");
        if (!out.empty() && !(rec.omega > out.back().omega))
            throw std::invalid_argument("channels csv: omega must be strictly increasing");
        out.push_back(rec);
    }
    if (out.size() < 2)
        throw std::invalid_argument("channels csv: need at least 2 rows");
    return out;
}

void write_channels(const std::filesystem::path& path, std::span<const ChannelRecord> records)
{
    atomic_write(path, channels_csv(records));
}

std::vector<ChannelRecord> read_channels(const std::filesystem::path& path)
{
    return parse_channels_csv(read_file(path));
}

std::string design_csv(std::span<const DesignPoint> points)
{
    std::string out = "kappa,max_phase_rad,argmax_ueV,refl_on_res,feasible\n";
    for (const auto& p : points)
        out += format_double(p.params.kappa_top()) + ',' + format_double(p.max_conditional_phase) + ',' +
               format_double(p.argmax_omega) + ',' + format_double(p.on_resonance_reflectivity) + ',' +
               (p.feasible ? "1" : "0") + '\n';
    return out;
}

std::string manifest_csv(std::span<const std::pair<double, std::string>> entries)
{
    std::string out = "temperature_K,file\n";
    for (const auto& [t, file] : entries)
        out += format_double(t) + ',' + file + '\n';
    return out;
}

std::vector<std::pair<double, std::string>> parse_manifest_csv(std::string_view text)
{
    const auto rows = lines(text);
    if (rows.empty() || rows.front() != "temperature_K,file")
        throw std::invalid_argument("manifest: expected header 'temperature_K,file'");
    std::vector<std::pair<double, std::string>> out;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto fields = split(rows[i], ',');
        if (fields.size() != 2)
            throw std::invalid_argument("manifest: malformed row " + std::to_string(i + 1));
        out.emplace_back(parse_double(fields[0]), std::string(fields[1]));
    }
    return out;
}

} // namespace pillarqed::io
