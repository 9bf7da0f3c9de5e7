#include "filterlab/table.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace filterlab {

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& token)
{
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw std::invalid_argument("not a real number: '" + token + "'");
    return v;
}

void write_row(std::ostream& os, std::span<const std::string> fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << '\t';
        os << fields[i];
    }
    os << '\n';
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string format_observation(const Observation& y)
{
    if (const auto* s = std::get_if<std::size_t>(&y)) return std::to_string(*s);
    const auto& v = std::get<std::vector<double>>(y);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_real(v[i]);
    }
    return out;
}

Observation parse_observation(const std::string& text, bool discrete)
{
    const auto fields = split_fields(text);
    if (fields.empty()) throw std::invalid_argument("empty observation");
    if (discrete) {
        if (fields.size() != 1) throw std::invalid_argument("discrete observation must be one symbol");
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(fields[0], &pos);
        if (pos != fields[0].size() || fields[0][0] == '-')
            throw std::invalid_argument("not a symbol index: '" + fields[0] + "'");
        return Observation{static_cast<std::size_t>(v)};
    }
    std::vector<double> v;
    v.reserve(fields.size());
    for (const auto& f : fields) v.push_back(parse_real(f));
    return Observation{std::move(v)};
}

void write_observations(std::ostream& os, std::span<const Observation> ys)
{
    for (const auto& y : ys) os << format_observation(y) << '\n';
}

std::vector<Observation> read_observations(std::istream& is, bool discrete)
{
    std::vector<Observation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto fields = split_fields(line);
        if (fields.empty() || fields[0][0] == '#') continue;
        try {
            out.push_back(parse_observation(line, discrete));
        } catch (const std::exception& e) {
            throw std::invalid_argument("observation line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    return out;
}

}  // namespace filterlab
