#include "improvable/table_io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

#include "improvable/errors.hpp"

namespace improvable {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, int line) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ValidationError("curve table line " + std::to_string(line) + ": '" +
                              std::string(field) + "' is not a number");
    }
    return value;
}

}  // namespace

std::vector<CurvePoint> read_curve_csv(std::istream& in) {
    std::string text;
    if (!std::getline(in, text)) {
        throw ValidationError("curve table is empty; a header row is required");
    }
    {
        // The header must not parse as data.
        const std::string_view header = trim(text);
        double probe = 0.0;
        const auto [ptr, ec] = std::from_chars(header.data(), header.data() + header.size(), probe);
        if (header.empty() || ec == std::errc()) {
            throw ValidationError("curve table must start with a header row, e.g. 'x,gamma_x'");
        }
        (void)ptr;
    }
    std::vector<CurvePoint> points;
    int line = 1;
    while (std::getline(in, text)) {
        ++line;
        const std::string_view row = trim(text);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw ValidationError("curve table line " + std::to_string(line) +
                                  ": expected exactly two columns");
        }
        const double x = parse_number(row.substr(0, comma), line);
        const double value = parse_number(row.substr(comma + 1), line);
        if (!points.empty() && !(x > points.back().x)) {
            throw ValidationError("curve table line " + std::to_string(line) +
                                  ": x values must be strictly increasing");
        }
        points.push_back({x, value});
    }
    if (points.empty()) {
        throw ValidationError("curve table has a header but no rows");
    }
    return points;
}

std::vector<CurvePoint> read_curve_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open curve table '" + path + "'");
    }
    return read_curve_csv(in);
}

}  // namespace improvable
