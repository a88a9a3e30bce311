#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <type_traits>

namespace improvable::cli {

namespace {

nlohmann::ordered_json to_json(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return v;
            } else {
                return v;
            }
        },
        cell);
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_field(const nlohmann::ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number()) return csv_number(v.get<double>());
    if (v.is_string()) return csv_escape(v.get<std::string>());
    return csv_escape(v.dump());
}

std::string csv_field(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return csv_number(*d);
    return csv_field(to_json(cell));
}

}  // namespace

void write_report(const Report& report, Format format, std::ostream& out) {
    if (format == Format::Json) {
        nlohmann::ordered_json doc;
        doc["command"] = report.command;
        doc["parameters"] = report.parameters;
        doc["summary"] = report.summary;
        doc["columns"] = report.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : report.rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t c = 0; c < report.columns.size(); ++c) {
                obj[report.columns[c]] = to_json(row[c]);
            }
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        doc["warnings"] = report.warnings;
        out << doc.dump(2) << '\n';
        return;
    }

    std::vector<std::string> summary_keys;
    std::vector<std::string> summary_values;
    for (const auto& [key, value] : report.summary.items()) {
        if (value.is_structured()) continue;
        if (std::find(report.columns.begin(), report.columns.end(), key) != report.columns.end()) continue;
        summary_keys.push_back(key);
        summary_values.push_back(csv_field(value));
    }
    std::string header;
    for (const auto& c : report.columns) header += (header.empty() ? "" : ",") + c;
    for (const auto& k : summary_keys) header += (header.empty() ? "" : ",") + k;
    out << header << '\n';
    for (const auto& row : report.rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) line += ',';
            line += csv_field(row[c]);
        }
        for (const auto& v : summary_values) line += ',' + v;
        out << line << '\n';
    }
}

}  // namespace improvable::cli
