#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace improvable::cli {

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

enum class Format { Json, Csv };

// Output of one subcommand. JSON emits parameters, summary and rows
// separately. CSV has one line per row, with the scalar summary fields
// repeated as trailing columns so that every CSV is a single flat table.
struct Report {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> warnings;
    int exit_code = 0;
    std::string diagnostic;
};

void write_report(const Report& report, Format format, std::ostream& out);

}  // namespace improvable::cli
