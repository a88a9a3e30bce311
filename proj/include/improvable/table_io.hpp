#pragma once

// Two-column CSV curve tables: a header row, then "x,value" rows with
// strictly increasing x.

#include <istream>
#include <string>
#include <vector>

#include "improvable/homogeneous_pvalue.hpp"

namespace improvable {

std::vector<CurvePoint> read_curve_csv(std::istream& in);
std::vector<CurvePoint> read_curve_csv_file(const std::string& path);

}  // namespace improvable
