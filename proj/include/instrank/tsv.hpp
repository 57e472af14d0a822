#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace instrank::tsv {

// Splits on '\t' only. Fields may be empty; no quoting, tabs are forbidden
// inside fields by the file contract.
std::vector<std::string_view> split(std::string_view line);

bool parse_int(std::string_view field, long long& out);
bool parse_double(std::string_view field, double& out);

// Fixed-point, e.g. format_fixed(1.5, 6) -> "1.500000".
std::string format_fixed(double value, int decimals);

// 12 significant digits, used by all persisted model files.
std::string format_sig12(double value);

}  // namespace instrank::tsv
