#pragma once

#include <string>

namespace avglab {

// Decimal with 17 significant digits ("%.17g"); JSON has no inf/nan, so
// those become null.
std::string json_number(double v);
// JSON string literal with escapes.
std::string json_string(const std::string& s);
// "%.17e", used for CSV columns.
std::string csv_number(double v);

}  // namespace avglab
