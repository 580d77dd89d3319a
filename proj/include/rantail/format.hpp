#pragma once

#include <optional>
#include <string>

namespace rantail {

// Report-table formatting. Data files use format_exact instead.
std::string fmt_ms(double ms);         // 1 decimal
std::string fmt_rate(double rate);     // 3 decimals
std::string fmt_pvalue(double p);      // 3 decimals, scientific below 1e-3
std::string fmt_rho(const std::optional<double>& rho);  // 2 decimals or N/A

}  // namespace rantail
