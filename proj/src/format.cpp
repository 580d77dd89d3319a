#include "rantail/format.hpp"

#include <cmath>
#include <cstdio>

namespace rantail {
namespace {

std::string printf_double(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Keeps "-0.000" out of tables.
double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

std::string fmt_ms(double ms) { return printf_double("%.1f", unsigned_zero(ms)); }

std::string fmt_rate(double rate) { return printf_double("%.3f", unsigned_zero(rate)); }

std::string fmt_pvalue(double p) {
  if (p < 1e-3) return printf_double("%.2e", unsigned_zero(p));
  return printf_double("%.3f", p);
}

std::string fmt_rho(const std::optional<double>& rho) {
  if (!rho) return "N/A";
  return printf_double("%.2f", unsigned_zero(*rho));
}

}  // namespace rantail
