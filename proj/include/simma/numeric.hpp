#pragma once

#include <string>

namespace simma {

// standard normal CDF via erfc; relative accuracy ~1e-15 down to underflow
double norm_cdf(double z);

// log of the standard normal CDF; switches to an asymptotic Mills-ratio
// expansion for very negative arguments where erfc underflows
double log_norm_cdf(double z);

// upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt for
// a in (-2, 2], x >= 0 (a <= 0 requires x > 0)
double upper_gamma(double a, double x);

// lower incomplete gamma for a > 0, x >= 0
double lower_gamma(double a, double x);

// exponential integral E1(x), x > 0
double expint_e1(double x);

// deterministic shortest-faithful float formatting for CSV output ("%.17g")
std::string fmt_double(double v);

} // namespace simma
