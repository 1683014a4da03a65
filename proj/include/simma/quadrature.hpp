#pragma once

#include <functional>

namespace simma::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
    int initial_panels = 1;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
    long evaluations = 0;
};

using Fn = std::function<double(double)>;

// adaptive Gauss-Kronrod 7/15 on a finite interval
Result integrate(const Fn& f, double a, double b, Options opt = {});

// same, after the substitution x = e^w; requires 0 < a < b
Result integrate_log(const Fn& f, double a, double b, Options opt = {});

// int_0^b f(x) dx where f ~ A x^p near 0 with p > -1: log-spaced panels down to
// b*e^-45 plus the analytic power-law correction for the remaining sliver
Result integrate_to_zero(const Fn& f, double b, double origin_exponent, Options opt = {});

// int_a^inf f(x) dx where f ~ B x^q at infinity with q < -1, or decays faster
// than any power (pass -infinity): log-spaced panels up to a*e^45 plus the
// analytic power-law correction for the truncated tail
Result integrate_to_inf(const Fn& f, double a, double infinity_exponent, Options opt = {});

} // namespace simma::quad
