#include "simma/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace simma {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

// continued fraction for Gamma(a,x), valid for x >~ 1 and any a (modified Lentz)
double upper_gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

// gamma(a,x) / x^a = sum_{n>=0} (-x)^n / (n! (a+n)); converges fast for x < ~2.
// Valid for any a that is not 0, -1, -2, ...
double lower_gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double pow_term = 1.0;
    for (int n = 1; n <= 300; ++n) {
        pow_term *= -x / n;
        double add = pow_term / (a + n);
        sum += add;
        if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

} // namespace

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

double log_norm_cdf(double z) {
    if (z >= -8.0) {
        return std::log(0.5 * std::erfc(-z / kSqrt2));
    }
    // Mills-ratio asymptotics: Phi(z) = phi(z)/|z| * sum_k (-1)^k (2k-1)!!/z^{2k};
    // truncated at the smallest term, which is far below 1e-15 for z <= -8
    double inv2 = 1.0 / (z * z);
    double series = 1.0;
    double term = 1.0;
    for (int k = 1; k <= 16; ++k) {
        double next = term * (-(2.0 * k - 1.0)) * inv2;
        if (std::fabs(next) >= std::fabs(term)) break;
        series += next;
        term = next;
        if (std::fabs(next) < 1e-18 * series) break;
    }
    return -0.5 * z * z - kLogSqrt2Pi - std::log(-z) + std::log(series);
}

double expint_e1(double x) {
    if (x <= 0.0) throw std::domain_error("expint_e1: x must be positive");
    if (x <= 1.0) {
        const double euler = 0.57721566490153286061;
        double sum = 0.0, term = 1.0;
        for (int n = 1; n <= 60; ++n) {
            term *= -x / n;
            double add = -term / n;
            sum += add;
            if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
        }
        return -euler - std::log(x) + sum;
    }
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 300; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

double upper_gamma(double a, double x) {
    if (!(a > -2.0 && a <= 2.0)) throw std::domain_error("upper_gamma: a out of supported range (-2,2]");
    if (x < 0.0) throw std::domain_error("upper_gamma: x must be nonnegative");
    if (x == 0.0) {
        if (a > 0.0) return std::tgamma(a);
        return kInf;
    }
    // poles of the generic series: fall back to E1-based exact forms
    if (std::fabs(a) < 1e-13) return expint_e1(x);
    if (std::fabs(a + 1.0) < 1e-13) return std::exp(-x) / x - expint_e1(x);

    if (x >= 1.0 && x >= a) return upper_gamma_cf(a, x);
    return std::tgamma(a) - std::pow(x, a) * lower_gamma_series(a, x);
}

double lower_gamma(double a, double x) {
    if (a <= 0.0) throw std::domain_error("lower_gamma: a must be positive");
    if (x < 0.0) throw std::domain_error("lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x >= 1.0 && x >= a) return std::tgamma(a) - upper_gamma_cf(a, x);
    return std::pow(x, a) * lower_gamma_series(a, x);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace simma
