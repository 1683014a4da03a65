#include "simma/counterexamples.hpp"

#include <cmath>

#include "simma/numeric.hpp"

namespace simma {

double conditional_mean(double y) {
    // numerator and denominator share the terms e^{L1} and e^{L2}; their
    // normalized difference is tanh((L1 - L2)/2), stable for every y
    const double l1 = -y + log_norm_cdf(y - 1.0);
    const double l2 = y + log_norm_cdf(-(y + 1.0));
    return std::tanh(0.5 * (l1 - l2));
}

FactorizationTerms factorization_terms(double theta, double u) {
    FactorizationTerms t;
    const double et = std::exp(-0.5 * theta * theta);
    const double eu = std::exp(-0.5 * u * u);
    t.pair_cf = std::exp(-0.5 * (theta * theta + u * u));
    t.pair_sum = et + eu - 1.0;
    // compound-Poisson characteristic functions of the mixture; the inner
    // expectations are added as (e-1) terms so a vanishing theta or u makes
    // joint and product bitwise identical
    t.joint_cf = std::exp(t.pair_cf - 1.0);
    t.product_cf = std::exp((et - 1.0) + (eu - 1.0));
    return t;
}

double poisson_brownian_factorization_gap(double theta, double u) {
    const FactorizationTerms t = factorization_terms(theta, u);
    return std::abs(t.joint_cf - t.product_cf);
}

} // namespace simma
