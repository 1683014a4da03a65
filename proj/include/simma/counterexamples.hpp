#pragma once

namespace simma {

// E[U | U + V = y] for independent U ~ N(0,1) and V standard Laplace:
//
//   [e^{-y} Phi(y-1) - e^{y}(1 - Phi(y+1))] / [e^{-y} Phi(y-1) + e^{y}(1 - Phi(y+1))]
//
// evaluated as tanh of half the difference of the two log terms, so the
// fragile products never form; the log normal CDF switches to a Mills-ratio
// expansion where erfc underflows. The exact value lies strictly inside
// (-1, 1) for every finite y, approaches +-1 at +-infinity, and the best
// representable double saturates to exactly +-1.0 once |y| exceeds about 9.5.
// A bounded conditional mean of this kind is what rules the decomposition
// components of the Gauss-Laplace sum out of the infinitely divisible class.
double conditional_mean(double y);

// Characteristic-function terms for X_t = sum_{k<=N} B_k(t) with independent
// standard Brownian motions B_k and one Poisson(1) count N shared by the
// whole path. X is a martingale, yet its increments are dependent: if they
// were independent, pair_cf would have to equal pair_sum, and joint_cf would
// factor into product_cf.
struct FactorizationTerms {
    double joint_cf;    // E e^{i th (X_2-X_1) + i u X_1} = exp(pair_cf - 1)
    double product_cf;  // E e^{i th (X_2-X_1)} * E e^{i u X_1}
    double pair_cf;     // E e^{i th (B_2-B_1) + i u B_1} = e^{-(th^2+u^2)/2}
    double pair_sum;    // e^{-th^2/2} + e^{-u^2/2} - 1
};

FactorizationTerms factorization_terms(double theta, double u);

// |joint_cf - product_cf|; zero iff theta or u vanishes, strictly positive
// otherwise, certifying the dependence of the increments
double poisson_brownian_factorization_gap(double theta, double u);

} // namespace simma
