#pragma once

namespace overage {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
// Relative accuracy ~1e-14 for a in (0, 1e3].
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

}  // namespace overage
