#pragma once

namespace triage {

// Regularized lower incomplete gamma P(a, x); Q(a, x) = 1 - P(a, x).
// Series expansion for x < a + 1, Lentz continued fraction otherwise;
// relative error below 1e-10 over the probe range used by the tests.
double reg_gamma_p(double a, double x);
double reg_gamma_q(double a, double x);

// CDF and density of Gamma(shape, scale).
double gamma_cdf(double x, double shape, double scale);
double gamma_pdf(double x, double shape, double scale);

// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
double chi_square_upper_tail(double statistic, double df);

}  // namespace triage
