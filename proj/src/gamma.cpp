#include "triage/gamma.hpp"

#include <cmath>
#include <limits>

#include "triage/errors.hpp"

namespace triage {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

// P(a,x) by the power series  x^a e^-x / Gamma(a+1) * sum x^n / (a+1)...(a+n).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

// Q(a,x) by the Lentz continued fraction, stable for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double reg_gamma_p(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) throw NumericalError("reg_gamma_p: bad arguments");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double reg_gamma_q(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) throw NumericalError("reg_gamma_q: bad arguments");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double gamma_cdf(double x, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw NumericalError("gamma_cdf: bad parameters");
    if (x <= 0.0) return 0.0;
    return reg_gamma_p(shape, x / scale);
}

double gamma_pdf(double x, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw NumericalError("gamma_pdf: bad parameters");
    if (x <= 0.0) return 0.0;
    double lx = x / scale;
    return std::exp((shape - 1.0) * std::log(lx) - lx - std::lgamma(shape)) / scale;
}

double chi_square_upper_tail(double statistic, double df) {
    if (statistic <= 0.0) return 1.0;
    return reg_gamma_q(df / 2.0, statistic / 2.0);
}

}  // namespace triage
