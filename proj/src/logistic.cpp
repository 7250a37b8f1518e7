#include "triage/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "triage/errors.hpp"
#include "triage/gamma.hpp"

namespace triage {

namespace {

// Cholesky solve of the (k x k) SPD system A x = b; A row-major, overwritten.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * k + j];
            for (std::size_t m = 0; m < j; ++m) s -= a[i * k + m] * a[j * k + m];
            if (i == j) {
                if (s <= 0.0) throw NumericalError("singular information matrix");
                a[i * k + i] = std::sqrt(s);
            } else {
                a[i * k + j] = s / a[j * k + j];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (std::size_t m = 0; m < i; ++m) s -= a[i * k + m] * b[m];
        b[i] = s / a[i * k + i];
    }
    for (std::size_t ii = k; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t m = ii + 1; m < k; ++m) s -= a[m * k + ii] * b[m];
        b[ii] = s / a[ii * k + ii];
    }
    return b;
}

// Inverse of an SPD matrix via Cholesky; used for the observed-information
// standard errors.
std::vector<double> spd_inverse(const std::vector<double>& a, std::size_t k) {
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        auto x = cholesky_solve(a, e, k);
        for (std::size_t row = 0; row < k; ++row) inv[row * k + col] = x[row];
    }
    return inv;
}

double loglik_at(const FeatureMatrix& x, const std::vector<int>& y,
                 const std::vector<double>& params) {
    const std::size_t k = x.names.size();
    double ll = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
        double eta = params[0];
        for (std::size_t j = 0; j < k; ++j) eta += params[j + 1] * x.at(i, j);
        // log(p) if y=1 else log(1-p), in the stable log1p form
        ll += y[i] ? -std::log1p(std::exp(-eta)) : -std::log1p(std::exp(eta));
    }
    return ll;
}

}  // namespace

FeatureMatrix FeatureMatrix::single(const std::string& name, const std::vector<double>& column) {
    FeatureMatrix m;
    m.names = {name};
    m.n = column.size();
    m.values = column;
    return m;
}

double expit(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

double LogisticFit::coefficient(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return coefficients[i];
    throw ConfigError("unknown coefficient: " + name);
}

double LogisticFit::standard_error(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return standard_errors[i];
    throw ConfigError("unknown coefficient: " + name);
}

double LogisticFit::linear_predictor(const std::vector<double>& row) const {
    double eta = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) eta += coefficients[j] * row[j];
    return eta;
}

double logistic_loglik(const FeatureMatrix& features, const std::vector<int>& labels,
                       const std::vector<double>& params) {
    return loglik_at(features, labels, params);
}

std::vector<double> logistic_gradient(const FeatureMatrix& features, const std::vector<int>& labels,
                                      const std::vector<double>& params) {
    const std::size_t k = features.names.size();
    std::vector<double> grad(k + 1, 0.0);
    for (std::size_t i = 0; i < features.n; ++i) {
        double eta = params[0];
        for (std::size_t j = 0; j < k; ++j) eta += params[j + 1] * features.at(i, j);
        double r = labels[i] - expit(eta);
        grad[0] += r;
        for (std::size_t j = 0; j < k; ++j) grad[j + 1] += r * features.at(i, j);
    }
    return grad;
}

LogisticFit fit_logistic(const FeatureMatrix& features, const std::vector<int>& labels) {
    const std::size_t n = features.n;
    const std::size_t k = features.names.size();
    const std::size_t dim = k + 1;
    if (labels.size() != n) throw DataError("labels and features disagree in length");
    for (double v : features.values)
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    std::size_t ones = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
        ones += static_cast<std::size_t>(y);
    }
    if (ones == 0 || ones == n) throw DataError("degenerate labels: both classes required");

    std::vector<double> beta(dim, 0.0);
    double ll = loglik_at(features, labels, beta);
    LogisticFit fit;
    fit.names = features.names;
    fit.loglik_trace.push_back(ll);

    const int max_iter = 100;
    const double tol_report = 1e-8;   // contract threshold for `converged`
    const double tol_polish = 1e-12;  // keep iterating toward this while we can
    std::vector<double> info(dim * dim, 0.0);
    double max_grad = 0.0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<double> grad(dim, 0.0);
        std::fill(info.begin(), info.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = beta[0];
            for (std::size_t j = 0; j < k; ++j) eta += beta[j + 1] * features.at(i, j);
            double p = expit(eta);
            double r = labels[i] - p;
            double w = p * (1.0 - p);
            grad[0] += r;
            info[0] += w;
            for (std::size_t j = 0; j < k; ++j) {
                double xj = features.at(i, j);
                grad[j + 1] += r * xj;
                info[j + 1] += w * xj;           // row 0
                info[(j + 1) * dim] += w * xj;   // col 0
                for (std::size_t m = 0; m <= j; ++m) {
                    double v = w * xj * features.at(i, m);
                    info[(j + 1) * dim + (m + 1)] += v;
                    if (m != j) info[(m + 1) * dim + (j + 1)] += v;
                }
            }
        }
        max_grad = 0.0;
        for (double g : grad) max_grad = std::max(max_grad, std::fabs(g));
        if (max_grad <= tol_polish) break;

        auto step = cholesky_solve(info, grad, dim);
        double norm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) norm += (beta[j] + step[j]) * (beta[j] + step[j]);
        if (std::sqrt(norm) > 1e4)
            throw NumericalError("separation detected: coefficients diverging");

        // step halving keeps the log-likelihood nondecreasing up to the
        // rounding noise of the log-likelihood sum itself
        const double ll_noise = 1e-10 * std::max(1.0, std::fabs(ll));
        double scale = 1.0;
        double new_ll = ll;
        std::vector<double> cand(dim);
        for (int h = 0; h < 30; ++h) {
            for (std::size_t j = 0; j < dim; ++j) cand[j] = beta[j] + scale * step[j];
            new_ll = loglik_at(features, labels, cand);
            if (new_ll >= ll - ll_noise) break;
            scale *= 0.5;
        }
        if (cand == beta) break;  // step below double resolution
        beta = cand;
        ll = new_ll;
        fit.loglik_trace.push_back(ll);
    }

    fit.intercept = beta[0];
    fit.coefficients.assign(beta.begin() + 1, beta.end());
    fit.iterations = iter;

    // a fit whose probabilities are numerically indistinguishable from the
    // labels means the likelihood supremum sits at infinite coefficients
    double max_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double eta = beta[0];
        for (std::size_t j = 0; j < k; ++j) eta += beta[j + 1] * features.at(i, j);
        max_residual = std::max(max_residual, std::fabs(labels[i] - expit(eta)));
    }
    if (max_residual < 1e-8)
        throw NumericalError("separation detected: fitted probabilities match the labels");

    // recompute the gradient at the final parameters for the report
    auto grad = logistic_gradient(features, labels, beta);
    fit.max_gradient = 0.0;
    for (double g : grad) fit.max_gradient = std::max(fit.max_gradient, std::fabs(g));
    fit.converged = fit.max_gradient <= tol_report;
    if (!fit.converged) throw NumericalError("logistic fit did not converge");

    // observed information at the optimum
    std::fill(info.begin(), info.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = beta[0];
        for (std::size_t j = 0; j < k; ++j) eta += beta[j + 1] * features.at(i, j);
        double p = expit(eta);
        double w = p * (1.0 - p);
        info[0] += w;
        for (std::size_t j = 0; j < k; ++j) {
            double xj = features.at(i, j);
            info[j + 1] += w * xj;
            info[(j + 1) * dim] += w * xj;
            for (std::size_t m = 0; m <= j; ++m) {
                double v = w * xj * features.at(i, m);
                info[(j + 1) * dim + (m + 1)] += v;
                if (m != j) info[(m + 1) * dim + (j + 1)] += v;
            }
        }
    }
    auto cov = spd_inverse(info, dim);
    fit.intercept_se = std::sqrt(cov[0]);
    fit.standard_errors.resize(k);
    for (std::size_t j = 0; j < k; ++j) fit.standard_errors[j] = std::sqrt(cov[(j + 1) * dim + (j + 1)]);
    return fit;
}

LogisticFit fit_logistic_1d(const std::vector<double>& score, const std::vector<int>& labels) {
    return fit_logistic(FeatureMatrix::single("score", score), labels);
}

std::vector<double> predicted_probabilities(const FeatureMatrix& features, const LogisticFit& fit) {
    std::vector<double> out(features.n);
    const std::size_t k = features.names.size();
    for (std::size_t i = 0; i < features.n; ++i) {
        double eta = fit.intercept;
        for (std::size_t j = 0; j < k; ++j) eta += fit.coefficients[j] * features.at(i, j);
        out[i] = expit(eta);
    }
    return out;
}

HosmerLemeshowResult hosmer_lemeshow(const LogisticFit& fit, const FeatureMatrix& features,
                                     const std::vector<int>& labels, int groups) {
    if (groups < 2) throw ConfigError("hosmer_lemeshow requires at least 2 groups");
    if (static_cast<std::size_t>(groups) > features.n)
        throw DataError("more groups than observations");
    if (!fit.converged) throw NumericalError("hosmer_lemeshow requires a converged fit");

    auto probs = predicted_probabilities(features, fit);
    std::vector<std::size_t> order(features.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

    // equal-count group boundaries, extended so tied probabilities stay together
    const std::size_t n = features.n;
    double statistic = 0.0;
    int used = 0;
    std::size_t start = 0;
    for (int g = 0; g < groups && start < n; ++g) {
        std::size_t target = (n * static_cast<std::size_t>(g + 1)) / static_cast<std::size_t>(groups);
        std::size_t end = std::max(target, start + 1);
        while (end < n && probs[order[end]] == probs[order[end - 1]]) ++end;
        double obs = 0.0, expect = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            obs += labels[order[i]];
            expect += probs[order[i]];
        }
        double m = static_cast<double>(end - start);
        double pbar = expect / m;
        double denom = m * pbar * (1.0 - pbar);
        if (denom > 0.0) statistic += (obs - expect) * (obs - expect) / denom;
        ++used;
        start = end;
    }
    if (used < 2) throw DataError("tie collapsing left fewer than 2 groups");

    HosmerLemeshowResult res;
    res.statistic = statistic;
    res.groups_used = used;
    double df = std::max(1, used - 2);
    res.p_value = chi_square_upper_tail(statistic, df);
    return res;
}

}  // namespace triage
