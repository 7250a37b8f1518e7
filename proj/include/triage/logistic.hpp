#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace triage {

// Dense feature matrix, row-major, with named columns.  The intercept column
// is implicit and handled by the fitter.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::size_t n = 0;
    std::vector<double> values;  // n * names.size()

    double at(std::size_t row, std::size_t col) const { return values[row * names.size() + col]; }
    static FeatureMatrix single(const std::string& name, const std::vector<double>& column);
};

struct LogisticFit {
    double intercept = 0.0;
    double intercept_se = 0.0;
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    bool converged = false;
    int iterations = 0;
    double max_gradient = 0.0;
    std::vector<double> loglik_trace;  // log-likelihood after each Newton step

    double coefficient(const std::string& name) const;
    double standard_error(const std::string& name) const;
    double linear_predictor(const std::vector<double>& row) const;
};

double expit(double eta);

// Log-likelihood and its gradient (intercept first) at the given parameters;
// exposed so the analytic gradient can be cross-checked numerically.
double logistic_loglik(const FeatureMatrix& features, const std::vector<int>& labels,
                       const std::vector<double>& params);
std::vector<double> logistic_gradient(const FeatureMatrix& features, const std::vector<int>& labels,
                                      const std::vector<double>& params);

// Maximum likelihood by Newton iterations with step halving.  Declares
// convergence at gradient max-norm <= 1e-8 and keeps polishing toward 1e-12
// while iterations remain.  Throws on degenerate labels, separation
// (coefficient norm beyond 1e4 with still-improving likelihood), or a
// singular information matrix.
LogisticFit fit_logistic(const FeatureMatrix& features, const std::vector<int>& labels);
LogisticFit fit_logistic_1d(const std::vector<double>& score, const std::vector<int>& labels);

std::vector<double> predicted_probabilities(const FeatureMatrix& features, const LogisticFit& fit);

struct HosmerLemeshowResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int groups_used = 0;
};

// Deciles-of-risk calibration test; ties in predicted probability are kept
// in one group.  Chi-square with (groups - 2) degrees of freedom.
HosmerLemeshowResult hosmer_lemeshow(const LogisticFit& fit, const FeatureMatrix& features,
                                     const std::vector<int>& labels, int groups = 10);

}  // namespace triage
