#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "triage/empirical.hpp"

namespace triage {

struct Cohort;

enum class RocSource { nonparametric, semiparametric, analytic };

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Operating points of the budget-feasible maximal rule family, sorted by
// FPR, plus the (1, 1) endpoint.  A step curve through these points.
struct RocCurve {
    std::vector<RocPoint> points;
    double phi = 0.0;
    RocSource source = RocSource::nonparametric;
};

// One point per decision-space rule: (1 - neg(upper), 1 - pos(lower)).
// Validates that `pooled` is the prevalence mixture of `neg` and `pos`.
RocCurve roc_curve(const CdfSet& cdfs, double phi, RocSource source = RocSource::nonparametric);

// Area under the step curve by trapezoid over the sorted operating points;
// equals the pairwise estimator exactly, ties included.
double auc_from_curve(const RocCurve& curve);

// Pairwise estimator: over independent draws S from status 1 and S' from
// status 0, P(S > floor(S')) + P(S = floor(S'))/2 where floor is the budget
// lower-bound operator on the pooled CDF.
double auc(const CdfSet& cdfs, double phi);
double auc(const Cohort& cohort, double phi);

// 1/2 + phi - phi^2/2: the value reached when both status distributions
// coincide; stochastically ordered scores can only do better.
double auc_lower_bound(double phi);

// Plug-in large-sample variance of the AUC estimate.
double auc_variance_plugin(const Cohort& cohort, double phi);

struct AucRow {
    double phi = 0.0;
    double auc = 0.0;
    double variance_plugin = 0.0;
};

std::vector<AucRow> auc_vs_phi(const Cohort& cohort, const std::vector<double>& phis);

struct AucDifferenceRow {
    double phi = 0.0;
    double auc_first = 0.0;
    double auc_second = 0.0;
    double difference = 0.0;  // second - first
    double ci_lo = 0.0, ci_hi = 0.0;
};

// AUC difference between two scorings of the same visits, with paired
// bootstrap percentile intervals.
std::vector<AucDifferenceRow> auc_difference_vs_phi(const std::vector<double>& score_first,
                                                    const std::vector<double>& score_second,
                                                    const std::vector<int>& statuses,
                                                    const std::vector<double>& phis,
                                                    int replicates, std::uint64_t seed);

}  // namespace triage
