#pragma once

#include <string>
#include <vector>

#include "triage/empirical.hpp"
#include "triage/logistic.hpp"

namespace triage {

struct Cohort;

// Density-ratio fit: the status-1 score density equals the status-0 density
// times exp(beta0_star + beta1 * s), estimated through the equivalent
// logistic regression of status on score plus profile-likelihood masses at
// the observed scores.
struct TiltModel {
    double beta0 = 0.0;       // logistic intercept
    double beta1 = 0.0;       // tilt slope
    double beta0_star = 0.0;  // beta0 - logit(prevalence)
    double multiplier = 0.0;  // Lagrange multiplier of the mass constraint
    std::vector<double> scores;   // cohort scores, original order
    std::vector<double> masses;   // per-observation status-0 masses
    LogisticFit logistic;
    CdfSet cdfs;  // semiparametric CDF estimates
};

// Root of sum (e_i - 1) / (1 + nu (e_i - 1)) = 0 with
// e_i = exp(beta0_star + beta1 * s_i): safeguarded bisection on the interval
// where every denominator stays positive, polished by Newton.  When all e_i
// equal 1 the equation is vacuous and the prevalence is returned.
double solve_multiplier(double beta0_star, double beta1, const std::vector<double>& scores,
                        double prevalence);

TiltModel fit_tilt(const Cohort& cohort);

struct OverlayRow {
    double score;
    double neg_empirical, neg_tilt;
    double pos_empirical, pos_tilt;
};

struct OverlayTable {
    std::vector<OverlayRow> rows;
    double sup_distance_neg = 0.0;  // max |empirical - tilt| over the grid, status 0
    double sup_distance_pos = 0.0;
};

// Side-by-side empirical and semiparametric CDF values for plotting and
// goodness-of-fit inspection.
OverlayTable gof_overlay(const TiltModel& tilt, const CdfSet& empirical,
                         const std::vector<double>& grid);

}  // namespace triage
