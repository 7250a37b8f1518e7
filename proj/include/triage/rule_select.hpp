#pragma once

#include <string>
#include <utility>

#include "triage/decision_space.hpp"
#include "triage/empirical.hpp"

namespace triage {

struct TiltModel;

struct RiskReport {
    double fnr = 0.0;            // P(score <= lower | status 1)
    double fpr = 0.0;            // P(score >  upper | status 0)
    double tmr = 0.0;            // prevalence-weighted total misclassification
    double weighted_risk = 0.0;  // lambda p FNR + (1-lambda)(1-p) FPR
    double fn_component = 0.0;   // p FNR
    double fp_component = 0.0;   // (1-p) FPR
    double test_fraction = 0.0;  // pooled(upper) - pooled(lower)
    double lambda = 0.5;
};

struct SelectionCriterion {
    enum class Kind { min_tmr, min_lambda };
    Kind kind = Kind::min_tmr;
    double lambda = 0.5;  // required for min_lambda

    static SelectionCriterion min_tmr() { return {Kind::min_tmr, 0.5}; }
    static SelectionCriterion min_lambda(double lambda);
};

RiskReport risk_report(const TripartiteRule& rule, const CdfSet& cdfs, double lambda = 0.5);

// Exhaustive scan over the space with the deterministic tie policy:
// primary criterion, then lower TMR, then smaller upper, then smaller lower.
std::pair<TripartiteRule, RiskReport> select_min_risk(const DecisionSpace& space,
                                                      const CdfSet& cdfs,
                                                      const SelectionCriterion& criterion);

// Minimum-TMR rule under the tilt model: the test interval is centered at
// -beta0/beta1 with half-width chosen as the largest candidate for which the
// closed interval [center - d, center + d] fits the testing budget under the
// pooled empirical CDF.  Cutoffs that exit the observed score range are
// clamped to it; the risk report uses the semiparametric CDFs.
struct TiltSelection {
    TripartiteRule rule;  // clamped to the observed support
    double raw_lower = 0.0, raw_upper = 0.0;
    double center = 0.0, half_width = 0.0;
    bool clamped = false;
    RiskReport report;
};

TiltSelection select_tilt_min_tmr(const TiltModel& tilt, const CdfSet& empirical, double phi);

std::string selection_to_json(const TripartiteRule& rule, const RiskReport& report, double phi);

}  // namespace triage
