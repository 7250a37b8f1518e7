#include "triage/rule_select.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "triage/errors.hpp"
#include "triage/tilt.hpp"

namespace triage {

SelectionCriterion SelectionCriterion::min_lambda(double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    return {Kind::min_lambda, lambda};
}

RiskReport risk_report(const TripartiteRule& rule, const CdfSet& cdfs, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    RiskReport r;
    r.lambda = lambda;
    const double p = cdfs.prevalence;
    r.fnr = is_below_support(rule.lower) ? 0.0 : cdfs.pos(rule.lower) / cdfs.pos.total();
    r.fpr = is_below_support(rule.upper)
                ? 1.0
                : 1.0 - cdfs.neg(rule.upper) / cdfs.neg.total();
    r.fn_component = p * r.fnr;
    r.fp_component = (1.0 - p) * r.fpr;
    r.tmr = r.fn_component + r.fp_component;
    r.weighted_risk = lambda * r.fn_component + (1.0 - lambda) * r.fp_component;
    double up = is_below_support(rule.upper) ? 0.0 : cdfs.pooled(rule.upper);
    double lo = is_below_support(rule.lower) ? 0.0 : cdfs.pooled(rule.lower);
    r.test_fraction = up - lo;
    return r;
}

std::pair<TripartiteRule, RiskReport> select_min_risk(const DecisionSpace& space,
                                                      const CdfSet& cdfs,
                                                      const SelectionCriterion& criterion) {
    if (space.rules.empty()) throw DataError("empty decision space");
    const double lambda =
        criterion.kind == SelectionCriterion::Kind::min_lambda ? criterion.lambda : 0.5;

    bool have_best = false;
    TripartiteRule best_rule;
    RiskReport best_report;
    double best_primary = 0.0;
    for (const auto& rule : space.rules) {
        RiskReport rep = risk_report(rule, cdfs, lambda);
        double primary =
            criterion.kind == SelectionCriterion::Kind::min_tmr ? rep.tmr : rep.weighted_risk;
        bool better = false;
        if (!have_best) {
            better = true;
        } else if (primary != best_primary) {
            better = primary < best_primary;
        } else if (rep.tmr != best_report.tmr) {
            better = rep.tmr < best_report.tmr;
        } else if (rule.upper != best_rule.upper) {
            better = rule.upper < best_rule.upper;
        } else {
            better = rule.lower < best_rule.lower;
        }
        if (better) {
            have_best = true;
            best_rule = rule;
            best_report = rep;
            best_primary = primary;
        }
    }
    return {best_rule, best_report};
}

TiltSelection select_tilt_min_tmr(const TiltModel& tilt, const CdfSet& empirical, double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    if (!tilt.logistic.converged) throw NumericalError("tilt selection requires a converged fit");
    if (!(tilt.beta1 > 0.0))
        throw NumericalError("tilt slope must be positive: larger scores must mean higher risk");

    TiltSelection sel;
    sel.center = -tilt.beta0 / tilt.beta1;

    // candidate half-widths where the budget function can jump
    const auto& support = empirical.support();
    std::vector<double> cands;
    cands.reserve(support.size() + 1);
    cands.push_back(0.0);
    for (double s : support) cands.push_back(std::fabs(s - sel.center));
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    // largest feasible candidate; the budget of the closed interval
    // [c-d, c+d] is nondecreasing in d, so binary search applies
    auto feasible = [&](double d) {
        return budget_ok(empirical.pooled(sel.center + d),
                         empirical.pooled.left(sel.center - d), phi);
    };
    std::size_t lo = 0, hi = cands.size();
    if (!feasible(cands[0])) {
        sel.half_width = 0.0;
    } else {
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (feasible(cands[mid]))
                lo = mid;
            else
                hi = mid;
        }
        sel.half_width = cands[lo];
    }

    sel.raw_lower = sel.center - sel.half_width;
    sel.raw_upper = sel.center + sel.half_width;

    // clamp to the observed score range, preserving the classification of
    // every observed score
    const double support_min = support.front();
    const double support_max = support.back();
    auto clamp_cut = [&](double cut) {
        if (cut > support_max) return support_max;
        if (cut < support_min) return kBelowSupport;
        return cut;
    };
    sel.rule.lower = clamp_cut(sel.raw_lower);
    sel.rule.upper = clamp_cut(sel.raw_upper);
    if (!is_below_support(sel.rule.upper) && !is_below_support(sel.rule.lower) &&
        sel.rule.lower > sel.rule.upper)
        sel.rule.lower = sel.rule.upper;
    sel.clamped = sel.rule.lower != sel.raw_lower || sel.rule.upper != sel.raw_upper;

    sel.report = risk_report(sel.rule, tilt.cdfs, 0.5);
    return sel;
}

std::string selection_to_json(const TripartiteRule& rule, const RiskReport& report, double phi) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"lower\": ";
    if (is_below_support(rule.lower))
        os << "null";
    else
        os << rule.lower;
    os << ", \"upper\": ";
    if (is_below_support(rule.upper))
        os << "null";
    else
        os << rule.upper;
    os << ", \"phi\": " << phi << ", \"lambda\": " << report.lambda
       << ", \"fnr\": " << report.fnr << ", \"fpr\": " << report.fpr << ", \"tmr\": " << report.tmr
       << ", \"weighted_risk\": " << report.weighted_risk
       << ", \"test_fraction\": " << report.test_fraction << "}";
    return os.str();
}

}  // namespace triage
