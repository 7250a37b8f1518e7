#pragma once

#include <optional>
#include <string>
#include <vector>

#include "triage/empirical.hpp"

namespace triage {

struct Cohort;

// Cutoff pair (lower, upper], lower <= upper.  Scores at or below `lower`
// are diagnosed negative, scores above `upper` positive, and the half-open
// interval in between is sent for gold-standard testing.  Either cutoff may
// be the below-support sentinel.
struct TripartiteRule {
    double lower = kBelowSupport;
    double upper = kBelowSupport;

    bool operator==(const TripartiteRule&) const = default;
};

enum class Decision { negative, order_gold_standard_test, positive };

struct Diagnosis {
    Decision decision = Decision::negative;
    std::optional<int> resolved;  // final call once the gold standard is observed
};

Diagnosis apply_rule(const TripartiteRule& rule, double score, std::optional<int> status = {});

// All budget-feasible rules whose test interval cannot be extended to
// another support point without breaking pooled(upper) - pooled(lower) <= phi.
struct DecisionSpace {
    std::vector<TripartiteRule> rules;
    double phi = 0.0;
};

// Sweep construction: for each lower candidate (the below-support sentinel
// followed by the sorted support) pair it with the largest feasible upper,
// then drop later duplicates of the same upper.
DecisionSpace build_decision_space(const CdfSet& cdfs, double phi);

// Independent quadratic-cost construction for cross-checking: enumerate all
// cutoff pairs, filter by the budget, drop intervals strictly contained in
// another feasible interval.  Counts its own CDF values from the cohort.
// Guarded to n <= 1000.
DecisionSpace brute_force_space(const Cohort& cohort, double phi);

std::string rule_to_json(const TripartiteRule& rule, double phi);

}  // namespace triage
