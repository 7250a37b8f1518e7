#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "triage/rule_select.hpp"

namespace triage {

struct Cohort;

struct ResampleConfig {
    int replicates = 500;
    int folds = 10;
    std::uint64_t seed = 0;
    bool stratified = false;  // resample within status classes
    unsigned threads = 1;
};

// Statistics are returned as named values so any estimator (rule cutoffs,
// risk fields, AUC) can ride the same machinery.
using NamedStatistics = std::map<std::string, double>;
using Estimator = std::function<NamedStatistics(const Cohort&)>;

struct BootstrapSummary {
    double estimate = 0.0;  // on the full cohort
    double se = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // 2.5 / 97.5 percentile
};

struct BootstrapResult {
    std::map<std::string, BootstrapSummary> statistics;
    int replicates_used = 0;
    int failures = 0;
};

// Nonparametric bootstrap: resample n observations with replacement, rerun
// the estimator, report the spread.  Replicate streams derive from the seed
// by counter, so output is a pure function of (cohort, config).  Estimator
// failures are skipped and counted; more than half failing aborts.
BootstrapResult bootstrap_se(const Cohort& cohort, const Estimator& estimator,
                             const ResampleConfig& config);

struct CvReport {
    RiskReport average;          // across-fold means; tmr recombined with the
                                 // full-cohort prevalence
    int folds_used = 0;
    std::vector<RiskReport> per_fold;
};

// K-fold cross-validation of rule selection: select on K-1 folds, evaluate
// FNR/FPR/test fraction on the held-out fold, average.  Fold assignment is a
// seed-derived permutation, independent of observation order.
CvReport kfold_cv(const Cohort& cohort, const SelectionCriterion& criterion, double phi,
                  const ResampleConfig& config);

std::string bootstrap_to_json(const BootstrapResult& result);

}  // namespace triage
