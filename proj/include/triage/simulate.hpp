#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "triage/empirical.hpp"
#include "triage/rule_select.hpp"

namespace triage {

struct Cohort;

// Ceiling-of-gamma CD4 cohorts: status ~ Bernoulli(prevalence), then
// CD4 = ceil(W) with W ~ Gamma(shape_z, scale_z).  The risk score is the
// negated CD4 count so that larger scores mean higher risk.
struct GammaScenario {
    std::string name;
    double shape0 = 1.0, scale0 = 1.0;  // status 0
    double shape1 = 1.0, scale1 = 1.0;  // status 1
    double prevalence = 0.5;
};

// The four built-in scenarios: A-1/A-2 violate the exponential tilt
// assumption (different shapes), B-1/B-2 satisfy it (common shape 2.8).
// Prevalence is filled from the caller's p.
GammaScenario named_scenario(const std::string& name, double prevalence);

// Scenario configuration from a JSON document.  Keys: name, eta0/kappa0 and
// eta1/kappa1 (shape0/scale0 style aliases accepted), p, and optionally phi,
// n, replicates, seed.  A recognized name fills any omitted gamma
// parameters.
struct ScenarioConfig {
    GammaScenario scenario;
    double phi = -1.0;  // negative = not supplied
    long long n = -1;
    int replicates = -1;
    long long seed = -1;
};
ScenarioConfig parse_scenario_config(const std::string& json_text);

Cohort sample_scenario(const GammaScenario& scenario, std::size_t n, std::uint64_t seed);

// Exact CDFs of the negated-CD4 score on the integer grid 0..grid_max,
// via the regularized incomplete gamma.
CdfSet analytic_cdf_set(const GammaScenario& scenario, int grid_max = 5000);

struct TrueOptimum {
    TripartiteRule rule;       // score scale
    RiskReport report;
    double cd4_lower = 0.0;    // -rule.upper
    double cd4_upper = 0.0;    // -rule.lower (inf when lower is the sentinel)
};

// Risk minimizer over the analytic budget-feasible maximal family.
TrueOptimum true_optimum(const GammaScenario& scenario, double phi,
                         const SelectionCriterion& criterion, int grid_max = 5000);

// One Table-style cell: replicate means and SDs of the estimated cutoffs on
// the CD4 scale, and mean test-half misclassification, for the empirical and
// the tilt-based estimator.  Negative CD4 cutoffs from the tilt estimator
// are clamped to 0; the variant that re-spends the clamped budget on the
// other side is reported alongside.
struct ScenarioCell {
    std::string scenario;
    double prevalence = 0.0;
    double phi = 0.0;
    double true_cd4_lower = 0.0, true_cd4_upper = 0.0, true_tmr = 0.0;
    double np_lower_mean = 0.0, np_lower_sd = 0.0;
    double np_upper_mean = 0.0, np_upper_sd = 0.0;
    double np_tmr_mean = 0.0;
    double sp_lower_mean = 0.0, sp_lower_sd = 0.0;
    double sp_upper_mean = 0.0, sp_upper_sd = 0.0;
    double sp_tmr_mean = 0.0;
    double sp_retight_lower_mean = 0.0, sp_retight_upper_mean = 0.0;
    int replicates = 0;
};

struct StudyConfig {
    int replicates = 1000;
    std::size_t n = 5000;  // first half trains, second half tests
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

std::vector<ScenarioCell> run_scenario_study(const std::vector<std::string>& scenarios,
                                             const std::vector<double>& p_values,
                                             const std::vector<double>& phi_values,
                                             const StudyConfig& config);
// Same study over explicit gamma parameter sets (prevalence is overridden
// by each p in turn).
std::vector<ScenarioCell> run_scenario_study(const std::vector<GammaScenario>& scenarios,
                                             const std::vector<double>& p_values,
                                             const std::vector<double>& phi_values,
                                             const StudyConfig& config);

struct ConvergenceResult {
    std::vector<std::size_t> sample_sizes;
    // per method: sigma_n = mean of the lower/upper cutoff SDs at each size
    std::vector<double> sigma_np, sigma_sp;
    std::vector<double> sigma_np_lower, sigma_np_upper;
    std::vector<double> sigma_sp_lower, sigma_sp_upper;
    // least-squares fit of log sigma_n on -log n
    double slope_np = 0.0, intercept_np = 0.0;
    double slope_sp = 0.0, intercept_sp = 0.0;
};

ConvergenceResult convergence_study(const GammaScenario& scenario, double phi,
                                    const std::vector<std::size_t>& sample_sizes, int replicates,
                                    std::uint64_t seed, unsigned threads = 1);

struct DesignLookup {
    std::size_t n_np = 0;
    std::size_t n_sp = 0;
};

// Smallest n with fitted sigma_n <= target, clamped below at the smallest
// tested size.
DesignLookup design_lookup(const ConvergenceResult& result, double target_sigma);

}  // namespace triage
