#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

namespace triage {

struct Cohort;

// Sentinel for "below every observed score".  A rule cutoff at the sentinel
// places no observation on that side.
inline constexpr double kBelowSupport = -std::numeric_limits<double>::infinity();
inline bool is_below_support(double s) { return s == kBelowSupport; }

// Single rounding guard for every budget comparison G(u) - G(l) <= phi.
// All feasibility checks must share this predicate so the decision-space
// builder, the budget floor operator and the brute-force oracle agree on
// borderline intervals.
inline constexpr double kBudgetEps = 1e-12;
inline bool budget_ok(double cdf_upper, double cdf_lower, double phi) {
    return cdf_upper - cdf_lower <= phi + kBudgetEps;
}

// Right-continuous step CDF with jumps at `points` (strictly increasing) and
// cumulative mass `cum`.  Queries are binary searches over the support.
struct StepCdf {
    std::vector<double> points;
    std::vector<double> cum;

    double operator()(double s) const;  // P(X <= s)
    double left(double s) const;        // P(X < s)
    double mass_at(double s) const;     // jump height at s (0 off support)
    double inverse(double t) const;     // inf{ s : P(X <= s) >= t }
    double total() const { return cum.empty() ? 0.0 : cum.back(); }

    // Accumulates (point, mass) pairs; points need not be sorted or unique.
    static StepCdf from_masses(std::vector<std::pair<double, double>> masses);
};

// CDFs of the score by status plus their mixture.  Built empirically from a
// cohort, semiparametrically from a tilt fit, or analytically from a known
// model; all downstream rule machinery works on this shape.
struct CdfSet {
    StepCdf neg;     // status 0
    StepCdf pos;     // status 1
    StepCdf pooled;  // (1-prevalence) * neg + prevalence * pos
    double prevalence = 0.0;

    const std::vector<double>& support() const { return pooled.points; }
};

// Empirical CDFs by status; counting definition with the <= convention,
// ties handled by the counts directly.
CdfSet ecdf_set(const Cohort& cohort);

// Smallest support value w whose interval (w, upper] fits the testing
// budget: pooled(upper) - pooled(w) <= phi.  Returns the below-support
// sentinel when pooled(upper) <= phi, i.e. the budget covers everything
// below `upper`.
double feasible_lower(const StepCdf& pooled, double upper, double phi);

// Two-column plotting export: "score,cdf" rows with a header.
void write_step_cdf(std::ostream& out, const StepCdf& cdf);

}  // namespace triage
