#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace triage {

struct LogisticFit;

// One patient visit: a scalar risk score oriented so that larger values mean
// higher failure risk, the binary gold-standard status, and optionally the
// raw viral load and the raw marker values the score was derived from.
struct Observation {
    double score = 0.0;
    int status = 0;  // 0 = suppressed, 1 = failing
    std::optional<double> raw_vl;
    std::map<std::string, double> markers;
};

struct Cohort {
    std::vector<Observation> observations;

    std::size_t size() const { return observations.size(); }
    std::vector<double> scores() const;
    std::vector<int> statuses() const;
    std::size_t count_status(int status) const;
    bool has_both_statuses() const;
};

struct VlThreshold {
    double v_star = 400.0;  // copies/mL
};

// Status is 1 iff the viral load strictly exceeds the threshold.
int dichotomize(double raw_vl, const VlThreshold& threshold);

// Inverse-logit of the fit's linear predictor over the named markers.
// Every marker the fit references must be present.
double composite_score(const std::map<std::string, double>& markers, const LogisticFit& fit);

}  // namespace triage
