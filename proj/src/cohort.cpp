#include "triage/cohort.hpp"

#include <cmath>

#include "triage/errors.hpp"
#include "triage/logistic.hpp"

namespace triage {

std::vector<double> Cohort::scores() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.score);
    return out;
}

std::vector<int> Cohort::statuses() const {
    std::vector<int> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.status);
    return out;
}

std::size_t Cohort::count_status(int status) const {
    std::size_t c = 0;
    for (const auto& o : observations)
        if (o.status == status) ++c;
    return c;
}

bool Cohort::has_both_statuses() const {
    return count_status(0) > 0 && count_status(1) > 0;
}

int dichotomize(double raw_vl, const VlThreshold& threshold) {
    if (!std::isfinite(raw_vl) || raw_vl < 0.0)
        throw DataError("viral load must be a finite nonnegative value");
    return raw_vl > threshold.v_star ? 1 : 0;
}

double composite_score(const std::map<std::string, double>& markers, const LogisticFit& fit) {
    double eta = fit.intercept;
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        auto it = markers.find(fit.names[i]);
        if (it == markers.end()) throw DataError("missing marker: " + fit.names[i]);
        eta += fit.coefficients[i] * it->second;
    }
    if (!std::isfinite(eta)) throw NumericalError("composite score linear predictor is not finite");
    return expit(eta);
}

}  // namespace triage
