#include "triage/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "triage/cohort.hpp"
#include "triage/errors.hpp"

namespace triage {

double StepCdf::operator()(double s) const {
    auto it = std::upper_bound(points.begin(), points.end(), s);
    if (it == points.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - points.begin()) - 1];
}

double StepCdf::left(double s) const {
    auto it = std::lower_bound(points.begin(), points.end(), s);
    if (it == points.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - points.begin()) - 1];
}

double StepCdf::mass_at(double s) const {
    auto it = std::lower_bound(points.begin(), points.end(), s);
    if (it == points.end() || *it != s) return 0.0;
    std::size_t i = static_cast<std::size_t>(it - points.begin());
    return i == 0 ? cum[0] : cum[i] - cum[i - 1];
}

double StepCdf::inverse(double t) const {
    if (t <= 0.0) return kBelowSupport;
    auto it = std::lower_bound(cum.begin(), cum.end(), t);
    if (it == cum.end()) return points.back();
    return points[static_cast<std::size_t>(it - cum.begin())];
}

StepCdf StepCdf::from_masses(std::vector<std::pair<double, double>> masses) {
    std::sort(masses.begin(), masses.end());
    StepCdf cdf;
    cdf.points.reserve(masses.size());
    cdf.cum.reserve(masses.size());
    double running = 0.0;
    for (const auto& [point, mass] : masses) {
        running += mass;
        if (!cdf.points.empty() && cdf.points.back() == point) {
            cdf.cum.back() = running;
        } else {
            cdf.points.push_back(point);
            cdf.cum.push_back(running);
        }
    }
    return cdf;
}

CdfSet ecdf_set(const Cohort& cohort) {
    if (cohort.size() == 0) throw DataError("empty cohort");
    if (!cohort.has_both_statuses()) throw DataError("cohort must contain both statuses");

    const double n = static_cast<double>(cohort.size());
    const double n1 = static_cast<double>(cohort.count_status(1));
    const double n0 = n - n1;

    std::vector<std::pair<double, double>> m0, m1, mall;
    m0.reserve(cohort.size());
    m1.reserve(cohort.size());
    mall.reserve(cohort.size());
    for (const auto& o : cohort.observations) {
        if (!std::isfinite(o.score)) throw DataError("non-finite score");
        mall.emplace_back(o.score, 1.0 / n);
        if (o.status == 1)
            m1.emplace_back(o.score, 1.0 / n1);
        else
            m0.emplace_back(o.score, 1.0 / n0);
    }

    CdfSet set;
    set.neg = StepCdf::from_masses(std::move(m0));
    set.pos = StepCdf::from_masses(std::move(m1));
    set.pooled = StepCdf::from_masses(std::move(mall));
    set.prevalence = n1 / n;
    return set;
}

void write_step_cdf(std::ostream& out, const StepCdf& cdf) {
    out << "score,cdf\n";
    auto old = out.precision(12);
    for (std::size_t i = 0; i < cdf.points.size(); ++i)
        out << cdf.points[i] << ',' << cdf.cum[i] << '\n';
    out.precision(old);
}

double feasible_lower(const StepCdf& pooled, double upper, double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    double cdf_upper = pooled(upper);
    if (budget_ok(cdf_upper, 0.0, phi)) return kBelowSupport;
    // smallest support value w with budget_ok(cdf_upper, cdf(w), phi)
    double target = cdf_upper - phi - kBudgetEps;
    auto it = std::lower_bound(pooled.cum.begin(), pooled.cum.end(), target);
    if (it == pooled.cum.end()) return pooled.points.back();
    return pooled.points[static_cast<std::size_t>(it - pooled.cum.begin())];
}

}  // namespace triage
