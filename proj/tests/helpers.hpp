#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "triage/cohort.hpp"
#include "triage/rng.hpp"

namespace testutil {

using triage::Cohort;
using triage::Observation;

// Random cohort with a configurable amount of score/status association and
// optional duplicated (tied) scores.
inline Cohort random_cohort(std::mt19937_64& rng, std::size_t n, double shift = 1.0,
                            double prevalence = 0.4, bool with_ties = false) {
    Cohort cohort;
    cohort.observations.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Observation o;
        o.status = triage::bernoulli(rng, prevalence) ? 1 : 0;
        double s = triage::standard_normal(rng) + (o.status ? shift : 0.0);
        if (with_ties) s = std::round(s * 4.0) / 4.0;
        o.score = s;
        cohort.observations.push_back(o);
    }
    // ensure both statuses
    if (cohort.count_status(1) == 0) cohort.observations.front().status = 1;
    if (cohort.count_status(0) == 0) cohort.observations.front().status = 0;
    return cohort;
}

// O(n^2) counting version of the pooled ECDF.
inline double naive_pooled_ecdf(const Cohort& cohort, double s) {
    std::size_t count = 0;
    for (const auto& o : cohort.observations)
        if (o.score <= s) ++count;
    return static_cast<double>(count) / static_cast<double>(cohort.size());
}

inline double naive_status_ecdf(const Cohort& cohort, int status, double s) {
    std::size_t count = 0, total = 0;
    for (const auto& o : cohort.observations) {
        if (o.status != status) continue;
        ++total;
        if (o.score <= s) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
}

// Classical bipartite Mann-Whitney AUC with the half-tie convention.
inline double mann_whitney_auc(const Cohort& cohort) {
    double wins = 0.0, pairs = 0.0;
    for (const auto& a : cohort.observations) {
        if (a.status != 1) continue;
        for (const auto& b : cohort.observations) {
            if (b.status != 0) continue;
            pairs += 1.0;
            if (a.score > b.score)
                wins += 1.0;
            else if (a.score == b.score)
                wins += 0.5;
        }
    }
    return wins / pairs;
}

// Conventional bipartite ROC point set: one point per distinct threshold
// plus the all-positive corner.
inline std::vector<std::pair<double, double>> classic_bipartite_roc(const Cohort& cohort) {
    std::vector<double> support;
    for (const auto& o : cohort.observations) support.push_back(o.score);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    std::vector<std::pair<double, double>> points;
    for (double c : support) {
        double fpr = 1.0 - naive_status_ecdf(cohort, 0, c);
        double tpr = 1.0 - naive_status_ecdf(cohort, 1, c);
        points.emplace_back(fpr, tpr);
    }
    points.emplace_back(1.0, 1.0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace testutil
