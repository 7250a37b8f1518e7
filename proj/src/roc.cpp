#include "triage/roc.hpp"

#include <algorithm>
#include <cmath>

#include "triage/cohort.hpp"
#include "triage/decision_space.hpp"
#include "triage/errors.hpp"
#include "triage/rng.hpp"

namespace triage {

namespace {

void validate_mixture(const CdfSet& cdfs) {
    const double p = cdfs.prevalence;
    for (std::size_t i = 0; i < cdfs.pooled.points.size(); ++i) {
        double s = cdfs.pooled.points[i];
        double mix = (1.0 - p) * cdfs.neg(s) + p * cdfs.pos(s);
        if (std::fabs(mix - cdfs.pooled.cum[i]) > 1e-8)
            throw DataError("pooled CDF is not the prevalence mixture of the by-status CDFs");
    }
}

}  // namespace

RocCurve roc_curve(const CdfSet& cdfs, double phi, RocSource source) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    validate_mixture(cdfs);

    RocCurve curve;
    curve.phi = phi;
    curve.source = source;
    // the composition jumps wherever the pooled CDF does: one point per
    // support value (the rule family plus the interior vertical segments),
    // closed off by the all-positive corner
    curve.points.reserve(cdfs.support().size() + 1);
    const double neg_total = cdfs.neg.total();
    const double pos_total = cdfs.pos.total();
    for (double upper : cdfs.support()) {
        RocPoint pt;
        pt.fpr = 1.0 - cdfs.neg(upper) / neg_total;
        double lower = feasible_lower(cdfs.pooled, upper, phi);
        pt.tpr = is_below_support(lower) ? 1.0 : 1.0 - cdfs.pos(lower) / pos_total;
        curve.points.push_back(pt);
    }
    curve.points.push_back({1.0, 1.0});
    std::sort(curve.points.begin(), curve.points.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });
    curve.points.erase(std::unique(curve.points.begin(), curve.points.end(),
                                   [](const RocPoint& a, const RocPoint& b) {
                                       return a.fpr == b.fpr && a.tpr == b.tpr;
                                   }),
                       curve.points.end());
    return curve;
}

double auc_from_curve(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return area;
}

double auc(const CdfSet& cdfs, double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    // sum over status-0 support: mass0(s') * [P1(S > w) + P1(S = w)/2],
    // w = feasible_lower(s'); all lookups on exact support values
    const double neg_total = cdfs.neg.total();
    const double pos_total = cdfs.pos.total();
    double total = 0.0;
    for (std::size_t j = 0; j < cdfs.neg.points.size(); ++j) {
        double mass0 = j == 0 ? cdfs.neg.cum[0] : cdfs.neg.cum[j] - cdfs.neg.cum[j - 1];
        if (mass0 <= 0.0) continue;
        double w = feasible_lower(cdfs.pooled, cdfs.neg.points[j], phi);
        double above, at;
        if (is_below_support(w)) {
            above = pos_total;
            at = 0.0;
        } else {
            above = pos_total - cdfs.pos(w);
            at = cdfs.pos.mass_at(w);
        }
        total += mass0 * (above + 0.5 * at);
    }
    return total / (neg_total * pos_total);
}

double auc(const Cohort& cohort, double phi) { return auc(ecdf_set(cohort), phi); }

double auc_lower_bound(double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    return 0.5 + phi - 0.5 * phi * phi;
}

double auc_variance_plugin(const Cohort& cohort, double phi) {
    CdfSet cdfs = ecdf_set(cohort);
    const double n = static_cast<double>(cohort.size());
    const double p = cdfs.prevalence;

    // projection of the pairwise kernel onto single observations: a status-1
    // score is compared against the distribution of the status-0 budget
    // floors, a status-0 score against the status-1 scores above its own
    // floor.  Both projections average to the AUC estimate.
    std::vector<std::pair<double, double>> floor_masses;
    double n0 = static_cast<double>(cohort.count_status(0));
    double sentinel_floor_mass = 0.0;
    for (const auto& o : cohort.observations) {
        if (o.status != 0) continue;
        double w = feasible_lower(cdfs.pooled, o.score, phi);
        if (is_below_support(w))
            sentinel_floor_mass += 1.0 / n0;
        else
            floor_masses.emplace_back(w, 1.0 / n0);
    }
    StepCdf floors = StepCdf::from_masses(std::move(floor_masses));

    double sum1 = 0.0, sumsq1 = 0.0, n1 = 0.0;
    double sum0 = 0.0, sumsq0 = 0.0, n0b = 0.0;
    const double pos_total = cdfs.pos.total();
    for (const auto& o : cohort.observations) {
        if (o.status == 1) {
            double v = sentinel_floor_mass + floors.left(o.score) + 0.5 * floors.mass_at(o.score);
            sum1 += v;
            sumsq1 += v * v;
            n1 += 1.0;
        } else {
            double w = feasible_lower(cdfs.pooled, o.score, phi);
            double v = is_below_support(w)
                           ? 1.0
                           : (pos_total - cdfs.pos(w) + 0.5 * cdfs.pos.mass_at(w)) / pos_total;
            sum0 += v;
            sumsq0 += v * v;
            n0b += 1.0;
        }
    }
    double var1 = sumsq1 / n1 - (sum1 / n1) * (sum1 / n1);
    double var0 = sumsq0 / n0b - (sum0 / n0b) * (sum0 / n0b);
    double sigma_sq = var1 / p + var0 / (1.0 - p);
    return sigma_sq / n;
}

std::vector<AucRow> auc_vs_phi(const Cohort& cohort, const std::vector<double>& phis) {
    CdfSet cdfs = ecdf_set(cohort);
    std::vector<AucRow> rows;
    rows.reserve(phis.size());
    for (double phi : phis) {
        AucRow row;
        row.phi = phi;
        row.auc = auc(cdfs, phi);
        row.variance_plugin = auc_variance_plugin(cohort, phi);
        rows.push_back(row);
    }
    return rows;
}

std::vector<AucDifferenceRow> auc_difference_vs_phi(const std::vector<double>& score_first,
                                                    const std::vector<double>& score_second,
                                                    const std::vector<int>& statuses,
                                                    const std::vector<double>& phis,
                                                    int replicates, std::uint64_t seed) {
    const std::size_t n = statuses.size();
    if (score_first.size() != n || score_second.size() != n)
        throw DataError("score columns and statuses disagree in length");
    if (replicates < 2) throw ConfigError("at least 2 bootstrap replicates required");

    auto cohort_from = [&](const std::vector<double>& scores,
                           const std::vector<std::size_t>& idx) {
        Cohort c;
        c.observations.reserve(idx.size());
        for (std::size_t i : idx) c.observations.push_back({scores[i], statuses[i], {}, {}});
        return c;
    };
    std::vector<std::size_t> full(n);
    for (std::size_t i = 0; i < n; ++i) full[i] = i;

    std::vector<AucDifferenceRow> rows;
    rows.reserve(phis.size());
    for (std::size_t k = 0; k < phis.size(); ++k) {
        AucDifferenceRow row;
        row.phi = phis[k];
        row.auc_first = auc(cohort_from(score_first, full), phis[k]);
        row.auc_second = auc(cohort_from(score_second, full), phis[k]);
        row.difference = row.auc_second - row.auc_first;
        rows.push_back(row);
    }

    // paired bootstrap: one index resample drives both scorings
    std::vector<std::vector<double>> diffs(phis.size());
    for (int b = 0; b < replicates; ++b) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(b));
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
        int s0 = 0, s1 = 0;
        for (std::size_t i : idx) (statuses[i] ? s1 : s0) += 1;
        if (s0 == 0 || s1 == 0) continue;
        Cohort c1 = cohort_from(score_first, idx);
        Cohort c2 = cohort_from(score_second, idx);
        for (std::size_t k = 0; k < phis.size(); ++k)
            diffs[k].push_back(auc(c2, phis[k]) - auc(c1, phis[k]));
    }
    for (std::size_t k = 0; k < phis.size(); ++k) {
        auto& d = diffs[k];
        if (d.size() < 2) throw NumericalError("too many degenerate bootstrap resamples");
        std::sort(d.begin(), d.end());
        auto quantile = [&](double q) {
            double pos = q * (static_cast<double>(d.size()) - 1.0);
            std::size_t lo = static_cast<std::size_t>(pos);
            double frac = pos - static_cast<double>(lo);
            return lo + 1 < d.size() ? d[lo] * (1.0 - frac) + d[lo + 1] * frac : d[lo];
        };
        rows[k].ci_lo = quantile(0.025);
        rows[k].ci_hi = quantile(0.975);
    }
    return rows;
}

}  // namespace triage
