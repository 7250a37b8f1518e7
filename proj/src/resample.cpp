#include "triage/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "triage/cohort.hpp"
#include "triage/errors.hpp"
#include "triage/parallel.hpp"
#include "triage/rng.hpp"

namespace triage {

namespace {

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

Cohort resample_cohort(const Cohort& cohort, std::mt19937_64& rng, bool stratified) {
    Cohort out;
    const std::size_t n = cohort.size();
    out.observations.reserve(n);
    if (!stratified) {
        for (std::size_t i = 0; i < n; ++i)
            out.observations.push_back(cohort.observations[draw_index(rng, n)]);
        return out;
    }
    std::vector<std::size_t> idx0, idx1;
    for (std::size_t i = 0; i < n; ++i)
        (cohort.observations[i].status == 1 ? idx1 : idx0).push_back(i);
    for (std::size_t i = 0; i < idx0.size(); ++i)
        out.observations.push_back(cohort.observations[idx0[draw_index(rng, idx0.size())]]);
    for (std::size_t i = 0; i < idx1.size(); ++i)
        out.observations.push_back(cohort.observations[idx1[draw_index(rng, idx1.size())]]);
    return out;
}

double percentile(std::vector<double> sorted, double q) {
    double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    return lo + 1 < sorted.size() ? sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac : sorted[lo];
}

}  // namespace

BootstrapResult bootstrap_se(const Cohort& cohort, const Estimator& estimator,
                             const ResampleConfig& config) {
    if (config.replicates < 2) throw ConfigError("bootstrap requires at least 2 replicates");
    if (cohort.size() == 0) throw DataError("empty cohort");

    NamedStatistics point = estimator(cohort);

    std::vector<NamedStatistics> replicate_values(config.replicates);
    std::vector<char> ok(config.replicates, 0);
    parallel_for(static_cast<std::size_t>(config.replicates), config.threads, [&](std::size_t b) {
        auto rng = make_stream(config.seed, b);
        Cohort resampled = resample_cohort(cohort, rng, config.stratified);
        try {
            replicate_values[b] = estimator(resampled);
            ok[b] = 1;
        } catch (const std::exception&) {
            ok[b] = 0;
        }
    });

    BootstrapResult result;
    for (char o : ok) o ? ++result.replicates_used : ++result.failures;
    if (result.failures * 2 > config.replicates)
        throw NumericalError("estimator failed on more than half of the bootstrap replicates");

    for (const auto& [name, value] : point) {
        std::vector<double> vals;
        vals.reserve(result.replicates_used);
        for (int b = 0; b < config.replicates; ++b)
            if (ok[b]) vals.push_back(replicate_values[b].at(name));
        double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        BootstrapSummary s;
        s.estimate = value;
        s.se = vals.size() > 1 ? std::sqrt(ss / (vals.size() - 1.0)) : 0.0;
        std::sort(vals.begin(), vals.end());
        s.ci_lo = percentile(vals, 0.025);
        s.ci_hi = percentile(vals, 0.975);
        result.statistics[name] = s;
    }
    return result;
}

CvReport kfold_cv(const Cohort& cohort, const SelectionCriterion& criterion, double phi,
                  const ResampleConfig& config) {
    const std::size_t n = cohort.size();
    const int k = config.folds;
    if (k < 2) throw ConfigError("cross-validation requires at least 2 folds");
    if (static_cast<std::size_t>(k) > n) throw DataError("more folds than observations");

    // fold of observation i depends only on the seed-derived permutation;
    // with stratification the statuses are permuted and dealt separately
    auto rng = make_stream(config.seed, 0x666f6c64ULL);  // dedicated fold stream
    std::vector<int> fold_of(n);
    auto deal = [&](std::vector<std::size_t> idx, std::size_t offset) {
        for (std::size_t i = idx.size(); i-- > 1;) {
            std::size_t j = draw_index(rng, i + 1);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t r = 0; r < idx.size(); ++r)
            fold_of[idx[r]] = static_cast<int>((r + offset) % static_cast<std::size_t>(k));
    };
    if (config.stratified) {
        std::vector<std::size_t> idx0, idx1;
        for (std::size_t i = 0; i < n; ++i)
            (cohort.observations[i].status == 1 ? idx1 : idx0).push_back(i);
        std::size_t rotate = idx0.size() % static_cast<std::size_t>(k);
        deal(std::move(idx0), 0);
        deal(std::move(idx1), rotate);  // remainder folds rotate across strata
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        deal(std::move(all), 0);
    }

    const double lambda =
        criterion.kind == SelectionCriterion::Kind::min_lambda ? criterion.lambda : 0.5;
    const double p_full =
        static_cast<double>(cohort.count_status(1)) / static_cast<double>(n);

    std::vector<RiskReport> fold_reports(k);
    std::vector<char> fold_ok(k, 0);
    parallel_for(static_cast<std::size_t>(k), config.threads, [&](std::size_t f) {
        Cohort train;
        std::vector<const Observation*> heldout;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == static_cast<int>(f))
                heldout.push_back(&cohort.observations[i]);
            else
                train.observations.push_back(cohort.observations[i]);
        }
        if (!train.has_both_statuses())
            throw DataError("training fold lost one of its statuses; use stratified folds or fewer folds");
        CdfSet cdfs = ecdf_set(train);
        DecisionSpace space = build_decision_space(cdfs, phi);
        auto [rule, rep] = select_min_risk(space, cdfs, criterion);
        (void)rep;

        double fn = 0.0, n1 = 0.0, fp = 0.0, n0 = 0.0, tested = 0.0;
        for (const Observation* o : heldout) {
            Diagnosis d = apply_rule(rule, o->score, o->status);
            if (d.decision == Decision::order_gold_standard_test) tested += 1.0;
            if (o->status == 1) {
                n1 += 1.0;
                if (d.decision == Decision::negative) fn += 1.0;
            } else {
                n0 += 1.0;
                if (d.decision == Decision::positive) fp += 1.0;
            }
        }
        RiskReport r;
        r.lambda = lambda;
        r.fnr = n1 > 0.0 ? fn / n1 : std::numeric_limits<double>::quiet_NaN();
        r.fpr = n0 > 0.0 ? fp / n0 : std::numeric_limits<double>::quiet_NaN();
        r.test_fraction = tested / static_cast<double>(heldout.size());
        fold_reports[f] = r;
        fold_ok[f] = 1;
    });

    CvReport report;
    double fnr_sum = 0.0, fpr_sum = 0.0, test_sum = 0.0;
    int fnr_n = 0, fpr_n = 0;
    for (int f = 0; f < k; ++f) {
        if (!fold_ok[f]) continue;
        report.per_fold.push_back(fold_reports[f]);
        ++report.folds_used;
        test_sum += fold_reports[f].test_fraction;
        if (!std::isnan(fold_reports[f].fnr)) {
            fnr_sum += fold_reports[f].fnr;
            ++fnr_n;
        }
        if (!std::isnan(fold_reports[f].fpr)) {
            fpr_sum += fold_reports[f].fpr;
            ++fpr_n;
        }
    }
    if (report.folds_used == 0) throw DataError("no usable folds");
    RiskReport avg;
    avg.lambda = lambda;
    avg.fnr = fnr_n > 0 ? fnr_sum / fnr_n : 0.0;
    avg.fpr = fpr_n > 0 ? fpr_sum / fpr_n : 0.0;
    avg.fn_component = p_full * avg.fnr;
    avg.fp_component = (1.0 - p_full) * avg.fpr;
    avg.tmr = avg.fn_component + avg.fp_component;
    avg.weighted_risk = lambda * avg.fn_component + (1.0 - lambda) * avg.fp_component;
    avg.test_fraction = test_sum / report.folds_used;
    report.average = avg;
    return report;
}

std::string bootstrap_to_json(const BootstrapResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"statistics\": {";
    bool first = true;
    for (const auto& [name, s] : result.statistics) {
        if (!first) os << ", ";
        first = false;
        os << "\"" << name << "\": {\"estimate\": " << s.estimate << ", \"se\": " << s.se
           << ", \"ci\": [" << s.ci_lo << ", " << s.ci_hi << "]}";
    }
    os << "}, \"replicates_used\": " << result.replicates_used
       << ", \"failures\": " << result.failures << "}";
    return os.str();
}

}  // namespace triage
