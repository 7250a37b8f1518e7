#include "triage/decision_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "triage/cohort.hpp"
#include "triage/errors.hpp"

namespace triage {

Diagnosis apply_rule(const TripartiteRule& rule, double score, std::optional<int> status) {
    if (!std::isfinite(score)) throw DataError("apply_rule: score must be finite");
    Diagnosis d;
    if (score <= rule.lower) {
        d.decision = Decision::negative;
    } else if (score <= rule.upper) {
        d.decision = Decision::order_gold_standard_test;
        d.resolved = status;
    } else {
        d.decision = Decision::positive;
    }
    return d;
}

DecisionSpace build_decision_space(const CdfSet& cdfs, double phi) {
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");
    const auto& support = cdfs.support();
    const auto& cum = cdfs.pooled.cum;
    if (support.empty()) throw DataError("empty support");

    DecisionSpace space;
    space.phi = phi;
    const std::size_t m = support.size();

    // lower candidates in ascending order: sentinel (cdf 0), then support
    std::size_t upper_idx = 0;
    bool have_prev_upper = false;
    std::size_t prev_upper = 0;
    for (std::size_t cand = 0; cand <= m; ++cand) {
        const bool sentinel = cand == 0;
        const double lower_cdf = sentinel ? 0.0 : cum[cand - 1];
        const std::size_t lower_pos = sentinel ? 0 : cand - 1;

        // largest upper with budget_ok; nondecreasing in the lower, so the
        // scan never moves backwards
        if (upper_idx < lower_pos) upper_idx = lower_pos;
        while (upper_idx + 1 < m && budget_ok(cum[upper_idx + 1], lower_cdf, phi)) ++upper_idx;
        if (!budget_ok(cum[upper_idx], lower_cdf, phi)) {
            if (sentinel) continue;  // no feasible upper for the sentinel lower
            upper_idx = lower_pos;   // (l, l] is always feasible
        }
        if (have_prev_upper && upper_idx <= prev_upper) continue;  // duplicate upper
        prev_upper = upper_idx;
        have_prev_upper = true;
        space.rules.push_back({sentinel ? kBelowSupport : support[lower_pos], support[upper_idx]});
    }
    return space;
}

DecisionSpace brute_force_space(const Cohort& cohort, double phi) {
    if (cohort.size() == 0) throw DataError("empty cohort");
    if (cohort.size() > 1000) throw ConfigError("brute_force_space is limited to n <= 1000");
    if (phi < 0.0 || phi > 1.0) throw ConfigError("phi must lie in [0, 1]");

    // pooled CDF by direct counting, independent of StepCdf
    std::vector<double> support = cohort.scores();
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    const double n = static_cast<double>(cohort.size());
    auto pooled_cdf = [&](double s) {
        std::size_t count = 0;
        for (const auto& o : cohort.observations)
            if (o.score <= s) ++count;
        return static_cast<double>(count) / n;
    };
    std::vector<double> cum(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) cum[i] = pooled_cdf(support[i]);

    // candidate lowers: sentinel + support; uppers: support
    struct Candidate {
        double lower, upper;
        double lo_cdf, up_cdf;
    };
    std::vector<Candidate> feasible;
    for (std::size_t li = 0; li <= support.size(); ++li) {
        const bool sentinel = li == 0;
        const double lo = sentinel ? kBelowSupport : support[li - 1];
        const double lo_cdf = sentinel ? 0.0 : cum[li - 1];
        for (std::size_t ui = sentinel ? 0 : li - 1; ui < support.size(); ++ui) {
            if (budget_ok(cum[ui], lo_cdf, phi))
                feasible.push_back({lo, support[ui], lo_cdf, cum[ui]});
        }
    }

    DecisionSpace space;
    space.phi = phi;
    for (const auto& c : feasible) {
        bool dominated = false;
        for (const auto& other : feasible) {
            // strict interval containment (c.lower, c.upper] < (other.lower, other.upper]
            if (other.lower <= c.lower && other.upper >= c.upper &&
                (other.lower < c.lower || other.upper > c.upper)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) space.rules.push_back({c.lower, c.upper});
    }
    std::sort(space.rules.begin(), space.rules.end(),
              [](const TripartiteRule& a, const TripartiteRule& b) { return a.upper < b.upper; });
    return space;
}

std::string rule_to_json(const TripartiteRule& rule, double phi) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"lower\": ";
    if (is_below_support(rule.lower))
        os << "null";
    else
        os << rule.lower;
    os << ", \"upper\": ";
    if (is_below_support(rule.upper))
        os << "null";
    else
        os << rule.upper;
    os << ", \"phi\": " << phi << "}";
    return os.str();
}

}  // namespace triage
