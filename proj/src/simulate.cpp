#include "triage/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "triage/cohort.hpp"
#include "triage/decision_space.hpp"
#include "triage/errors.hpp"
#include "triage/gamma.hpp"
#include "triage/parallel.hpp"
#include "triage/rng.hpp"
#include "triage/tilt.hpp"

#include "json.hpp"

namespace triage {

namespace {

struct MeanSd {
    double mean = 0.0, sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = xs.size() > 1 ? std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0)) : 0.0;
    return out;
}

double test_half_tmr(const TripartiteRule& rule, const Cohort& test) {
    double errors = 0.0;
    for (const auto& o : test.observations) {
        Diagnosis d = apply_rule(rule, o.score, o.status);
        if (d.decision == Decision::negative && o.status == 1) errors += 1.0;
        if (d.decision == Decision::positive && o.status == 0) errors += 1.0;
    }
    return errors / static_cast<double>(test.size());
}

// CD4-scale cutoffs of a score-scale rule; the test interval (l, u] on the
// score maps to [ -u, -l ) on CD4.
double cd4_lower_of(const TripartiteRule& rule) {
    return is_below_support(rule.upper) ? std::numeric_limits<double>::infinity() : -rule.upper;
}
double cd4_upper_of(const TripartiteRule& rule) {
    return is_below_support(rule.lower) ? std::numeric_limits<double>::infinity() : -rule.lower;
}

}  // namespace

GammaScenario named_scenario(const std::string& name, double prevalence) {
    GammaScenario s;
    s.name = name;
    s.prevalence = prevalence;
    if (name == "A-1") {
        s.shape0 = 3.2;
        s.scale0 = 152.0;
        s.shape1 = 2.3;
        s.scale1 = 133.0;
    } else if (name == "A-2") {
        s.shape0 = 4.8;
        s.scale0 = 100.0;
        s.shape1 = 2.3;
        s.scale1 = 133.0;
    } else if (name == "B-1") {
        s.shape0 = 2.8;
        s.scale0 = 173.0;
        s.shape1 = 2.8;
        s.scale1 = 111.0;
    } else if (name == "B-2") {
        s.shape0 = 2.8;
        s.scale0 = 350.0;
        s.shape1 = 2.8;
        s.scale1 = 111.0;
    } else {
        throw ConfigError("unknown scenario: " + name + " (expected A-1, A-2, B-1 or B-2)");
    }
    return s;
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario config is not valid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    double p = doc.value("p", 0.25);
    if (doc.contains("name") && doc["name"].is_string()) {
        std::string name = doc["name"].get<std::string>();
        try {
            cfg.scenario = named_scenario(name, p);
        } catch (const ConfigError&) {
            cfg.scenario.name = name;  // custom scenario, parameters must follow
            cfg.scenario.prevalence = p;
        }
    } else {
        cfg.scenario.name = "custom";
        cfg.scenario.prevalence = p;
    }
    auto number = [&](const char* primary, const char* alias, double fallback) {
        if (doc.contains(primary)) return doc[primary].get<double>();
        if (doc.contains(alias)) return doc[alias].get<double>();
        return fallback;
    };
    cfg.scenario.shape0 = number("eta0", "shape0", cfg.scenario.shape0);
    cfg.scenario.scale0 = number("kappa0", "scale0", cfg.scenario.scale0);
    cfg.scenario.shape1 = number("eta1", "shape1", cfg.scenario.shape1);
    cfg.scenario.scale1 = number("kappa1", "scale1", cfg.scenario.scale1);
    if (!(cfg.scenario.shape0 > 0.0) || !(cfg.scenario.scale0 > 0.0) ||
        !(cfg.scenario.shape1 > 0.0) || !(cfg.scenario.scale1 > 0.0))
        throw ConfigError("scenario gamma parameters must be positive");
    if (!(cfg.scenario.prevalence > 0.0) || !(cfg.scenario.prevalence < 1.0))
        throw ConfigError("scenario prevalence must lie strictly between 0 and 1");
    if (doc.contains("phi")) cfg.phi = doc["phi"].get<double>();
    if (doc.contains("n")) cfg.n = doc["n"].get<long long>();
    if (doc.contains("replicates")) cfg.replicates = doc["replicates"].get<int>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<long long>();
    return cfg;
}

Cohort sample_scenario(const GammaScenario& scenario, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample size must be positive");
    Cohort cohort;
    cohort.observations.reserve(n);
    auto rng = make_stream(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Observation o;
        o.status = bernoulli(rng, scenario.prevalence) ? 1 : 0;
        double w = o.status == 1 ? gamma_sample(rng, scenario.shape1, scenario.scale1)
                                 : gamma_sample(rng, scenario.shape0, scenario.scale0);
        o.score = -std::ceil(w);
        cohort.observations.push_back(o);
    }
    return cohort;
}

CdfSet analytic_cdf_set(const GammaScenario& scenario, int grid_max) {
    if (grid_max < 1) throw ConfigError("grid_max must be positive");
    CdfSet set;
    set.prevalence = scenario.prevalence;
    const std::size_t m = static_cast<std::size_t>(grid_max) + 1;

    // score support -grid_max .. 0; P(score <= -k) = P(CD4 >= k) = 1 - F(k-1)
    std::vector<double> points(m), cum0(m), cum1(m), cumall(m);
    for (std::size_t i = 0; i < m; ++i) {
        int k = grid_max - static_cast<int>(i);
        points[i] = -static_cast<double>(k);
        double f0 = k >= 1 ? gamma_cdf(static_cast<double>(k - 1), scenario.shape0, scenario.scale0)
                           : 0.0;
        double f1 = k >= 1 ? gamma_cdf(static_cast<double>(k - 1), scenario.shape1, scenario.scale1)
                           : 0.0;
        cum0[i] = 1.0 - f0;
        cum1[i] = 1.0 - f1;
        cumall[i] = (1.0 - scenario.prevalence) * cum0[i] + scenario.prevalence * cum1[i];
    }
    set.neg = {points, cum0};
    set.pos = {points, cum1};
    set.pooled = {std::move(points), std::move(cumall)};
    return set;
}

TrueOptimum true_optimum(const GammaScenario& scenario, double phi,
                         const SelectionCriterion& criterion, int grid_max) {
    CdfSet cdfs = analytic_cdf_set(scenario, grid_max);
    DecisionSpace space = build_decision_space(cdfs, phi);
    auto [rule, report] = select_min_risk(space, cdfs, criterion);
    TrueOptimum opt;
    opt.rule = rule;
    opt.report = report;
    opt.cd4_lower = cd4_lower_of(rule);
    opt.cd4_upper = cd4_upper_of(rule);
    return opt;
}

std::vector<ScenarioCell> run_scenario_study(const std::vector<std::string>& scenarios,
                                             const std::vector<double>& p_values,
                                             const std::vector<double>& phi_values,
                                             const StudyConfig& config) {
    std::vector<GammaScenario> bases;
    bases.reserve(scenarios.size());
    for (const auto& name : scenarios) bases.push_back(named_scenario(name, 0.5));
    return run_scenario_study(bases, p_values, phi_values, config);
}

std::vector<ScenarioCell> run_scenario_study(const std::vector<GammaScenario>& scenarios,
                                             const std::vector<double>& p_values,
                                             const std::vector<double>& phi_values,
                                             const StudyConfig& config) {
    if (config.replicates < 2) throw ConfigError("at least 2 replicates required");
    if (config.n < 4) throw ConfigError("sample size too small to split");

    std::vector<ScenarioCell> cells;
    std::uint64_t cell_index = 0;
    for (const auto& base : scenarios) {
        for (double p : p_values) {
            GammaScenario scenario = base;
            scenario.prevalence = p;
            for (double phi : phi_values) {
                ScenarioCell cell;
                cell.scenario = scenario.name;
                cell.prevalence = p;
                cell.phi = phi;
                cell.replicates = config.replicates;
                TrueOptimum truth = true_optimum(scenario, phi, SelectionCriterion::min_tmr());
                cell.true_cd4_lower = truth.cd4_lower;
                cell.true_cd4_upper = truth.cd4_upper;
                cell.true_tmr = truth.report.tmr;

                const int R = config.replicates;
                std::vector<double> np_lo(R), np_up(R), np_tmr(R);
                std::vector<double> sp_lo(R), sp_up(R), sp_tmr(R);
                std::vector<double> sp_rlo(R), sp_rup(R);
                std::uint64_t base = config.seed + 0x10000ULL * cell_index;
                parallel_for(static_cast<std::size_t>(R), config.threads, [&](std::size_t r) {
                    Cohort full = sample_scenario(scenario, config.n, base + r);
                    Cohort train, test;
                    std::size_t half = config.n / 2;
                    train.observations.assign(full.observations.begin(),
                                              full.observations.begin() + half);
                    test.observations.assign(full.observations.begin() + half,
                                             full.observations.end());

                    CdfSet cdfs = ecdf_set(train);
                    DecisionSpace space = build_decision_space(cdfs, phi);
                    auto [np_rule, np_rep] = select_min_risk(space, cdfs,
                                                             SelectionCriterion::min_tmr());
                    (void)np_rep;
                    np_lo[r] = cd4_lower_of(np_rule);
                    np_up[r] = cd4_upper_of(np_rule);
                    np_tmr[r] = test_half_tmr(np_rule, test);

                    TiltModel tilt = fit_tilt(train);
                    TiltSelection sp = select_tilt_min_tmr(tilt, cdfs, phi);
                    // report the raw cutoffs on the CD4 scale with negative
                    // values clamped to zero
                    double lo_cd4 = std::max(0.0, -sp.raw_upper);
                    double up_cd4 = std::max(0.0, -sp.raw_lower);
                    sp_lo[r] = lo_cd4;
                    sp_up[r] = up_cd4;
                    sp_tmr[r] = test_half_tmr(sp.rule, test);

                    // one-sided refit: after clamping the lower CD4 cutoff to
                    // zero, push the upper CD4 cutoff with the freed budget
                    if (sp.raw_upper > 0.0) {
                        double refit_lower =
                            feasible_lower(cdfs.pooled, cdfs.support().back(), phi);
                        sp_rlo[r] = 0.0;
                        sp_rup[r] = is_below_support(refit_lower)
                                        ? std::numeric_limits<double>::infinity()
                                        : -refit_lower;
                    } else {
                        sp_rlo[r] = lo_cd4;
                        sp_rup[r] = up_cd4;
                    }
                });

                MeanSd ms;
                ms = mean_sd(np_lo);
                cell.np_lower_mean = ms.mean;
                cell.np_lower_sd = ms.sd;
                ms = mean_sd(np_up);
                cell.np_upper_mean = ms.mean;
                cell.np_upper_sd = ms.sd;
                cell.np_tmr_mean = mean_sd(np_tmr).mean;
                ms = mean_sd(sp_lo);
                cell.sp_lower_mean = ms.mean;
                cell.sp_lower_sd = ms.sd;
                ms = mean_sd(sp_up);
                cell.sp_upper_mean = ms.mean;
                cell.sp_upper_sd = ms.sd;
                cell.sp_tmr_mean = mean_sd(sp_tmr).mean;
                cell.sp_retight_lower_mean = mean_sd(sp_rlo).mean;
                cell.sp_retight_upper_mean = mean_sd(sp_rup).mean;
                cells.push_back(cell);
                ++cell_index;
            }
        }
    }
    return cells;
}

ConvergenceResult convergence_study(const GammaScenario& scenario, double phi,
                                    const std::vector<std::size_t>& sample_sizes, int replicates,
                                    std::uint64_t seed, unsigned threads) {
    if (sample_sizes.size() < 3) throw ConfigError("at least 3 sample sizes required");
    if (replicates < 50) throw ConfigError("at least 50 replicates required");

    ConvergenceResult result;
    result.sample_sizes = sample_sizes;
    for (std::size_t si = 0; si < sample_sizes.size(); ++si) {
        const std::size_t n = sample_sizes[si];
        const int R = replicates;
        std::vector<double> np_lo(R), np_up(R), sp_lo(R), sp_up(R);
        std::uint64_t base = seed + 0x100000ULL * si;
        parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
            Cohort train = sample_scenario(scenario, n, base + r);
            CdfSet cdfs = ecdf_set(train);
            DecisionSpace space = build_decision_space(cdfs, phi);
            auto [np_rule, np_rep] = select_min_risk(space, cdfs, SelectionCriterion::min_tmr());
            (void)np_rep;
            np_lo[r] = std::max(0.0, cd4_lower_of(np_rule));
            np_up[r] = std::max(0.0, cd4_upper_of(np_rule));
            TiltModel tilt = fit_tilt(train);
            TiltSelection sp = select_tilt_min_tmr(tilt, cdfs, phi);
            sp_lo[r] = std::max(0.0, -sp.raw_upper);
            sp_up[r] = std::max(0.0, -sp.raw_lower);
        });
        result.sigma_np_lower.push_back(mean_sd(np_lo).sd);
        result.sigma_np_upper.push_back(mean_sd(np_up).sd);
        result.sigma_sp_lower.push_back(mean_sd(sp_lo).sd);
        result.sigma_sp_upper.push_back(mean_sd(sp_up).sd);
        result.sigma_np.push_back(0.5 * (result.sigma_np_lower.back() + result.sigma_np_upper.back()));
        result.sigma_sp.push_back(0.5 * (result.sigma_sp_lower.back() + result.sigma_sp_upper.back()));
    }

    // least squares of log(sigma_n) on -log(n)
    auto fit_line = [&](const std::vector<double>& sigma, double& slope, double& intercept) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(sigma.size());
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            if (!(sigma[i] > 0.0)) throw NumericalError("nonpositive cutoff SD in regression");
            double x = -std::log(static_cast<double>(sample_sizes[i]));
            double y = std::log(sigma[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        intercept = (sy - slope * sx) / m;
    };
    fit_line(result.sigma_np, result.slope_np, result.intercept_np);
    fit_line(result.sigma_sp, result.slope_sp, result.intercept_sp);
    return result;
}

DesignLookup design_lookup(const ConvergenceResult& result, double target_sigma) {
    if (!(target_sigma > 0.0)) throw ConfigError("target sigma must be positive");
    auto invert = [&](double slope, double intercept) {
        if (!(slope > 0.0)) throw NumericalError("non-positive convergence slope");
        // log sigma = intercept + slope * (-log n)  =>  n = exp((intercept - log target)/slope)
        double n = std::exp((intercept - std::log(target_sigma)) / slope);
        double n_min = static_cast<double>(result.sample_sizes.front());
        return static_cast<std::size_t>(std::ceil(std::max(n, n_min)));
    };
    DesignLookup out;
    out.n_np = invert(result.slope_np, result.intercept_np);
    out.n_sp = invert(result.slope_sp, result.intercept_sp);
    return out;
}

}  // namespace triage
