// Command-line driver for budget-constrained tripartite triage rules:
// score construction, rule selection, ROC/AUC analysis, cross-validation,
// bootstrap, and the gamma-cohort simulation studies.  Every command is
// reproducible from its flags and seed; outputs land in --out as CSV/JSON
// with a provenance sidecar.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "triage/cohort.hpp"
#include "triage/csv.hpp"
#include "triage/decision_space.hpp"
#include "triage/empirical.hpp"
#include "triage/errors.hpp"
#include "triage/gamma.hpp"
#include "triage/logistic.hpp"
#include "triage/parallel.hpp"
#include "triage/resample.hpp"
#include "triage/rng.hpp"
#include "triage/roc.hpp"
#include "triage/rule_select.hpp"
#include "triage/simulate.hpp"
#include "triage/tilt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace triage;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Output {
    fs::path dir;
    json flags;
    std::string command;
    std::string format = "json";
    std::vector<std::string> files;

    void prepare() { fs::create_directories(dir); }

    fs::path path(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream out(path(name));
        if (!out) throw ConfigError("cannot write to " + (dir / name).string());
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
    }

    void finish(const std::string& summary) {
        json prov;
        prov["command"] = command;
        prov["flags"] = flags;
        prov["version"] = kVersion;
        prov["files"] = files;
        std::ofstream out(dir / "provenance.json");
        out << prov.dump(2) << '\n';
        std::cout << summary << '\n';
    }
};

std::string format_rule_summary(const TripartiteRule& rule, const RiskReport& rep) {
    std::ostringstream os;
    os.precision(6);
    os << "rule (";
    if (is_below_support(rule.lower))
        os << "-inf";
    else
        os << rule.lower;
    os << ", " << rule.upper << "]  fnr=" << rep.fnr << " fpr=" << rep.fpr << " tmr=" << rep.tmr
       << " tested=" << rep.test_fraction;
    return os.str();
}

json report_json(const TripartiteRule& rule, const RiskReport& rep, double phi) {
    json j;
    if (is_below_support(rule.lower))
        j["lower"] = nullptr;
    else
        j["lower"] = rule.lower;
    if (is_below_support(rule.upper))
        j["upper"] = nullptr;
    else
        j["upper"] = rule.upper;
    j["phi"] = phi;
    j["lambda"] = rep.lambda;
    j["fnr"] = rep.fnr;
    j["fpr"] = rep.fpr;
    j["tmr"] = rep.tmr;
    j["weighted_risk"] = rep.weighted_risk;
    j["test_fraction"] = rep.test_fraction;
    return j;
}

CsvSchema make_schema(const std::string& score_col, bool negate, double v_star, bool use_vl) {
    CsvSchema schema;
    schema.score_column = score_col;
    schema.negate_score = negate;
    if (use_vl) schema.v_star = v_star;
    return schema;
}

int run_score(Output& out, const std::string& input, const std::vector<std::string>& markers,
              int hl_groups, const CsvSchema& schema_base) {
    CsvSchema schema = schema_base;
    schema.marker_columns = markers;
    Cohort cohort = parse_cohort_file(input, schema);

    FeatureMatrix features;
    features.names = markers;
    features.n = cohort.size();
    for (const auto& o : cohort.observations)
        for (const auto& name : markers) features.values.push_back(o.markers.at(name));
    LogisticFit fit = fit_logistic(features, cohort.statuses());
    auto hl = hosmer_lemeshow(fit, features, cohort.statuses(), hl_groups);

    json jfit;
    jfit["intercept"] = fit.intercept;
    jfit["intercept_se"] = fit.intercept_se;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        jfit["coefficients"][markers[i]] = fit.coefficients[i];
        jfit["standard_errors"][markers[i]] = fit.standard_errors[i];
    }
    jfit["converged"] = fit.converged;
    jfit["iterations"] = fit.iterations;
    jfit["hosmer_lemeshow"] = {{"statistic", hl.statistic},
                               {"p_value", hl.p_value},
                               {"groups", hl.groups_used}};
    out.write_text("fit.json", jfit.dump(2));

    std::ostringstream scored;
    scored << "score,z\n";
    scored.precision(17);
    for (const auto& o : cohort.observations)
        scored << composite_score(o.markers, fit) << ',' << o.status << '\n';
    out.write_text("scored.csv", scored.str());

    std::ostringstream summary;
    summary.precision(4);
    summary << "fitted " << markers.size() << "-marker composite on n=" << cohort.size()
            << "; hosmer-lemeshow p=" << hl.p_value;
    out.finish(summary.str());
    return 0;
}

int run_select(Output& out, const Cohort& cohort, double phi, double lambda, bool has_lambda,
               const std::string& method) {
    CdfSet cdfs = ecdf_set(cohort);
    TripartiteRule rule;
    RiskReport rep;
    if (method == "semiparametric") {
        TiltModel tilt = fit_tilt(cohort);
        TiltSelection sel = select_tilt_min_tmr(tilt, cdfs, phi);
        rule = sel.rule;
        rep = sel.report;
        json extra = report_json(rule, rep, phi);
        extra["center"] = sel.center;
        extra["half_width"] = sel.half_width;
        extra["raw_lower"] = sel.raw_lower;
        extra["raw_upper"] = sel.raw_upper;
        extra["clamped"] = sel.clamped;
        out.write_text("rule.json", extra.dump(2));

        OverlayTable overlay = gof_overlay(tilt, cdfs, cdfs.support());
        std::ostringstream csv;
        csv << "s,g0_emp,g0_tilt,g1_emp,g1_tilt\n";
        csv.precision(12);
        for (const auto& row : overlay.rows)
            csv << row.score << ',' << row.neg_empirical << ',' << row.neg_tilt << ','
                << row.pos_empirical << ',' << row.pos_tilt << '\n';
        out.write_text("overlay.csv", csv.str());
    } else {
        DecisionSpace space = build_decision_space(cdfs, phi);
        SelectionCriterion crit =
            has_lambda ? SelectionCriterion::min_lambda(lambda) : SelectionCriterion::min_tmr();
        std::tie(rule, rep) = select_min_risk(space, cdfs, crit);
        out.write_text("rule.json", report_json(rule, rep, phi).dump(2));
    }
    if (out.format == "csv") {
        std::ostringstream csv;
        csv.precision(12);
        csv << "lower,upper,phi,lambda,fnr,fpr,tmr,weighted_risk,test_fraction\n";
        if (!is_below_support(rule.lower)) csv << rule.lower;
        csv << ',' << rule.upper << ',' << phi << ',' << rep.lambda << ',' << rep.fnr << ','
            << rep.fpr << ',' << rep.tmr << ',' << rep.weighted_risk << ',' << rep.test_fraction
            << '\n';
        out.write_text("rule.csv", csv.str());
    }
    out.finish(format_rule_summary(rule, rep));
    return 0;
}

int run_roc(Output& out, const Cohort& cohort, const std::vector<double>& phis,
            const std::string& method) {
    CdfSet emp = ecdf_set(cohort);
    std::ostringstream csv;
    csv << "phi,fpr,tpr\n";
    csv.precision(12);
    for (double phi : phis) {
        RocCurve curve;
        if (method == "semiparametric") {
            TiltModel tilt = fit_tilt(cohort);
            curve = roc_curve(tilt.cdfs, phi, RocSource::semiparametric);
        } else {
            curve = roc_curve(emp, phi);
        }
        for (const auto& p : curve.points) csv << phi << ',' << p.fpr << ',' << p.tpr << '\n';
    }
    out.write_text("roc.csv", csv.str());
    if (out.format == "json") {
        json rows = json::array();
        for (double phi : phis) {
            RocCurve curve = method == "semiparametric"
                                 ? roc_curve(fit_tilt(cohort).cdfs, phi, RocSource::semiparametric)
                                 : roc_curve(emp, phi);
            for (const auto& p : curve.points)
                rows.push_back({{"phi", phi}, {"fpr", p.fpr}, {"tpr", p.tpr}});
        }
        out.write_text("roc.json", json{{"rows", rows}}.dump(2));
    }
    std::ostringstream summary;
    summary << "wrote ROC curves for " << phis.size() << " budget value(s), n=" << cohort.size();
    out.finish(summary.str());
    return 0;
}

int run_auc(Output& out, const std::string& input, const CsvSchema& schema,
            const std::vector<double>& phis, int replicates, std::uint64_t seed,
            const std::string& score2, unsigned threads) {
    Cohort cohort = parse_cohort_file(input, schema);
    json jreport;
    json rows = json::array();
    std::ostringstream csv;
    csv.precision(12);

    if (!score2.empty()) {
        CsvSchema schema2 = schema;
        schema2.score_column = score2;
        Cohort cohort2 = parse_cohort_file(input, schema2);
        auto diff = auc_difference_vs_phi(cohort.scores(), cohort2.scores(), cohort.statuses(),
                                          phis, replicates > 0 ? replicates : 500, seed);
        csv << "phi,auc_first,auc_second,difference,ci_lo,ci_hi\n";
        for (const auto& r : diff) {
            csv << r.phi << ',' << r.auc_first << ',' << r.auc_second << ',' << r.difference << ','
                << r.ci_lo << ',' << r.ci_hi << '\n';
            rows.push_back({{"phi", r.phi},
                            {"auc_first", r.auc_first},
                            {"auc_second", r.auc_second},
                            {"difference", r.difference},
                            {"ci_lo", r.ci_lo},
                            {"ci_hi", r.ci_hi}});
        }
    } else {
        csv << "phi,auc,variance_plugin,ci_lo,ci_hi\n";
        for (double phi : phis) {
            double estimate = auc(cohort, phi);
            double variance = auc_variance_plugin(cohort, phi);
            json row = {{"phi", phi}, {"auc", estimate}, {"variance_plugin", variance}};
            double ci_lo = 0.0, ci_hi = 0.0;
            if (replicates > 0) {
                ResampleConfig cfg;
                cfg.replicates = replicates;
                cfg.seed = seed;
                cfg.threads = threads;
                Estimator est = [phi](const Cohort& c) {
                    return NamedStatistics{{"auc", auc(c, phi)}};
                };
                auto boot = bootstrap_se(cohort, est, cfg);
                ci_lo = boot.statistics.at("auc").ci_lo;
                ci_hi = boot.statistics.at("auc").ci_hi;
                row["ci_lo"] = ci_lo;
                row["ci_hi"] = ci_hi;
                row["bootstrap_se"] = boot.statistics.at("auc").se;
            }
            rows.push_back(row);
            csv << phi << ',' << estimate << ',' << variance << ',' << ci_lo << ',' << ci_hi
                << '\n';
        }
    }
    jreport["rows"] = rows;
    out.write_text("auc.json", jreport.dump(2));
    out.write_text("auc.csv", csv.str());
    std::ostringstream summary;
    summary << "wrote AUC for " << phis.size() << " budget value(s)";
    out.finish(summary.str());
    return 0;
}

int run_cv(Output& out, const Cohort& cohort, double phi, double lambda, bool has_lambda,
           int folds, std::uint64_t seed, unsigned threads, bool stratified) {
    ResampleConfig cfg;
    cfg.folds = folds;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.stratified = stratified;
    SelectionCriterion crit =
        has_lambda ? SelectionCriterion::min_lambda(lambda) : SelectionCriterion::min_tmr();
    CvReport rep = kfold_cv(cohort, crit, phi, cfg);
    json j;
    j["folds"] = rep.folds_used;
    j["fnr"] = rep.average.fnr;
    j["fpr"] = rep.average.fpr;
    j["tmr"] = rep.average.tmr;
    j["weighted_risk"] = rep.average.weighted_risk;
    j["test_fraction"] = rep.average.test_fraction;
    out.write_text("cv.json", j.dump(2));
    if (out.format == "csv") {
        std::ostringstream csv;
        csv.precision(12);
        csv << "folds,fnr,fpr,tmr,weighted_risk,test_fraction\n"
            << rep.folds_used << ',' << rep.average.fnr << ',' << rep.average.fpr << ','
            << rep.average.tmr << ',' << rep.average.weighted_risk << ','
            << rep.average.test_fraction << '\n';
        out.write_text("cv.csv", csv.str());
    }
    std::ostringstream summary;
    summary.precision(4);
    summary << folds << "-fold cv: fnr=" << rep.average.fnr << " fpr=" << rep.average.fpr
            << " tested=" << rep.average.test_fraction;
    out.finish(summary.str());
    return 0;
}

int run_bootstrap(Output& out, const Cohort& cohort, double phi, double lambda, bool has_lambda,
                  const std::string& statistic, int replicates, std::uint64_t seed,
                  unsigned threads) {
    SelectionCriterion crit =
        has_lambda ? SelectionCriterion::min_lambda(lambda) : SelectionCriterion::min_tmr();
    Estimator est;
    if (statistic == "rule") {
        est = [phi, crit](const Cohort& c) {
            CdfSet cdfs = ecdf_set(c);
            DecisionSpace space = build_decision_space(cdfs, phi);
            auto [rule, rep] = select_min_risk(space, cdfs, crit);
            NamedStatistics stats{{"upper", rule.upper},
                                  {"fnr", rep.fnr},
                                  {"fpr", rep.fpr},
                                  {"tmr", rep.tmr},
                                  {"weighted_risk", rep.weighted_risk},
                                  {"test_fraction", rep.test_fraction}};
            if (!is_below_support(rule.lower)) stats["lower"] = rule.lower;
            return stats;
        };
    } else if (statistic == "auc") {
        est = [phi](const Cohort& c) { return NamedStatistics{{"auc", auc(c, phi)}}; };
    } else {
        throw ConfigError("unknown statistic: " + statistic + " (expected rule or auc)");
    }
    ResampleConfig cfg;
    cfg.replicates = replicates;
    cfg.seed = seed;
    cfg.threads = threads;
    BootstrapResult res = bootstrap_se(cohort, est, cfg);
    out.write_text("bootstrap.json", bootstrap_to_json(res));
    if (out.format == "csv") {
        std::ostringstream csv;
        csv.precision(12);
        csv << "statistic,estimate,se,ci_lo,ci_hi\n";
        for (const auto& [name, s] : res.statistics)
            csv << name << ',' << s.estimate << ',' << s.se << ',' << s.ci_lo << ',' << s.ci_hi
                << '\n';
        out.write_text("bootstrap.csv", csv.str());
    }
    std::ostringstream summary;
    summary << "bootstrap of '" << statistic << "' with " << res.replicates_used
            << " usable replicates (" << res.failures << " failures)";
    out.finish(summary.str());
    return 0;
}

// Synthetic visit-level cohort with raw markers alongside the score, so the
// whole analysis pipeline can be exercised end to end without real data.
void emit_cohort(Output& out, const GammaScenario& scenario, std::size_t n, std::uint64_t seed) {
    Cohort cohort = sample_scenario(scenario, n, seed);
    auto rng = make_stream(seed, 0x636f686fULL);
    std::ostringstream csv;
    csv << "score,z,vl,cd4,cd4pct\n";
    csv.precision(10);
    for (const auto& o : cohort.observations) {
        double cd4 = -o.score;
        double vl = o.status ? 401.0 + std::floor(uniform01(rng) * 199599.0)
                             : std::floor(uniform01(rng) * 400.0);
        double cd4pct = std::max(0.5, cd4 / 16.0 + 3.0 * standard_normal(rng));
        csv << o.score << ',' << o.status << ',' << vl << ',' << cd4 << ',' << cd4pct << '\n';
    }
    out.write_text("cohort.csv", csv.str());
}

int run_simulate(Output& out, std::vector<std::string> scenarios,
                 const std::vector<GammaScenario>& custom, std::vector<double> ps,
                 std::vector<double> phis, int replicates, std::size_t n, std::uint64_t seed,
                 unsigned threads, bool densities, int emit_n) {
    if (scenarios.size() == 1 && scenarios[0] == "all") scenarios = {"A-1", "A-2", "B-1", "B-2"};
    if (emit_n > 0) {
        GammaScenario base = custom.empty() ? named_scenario(scenarios.front(), ps.front())
                                            : custom.front();
        base.prevalence = ps.front();
        emit_cohort(out, base, static_cast<std::size_t>(emit_n), seed);
        out.finish("wrote synthetic cohort of n=" + std::to_string(emit_n));
        return 0;
    }
    StudyConfig cfg;
    cfg.replicates = replicates;
    cfg.n = n;
    cfg.seed = seed;
    cfg.threads = threads;
    auto cells = custom.empty() ? run_scenario_study(scenarios, ps, phis, cfg)
                                : run_scenario_study(custom, ps, phis, cfg);

    std::ostringstream csv;
    csv << "scenario,p,phi,true_lower,true_upper,true_tmr,"
           "np_lower,np_lower_sd,np_upper,np_upper_sd,np_tmr,"
           "sp_lower,sp_lower_sd,sp_upper,sp_upper_sd,sp_tmr,"
           "sp_retight_lower,sp_retight_upper,replicates\n";
    csv.precision(10);
    for (const auto& c : cells) {
        csv << c.scenario << ',' << c.prevalence << ',' << c.phi << ',' << c.true_cd4_lower << ','
            << c.true_cd4_upper << ',' << c.true_tmr << ',' << c.np_lower_mean << ','
            << c.np_lower_sd << ',' << c.np_upper_mean << ',' << c.np_upper_sd << ','
            << c.np_tmr_mean << ',' << c.sp_lower_mean << ',' << c.sp_lower_sd << ','
            << c.sp_upper_mean << ',' << c.sp_upper_sd << ',' << c.sp_tmr_mean << ','
            << c.sp_retight_lower_mean << ',' << c.sp_retight_upper_mean << ',' << c.replicates
            << '\n';
    }
    out.write_text("study.csv", csv.str());
    if (out.format == "json") {
        json rows = json::array();
        for (const auto& c : cells)
            rows.push_back({{"scenario", c.scenario},
                            {"p", c.prevalence},
                            {"phi", c.phi},
                            {"true", {c.true_cd4_lower, c.true_cd4_upper, c.true_tmr}},
                            {"np_lower", {c.np_lower_mean, c.np_lower_sd}},
                            {"np_upper", {c.np_upper_mean, c.np_upper_sd}},
                            {"np_tmr", c.np_tmr_mean},
                            {"sp_lower", {c.sp_lower_mean, c.sp_lower_sd}},
                            {"sp_upper", {c.sp_upper_mean, c.sp_upper_sd}},
                            {"sp_tmr", c.sp_tmr_mean}});
        out.write_text("study.json", json{{"rows", rows}}.dump(2));
    }

    if (densities) {
        std::vector<GammaScenario> bases = custom;
        if (bases.empty())
            for (const auto& name : scenarios) bases.push_back(named_scenario(name, 0.5));
        std::ostringstream dens;
        dens << "scenario,cd4,density0,density1\n";
        dens.precision(10);
        for (const auto& s : bases)
            for (int cd4 = 1; cd4 <= 1500; cd4 += 5)
                dens << s.name << ',' << cd4 << ',' << gamma_pdf(cd4, s.shape0, s.scale0) << ','
                     << gamma_pdf(cd4, s.shape1, s.scale1) << '\n';
        out.write_text("densities.csv", dens.str());
    }

    std::ostringstream summary;
    summary << "simulated " << cells.size() << " cell(s) x " << replicates
            << " replicates of n=" << n;
    out.finish(summary.str());
    return 0;
}

int run_converge(Output& out, const std::string& scenario, double p, double phi,
                 std::vector<std::size_t> sizes, int replicates, std::uint64_t seed,
                 double target_sigma, unsigned threads) {
    GammaScenario s = named_scenario(scenario, p);
    ConvergenceResult res = convergence_study(s, phi, sizes, replicates, seed, threads);

    std::ostringstream csv;
    csv << "n,sigma_np,sigma_np_lower,sigma_np_upper,sigma_sp,sigma_sp_lower,sigma_sp_upper\n";
    csv.precision(10);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        csv << sizes[i] << ',' << res.sigma_np[i] << ',' << res.sigma_np_lower[i] << ','
            << res.sigma_np_upper[i] << ',' << res.sigma_sp[i] << ',' << res.sigma_sp_lower[i]
            << ',' << res.sigma_sp_upper[i] << '\n';
    out.write_text("convergence.csv", csv.str());

    DesignLookup lookup = design_lookup(res, target_sigma);
    json j;
    j["slope_np"] = res.slope_np;
    j["slope_sp"] = res.slope_sp;
    j["target_sigma"] = target_sigma;
    j["required_n_np"] = lookup.n_np;
    j["required_n_sp"] = lookup.n_sp;
    out.write_text("design.json", j.dump(2));

    std::ostringstream summary;
    summary.precision(3);
    summary << "convergence slopes: nonparametric " << res.slope_np << ", semiparametric "
            << res.slope_sp << "; n for sigma<=" << target_sigma << ": " << lookup.n_np << " / "
            << lookup.n_sp;
    out.finish(summary.str());
    return 0;
}

int run_sweep(Output& out, const Cohort& cohort, double phi, int grid_points, int folds,
              std::uint64_t seed, unsigned threads) {
    CdfSet cdfs = ecdf_set(cohort);
    DecisionSpace space = build_decision_space(cdfs, phi);
    std::ostringstream csv;
    csv << "lambda,lower,upper,fnr,fpr,cv_fnr,cv_fpr,cv_test_fraction\n";
    csv.precision(10);
    for (int i = 0; i < grid_points; ++i) {
        double lambda = grid_points == 1 ? 0.5 : double(i) / double(grid_points - 1);
        auto crit = SelectionCriterion::min_lambda(lambda);
        auto [rule, rep] = select_min_risk(space, cdfs, crit);
        ResampleConfig cfg;
        cfg.folds = folds;
        cfg.seed = seed;
        cfg.threads = threads;
        CvReport cv = kfold_cv(cohort, crit, phi, cfg);
        csv << lambda << ',';
        if (is_below_support(rule.lower))
            csv << "";
        else
            csv << rule.lower;
        csv << ',' << rule.upper << ',' << rep.fnr << ',' << rep.fpr << ',' << cv.average.fnr
            << ',' << cv.average.fpr << ',' << cv.average.test_fraction << '\n';
    }
    out.write_text("sweep.csv", csv.str());
    if (out.format == "json") {
        json rows = json::array();
        for (int i = 0; i < grid_points; ++i) {
            double lambda = grid_points == 1 ? 0.5 : double(i) / double(grid_points - 1);
            auto [rule, rep] = select_min_risk(space, cdfs, SelectionCriterion::min_lambda(lambda));
            json row = report_json(rule, rep, phi);
            rows.push_back(row);
        }
        out.write_text("sweep.json", json{{"rows", rows}}.dump(2));
    }
    std::ostringstream summary;
    summary << "swept " << grid_points << " lambda value(s) at phi=" << phi;
    out.finish(summary.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"budget-constrained tripartite triage toolkit"};
    app.require_subcommand(1);

    std::string input, outdir = "out", method = "nonparametric", score_col = "score";
    std::string scenario = "B-2", statistic = "rule", score2, config_path;
    std::string format = "json";
    std::vector<std::string> scenarios{"B-2"}, markers;
    std::vector<double> phis{0.15}, ps{0.25};
    double phi = 0.15, lambda = 0.5, v_star = 400.0, target_sigma = 25.0;
    bool negate = false, use_vl = false, stratified = false, densities = false;
    int folds = 10, replicates = 500, hl_groups = 10, grid_points = 21, n_obs = 5000;
    int emit_n = 0;
    std::vector<std::size_t> sizes{250, 500, 1000, 2000, 4000, 8000};
    std::uint64_t seed = 0;
    unsigned threads = default_thread_count();

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input) cmd->add_option("--input", input, "cohort CSV file")->required();
        cmd->add_option("--out", outdir, "output directory");
        cmd->add_option("--threads", threads, "worker thread cap");
        cmd->add_option("--seed", seed, "root seed");
        cmd->add_option("--score-column", score_col, "name of the score column");
        cmd->add_flag("--negate", negate, "negate the score column on input");
        cmd->add_flag("--use-vl", use_vl, "derive status from the vl column");
        cmd->add_option("--v-star", v_star, "viral-load threshold (copies/mL)");
        cmd->add_option("--format", format, "csv | json: extra rendition of the main report")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* c_score = app.add_subcommand("score", "fit a logistic composite score from markers");
    add_common(c_score, true);
    c_score->add_option("--markers", markers, "marker column names")->required();
    c_score->add_option("--hl-groups", hl_groups, "Hosmer-Lemeshow groups");

    auto* c_select = app.add_subcommand("select", "select the optimal tripartite rule");
    add_common(c_select, true);
    c_select->add_option("--phi", phi, "testing budget")->check(CLI::Range(0.0, 1.0));
    auto* lambda_opt =
        c_select->add_option("--lambda", lambda, "false-negative weight")->check(CLI::Range(0.0, 1.0));
    c_select->add_option("--method", method, "nonparametric | semiparametric")
        ->check(CLI::IsMember({"nonparametric", "semiparametric"}));

    auto* c_roc = app.add_subcommand("roc", "tripartite ROC curves");
    add_common(c_roc, true);
    c_roc->add_option("--phi", phis, "testing budget(s)");
    c_roc->add_option("--method", method, "nonparametric | semiparametric")
        ->check(CLI::IsMember({"nonparametric", "semiparametric"}));

    auto* c_auc = app.add_subcommand("auc", "AUC versus testing budget");
    add_common(c_auc, true);
    c_auc->add_option("--phi", phis, "testing budget(s)");
    c_auc->add_option("--replicates", replicates, "bootstrap replicates for the CI (0 = none)");
    c_auc->add_option("--score2", score2, "second score column for a paired AUC difference");

    auto* c_cv = app.add_subcommand("cv", "cross-validated error rates of the selected rule");
    add_common(c_cv, true);
    c_cv->add_option("--phi", phi, "testing budget");
    auto* cv_lambda = c_cv->add_option("--lambda", lambda, "false-negative weight");
    c_cv->add_option("--folds", folds, "number of folds");
    c_cv->add_flag("--stratified", stratified, "stratify folds and resamples by status");

    auto* c_boot = app.add_subcommand("bootstrap", "bootstrap standard errors");
    add_common(c_boot, true);
    c_boot->add_option("--phi", phi, "testing budget");
    auto* boot_lambda = c_boot->add_option("--lambda", lambda, "false-negative weight");
    c_boot->add_option("--statistic", statistic, "rule | auc");
    c_boot->add_option("--replicates", replicates, "bootstrap replicates");

    auto* c_sim = app.add_subcommand("simulate", "gamma-cohort simulation study");
    add_common(c_sim, false);
    auto* sim_scenario = c_sim->add_option("--scenario", scenarios, "A-1 A-2 B-1 B-2 or all");
    auto* sim_p = c_sim->add_option("--p", ps, "prevalence value(s)");
    auto* sim_phi = c_sim->add_option("--phi", phis, "testing budget(s)");
    auto* sim_reps = c_sim->add_option("--replicates", replicates, "replicates per cell");
    auto* sim_n = c_sim->add_option("--n", n_obs, "observations per replicate (half train, half test)");
    c_sim->add_flag("--densities", densities, "also write the scenario density curves");
    c_sim->add_option("--emit-cohort", emit_n,
                      "write a synthetic cohort CSV of this size instead of running the study");
    c_sim->add_option("--config", config_path,
                      "scenario JSON ({name, eta0, kappa0, eta1, kappa1, p, phi, n, replicates, seed})");

    auto* c_conv = app.add_subcommand("converge", "convergence-rate study and design lookup");
    add_common(c_conv, false);
    c_conv->add_option("--scenario", scenario, "scenario name");
    c_conv->add_option("--p", ps, "prevalence");
    c_conv->add_option("--phi", phi, "testing budget");
    c_conv->add_option("--sizes", sizes, "training sample sizes");
    c_conv->add_option("--replicates", replicates, "replicates per size");
    c_conv->add_option("--target-sigma", target_sigma, "cutoff SD target for the design lookup");

    auto* c_sweep = app.add_subcommand("sweep", "selected rules and CV errors over a lambda grid");
    add_common(c_sweep, true);
    c_sweep->add_option("--phi", phi, "testing budget");
    c_sweep->add_option("--grid", grid_points, "number of lambda grid points");
    c_sweep->add_option("--folds", folds, "cross-validation folds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << '\n';
        json err = {{"error", {{"type", "config"}, {"message", e.what()}}}};
        std::cout << err.dump() << '\n';
        return 2;
    }

    Output out;
    out.dir = outdir;
    out.format = format;
    out.flags = {{"input", input},
                 {"out", outdir},
                 {"phi", phi},
                 {"lambda", lambda},
                 {"method", method},
                 {"seed", seed},
                 {"folds", folds},
                 {"replicates", replicates},
                 {"threads", threads}};

    try {
        out.prepare();
        CsvSchema schema = make_schema(score_col, negate, v_star, use_vl);
        if (app.got_subcommand(c_score)) {
            out.command = "score";
            return run_score(out, input, markers, hl_groups, schema);
        }
        if (app.got_subcommand(c_select)) {
            out.command = "select";
            return run_select(out, parse_cohort_file(input, schema), phi, lambda,
                              lambda_opt->count() > 0, method);
        }
        if (app.got_subcommand(c_roc)) {
            out.command = "roc";
            out.flags["phi"] = phis;
            return run_roc(out, parse_cohort_file(input, schema), phis, method);
        }
        if (app.got_subcommand(c_auc)) {
            out.command = "auc";
            out.flags["phi"] = phis;
            return run_auc(out, input, schema, phis, replicates, seed, score2, threads);
        }
        if (app.got_subcommand(c_cv)) {
            out.command = "cv";
            return run_cv(out, parse_cohort_file(input, schema), phi, lambda,
                          cv_lambda->count() > 0, folds, seed, threads, stratified);
        }
        if (app.got_subcommand(c_boot)) {
            out.command = "bootstrap";
            return run_bootstrap(out, parse_cohort_file(input, schema), phi, lambda,
                                 boot_lambda->count() > 0, statistic, replicates, seed, threads);
        }
        if (app.got_subcommand(c_sim)) {
            out.command = "simulate";
            std::vector<GammaScenario> custom;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw ConfigError("cannot open scenario config: " + config_path);
                std::stringstream buffer;
                buffer << in.rdbuf();
                ScenarioConfig cfg = parse_scenario_config(buffer.str());
                custom.push_back(cfg.scenario);
                if (sim_p->count() == 0) ps = {cfg.scenario.prevalence};
                if (sim_phi->count() == 0 && cfg.phi >= 0.0) phis = {cfg.phi};
                if (sim_n->count() == 0 && cfg.n > 0) n_obs = static_cast<int>(cfg.n);
                if (sim_reps->count() == 0 && cfg.replicates > 0) replicates = cfg.replicates;
                if (cfg.seed >= 0) seed = static_cast<std::uint64_t>(cfg.seed);
                (void)sim_scenario;
            }
            out.flags["scenario"] = scenarios;
            out.flags["p"] = ps;
            out.flags["phi"] = phis;
            out.flags["n"] = n_obs;
            return run_simulate(out, scenarios, custom, ps, phis, replicates,
                                static_cast<std::size_t>(n_obs), seed, threads, densities,
                                emit_n);
        }
        if (app.got_subcommand(c_conv)) {
            out.command = "converge";
            out.flags["scenario"] = scenario;
            out.flags["p"] = ps;
            out.flags["sizes"] = sizes;
            out.flags["target_sigma"] = target_sigma;
            return run_converge(out, scenario, ps.front(), phi, sizes, replicates, seed,
                                target_sigma, threads);
        }
        if (app.got_subcommand(c_sweep)) {
            out.command = "sweep";
            out.flags["grid"] = grid_points;
            return run_sweep(out, parse_cohort_file(input, schema), phi, grid_points, folds, seed,
                             threads);
        }
        throw ConfigError("no command given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        std::cout << json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        std::cout << json{{"error", {{"type", "data"}, {"message", e.what()}}}}.dump() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        std::cout << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump() << '\n';
        return 4;
    }
}
