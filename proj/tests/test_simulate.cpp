#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "triage/errors.hpp"
#include "triage/gamma.hpp"
#include "triage/rng.hpp"
#include "triage/simulate.hpp"

using namespace triage;

namespace {

// 40-digit reference values for the regularized lower incomplete gamma
struct GammaProbe {
    double a, x, p;
};
constexpr GammaProbe kGammaProbes[] = {
    {0.5, 0.25, 0.5204998778130465376827},
    {0.5, 3.0, 0.9856941215645703604742},
    {1.0, 1.0, 0.6321205588285576784045},
    {2.3, 0.5, 0.05374347648107447687842},
    {2.3, 2.3, 0.5876856160829221842844},
    {2.8, 0.1, 0.0003137099906662360738632},
    {2.8, 2.0, 0.3716162974497550188842},
    {2.8, 5.6, 0.9330534082596747739326},
    {3.2, 1.0, 0.06129674183870603265429},
    {3.2, 9.0, 0.9918231128282247156423},
    {4.8, 1.3, 0.01430172266976673013928},
    {4.8, 4.8, 0.5607339592914014722509},
    {4.8, 20.0, 0.9999876201065497685889},
    {10.0, 2.0, 0.00004649807501726380825135},
    {10.0, 12.0, 0.7576078383294876513181},
    {25.0, 30.0, 0.842757972761608396456},
    {100.0, 90.0, 0.158220989186430168105},
    {150.0, 180.0, 0.9900898814275666158583},
    {0.1, 0.05, 0.7755386354510305695925},
    {7.5, 40.0, 0.9999999999301534458334},
};

}  // namespace

TEST_CASE("incomplete gamma matches high-precision references") {
    for (const auto& probe : kGammaProbes) {
        double p = reg_gamma_p(probe.a, probe.x);
        CHECK(std::fabs(p - probe.p) / probe.p <= 1e-9);
        CHECK(reg_gamma_q(probe.a, probe.x) == doctest::Approx(1.0 - probe.p).epsilon(1e-9));
    }
    CHECK(reg_gamma_p(2.0, 0.0) == 0.0);
    CHECK(reg_gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("sampling is deterministic in the seed") {
    GammaScenario s = named_scenario("B-2", 0.25);
    Cohort a = sample_scenario(s, 500, 31);
    Cohort b = sample_scenario(s, 500, 31);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.observations[i].score == b.observations[i].score);
        CHECK(a.observations[i].status == b.observations[i].status);
    }
    Cohort c = sample_scenario(s, 500, 32);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.observations[i].score != c.observations[i].score) identical = false;
    CHECK(!identical);
}

TEST_CASE("sampled moments match the scenario") {
    GammaScenario s = named_scenario("B-2", 0.25);
    Cohort cohort = sample_scenario(s, 100000, 7);
    double sum0 = 0.0, n0 = 0.0, pos = 0.0;
    for (const auto& o : cohort.observations) {
        if (o.status == 0) {
            sum0 += -o.score;
            n0 += 1.0;
        } else {
            pos += 1.0;
        }
    }
    // ceiling shifts the gamma mean by about one half
    CHECK(sum0 / n0 == doctest::Approx(2.8 * 350.0 + 0.5).epsilon(3.0 / 980.5));
    CHECK(pos / 100000.0 == doctest::Approx(0.25).epsilon(0.005 / 0.25));
}

TEST_CASE("sampler agrees with the analytic CDF") {
    // chi-square goodness of fit of sampled CD4 against the analytic bins
    GammaScenario s = named_scenario("B-1", 0.3);
    std::size_t n = 100000;
    Cohort cohort = sample_scenario(s, n, 12345);
    CdfSet analytic = analytic_cdf_set(s, 5000);

    std::vector<double> edges;  // score-scale bin edges
    for (int cd4 = 100; cd4 <= 900; cd4 += 100) edges.push_back(-double(cd4));
    std::sort(edges.begin(), edges.end());
    std::vector<double> observed(edges.size() + 1, 0.0);
    for (const auto& o : cohort.observations) {
        std::size_t bin = std::upper_bound(edges.begin(), edges.end(), o.score) - edges.begin();
        observed[bin] += 1.0;
    }
    double chi2 = 0.0;
    double prev_cdf = 0.0;
    for (std::size_t b = 0; b <= edges.size(); ++b) {
        double cdf = b < edges.size() ? analytic.pooled(edges[b]) : 1.0;
        double expected = (cdf - prev_cdf) * static_cast<double>(n);
        prev_cdf = cdf;
        REQUIRE(expected > 5.0);
        chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    double pvalue = chi_square_upper_tail(chi2, static_cast<double>(edges.size()));
    CHECK(pvalue > 0.001);
}

TEST_CASE("analytic CDF equals the incomplete gamma at integer cells") {
    GammaScenario s = named_scenario("A-1", 0.15);
    CdfSet set = analytic_cdf_set(s, 5000);
    for (int k : {1, 50, 230, 500, 1200}) {
        // P(score <= -k) = 1 - P(CD4 <= k-1)
        double expected0 = 1.0 - gamma_cdf(double(k - 1), s.shape0, s.scale0);
        CHECK(set.neg(-double(k)) == doctest::Approx(expected0).epsilon(1e-12));
    }
    CHECK(set.pooled(0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("true optimum reproduces reference cells") {
    SelectionCriterion crit = SelectionCriterion::min_tmr();
    SUBCASE("A-1, p=.15, phi=.2") {
        TrueOptimum t = true_optimum(named_scenario("A-1", 0.15), 0.2, crit);
        CHECK(std::fabs(t.cd4_lower - 0.0) <= 2.0);
        CHECK(std::fabs(t.cd4_upper - 230.0) <= 2.0);
        CHECK(std::fabs(t.report.tmr - 0.09) <= 0.005);
    }
    SUBCASE("A-2, p=.40, phi=0") {
        TrueOptimum t = true_optimum(named_scenario("A-2", 0.40), 0.0, crit);
        CHECK(std::fabs(t.cd4_lower - 249.0) <= 2.0);
        CHECK(std::fabs(t.report.tmr - 0.29) <= 0.005);
    }
    SUBCASE("B-2, p=.25, phi=.4") {
        TrueOptimum t = true_optimum(named_scenario("B-2", 0.25), 0.4, crit);
        CHECK(std::fabs(t.cd4_lower - 112.0) <= 2.0);
        CHECK(std::fabs(t.cd4_upper - 577.0) <= 2.0);
        CHECK(std::fabs(t.report.tmr - 0.03) <= 0.005);
    }
}

TEST_CASE("true optimum is the argmin over the analytic rule family") {
    GammaScenario s = named_scenario("B-1", 0.25);
    CdfSet cdfs = analytic_cdf_set(s, 2000);
    TrueOptimum t = true_optimum(s, 0.2, SelectionCriterion::min_tmr(), 2000);
    DecisionSpace space = build_decision_space(cdfs, 0.2);
    for (std::size_t i = 0; i < space.rules.size(); i += 7) {
        RiskReport other = risk_report(space.rules[i], cdfs, 0.5);
        CHECK(t.report.tmr <= other.tmr + 1e-12);
    }
}

TEST_CASE("estimates converge toward the true optimum") {
    GammaScenario s = named_scenario("B-2", 0.25);
    TrueOptimum truth = true_optimum(s, 0.2, SelectionCriterion::min_tmr());
    double prev_err = 1e18;
    for (std::size_t n : {std::size_t(500), std::size_t(2000), std::size_t(8000)}) {
        double err = 0.0;
        int reps = 60;
        for (int r = 0; r < reps; ++r) {
            Cohort cohort = sample_scenario(s, n, 5000 + 131 * r + n);
            CdfSet set = ecdf_set(cohort);
            DecisionSpace space = build_decision_space(set, 0.2);
            auto [rule, rep] = select_min_risk(space, set, SelectionCriterion::min_tmr());
            (void)rep;
            err += std::fabs(-rule.upper - truth.cd4_lower) +
                   std::fabs(-rule.lower - truth.cd4_upper);
        }
        err /= reps;
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("scenario study is deterministic and clamps tilt cutoffs") {
    StudyConfig cfg;
    cfg.replicates = 2;
    cfg.n = 600;
    cfg.seed = 9;
    auto cells = run_scenario_study({"B-1"}, {0.15}, {0.2}, cfg);
    auto again = run_scenario_study({"B-1"}, {0.15}, {0.2}, cfg);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].np_lower_mean == again[0].np_lower_mean);
    CHECK(cells[0].sp_tmr_mean == again[0].sp_tmr_mean);
    CHECK(cells[0].sp_lower_mean >= 0.0);  // negative CD4 cutoffs clamp to 0
}

TEST_CASE("convergence harness sanity oracles") {
    // a root-n consistent statistic must regress to slope about one half:
    // feed the harness shape through the sample mean of a normal population
    std::vector<std::size_t> sizes{250, 500, 1000, 2000, 4000};
    std::vector<double> sigma;
    int reps = 400;
    for (std::size_t n : sizes) {
        std::vector<double> means;
        for (int r = 0; r < reps; ++r) {
            auto rng = make_stream(777 + r, n);
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += standard_normal(rng);
            means.push_back(sum / static_cast<double>(n));
        }
        double mean = 0.0;
        for (double m : means) mean += m;
        mean /= reps;
        double ss = 0.0;
        for (double m : means) ss += (m - mean) * (m - mean);
        sigma.push_back(std::sqrt(ss / (reps - 1.0)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        double x = -std::log(double(sizes[i])), y = std::log(sigma[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = double(sizes.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.12));
}

TEST_CASE("design_lookup inverts the fitted power law") {
    ConvergenceResult r;
    r.sample_sizes = {250, 500, 1000};
    // sigma = C n^-0.5 with C = exp(intercept)
    r.slope_np = 0.5;
    r.intercept_np = std::log(25.0) + 0.5 * std::log(4000.0);
    r.slope_sp = 0.5;
    r.intercept_sp = r.intercept_np;
    auto d = design_lookup(r, 25.0);
    CHECK(d.n_np == 4000);

    SUBCASE("doubling the target divides the answer by about four") {
        auto d2 = design_lookup(r, 50.0);
        CHECK(double(d.n_np) / double(d2.n_np) == doctest::Approx(4.0).epsilon(0.01));
    }
    SUBCASE("huge target clamps to the smallest tested size") {
        auto d3 = design_lookup(r, 1e9);
        CHECK(d3.n_np == 250);
    }
    SUBCASE("non-positive slope is an error") {
        r.slope_np = -0.1;
        CHECK_THROWS_AS(design_lookup(r, 25.0), NumericalError);
    }
}

TEST_CASE("constant-sigma input regresses to slope zero") {
    ConvergenceResult r;
    r.sample_sizes = {100, 200, 400, 800};
    // emulate a stub estimator with constant spread via a hand-built fit
    std::vector<double> sigma{10.0, 10.0, 10.0, 10.0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        double x = -std::log(double(r.sample_sizes[i])), y = std::log(sigma[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = double(sigma.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(std::fabs(slope) <= 1e-12);
}

TEST_CASE("unknown scenario name is rejected") {
    CHECK_THROWS_AS(named_scenario("C-3", 0.2), ConfigError);
}

TEST_CASE("scenario configs parse from JSON") {
    auto cfg = parse_scenario_config(
        R"({"name":"B-2","p":0.15,"phi":0.4,"n":2500,"replicates":20,"seed":3})");
    CHECK(cfg.scenario.scale0 == 350.0);
    CHECK(cfg.scenario.prevalence == 0.15);
    CHECK(cfg.phi == 0.4);
    CHECK(cfg.n == 2500);
    CHECK(cfg.replicates == 20);
    CHECK(cfg.seed == 3);

    SUBCASE("custom parameters with either key spelling") {
        auto c2 = parse_scenario_config(
            R"({"name":"mine","eta0":3.0,"kappa0":200,"shape1":2.0,"scale1":90,"p":0.3})");
        CHECK(c2.scenario.shape0 == 3.0);
        CHECK(c2.scenario.scale1 == 90.0);
        CHECK(c2.phi == -1.0);
    }
    SUBCASE("bad parameters are rejected") {
        CHECK_THROWS_AS(parse_scenario_config(R"({"eta0":-1})"), ConfigError);
        CHECK_THROWS_AS(parse_scenario_config("not json"), ConfigError);
    }
}
