#include "doctest.h"

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "triage/empirical.hpp"
#include "triage/errors.hpp"
#include "triage/rng.hpp"

using namespace triage;

namespace {

Cohort tiny_cohort() {
    // scores {1,2,3} status 0 and {4} status 1
    Cohort c;
    c.observations = {{1, 0, {}, {}}, {2, 0, {}, {}}, {3, 0, {}, {}}, {4, 1, {}, {}}};
    return c;
}

}  // namespace

TEST_CASE("ecdf_set counts by status") {
    CdfSet set = ecdf_set(tiny_cohort());
    CHECK(set.neg(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(set.prevalence == doctest::Approx(0.25));
    CHECK(set.pos(3.9) == 0.0);
    CHECK(set.pos(4.0) == 1.0);
}

TEST_CASE("ecdf boundary behavior") {
    CdfSet set = ecdf_set(tiny_cohort());
    CHECK(set.pooled(0.5) == 0.0);
    CHECK(set.pooled(4.0) == doctest::Approx(1.0));
    CHECK(set.pooled(99.0) == doctest::Approx(1.0));
}

TEST_CASE("single-status cohort is rejected") {
    Cohort c;
    c.observations = {{1, 0, {}, {}}, {2, 0, {}, {}}};
    CHECK_THROWS_AS(ecdf_set(c), DataError);
}

TEST_CASE("pooled ecdf equals a naive double loop") {
    auto rng = make_stream(21, 0);
    auto cohort = testutil::random_cohort(rng, 200, 1.0, 0.4, true);
    CdfSet set = ecdf_set(cohort);
    for (int i = 0; i < 100; ++i) {
        double s = standard_normal(rng) * 2.0;
        CHECK(set.pooled(s) == doctest::Approx(testutil::naive_pooled_ecdf(cohort, s)).epsilon(1e-12));
    }
    for (const auto& o : cohort.observations) {
        CHECK(set.pooled(o.score) ==
              doctest::Approx(testutil::naive_pooled_ecdf(cohort, o.score)).epsilon(1e-12));
        CHECK(set.neg(o.score) ==
              doctest::Approx(testutil::naive_status_ecdf(cohort, 0, o.score)).epsilon(1e-12));
    }
}

TEST_CASE("mixture identity holds at every support point") {
    auto rng = make_stream(22, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto cohort = testutil::random_cohort(rng, 150, 0.8, 0.3, trial % 2 == 0);
        CdfSet set = ecdf_set(cohort);
        for (double s : set.support()) {
            double mix = (1.0 - set.prevalence) * set.neg(s) + set.prevalence * set.pos(s);
            CHECK(std::fabs(mix - set.pooled(s)) <= 1e-12);
        }
    }
}

TEST_CASE("feasible_lower on ten distinct scores") {
    Cohort c;
    for (int i = 1; i <= 10; ++i) c.observations.push_back({double(i), i > 8 ? 1 : 0, {}, {}});
    CdfSet set = ecdf_set(c);

    SUBCASE("zero budget collapses the interval") {
        for (double u : set.support()) CHECK(feasible_lower(set.pooled, u, 0.0) == u);
    }
    SUBCASE("0.3 budget steps back three order statistics") {
        CHECK(feasible_lower(set.pooled, 7.0, 0.3) == 4.0);
    }
    SUBCASE("full budget maps everything below support") {
        for (double u : set.support()) CHECK(is_below_support(feasible_lower(set.pooled, u, 1.0)));
    }
}

TEST_CASE("feasible_lower monotonicity and minimality") {
    auto rng = make_stream(23, 0);
    for (int trial = 0; trial < 30; ++trial) {
        auto cohort = testutil::random_cohort(rng, 80, 1.2, 0.35, trial % 3 == 0);
        CdfSet set = ecdf_set(cohort);
        const auto& sup = set.support();
        double phis[] = {0.0, 0.1, 0.25, 0.6, 1.0};

        for (double phi : phis) {
            double prev = kBelowSupport;
            for (double u : sup) {
                double w = feasible_lower(set.pooled, u, phi);
                // nondecreasing in u
                CHECK(w >= prev);
                prev = w;
                // budget satisfied
                double wcdf = is_below_support(w) ? 0.0 : set.pooled(w);
                CHECK(budget_ok(set.pooled(u), wcdf, phi));
                // minimality: the support value below w violates the budget
                if (!is_below_support(w)) {
                    auto it = std::lower_bound(sup.begin(), sup.end(), w);
                    REQUIRE(it != sup.end());
                    double below = it == sup.begin() ? kBelowSupport : *(it - 1);
                    double bcdf = is_below_support(below) ? 0.0 : set.pooled(below);
                    CHECK(!budget_ok(set.pooled(u), bcdf, phi));
                }
            }
        }
        // nonincreasing in phi
        for (double u : sup) {
            double w_small = feasible_lower(set.pooled, u, 0.1);
            double w_big = feasible_lower(set.pooled, u, 0.5);
            CHECK(w_big <= w_small);
        }
    }
}

TEST_CASE("generalized inverse of a step CDF") {
    StepCdf cdf = StepCdf::from_masses({{1.0, 0.25}, {2.0, 0.5}, {3.0, 0.25}});
    CHECK(is_below_support(cdf.inverse(0.0)));
    CHECK(cdf.inverse(0.1) == 1.0);
    CHECK(cdf.inverse(0.25) == 1.0);   // inf{s : cdf(s) >= t}
    CHECK(cdf.inverse(0.26) == 2.0);
    CHECK(cdf.inverse(0.75) == 2.0);
    CHECK(cdf.inverse(1.0) == 3.0);
}

TEST_CASE("step CDFs export as two-column CSV") {
    StepCdf cdf = StepCdf::from_masses({{1.5, 0.5}, {2.5, 0.5}});
    std::ostringstream out;
    write_step_cdf(out, cdf);
    CHECK(out.str() == "score,cdf\n1.5,0.5\n2.5,1\n");
}
