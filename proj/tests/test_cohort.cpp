#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "triage/cohort.hpp"
#include "triage/csv.hpp"
#include "triage/errors.hpp"
#include "triage/logistic.hpp"
#include "triage/rng.hpp"
#include "triage/simulate.hpp"

using namespace triage;

TEST_CASE("parse_cohort reads rows in file order") {
    std::istringstream in("score,z\n1.2,0\n3.4,1\n");
    Cohort c = parse_cohort(in, CsvSchema{});
    REQUIRE(c.size() == 2);
    CHECK(c.observations[0].score == 1.2);
    CHECK(c.observations[0].status == 0);
    CHECK(c.observations[1].score == 3.4);
    CHECK(c.observations[1].status == 1);
}

TEST_CASE("parse_cohort rejects bad input") {
    CsvSchema schema;
    SUBCASE("non-binary status") {
        std::istringstream in("score,z\n1.2,2\n");
        CHECK_THROWS_WITH_AS(parse_cohort(in, schema), doctest::Contains("status not binary"),
                             DataError);
    }
    SUBCASE("empty file") {
        std::istringstream in("");
        CHECK_THROWS_AS(parse_cohort(in, schema), DataError);
    }
    SUBCASE("header only") {
        std::istringstream in("score,z\n");
        CHECK_THROWS_AS(parse_cohort(in, schema), DataError);
    }
    SUBCASE("missing status column") {
        std::istringstream in("score,other\n1,0\n");
        CHECK_THROWS_AS(parse_cohort(in, schema), DataError);
    }
    SUBCASE("non-numeric score") {
        std::istringstream in("score,z\nabc,0\n");
        CHECK_THROWS_AS(parse_cohort(in, schema), DataError);
    }
    SUBCASE("status disagreeing with dichotomized viral load") {
        schema.v_star = 400.0;
        std::istringstream in("score,z,vl\n1.0,0,500\n");
        CHECK_THROWS_AS(parse_cohort(in, schema), DataError);
    }
}

TEST_CASE("synthetic file with known counts round-trips") {
    // 597 rows mimicking the clinic cohort size, 146 positives
    GammaScenario s = named_scenario("A-1", 0.25);
    auto rng = make_stream(42, 0);
    Cohort c;
    for (int i = 0; i < 597; ++i) {
        Observation o;
        o.status = i < 146 ? 1 : 0;
        o.score = -std::ceil(gamma_sample(rng, o.status ? s.shape1 : s.shape0,
                                          o.status ? s.scale1 : s.scale0));
        o.raw_vl = o.status ? 800.0 : 75.0;
        c.observations.push_back(o);
    }
    REQUIRE(c.size() == 597);
    REQUIRE(c.count_status(1) == 146);

    std::ostringstream out;
    serialize_cohort(out, c);
    std::istringstream in(out.str());
    CsvSchema schema;
    schema.v_star = 400.0;
    Cohort back = parse_cohort(in, schema);
    REQUIRE(back.size() == c.size());
    CHECK(back.count_status(1) == 146);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back.observations[i].score == c.observations[i].score);
        CHECK(back.observations[i].status == c.observations[i].status);
    }

    // parse -> serialize -> parse is identity
    std::ostringstream out2;
    serialize_cohort(out2, back);
    CHECK(out.str() == out2.str());
}

TEST_CASE("dichotomize uses a strict threshold") {
    VlThreshold t{400.0};
    CHECK(dichotomize(500.0, t) == 1);
    CHECK(dichotomize(400.0, t) == 0);
    CHECK(dichotomize(75.0, t) == 0);
    CHECK_THROWS_AS(dichotomize(-1.0, t), DataError);
}

TEST_CASE("dichotomize is monotone in the viral load") {
    VlThreshold t{123.0};
    auto rng = make_stream(1, 0);
    for (int i = 0; i < 200; ++i) {
        double a = uniform01(rng) * 1000.0;
        double b = uniform01(rng) * 1000.0;
        if (a > b) std::swap(a, b);
        CHECK(dichotomize(a, t) <= dichotomize(b, t));
    }
}

TEST_CASE("composite_score evaluates the inverse logit") {
    LogisticFit fit;
    fit.names = {"cd4", "cd4pct"};
    fit.coefficients = {0.0, 0.0};
    fit.intercept = 0.0;
    std::map<std::string, double> markers{{"cd4", 250.0}, {"cd4pct", 17.0}};
    CHECK(composite_score(markers, fit) == 0.5);

    fit.intercept = 0.89;  // all markers zero leaves only the intercept
    markers = {{"cd4", 0.0}, {"cd4pct", 0.0}};
    CHECK(testutil::close(composite_score(markers, fit), 0.709, 5e-4));

    SUBCASE("missing marker is a row-level error") {
        markers.erase("cd4");
        CHECK_THROWS_AS(composite_score(markers, fit), DataError);
    }
}

TEST_CASE("composite_score matches an independent evaluation on random fits") {
    auto rng = make_stream(5, 0);
    for (int trial = 0; trial < 50; ++trial) {
        LogisticFit fit;
        fit.names = {"a", "b", "c"};
        fit.intercept = standard_normal(rng);
        fit.coefficients = {standard_normal(rng), standard_normal(rng), standard_normal(rng)};
        std::map<std::string, double> markers{
            {"a", standard_normal(rng)}, {"b", standard_normal(rng)}, {"c", standard_normal(rng)}};
        long double eta = fit.intercept;
        eta += (long double)fit.coefficients[0] * markers["a"];
        eta += (long double)fit.coefficients[1] * markers["b"];
        eta += (long double)fit.coefficients[2] * markers["c"];
        long double expected = 1.0L / (1.0L + std::exp(-eta));
        CHECK(testutil::close(composite_score(markers, fit), (double)expected, 1e-12));
    }
}

TEST_CASE("composite_score moves with marker sign") {
    // decreasing a negatively weighted marker must increase the score
    auto rng = make_stream(9, 0);
    for (int trial = 0; trial < 50; ++trial) {
        LogisticFit fit;
        fit.names = {"m"};
        fit.intercept = standard_normal(rng);
        fit.coefficients = {-std::fabs(standard_normal(rng)) - 0.01};
        double v = standard_normal(rng);
        std::map<std::string, double> hi{{"m", v}};
        std::map<std::string, double> lo{{"m", v - 1.0}};
        CHECK(composite_score(lo, fit) > composite_score(hi, fit));
    }
}
