#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vltriage_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    std::string cmd = std::string(VLTRIAGE_BIN) + " " + args + " > /dev/null 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_cohort(const fs::path& p) {
    std::ofstream out(p);
    out << "score,z\n";
    // two mildly separated groups
    for (int i = 0; i < 60; ++i) out << (i % 10) * 0.5 << ",0\n";
    for (int i = 0; i < 30; ++i) out << 2.0 + (i % 10) * 0.5 << ",1\n";
}

}  // namespace

TEST_CASE("select pipeline writes a rule report") {
    TempDir tmp;
    write_cohort(tmp.path / "cohort.csv");
    int rc = run("select --input " + (tmp.path / "cohort.csv").string() +
                 " --phi 0.15 --lambda 0.5 --out " + (tmp.path / "out").string());
    REQUIRE(rc == 0);
    std::string rule = slurp(tmp.path / "out" / "rule.json");
    CHECK(rule.find("\"tmr\"") != std::string::npos);
    CHECK(rule.find("\"test_fraction\"") != std::string::npos);
    CHECK(fs::exists(tmp.path / "out" / "provenance.json"));
}

TEST_CASE("identical invocations produce identical files") {
    TempDir tmp;
    int rc1 = run("simulate --scenario B-1 --p 0.25 --phi 0.2 --replicates 3 --n 400 --seed 7 --out " +
                  (tmp.path / "a").string());
    int rc2 = run("simulate --scenario B-1 --p 0.25 --phi 0.2 --replicates 3 --n 400 --seed 7 --out " +
                  (tmp.path / "b").string());
    REQUIRE(rc1 == 0);
    REQUIRE(rc2 == 0);
    CHECK(slurp(tmp.path / "a" / "study.csv") == slurp(tmp.path / "b" / "study.csv"));

    SUBCASE("a different seed changes the study") {
        int rc3 = run(
            "simulate --scenario B-1 --p 0.25 --phi 0.2 --replicates 3 --n 400 --seed 8 --out " +
            (tmp.path / "c").string());
        REQUIRE(rc3 == 0);
        CHECK(slurp(tmp.path / "a" / "study.csv") != slurp(tmp.path / "c" / "study.csv"));
    }
}

TEST_CASE("thread count does not change results") {
    TempDir tmp;
    write_cohort(tmp.path / "cohort.csv");
    std::string common = "bootstrap --input " + (tmp.path / "cohort.csv").string() +
                         " --phi 0.2 --statistic rule --replicates 60 --seed 11 ";
    REQUIRE(run(common + "--threads 1 --out " + (tmp.path / "t1").string()) == 0);
    REQUIRE(run(common + "--threads 4 --out " + (tmp.path / "t4").string()) == 0);
    CHECK(slurp(tmp.path / "t1" / "bootstrap.json") == slurp(tmp.path / "t4" / "bootstrap.json"));
}

TEST_CASE("config errors exit with code 2") {
    TempDir tmp;
    CHECK(run("select --phi 0.2 --out " + (tmp.path / "o").string()) == 2);  // missing --input
    write_cohort(tmp.path / "cohort.csv");
    CHECK(run("select --input " + (tmp.path / "cohort.csv").string() + " --phi 1.5 --out " +
              (tmp.path / "o").string()) == 2);  // phi out of range
    CHECK(run("simulate --scenario Q-9 --replicates 2 --n 100 --out " +
              (tmp.path / "o").string()) == 2);  // unknown scenario
}

TEST_CASE("data errors exit with code 3") {
    TempDir tmp;
    std::ofstream(tmp.path / "bad.csv") << "score,z\n1.0,2\n";
    CHECK(run("select --input " + (tmp.path / "bad.csv").string() + " --phi 0.2 --out " +
              (tmp.path / "o").string()) == 3);
    std::ofstream(tmp.path / "empty.csv") << "";
    CHECK(run("select --input " + (tmp.path / "empty.csv").string() + " --phi 0.2 --out " +
              (tmp.path / "o").string()) == 3);
}

TEST_CASE("phi zero ROC has the classical anchor points") {
    TempDir tmp;
    write_cohort(tmp.path / "cohort.csv");
    REQUIRE(run("roc --input " + (tmp.path / "cohort.csv").string() + " --phi 0 --out " +
                (tmp.path / "roc").string()) == 0);
    std::string csv = slurp(tmp.path / "roc" / "roc.csv");
    CHECK(csv.find("0,0,") != std::string::npos);
    CHECK(csv.find("0,1,1") != std::string::npos);
}

TEST_CASE("emitted synthetic cohorts feed the downstream commands") {
    TempDir tmp;
    REQUIRE(run("simulate --scenario A-1 --p 0.25 --emit-cohort 300 --seed 42 --out " +
                (tmp.path / "d").string()) == 0);
    REQUIRE(fs::exists(tmp.path / "d" / "cohort.csv"));
    CHECK(run("cv --input " + (tmp.path / "d" / "cohort.csv").string() +
              " --phi 0.15 --folds 5 --seed 1 --out " + (tmp.path / "cv").string()) == 0);
    CHECK(run("score --input " + (tmp.path / "d" / "cohort.csv").string() +
              " --markers cd4 cd4pct --out " + (tmp.path / "sc").string()) == 0);
    std::string fit = slurp(tmp.path / "sc" / "fit.json");
    CHECK(fit.find("hosmer_lemeshow") != std::string::npos);
}
