#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regretlab/experiment.hpp"

using namespace regretlab;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.horizons = {50, 200};
    c.replications = 5;
    c.output_path = "";
    c.workers = 1;
    c.record_wall_ms = false;
    return c;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("regime examples") {
    CHECK(regime_alpha(100, 1e6, 2, 2) == 1.0);
    const RegimeChoice mid = regime_choice(1e4, 1e4, 2, 2);
    CHECK(mid.regime == 2);
    CHECK(mid.alpha == doctest::Approx(std::pow(10.0, 8.0 / 3.0) / 1e4));
    CHECK(std::abs(mid.alpha - 0.0464) <= 5e-4);
    const RegimeChoice hi = regime_choice(1e6, 1e4, 2, 2);
    CHECK(hi.regime == 3);
    CHECK(hi.alpha == 0.0);

    // Boundaries resolve to the less-exploring regime.
    CHECK(regime_choice(std::pow(1e3, 4.0 / 3.0), 1e3, 2, 2).regime == 3);
    CHECK(regime_choice(std::pow(1e3, 2.0 / 3.0), 1e3, 2, 2).regime == 1);
    // The positive-alpha floor |X||A|/sqrt(T).
    CHECK(regime_alpha(1e3, 1e3, 2, 2) == doctest::Approx(4.0 / std::sqrt(1e3)));
    CHECK_THROWS_AS(regime_alpha(0.5, 10, 2, 2), ParameterError);
}

TEST_CASE("property: regime alpha stays in [0,1]") {
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        const double T = std::pow(10.0, rng.uniform() * 7.0);
        const double tp = std::pow(10.0, rng.uniform() * 7.0);
        const double a = regime_alpha(std::max(T, 1.0), std::max(tp, 1.0), 1 + rng.index(4), 1 + rng.index(4));
        REQUIRE(a >= 0.0);
        REQUIRE(a <= 1.0);
    }
}

TEST_CASE("config json") {
    const ExperimentConfig c = config_from_json(
        R"({"family":"reward-shift","epsilon":0.1,"horizons":[10,20],"replications":3,"t_prime":1e4,
            "learners":["uniform"],"member":"perturbed","base_seed":9})");
    CHECK(c.family.family == Family::RewardShift);
    CHECK(c.family.epsilon == 0.1);
    CHECK(c.horizons == std::vector<std::size_t>{10, 20});
    CHECK(c.t_prime.value() == 1e4);
    CHECK(c.member == Member::Perturbed);
    CHECK(c.base_seed == 9);

    const ExperimentConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(config_hash(back) == config_hash(c));

    ExperimentConfig moved = c;
    moved.output_path = "elsewhere.csv";
    moved.workers = 7;
    CHECK(config_hash(moved) == config_hash(c));
    moved.base_seed = 10;
    CHECK(config_hash(moved) != config_hash(c));

    CHECK_THROWS_AS(config_from_json(R"({"horizon":[1]})"), ParameterError);
    CHECK_THROWS_AS(config_from_json(R"({"replications":0})"), ParameterError);
    CHECK_THROWS_AS(config_from_json(R"({"horizons":[20,10]})"), ParameterError);
    CHECK_THROWS_AS(config_from_json(R"({"epsilon":0.4})"), ParameterError);
    CHECK_THROWS_AS(config_from_json(R"({"learners":["greedy"]})"), ParameterError);
    CHECK_THROWS_AS(config_from_json("[1,2]"), ParameterError);
    CHECK_THROWS_AS(config_from_json("{"), ParameterError);
}

TEST_CASE("row expansion") {
    ExperimentConfig c;
    c.horizons = {10, 20, 30, 40, 50};
    c.replications = 100;
    const auto rows = expand_rows(c);
    CHECK(rows.size() == 2000);
    CHECK(rows.front().member == Member::Base);
    CHECK(rows.back().member == Member::Perturbed);
    CHECK(rows[0].seed != rows[1].seed);
    CHECK(rows[0].seed == row_seed(c.base_seed, c.family.family, Member::Base, "ucb", 10, 0));
}

TEST_CASE("sweep CSV is identical across worker counts") {
    ExperimentConfig c = small_config();
    c.learners = {"ucb", "mix:0.1", "uniform"};
    c.t_prime = 1e4;
    const std::string one = run_sweep(c).csv;
    c.workers = 4;
    const std::string four = run_sweep(c).csv;
    CHECK(one == four);
    CHECK(count_lines(one) == 2 + 2 * 3 * 2 * 5);
    CHECK(one.rfind("# regretlab-csv v1 config_hash=" + config_hash(c) + "\n", 0) == 0);
    CHECK(one.find(std::string(kCsvHeader) + "\n") != std::string::npos);
}

TEST_CASE("records satisfy the invariants") {
    ExperimentConfig c = small_config();
    c.t_prime = 250.0;
    for (Family f : {Family::PolicyShift, Family::RewardShift, Family::RobustPair}) {
        c.family.family = f;
        for (const RunRecord& r : run_sweep(c).records) {
            REQUIRE(r.cr >= 0.0);
            REQUIRE(r.sr >= 0.0);
            REQUIRE(std::abs(*r.weighted_objective - (r.cr + 250.0 * r.sr)) <= 1e-9);
            REQUIRE(r.robust_sr.has_value() == (f == Family::RobustPair));
            REQUIRE(r.wall_ms == 0);
        }
    }
}

TEST_CASE("uniform learner at T = 1 has the exact one-step regret") {
    ExperimentConfig c = small_config();
    const PairSetup s = make_family(c.family);
    RunRow row{Member::Perturbed, LearnerSpec::parse("uniform"), 1, 0, 77};
    const RunRecord r = run_two_task(c, row);
    const double best = best_in_class(s.pair.perturbed, s.task1.reward_mapping,
                                      PolicyClass::context_independent()).second;
    const double uni = policy_value(s.pair.perturbed, s.task1.reward_mapping, Policy::uniform(2, 2));
    CHECK(std::abs(r.cr - (best - uni)) <= kExactTol);
    CHECK(run_two_task(c, row).sr == r.sr);
    row.member = Member::Both;
    CHECK_THROWS_AS(run_two_task(c, row), ParameterError);
}

TEST_CASE("mixed exploration on the base member") {
    ExperimentConfig c = small_config();
    c.member = Member::Base;
    double sr = 0.0;
    double cr = 0.0;
    const std::size_t T = 20000;
    for (std::size_t rep = 0; rep < 200; ++rep) {
        const RunRow row{Member::Base, LearnerSpec::parse("mix:0.1"), T, rep,
                         row_seed(1, Family::PolicyShift, Member::Base, "mix:0.1", T, rep)};
        const RunRecord r = run_two_task(c, row);
        sr += r.sr;
        cr += r.cr;
    }
    CHECK(sr / 200.0 <= 0.02);
    const double avg = cr / 200.0 / static_cast<double>(T);
    CHECK(avg >= 0.001);
    CHECK(avg <= 0.01);
}

TEST_CASE("atomic CSV writes") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "regretlab_test_experiment";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ExperimentConfig c = small_config();
    c.output_path = (dir / "out.csv").string();
    const SweepResult res = run_sweep(c);
    CHECK(slurp(c.output_path) == res.csv);
    CHECK_FALSE(fs::exists(c.output_path + ".tmp"));

    CHECK_THROWS(write_file_atomic((dir / "missing" / "x.csv").string(), "data"));
    CHECK_FALSE(fs::exists(dir / "missing"));

    ExperimentConfig bad = small_config();
    bad.output_path = (dir / "bad.csv").string();
    bad.learners = {"ucb"};
    bad.family.family = Family::PolicyShift;
    bad.family.epsilon = 0.4;
    CHECK_THROWS(run_sweep(bad));
    CHECK_FALSE(fs::exists(bad.output_path));
    fs::remove_all(dir);
}

TEST_CASE("pareto sweep") {
    ExperimentConfig c = small_config();
    c.horizons = {400};
    c.alpha_grid = {0.0, 0.5, 1.0};
    c.replications = 4;
    CHECK_THROWS_AS(pareto_sweep(c), ParameterError);
    c.t_prime = 400.0;
    const auto rows = pareto_sweep(c);
    // 400 <= 400^{2/3}? no; 400 < 400^{4/3}: regime 2, alpha floored at 4/20 = 0.2, not on the grid.
    REQUIRE(rows.size() == 4);
    int marked = 0;
    for (const ParetoRow& r : rows) {
        marked += r.recommended;
        REQUIRE(std::abs(r.weighted_objective - (r.mean_cr + 400.0 * r.mean_sr)) <= 1e-9);
        REQUIRE(std::abs(r.sr_sqrt_cr - r.mean_sr * std::sqrt(r.mean_cr)) <= 1e-12);
    }
    CHECK(marked == 1);
    CHECK(rows.back().alpha == doctest::Approx(0.2));

    const std::string csv = format_pareto_csv(rows, config_hash(c));
    CHECK(count_lines(csv) == 2 + rows.size());
    CHECK(csv.find(std::string(kParetoHeader)) != std::string::npos);

    c.workers = 3;
    CHECK(format_pareto_csv(pareto_sweep(c), config_hash(c)) == csv);
}
