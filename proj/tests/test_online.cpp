#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "regretlab/instances.hpp"
#include "regretlab/online.hpp"

using namespace regretlab;

namespace {

const RewardMapping kCoord0 = RewardMapping::coordinate(0);

class FixedLearner final : public OnlineLearner {
public:
    explicit FixedLearner(Policy p) : policy_(std::move(p)) {}
    void start(std::size_t, std::size_t) override {}
    Policy next_policy() const override { return policy_; }
    void observe(const Record&) override {}

private:
    Policy policy_;
};

Record pull(std::size_t x, std::size_t a, double y) { return Record{0, x, a, {y}, 1.0}; }

}  // namespace

TEST_CASE("ucb cold start is uniform over unpulled arms") {
    const TaskSpec task{PolicyClass::all(), kCoord0};
    UcbLearner ucb(task);
    ucb.start(1, 3);
    const Policy p0 = ucb.next_policy();
    for (std::size_t a = 0; a < 3; ++a) CHECK(p0.prob(0, a) == doctest::Approx(1.0 / 3.0));
    ucb.observe(pull(0, 1, 1.0));
    const Policy p1 = ucb.next_policy();
    CHECK(p1.prob(0, 0) == 0.5);
    CHECK(p1.prob(0, 1) == 0.0);
    CHECK(p1.prob(0, 2) == 0.5);
}

TEST_CASE("ucb index formula") {
    CHECK(UcbLearner::index(0.5, 4, 100) == doctest::Approx(2.0174).epsilon(1e-4));
    CHECK(std::isinf(UcbLearner::index(0.5, 0, 100)));
}

TEST_CASE("ucb exploits a clear gap") {
    const TaskSpec task{PolicyClass::all(), kCoord0};
    UcbLearner ucb(task);
    ucb.start(1, 2);
    for (int i = 0; i < 1000; ++i) {
        ucb.observe(pull(0, 0, i < 900 ? 1.0 : 0.0));
        ucb.observe(pull(0, 1, i < 100 ? 1.0 : 0.0));
    }
    const Policy p = ucb.next_policy();
    CHECK(p.prob(0, 0) == 1.0);
}

TEST_CASE("ucb under the context-independent class pools contexts") {
    const TaskSpec ci{PolicyClass::context_independent(), kCoord0};
    UcbLearner ucb(ci);
    ucb.start(2, 2);
    ucb.observe(pull(0, 0, 1.0));
    ucb.observe(pull(1, 1, 0.0));
    const Policy p = ucb.next_policy();
    CHECK(in_class(p, PolicyClass::context_independent()));
    CHECK(p.prob(0, 0) == 1.0);

    const TaskSpec all{PolicyClass::all(), kCoord0};
    UcbLearner per(all);
    per.start(2, 2);
    per.observe(pull(0, 0, 1.0));
    const Policy q = per.next_policy();
    CHECK(q.prob(0, 1) == 1.0);
    CHECK(q.prob(1, 0) == 0.5);

    CHECK_THROWS_AS(UcbLearner(TaskSpec{PolicyClass::support_restricted({true, false}), kCoord0}),
                    ParameterError);
}

TEST_CASE("uniform learner") {
    for (std::size_t na : {2u, 5u}) {
        UniformLearner u;
        u.start(2, na);
        const Policy p = u.next_policy();
        for (double v : p.data()) CHECK(v == doctest::Approx(1.0 / static_cast<double>(na)));
        CHECK(in_class(p, PolicyClass::context_independent()));
    }
}

TEST_CASE("mixture learner") {
    const TaskSpec task{PolicyClass::all(), kCoord0};
    auto full = mixture_learner(ucb_learner(task), 1.0);
    full->start(2, 2);
    full->observe(pull(0, 0, 1.0));
    const Policy fp = full->next_policy();
    for (double v : fp.data()) CHECK(v == 0.5);

    auto none = mixture_learner(ucb_learner(task), 0.0);
    UcbLearner plain(task);
    none->start(2, 3);
    plain.start(2, 3);
    for (const Record& r : {pull(0, 0, 1.0), pull(0, 1, 0.0), pull(1, 2, 1.0)}) {
        none->observe(r);
        plain.observe(r);
    }
    const Policy a = none->next_policy();
    const Policy b = plain.next_policy();
    for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(a.data()[i] == b.data()[i]);

    const std::vector<std::size_t> a1{0};
    MixtureLearner mix(std::make_unique<FixedLearner>(Policy::deterministic(2, a1)), 0.1);
    mix.start(1, 2);
    const Policy m = mix.next_policy();
    CHECK(m.prob(0, 0) == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(m.prob(0, 1) == doctest::Approx(0.05).epsilon(1e-12));

    CHECK_THROWS_AS(mixture_learner(ucb_learner(task), 1.5), ParameterError);
}

TEST_CASE("learner keys") {
    CHECK(LearnerSpec::parse("ucb").kind == LearnerSpec::Kind::Ucb);
    CHECK(LearnerSpec::parse("uniform").effective_alpha() == 1.0);
    const LearnerSpec m = LearnerSpec::parse("mix:0.1");
    CHECK(m.kind == LearnerSpec::Kind::Mixture);
    CHECK(m.alpha == 0.1);
    CHECK(m.key() == "mix:0.1");
    CHECK(LearnerSpec::parse("mix:1e-2").alpha == 0.01);
    CHECK_THROWS_AS(LearnerSpec::parse("mix:"), ParameterError);
    CHECK_THROWS_AS(LearnerSpec::parse("mix:2"), ParameterError);
    CHECK_THROWS_AS(LearnerSpec::parse("mix:0.1x"), ParameterError);
    CHECK_THROWS_AS(LearnerSpec::parse("thompson"), ParameterError);
}

TEST_CASE("run_online with the uniform learner has exact regret") {
    const PairSetup s = make_policy_shift_pair(0.1, 0.05, NoiseModel::bernoulli());
    Rng rng(1);
    UniformLearner u;
    const OnlineRun run = run_online(s.pair.base, s.task1, u, 10000, rng);
    CHECK(run.history.size() == 10000);
    for (double r : run.regret.per_step_regret) REQUIRE(std::abs(r - 0.025) <= kExactTol);
    CHECK(std::abs(run.regret.total() - 250.0) <= 1e-9);

    Rng rng1(2);
    const OnlineRun one = run_online(s.pair.base, s.task1, u, 1, rng1);
    CHECK(one.history.size() == 1);
    CHECK_THROWS_AS(run_online(s.pair.base, s.task1, u, 0, rng1), ParameterError);
}

TEST_CASE("optimal policy incurs no regret") {
    const PairSetup s = make_policy_shift_pair(0.2, 0.1, NoiseModel::bernoulli());
    FixedLearner best(best_in_class(s.pair.base, kCoord0, PolicyClass::context_independent()).first);
    Rng rng(3);
    const OnlineRun run = run_online(s.pair.base, s.task1, best, 500, rng);
    CHECK(run.regret.total() == 0.0);
}

TEST_CASE("run_online rejects out-of-class learners") {
    const PairSetup s = make_policy_shift_pair(0.2, 0.1, NoiseModel::bernoulli());
    const std::vector<std::size_t> split{0, 1};
    FixedLearner bad(Policy::deterministic(2, split));
    Rng rng(3);
    CHECK_THROWS_AS(run_online(s.pair.base, s.task1, bad, 10, rng), ClassViolation);
}

TEST_CASE("property: history, trajectory and mixture floor") {
    const PairSetup s = make_policy_shift_pair(0.2, 0.1, NoiseModel::bernoulli());
    for (double alpha : {0.05, 0.1, 0.5}) {
        auto learner = mixture_learner(ucb_learner(s.task1), alpha);
        Rng rng(17);
        const OnlineRun run = run_online(s.pair.perturbed, s.task1, *learner, 3000, rng);
        REQUIRE(run.history.size() == 3000);
        double prev = 0.0;
        for (std::size_t t = 0; t < run.history.size(); ++t) {
            const Record& r = run.history.records[t];
            REQUIRE(r.t == t + 1);
            REQUIRE(r.logging_prob > 0.0);
            REQUIRE(r.logging_prob >= alpha / 2.0 - kExactTol);
            REQUIRE(run.regret.per_step_regret[t] >= 0.0);
            REQUIRE(run.regret.cumulative[t] >= prev);
            prev = run.regret.cumulative[t];
        }
    }
}

TEST_CASE("property: per-step regret matches the emitted policy") {
    const PairSetup s = make_policy_shift_pair(0.2, 0.1, NoiseModel::bernoulli());
    const double best = best_in_class(s.pair.perturbed, kCoord0, PolicyClass::context_independent()).second;
    auto learner = mixture_learner(ucb_learner(s.task1), 0.1);
    auto shadow = mixture_learner(ucb_learner(s.task1), 0.1);
    Rng rng(5);
    const OnlineRun run = run_online(s.pair.perturbed, s.task1, *learner, 500, rng);
    shadow->start(2, 2);
    for (std::size_t t = 0; t < run.history.size(); ++t) {
        const Policy p = shadow->next_policy();
        REQUIRE(in_class(p, PolicyClass::context_independent()));
        const Record& r = run.history.records[t];
        REQUIRE(r.logging_prob == p.prob(r.x, r.a));
        REQUIRE(std::abs(run.regret.per_step_regret[t] -
                         (best - policy_value(s.pair.perturbed, kCoord0, p))) <= kExactTol);
        shadow->observe(r);
    }
}

TEST_CASE("property: runs are bit-reproducible") {
    const PairSetup s = make_reward_shift_pair(0.2, 0.1, NoiseModel::gaussian(0.5));
    auto run_once = [&] {
        auto l = mixture_learner(ucb_learner(s.task1), 0.1);
        Rng rng(424242);
        return run_online(s.pair.perturbed, s.task1, *l, 2000, rng);
    };
    const OnlineRun a = run_once();
    const OnlineRun b = run_once();
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t t = 0; t < a.history.size(); ++t) {
        REQUIRE(a.history.records[t].x == b.history.records[t].x);
        REQUIRE(a.history.records[t].a == b.history.records[t].a);
        REQUIRE(a.history.records[t].y == b.history.records[t].y);
        REQUIRE(a.history.records[t].logging_prob == b.history.records[t].logging_prob);
        REQUIRE(a.regret.cumulative[t] == b.regret.cumulative[t]);
    }
}

TEST_CASE("ucb beats uniform on a two-arm instance with gap 0.4") {
    const Instance inst(1, 2, 1, {0.7, 0.3}, NoiseModel::bernoulli(), {1.0});
    const TaskSpec task{PolicyClass::all(), kCoord0};
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng r1(seed), r2(seed + 1000);
        UcbLearner ucb(task);
        UniformLearner uni;
        const double cr_ucb = run_online(inst, task, ucb, 10000, r1).regret.total();
        const double cr_uni = run_online(inst, task, uni, 10000, r2).regret.total();
        wins += cr_ucb < cr_uni;
    }
    CHECK(wins >= 48);
}
