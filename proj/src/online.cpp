#include "regretlab/online.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

namespace regretlab {

UcbLearner::UcbLearner(TaskSpec task1) : task1_(std::move(task1)) {
    switch (task1_.policy_class.kind()) {
        case PolicyClass::Kind::All: per_context_ = true; break;
        case PolicyClass::Kind::ContextIndependent: per_context_ = false; break;
        case PolicyClass::Kind::SupportRestricted:
            throw ParameterError("ucb_learner: unsupported policy class");
    }
}

void UcbLearner::start(std::size_t num_contexts, std::size_t num_actions) {
    num_contexts_ = num_contexts;
    num_actions_ = num_actions;
    const std::size_t cells = per_context_ ? num_contexts : 1;
    pulls_.assign(cells * num_actions, 0);
    reward_sum_.assign(cells * num_actions, 0.0);
    cell_steps_.assign(cells, 0);
}

double UcbLearner::index(double mean, std::size_t pulls, std::size_t t) {
    if (pulls == 0) return std::numeric_limits<double>::infinity();
    return mean + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(pulls));
}

std::vector<double> UcbLearner::row_for(std::size_t cell) const {
    const std::size_t t = cell_steps_[cell] + 1;
    std::vector<double> idx(num_actions_);
    bool any_unpulled = false;
    for (std::size_t a = 0; a < num_actions_; ++a) {
        const std::size_t n = pulls_[cell * num_actions_ + a];
        any_unpulled = any_unpulled || n == 0;
        idx[a] = n == 0 ? 0.0 : index(reward_sum_[cell * num_actions_ + a] / n, n, t);
    }
    if (any_unpulled) {
        // Infinite indices tie: uniform over the unpulled arms.
        for (std::size_t a = 0; a < num_actions_; ++a) {
            idx[a] = pulls_[cell * num_actions_ + a] == 0 ? 1.0 : 0.0;
        }
    }
    return uniform_over_argmax(idx);
}

Policy UcbLearner::next_policy() const {
    if (!per_context_) return Policy::constant(num_contexts_, row_for(0));
    std::vector<double> probs;
    probs.reserve(num_contexts_ * num_actions_);
    for (std::size_t x = 0; x < num_contexts_; ++x) {
        const auto r = row_for(x);
        probs.insert(probs.end(), r.begin(), r.end());
    }
    return Policy(num_contexts_, num_actions_, std::move(probs));
}

void UcbLearner::observe(const Record& record) {
    const std::size_t cell = per_context_ ? record.x : 0;
    pulls_[cell * num_actions_ + record.a] += 1;
    reward_sum_[cell * num_actions_ + record.a] += task1_.reward_mapping(record.y);
    cell_steps_[cell] += 1;
}

void UniformLearner::start(std::size_t num_contexts, std::size_t num_actions) {
    num_contexts_ = num_contexts;
    num_actions_ = num_actions;
}

Policy UniformLearner::next_policy() const { return Policy::uniform(num_contexts_, num_actions_); }

MixtureLearner::MixtureLearner(std::unique_ptr<OnlineLearner> base, double alpha)
    : base_(std::move(base)), alpha_(alpha) {
    if (!base_) throw ParameterError("mixture_learner: null base learner");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("mixture_learner: alpha must lie in [0,1]");
}

void MixtureLearner::start(std::size_t num_contexts, std::size_t num_actions) {
    num_contexts_ = num_contexts;
    num_actions_ = num_actions;
    base_->start(num_contexts, num_actions);
}

Policy MixtureLearner::next_policy() const {
    const Policy base = base_->next_policy();
    if (alpha_ == 0.0) return base;
    if (alpha_ == 1.0) return Policy::uniform(num_contexts_, num_actions_);
    return base.mix(Policy::uniform(num_contexts_, num_actions_), 1.0 - alpha_);
}

void MixtureLearner::observe(const Record& record) { base_->observe(record); }

std::unique_ptr<OnlineLearner> ucb_learner(const TaskSpec& task1) {
    return std::make_unique<UcbLearner>(task1);
}

std::unique_ptr<OnlineLearner> uniform_learner() { return std::make_unique<UniformLearner>(); }

std::unique_ptr<OnlineLearner> mixture_learner(std::unique_ptr<OnlineLearner> base, double alpha) {
    return std::make_unique<MixtureLearner>(std::move(base), alpha);
}

LearnerSpec LearnerSpec::parse(std::string_view key) {
    if (key == "ucb") return {Kind::Ucb, 0.0};
    if (key == "uniform") return {Kind::Uniform, 1.0};
    if (key.starts_with("mix:")) {
        const std::string number(key.substr(4));
        std::size_t used = 0;
        double alpha = 0.0;
        try {
            alpha = std::stod(number, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != number.size() || !(alpha >= 0.0 && alpha <= 1.0)) {
            throw ParameterError("learner key '" + std::string(key) +
                                 "': alpha must be a number in [0,1]");
        }
        return {Kind::Mixture, alpha};
    }
    throw ParameterError("unknown learner key '" + std::string(key) + "'");
}

std::string LearnerSpec::key() const {
    switch (kind) {
        case Kind::Ucb: return "ucb";
        case Kind::Uniform: return "uniform";
        case Kind::Mixture: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "mix:%.10g", alpha);
            return buf;
        }
    }
    return "unknown";
}

double LearnerSpec::effective_alpha() const {
    switch (kind) {
        case Kind::Ucb: return 0.0;
        case Kind::Uniform: return 1.0;
        case Kind::Mixture: return alpha;
    }
    return 0.0;
}

std::unique_ptr<OnlineLearner> LearnerSpec::make(const TaskSpec& task1) const {
    switch (kind) {
        case Kind::Ucb: return ucb_learner(task1);
        case Kind::Uniform: return uniform_learner();
        case Kind::Mixture: return mixture_learner(ucb_learner(task1), alpha);
    }
    throw ParameterError("LearnerSpec::make: unknown kind");
}

OnlineRun run_online(const Instance& instance, const TaskSpec& task1, OnlineLearner& learner,
                     std::size_t horizon, Rng& rng) {
    if (horizon == 0) throw ParameterError("run_online: horizon must be at least 1");
    task1.reward_mapping.check(instance.outcome_dim());

    const double best =
        best_in_class(instance, task1.reward_mapping, task1.policy_class).second;

    OnlineRun run;
    run.history.records.reserve(horizon);
    run.regret.per_step_regret.reserve(horizon);
    run.regret.cumulative.reserve(horizon);

    learner.start(instance.num_contexts(), instance.num_actions());
    double cumulative = 0.0;
    for (std::size_t t = 1; t <= horizon; ++t) {
        const std::size_t x = sample_context(instance, rng);
        const Policy policy = learner.next_policy();
        if (!in_class(policy, task1.policy_class)) {
            throw ClassViolation("run_online: learner emitted a policy outside the task-1 class");
        }
        const std::size_t a = policy.sample(x, rng);
        Record record{t, x, a, sample_outcome(instance, x, a, rng), policy.prob(x, a)};

        const double gap = best - policy_value(instance, task1.reward_mapping, policy);
        const double step_regret = std::max(gap, 0.0);
        cumulative += step_regret;
        run.regret.per_step_regret.push_back(step_regret);
        run.regret.cumulative.push_back(cumulative);

        learner.observe(record);
        run.history.records.push_back(std::move(record));
    }
    return run;
}

}  // namespace regretlab
