#pragma once

// Task-1 online learners and the episode runner.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "regretlab/core.hpp"

namespace regretlab {

/// One logged step. logging_prob is pi_t(a|x) as emitted at draw time.
struct Record {
    std::size_t t = 0;
    std::size_t x = 0;
    std::size_t a = 0;
    std::vector<double> y;
    double logging_prob = 1.0;
};

struct History {
    std::vector<Record> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct RegretTrajectory {
    std::vector<double> per_step_regret;
    std::vector<double> cumulative;

    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Maps the history observed so far to the next policy. Implementations keep
/// sufficient statistics, so the emitted policy depends only on the records
/// passed to observe() since the last start().
class OnlineLearner {
public:
    virtual ~OnlineLearner() = default;

    /// Resets all statistics for a fresh run on this shape.
    virtual void start(std::size_t num_contexts, std::size_t num_actions) = 0;
    virtual Policy next_policy() const = 0;
    virtual void observe(const Record& record) = 0;
};

/// Index policy with bonus sqrt(2 ln t / n). Under ContextIndependent it runs a
/// single bandit on the context-marginal; under All, one bandit per context.
class UcbLearner final : public OnlineLearner {
public:
    explicit UcbLearner(TaskSpec task1);

    void start(std::size_t num_contexts, std::size_t num_actions) override;
    Policy next_policy() const override;
    void observe(const Record& record) override;

    /// Index of one arm; +infinity for an unpulled arm.
    static double index(double mean, std::size_t pulls, std::size_t t);

private:
    std::vector<double> row_for(std::size_t cell_context) const;

    TaskSpec task1_;
    bool per_context_ = false;
    std::size_t num_contexts_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<std::size_t> pulls_;     // [cell][a]
    std::vector<double> reward_sum_;     // [cell][a]
    std::vector<std::size_t> cell_steps_;
};

class UniformLearner final : public OnlineLearner {
public:
    void start(std::size_t num_contexts, std::size_t num_actions) override;
    Policy next_policy() const override;
    void observe(const Record&) override {}

private:
    std::size_t num_contexts_ = 1;
    std::size_t num_actions_ = 1;
};

/// Emits (1 - alpha) * base + alpha * uniform at every step.
class MixtureLearner final : public OnlineLearner {
public:
    MixtureLearner(std::unique_ptr<OnlineLearner> base, double alpha);

    void start(std::size_t num_contexts, std::size_t num_actions) override;
    Policy next_policy() const override;
    void observe(const Record& record) override;

    double alpha() const { return alpha_; }

private:
    std::unique_ptr<OnlineLearner> base_;
    double alpha_;
    std::size_t num_contexts_ = 1;
    std::size_t num_actions_ = 1;
};

std::unique_ptr<OnlineLearner> ucb_learner(const TaskSpec& task1);
std::unique_ptr<OnlineLearner> uniform_learner();
std::unique_ptr<OnlineLearner> mixture_learner(std::unique_ptr<OnlineLearner> base, double alpha);

/// Parsed learner key: "ucb", "uniform" or "mix:<alpha>" (a UCB base).
struct LearnerSpec {
    enum class Kind { Ucb, Uniform, Mixture };
    Kind kind = Kind::Ucb;
    double alpha = 0.0;

    static LearnerSpec parse(std::string_view key);
    std::string key() const;
    /// Exploration rate reported in run records: 0 for UCB, 1 for uniform.
    double effective_alpha() const;
    std::unique_ptr<OnlineLearner> make(const TaskSpec& task1) const;
};

struct OnlineRun {
    History history;
    RegretTrajectory regret;
};

/// Runs T steps of the task-1 protocol. Per-step regret is the exact expected
/// gap between the best in-class policy and the emitted policy.
OnlineRun run_online(const Instance& instance, const TaskSpec& task1, OnlineLearner& learner,
                     std::size_t horizon, Rng& rng);

}  // namespace regretlab
