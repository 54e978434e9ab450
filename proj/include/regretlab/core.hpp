#pragma once

// Domain types for finite contextual bandits and exact (noise-free)
// evaluation of policy values, occupancy measures and regrets.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "regretlab/errors.hpp"
#include "regretlab/rng.hpp"

namespace regretlab {

/// Tolerance for invariants that hold exactly in real arithmetic.
inline constexpr double kExactTol = 1e-12;
/// Two values closer than this are treated as tied in every argmax.
inline constexpr double kTieTol = 1e-9;

enum class NoiseKind { Bernoulli, Gaussian };

struct NoiseModel {
    NoiseKind kind = NoiseKind::Bernoulli;
    double sigma = 0.5;  // Gaussian only

    static NoiseModel bernoulli() { return {NoiseKind::Bernoulli, 0.0}; }
    static NoiseModel gaussian(double sigma = 0.5) { return {NoiseKind::Gaussian, sigma}; }
};

/// Outcome-distribution table P(.|x,a) with a context distribution P_X.
/// Contexts and actions are dense indices; means are stored row-major as
/// [context][action][outcome coordinate].
class Instance {
public:
    Instance(std::size_t num_contexts, std::size_t num_actions, std::size_t outcome_dim,
             std::vector<double> means, NoiseModel noise, std::vector<double> context_dist);

    std::size_t num_contexts() const { return num_contexts_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t outcome_dim() const { return outcome_dim_; }
    const NoiseModel& noise() const { return noise_; }
    std::span<const double> context_dist() const { return context_dist_; }

    std::span<const double> mean(std::size_t x, std::size_t a) const {
        return {means_.data() + (x * num_actions_ + a) * outcome_dim_, outcome_dim_};
    }

    /// Copy of this instance with one mean coordinate replaced.
    Instance with_mean(std::size_t x, std::size_t a, std::size_t k, double value) const;

    bool same_means(const Instance& other) const { return means_ == other.means_; }

private:
    std::size_t num_contexts_;
    std::size_t num_actions_;
    std::size_t outcome_dim_;
    std::vector<double> means_;
    NoiseModel noise_;
    std::vector<double> context_dist_;
};

/// Known map from an outcome vector to a scalar reward.
class RewardMapping {
public:
    enum class Kind { Coordinate, Linear };

    static RewardMapping coordinate(std::size_t index);
    static RewardMapping linear(std::vector<double> weights);

    Kind kind() const { return kind_; }
    std::size_t index() const { return index_; }
    const std::vector<double>& weights() const { return weights_; }

    double operator()(std::span<const double> y) const;

    /// Throws ParameterError if the mapping does not fit outcome vectors of this size.
    void check(std::size_t outcome_dim) const;

private:
    RewardMapping(Kind kind, std::size_t index, std::vector<double> weights)
        : kind_(kind), index_(index), weights_(std::move(weights)) {}

    Kind kind_;
    std::size_t index_ = 0;
    std::vector<double> weights_;
};

/// Stochastic map from contexts to action distributions.
class Policy {
public:
    /// Rows are validated: nonnegative, summing to 1 within kExactTol.
    Policy(std::size_t num_contexts, std::size_t num_actions, std::vector<double> probs);

    static Policy uniform(std::size_t num_contexts, std::size_t num_actions);
    static Policy deterministic(std::size_t num_actions, std::span<const std::size_t> choice);
    /// Same distribution at every context.
    static Policy constant(std::size_t num_contexts, std::span<const double> row);

    std::size_t num_contexts() const { return num_contexts_; }
    std::size_t num_actions() const { return num_actions_; }
    double prob(std::size_t x, std::size_t a) const { return probs_[x * num_actions_ + a]; }
    std::span<const double> row(std::size_t x) const {
        return {probs_.data() + x * num_actions_, num_actions_};
    }
    std::span<const double> data() const { return probs_; }

    /// Pointwise mixture lambda * this + (1 - lambda) * other.
    Policy mix(const Policy& other, double lambda) const;

    std::size_t sample(std::size_t x, Rng& rng) const;

private:
    std::size_t num_contexts_;
    std::size_t num_actions_;
    std::vector<double> probs_;
};

/// Admissible set of policies for a task.
class PolicyClass {
public:
    enum class Kind { All, ContextIndependent, SupportRestricted };

    static PolicyClass all() { return PolicyClass(Kind::All, {}); }
    static PolicyClass context_independent() { return PolicyClass(Kind::ContextIndependent, {}); }
    /// allowed[a] marks the actions a policy may put mass on.
    static PolicyClass support_restricted(std::vector<bool> allowed) {
        return PolicyClass(Kind::SupportRestricted, std::move(allowed));
    }

    Kind kind() const { return kind_; }
    const std::vector<bool>& allowed() const { return allowed_; }

private:
    PolicyClass(Kind kind, std::vector<bool> allowed) : kind_(kind), allowed_(std::move(allowed)) {}

    Kind kind_;
    std::vector<bool> allowed_;
};

/// A (policy class, reward mapping) pair defining one task.
struct TaskSpec {
    PolicyClass policy_class;
    RewardMapping reward_mapping;
};

/// Joint visitation mass mu(x, a) = P_X(x) pi(a|x).
struct OccupancyMeasure {
    std::size_t num_contexts = 0;
    std::size_t num_actions = 0;
    std::vector<double> mass;

    double at(std::size_t x, std::size_t a) const { return mass[x * num_actions + a]; }
};

/// Table of scalar mean rewards R(x, a), row-major by context.
struct MeanTable {
    std::size_t num_contexts = 0;
    std::size_t num_actions = 0;
    std::vector<double> values;

    double at(std::size_t x, std::size_t a) const { return values[x * num_actions + a]; }
    std::span<const double> row(std::size_t x) const {
        return {values.data() + x * num_actions, num_actions};
    }
};

std::size_t sample_context(const Instance& instance, Rng& rng);
std::vector<double> sample_outcome(const Instance& instance, std::size_t x, std::size_t a, Rng& rng);

/// E[f(Y)] for Y ~ P(x, a). Exact because supported mappings are linear.
double mean_reward(const Instance& instance, const RewardMapping& mapping, std::size_t x,
                   std::size_t a);
MeanTable mean_table(const Instance& instance, const RewardMapping& mapping);

/// P_X-weighted mean reward of each action, ignoring context.
std::vector<double> marginal_means(const Instance& instance, const RewardMapping& mapping);

double policy_value(const Instance& instance, const RewardMapping& mapping, const Policy& policy);
OccupancyMeasure occupancy(const Policy& policy, std::span<const double> context_dist);
bool in_class(const Policy& policy, const PolicyClass& policy_class);

/// Optimal policy within All or ContextIndependent, and its exact value.
/// Ties are broken uniformly.
std::pair<Policy, double> best_in_class(const Instance& instance, const RewardMapping& mapping,
                                        const PolicyClass& policy_class);

/// Throws ClassViolation when the policy is outside task2's class.
double simple_regret(const Instance& instance, const TaskSpec& task2, const Policy& policy);

/// Uniform weights on the entries within kTieTol of the maximum.
std::vector<double> uniform_over_argmax(std::span<const double> values, double tol = kTieTol);

}  // namespace regretlab
