#include "regretlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace regretlab {

namespace {

void check_probability_row(std::span<const double> row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0)) {
            throw ParameterError(std::string(what) + ": negative or NaN probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kExactTol) {
        throw ParameterError(std::string(what) + ": probabilities sum to " +
                             std::to_string(sum));
    }
}

}  // namespace

Instance::Instance(std::size_t num_contexts, std::size_t num_actions, std::size_t outcome_dim,
                   std::vector<double> means, NoiseModel noise, std::vector<double> context_dist)
    : num_contexts_(num_contexts),
      num_actions_(num_actions),
      outcome_dim_(outcome_dim),
      means_(std::move(means)),
      noise_(noise),
      context_dist_(std::move(context_dist)) {
    if (num_contexts_ == 0 || num_actions_ == 0 || outcome_dim_ == 0) {
        throw ParameterError("Instance: empty context, action or outcome set");
    }
    if (means_.size() != num_contexts_ * num_actions_ * outcome_dim_) {
        throw ParameterError("Instance: means table is not total");
    }
    if (context_dist_.size() != num_contexts_) {
        throw ParameterError("Instance: context distribution has wrong length");
    }
    check_probability_row(context_dist_, "Instance context_dist");
    if (noise_.kind == NoiseKind::Gaussian && !(noise_.sigma > 0.0)) {
        throw ParameterError("Instance: Gaussian sigma must be positive");
    }
    for (double m : means_) {
        if (!std::isfinite(m)) throw ParameterError("Instance: non-finite mean");
        if (noise_.kind == NoiseKind::Bernoulli && (m < 0.0 || m > 1.0)) {
            throw ParameterError("Instance: Bernoulli mean outside [0,1]: " + std::to_string(m));
        }
    }
}

Instance Instance::with_mean(std::size_t x, std::size_t a, std::size_t k, double value) const {
    std::vector<double> means = means_;
    means.at((x * num_actions_ + a) * outcome_dim_ + k) = value;
    return Instance(num_contexts_, num_actions_, outcome_dim_, std::move(means), noise_,
                    context_dist_);
}

RewardMapping RewardMapping::coordinate(std::size_t index) {
    return RewardMapping(Kind::Coordinate, index, {});
}

RewardMapping RewardMapping::linear(std::vector<double> weights) {
    if (weights.empty()) throw ParameterError("RewardMapping: empty weight vector");
    return RewardMapping(Kind::Linear, 0, std::move(weights));
}

double RewardMapping::operator()(std::span<const double> y) const {
    if (kind_ == Kind::Coordinate) return y[index_];
    double s = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * y[k];
    return s;
}

void RewardMapping::check(std::size_t outcome_dim) const {
    if (kind_ == Kind::Coordinate && index_ >= outcome_dim) {
        throw ParameterError("RewardMapping: coordinate " + std::to_string(index_) +
                             " out of range for outcome_dim " + std::to_string(outcome_dim));
    }
    if (kind_ == Kind::Linear && weights_.size() != outcome_dim) {
        throw ParameterError("RewardMapping: weight length does not match outcome_dim");
    }
}

Policy::Policy(std::size_t num_contexts, std::size_t num_actions, std::vector<double> probs)
    : num_contexts_(num_contexts), num_actions_(num_actions), probs_(std::move(probs)) {
    if (num_contexts_ == 0 || num_actions_ == 0) throw ParameterError("Policy: empty shape");
    if (probs_.size() != num_contexts_ * num_actions_) {
        throw ParameterError("Policy: table size does not match shape");
    }
    for (std::size_t x = 0; x < num_contexts_; ++x) check_probability_row(row(x), "Policy row");
}

Policy Policy::uniform(std::size_t num_contexts, std::size_t num_actions) {
    return Policy(num_contexts, num_actions,
                  std::vector<double>(num_contexts * num_actions,
                                      1.0 / static_cast<double>(num_actions)));
}

Policy Policy::deterministic(std::size_t num_actions, std::span<const std::size_t> choice) {
    std::vector<double> probs(choice.size() * num_actions, 0.0);
    for (std::size_t x = 0; x < choice.size(); ++x) {
        if (choice[x] >= num_actions) throw ParameterError("Policy: action out of range");
        probs[x * num_actions + choice[x]] = 1.0;
    }
    return Policy(choice.size(), num_actions, std::move(probs));
}

Policy Policy::constant(std::size_t num_contexts, std::span<const double> row) {
    std::vector<double> probs;
    probs.reserve(num_contexts * row.size());
    for (std::size_t x = 0; x < num_contexts; ++x) probs.insert(probs.end(), row.begin(), row.end());
    return Policy(num_contexts, row.size(), std::move(probs));
}

Policy Policy::mix(const Policy& other, double lambda) const {
    if (other.num_contexts_ != num_contexts_ || other.num_actions_ != num_actions_) {
        throw ParameterError("Policy::mix: shape mismatch");
    }
    std::vector<double> probs(probs_.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = lambda * probs_[i] + (1.0 - lambda) * other.probs_[i];
    }
    return Policy(num_contexts_, num_actions_, std::move(probs));
}

std::size_t Policy::sample(std::size_t x, Rng& rng) const {
    const auto r = row(x);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < r.size(); ++a) {
        if (r[a] <= 0.0) continue;
        last_positive = a;
        acc += r[a];
        if (u < acc) return a;
    }
    // u landed in the rounding slack above the accumulated sum.
    return last_positive;
}

std::size_t sample_context(const Instance& instance, Rng& rng) {
    const auto dist = instance.context_dist();
    if (dist.size() == 1) return 0;
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t x = 0; x < dist.size(); ++x) {
        if (dist[x] <= 0.0) continue;
        last_positive = x;
        acc += dist[x];
        if (u < acc) return x;
    }
    return last_positive;
}

std::vector<double> sample_outcome(const Instance& instance, std::size_t x, std::size_t a,
                                   Rng& rng) {
    const auto mu = instance.mean(x, a);
    std::vector<double> y(mu.size());
    const NoiseModel& noise = instance.noise();
    for (std::size_t k = 0; k < mu.size(); ++k) {
        if (noise.kind == NoiseKind::Bernoulli) {
            y[k] = rng.uniform() < mu[k] ? 1.0 : 0.0;
        } else {
            y[k] = rng.normal(mu[k], noise.sigma);
        }
    }
    return y;
}

double mean_reward(const Instance& instance, const RewardMapping& mapping, std::size_t x,
                   std::size_t a) {
    return mapping(instance.mean(x, a));
}

MeanTable mean_table(const Instance& instance, const RewardMapping& mapping) {
    mapping.check(instance.outcome_dim());
    MeanTable table{instance.num_contexts(), instance.num_actions(), {}};
    table.values.reserve(table.num_contexts * table.num_actions);
    for (std::size_t x = 0; x < table.num_contexts; ++x) {
        for (std::size_t a = 0; a < table.num_actions; ++a) {
            table.values.push_back(mean_reward(instance, mapping, x, a));
        }
    }
    return table;
}

std::vector<double> marginal_means(const Instance& instance, const RewardMapping& mapping) {
    const auto px = instance.context_dist();
    std::vector<double> m(instance.num_actions(), 0.0);
    for (std::size_t x = 0; x < instance.num_contexts(); ++x) {
        for (std::size_t a = 0; a < instance.num_actions(); ++a) {
            m[a] += px[x] * mean_reward(instance, mapping, x, a);
        }
    }
    return m;
}

double policy_value(const Instance& instance, const RewardMapping& mapping, const Policy& policy) {
    if (policy.num_contexts() != instance.num_contexts() ||
        policy.num_actions() != instance.num_actions()) {
        throw ParameterError("policy_value: policy shape does not match instance");
    }
    const auto px = instance.context_dist();
    double value = 0.0;
    for (std::size_t x = 0; x < instance.num_contexts(); ++x) {
        double row_value = 0.0;
        for (std::size_t a = 0; a < instance.num_actions(); ++a) {
            const double p = policy.prob(x, a);
            if (p != 0.0) row_value += p * mean_reward(instance, mapping, x, a);
        }
        value += px[x] * row_value;
    }
    return value;
}

OccupancyMeasure occupancy(const Policy& policy, std::span<const double> context_dist) {
    if (context_dist.size() != policy.num_contexts()) {
        throw ParameterError("occupancy: context distribution length mismatch");
    }
    OccupancyMeasure mu{policy.num_contexts(), policy.num_actions(), {}};
    mu.mass.reserve(mu.num_contexts * mu.num_actions);
    for (std::size_t x = 0; x < mu.num_contexts; ++x) {
        for (std::size_t a = 0; a < mu.num_actions; ++a) {
            mu.mass.push_back(context_dist[x] * policy.prob(x, a));
        }
    }
    return mu;
}

bool in_class(const Policy& policy, const PolicyClass& policy_class) {
    switch (policy_class.kind()) {
        case PolicyClass::Kind::All:
            return true;
        case PolicyClass::Kind::ContextIndependent: {
            const auto first = policy.row(0);
            for (std::size_t x = 1; x < policy.num_contexts(); ++x) {
                const auto r = policy.row(x);
                for (std::size_t a = 0; a < r.size(); ++a) {
                    if (std::abs(r[a] - first[a]) > kExactTol) return false;
                }
            }
            return true;
        }
        case PolicyClass::Kind::SupportRestricted: {
            const auto& allowed = policy_class.allowed();
            if (allowed.size() != policy.num_actions()) return false;
            for (std::size_t x = 0; x < policy.num_contexts(); ++x) {
                for (std::size_t a = 0; a < policy.num_actions(); ++a) {
                    if (!allowed[a] && policy.prob(x, a) != 0.0) return false;
                }
            }
            return true;
        }
    }
    return false;
}

std::vector<double> uniform_over_argmax(std::span<const double> values, double tol) {
    const double best = *std::max_element(values.begin(), values.end());
    std::vector<double> w(values.size(), 0.0);
    std::size_t ties = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= best - tol) {
            w[i] = 1.0;
            ++ties;
        }
    }
    for (double& v : w) v /= static_cast<double>(ties);
    return w;
}

std::pair<Policy, double> best_in_class(const Instance& instance, const RewardMapping& mapping,
                                        const PolicyClass& policy_class) {
    mapping.check(instance.outcome_dim());
    const std::size_t nx = instance.num_contexts();
    const std::size_t na = instance.num_actions();
    switch (policy_class.kind()) {
        case PolicyClass::Kind::All: {
            const MeanTable table = mean_table(instance, mapping);
            std::vector<double> probs;
            probs.reserve(nx * na);
            for (std::size_t x = 0; x < nx; ++x) {
                const auto w = uniform_over_argmax(table.row(x));
                probs.insert(probs.end(), w.begin(), w.end());
            }
            Policy policy(nx, na, std::move(probs));
            const double value = policy_value(instance, mapping, policy);
            return {std::move(policy), value};
        }
        case PolicyClass::Kind::ContextIndependent: {
            const auto w = uniform_over_argmax(marginal_means(instance, mapping));
            Policy policy = Policy::constant(nx, w);
            const double value = policy_value(instance, mapping, policy);
            return {std::move(policy), value};
        }
        case PolicyClass::Kind::SupportRestricted:
            break;
    }
    throw ParameterError("best_in_class: only All and ContextIndependent classes are supported");
}

double simple_regret(const Instance& instance, const TaskSpec& task2, const Policy& policy) {
    if (!in_class(policy, task2.policy_class)) {
        throw ClassViolation("simple_regret: policy is outside the task-2 policy class");
    }
    const double best = best_in_class(instance, task2.reward_mapping, task2.policy_class).second;
    const double regret = best - policy_value(instance, task2.reward_mapping, policy);
    if (regret < -kExactTol) {
        throw std::logic_error("simple_regret: policy beats the in-class optimum");
    }
    return std::max(regret, 0.0);
}

}  // namespace regretlab
