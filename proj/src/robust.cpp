#include "regretlab/robust.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "regretlab/offline.hpp"

namespace regretlab {

namespace {

constexpr double kRobustClampTol = 1e-9;
constexpr double kMaxLatticePoints = 5e7;

double row_worst_case(std::span<const double> ref, std::span<const double> pi, double delta) {
    const std::size_t na = ref.size();
    double nominal = 0.0;
    for (std::size_t a = 0; a < na; ++a) nominal += ref[a] * pi[a];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t best = 0; best < na; ++best) {
        double rate = 1.0 - pi[best];
        for (std::size_t a = 0; a < na; ++a) {
            if (a != best) rate = std::max(rate, pi[a]);
        }
        worst = std::max(worst, ref[best] - nominal + delta * rate);
    }
    return worst;
}

// Signed gap for a two-arm row, oriented so that `first` is the better arm.
struct TwoArmRow {
    double gap;
    bool first_is_better;
};

TwoArmRow orient(std::span<const double> ref) {
    const double g = ref[0] - ref[1];
    return {std::abs(g), g >= 0.0};
}

double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

// Visits every lattice point pi = counts / n of the simplex over `arms` actions.
template <class Visit>
void for_each_simplex_point(std::size_t arms, std::size_t n, Visit&& visit) {
    std::vector<std::size_t> counts(arms, 0);
    std::vector<double> pi(arms, 0.0);
    const double inv = 1.0 / static_cast<double>(n);
    auto recurse = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
        if (pos + 1 == arms) {
            counts[pos] = remaining;
            for (std::size_t a = 0; a < arms; ++a) pi[a] = static_cast<double>(counts[a]) * inv;
            visit(std::span<const double>(pi));
            return;
        }
        for (std::size_t c = 0; c <= remaining; ++c) {
            counts[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    recurse(recurse, 0, n);
}

std::pair<std::vector<double>, double> grid_minimize_row(std::span<const double> ref, double delta,
                                                         double grid_step) {
    const std::size_t arms = ref.size();
    if (arms == 1) return {{1.0}, row_worst_case(ref, std::vector<double>{1.0}, delta)};
    const auto n = static_cast<std::size_t>(std::llround(1.0 / grid_step));
    if (binomial(n + arms - 1, arms - 1) > kMaxLatticePoints) {
        throw ParameterError("optimal_robust_policy: simplex grid too large for " +
                             std::to_string(arms) + " arms at step " + std::to_string(grid_step));
    }
    std::vector<double> best_pi;
    double best_value = std::numeric_limits<double>::infinity();
    for_each_simplex_point(arms, n, [&](std::span<const double> pi) {
        const double v = row_worst_case(ref, pi, delta);
        if (v < best_value) {
            best_value = v;
            best_pi.assign(pi.begin(), pi.end());
        }
    });
    return {best_pi, best_value};
}

}  // namespace

RobustSpec::RobustSpec(MeanTable reference_means, double radius)
    : reference(std::move(reference_means)), delta(radius) {
    if (!(delta >= 0.0)) throw ParameterError("RobustSpec: delta must be nonnegative");
    if (reference.values.size() != reference.num_contexts * reference.num_actions ||
        reference.values.empty()) {
        throw ParameterError("RobustSpec: malformed reference table");
    }
}

double worst_case_sr(const RobustSpec& spec, const Policy& policy) {
    const MeanTable& ref = spec.reference;
    if (policy.num_contexts() != ref.num_contexts || policy.num_actions() != ref.num_actions) {
        throw ParameterError("worst_case_sr: policy shape does not match reference");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < ref.num_contexts; ++x) {
        worst = std::max(worst, row_worst_case(ref.row(x), policy.row(x), spec.delta));
    }
    return worst;
}

Policy two_arm_optimal_robust(const TwoArmRobust& two) {
    if (!(two.gap > 0.0) || !(two.delta > two.gap)) {
        throw PreconditionError("two_arm_optimal_robust: requires delta > gap > 0");
    }
    const double p1 = (two.delta + two.gap) / (2.0 * two.delta);
    const double p2 = (two.delta - two.gap) / (2.0 * two.delta);
    return Policy(1, 2, {p1, p2});
}

double two_arm_optimal_value(const TwoArmRobust& two) {
    if (!(two.gap > 0.0) || !(two.delta > two.gap)) {
        throw PreconditionError("two_arm_optimal_value: requires delta > gap > 0");
    }
    return (two.delta * two.delta - two.gap * two.gap) / (2.0 * two.delta);
}

std::pair<Policy, double> optimal_robust_policy(const RobustSpec& spec, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.1)) {
        throw ParameterError("optimal_robust_policy: grid_step must lie in (0, 0.1]");
    }
    const MeanTable& ref = spec.reference;
    const std::size_t na = ref.num_actions;
    std::vector<double> probs;
    probs.reserve(ref.values.size());
    double value = -std::numeric_limits<double>::infinity();

    for (std::size_t x = 0; x < ref.num_contexts; ++x) {
        const auto row = ref.row(x);
        std::vector<double> pi;
        if (spec.delta == 0.0) {
            pi = uniform_over_argmax(row);
        } else if (na == 2 && orient(row).gap > 0.0 && spec.delta > orient(row).gap) {
            const TwoArmRow o = orient(row);
            const Policy closed = two_arm_optimal_robust({o.gap, spec.delta});
            pi = o.first_is_better ? std::vector<double>{closed.prob(0, 0), closed.prob(0, 1)}
                                   : std::vector<double>{closed.prob(0, 1), closed.prob(0, 0)};
        } else {
            pi = grid_minimize_row(row, spec.delta, grid_step).first;
        }
        value = std::max(value, row_worst_case(row, pi, spec.delta));
        probs.insert(probs.end(), pi.begin(), pi.end());
    }
    return {Policy(ref.num_contexts, na, std::move(probs)), value};
}

double robust_simple_regret(const RobustSpec& spec, const Policy& policy, double grid_step) {
    const double optimum = optimal_robust_policy(spec, grid_step).second;
    const double gap = worst_case_sr(spec, policy) - optimum;
    return gap < kRobustClampTol ? 0.0 : gap;
}

double brute_force_sr(const RobustSpec& spec, const Policy& policy, std::size_t mesh) {
    const MeanTable& ref = spec.reference;
    const std::size_t na = ref.num_actions;
    if (na > 3 || ref.num_contexts > 3) {
        throw ParameterError("brute_force_sr: limited to 3 arms and 3 contexts");
    }
    if (mesh == 0) throw ParameterError("brute_force_sr: mesh must be positive");
    if (policy.num_contexts() != ref.num_contexts || policy.num_actions() != na) {
        throw ParameterError("brute_force_sr: policy shape does not match reference");
    }
    const double step = spec.delta / static_cast<double>(mesh);
    const long m = static_cast<long>(mesh);

    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> perturbed(na);
    for (std::size_t x = 0; x < ref.num_contexts; ++x) {
        const auto row = ref.row(x);
        const auto pi = policy.row(x);
        auto objective = [&](std::span<const long> k) {
            double best = -std::numeric_limits<double>::infinity();
            double nominal = 0.0;
            for (std::size_t a = 0; a < na; ++a) {
                perturbed[a] = row[a] + step * static_cast<double>(k[a]);
                best = std::max(best, perturbed[a]);
                nominal += perturbed[a] * pi[a];
            }
            return best - nominal;
        };
        // The objective is convex along the last coordinate, so on each line
        // of the lattice only the two endpoints can attain the line maximum.
        std::vector<long> k(na, 0);
        auto recurse = [&](auto&& self, std::size_t pos, long budget) -> void {
            if (pos + 1 == na) {
                for (long sign : {-1L, 1L}) {
                    k[pos] = sign * budget;
                    worst = std::max(worst, objective(k));
                }
                return;
            }
            for (long v = -budget; v <= budget; ++v) {
                k[pos] = v;
                self(self, pos + 1, budget - std::labs(v));
            }
        };
        recurse(recurse, 0, m);
    }
    return worst;
}

RobustRun run_robust_pipeline(const Instance& instance, const TaskSpec& task1,
                              OnlineLearner& learner, std::size_t horizon, double delta, Rng& rng,
                              double grid_step) {
    OnlineRun online = run_online(instance, task1, learner, horizon, rng);
    const RewardEstimate estimate = iw_estimate(online.history, task1.reward_mapping,
                                                instance.num_contexts(), instance.num_actions());
    const RobustSpec plug_in(estimate.as_table(), delta);
    Policy policy = optimal_robust_policy(plug_in, grid_step).first;
    const RobustSpec truth(mean_table(instance, task1.reward_mapping), delta);
    const double regret = robust_simple_regret(truth, policy, grid_step);
    return RobustRun{std::move(online), std::move(policy), regret};
}

}  // namespace regretlab
