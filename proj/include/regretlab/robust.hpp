#pragma once

// Distributionally robust simple regret over a per-context L1 ball of mean
// tables.
//
// The adversary may move the reference means P1(x, .) anywhere inside
//     { P : sum_a |P(x,a) - P1(x,a)| <= delta }   for every context x,
// and the worst-case simple regret of pi is
//     sup_{x, P in ball} [ max_a P(x,a) - sum_a P(x,a) pi(a|x) ].
// Means inside the ball are unbounded reals; they are not clamped to [0,1].

#include <cstddef>

#include "regretlab/core.hpp"
#include "regretlab/online.hpp"

namespace regretlab {

/// Default simplex grid resolution for the general optimizer.
inline constexpr double kDefaultRobustGridStep = 1e-3;

struct RobustSpec {
    MeanTable reference;
    double delta = 0.0;

    RobustSpec(MeanTable reference_means, double radius);
};

/// Two-arm, context-free parametrization: gap = P1(a1) - P1(a2) > 0.
struct TwoArmRobust {
    double gap;
    double delta;
};

/// Exact worst-case simple regret. For each candidate best arm a*, the
/// objective is linear in the perturbation, so the adversary spends the whole
/// budget on the single coordinate with the largest rate:
///     base(x,a*) + delta * max(1 - pi(a*|x), max_{a != a*} pi(a|x)).
double worst_case_sr(const RobustSpec& spec, const Policy& policy);

/// Context-free policy ((delta+gap)/(2 delta), (delta-gap)/(2 delta)).
/// Throws PreconditionError unless delta > gap > 0.
Policy two_arm_optimal_robust(const TwoArmRobust& two);

/// Optimal robust value of a two-arm row with delta > gap > 0.
double two_arm_optimal_value(const TwoArmRobust& two);

/// Minimizes worst_case_sr row by row. Two-arm rows with delta > |gap| > 0 use
/// the closed form; delta == 0 returns the per-context argmax policy; other
/// rows are searched on the simplex lattice of the given step.
std::pair<Policy, double> optimal_robust_policy(const RobustSpec& spec,
                                                double grid_step = kDefaultRobustGridStep);

/// worst_case_sr(policy) minus the optimal robust value; values below 1e-9 clamp to 0.
double robust_simple_regret(const RobustSpec& spec, const Policy& policy,
                            double grid_step = kDefaultRobustGridStep);

/// Independent oracle for worst_case_sr: maximizes the inner objective over
/// the lattice {delta * k / mesh : sum |k_a| <= mesh} of signed perturbations.
/// Limited to at most 3 arms and 3 contexts.
double brute_force_sr(const RobustSpec& spec, const Policy& policy, std::size_t mesh);

struct RobustRun {
    OnlineRun online;
    Policy robust_policy;
    double robust_sr = 0.0;
};

/// Task 1 online, then plug-in: optimal_robust_policy on the importance-weight
/// estimate, scored against the true reference means.
RobustRun run_robust_pipeline(const Instance& instance, const TaskSpec& task1,
                              OnlineLearner& learner, std::size_t horizon, double delta, Rng& rng,
                              double grid_step = kDefaultRobustGridStep);

}  // namespace regretlab
