#pragma once

// Environment families: the policy-class shift pair, the reward-mapping
// shift pair, and the two-arm robust pair.

#include <string>
#include <string_view>

#include "regretlab/core.hpp"

namespace regretlab {

/// Two instances that differ in exactly one mean cell.
struct InstancePair {
    Instance base;
    Instance perturbed;
    double epsilon = 0.0;
    double xi = 0.0;
};

/// An instance pair with the task definitions that go with it.
struct PairSetup {
    InstancePair pair;
    TaskSpec task1;
    TaskSpec task2;
};

/// Two contexts, two arms, uniform P_X. Task 1 ignores context, task 2 may use it.
///   base:      a1 = (0.5+eps, 0.5-eps), a2 = (0.5-2xi, 0.5)
///   perturbed: a2 at x2 becomes 0.5-2eps
/// Bernoulli noise additionally requires eps <= 0.25.
PairSetup make_policy_shift_pair(double epsilon, double xi, NoiseModel noise);

/// One context, two arms, two outcome coordinates. Task 1 rewards coordinate 0,
/// task 2 rewards coordinate 1.
///   a1 = (0.5, 0.5); base a2 = (0.5-xi, 0.5-eps); perturbed a2 = (0.5-xi, 0.5+eps)
PairSetup make_reward_shift_pair(double epsilon, double xi, NoiseModel noise);

/// Context-free Bernoulli pair S = (1, 0.5), S-bar = (1, 0.5+eps), eps in (0, 0.25).
/// Returned with identical tasks (All, coordinate 0) for both stages.
PairSetup make_robust_pair(double epsilon);

enum class Family { PolicyShift, RewardShift, RobustPair };

Family parse_family(std::string_view key);
std::string family_key(Family family);

struct FamilyParams {
    Family family = Family::PolicyShift;
    double epsilon = 0.2;
    double xi = 0.1;
    double delta = 0.75;  // robust-pair ambiguity radius
    NoiseModel noise = NoiseModel::bernoulli();
};

PairSetup make_family(const FamilyParams& params);

}  // namespace regretlab
