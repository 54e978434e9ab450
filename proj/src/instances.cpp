#include "regretlab/instances.hpp"

#include <string>

namespace regretlab {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ParameterError(message);
}

std::vector<double> uniform_contexts(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

}  // namespace

PairSetup make_policy_shift_pair(double epsilon, double xi, NoiseModel noise) {
    const double eps_max = noise.kind == NoiseKind::Bernoulli ? 0.25 : 0.5;
    require(epsilon >= 0.0 && epsilon <= eps_max,
            "policy-shift: epsilon must lie in [0, " + std::to_string(eps_max) + "]");
    require(xi >= 0.0 && xi <= 0.25, "policy-shift: xi must lie in [0, 0.25]");

    // Layout [x][a]: (x1,a1), (x1,a2), (x2,a1), (x2,a2).
    std::vector<double> means = {0.5 + epsilon, 0.5 - 2.0 * xi, 0.5 - epsilon, 0.5};
    Instance base(2, 2, 1, means, noise, uniform_contexts(2));
    Instance perturbed = base.with_mean(1, 1, 0, 0.5 - 2.0 * epsilon);

    return PairSetup{
        InstancePair{std::move(base), std::move(perturbed), epsilon, xi},
        TaskSpec{PolicyClass::context_independent(), RewardMapping::coordinate(0)},
        TaskSpec{PolicyClass::all(), RewardMapping::coordinate(0)},
    };
}

PairSetup make_reward_shift_pair(double epsilon, double xi, NoiseModel noise) {
    require(epsilon >= 0.0 && epsilon <= 0.25, "reward-shift: epsilon must lie in [0, 0.25]");
    require(xi >= 0.0 && xi <= 0.25, "reward-shift: xi must lie in [0, 0.25]");

    // Layout [a][k]: a1 = (0.5, 0.5), a2 = (0.5-xi, 0.5-eps).
    std::vector<double> means = {0.5, 0.5, 0.5 - xi, 0.5 - epsilon};
    Instance base(1, 2, 2, means, noise, {1.0});
    Instance perturbed = base.with_mean(0, 1, 1, 0.5 + epsilon);

    return PairSetup{
        InstancePair{std::move(base), std::move(perturbed), epsilon, xi},
        TaskSpec{PolicyClass::all(), RewardMapping::coordinate(0)},
        TaskSpec{PolicyClass::all(), RewardMapping::coordinate(1)},
    };
}

PairSetup make_robust_pair(double epsilon) {
    require(epsilon > 0.0 && epsilon < 0.25, "robust-pair: epsilon must lie in (0, 0.25)");
    Instance s(1, 2, 1, {1.0, 0.5}, NoiseModel::bernoulli(), {1.0});
    Instance s_bar = s.with_mean(0, 1, 0, 0.5 + epsilon);
    TaskSpec task{PolicyClass::all(), RewardMapping::coordinate(0)};
    return PairSetup{InstancePair{std::move(s), std::move(s_bar), epsilon, 0.0}, task, task};
}

Family parse_family(std::string_view key) {
    if (key == "policy-shift") return Family::PolicyShift;
    if (key == "reward-shift") return Family::RewardShift;
    if (key == "robust-pair") return Family::RobustPair;
    throw ParameterError("unknown instance family '" + std::string(key) + "'");
}

std::string family_key(Family family) {
    switch (family) {
        case Family::PolicyShift: return "policy-shift";
        case Family::RewardShift: return "reward-shift";
        case Family::RobustPair: return "robust-pair";
    }
    return "unknown";
}

PairSetup make_family(const FamilyParams& params) {
    switch (params.family) {
        case Family::PolicyShift: return make_policy_shift_pair(params.epsilon, params.xi, params.noise);
        case Family::RewardShift: return make_reward_shift_pair(params.epsilon, params.xi, params.noise);
        case Family::RobustPair: return make_robust_pair(params.epsilon);
    }
    throw ParameterError("make_family: unknown family");
}

}  // namespace regretlab
