#include "regretlab/offline.hpp"

namespace regretlab {

RewardEstimate iw_estimate(const History& history, const RewardMapping& task2_mapping,
                           std::size_t num_contexts, std::size_t num_actions) {
    if (num_contexts == 0 || num_actions == 0) throw ParameterError("iw_estimate: empty shape");
    const std::size_t cells = num_contexts * num_actions;
    std::vector<double> weighted_reward(cells, 0.0);
    std::vector<double> weight(cells, 0.0);
    RewardEstimate est{num_contexts, num_actions, std::vector<double>(cells, kUnvisitedDefault),
                       std::vector<std::size_t>(cells, 0)};

    const double uniform_prob = 1.0 / static_cast<double>(num_actions);
    for (const Record& r : history.records) {
        if (r.x >= num_contexts || r.a >= num_actions) {
            throw ParameterError("iw_estimate: record outside the declared shape");
        }
        if (!(r.logging_prob > 0.0)) {
            throw ParameterError("iw_estimate: nonpositive logging probability");
        }
        const std::size_t cell = r.x * num_actions + r.a;
        const double w = uniform_prob / r.logging_prob;
        weighted_reward[cell] += w * task2_mapping(r.y);
        weight[cell] += w;
        est.support_count[cell] += 1;
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (est.support_count[cell] > 0) est.r_hat[cell] = weighted_reward[cell] / weight[cell];
    }
    return est;
}

Policy extract_policy(const RewardEstimate& estimate, const PolicyClass& class2) {
    const std::size_t nx = estimate.num_contexts;
    const std::size_t na = estimate.num_actions;
    switch (class2.kind()) {
        case PolicyClass::Kind::All: {
            const MeanTable table = estimate.as_table();
            std::vector<double> probs;
            probs.reserve(nx * na);
            for (std::size_t x = 0; x < nx; ++x) {
                const auto w = uniform_over_argmax(table.row(x));
                probs.insert(probs.end(), w.begin(), w.end());
            }
            return Policy(nx, na, std::move(probs));
        }
        case PolicyClass::Kind::ContextIndependent: {
            std::vector<double> marginal(na, kUnvisitedDefault);
            for (std::size_t a = 0; a < na; ++a) {
                double num = 0.0;
                double den = 0.0;
                for (std::size_t x = 0; x < nx; ++x) {
                    const double n = static_cast<double>(estimate.visits(x, a));
                    num += n * estimate.at(x, a);
                    den += n;
                }
                if (den > 0.0) marginal[a] = num / den;
            }
            return Policy::constant(nx, uniform_over_argmax(marginal));
        }
        case PolicyClass::Kind::SupportRestricted:
            break;
    }
    throw ParameterError("extract_policy: only All and ContextIndependent classes are supported");
}

Policy learn_offline(const History& history, const TaskSpec& task2, std::size_t num_contexts,
                     std::size_t num_actions) {
    return extract_policy(iw_estimate(history, task2.reward_mapping, num_contexts, num_actions),
                          task2.policy_class);
}

}  // namespace regretlab
