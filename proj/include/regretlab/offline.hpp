#pragma once

// Task-2 offline learning from logged task-1 data: a self-normalized
// importance-weight estimate of every cell, then argmax policy extraction.

#include <cstddef>
#include <vector>

#include "regretlab/core.hpp"
#include "regretlab/online.hpp"

namespace regretlab {

/// Value reported for cells the history never visited.
inline constexpr double kUnvisitedDefault = 0.5;

struct RewardEstimate {
    std::size_t num_contexts = 0;
    std::size_t num_actions = 0;
    std::vector<double> r_hat;                // [x][a]
    std::vector<std::size_t> support_count;   // [x][a]

    double at(std::size_t x, std::size_t a) const { return r_hat[x * num_actions + a]; }
    std::size_t visits(std::size_t x, std::size_t a) const {
        return support_count[x * num_actions + a];
    }
    MeanTable as_table() const { return MeanTable{num_contexts, num_actions, r_hat}; }
};

/// R_hat(x,a) = sum w_t f(Y_t) / sum w_t over visits of (x,a), with
/// w_t = (1/|A|) / logging_prob_t.
RewardEstimate iw_estimate(const History& history, const RewardMapping& task2_mapping,
                           std::size_t num_contexts, std::size_t num_actions);

/// All: per-context uniform over argmax R_hat(x,.). ContextIndependent: uniform
/// over argmax of the visit-weighted context average of R_hat.
Policy extract_policy(const RewardEstimate& estimate, const PolicyClass& class2);

Policy learn_offline(const History& history, const TaskSpec& task2, std::size_t num_contexts,
                     std::size_t num_actions);

}  // namespace regretlab
