#pragma once

// Nonlinear reward class R_theta(a) = alpha1 <theta1, a> + alpha2 (<theta, a> - eps)^+
// on the unit sphere, with only theta unknown. Optimistic least-squares
// confidence sets over a finite parameter grid, an eps-pack of the hemisphere
// {<theta1, a> < 0} into task regions, and the task-sequence runner.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regretlab/core.hpp"
#include "regretlab/online.hpp"

namespace regretlab {

using Vec = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);

struct NonlinearEnv {
    std::size_t dim = 2;
    Vec theta1;
    Vec theta2_star;
    double alpha1 = 1.0;
    double alpha2 = 0.0;
    double eps = 0.5;
    std::vector<Vec> action_grid;
    /// Candidate parameters: the grid points with <theta1, theta> < 0.
    std::vector<Vec> param_grid;
    double noise_sigma = 0.0;

    /// Validates unit norms and <theta1, theta2*> < 0; sets alpha2 = 2 alpha1 / (1 - eps).
    static NonlinearEnv make(std::size_t dim, double eps, double alpha1, Vec theta2_star,
                             std::vector<Vec> action_grid, double noise_sigma);
};

double candidate_reward(const NonlinearEnv& env, std::span<const double> theta,
                        std::span<const double> a);
double true_reward(const NonlinearEnv& env, std::span<const double> a);

struct Observation {
    Vec a;
    double y = 0.0;
};

struct ConfidenceSet {
    std::vector<std::size_t> surviving;  // indices into the parameter grid
    double beta = 0.0;
};

/// Keeps the candidates whose residual sum of squares is within beta of the
/// least-squares minimum. Throws ParameterError on an empty grid.
ConfidenceSet ls_confidence_set(const NonlinearEnv& env, std::span<const Observation> data,
                                const std::vector<Vec>& param_grid, double beta);

/// Running residual sums for every candidate, updated one observation at a time.
class ResidualTracker {
public:
    ResidualTracker(const NonlinearEnv& env, const std::vector<Vec>& param_grid);

    void add(std::span<const double> a, double y);
    void reset();
    ConfidenceSet confidence_set(double beta) const;
    std::size_t observations() const { return count_; }
    std::span<const double> rss() const { return rss_; }

private:
    const NonlinearEnv* env_;
    const std::vector<Vec>* grid_;
    std::vector<double> rss_;
    std::size_t count_ = 0;
};

/// Index into `allowed` of argmax_a max_{theta in conf} R_theta(a); uniform over
/// ties. The rng is drawn only when the tie set has more than one element.
std::size_t eluder_ucb_step(const NonlinearEnv& env, const std::vector<Vec>& param_grid,
                            const ConfidenceSet& conf, const std::vector<Vec>& allowed, Rng& rng);

/// An eps-pack of {<theta1, a> < 0}: caps of `cap_half_angle_deg` around the
/// centers, sized so that members of different caps have inner product at most eps.
struct HemispherePack {
    std::size_t dim = 2;
    double eps = 0.5;
    std::vector<Vec> centers;
    double arc_width_deg = 0.0;  // d = 2 only
    double cap_half_angle_deg = 0.0;
};

/// d = 2: N = floor(180 / arccos(eps)) centers at the midpoints of equal arcs of
/// (90, 270) degrees; caps of half-width (arc - arccos(eps)) / 2.
/// d = 3: greedy random centers at least arccos(eps) + 2 h apart with h = arccos(eps) / 4,
/// stopping after `max_rejections` consecutive rejects.
HemispherePack eps_pack_hemisphere(std::size_t dim, double eps, Rng& rng,
                                   std::size_t max_rejections = 2000);

struct TaskSequence {
    /// Grid actions of each region, in task order. Task i may play regions[i] and theta1.
    std::vector<std::vector<Vec>> regions;
    std::vector<Vec> centers;

    std::size_t size() const { return regions.size(); }
    std::vector<Vec> allowed(const NonlinearEnv& env, std::size_t task) const;
};

/// Gathers the hemisphere grid actions inside each cap, drops empty caps, and
/// orders the tasks so the region holding theta2* is last. Throws ParameterError
/// if theta2* lies in no cap or two regions are not eps-separated.
TaskSequence make_task_sequence(const NonlinearEnv& env, const HemispherePack& pack);

struct BetaRule {
    enum class Kind { Constant, Noisy };
    Kind kind = Kind::Constant;
    double value = 1e-9;
    double sigma = 0.0;

    static BetaRule noiseless(double slack = 1e-9) { return {Kind::Constant, slack, 0.0}; }
    /// beta_t = 2 sigma^2 ln(grid_size * t^2).
    static BetaRule noisy(double sigma) { return {Kind::Noisy, 0.0, sigma}; }
    static BetaRule for_sigma(double sigma) { return sigma > 0.0 ? noisy(sigma) : noiseless(); }

    double operator()(std::size_t t, std::size_t grid_size) const;
};

enum class NonlinearAgent { EluderUcb, Oracle };

struct TaskOutcome {
    RegretTrajectory regret;
    double optimum = 0.0;
    bool optimum_is_theta1 = true;
    std::size_t regret_events = 0;     // steps with positive regret
    double first_pull_regret = 0.0;    // regret of the first such step
    std::size_t final_set_size = 0;
};

/// Runs the tasks in order. With carry_data the confidence set keeps every
/// observation from earlier tasks; otherwise it restarts at each task. The
/// oracle agent's confidence set is the single candidate theta2*.
std::vector<TaskOutcome> run_task_sequence(const NonlinearEnv& env, const TaskSequence& tasks,
                                           std::size_t t_per_task, const BetaRule& beta_rule,
                                           Rng& rng, bool carry_data,
                                           NonlinearAgent agent = NonlinearAgent::EluderUcb);

/// Unit vectors at angles (k + 0.5) * step_deg, k = 0 .. 360 / step_deg - 1.
std::vector<Vec> circle_grid(double step_deg = 1.0);
/// Fibonacci lattice of n points on S^2.
std::vector<Vec> fibonacci_sphere(std::size_t n);
Vec unit_at_angle_deg(double deg);

struct NonlinearDemoConfig {
    std::size_t dim = 2;
    double eps = 0.898794046299167;  // cos 26 degrees: six 30-degree arcs, 4-degree caps
    double alpha1 = 1.0;
    std::size_t t_per_task = 2000;
    double noise_sigma = 0.0;
    bool carry_data = true;
    std::uint64_t seed = 1;
    NonlinearAgent agent = NonlinearAgent::EluderUcb;
};

struct NonlinearDemo {
    NonlinearEnv env;
    TaskSequence tasks;
};

/// d = 2: 1-degree grid, theta2* at 255.5 degrees. d = 3: 800-point Fibonacci grid,
/// theta2* the grid point nearest the first center.
NonlinearDemo make_nonlinear_demo(const NonlinearDemoConfig& config);

std::vector<TaskOutcome> run_nonlinear_demo(const NonlinearDemoConfig& config);

}  // namespace regretlab
