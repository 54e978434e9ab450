#include "regretlab/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace regretlab {

namespace {

constexpr double kUnitTol = 1e-9;

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void check_unit(std::span<const double> v, std::size_t dim, const char* what) {
    if (v.size() != dim) throw ParameterError(std::string(what) + ": wrong dimension");
    if (std::abs(norm(v) - 1.0) > kUnitTol) throw ParameterError(std::string(what) + ": not a unit vector");
}

Vec basis_e1(std::size_t dim) {
    Vec e(dim, 0.0);
    e[0] = 1.0;
    return e;
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

NonlinearEnv NonlinearEnv::make(std::size_t dim, double eps, double alpha1, Vec theta2_star,
                                std::vector<Vec> action_grid, double noise_sigma) {
    if (dim < 2) throw ParameterError("NonlinearEnv: dim must be at least 2");
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("NonlinearEnv: eps must lie in (0,1)");
    if (!(alpha1 > 0.0)) throw ParameterError("NonlinearEnv: alpha1 must be positive");
    if (!(noise_sigma >= 0.0)) throw ParameterError("NonlinearEnv: noise_sigma must be nonnegative");
    if (action_grid.empty()) throw ParameterError("NonlinearEnv: empty action grid");

    NonlinearEnv env;
    env.dim = dim;
    env.theta1 = basis_e1(dim);
    check_unit(theta2_star, dim, "NonlinearEnv theta2_star");
    if (!(dot(env.theta1, theta2_star) < 0.0)) {
        throw ParameterError("NonlinearEnv: theta2_star must satisfy <theta1, theta2_star> < 0");
    }
    for (const Vec& a : action_grid) check_unit(a, dim, "NonlinearEnv action");
    env.theta2_star = std::move(theta2_star);
    env.alpha1 = alpha1;
    env.alpha2 = 2.0 * alpha1 / (1.0 - eps);
    env.eps = eps;
    for (const Vec& a : action_grid) {
        if (dot(env.theta1, a) < 0.0) env.param_grid.push_back(a);
    }
    env.action_grid = std::move(action_grid);
    env.noise_sigma = noise_sigma;
    if (env.param_grid.empty()) throw ParameterError("NonlinearEnv: no grid point in the hemisphere");
    return env;
}

double candidate_reward(const NonlinearEnv& env, std::span<const double> theta,
                        std::span<const double> a) {
    return env.alpha1 * dot(env.theta1, a) + env.alpha2 * std::max(dot(theta, a) - env.eps, 0.0);
}

double true_reward(const NonlinearEnv& env, std::span<const double> a) {
    return candidate_reward(env, env.theta2_star, a);
}

ConfidenceSet ls_confidence_set(const NonlinearEnv& env, std::span<const Observation> data,
                                const std::vector<Vec>& param_grid, double beta) {
    ResidualTracker tracker(env, param_grid);
    for (const Observation& o : data) tracker.add(o.a, o.y);
    return tracker.confidence_set(beta);
}

ResidualTracker::ResidualTracker(const NonlinearEnv& env, const std::vector<Vec>& param_grid)
    : env_(&env), grid_(&param_grid), rss_(param_grid.size(), 0.0) {
    if (param_grid.empty()) throw ParameterError("ls_confidence_set: empty parameter grid");
}

void ResidualTracker::add(std::span<const double> a, double y) {
    for (std::size_t j = 0; j < rss_.size(); ++j) {
        const double r = candidate_reward(*env_, (*grid_)[j], a) - y;
        rss_[j] += r * r;
    }
    ++count_;
}

void ResidualTracker::reset() {
    std::fill(rss_.begin(), rss_.end(), 0.0);
    count_ = 0;
}

ConfidenceSet ResidualTracker::confidence_set(double beta) const {
    if (!(beta >= 0.0)) throw ParameterError("ls_confidence_set: beta must be nonnegative");
    const double best = *std::min_element(rss_.begin(), rss_.end());
    ConfidenceSet conf;
    conf.beta = beta;
    for (std::size_t j = 0; j < rss_.size(); ++j) {
        if (rss_[j] <= best + beta) conf.surviving.push_back(j);
    }
    return conf;
}

std::size_t eluder_ucb_step(const NonlinearEnv& env, const std::vector<Vec>& param_grid,
                            const ConfidenceSet& conf, const std::vector<Vec>& allowed, Rng& rng) {
    if (allowed.empty()) throw ParameterError("eluder_ucb_step: empty action set");
    if (conf.surviving.empty()) throw PreconditionError("eluder_ucb_step: empty confidence set");

    std::vector<double> optimistic(allowed.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        for (std::size_t j : conf.surviving) {
            optimistic[i] = std::max(optimistic[i], candidate_reward(env, param_grid[j], allowed[i]));
        }
    }
    const double top = *std::max_element(optimistic.begin(), optimistic.end());
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (optimistic[i] >= top - kTieTol) ties.push_back(i);
    }
    return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
}

HemispherePack eps_pack_hemisphere(std::size_t dim, double eps, Rng& rng,
                                   std::size_t max_rejections) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps_pack_hemisphere: eps must lie in (0,1)");
    HemispherePack pack;
    pack.dim = dim;
    pack.eps = eps;
    const double sep = std::acos(eps) * 180.0 / std::numbers::pi;
    if (dim == 2) {
        const auto n = static_cast<std::size_t>(std::floor(180.0 / sep + 1e-9));
        pack.arc_width_deg = 180.0 / static_cast<double>(n);
        pack.cap_half_angle_deg = std::max(0.0, 0.5 * (pack.arc_width_deg - sep));
        for (std::size_t i = 0; i < n; ++i) {
            pack.centers.push_back(
                unit_at_angle_deg(90.0 + (static_cast<double>(i) + 0.5) * pack.arc_width_deg));
        }
        return pack;
    }
    if (dim != 3) throw ParameterError("eps_pack_hemisphere: dim must be 2 or 3");

    pack.cap_half_angle_deg = sep / 4.0;
    const double center_cos = std::cos((sep + 2.0 * pack.cap_half_angle_deg) * std::numbers::pi / 180.0);
    std::size_t rejections = 0;
    while (rejections < max_rejections) {
        Vec s{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
        const double n = norm(s);
        if (n == 0.0) continue;
        for (double& v : s) v /= n;
        if (s[0] > 0.0) s[0] = -s[0];
        if (!(s[0] < 0.0)) continue;
        const bool close = std::any_of(pack.centers.begin(), pack.centers.end(),
                                       [&](const Vec& c) { return dot(c, s) > center_cos; });
        if (close) {
            ++rejections;
        } else {
            pack.centers.push_back(std::move(s));
            rejections = 0;
        }
    }
    return pack;
}

std::vector<Vec> TaskSequence::allowed(const NonlinearEnv& env, std::size_t task) const {
    std::vector<Vec> actions = regions.at(task);
    actions.push_back(env.theta1);
    return actions;
}

TaskSequence make_task_sequence(const NonlinearEnv& env, const HemispherePack& pack) {
    if (pack.dim != env.dim) throw ParameterError("make_task_sequence: dimension mismatch");
    const std::size_t n = pack.centers.size();
    if (n == 0) throw ParameterError("make_task_sequence: empty pack");

    const double cap_cos = std::cos(pack.cap_half_angle_deg * std::numbers::pi / 180.0) - 1e-12;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    auto region_of = [&](std::span<const double> a) {
        if (!(dot(env.theta1, a) < 0.0)) return kNone;
        for (std::size_t i = 0; i < n; ++i) {
            if (dot(pack.centers[i], a) >= cap_cos) return i;
        }
        return kNone;
    };

    std::vector<std::vector<Vec>> regions(n);
    for (const Vec& a : env.action_grid) {
        if (const std::size_t i = region_of(a); i != kNone) regions[i].push_back(a);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (const Vec& a : regions[i]) {
                for (const Vec& b : regions[j]) {
                    if (dot(a, b) > pack.eps + 1e-12) {
                        throw ParameterError("make_task_sequence: regions " + std::to_string(i) +
                                             " and " + std::to_string(j) + " are not eps-separated");
                    }
                }
            }
        }
    }

    const std::size_t last = region_of(env.theta2_star);
    if (last == kNone) throw ParameterError("make_task_sequence: theta2_star lies in no region");
    TaskSequence seq;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == last || regions[i].empty()) continue;
        seq.regions.push_back(std::move(regions[i]));
        seq.centers.push_back(pack.centers[i]);
    }
    seq.regions.push_back(std::move(regions[last]));
    seq.centers.push_back(pack.centers[last]);
    return seq;
}

double BetaRule::operator()(std::size_t t, std::size_t grid_size) const {
    if (kind == Kind::Constant) return value;
    const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
    return 2.0 * sigma * sigma * std::log(static_cast<double>(grid_size) * tt * tt);
}

std::vector<TaskOutcome> run_task_sequence(const NonlinearEnv& env, const TaskSequence& tasks,
                                           std::size_t t_per_task, const BetaRule& beta_rule,
                                           Rng& rng, bool carry_data, NonlinearAgent agent) {
    if (t_per_task == 0) throw ParameterError("run_task_sequence: t_per_task must be positive");

    const std::vector<Vec> oracle_grid{env.theta2_star};
    const std::vector<Vec>& grid = agent == NonlinearAgent::Oracle ? oracle_grid : env.param_grid;
    ResidualTracker tracker(env, grid);

    std::vector<std::uint64_t> task_seeds(tasks.size());
    for (auto& s : task_seeds) s = rng.next_u64();

    std::vector<TaskOutcome> outcomes;
    outcomes.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        Rng task_rng(task_seeds[i]);
        if (!carry_data) tracker.reset();
        const std::vector<Vec> allowed = tasks.allowed(env, i);

        TaskOutcome out;
        out.optimum = -std::numeric_limits<double>::infinity();
        for (const Vec& a : allowed) out.optimum = std::max(out.optimum, true_reward(env, a));
        out.optimum_is_theta1 = true_reward(env, env.theta1) >= out.optimum - kTieTol;
        out.regret.per_step_regret.reserve(t_per_task);
        out.regret.cumulative.reserve(t_per_task);

        double cumulative = 0.0;
        for (std::size_t t = 0; t < t_per_task; ++t) {
            const double beta = beta_rule(tracker.observations(), grid.size());
            const ConfidenceSet conf = tracker.confidence_set(beta);
            const Vec& a = allowed[eluder_ucb_step(env, grid, conf, allowed, task_rng)];
            const double mean = true_reward(env, a);
            const double y =
                env.noise_sigma > 0.0 ? mean + task_rng.normal(0.0, env.noise_sigma) : mean;
            tracker.add(a, y);

            const double regret = std::max(out.optimum - mean, 0.0);
            if (regret > kTieTol) {
                if (out.regret_events == 0) out.first_pull_regret = regret;
                ++out.regret_events;
            }
            cumulative += regret;
            out.regret.per_step_regret.push_back(regret);
            out.regret.cumulative.push_back(cumulative);
        }
        out.final_set_size =
            tracker.confidence_set(beta_rule(tracker.observations(), grid.size())).surviving.size();
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

Vec unit_at_angle_deg(double deg) {
    const double r = deg * std::numbers::pi / 180.0;
    return {std::cos(r), std::sin(r)};
}

std::vector<Vec> circle_grid(double step_deg) {
    if (!(step_deg > 0.0 && step_deg <= 90.0)) throw ParameterError("circle_grid: bad step");
    const auto n = static_cast<std::size_t>(std::llround(360.0 / step_deg));
    std::vector<Vec> grid;
    grid.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid.push_back(unit_at_angle_deg((static_cast<double>(k) + 0.5) * step_deg));
    }
    return grid;
}

std::vector<Vec> fibonacci_sphere(std::size_t n) {
    if (n < 2) throw ParameterError("fibonacci_sphere: need at least 2 points");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * static_cast<double>(i);
        // The first coordinate is the theta1 axis.
        pts.push_back({z, r * std::cos(phi), r * std::sin(phi)});
    }
    return pts;
}

NonlinearDemo make_nonlinear_demo(const NonlinearDemoConfig& config) {
    Rng rng(config.seed ^ 0x6e6f6e6c696e6561ULL);
    if (config.dim == 2) {
        NonlinearEnv env = NonlinearEnv::make(2, config.eps, config.alpha1, unit_at_angle_deg(255.5),
                                              circle_grid(1.0), config.noise_sigma);
        const HemispherePack pack = eps_pack_hemisphere(2, config.eps, rng);
        TaskSequence tasks = make_task_sequence(env, pack);
        return {std::move(env), std::move(tasks)};
    }
    if (config.dim == 3) {
        std::vector<Vec> grid = fibonacci_sphere(800);
        const HemispherePack pack = eps_pack_hemisphere(3, config.eps, rng);
        if (pack.centers.empty()) throw ParameterError("nonlinear demo: empty pack");
        const Vec& target = pack.centers.front();
        const Vec* star = &grid.front();
        for (const Vec& p : grid) {
            if (dot(p, target) > dot(*star, target)) star = &p;
        }
        Vec theta2_star = *star;
        NonlinearEnv env = NonlinearEnv::make(3, config.eps, config.alpha1, std::move(theta2_star),
                                              std::move(grid), config.noise_sigma);
        TaskSequence tasks = make_task_sequence(env, pack);
        return {std::move(env), std::move(tasks)};
    }
    throw ParameterError("nonlinear demo: dim must be 2 or 3");
}

std::vector<TaskOutcome> run_nonlinear_demo(const NonlinearDemoConfig& config) {
    const NonlinearDemo demo = make_nonlinear_demo(config);
    Rng rng(config.seed);
    return run_task_sequence(demo.env, demo.tasks, config.t_per_task,
                             BetaRule::for_sigma(config.noise_sigma), rng, config.carry_data,
                             config.agent);
}

}  // namespace regretlab
