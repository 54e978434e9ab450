// regretlab: command-line front end for the two-task bandit experiments.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regretlab/experiment.hpp"
#include "regretlab/nonlinear.hpp"
#include "regretlab/robust.hpp"

using namespace regretlab;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double parse_real(const std::string& flag, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw UsageError("--" + flag + ": '" + text + "' is not a number");
    }
    return v;
}

std::uint64_t parse_count(const std::string& flag, const std::string& text) {
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
        try {
            return std::stoull(text);
        } catch (const std::exception&) {
            throw UsageError("--" + flag + ": '" + text + "' is out of range");
        }
    }
    const double v = parse_real(flag, text);
    if (v < 0.0 || v != std::floor(v) || v >= 1.8446744073709552e19) {
        throw UsageError("--" + flag + ": '" + text + "' is not a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_reals(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_real(flag, s));
    if (out.empty()) throw UsageError("--" + flag + ": empty list");
    return out;
}

bool parse_bool(const std::string& flag, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw UsageError("--" + flag + ": '" + text + "' is not a boolean");
}

/// String-valued options for every ExperimentConfig field, applied on top of a
/// config file so that flags win.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void add_to(CLI::App* app, const std::vector<std::string>& keys) {
        app->add_option("--config", config_path, "JSON config file");
        for (const auto& k : keys) app->add_option("--" + k, values[k], k);
    }

    ExperimentConfig resolve(CLI::App* app) const {
        ExperimentConfig c;
        if (!config_path.empty()) c = load_config(config_path, c);
        auto given = [&](const std::string& k) { return app->count("--" + k) > 0; };
        auto val = [&](const std::string& k) -> const std::string& { return values.at(k); };
        for (const auto& [k, v] : values) {
            if (!given(k)) continue;
            if (k == "family") c.family.family = parse_family(v);
            else if (k == "epsilon") c.family.epsilon = parse_real(k, v);
            else if (k == "xi") c.family.xi = parse_real(k, v);
            else if (k == "delta") c.family.delta = parse_real(k, v);
            else if (k == "noise") {
                if (v == "bernoulli") {
                    c.family.noise = NoiseModel::bernoulli();
                } else if (v == "gaussian") {
                    c.family.noise.kind = NoiseKind::Gaussian;
                    if (!(c.family.noise.sigma > 0.0)) c.family.noise.sigma = 0.5;
                } else {
                    throw UsageError("--noise: expected bernoulli or gaussian");
                }
            } else if (k == "member") c.member = parse_member(v);
            else if (k == "learners") c.learners = split(v, ',');
            else if (k == "horizons") {
                c.horizons.clear();
                for (const auto& h : split(v, ',')) c.horizons.push_back(parse_count(k, h));
            } else if (k == "t_prime") c.t_prime = parse_real(k, v);
            else if (k == "replications") c.replications = parse_count(k, v);
            else if (k == "base_seed") c.base_seed = parse_count(k, v);
            else if (k == "output_path") c.output_path = v;
            else if (k == "workers") c.workers = parse_count(k, v);
            else if (k == "record_wall_ms") c.record_wall_ms = parse_bool(k, v);
            else if (k == "alpha_grid") c.alpha_grid = parse_reals(k, v);
        }
        if (given("sigma")) {
            c.family.noise.sigma = parse_real("sigma", val("sigma"));
        }
        if (c.family.noise.kind == NoiseKind::Bernoulli) c.family.noise.sigma = 0.0;
        if (const char* env = std::getenv("REGRETLAB_WORKERS"); env && *env) {
            c.workers = parse_count("REGRETLAB_WORKERS", env);
        }
        c.validate();
        return c;
    }
};

const std::vector<std::string> kFamilyKeys{"family", "epsilon", "xi", "delta", "noise", "sigma"};

std::vector<std::string> with_family(std::vector<std::string> keys) {
    keys.insert(keys.begin(), kFamilyKeys.begin(), kFamilyKeys.end());
    return keys;
}

int cmd_run(CLI::App* app, const ConfigFlags& flags, const std::string& learner,
            const std::string& horizon, const std::string& seed) {
    ExperimentConfig c = flags.resolve(app);
    if (c.member == Member::Both) c.member = Member::Perturbed;
    const RunRow row{c.member, LearnerSpec::parse(learner),
                     static_cast<std::size_t>(parse_count("T", horizon)), 0, parse_count("seed", seed)};
    if (row.horizon == 0) throw UsageError("--T: must be at least 1");
    const RunRecord r = run_two_task(c, row);
    std::cout << "family " << r.family << "\nmember " << r.member << "\nlearner " << r.learner
              << "\nalpha " << g17(r.alpha) << "\nT " << r.horizon << "\nseed " << r.seed
              << "\nCR " << g17(r.cr) << "\nCR/T " << g17(r.cr / static_cast<double>(r.horizon))
              << "\nSR " << g17(r.sr) << "\n";
    if (r.robust_sr) std::cout << "robust_SR " << g17(*r.robust_sr) << "\n";
    if (r.weighted_objective) std::cout << "weighted_objective " << g17(*r.weighted_objective) << "\n";
    return 0;
}

int cmd_sweep(CLI::App* app, const ConfigFlags& flags) {
    const ExperimentConfig c = flags.resolve(app);
    const SweepResult res = run_sweep(c);
    std::cout << "wrote " << res.records.size() << " rows to " << c.output_path << "\n";
    return 0;
}

int cmd_pareto(CLI::App* app, const ConfigFlags& flags) {
    ExperimentConfig c = flags.resolve(app);
    const auto rows = pareto_sweep(c);
    const std::string csv = format_pareto_csv(rows, config_hash(c));
    if (!c.output_path.empty()) write_file_atomic(c.output_path, csv);
    std::cout << csv;
    return 0;
}

std::vector<std::vector<double>> parse_table(const std::string& flag, const std::string& text) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : split(text, ';')) rows.push_back(parse_reals(flag, r));
    if (rows.empty()) throw UsageError("--" + flag + ": empty table");
    for (const auto& r : rows) {
        if (r.size() != rows.front().size()) throw UsageError("--" + flag + ": ragged rows");
    }
    return rows;
}

int cmd_robust_eval(CLI::App* app, const std::string& gap, const std::string& means,
                    const std::string& delta, const std::string& pi, const std::string& step) {
    if (app->count("--gap") == app->count("--means")) {
        throw UsageError("robust-eval: give exactly one of --gap or --means");
    }
    std::vector<std::vector<double>> ref;
    if (app->count("--gap")) {
        ref = {{parse_real("gap", gap), 0.0}};
    } else {
        ref = parse_table("means", means);
    }
    const std::size_t nx = ref.size();
    const std::size_t na = ref.front().size();
    MeanTable table{nx, na, {}};
    for (const auto& r : ref) table.values.insert(table.values.end(), r.begin(), r.end());

    const RobustSpec spec(table, parse_real("delta", delta));
    const double grid_step = app->count("--grid-step") ? parse_real("grid-step", step)
                                                       : kDefaultRobustGridStep;
    const auto [opt, value] = optimal_robust_policy(spec, grid_step);

    std::cout.precision(17);
    if (app->count("--pi")) {
        auto rows = parse_table("pi", pi);
        if (rows.size() == 1 && nx > 1) rows.assign(nx, rows.front());
        if (rows.size() != nx || rows.front().size() != na) {
            throw UsageError("--pi: shape does not match the reference means");
        }
        std::vector<double> probs;
        for (const auto& r : rows) probs.insert(probs.end(), r.begin(), r.end());
        const Policy policy(nx, na, probs);
        std::cout << "worst_case_sr " << g6(worst_case_sr(spec, policy)) << "\n";
        std::cout << "robust_sr " << g6(robust_simple_regret(spec, policy, grid_step)) << "\n";
    }
    std::cout << "optimal_value " << g6(value) << "\noptimal_policy";
    for (std::size_t x = 0; x < nx; ++x) {
        std::cout << (x == 0 ? " " : ";");
        for (std::size_t a = 0; a < na; ++a) std::cout << (a ? "," : "") << g6(opt.prob(x, a));
    }
    std::cout << "\n";
    return 0;
}

int cmd_nonlinear(CLI::App* app, const std::map<std::string, std::string>& v) {
    NonlinearDemoConfig c;
    auto given = [&](const std::string& k) { return app->count("--" + k) > 0; };
    if (given("dim")) c.dim = parse_count("dim", v.at("dim"));
    if (given("eps")) c.eps = parse_real("eps", v.at("eps"));
    if (given("alpha1")) c.alpha1 = parse_real("alpha1", v.at("alpha1"));
    if (given("t_per_task")) c.t_per_task = parse_count("t_per_task", v.at("t_per_task"));
    if (given("sigma")) c.noise_sigma = parse_real("sigma", v.at("sigma"));
    if (given("carry_data")) c.carry_data = parse_bool("carry_data", v.at("carry_data"));
    if (given("seed")) c.seed = parse_count("seed", v.at("seed"));
    if (given("agent")) {
        const auto& a = v.at("agent");
        if (a == "eluder") c.agent = NonlinearAgent::EluderUcb;
        else if (a == "oracle") c.agent = NonlinearAgent::Oracle;
        else throw UsageError("--agent: expected eluder or oracle");
    }
    const auto outcomes = run_nonlinear_demo(c);

    std::string csv = "# " + std::string(kCsvVersion) + " nonlinear-demo\n";
    csv += "task,agent,T_per_task,cumulative_regret,regret_events,first_pull_regret,optimum,optimum_is_theta1\n";
    const char* agent = c.agent == NonlinearAgent::Oracle ? "oracle" : "eluder";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        csv += std::to_string(i + 1) + ',' + agent + ',' + std::to_string(c.t_per_task) + ',' +
               g17(o.regret.total()) + ',' + std::to_string(o.regret_events) + ',' +
               g17(o.first_pull_regret) + ',' + g17(o.optimum) + ',' +
               (o.optimum_is_theta1 ? "1" : "0") + '\n';
    }
    if (given("output_path")) write_file_atomic(v.at("output_path"), csv);
    std::cout << csv;
    return 0;
}

int cmd_regime(const std::string& t, const std::string& tprime, const std::string& nx,
               const std::string& na) {
    const RegimeChoice r = regime_choice(parse_real("t", t), parse_real("tprime", tprime),
                                         parse_count("contexts", nx), parse_count("actions", na));
    std::cout << "alpha " << g6(r.alpha) << "\nRegime " << r.regime << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regretlab: cumulative vs simple regret experiments for two-task contextual bandits"};
    app.require_subcommand(1);

    const std::vector<std::string> sweep_keys =
        with_family({"member", "learners", "horizons", "t_prime", "replications", "base_seed",
                     "output_path", "workers", "record_wall_ms"});

    auto* run = app.add_subcommand("run", "one two-task episode; prints CR and SR");
    ConfigFlags run_flags;
    run_flags.add_to(run, with_family({"member", "t_prime"}));
    std::string run_learner = "ucb", run_T = "1000", run_seed = "1";
    run->add_option("--learner", run_learner, "ucb | uniform | mix:<alpha>");
    run->add_option("--T", run_T, "horizon");
    run->add_option("--seed", run_seed, "RNG seed");

    auto* sweep = app.add_subcommand("sweep", "replicated sweep to CSV");
    ConfigFlags sweep_flags;
    sweep_flags.add_to(sweep, sweep_keys);

    auto* pareto = app.add_subcommand("pareto", "alpha grid sweep with the regime recommendation");
    ConfigFlags pareto_flags;
    auto pareto_keys = sweep_keys;
    pareto_keys.push_back("alpha_grid");
    pareto_flags.add_to(pareto, pareto_keys);

    auto* robust = app.add_subcommand("robust-eval", "worst-case and robust simple regret");
    std::string r_gap, r_means, r_delta = "0.75", r_pi, r_step;
    robust->add_option("--gap", r_gap, "two-arm gap P(a1) - P(a2)");
    robust->add_option("--means", r_means, "reference means, rows ';'-separated, entries ','");
    robust->add_option("--delta", r_delta, "L1 radius");
    robust->add_option("--pi", r_pi, "policy rows in the same layout");
    robust->add_option("--grid-step", r_step, "simplex grid step");

    auto* nonlinear = app.add_subcommand("nonlinear-demo", "eluder-UCB over an eps-packed task sequence");
    std::map<std::string, std::string> nl;
    for (const char* k : {"dim", "eps", "alpha1", "t_per_task", "sigma", "carry_data", "agent", "seed",
                          "output_path"}) {
        nonlinear->add_option(std::string("--") + k, nl[k], k);
    }

    auto* regime = app.add_subcommand("regime", "exploration rate for (T, T', |X|, |A|)");
    std::string g_t, g_tp, g_nx = "2", g_na = "2";
    regime->add_option("--t", g_t, "task-1 horizon T")->required();
    regime->add_option("--tprime", g_tp, "task-2 weight T'")->required();
    regime->add_option("--contexts", g_nx, "|X|");
    regime->add_option("--actions", g_na, "|A|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            if (run->count_all() == 1) {
                std::cerr << run->help();
                return 2;
            }
            return cmd_run(run, run_flags, run_learner, run_T, run_seed);
        }
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_flags);
        if (pareto->parsed()) return cmd_pareto(pareto, pareto_flags);
        if (robust->parsed()) return cmd_robust_eval(robust, r_gap, r_means, r_delta, r_pi, r_step);
        if (nonlinear->parsed()) return cmd_nonlinear(nonlinear, nl);
        if (regime->parsed()) return cmd_regime(g_t, g_tp, g_nx, g_na);
    } catch (const UsageError& e) {
        std::cerr << "regretlab: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "regretlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "regretlab: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
