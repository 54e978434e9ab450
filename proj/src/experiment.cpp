#include "regretlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "regretlab/offline.hpp"
#include "regretlab/robust.hpp"

namespace regretlab {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string noise_key(const NoiseModel& noise) {
    return noise.kind == NoiseKind::Bernoulli ? "bernoulli" : "gaussian";
}

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ParameterError(std::string("config: field '") + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& j, const char* key) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::size_t>(v);
    }
    throw ParameterError(std::string("config: field '") + key + "' must be a nonnegative integer");
}

}  // namespace

Member parse_member(std::string_view key) {
    if (key == "base") return Member::Base;
    if (key == "perturbed") return Member::Perturbed;
    if (key == "both") return Member::Both;
    throw ParameterError("unknown member '" + std::string(key) + "' (base|perturbed|both)");
}

std::string member_key(Member member) {
    switch (member) {
        case Member::Base: return "base";
        case Member::Perturbed: return "perturbed";
        case Member::Both: return "both";
    }
    return "both";
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw ParameterError("config: replications must be at least 1");
    if (horizons.empty()) throw ParameterError("config: horizons must be nonempty");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 1) throw ParameterError("config: horizons must be positive");
        if (i > 0 && horizons[i] <= horizons[i - 1]) {
            throw ParameterError("config: horizons must be strictly ascending");
        }
    }
    if (learners.empty()) throw ParameterError("config: learners must be nonempty");
    for (const auto& key : learners) LearnerSpec::parse(key);
    if (t_prime && !(*t_prime >= 1.0)) throw ParameterError("config: t_prime must be at least 1");
    for (double a : alpha_grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("config: alpha_grid entries must lie in [0,1]");
    }
    // Range checks of the family parameters live in the constructors.
    make_family(family);
}

ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& defaults) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParameterError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParameterError("config: top level must be a JSON object");

    ExperimentConfig c = defaults;
    for (const auto& [key, v] : j.items()) {
        if (key == "family") {
            c.family.family = parse_family(get_as<std::string>(v, "family"));
        } else if (key == "epsilon") {
            c.family.epsilon = get_as<double>(v, "epsilon");
        } else if (key == "xi") {
            c.family.xi = get_as<double>(v, "xi");
        } else if (key == "delta") {
            c.family.delta = get_as<double>(v, "delta");
        } else if (key == "noise") {
            const auto n = get_as<std::string>(v, "noise");
            if (n == "bernoulli") {
                c.family.noise.kind = NoiseKind::Bernoulli;
            } else if (n == "gaussian") {
                c.family.noise.kind = NoiseKind::Gaussian;
                if (!(c.family.noise.sigma > 0.0)) c.family.noise.sigma = 0.5;
            } else {
                throw ParameterError("config: noise must be 'bernoulli' or 'gaussian'");
            }
        } else if (key == "sigma") {
            c.family.noise.sigma = get_as<double>(v, "sigma");
        } else if (key == "member") {
            c.member = parse_member(get_as<std::string>(v, "member"));
        } else if (key == "learners") {
            c.learners = get_as<std::vector<std::string>>(v, "learners");
        } else if (key == "horizons") {
            if (!v.is_array()) throw ParameterError("config: field 'horizons' must be an array");
            c.horizons.clear();
            for (const auto& h : v) c.horizons.push_back(get_count(h, "horizons"));
        } else if (key == "t_prime") {
            if (v.is_null()) {
                c.t_prime.reset();
            } else {
                c.t_prime = get_as<double>(v, "t_prime");
            }
        } else if (key == "replications") {
            c.replications = get_count(v, "replications");
        } else if (key == "base_seed") {
            c.base_seed = get_count(v, "base_seed");
        } else if (key == "output_path") {
            c.output_path = get_as<std::string>(v, "output_path");
        } else if (key == "workers") {
            c.workers = get_count(v, "workers");
        } else if (key == "record_wall_ms") {
            c.record_wall_ms = get_as<bool>(v, "record_wall_ms");
        } else if (key == "alpha_grid") {
            c.alpha_grid = get_as<std::vector<double>>(v, "alpha_grid");
        } else {
            throw ParameterError("config: unknown field '" + key + "'");
        }
    }
    if (c.family.noise.kind == NoiseKind::Bernoulli) c.family.noise.sigma = 0.0;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), defaults);
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["family"] = family_key(c.family.family);
    j["epsilon"] = c.family.epsilon;
    j["xi"] = c.family.xi;
    j["delta"] = c.family.delta;
    j["noise"] = noise_key(c.family.noise);
    j["sigma"] = c.family.noise.kind == NoiseKind::Gaussian ? c.family.noise.sigma : 0.0;
    j["member"] = member_key(c.member);
    j["learners"] = c.learners;
    j["horizons"] = c.horizons;
    j["t_prime"] = c.t_prime ? json(*c.t_prime) : json(nullptr);
    j["replications"] = c.replications;
    j["base_seed"] = c.base_seed;
    j["record_wall_ms"] = c.record_wall_ms;
    j["alpha_grid"] = c.alpha_grid;
    return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(config))));
    return buf;
}

std::uint64_t row_seed(std::uint64_t base_seed, Family family, Member member,
                       std::string_view learner_key, std::size_t horizon, std::size_t replication) {
    const std::string coords = family_key(family) + "|" + member_key(member) + "|" +
                               std::string(learner_key) + "|" + std::to_string(horizon) + "|" +
                               std::to_string(replication);
    return splitmix64(base_seed ^ fnv1a64(coords));
}

std::vector<RunRow> expand_rows(const ExperimentConfig& config) {
    std::vector<Member> members;
    if (config.member == Member::Both) {
        members = {Member::Base, Member::Perturbed};
    } else {
        members = {config.member};
    }
    std::vector<RunRow> rows;
    rows.reserve(members.size() * config.learners.size() * config.horizons.size() *
                 config.replications);
    for (Member m : members) {
        for (const auto& key : config.learners) {
            const LearnerSpec spec = LearnerSpec::parse(key);
            for (std::size_t T : config.horizons) {
                for (std::size_t r = 0; r < config.replications; ++r) {
                    rows.push_back({m, spec, T, r,
                                    row_seed(config.base_seed, config.family.family, m, spec.key(), T, r)});
                }
            }
        }
    }
    return rows;
}

RunRecord run_two_task(const ExperimentConfig& config, const RunRow& row) {
    if (row.member == Member::Both) throw ParameterError("run_two_task: row member must be base or perturbed");
    const auto start = std::chrono::steady_clock::now();

    const PairSetup setup = make_family(config.family);
    const Instance& instance = row.member == Member::Base ? setup.pair.base : setup.pair.perturbed;
    Rng rng(row.seed);
    auto learner = row.learner.make(setup.task1);

    RunRecord rec;
    rec.family = family_key(config.family.family);
    rec.member = member_key(row.member);
    rec.learner = row.learner.key();
    rec.alpha = row.learner.effective_alpha();
    rec.horizon = row.horizon;
    rec.seed = row.seed;

    if (config.family.family == Family::RobustPair) {
        RobustRun run = run_robust_pipeline(instance, setup.task1, *learner, row.horizon,
                                            config.family.delta, rng);
        rec.cr = run.online.regret.total();
        rec.sr = simple_regret(instance, setup.task2, run.robust_policy);
        rec.robust_sr = run.robust_sr;
    } else {
        const OnlineRun run = run_online(instance, setup.task1, *learner, row.horizon, rng);
        const Policy policy = learn_offline(run.history, setup.task2, instance.num_contexts(),
                                            instance.num_actions());
        rec.cr = run.regret.total();
        rec.sr = simple_regret(instance, setup.task2, policy);
    }
    if (config.t_prime) rec.weighted_objective = rec.cr + *config.t_prime * rec.sr;
    if (config.record_wall_ms) {
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    }
    return rec;
}

std::size_t default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::vector<RunRecord> run_rows(const ExperimentConfig& config, const std::vector<RunRow>& rows,
                                std::size_t workers) {
    if (workers == 0) workers = default_workers();
    workers = std::max<std::size_t>(1, std::min(workers, rows.size()));

    std::vector<RunRecord> out(rows.size());
    std::vector<std::string> errors(rows.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size() || failed.load()) return;
            try {
                out[i] = run_two_task(config, rows[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
                failed.store(true);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!errors[i].empty()) {
            const RunRow& r = rows[i];
            throw std::runtime_error("row failed (family=" + family_key(config.family.family) +
                                     " member=" + member_key(r.member) + " learner=" +
                                     r.learner.key() + " T=" + std::to_string(r.horizon) +
                                     " rep=" + std::to_string(r.replication) + "): " + errors[i]);
        }
    }
    return out;
}

std::string format_csv(const std::vector<RunRecord>& records, const std::string& hash) {
    std::string s;
    s.reserve(128 * (records.size() + 2));
    s += "# ";
    s += kCsvVersion;
    s += " config_hash=" + hash + "\n";
    s += kCsvHeader;
    s += '\n';
    for (const RunRecord& r : records) {
        s += r.family + ',' + r.member + ',' + r.learner + ',' + fmt_double(r.alpha) + ',' +
             std::to_string(r.horizon) + ',' + std::to_string(r.seed) + ',' + fmt_double(r.cr) +
             ',' + fmt_double(r.sr) + ',' + (r.robust_sr ? fmt_double(*r.robust_sr) : "") + ',' +
             (r.weighted_objective ? fmt_double(*r.weighted_objective) : "") + ',' +
             std::to_string(r.wall_ms) + '\n';
    }
    return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
            f.write(content.data(), static_cast<std::streamsize>(content.size()));
            f.flush();
            if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();
    SweepResult result;
    result.records = run_rows(config, expand_rows(config), config.workers);
    result.csv = format_csv(result.records, config_hash(config));
    if (!config.output_path.empty()) write_file_atomic(config.output_path, result.csv);
    return result;
}

RegimeChoice regime_choice(double horizon, double t_prime, std::size_t num_contexts,
                           std::size_t num_actions) {
    if (!(horizon >= 1.0) || !(t_prime >= 1.0)) {
        throw ParameterError("regime_alpha: T and T' must be at least 1");
    }
    const double lower = std::pow(t_prime, 2.0 / 3.0);
    const double upper = std::pow(t_prime, 4.0 / 3.0);
    RegimeChoice c;
    if (horizon >= upper) {
        c = {3, 0.0};
    } else if (horizon > lower) {
        c = {2, lower / horizon};
    } else {
        c = {1, 1.0};
    }
    if (c.alpha > 0.0) {
        const double floor = static_cast<double>(num_contexts * num_actions) / std::sqrt(horizon);
        c.alpha = std::clamp(std::max(c.alpha, floor), 0.0, 1.0);
    }
    return c;
}

double regime_alpha(double horizon, double t_prime, std::size_t num_contexts,
                    std::size_t num_actions) {
    return regime_choice(horizon, t_prime, num_contexts, num_actions).alpha;
}

std::vector<ParetoRow> pareto_sweep(const ExperimentConfig& config) {
    config.validate();
    if (!config.t_prime) throw ParameterError("pareto: t_prime is required");
    const double tp = *config.t_prime;
    const PairSetup setup = make_family(config.family);
    const std::size_t nx = setup.pair.base.num_contexts();
    const std::size_t na = setup.pair.base.num_actions();

    struct Cell {
        double alpha;
        std::size_t horizon;
        bool recommended;
    };
    std::vector<Cell> cells;
    for (std::size_t T : config.horizons) {
        const double rec = regime_alpha(static_cast<double>(T), tp, nx, na);
        bool marked = false;
        for (double a : config.alpha_grid) {
            const bool hit = std::abs(a - rec) <= kExactTol;
            cells.push_back({a, T, hit && !marked});
            marked = marked || hit;
        }
        if (!marked) cells.push_back({rec, T, true});
    }

    std::vector<Member> members;
    if (config.member == Member::Both) {
        members = {Member::Base, Member::Perturbed};
    } else {
        members = {config.member};
    }

    std::vector<RunRow> rows;
    for (const Cell& c : cells) {
        const LearnerSpec spec{LearnerSpec::Kind::Mixture, c.alpha};
        for (Member m : members) {
            for (std::size_t r = 0; r < config.replications; ++r) {
                rows.push_back({m, spec, c.horizon, r,
                                row_seed(config.base_seed, config.family.family, m, spec.key(),
                                         c.horizon, r)});
            }
        }
    }
    const std::vector<RunRecord> records = run_rows(config, rows, config.workers);

    std::vector<ParetoRow> out;
    const double reps = static_cast<double>(config.replications);
    std::size_t k = 0;
    for (const Cell& c : cells) {
        ParetoRow best;
        bool have = false;
        for (Member m : members) {
            double cr = 0.0;
            double sr = 0.0;
            for (std::size_t r = 0; r < config.replications; ++r, ++k) {
                cr += records[k].cr;
                sr += records[k].sr;
            }
            ParetoRow row;
            row.alpha = c.alpha;
            row.horizon = c.horizon;
            row.t_prime = tp;
            row.member = member_key(m);
            row.mean_cr = cr / reps;
            row.mean_sr = sr / reps;
            row.weighted_objective = row.mean_cr + tp * row.mean_sr;
            row.sr_sqrt_cr = row.mean_sr * std::sqrt(row.mean_cr);
            row.recommended = c.recommended;
            if (!have || row.weighted_objective > best.weighted_objective) best = row;
            have = true;
        }
        out.push_back(best);
    }
    return out;
}

std::string format_pareto_csv(const std::vector<ParetoRow>& rows, const std::string& hash) {
    std::string s = "# " + std::string(kCsvVersion) + " config_hash=" + hash + "\n";
    s += kParetoHeader;
    s += '\n';
    for (const ParetoRow& r : rows) {
        s += fmt_double(r.alpha) + ',' + std::to_string(r.horizon) + ',' + fmt_double(r.t_prime) +
             ',' + r.member + ',' + fmt_double(r.mean_cr) + ',' + fmt_double(r.mean_sr) + ',' +
             fmt_double(r.weighted_objective) + ',' + fmt_double(r.sr_sqrt_cr) + ',' +
             (r.recommended ? "1" : "0") + '\n';
    }
    return s;
}

}  // namespace regretlab
