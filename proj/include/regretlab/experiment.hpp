#pragma once

// Seeded replication sweeps over (member, learner, horizon, replication),
// the weighted objective CR + T' SR, the regime-based exploration rate, and
// versioned CSV output.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regretlab/instances.hpp"
#include "regretlab/online.hpp"

namespace regretlab {

enum class Member { Base, Perturbed, Both };

Member parse_member(std::string_view key);
std::string member_key(Member member);

inline constexpr std::string_view kCsvHeader =
    "family,member,learner,alpha,T,seed,CR,SR,robust_SR,weighted_objective,wall_ms";
inline constexpr std::string_view kParetoHeader =
    "alpha,T,t_prime,member,mean_CR,mean_SR,weighted_objective,sr_sqrt_cr,recommended";
inline constexpr std::string_view kCsvVersion = "regretlab-csv v1";

struct ExperimentConfig {
    FamilyParams family;
    Member member = Member::Both;
    std::vector<std::string> learners{"ucb", "mix:0.1"};
    std::vector<std::size_t> horizons{500, 1000, 2000, 5000, 10000, 20000};
    std::optional<double> t_prime;
    std::size_t replications = 200;
    std::uint64_t base_seed = 1;
    std::string output_path = "regretlab.csv";
    /// 0 means one worker per hardware thread.
    std::size_t workers = 0;
    /// When false, wall_ms is written as 0 so whole files compare byte for byte.
    bool record_wall_ms = true;
    std::vector<double> alpha_grid{0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};

    /// Throws ParameterError naming the offending field.
    void validate() const;
};

/// Parses a JSON object whose keys are the ExperimentConfig field names, on top
/// of `defaults`. Unknown keys are rejected.
ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& defaults = {});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults = {});
/// Canonical JSON of every field that affects results (not output_path or workers).
std::string config_to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct RunRow {
    Member member = Member::Base;  // Base or Perturbed
    LearnerSpec learner;
    std::size_t horizon = 1;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
};

struct RunRecord {
    std::string family;
    std::string member;
    std::string learner;
    double alpha = 0.0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    double cr = 0.0;
    double sr = 0.0;
    std::optional<double> robust_sr;
    std::optional<double> weighted_objective;
    std::int64_t wall_ms = 0;
};

std::uint64_t row_seed(std::uint64_t base_seed, Family family, Member member,
                       std::string_view learner_key, std::size_t horizon, std::size_t replication);

/// Cross product in the order member, learner, horizon, replication.
std::vector<RunRow> expand_rows(const ExperimentConfig& config);

/// One two-task episode: task-1 online run, then the offline task-2 policy.
/// The robust-pair family reports the plug-in robust policy's nominal SR and robust_SR.
RunRecord run_two_task(const ExperimentConfig& config, const RunRow& row);

/// Runs rows on `workers` threads; results keep the input order. A failing row
/// rethrows with its coordinates after all workers stop.
std::vector<RunRecord> run_rows(const ExperimentConfig& config, const std::vector<RunRow>& rows,
                                std::size_t workers);

std::string format_csv(const std::vector<RunRecord>& records, const std::string& hash);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

struct SweepResult {
    std::vector<RunRecord> records;
    std::string csv;
};

/// Runs every row of the config and writes the CSV to config.output_path
/// (skipped when the path is empty).
SweepResult run_sweep(const ExperimentConfig& config);

struct RegimeChoice {
    int regime = 1;
    double alpha = 1.0;
};

/// Regime 1 (T <= T'^{2/3}): alpha = 1. Regime 2: alpha = T'^{2/3} / T.
/// Regime 3 (T >= T'^{4/3}): alpha = 0. Positive alpha is floored at |X||A|/sqrt(T).
RegimeChoice regime_choice(double horizon, double t_prime, std::size_t num_contexts,
                           std::size_t num_actions);
double regime_alpha(double horizon, double t_prime, std::size_t num_contexts,
                    std::size_t num_actions);

struct ParetoRow {
    double alpha = 0.0;
    std::size_t horizon = 0;
    double t_prime = 0.0;
    std::string member;
    double mean_cr = 0.0;
    double mean_sr = 0.0;
    double weighted_objective = 0.0;
    double sr_sqrt_cr = 0.0;
    bool recommended = false;
};

/// For each horizon and each alpha in config.alpha_grid (plus the regime
/// recommendation) runs mix:<alpha> learners. With Member::Both the row
/// reports the member with the larger weighted objective.
std::vector<ParetoRow> pareto_sweep(const ExperimentConfig& config);
std::string format_pareto_csv(const std::vector<ParetoRow>& rows, const std::string& hash);

std::size_t default_workers();

}  // namespace regretlab
