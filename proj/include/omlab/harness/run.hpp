#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omlab/harness/config.hpp"
#include "omlab/rl/evaluate.hpp"

namespace omlab::harness {

// One evaluation round against one pool; a line of the metrics JSONL.
struct MetricsRow {
    long long episode = 0;  // training episodes completed when evaluated
    long long step = 0;     // env steps completed
    std::string pool;       // "train" (weak generalization) or "test" (strong)
    double mean_return = 0.0;
    std::map<int, double> per_opponent;
    long opp_reads = 0;  // privileged accesses during this evaluation
    std::map<std::string, double> losses;  // latest training-loss components
};

void append_metrics_row(const std::string& path, const MetricsRow& row);
std::vector<MetricsRow> read_metrics_jsonl(const std::string& path);

// Everything one (config, seed) run leaves behind. Records are append-only:
// a re-run goes to a fresh out_dir or resumes the old one, never rewrites it.
struct RunRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // empty when ok
    std::string metrics_path;
    std::string checkpoint_path;
    long long episodes = 0;         // training episodes completed
    long hygiene_violations = 0;    // out-of-pool ids seen across all evals
    double wall_seconds = 0.0;
    std::vector<MetricsRow> metrics;
};

struct RunOptions {
    std::string out_dir;  // seed_<n>/ subdirectories are created inside
    bool resume = false;  // continue from the last checkpoint if one exists
};

// Pool-hygiene audit, applied to every evaluation result: the number of
// opponent ids in the result that the requested pool does not contain.
long audit_eval(const rl::EvalResult& result, const envs::Pool& requested);

// Encoder shapes for the opponent-side OM-VAE of an omddpg-family config,
// with the obs/action widths probed from the environment.
vae::TrajectoryEncoder::Config opponent_encoder_config(const ExperimentConfig& cfg);

// Rebuilds the policy from a run checkpoint and evaluates it greedily against
// the chosen pool ("train" or "test"), cfg.eval_episodes episodes split over
// the pool. The checkpoint must match the config's hash and the seed.
rl::EvalResult evaluate_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::string& checkpoint_path,
                                   const std::string& pool_choice, core::Rng& rng);

// Rebuilds just the trajectory encoder a checkpoint carries: the self-side
// encoder for sma2c kinds, the opponent-side one for omddpg and om_vae kinds.
vae::TrajectoryEncoder encoder_from_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed,
                                               const std::string& checkpoint_path);

// Trains one seed to the episode budget, evaluating against both pools every
// eval_every episodes (weak = train pool, strong = test pool), checkpointing
// at each evaluation point. Throws on failure; run() catches per seed.
RunRecord run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt);

// All seeds in config order. A failed seed yields ok = false with the error
// message and never aborts its siblings.
std::vector<RunRecord> run(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace omlab::harness
