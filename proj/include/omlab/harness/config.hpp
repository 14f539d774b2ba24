#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "omlab/envs/pool.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::harness {

// The five trainable variants: the two methods plus their ablations. The
// ablations are full configs of their own so a results table can treat them
// as peers of the parent method.
enum class Method {
    kOmddpg,          // DDPG on [obs | z], opponent-side encoder, lambda > 0
    kSma2c,           // joint A2C + self-VAE, full (o, a, r, d) encoder input
    kOmddpgNoDisc,    // lambda = 0: ELBO-only opponent encoder
    kSma2cObsAction,  // encoder input ablation: drop (r, d)
    kSma2cObsOnly,    // encoder input ablation: observations alone
};

std::string method_name(Method m);
Method parse_method(const std::string& name);  // ConfigError on unknown names
bool method_is_sma2c(Method m);
vae::EncoderInputs method_inputs(Method m);  // sma2c family only

// OM-VAE pretraining stage (OMDDPG only; SMA2C trains its VAE jointly).
struct VaeSection {
    int dataset_episodes = 200;  // per training opponent, random behavior policy
    int epochs = 50;
    int batch_size = 16;
    double lr = 3e-4;
    double grad_clip = 0.5;
    double beta = 0.01;        // KL weight
    double lambda_disc = 1.0;  // discrimination weight; 0 under omddpg_no_disc
    int z_dim = 8;
    int hidden = 64;  // encoder GRU width
};

struct Sma2cSection {
    int n_envs = 8;
    double lr = 3e-4;
    double grad_clip = 0.5;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    double c_vae = 1.0;  // weight of the VAE term in the joint loss
    double beta = 0.01;
    int z_dim = 8;
    int hidden = 64;
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
};

struct DdpgSection {
    double gamma = 0.99;
    double gumbel_tau = 1.0;
    double rho = 0.01;
    double lr = 3e-4;
    int batch_size = 128;
    long long buffer_capacity = 100000;
    int warmup_steps = 1000;
    int update_every = 4;
    double eps_start = 0.3;
    double eps_end = 0.05;
    int eps_anneal_steps = 20000;
    double grad_clip = 0.5;
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
};

// One experiment: a method, an environment (which fixes the opponent pools),
// seeds, a training budget, and every hyperparameter either method needs.
// Files override the built-in defaults key by key; unknown keys are errors.
struct ExperimentConfig {
    Method method = Method::kSma2c;
    std::string env = "matrix_toy";  // matrix_toy | matrix_full | speaker_listener
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    long long budget_episodes = 50000;  // training episodes per seed
    int eval_every = 1000;              // episodes between evaluation rounds
    int eval_episodes = 100;            // episodes per pool per round
    VaeSection vae;
    Sma2cSection sma2c;
    DdpgSection ddpg;
};

// Every default in one place. The env argument picks the matching training
// budget: 50k episodes for the matrix games, 200k for speaker-listener.
ExperimentConfig default_config(const std::string& env = "matrix_toy");

// Fully resolved config -> JSON (round-trips through config_from_json).
nlohmann::json to_json(const ExperimentConfig& cfg);
// Merge a (possibly partial) JSON object over the built-in defaults. Unknown
// keys at any level throw ConfigError; so do wrong JSON types.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Invariants: known env, opponent ids constructible, disjoint train/test pools
// wherever the env holds opponents out, method/lambda consistency, and a value
// in range for every hyperparameter. Throws ConfigError.
void validate(const ExperimentConfig& cfg);

// Stable 64-bit digest (hex) of every result-affecting hyperparameter.
// Seeds (they name the run, and records carry (hash, seed) pairs) and the
// episode budget (a stopping time: resuming past it replays the same stream)
// are excluded. Changing any other default changes the hash.
std::string config_hash(const ExperimentConfig& cfg);

envs::PoolPair pools_for(const ExperimentConfig& cfg);
envs::EnvFactory env_factory(const ExperimentConfig& cfg);

}  // namespace omlab::harness
