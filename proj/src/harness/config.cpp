#include "omlab/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "omlab/core/error.hpp"
#include "omlab/envs/matrix_game.hpp"
#include "omlab/envs/speaker_listener.hpp"

namespace omlab::harness {

namespace {

using nlohmann::json;

constexpr const char* kMethodNames[] = {"omddpg", "sma2c", "omddpg_no_disc", "sma2c_obs_action",
                                        "sma2c_obs_only"};
constexpr Method kMethods[] = {Method::kOmddpg, Method::kSma2c, Method::kOmddpgNoDisc,
                               Method::kSma2cObsAction, Method::kSma2cObsOnly};

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    for (const auto& it : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out, const char* where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad value type for '") + key + "' in " + where);
    }
}

void vae_from_json(const json& j, VaeSection& s) {
    check_keys(j, "vae", {"dataset_episodes", "epochs", "batch_size", "lr", "grad_clip", "beta",
                          "lambda_disc", "z_dim", "hidden"});
    maybe(j, "dataset_episodes", s.dataset_episodes, "vae");
    maybe(j, "epochs", s.epochs, "vae");
    maybe(j, "batch_size", s.batch_size, "vae");
    maybe(j, "lr", s.lr, "vae");
    maybe(j, "grad_clip", s.grad_clip, "vae");
    maybe(j, "beta", s.beta, "vae");
    maybe(j, "lambda_disc", s.lambda_disc, "vae");
    maybe(j, "z_dim", s.z_dim, "vae");
    maybe(j, "hidden", s.hidden, "vae");
}

void sma2c_from_json(const json& j, Sma2cSection& s) {
    check_keys(j, "sma2c",
               {"n_envs", "lr", "grad_clip", "gamma", "gae_lambda", "value_coef", "entropy_coef",
                "c_vae", "beta", "z_dim", "hidden", "actor_hidden", "critic_hidden"});
    maybe(j, "n_envs", s.n_envs, "sma2c");
    maybe(j, "lr", s.lr, "sma2c");
    maybe(j, "grad_clip", s.grad_clip, "sma2c");
    maybe(j, "gamma", s.gamma, "sma2c");
    maybe(j, "gae_lambda", s.gae_lambda, "sma2c");
    maybe(j, "value_coef", s.value_coef, "sma2c");
    maybe(j, "entropy_coef", s.entropy_coef, "sma2c");
    maybe(j, "c_vae", s.c_vae, "sma2c");
    maybe(j, "beta", s.beta, "sma2c");
    maybe(j, "z_dim", s.z_dim, "sma2c");
    maybe(j, "hidden", s.hidden, "sma2c");
    maybe(j, "actor_hidden", s.actor_hidden, "sma2c");
    maybe(j, "critic_hidden", s.critic_hidden, "sma2c");
}

void ddpg_from_json(const json& j, DdpgSection& s) {
    check_keys(j, "ddpg", {"gamma", "gumbel_tau", "rho", "lr", "batch_size", "buffer_capacity",
                           "warmup_steps", "update_every", "eps_start", "eps_end",
                           "eps_anneal_steps", "grad_clip", "actor_hidden", "critic_hidden"});
    maybe(j, "gamma", s.gamma, "ddpg");
    maybe(j, "gumbel_tau", s.gumbel_tau, "ddpg");
    maybe(j, "rho", s.rho, "ddpg");
    maybe(j, "lr", s.lr, "ddpg");
    maybe(j, "batch_size", s.batch_size, "ddpg");
    maybe(j, "buffer_capacity", s.buffer_capacity, "ddpg");
    maybe(j, "warmup_steps", s.warmup_steps, "ddpg");
    maybe(j, "update_every", s.update_every, "ddpg");
    maybe(j, "eps_start", s.eps_start, "ddpg");
    maybe(j, "eps_end", s.eps_end, "ddpg");
    maybe(j, "eps_anneal_steps", s.eps_anneal_steps, "ddpg");
    maybe(j, "grad_clip", s.grad_clip, "ddpg");
    maybe(j, "actor_hidden", s.actor_hidden, "ddpg");
    maybe(j, "critic_hidden", s.critic_hidden, "ddpg");
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("config: ") + name + " must be positive");
}

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string("config: ") + name + " must lie in [0, 1]");
}

void check_nonneg(double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string("config: ") + name + " must be >= 0");
}

void check_widths(const std::vector<int>& ws, const char* name) {
    for (int w : ws)
        if (w <= 0) throw ConfigError(std::string("config: ") + name + " widths must be positive");
}

}  // namespace

std::string method_name(Method m) {
    for (std::size_t i = 0; i < std::size(kMethods); ++i)
        if (kMethods[i] == m) return kMethodNames[i];
    throw ConfigError("config: unknown method value");
}

Method parse_method(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kMethods); ++i)
        if (name == kMethodNames[i]) return kMethods[i];
    throw ConfigError("config: unknown method '" + name + "'");
}

bool method_is_sma2c(Method m) {
    return m == Method::kSma2c || m == Method::kSma2cObsAction || m == Method::kSma2cObsOnly;
}

vae::EncoderInputs method_inputs(Method m) {
    require(method_is_sma2c(m), "method_inputs: encoder-input masks belong to the sma2c family");
    if (m == Method::kSma2cObsOnly) return vae::EncoderInputs::kObsOnly;
    if (m == Method::kSma2cObsAction) return vae::EncoderInputs::kObsAction;
    return vae::EncoderInputs::kFull;
}

ExperimentConfig default_config(const std::string& env) {
    ExperimentConfig cfg;
    cfg.env = env;
    if (env == "speaker_listener") cfg.budget_episodes = 200000;
    return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    json j;
    j["method"] = method_name(cfg.method);
    j["env"] = cfg.env;
    j["seeds"] = cfg.seeds;
    j["budget_episodes"] = cfg.budget_episodes;
    j["eval_every"] = cfg.eval_every;
    j["eval_episodes"] = cfg.eval_episodes;
    j["vae"] = {{"dataset_episodes", cfg.vae.dataset_episodes},
                {"epochs", cfg.vae.epochs},
                {"batch_size", cfg.vae.batch_size},
                {"lr", cfg.vae.lr},
                {"grad_clip", cfg.vae.grad_clip},
                {"beta", cfg.vae.beta},
                {"lambda_disc", cfg.vae.lambda_disc},
                {"z_dim", cfg.vae.z_dim},
                {"hidden", cfg.vae.hidden}};
    j["sma2c"] = {{"n_envs", cfg.sma2c.n_envs},
                  {"lr", cfg.sma2c.lr},
                  {"grad_clip", cfg.sma2c.grad_clip},
                  {"gamma", cfg.sma2c.gamma},
                  {"gae_lambda", cfg.sma2c.gae_lambda},
                  {"value_coef", cfg.sma2c.value_coef},
                  {"entropy_coef", cfg.sma2c.entropy_coef},
                  {"c_vae", cfg.sma2c.c_vae},
                  {"beta", cfg.sma2c.beta},
                  {"z_dim", cfg.sma2c.z_dim},
                  {"hidden", cfg.sma2c.hidden},
                  {"actor_hidden", cfg.sma2c.actor_hidden},
                  {"critic_hidden", cfg.sma2c.critic_hidden}};
    j["ddpg"] = {{"gamma", cfg.ddpg.gamma},
                 {"gumbel_tau", cfg.ddpg.gumbel_tau},
                 {"rho", cfg.ddpg.rho},
                 {"lr", cfg.ddpg.lr},
                 {"batch_size", cfg.ddpg.batch_size},
                 {"buffer_capacity", cfg.ddpg.buffer_capacity},
                 {"warmup_steps", cfg.ddpg.warmup_steps},
                 {"update_every", cfg.ddpg.update_every},
                 {"eps_start", cfg.ddpg.eps_start},
                 {"eps_end", cfg.ddpg.eps_end},
                 {"eps_anneal_steps", cfg.ddpg.eps_anneal_steps},
                 {"grad_clip", cfg.ddpg.grad_clip},
                 {"actor_hidden", cfg.ddpg.actor_hidden},
                 {"critic_hidden", cfg.ddpg.critic_hidden}};
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    check_keys(j, "top level", {"method", "env", "seeds", "budget_episodes", "eval_every",
                                "eval_episodes", "vae", "sma2c", "ddpg"});
    std::string env = "matrix_toy";
    maybe(j, "env", env, "top level");
    ExperimentConfig cfg = default_config(env);
    if (j.contains("method")) {
        std::string name;
        maybe(j, "method", name, "top level");
        cfg.method = parse_method(name);
    }
    maybe(j, "seeds", cfg.seeds, "top level");
    maybe(j, "budget_episodes", cfg.budget_episodes, "top level");
    maybe(j, "eval_every", cfg.eval_every, "top level");
    maybe(j, "eval_episodes", cfg.eval_episodes, "top level");
    if (j.contains("vae")) vae_from_json(j.at("vae"), cfg.vae);
    if (j.contains("sma2c")) sma2c_from_json(j.at("sma2c"), cfg.sma2c);
    if (j.contains("ddpg")) ddpg_from_json(j.at("ddpg"), cfg.ddpg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: parse failure in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

envs::PoolPair pools_for(const ExperimentConfig& cfg) {
    if (cfg.env == "matrix_toy") return envs::matrix_toy_pools();
    if (cfg.env == "matrix_full") return envs::matrix_full_pools();
    if (cfg.env == "speaker_listener") return envs::speaker_listener_pools();
    throw ConfigError("config: unknown env '" + cfg.env + "'");
}

envs::EnvFactory env_factory(const ExperimentConfig& cfg) {
    if (cfg.env == "matrix_toy" || cfg.env == "matrix_full")
        return [](int id) { return std::make_unique<envs::RepeatedMatrixGame>(id); };
    if (cfg.env == "speaker_listener")
        return [](int id) { return std::make_unique<envs::SpeakerListenerEnv>(id); };
    throw ConfigError("config: unknown env '" + cfg.env + "'");
}

void validate(const ExperimentConfig& cfg) {
    const envs::PoolPair pools = pools_for(cfg);  // rejects unknown envs
    const envs::EnvFactory factory = env_factory(cfg);

    // Every referenced opponent must actually construct.
    auto probe = [&](const envs::Pool& p) {
        for (int id : p.ids) {
            try {
                factory(id);
            } catch (const std::exception& e) {
                throw ConfigError("config: opponent id " + std::to_string(id) + " in pool '" +
                                  p.name + "' is invalid for env '" + cfg.env + "': " + e.what());
            }
        }
    };
    probe(pools.train);
    probe(pools.test);

    // Pools are either one and the same (held-out episodes) or fully disjoint
    // (held-out opponents); partial overlap would poison the strong split.
    const std::set<int> train_ids(pools.train.ids.begin(), pools.train.ids.end());
    const std::set<int> test_ids(pools.test.ids.begin(), pools.test.ids.end());
    if (train_ids != test_ids) {
        for (int id : test_ids)
            if (train_ids.count(id))
                throw ConfigError("config: train/test pools overlap on opponent id " +
                                  std::to_string(id));
    }

    if (cfg.method == Method::kOmddpgNoDisc && cfg.vae.lambda_disc != 0.0)
        throw ConfigError("config: omddpg_no_disc requires vae.lambda_disc = 0");
    if (cfg.method == Method::kOmddpg && !(cfg.vae.lambda_disc > 0.0))
        throw ConfigError("config: omddpg requires vae.lambda_disc > 0");

    if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
    if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
        throw ConfigError("config: duplicate seeds");

    if (cfg.budget_episodes <= 0) throw ConfigError("config: budget_episodes must be positive");
    if (cfg.eval_every <= 0) throw ConfigError("config: eval_every must be positive");
    if (cfg.eval_episodes <= 0) throw ConfigError("config: eval_episodes must be positive");

    check_positive(cfg.vae.dataset_episodes, "vae.dataset_episodes");
    check_positive(cfg.vae.epochs, "vae.epochs");
    check_positive(cfg.vae.batch_size, "vae.batch_size");
    check_positive(cfg.vae.lr, "vae.lr");
    check_nonneg(cfg.vae.grad_clip, "vae.grad_clip");
    check_nonneg(cfg.vae.beta, "vae.beta");
    check_nonneg(cfg.vae.lambda_disc, "vae.lambda_disc");
    check_positive(cfg.vae.z_dim, "vae.z_dim");
    check_positive(cfg.vae.hidden, "vae.hidden");

    check_positive(cfg.sma2c.n_envs, "sma2c.n_envs");
    check_positive(cfg.sma2c.lr, "sma2c.lr");
    check_nonneg(cfg.sma2c.grad_clip, "sma2c.grad_clip");
    check_unit(cfg.sma2c.gamma, "sma2c.gamma");
    check_unit(cfg.sma2c.gae_lambda, "sma2c.gae_lambda");
    check_nonneg(cfg.sma2c.value_coef, "sma2c.value_coef");
    check_nonneg(cfg.sma2c.entropy_coef, "sma2c.entropy_coef");
    check_nonneg(cfg.sma2c.c_vae, "sma2c.c_vae");
    check_nonneg(cfg.sma2c.beta, "sma2c.beta");
    check_positive(cfg.sma2c.z_dim, "sma2c.z_dim");
    check_positive(cfg.sma2c.hidden, "sma2c.hidden");
    check_widths(cfg.sma2c.actor_hidden, "sma2c.actor_hidden");
    check_widths(cfg.sma2c.critic_hidden, "sma2c.critic_hidden");

    check_unit(cfg.ddpg.gamma, "ddpg.gamma");
    check_positive(cfg.ddpg.gumbel_tau, "ddpg.gumbel_tau");
    check_unit(cfg.ddpg.rho, "ddpg.rho");
    check_positive(cfg.ddpg.lr, "ddpg.lr");
    check_positive(cfg.ddpg.batch_size, "ddpg.batch_size");
    check_positive(cfg.ddpg.buffer_capacity, "ddpg.buffer_capacity");
    check_nonneg(cfg.ddpg.warmup_steps, "ddpg.warmup_steps");
    check_positive(cfg.ddpg.update_every, "ddpg.update_every");
    check_unit(cfg.ddpg.eps_start, "ddpg.eps_start");
    check_unit(cfg.ddpg.eps_end, "ddpg.eps_end");
    check_nonneg(cfg.ddpg.eps_anneal_steps, "ddpg.eps_anneal_steps");
    check_nonneg(cfg.ddpg.grad_clip, "ddpg.grad_clip");
    check_widths(cfg.ddpg.actor_hidden, "ddpg.actor_hidden");
    check_widths(cfg.ddpg.critic_hidden, "ddpg.critic_hidden");
}

std::string config_hash(const ExperimentConfig& cfg) {
    nlohmann::json j = to_json(cfg);
    // Seeds name the run, and the budget is a stopping time: training to 20k
    // and resuming to 50k replays the exact stream of training straight to
    // 50k (checkpoints carry params, optimizer state, and the rng). Neither
    // changes any result row, so neither is part of the experiment identity.
    j.erase("seeds");
    j.erase("budget_episodes");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace omlab::harness
