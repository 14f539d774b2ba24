#include "omlab/harness/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <utility>

#include "json.hpp"
#include "omlab/core/checkpoint.hpp"
#include "omlab/core/error.hpp"
#include "omlab/rl/omddpg.hpp"
#include "omlab/rl/sma2c.hpp"
#include "omlab/vae/pretrain.hpp"

namespace omlab::harness {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json row_to_json(const MetricsRow& row) {
    json per = json::object();
    for (const auto& [id, ret] : row.per_opponent) per[std::to_string(id)] = ret;
    return json{{"episode", row.episode},   {"step", row.step},
                {"pool", row.pool},         {"mean_return", row.mean_return},
                {"per_opponent", per},      {"opp_reads", row.opp_reads},
                {"losses", row.losses}};
}

MetricsRow row_from_json(const json& j) {
    MetricsRow row;
    try {
        row.episode = j.at("episode").get<long long>();
        row.step = j.at("step").get<long long>();
        row.pool = j.at("pool").get<std::string>();
        row.mean_return = j.at("mean_return").get<double>();
        for (const auto& it : j.at("per_opponent").items())
            row.per_opponent[std::stoi(it.key())] = it.value().get<double>();
        row.opp_reads = j.at("opp_reads").get<long>();
        row.losses = j.at("losses").get<std::map<std::string, double>>();
    } catch (const std::exception& e) {
        throw DataError(std::string("metrics: malformed row: ") + e.what());
    }
    return row;
}

void check_bundle(const json& b, const std::string& kind, const std::string& hash,
                  std::uint64_t seed) {
    if (!b.contains("kind") || b.at("kind") != kind)
        throw ConfigError("checkpoint: not a " + kind + " checkpoint");
    if (b.at("config_hash").get<std::string>() != hash)
        throw ConfigError("checkpoint: belongs to a different config (hash mismatch)");
    if (b.at("seed").get<std::uint64_t>() != seed)
        throw ConfigError("checkpoint: belongs to a different seed");
}

rl::Sma2cConfig make_sma2c_config(const ExperimentConfig& cfg) {
    rl::Sma2cConfig sc;
    sc.n_envs = cfg.sma2c.n_envs;
    sc.lr = cfg.sma2c.lr;
    sc.grad_clip = cfg.sma2c.grad_clip;
    sc.a2c.gamma = cfg.sma2c.gamma;
    sc.a2c.gae_lambda = cfg.sma2c.gae_lambda;
    sc.a2c.value_coef = cfg.sma2c.value_coef;
    sc.a2c.entropy_coef = cfg.sma2c.entropy_coef;
    sc.c_vae = cfg.sma2c.c_vae;
    sc.beta = cfg.sma2c.beta;
    sc.inputs = method_inputs(cfg.method);
    sc.z_dim = cfg.sma2c.z_dim;
    sc.hidden = cfg.sma2c.hidden;
    sc.actor_hidden = cfg.sma2c.actor_hidden;
    sc.critic_hidden = cfg.sma2c.critic_hidden;
    return sc;
}

rl::OmddpgConfig make_omddpg_config(const ExperimentConfig& cfg) {
    rl::OmddpgConfig oc;
    oc.ddpg.gamma = cfg.ddpg.gamma;
    oc.ddpg.gumbel_tau = cfg.ddpg.gumbel_tau;
    oc.ddpg.rho = cfg.ddpg.rho;
    oc.ddpg.lr = cfg.ddpg.lr;
    oc.ddpg.batch_size = cfg.ddpg.batch_size;
    oc.ddpg.buffer_capacity = static_cast<std::size_t>(cfg.ddpg.buffer_capacity);
    oc.ddpg.warmup_steps = cfg.ddpg.warmup_steps;
    oc.ddpg.update_every = cfg.ddpg.update_every;
    oc.ddpg.eps_start = cfg.ddpg.eps_start;
    oc.ddpg.eps_end = cfg.ddpg.eps_end;
    oc.ddpg.eps_anneal_steps = cfg.ddpg.eps_anneal_steps;
    oc.ddpg.grad_clip = cfg.ddpg.grad_clip;
    oc.ddpg.actor_hidden = cfg.ddpg.actor_hidden;
    oc.ddpg.critic_hidden = cfg.ddpg.critic_hidden;
    return oc;
}

// The RL stage's stream is derived from the seed so it never replays the
// pretraining draws.
constexpr std::uint64_t kRlStreamSalt = 0x9e3779b97f4a7c15ULL;

struct EvalCtx {
    const ExperimentConfig* cfg = nullptr;
    envs::EnvFactory factory;
    RunRecord* rec = nullptr;
};

// One evaluation round against one pool: audits the result, appends the row
// to the JSONL, and keeps it in the record.
void eval_round(EvalCtx& ctx, const envs::Pool& pool, const char* label, const core::Mlp& actor,
                const vae::TrajectoryEncoder& enc, rl::LatentMode mode, long long episode,
                long long step, const std::map<std::string, double>& losses, core::Rng& rng) {
    const int per_opp =
        std::max(1, ctx.cfg->eval_episodes / static_cast<int>(pool.ids.size()));
    const rl::EvalResult res =
        rl::evaluate_policy(ctx.factory, pool, actor, enc, mode, per_opp, rng);
    ctx.rec->hygiene_violations += audit_eval(res, pool);
    MetricsRow row;
    row.episode = episode;
    row.step = step;
    row.pool = label;
    row.mean_return = res.mean_return;
    row.per_opponent = res.per_opponent;
    row.opp_reads = res.opp_reads;
    row.losses = losses;
    append_metrics_row(ctx.rec->metrics_path, row);
    ctx.rec->metrics.push_back(std::move(row));
}

void load_or_truncate_metrics(RunRecord& rec, bool resumed) {
    if (resumed) {
        if (fs::exists(rec.metrics_path)) rec.metrics = read_metrics_jsonl(rec.metrics_path);
        return;
    }
    std::ofstream out(rec.metrics_path, std::ios::trunc);
    if (!out) throw DataError("run: cannot open '" + rec.metrics_path + "' for writing");
}

void run_sma2c(const ExperimentConfig& cfg, std::uint64_t seed, RunRecord& rec,
               const RunOptions& opt) {
    const envs::PoolPair pools = pools_for(cfg);
    EvalCtx ctx{&cfg, env_factory(cfg), &rec};
    rl::Sma2cTrainer tr(ctx.factory, pools.train, make_sma2c_config(cfg), seed);
    const long long horizon = ctx.factory(pools.train.ids.front())->horizon();

    const bool resumed = opt.resume && fs::exists(rec.checkpoint_path);
    if (resumed) {
        const json b = core::ckpt::read_file(rec.checkpoint_path);
        check_bundle(b, "sma2c", rec.config_hash, seed);
        core::ckpt::params_from_json(b.at("params"), tr.params());
        core::ckpt::adam_from_json(b.at("adam"), tr.optimizer());
        tr.rng().deserialize(b.at("rng").get<std::string>());
        tr.restore_progress(b.at("episode").get<long long>());
    }
    load_or_truncate_metrics(rec, resumed);

    long long next_eval = (tr.episodes() / cfg.eval_every + 1) * cfg.eval_every;
    while (tr.episodes() < cfg.budget_episodes) {
        const rl::Sma2cTrainer::WindowLog log = tr.train_window();
        const bool due = tr.episodes() >= next_eval;
        const bool done = tr.episodes() >= cfg.budget_episodes;
        if (!due && !done) continue;
        const std::map<std::string, double> losses{
            {"total", log.total},   {"policy", log.a2c.policy},
            {"value", log.a2c.value}, {"entropy", log.a2c.entropy},
            {"vae", log.vae},       {"window_return", log.mean_return}};
        const long long ep = tr.episodes();
        // Weak generalization: the training pool. Strong: the held-out pool.
        // Both run latent-from-own-stream — evaluation never reads the opponent.
        eval_round(ctx, pools.train, "train", tr.actor(), tr.encoder(), rl::LatentMode::kSelf,
                   ep, ep * horizon, losses, tr.rng());
        eval_round(ctx, pools.test, "test", tr.actor(), tr.encoder(), rl::LatentMode::kSelf, ep,
                   ep * horizon, losses, tr.rng());

        json bundle = core::ckpt::make_bundle(tr.params());
        bundle["kind"] = "sma2c";
        bundle["config_hash"] = rec.config_hash;
        bundle["seed"] = seed;
        bundle["episode"] = tr.episodes();
        bundle["adam"] = core::ckpt::adam_to_json(tr.optimizer());
        bundle["rng"] = tr.rng().serialize();
        core::ckpt::write_file(rec.checkpoint_path, bundle);

        while (next_eval <= tr.episodes()) next_eval += cfg.eval_every;
    }
    rec.episodes = tr.episodes();
}

core::NamedParams omddpg_params(rl::OmddpgTrainer& tr) {
    core::NamedParams ps;
    tr.encoder().params(ps, "encoder");
    tr.agent().actor.params(ps, "actor");
    tr.agent().critic.params(ps, "critic");
    tr.agent().actor_target.params(ps, "actor_target");
    tr.agent().critic_target.params(ps, "critic_target");
    return ps;
}

void run_omddpg(const ExperimentConfig& cfg, std::uint64_t seed, RunRecord& rec,
                const RunOptions& opt) {
    const envs::PoolPair pools = pools_for(cfg);
    EvalCtx ctx{&cfg, env_factory(cfg), &rec};
    const vae::TrajectoryEncoder::Config ecfg = opponent_encoder_config(cfg);

    const bool resumed = opt.resume && fs::exists(rec.checkpoint_path);
    core::Rng rng(seed);
    vae::TrajectoryEncoder enc(ecfg, rng);
    if (!resumed) {
        // Pretraining stage: a frozen corpus against the training pool under a
        // uniform-random behavior policy, then the opponent-side OM-VAE on it.
        // lambda_disc = 0 is exactly the no-discrimination ablation.
        const int num_actions = ctx.factory(pools.train.ids.front())->num_actions();
        const auto corpus = envs::record_trajectories(
            ctx.factory, pools.train, cfg.vae.dataset_episodes, envs::random_policy(num_actions),
            rng);
        vae::ActionDecoder dec(ecfg.obs_dim, ecfg.z_dim, ecfg.action_count, rng);
        vae::PretrainConfig pc;
        pc.epochs = cfg.vae.epochs;
        pc.batch_size = cfg.vae.batch_size;
        pc.lr = cfg.vae.lr;
        pc.grad_clip = cfg.vae.grad_clip;
        pc.loss.beta = cfg.vae.beta;
        pc.loss.lambda_disc = cfg.vae.lambda_disc;
        pc.side = vae::Side::Opponent;
        vae::pretrain_om_vae(enc, dec, corpus, pc, rng);
    }

    rl::OmddpgTrainer tr(ctx.factory, pools.train, enc, make_omddpg_config(cfg),
                         seed ^ kRlStreamSalt);
    if (resumed) {
        const json b = core::ckpt::read_file(rec.checkpoint_path);
        check_bundle(b, "omddpg", rec.config_hash, seed);
        core::ckpt::params_from_json(b.at("params"), omddpg_params(tr));
        core::ckpt::adam_from_json(b.at("adam_actor"), tr.actor_opt());
        core::ckpt::adam_from_json(b.at("adam_critic"), tr.critic_opt());
        tr.rng().deserialize(b.at("rng").get<std::string>());
        tr.restore_progress(b.at("env_steps").get<long long>(),
                            b.at("episode").get<long long>());
    }
    load_or_truncate_metrics(rec, resumed);

    long long next_eval = (tr.episodes() / cfg.eval_every + 1) * cfg.eval_every;
    while (tr.episodes() < cfg.budget_episodes) {
        const double ret = tr.train_episode();
        const bool due = tr.episodes() >= next_eval;
        const bool done = tr.episodes() >= cfg.budget_episodes;
        if (!due && !done) continue;
        const std::map<std::string, double> losses{{"critic", tr.last_losses().critic},
                                                   {"actor", tr.last_losses().actor},
                                                   {"epsilon", tr.epsilon()},
                                                   {"episode_return", ret}};
        const long long ep = tr.episodes();
        // Both pools run latent-from-opponent-stream: every eval step is a
        // counted privileged read, which is the method's stated requirement.
        eval_round(ctx, pools.train, "train", tr.agent().actor, tr.encoder(),
                   rl::LatentMode::kOpponent, ep, tr.env_steps(), losses, tr.rng());
        eval_round(ctx, pools.test, "test", tr.agent().actor, tr.encoder(),
                   rl::LatentMode::kOpponent, ep, tr.env_steps(), losses, tr.rng());

        json bundle = core::ckpt::make_bundle(omddpg_params(tr));
        bundle["kind"] = "omddpg";
        bundle["config_hash"] = rec.config_hash;
        bundle["seed"] = seed;
        bundle["episode"] = tr.episodes();
        bundle["env_steps"] = tr.env_steps();
        bundle["adam_actor"] = core::ckpt::adam_to_json(tr.actor_opt());
        bundle["adam_critic"] = core::ckpt::adam_to_json(tr.critic_opt());
        bundle["rng"] = tr.rng().serialize();
        core::ckpt::write_file(rec.checkpoint_path, bundle);

        while (next_eval <= tr.episodes()) next_eval += cfg.eval_every;
    }
    rec.episodes = tr.episodes();
}

}  // namespace

void append_metrics_row(const std::string& path, const MetricsRow& row) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("metrics: cannot open '" + path + "' for append");
    out << row_to_json(row).dump() << '\n';
    if (!out) throw DataError("metrics: write to '" + path + "' failed");
}

std::vector<MetricsRow> read_metrics_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("metrics: cannot open '" + path + "'");
    std::vector<MetricsRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("metrics: bad JSONL line in '" + path + "': " + e.what());
        }
        rows.push_back(row_from_json(j));
    }
    return rows;
}

long audit_eval(const rl::EvalResult& result, const envs::Pool& requested) {
    long violations = 0;
    for (const auto& [id, ret] : result.per_opponent) {
        (void)ret;
        if (!requested.contains(id)) ++violations;
    }
    return violations;
}

RunRecord run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    validate(cfg);
    require(!opt.out_dir.empty(), "run: out_dir must be set");
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.seed = seed;
    const std::string dir = opt.out_dir + "/seed_" + std::to_string(seed);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("run: cannot create '" + dir + "': " + ec.message());
    rec.metrics_path = dir + "/metrics.jsonl";
    rec.checkpoint_path = dir + "/checkpoint.json";

    if (method_is_sma2c(cfg.method))
        run_sma2c(cfg, seed, rec, opt);
    else
        run_omddpg(cfg, seed, rec, opt);

    rec.ok = true;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

vae::TrajectoryEncoder::Config opponent_encoder_config(const ExperimentConfig& cfg) {
    const envs::PoolPair pools = pools_for(cfg);
    const auto probe = env_factory(cfg)(pools.train.ids.front());
    vae::TrajectoryEncoder::Config ecfg;
    ecfg.obs_dim = probe->opp_obs_dim();
    ecfg.action_count = probe->opp_num_actions();
    ecfg.z_dim = cfg.vae.z_dim;
    ecfg.hidden = cfg.vae.hidden;
    return ecfg;
}

rl::EvalResult evaluate_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::string& checkpoint_path,
                                   const std::string& pool_choice, core::Rng& rng) {
    validate(cfg);
    if (pool_choice != "train" && pool_choice != "test")
        throw UsageError("eval: pool must be 'train' or 'test', got '" + pool_choice + "'");
    const envs::PoolPair pools = pools_for(cfg);
    const envs::Pool& pool = pool_choice == "train" ? pools.train : pools.test;
    const envs::EnvFactory factory = env_factory(cfg);
    const std::string hash = config_hash(cfg);
    const json b = core::ckpt::read_file(checkpoint_path);
    const int per_opp = std::max(1, cfg.eval_episodes / static_cast<int>(pool.ids.size()));

    rl::EvalResult res;
    if (method_is_sma2c(cfg.method)) {
        check_bundle(b, "sma2c", hash, seed);
        rl::Sma2cTrainer tr(factory, pools.train, make_sma2c_config(cfg), seed);
        core::ckpt::params_from_json(b.at("params"), tr.params());
        res = rl::evaluate_policy(factory, pool, tr.actor(), tr.encoder(), rl::LatentMode::kSelf,
                                  per_opp, rng);
    } else {
        check_bundle(b, "omddpg", hash, seed);
        core::Rng init(seed);
        vae::TrajectoryEncoder enc(opponent_encoder_config(cfg), init);
        rl::OmddpgTrainer tr(factory, pools.train, enc, make_omddpg_config(cfg),
                             seed ^ kRlStreamSalt);
        core::ckpt::params_from_json(b.at("params"), omddpg_params(tr));
        res = rl::evaluate_policy(factory, pool, tr.agent().actor, tr.encoder(),
                                  rl::LatentMode::kOpponent, per_opp, rng);
    }
    require(audit_eval(res, pool) == 0, "eval: pool-hygiene audit failed");
    return res;
}

vae::TrajectoryEncoder encoder_from_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed,
                                               const std::string& checkpoint_path) {
    validate(cfg);
    const std::string hash = config_hash(cfg);
    const json b = core::ckpt::read_file(checkpoint_path);
    core::Rng init(seed);
    if (method_is_sma2c(cfg.method)) {
        check_bundle(b, "sma2c", hash, seed);
        const envs::PoolPair pools = pools_for(cfg);
        rl::Sma2cTrainer tr(env_factory(cfg), pools.train, make_sma2c_config(cfg), seed);
        core::ckpt::params_from_json(b.at("params"), tr.params());
        return tr.encoder();  // copies share the restored parameter nodes
    }
    // omddpg family: either a full run checkpoint or a train-vae artifact.
    const std::string kind =
        b.contains("kind") && b.at("kind") == "om_vae" ? "om_vae" : "omddpg";
    check_bundle(b, kind, hash, seed);
    vae::TrajectoryEncoder enc(opponent_encoder_config(cfg), init);
    core::NamedParams ps;
    enc.params(ps, "encoder");
    core::ckpt::params_from_json(b.at("params"), ps);
    return enc;
}

std::vector<RunRecord> run(const ExperimentConfig& cfg, const RunOptions& opt) {
    validate(cfg);
    require(!opt.out_dir.empty(), "run: out_dir must be set");
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw DataError("run: cannot create '" + opt.out_dir + "': " + ec.message());
    {
        // The resolved config, reloadable as-is; the hash is recomputable.
        std::ofstream out(opt.out_dir + "/config.json");
        out << to_json(cfg).dump(2) << '\n';
    }
    std::vector<RunRecord> records;
    for (const std::uint64_t seed : cfg.seeds) {
        try {
            records.push_back(run_seed(cfg, seed, opt));
        } catch (const std::exception& e) {
            RunRecord rec;
            rec.config_hash = config_hash(cfg);
            rec.seed = seed;
            rec.error = e.what();
            records.push_back(std::move(rec));  // a failed seed never aborts siblings
        }
    }
    return records;
}

}  // namespace omlab::harness
