// Command-line front end: training, evaluation, MI reports, ablation
// expansion, and aggregation, all driven by one config file.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "omlab/core/checkpoint.hpp"
#include "omlab/core/error.hpp"
#include "omlab/harness/aggregate.hpp"
#include "omlab/harness/config.hpp"
#include "omlab/harness/run.hpp"
#include "omlab/repr/embeddings.hpp"
#include "omlab/repr/mine.hpp"
#include "omlab/repr/separation.hpp"
#include "omlab/vae/pretrain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace omlab;

namespace {

std::vector<std::uint64_t> parse_seed_range(const std::string& spec) {
    const auto dots = spec.find("..");
    if (dots == std::string::npos)
        throw UsageError("--seeds wants an inclusive range A..B, got '" + spec + "'");
    std::uint64_t lo = 0, hi = 0;
    try {
        lo = std::stoull(spec.substr(0, dots));
        hi = std::stoull(spec.substr(dots + 2));
    } catch (const std::exception&) {
        throw UsageError("--seeds wants numeric bounds, got '" + spec + "'");
    }
    if (hi < lo) throw UsageError("--seeds range is empty: " + spec);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
}

std::string seed_dir(const std::string& out, std::uint64_t seed) {
    return out + "/seed_" + std::to_string(seed);
}

// A run directory holds config.json plus seed_*/ subdirs; a parent directory
// of several run directories aggregates across them (e.g. method comparisons).
std::vector<harness::SeriesInput> scan_series(const std::string& out) {
    std::vector<std::string> run_dirs;
    if (fs::exists(out + "/config.json")) {
        run_dirs.push_back(out);
    } else if (fs::is_directory(out)) {
        for (const auto& entry : fs::directory_iterator(out))
            if (entry.is_directory() && fs::exists(entry.path() / "config.json"))
                run_dirs.push_back(entry.path().string());
        std::sort(run_dirs.begin(), run_dirs.end());
    }
    if (run_dirs.empty())
        throw UsageError("no run directories (config.json + seed_*/) under '" + out + "'");

    std::vector<harness::SeriesInput> series;
    for (const std::string& dir : run_dirs) {
        const harness::ExperimentConfig cfg = harness::load_config(dir + "/config.json");
        const std::string method = harness::method_name(cfg.method);
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (!entry.is_directory() || name.rfind("seed_", 0) != 0) continue;
            const std::string metrics = entry.path().string() + "/metrics.jsonl";
            if (!fs::exists(metrics)) continue;
            harness::SeriesInput s;
            s.method = method;
            s.seed = std::stoull(name.substr(5));
            s.rows = harness::read_metrics_jsonl(metrics);
            series.push_back(std::move(s));
        }
    }
    if (series.empty()) throw UsageError("no seed_*/metrics.jsonl series under '" + out + "'");
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
        return a.method != b.method ? a.method < b.method : a.seed < b.seed;
    });
    return series;
}

int cmd_train_rl(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
                 const std::string& out, bool resume) {
    harness::ExperimentConfig cfg = harness::load_config(config_path);
    if (!seeds.empty()) cfg.seeds = seeds;
    harness::validate(cfg);
    std::printf("experiment %s  method %s  env %s  budget %lld episodes\n",
                harness::config_hash(cfg).c_str(), harness::method_name(cfg.method).c_str(),
                cfg.env.c_str(), cfg.budget_episodes);
    const auto records = harness::run(cfg, {out, resume});
    bool all_ok = true;
    for (const auto& rec : records) {
        if (rec.ok) {
            std::printf("seed %llu: ok  %lld episodes  %.1fs  hygiene violations %ld  %s\n",
                        static_cast<unsigned long long>(rec.seed), rec.episodes, rec.wall_seconds,
                        rec.hygiene_violations, rec.metrics_path.c_str());
        } else {
            std::printf("seed %llu: FAILED: %s\n", static_cast<unsigned long long>(rec.seed),
                        rec.error.c_str());
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

int cmd_train_vae(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    const harness::ExperimentConfig cfg = harness::load_config(config_path);
    harness::validate(cfg);
    if (harness::method_is_sma2c(cfg.method))
        throw UsageError(
            "train-vae pretrains the opponent-side om-vae; the sma2c family trains its vae "
            "jointly during train-rl");

    // Same stream as the pretraining stage inside train-rl, so the artifact
    // is byte-for-byte the encoder that a full run would start from.
    core::Rng rng(seed);
    const envs::PoolPair pools = harness::pools_for(cfg);
    const envs::EnvFactory factory = harness::env_factory(cfg);
    const vae::TrajectoryEncoder::Config ecfg = harness::opponent_encoder_config(cfg);
    const int num_actions = factory(pools.train.ids.front())->num_actions();
    vae::TrajectoryEncoder enc(ecfg, rng);
    const auto corpus = envs::record_trajectories(
        factory, pools.train, cfg.vae.dataset_episodes, envs::random_policy(num_actions), rng);
    vae::ActionDecoder dec(ecfg.obs_dim, ecfg.z_dim, ecfg.action_count, rng);
    vae::PretrainConfig pc;
    pc.epochs = cfg.vae.epochs;
    pc.batch_size = cfg.vae.batch_size;
    pc.lr = cfg.vae.lr;
    pc.grad_clip = cfg.vae.grad_clip;
    pc.loss.beta = cfg.vae.beta;
    pc.loss.lambda_disc = cfg.vae.lambda_disc;
    pc.side = vae::Side::Opponent;
    const auto log = vae::pretrain_om_vae(enc, dec, corpus, pc, rng);

    core::NamedParams ps;
    enc.params(ps, "encoder");
    dec.params(ps, "decoder");
    json bundle = core::ckpt::make_bundle(ps);
    bundle["kind"] = "om_vae";
    bundle["config_hash"] = harness::config_hash(cfg);
    bundle["seed"] = seed;
    json epochs = json::array();
    for (const auto& e : log)
        epochs.push_back(
            {{"total", e.total}, {"recon", e.recon}, {"kl", e.kl}, {"triplet", e.triplet}});
    bundle["log"] = epochs;
    fs::create_directories(seed_dir(out, seed));
    const std::string path = seed_dir(out, seed) + "/vae.json";
    core::ckpt::write_file(path, bundle);
    std::printf("om-vae: %d trajectories, %d epochs, loss %.4f -> %.4f, wrote %s\n",
                static_cast<int>(corpus.size()), pc.epochs, log.front().total, log.back().total,
                path.c_str());
    return 0;
}

int cmd_eval(const std::string& config_path, std::uint64_t seed, const std::string& out,
             const std::string& pool_choice) {
    const harness::ExperimentConfig cfg = harness::load_config(config_path);
    const std::string ckpt = seed_dir(out, seed) + "/checkpoint.json";
    core::Rng rng(seed ^ 0xe7037ed1a0b428dbULL);  // fresh eval stream
    const rl::EvalResult res = harness::evaluate_checkpoint(cfg, seed, ckpt, pool_choice, rng);
    json per = json::object();
    for (const auto& [id, ret] : res.per_opponent) per[std::to_string(id)] = ret;
    const json report = {{"method", harness::method_name(cfg.method)},
                         {"seed", seed},
                         {"pool", pool_choice},
                         {"episodes", res.episodes},
                         {"mean_return", res.mean_return},
                         {"per_opponent", per},
                         {"opp_reads", res.opp_reads}};
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_mi(const std::string& config_path, std::uint64_t seed, const std::string& out,
           const std::string& pool_choice, int episodes_per_opponent) {
    const harness::ExperimentConfig cfg = harness::load_config(config_path);
    if (pool_choice != "train" && pool_choice != "test")
        throw UsageError("mi: pool must be 'train' or 'test'");

    // Prefer the full run checkpoint; fall back to a train-vae artifact.
    std::string ckpt = seed_dir(out, seed) + "/checkpoint.json";
    if (!fs::exists(ckpt)) ckpt = seed_dir(out, seed) + "/vae.json";
    if (!fs::exists(ckpt))
        throw UsageError("mi: no checkpoint.json or vae.json under " + seed_dir(out, seed));
    const vae::TrajectoryEncoder enc = harness::encoder_from_checkpoint(cfg, seed, ckpt);
    const repr::Stream stream =
        harness::method_is_sma2c(cfg.method) ? repr::Stream::kSelf : repr::Stream::kOpponent;

    const envs::PoolPair pools = harness::pools_for(cfg);
    const envs::Pool& pool = pool_choice == "train" ? pools.train : pools.test;
    const envs::EnvFactory factory = harness::env_factory(cfg);
    const auto probe = factory(pool.ids.front());
    const int h = probe->horizon();
    repr::CollectConfig cc;
    cc.timesteps.clear();
    for (double frac : {0.6, 0.8, 1.0}) {
        const int t = std::max(1, static_cast<int>(std::lround(frac * h)));
        if (cc.timesteps.empty() || cc.timesteps.back() != t) cc.timesteps.push_back(t);
    }
    cc.episodes_per_opponent = episodes_per_opponent;

    core::Rng rng(seed ^ 0x94d049bb133111ebULL);  // measurement stream
    const auto samples = repr::collect_embeddings(factory, pool, enc, stream, cc,
                                                  envs::random_policy(probe->num_actions()), rng);
    json rows = json::array();
    for (int t : cc.timesteps) {
        std::vector<repr::EmbeddingSample> at_t;
        for (const auto& s : samples)
            if (s.t == t) at_t.push_back(s);
        const repr::MineResult mi = repr::mine_estimate(at_t, {}, rng);
        const repr::SeparationMetrics sep = repr::separation_metrics(at_t);
        rows.push_back({{"method", harness::method_name(cfg.method)},
                        {"timestep", t},
                        {"mi_nats", mi.estimate},
                        {"ratio", sep.ratio},
                        {"accuracy", sep.accuracy},
                        {"n_samples", static_cast<int>(at_t.size())}});
    }
    std::cout << rows.dump(2) << "\n";
    const std::string path = seed_dir(out, seed) + "/mi_" + pool_choice + ".json";
    std::ofstream f(path);
    f << rows.dump(2) << "\n";
    return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& axis, const std::string& out) {
    const harness::ExperimentConfig base = harness::load_config(config_path);
    const auto configs = harness::ablation_matrix(base, axis);
    fs::create_directories(out);
    for (const auto& c : configs) {
        const std::string path = out + "/" + axis + "_" + harness::method_name(c.method) + ".json";
        std::ofstream f(path);
        if (!f) throw DataError("ablate: cannot write '" + path + "'");
        f << harness::to_json(c).dump(2) << "\n";
        std::printf("%s\n", path.c_str());
    }
    return 0;
}

int cmd_aggregate(const std::string& out) {
    const auto table = harness::aggregate(scan_series(out));
    harness::write_summary_csv(out + "/summary.csv", table);
    harness::write_summary_json(out + "/summary.json", table);
    std::printf("%d summary rows -> %s/summary.{csv,json}\n", static_cast<int>(table.size()),
                out.c_str());
    return 0;
}

int cmd_export(const std::string& out) {
    const auto table = harness::aggregate(scan_series(out));
    harness::write_summary_csv(out + "/curves.csv", table);
    std::printf("%d rows -> %s/curves.csv\n", static_cast<int>(table.size()), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opponent-modeling laboratory"};
    app.require_subcommand(1);

    std::string config_path, out, pool_choice = "train", seeds_spec, axis;
    std::uint64_t seed = 0;
    bool resume = false;
    int mi_episodes = 200;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")
            ->required()
            ->check(CLI::ExistingFile);
    };
    auto add_out = [&](CLI::App* cmd, const char* what) {
        cmd->add_option("--out", out, what)->required();
    };

    CLI::App* train_rl = app.add_subcommand("train-rl", "train a method across seeds");
    add_config(train_rl);
    add_out(train_rl, "run directory (seed_*/ created inside)");
    train_rl->add_option("--seed", seed, "single seed (overrides the config list)");
    train_rl->add_option("--seeds", seeds_spec, "inclusive seed range A..B");
    train_rl->add_flag("--resume", resume, "continue from the last checkpoints");

    CLI::App* train_vae = app.add_subcommand("train-vae", "pretrain the opponent-side om-vae");
    add_config(train_vae);
    add_out(train_vae, "artifact directory");
    train_vae->add_option("--seed", seed, "seed")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained checkpoint");
    add_config(eval_cmd);
    add_out(eval_cmd, "run directory holding seed_<n>/checkpoint.json");
    eval_cmd->add_option("--seed", seed, "seed of the checkpoint")->required();
    eval_cmd->add_option("--pool", pool_choice, "train (weak) or test (strong)")
        ->check(CLI::IsMember({"train", "test"}));

    CLI::App* mi_cmd = app.add_subcommand("mi", "identity MI and separation of the embeddings");
    add_config(mi_cmd);
    add_out(mi_cmd, "run directory holding the checkpoint");
    mi_cmd->add_option("--seed", seed, "seed of the checkpoint")->required();
    mi_cmd->add_option("--pool", pool_choice, "opponent pool to embed")
        ->check(CLI::IsMember({"train", "test"}));
    mi_cmd->add_option("--episodes", mi_episodes, "episodes per opponent (default 200)");

    CLI::App* ablate = app.add_subcommand("ablate", "expand a config along an ablation axis");
    add_config(ablate);
    add_out(ablate, "directory for the expanded configs");
    ablate->add_option("--axis", axis, "encoder_inputs | discrimination")->required();

    CLI::App* aggregate = app.add_subcommand("aggregate", "summarize runs into mean +- 95% ci");
    add_out(aggregate, "run directory, or a parent of several");

    CLI::App* export_cmd = app.add_subcommand("export", "tidy csv of the eval curves");
    add_out(export_cmd, "run directory, or a parent of several");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_rl) {
            if (!seeds_spec.empty() && train_rl->count("--seed"))
                throw UsageError("give --seed or --seeds, not both");
            std::vector<std::uint64_t> seeds;
            if (train_rl->count("--seed")) seeds = {seed};
            if (!seeds_spec.empty()) seeds = parse_seed_range(seeds_spec);
            return cmd_train_rl(config_path, seeds, out, resume);
        }
        if (*train_vae) return cmd_train_vae(config_path, seed, out);
        if (*eval_cmd) return cmd_eval(config_path, seed, out, pool_choice);
        if (*mi_cmd) return cmd_mi(config_path, seed, out, pool_choice, mi_episodes);
        if (*ablate) return cmd_ablate(config_path, axis, out);
        if (*aggregate) return cmd_aggregate(out);
        if (*export_cmd) return cmd_export(out);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
