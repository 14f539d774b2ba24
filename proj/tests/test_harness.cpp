#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "omlab/core/checkpoint.hpp"
#include "omlab/core/error.hpp"
#include "omlab/envs/oracle.hpp"
#include "omlab/harness/aggregate.hpp"
#include "omlab/harness/config.hpp"
#include "omlab/harness/run.hpp"

using namespace omlab;
using namespace omlab::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Scratch tree under the build dir; wiped per test case for idempotent runs.
std::string fresh_dir(const std::string& name) {
    const std::string dir = "harness_out/" + name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool rows_equal(const MetricsRow& a, const MetricsRow& b) {
    return a.episode == b.episode && a.step == b.step && a.pool == b.pool &&
           a.mean_return == b.mean_return && a.per_opponent == b.per_opponent &&
           a.opp_reads == b.opp_reads && a.losses == b.losses;
}

// Small enough to finish in well under a second.
ExperimentConfig tiny_sma2c() {
    ExperimentConfig cfg = default_config("matrix_toy");
    cfg.method = Method::kSma2c;
    cfg.seeds = {3};
    cfg.budget_episodes = 12;
    cfg.eval_every = 4;
    cfg.eval_episodes = 4;
    cfg.sma2c.n_envs = 2;
    cfg.sma2c.z_dim = 2;
    cfg.sma2c.hidden = 8;
    cfg.sma2c.actor_hidden = {8};
    cfg.sma2c.critic_hidden = {8};
    return cfg;
}

ExperimentConfig tiny_omddpg() {
    ExperimentConfig cfg = default_config("matrix_toy");
    cfg.method = Method::kOmddpg;
    cfg.seeds = {11};
    cfg.budget_episodes = 6;
    cfg.eval_every = 3;
    cfg.eval_episodes = 2;
    cfg.vae.dataset_episodes = 2;
    cfg.vae.epochs = 1;
    cfg.vae.batch_size = 4;
    cfg.vae.z_dim = 2;
    cfg.vae.hidden = 8;
    cfg.ddpg.batch_size = 8;
    cfg.ddpg.buffer_capacity = 200;
    cfg.ddpg.warmup_steps = 20;
    cfg.ddpg.update_every = 5;
    cfg.ddpg.eps_anneal_steps = 50;
    cfg.ddpg.actor_hidden = {8};
    cfg.ddpg.critic_hidden = {8};
    return cfg;
}

}  // namespace

TEST_CASE("config files merge over the defaults and reject unknown keys") {
    const ExperimentConfig base = default_config();
    CHECK(base.env == "matrix_toy");
    CHECK(base.budget_episodes == 50000);
    CHECK(base.eval_every == 1000);
    CHECK(base.eval_episodes == 100);
    CHECK(default_config("speaker_listener").budget_episodes == 200000);

    // An empty file is exactly the defaults.
    CHECK(to_json(config_from_json(json::object())).dump() == to_json(base).dump());

    // A partial override touches only the named keys.
    const json frag = {{"method", "omddpg_no_disc"},
                       {"sma2c", {{"lr", 0.001}}},
                       {"vae", {{"lambda_disc", 0.0}}}};
    const ExperimentConfig cfg = config_from_json(frag);
    CHECK(cfg.method == Method::kOmddpgNoDisc);
    CHECK(cfg.sma2c.lr == 0.001);
    CHECK(cfg.vae.lambda_disc == 0.0);
    CHECK(cfg.sma2c.gamma == base.sma2c.gamma);
    CHECK(cfg.ddpg.batch_size == base.ddpg.batch_size);

    // The env-specific budget default only applies when the file leaves it out.
    CHECK(config_from_json({{"env", "speaker_listener"}}).budget_episodes == 200000);
    CHECK(config_from_json({{"env", "speaker_listener"}, {"budget_episodes", 777}})
              .budget_episodes == 777);

    // Round trip: resolved json -> config -> identical resolved json.
    CHECK(to_json(config_from_json(to_json(base))).dump() == to_json(base).dump());

    CHECK_THROWS_AS((void)config_from_json({{"methd", "sma2c"}}), ConfigError);
    CHECK_THROWS_AS((void)config_from_json({{"sma2c", {{"lr_", 0.1}}}}), ConfigError);
    CHECK_THROWS_AS((void)config_from_json({{"method", "dqn"}}), ConfigError);
    CHECK_THROWS_AS((void)config_from_json({{"eval_every", "soon"}}), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS((void)load_config("no_such_config.json"), ConfigError);

    // A config file on disk loads with overrides applied.
    const std::string dir = fresh_dir("config_load");
    {
        std::ofstream out(dir + "/c.json");
        out << R"({"env": "matrix_full", "seeds": [9], "ddpg": {"lr": 0.01}})";
    }
    const ExperimentConfig loaded = load_config(dir + "/c.json");
    CHECK(loaded.env == "matrix_full");
    CHECK(loaded.seeds == std::vector<std::uint64_t>{9});
    CHECK(loaded.ddpg.lr == 0.01);
}

TEST_CASE("the config hash moves with every hyperparameter and nothing else") {
    const ExperimentConfig base = default_config();
    const std::string base_hash = config_hash(base);
    CHECK(base_hash.size() == 16);
    CHECK(config_hash(default_config()) == base_hash);  // stable across calls

    // Bump every leaf of the resolved config except run identity (seeds) and
    // the stopping time (budget): each one must move the hash.
    auto bump = [](json& v) {
        if (v.is_string()) {
            std::string s = v.get<std::string>();
            v = (s == "sma2c") ? "sma2c_obs_only" : (s == "matrix_toy") ? "matrix_full" : s + "x";
        } else if (v.is_array()) {
            v.push_back(3);
        } else if (v.is_number_integer()) {
            v = v.get<long long>() + 1;
        } else {
            v = v.get<double>() * 1.5 + 0.125;
        }
    };
    const json resolved = to_json(base);
    int leaves = 0;
    for (const auto& [key, val] : resolved.items()) {
        if (key == "seeds" || key == "budget_episodes") continue;
        if (val.is_object()) {
            for (const auto& [sub, subval] : val.items()) {
                (void)subval;
                json mutated = resolved;
                bump(mutated[key][sub]);
                CHECK_MESSAGE(config_hash(config_from_json(mutated)) != base_hash,
                              key << "." << sub << " did not move the hash");
                ++leaves;
            }
        } else {
            json mutated = resolved;
            bump(mutated[key]);
            CHECK_MESSAGE(config_hash(config_from_json(mutated)) != base_hash,
                          key << " did not move the hash");
            ++leaves;
        }
    }
    CHECK(leaves >= 38);  // every ledger default is covered

    ExperimentConfig same = base;
    same.seeds = {42, 43};
    same.budget_episodes = 123;
    CHECK(config_hash(same) == base_hash);
}

TEST_CASE("config validation enforces the experiment invariants") {
    CHECK_NOTHROW(validate(default_config()));
    CHECK_NOTHROW(validate(default_config("matrix_full")));
    CHECK_NOTHROW(validate(default_config("speaker_listener")));  // disjoint pools

    ExperimentConfig cfg = default_config();
    cfg.env = "atari";
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = default_config();
    cfg.method = Method::kOmddpgNoDisc;  // lambda still 1.0
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.vae.lambda_disc = 0.0;
    CHECK_NOTHROW(validate(cfg));

    cfg = default_config();
    cfg.method = Method::kOmddpg;
    cfg.vae.lambda_disc = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = default_config();
    cfg.seeds = {};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.seeds = {5, 5};
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = default_config();
    cfg.sma2c.gamma = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_config();
    cfg.ddpg.lr = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_config();
    cfg.eval_every = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = default_config();
    cfg.sma2c.actor_hidden = {64, 0};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("ablation matrices expand exactly as specified") {
    const ExperimentConfig sbase = default_config();

    const auto inputs = ablation_matrix(sbase, "encoder_inputs");
    REQUIRE(inputs.size() == 3);
    CHECK(inputs[0].method == Method::kSma2c);
    CHECK(inputs[1].method == Method::kSma2cObsAction);
    CHECK(inputs[2].method == Method::kSma2cObsOnly);
    for (const auto& c : inputs) {
        json a = to_json(c), b = to_json(sbase);
        a.erase("method");
        b.erase("method");
        CHECK(a.dump() == b.dump());  // identical in every other respect
    }

    ExperimentConfig obase = default_config();
    obase.method = Method::kOmddpg;
    const auto disc = ablation_matrix(obase, "discrimination");
    REQUIRE(disc.size() == 2);
    CHECK(disc[0].method == Method::kOmddpg);
    CHECK(disc[0].vae.lambda_disc == 1.0);
    CHECK(disc[1].method == Method::kOmddpgNoDisc);
    CHECK(disc[1].vae.lambda_disc == 0.0);
    for (const auto& c : disc) {
        json a = to_json(c), b = to_json(obase);
        for (auto* j : {&a, &b}) {
            j->erase("method");
            j->at("vae").erase("lambda_disc");
        }
        CHECK(a.dump() == b.dump());
    }

    CHECK_THROWS_AS((void)ablation_matrix(sbase, "discrimination"), UsageError);
    CHECK_THROWS_AS((void)ablation_matrix(obase, "encoder_inputs"), UsageError);
    CHECK_THROWS_AS((void)ablation_matrix(sbase, "dropout"), UsageError);
}

TEST_CASE("aggregate reproduces the closed-form normal interval") {
    // Five seeds whose returns have sample standard deviation exactly 1.
    std::vector<SeriesInput> series;
    const double vals[5] = {-1.0, -1.0, 0.0, 1.0, 1.0};
    for (int s = 0; s < 5; ++s) {
        MetricsRow row;
        row.episode = 1000;
        row.step = 25000;
        row.pool = "train";
        row.mean_return = 10.0 + vals[s];
        series.push_back({"sma2c", static_cast<std::uint64_t>(s), {row}});
    }
    const auto table = aggregate(series);
    REQUIRE(table.size() == 1);
    CHECK(table[0].method == "sma2c");
    CHECK(table[0].pool == "train");
    CHECK(table[0].episode == 1000);
    CHECK(table[0].n_seeds == 5);
    CHECK(table[0].mean == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(table[0].ci_half == doctest::Approx(1.96 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(table[0].ci_half == doctest::Approx(0.8765386).epsilon(1e-4));
    CHECK(table[0].ci_lo == doctest::Approx(10.0 - 1.96 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK_FALSE(table[0].insufficient_seeds);

    SUBCASE("five identical series collapse the interval to zero width") {
        for (auto& s : series) s.rows[0].mean_return = 7.25;
        const auto t2 = aggregate(series);
        REQUIRE(t2.size() == 1);
        CHECK(t2[0].mean == 7.25);
        CHECK(t2[0].ci_half == 0.0);
        CHECK(t2[0].ci_lo == 7.25);
        CHECK(t2[0].ci_hi == 7.25);
        CHECK_FALSE(t2[0].insufficient_seeds);
    }

    SUBCASE("a single seed is flagged, with zero width by convention") {
        const auto t2 = aggregate({series[0]});
        REQUIRE(t2.size() == 1);
        CHECK(t2[0].n_seeds == 1);
        CHECK(t2[0].ci_half == 0.0);
        CHECK(t2[0].insufficient_seeds);
    }

    SUBCASE("empty inputs are usage errors") {
        CHECK_THROWS_AS((void)aggregate({}), UsageError);
        CHECK_THROWS_AS((void)aggregate({SeriesInput{"sma2c", 0, {}}}), UsageError);
    }

    SUBCASE("rows group by method, pool, and eval point, in sorted order") {
        // Add a second pool and a second method on a later eval point.
        for (auto& s : series) {
            MetricsRow test_row = s.rows[0];
            test_row.pool = "test";
            test_row.mean_return -= 1.0;
            s.rows.push_back(test_row);
        }
        series.push_back({"omddpg", 0, {series[0].rows[0]}});
        series.back().rows[0].episode = 2000;
        const auto t2 = aggregate(series);
        REQUIRE(t2.size() == 3);
        CHECK(t2[0].method == "omddpg");
        CHECK(t2[0].episode == 2000);
        CHECK(t2[1].method == "sma2c");
        CHECK(t2[1].pool == "test");
        CHECK(t2[2].method == "sma2c");
        CHECK(t2[2].pool == "train");
        CHECK(t2[1].mean == doctest::Approx(9.0).epsilon(1e-15));
    }

    SUBCASE("csv and json exports carry the tidy table") {
        const std::string dir = fresh_dir("aggregate_export");
        write_summary_csv(dir + "/summary.csv", table);
        std::ifstream in(dir + "/summary.csv");
        std::string header, line;
        REQUIRE(std::getline(in, header));
        CHECK(header == "step,method,pool,mean,ci_lo,ci_hi");
        REQUIRE(std::getline(in, line));
        CHECK(line.rfind("1000,sma2c,train,10,", 0) == 0);
        CHECK_FALSE(std::getline(in, line));

        write_summary_json(dir + "/summary.json", table);
        std::ifstream jin(dir + "/summary.json");
        json arr = json::parse(jin);
        REQUIRE(arr.size() == 1);
        CHECK(arr[0].at("step") == 1000);
        CHECK(arr[0].at("n_seeds") == 5);
        CHECK(arr[0].at("mean").get<double>() == doctest::Approx(10.0));
        CHECK(arr[0].at("insufficient_seeds") == false);
    }
}

TEST_CASE("metrics jsonl round-trips exactly") {
    const std::string dir = fresh_dir("metrics_roundtrip");
    const std::string path = dir + "/metrics.jsonl";
    MetricsRow a;
    a.episode = 1000;
    a.step = 25000;
    a.pool = "train";
    a.mean_return = 51.0625;
    a.per_opponent = {{0, 25.0}, {2, 77.125}};
    a.opp_reads = 0;
    a.losses = {{"total", 0.125}, {"vae", 3.5}};
    MetricsRow b = a;
    b.pool = "test";
    b.mean_return = 1.0 / 3.0;  // not exactly representable in decimal
    append_metrics_row(path, a);
    append_metrics_row(path, b);

    const auto rows = read_metrics_jsonl(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows_equal(rows[0], a));
    CHECK(rows_equal(rows[1], b));

    CHECK_THROWS_AS((void)read_metrics_jsonl(dir + "/absent.jsonl"), DataError);
    {
        std::ofstream out(path, std::ios::app);
        out << "{not json\n";
    }
    CHECK_THROWS_AS((void)read_metrics_jsonl(path), DataError);
}

TEST_CASE("the eval audit counts ids outside the requested pool") {
    const envs::Pool pool = pools_for(default_config()).train;  // ids {0, 2}
    rl::EvalResult res;
    res.per_opponent = {{0, 25.0}, {2, 60.0}};
    CHECK(audit_eval(res, pool) == 0);
    res.per_opponent[7] = 1.0;  // planted violation
    res.per_opponent[1] = 2.0;  // and another
    CHECK(audit_eval(res, pool) == 2);
}

TEST_CASE("a tiny sma2c run emits the protocol artifacts deterministically") {
    const ExperimentConfig cfg = tiny_sma2c();
    const std::string dir = fresh_dir("sma2c_tiny");
    const auto records = run(cfg, {dir, false});
    REQUIRE(records.size() == 1);
    const RunRecord& rec = records[0];
    REQUIRE_MESSAGE(rec.ok, rec.error);
    CHECK(rec.config_hash == config_hash(cfg));
    CHECK(rec.seed == 3);
    CHECK(rec.episodes == 12);
    CHECK(rec.hygiene_violations == 0);
    CHECK(rec.wall_seconds > 0.0);

    // Eval points at 4, 8, 12 episodes, each against both pools in order.
    REQUIRE(rec.metrics.size() == 6);
    for (int i = 0; i < 6; ++i) {
        const MetricsRow& row = rec.metrics[i];
        CHECK(row.episode == 4 * (i / 2 + 1));
        CHECK(row.step == row.episode * 25);
        CHECK(row.pool == (i % 2 == 0 ? "train" : "test"));
        CHECK(row.opp_reads == 0);  // latent from own stream: zero privileged reads
        CHECK(row.losses.count("total") == 1);
        CHECK(row.losses.count("vae") == 1);
        CHECK(row.losses.count("window_return") == 1);
        for (const auto& [id, ret] : row.per_opponent) {
            (void)ret;
            CHECK(pools_for(cfg).train.contains(id));
        }
        CHECK(std::isfinite(row.mean_return));
    }

    // The on-disk series is the in-memory series.
    CHECK(fs::exists(rec.checkpoint_path));
    const auto from_disk = read_metrics_jsonl(rec.metrics_path);
    REQUIRE(from_disk.size() == rec.metrics.size());
    for (std::size_t i = 0; i < from_disk.size(); ++i)
        CHECK(rows_equal(from_disk[i], rec.metrics[i]));

    // The resolved config lands next to the seed dirs and reloads verbatim.
    CHECK(config_hash(load_config(dir + "/config.json")) == rec.config_hash);

    SUBCASE("identical config and seed give an identical metrics series") {
        const auto again = run(cfg, {fresh_dir("sma2c_tiny_b"), false});
        REQUIRE(again.size() == 1);
        REQUIRE(again[0].ok);
        REQUIRE(again[0].metrics.size() == rec.metrics.size());
        for (std::size_t i = 0; i < rec.metrics.size(); ++i)
            CHECK(rows_equal(again[0].metrics[i], rec.metrics[i]));
    }

    SUBCASE("a different seed gives a different series") {
        ExperimentConfig other = cfg;
        other.seeds = {4};
        const auto again = run(other, {fresh_dir("sma2c_tiny_c"), false});
        REQUIRE(again[0].ok);
        bool any_diff = false;
        for (std::size_t i = 0; i < rec.metrics.size(); ++i)
            any_diff = any_diff || !rows_equal(again[0].metrics[i], rec.metrics[i]);
        CHECK(any_diff);
    }
}

TEST_CASE("sma2c resume replays the uninterrupted stream exactly") {
    ExperimentConfig cfg = tiny_sma2c();
    cfg.seeds = {5};
    cfg.budget_episodes = 16;
    cfg.eval_every = 4;

    const std::string dir_a = fresh_dir("sma2c_straight");
    const auto straight = run(cfg, {dir_a, false});
    REQUIRE(straight[0].ok);
    REQUIRE(straight[0].metrics.size() == 8);  // eval at 4, 8, 12, 16

    // Same experiment stopped at half the budget...
    ExperimentConfig half = cfg;
    half.budget_episodes = 8;
    REQUIRE(config_hash(half) == config_hash(cfg));  // the budget is not identity
    const std::string dir_b = fresh_dir("sma2c_resumed");
    const auto first_leg = run(half, {dir_b, false});
    REQUIRE(first_leg[0].ok);
    REQUIRE(first_leg[0].episodes == 8);
    REQUIRE(first_leg[0].metrics.size() == 4);

    // ...then resumed to the full budget: the checkpoint (params, optimizer,
    // rng, counter) must reproduce the straight run bit for bit.
    const auto second_leg = run(cfg, {dir_b, true});
    REQUIRE(second_leg[0].ok);
    CHECK(second_leg[0].episodes == 16);
    REQUIRE(second_leg[0].metrics.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(rows_equal(second_leg[0].metrics[i], straight[0].metrics[i]));

    SUBCASE("resuming a completed run is a no-op") {
        const auto third = run(cfg, {dir_b, true});
        REQUIRE(third[0].ok);
        CHECK(third[0].episodes == 16);
        CHECK(third[0].metrics.size() == 8);
    }

    SUBCASE("a checkpoint from a different experiment is refused") {
        ExperimentConfig other = cfg;
        other.sma2c.lr = 1e-3;  // different hash
        CHECK_THROWS_AS((void)run_seed(other, 5, {dir_b, true}), ConfigError);
    }

    SUBCASE("without the resume flag the run starts over") {
        const auto fresh = run(half, {dir_b, false});
        REQUIRE(fresh[0].ok);
        CHECK(fresh[0].episodes == 8);
        CHECK(fresh[0].metrics.size() == 4);  // file truncated, not appended
    }
}

TEST_CASE("a tiny omddpg run pretrains, trains, checkpoints, and resumes") {
    const ExperimentConfig cfg = tiny_omddpg();
    const std::string dir = fresh_dir("omddpg_tiny");
    const auto records = run(cfg, {dir, false});
    REQUIRE(records.size() == 1);
    const RunRecord& rec = records[0];
    REQUIRE_MESSAGE(rec.ok, rec.error);
    CHECK(rec.episodes == 6);
    CHECK(rec.hygiene_violations == 0);
    REQUIRE(rec.metrics.size() == 4);  // eval at 3 and 6, two pools each
    for (const MetricsRow& row : rec.metrics) {
        CHECK(row.opp_reads > 0);  // latent from the opponent stream is privileged
        CHECK(row.losses.count("critic") == 1);
        CHECK(row.losses.count("epsilon") == 1);
        CHECK(std::isfinite(row.mean_return));
    }
    CHECK(rec.metrics[0].episode == 3);
    CHECK(rec.metrics[2].episode == 6);
    CHECK(rec.metrics[2].step == 150);  // 6 episodes x horizon 25

    SUBCASE("the run is deterministic") {
        const auto again = run(cfg, {fresh_dir("omddpg_tiny_b"), false});
        REQUIRE(again[0].ok);
        REQUIRE(again[0].metrics.size() == rec.metrics.size());
        for (std::size_t i = 0; i < rec.metrics.size(); ++i)
            CHECK(rows_equal(again[0].metrics[i], rec.metrics[i]));
    }

    SUBCASE("resume skips pretraining and extends the series append-only") {
        ExperimentConfig more = cfg;
        more.budget_episodes = 12;
        const auto extended = run(more, {dir, true});
        REQUIRE_MESSAGE(extended[0].ok, extended[0].error);
        CHECK(extended[0].episodes == 12);
        REQUIRE(extended[0].metrics.size() == 8);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(rows_equal(extended[0].metrics[i], rec.metrics[i]));
        CHECK(extended[0].metrics[4].episode == 9);
        CHECK(extended[0].metrics[6].episode == 12);
    }
}

TEST_CASE("checkpoints rebuild policies and encoders offline") {
    const ExperimentConfig cfg = tiny_sma2c();
    const std::string dir = fresh_dir("ckpt_rebuild");
    const auto records = run(cfg, {dir, false});
    REQUIRE(records[0].ok);
    const std::string ckpt = records[0].checkpoint_path;

    core::Rng rng(5);
    const auto res = evaluate_checkpoint(cfg, 3, ckpt, "train", rng);
    CHECK(res.episodes == 4);  // eval_episodes 4 split over the two pool ids
    CHECK(std::isfinite(res.mean_return));
    CHECK(res.opp_reads == 0);
    for (const auto& [id, ret] : res.per_opponent) {
        (void)ret;
        CHECK(pools_for(cfg).train.contains(id));
    }
    CHECK_NOTHROW((void)evaluate_checkpoint(cfg, 3, ckpt, "test", rng));
    CHECK_THROWS_AS((void)evaluate_checkpoint(cfg, 3, ckpt, "validation", rng), UsageError);
    CHECK_THROWS_AS((void)evaluate_checkpoint(cfg, 4, ckpt, "train", rng), ConfigError);
    ExperimentConfig other = cfg;
    other.sma2c.lr *= 2.0;
    CHECK_THROWS_AS((void)evaluate_checkpoint(other, 3, ckpt, "train", rng), ConfigError);

    // The rebuilt encoder is the self-side one, with the stored weights.
    const vae::TrajectoryEncoder enc = encoder_from_checkpoint(cfg, 3, ckpt);
    CHECK(enc.config().obs_dim == 6);
    CHECK(enc.config().use_actions);
    CHECK(enc.config().use_reward_done);  // the full (o, a, r, d) input mask
    core::NamedParams ps;
    enc.params(ps, "encoder");
    const json bundle = core::ckpt::read_file(ckpt);
    int compared = 0;
    for (const auto& [name, tensor] : ps) {
        REQUIRE(bundle.at("params").contains(name));
        CHECK(bundle.at("params").at(name).at("values").get<std::vector<double>>() ==
              tensor.values());
        ++compared;
    }
    CHECK(compared > 0);

    SUBCASE("omddpg checkpoints carry the opponent-side encoder") {
        const ExperimentConfig ocfg = tiny_omddpg();
        const std::string odir = fresh_dir("ckpt_rebuild_omddpg");
        const auto orecords = run(ocfg, {odir, false});
        REQUIRE_MESSAGE(orecords[0].ok, orecords[0].error);
        const auto ores =
            evaluate_checkpoint(ocfg, 11, orecords[0].checkpoint_path, "train", rng);
        CHECK(ores.opp_reads > 0);  // privileged stream at every step
        const vae::TrajectoryEncoder oenc =
            encoder_from_checkpoint(ocfg, 11, orecords[0].checkpoint_path);
        CHECK(oenc.config().obs_dim == 6);
        CHECK(oenc.config().z_dim == 2);
        CHECK_FALSE(oenc.config().use_reward_done);
    }
}

TEST_CASE("a failed seed reports its error and spares its siblings") {
    ExperimentConfig cfg = tiny_sma2c();
    cfg.seeds = {1, 2, 9};
    cfg.budget_episodes = 4;
    const std::string dir = fresh_dir("failed_seed");

    // Plant a checkpoint from a different experiment under seed 2, then ask
    // for resume: seed 2 must fail the hash check while 1 and 9 train fine.
    fs::create_directories(dir + "/seed_2");
    json bogus = {{"format", core::ckpt::kFormat},
                  {"kind", "sma2c"},
                  {"config_hash", "0000000000000000"},
                  {"seed", 2},
                  {"episode", 4}};
    core::ckpt::write_file(dir + "/seed_2/checkpoint.json", bogus);

    const auto records = run(cfg, {dir, true});
    REQUIRE(records.size() == 3);
    CHECK(records[0].ok);
    CHECK_FALSE(records[1].ok);
    CHECK(records[1].error.find("different config") != std::string::npos);
    CHECK(records[1].metrics.empty());
    CHECK(records[2].ok);
    // Distinct seeds, one experiment: every record carries the same hash.
    CHECK(records[0].config_hash == records[1].config_hash);
    CHECK(records[1].config_hash == records[2].config_hash);
    CHECK(records[0].seed == 1);
    CHECK(records[1].seed == 2);
    CHECK(records[2].seed == 9);
}

TEST_CASE("toy sma2c climbs toward the oracle plateau") {
    ExperimentConfig cfg = default_config("matrix_toy");
    cfg.seeds = {7};
    cfg.budget_episodes = 4000;
    cfg.eval_every = 500;
    cfg.eval_episodes = 40;
    cfg.sma2c.lr = 1e-3;  // smoke-scale budget wants a faster step
    cfg.sma2c.z_dim = 4;
    cfg.sma2c.hidden = 16;
    cfg.sma2c.actor_hidden = {32};
    cfg.sma2c.critic_hidden = {32};

    const auto records = run(cfg, {fresh_dir("sma2c_shape"), false});
    REQUIRE_MESSAGE(records[0].ok, records[0].error);

    const envs::Pool pool = pools_for(cfg).train;
    double oracle = 0.0;
    for (int id : pool.ids) oracle += envs::optimal_return_oracle(id);
    oracle /= static_cast<double>(pool.ids.size());

    std::vector<double> train_curve;
    for (const MetricsRow& row : records[0].metrics)
        if (row.pool == "train") train_curve.push_back(row.mean_return);
    REQUIRE(train_curve.size() == 8);

    // Seed 7 climbs 27.7 -> 49.5 against an oracle of 51.0 on this budget.
    const double early = 0.5 * (train_curve[0] + train_curve[1]);
    const double late = 0.5 * (train_curve[6] + train_curve[7]);
    CHECK(late > early);            // the smoothed return increases...
    CHECK(late > 0.85 * oracle);    // ...onto the oracle plateau
}
