#include "omlab/rl/sma2c.hpp"

#include <algorithm>
#include <memory>
#include <utility>

#include "omlab/core/distributions.hpp"
#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"
#include "omlab/rl/nets.hpp"

namespace omlab::rl {

using namespace core;

namespace {

AdamConfig adam_cfg(double lr) {
    AdamConfig c;
    c.lr = lr;
    return c;
}

vae::TrajectoryEncoder::Config encoder_cfg(int obs_dim, int actions, const Sma2cConfig& cfg) {
    vae::TrajectoryEncoder::Config ec;
    ec.obs_dim = obs_dim;
    ec.action_count = actions;
    ec.z_dim = cfg.z_dim;
    ec.hidden = cfg.hidden;
    vae::set_inputs(ec, cfg.inputs);
    return ec;
}

Tensor rows_tensor(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows[0].size());
    std::vector<double> flat(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        require(static_cast<int>(rows[i].size()) == d, "sma2c: ragged observation rows");
        std::copy(rows[i].begin(), rows[i].end(), flat.begin() + static_cast<std::size_t>(i) * d);
    }
    return Tensor::constant({n, d}, std::move(flat));
}

}  // namespace

Sma2cTrainer::Sma2cTrainer(envs::EnvFactory make_env, envs::Pool pool, Sma2cConfig cfg,
                           std::uint64_t seed)
    : make_env_(std::move(make_env)),
      pool_(std::move(pool)),
      cfg_(cfg),
      rng_(seed),
      dims_([&] {
          require(!pool_.ids.empty(), "sma2c: empty opponent pool");
          require(cfg_.n_envs > 0, "sma2c: need at least one env");
          auto e = make_env_(pool_.ids[0]);
          return Dims{e->obs_dim(), e->num_actions(), e->opp_obs_dim(), e->opp_num_actions(),
                      e->horizon()};
      }()),
      enc_(encoder_cfg(dims_.obs, dims_.actions, cfg_), rng_),
      dec_(dims_.opp_obs, cfg_.z_dim, dims_.opp_actions, rng_),
      actor_(dims_.obs + cfg_.z_dim, cfg_.actor_hidden, dims_.actions, rng_),
      critic_(dims_.obs + cfg_.z_dim, cfg_.critic_hidden, 1, rng_),
      opt_(params(), adam_cfg(cfg_.lr)) {}

NamedParams Sma2cTrainer::params() const {
    NamedParams ps;
    enc_.params(ps, "encoder");
    dec_.params(ps, "decoder");
    actor_.params(ps, "actor");
    critic_.params(ps, "critic");
    return ps;
}

Sma2cTrainer::WindowLog Sma2cTrainer::train_window() {
    const int n = cfg_.n_envs;

    std::vector<std::unique_ptr<envs::Env>> envs(n);
    std::vector<std::vector<double>> obs(n);
    for (int e = 0; e < n; ++e) {
        envs[e] = make_env_(pool_.sample(rng_));
        obs[e] = envs[e]->reset(rng_);
    }

    RolloutBatch batch;
    batch.n_envs = n;
    batch.bootstrap.assign(n, 0.0);

    std::vector<DiagGaussian> q_post;  // post-step posteriors for the VAE
    Tensor h = enc_.initial_state(n);
    double window_reward = 0.0;

    bool all_done = false;
    for (int t = 0; !all_done; ++t) {
        require(t < dims_.horizon, "sma2c: env ran past its declared horizon");

        // acting latent: sampled from the prefix-so-far posterior; stays in the
        // graph so actor/critic gradients reach the encoder
        Tensor z_act = reparam_sample(enc_.posterior(h), rng_);
        Tensor x = concat_cols({rows_tensor(obs), z_act});
        Tensor logits = actor_(x);
        batch.logits.push_back(logits);
        batch.values.push_back(critic_(x));

        std::vector<int> actions = sample_rows(logits, rng_);
        std::vector<double> rewards(n), dones(n);
        std::vector<const std::vector<double>*> obs_rows(n);
        for (int e = 0; e < n; ++e) obs_rows[e] = &obs[e];

        std::vector<std::vector<double>> next_obs(n);
        for (int e = 0; e < n; ++e) {
            envs::StepResult sr = envs[e]->step(actions[e]);
            rewards[e] = sr.reward;
            dones[e] = sr.done ? 1.0 : 0.0;
            next_obs[e] = std::move(sr.obs);
            window_reward += sr.reward;
        }
        require(std::all_of(dones.begin(), dones.end(),
                            [&](double d) { return d == dones[0]; }),
                "sma2c: lockstep envs disagree on episode end");

        // feed the completed (o, a, r, d) tuples, then record the post-step
        // posterior the VAE terms will use
        auto st = enc_.step(enc_.build_input(obs_rows, actions, rewards, dones), h);
        h = st.h;
        q_post.push_back(st.q);

        batch.actions.push_back(std::move(actions));
        batch.rewards.push_back(std::move(rewards));
        obs = std::move(next_obs);
        all_done = dones[0] == 1.0;
    }
    const int t_len = batch.steps();

    // reconstruction targets from the opponents' completed episodes
    std::vector<const std::vector<envs::OppStep>*> hists(n);
    for (int e = 0; e < n; ++e) {
        hists[e] = &envs[e]->opp_history();
        require(static_cast<int>(hists[e]->size()) == t_len, "sma2c: opponent history length");
    }
    Tensor vae_acc;
    std::vector<std::vector<double>> opp_obs_rows(n);
    for (int t = 0; t < t_len; ++t) {
        std::vector<int> opp_actions(n);
        for (int e = 0; e < n; ++e) {
            opp_obs_rows[e] = (*hists[e])[t].obs;
            opp_actions[e] = (*hists[e])[t].action;
        }
        Tensor z = reparam_sample(q_post[t], rng_);
        Tensor ce = neg(gather_cols(log_softmax_rows(dec_.logits(rows_tensor(opp_obs_rows), z)),
                                    opp_actions));
        Tensor term = add(sum(ce), affine(kl_to_standard_normal(q_post[t]), cfg_.beta));
        vae_acc = vae_acc.defined() ? add(vae_acc, term) : term;
    }
    Tensor vae_loss = affine(vae_acc, 1.0 / n);  // per-trajectory sum, batch mean

    WindowLog log;
    Tensor a2c_total = a2c_loss(batch, cfg_.a2c, &log.a2c);
    Tensor total = add(a2c_total, affine(vae_loss, cfg_.c_vae));

    NamedParams ps = params();
    opt_.zero_grad();
    total.backward();
    if (cfg_.grad_clip > 0.0) clip_global_norm(ps, cfg_.grad_clip);
    opt_.step();

    episodes_ += n;
    log.vae = vae_loss.values()[0];
    log.total = total.values()[0];
    log.mean_return = window_reward / n;
    log.episodes = n;
    return log;
}

}  // namespace omlab::rl
