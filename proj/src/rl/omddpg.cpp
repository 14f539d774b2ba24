#include "omlab/rl/omddpg.hpp"

#include <algorithm>
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

}  // namespace

OmddpgTrainer::OmddpgTrainer(envs::EnvFactory make_env, envs::Pool pool,
                             vae::TrajectoryEncoder encoder, const OmddpgConfig& cfg,
                             std::uint64_t seed)
    : make_env_(std::move(make_env)),
      pool_(std::move(pool)),
      cfg_(cfg),
      rng_(seed),
      enc_(std::move(encoder)),
      agent_([&] {
          require(!pool_.ids.empty(), "omddpg: empty opponent pool");
          auto e = make_env_(pool_.ids[0]);
          require(enc_.config().obs_dim == e->opp_obs_dim() &&
                      enc_.config().action_count == e->opp_num_actions(),
                  "omddpg: encoder was trained for a different opponent stream");
          require(!enc_.config().use_reward_done,
                  "omddpg: opponent-side encoders carry no reward/done channel");
          return DdpgAgent(e->obs_dim() + enc_.config().z_dim, e->num_actions(), cfg_.ddpg,
                           rng_);
      }()),
      buffer_(cfg_.ddpg.buffer_capacity),
      actor_opt_(agent_.actor_params(), adam_cfg(cfg_.ddpg.lr)),
      critic_opt_(agent_.critic_params(), adam_cfg(cfg_.ddpg.lr)) {}

double OmddpgTrainer::epsilon() const {
    const auto& d = cfg_.ddpg;
    if (d.eps_anneal_steps <= 0) return d.eps_end;
    const double frac = std::min(1.0, static_cast<double>(steps_) / d.eps_anneal_steps);
    return d.eps_start + frac * (d.eps_end - d.eps_start);
}

double OmddpgTrainer::train_episode() {
    auto env = make_env_(pool_.sample(rng_));
    std::vector<double> obs = env->reset(rng_);
    const int z_dim = enc_.config().z_dim;

    Tensor h = enc_.initial_state(1);
    double ep_return = 0.0;
    bool have_prev = false;
    Transition prev;

    bool done = false;
    while (!done) {
        envs::OppStep pv = env->opp_preview();
        h = enc_.gru.step(enc_.build_input({&pv.obs}, {pv.action}), h);
        std::vector<double> z = reparam_sample(enc_.posterior(h), rng_).values();

        if (have_prev) {
            prev.next_z_sample = z;
            buffer_.push(std::move(prev));
        }

        int action;
        if (rng_.uniform() < epsilon()) {
            action = rng_.uniform_int(agent_.num_actions);
        } else {
            std::vector<double> aug(obs);
            aug.insert(aug.end(), z.begin(), z.end());
            const int aug_dim = static_cast<int>(aug.size());
            Tensor x = Tensor::constant({1, aug_dim}, std::move(aug));
            // straight-through hard sample: execute the argmax of the relaxed draw
            action = argmax_rows(gumbel_softmax(agent_.actor(x), cfg_.ddpg.gumbel_tau, rng_))[0];
        }

        envs::StepResult sr = env->step(action);
        ep_return += sr.reward;
        done = sr.done;

        prev = Transition{obs,
                          z,
                          one_hot(action, agent_.num_actions),
                          sr.reward,
                          sr.obs,
                          {},  // filled when the next z is drawn
                          done};
        have_prev = true;
        obs = std::move(sr.obs);

        ++steps_;
        const auto& d = cfg_.ddpg;
        if (steps_ >= d.warmup_steps &&
            buffer_.size() >= static_cast<std::size_t>(d.batch_size) &&
            steps_ % d.update_every == 0) {
            last_losses_ =
                ddpg_update(agent_, buffer_.sample(d.batch_size, rng_), d, actor_opt_,
                            critic_opt_, rng_);
        }
    }
    // terminal next-z is masked by done in the targets; store zeros
    prev.next_z_sample.assign(z_dim, 0.0);
    buffer_.push(std::move(prev));

    ++episodes_;
    return ep_return;
}

}  // namespace omlab::rl
