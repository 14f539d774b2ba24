#include "omlab/rl/ddpg.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"
#include "omlab/rl/nets.hpp"

namespace omlab::rl {

using namespace core;

namespace {

NamedParams named(const Mlp& m) {
    NamedParams ps;
    m.params(ps, "net");
    return ps;
}

// [B, dim] from one field across the batch
Tensor stack_field(const std::vector<const Transition*>& batch,
                   const std::vector<double> Transition::*field, const char* what) {
    const int b = static_cast<int>(batch.size());
    const int d = static_cast<int>((batch[0]->*field).size());
    std::vector<double> flat(static_cast<std::size_t>(b) * d);
    for (int i = 0; i < b; ++i) {
        const auto& row = batch[i]->*field;
        require(static_cast<int>(row.size()) == d, std::string("ddpg: ragged ") + what);
        std::copy(row.begin(), row.end(), flat.begin() + static_cast<std::size_t>(i) * d);
    }
    return Tensor::constant({b, d}, std::move(flat));
}

Tensor augmented(const std::vector<const Transition*>& batch, bool next) {
    Tensor obs = next ? stack_field(batch, &Transition::next_observation, "next observation")
                      : stack_field(batch, &Transition::observation, "observation");
    Tensor z = next ? stack_field(batch, &Transition::next_z_sample, "next z")
                    : stack_field(batch, &Transition::z_sample, "z");
    return concat_cols({obs, z});
}

}  // namespace

DdpgAgent::DdpgAgent(int state, int actions, const DdpgConfig& cfg, Rng& rng)
    : actor(state, cfg.actor_hidden, actions, rng),
      critic(state + actions, cfg.critic_hidden, 1, rng),
      actor_target(state, cfg.actor_hidden, actions, rng),
      critic_target(state + actions, cfg.critic_hidden, 1, rng),
      state_dim(state),
      num_actions(actions) {
    require(state > 0 && actions > 1, "ddpg: bad dimensions");
    polyak_update(named(actor), named(actor_target), 1.0);
    polyak_update(named(critic), named(critic_target), 1.0);
}

NamedParams DdpgAgent::actor_params() const {
    NamedParams ps;
    actor.params(ps, "actor");
    return ps;
}

NamedParams DdpgAgent::critic_params() const {
    NamedParams ps;
    critic.params(ps, "critic");
    return ps;
}

std::vector<double> ddpg_targets(const Mlp& actor_target, const Mlp& critic_target,
                                 const std::vector<const Transition*>& batch, double gamma,
                                 double gumbel_tau, Rng& rng) {
    require(!batch.empty(), "ddpg: empty batch");
    Tensor next_state = augmented(batch, true);
    Tensor next_action = gumbel_softmax(actor_target(next_state), gumbel_tau, rng);
    Tensor q_next = critic_target(concat_cols({next_state, next_action}));
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double mask = batch[i]->done ? 0.0 : 1.0;
        y[i] = batch[i]->reward + gamma * mask * q_next.values()[i];
    }
    return y;
}

DdpgLosses ddpg_update(DdpgAgent& agent, const std::vector<const Transition*>& batch,
                       const DdpgConfig& cfg, Adam& actor_opt, Adam& critic_opt, Rng& rng) {
    const int b = static_cast<int>(batch.size());
    require(b > 0, "ddpg: empty batch");

    Tensor state = augmented(batch, false);
    Tensor action = stack_field(batch, &Transition::action, "action");
    require(action.cols() == agent.num_actions, "ddpg: action width mismatch");

    std::vector<double> y =
        ddpg_targets(agent.actor_target, agent.critic_target, batch, cfg.gamma, cfg.gumbel_tau, rng);
    Tensor target = Tensor::constant({b, 1}, std::move(y));

    DdpgLosses losses;
    NamedParams cp = agent.critic_params();
    Tensor q = agent.critic(concat_cols({state, action}));
    Tensor critic_loss = affine(mean(square(sub(q, target))), 0.5);
    critic_opt.zero_grad();
    critic_loss.backward();
    if (cfg.grad_clip > 0.0) clip_global_norm(cp, cfg.grad_clip);
    critic_opt.step();
    losses.critic = critic_loss.values()[0];

    NamedParams ap = agent.actor_params();
    Tensor relaxed = gumbel_softmax(agent.actor(state), cfg.gumbel_tau, rng);
    Tensor actor_loss = neg(mean(agent.critic(concat_cols({state, relaxed}))));
    actor_opt.zero_grad();
    actor_loss.backward();  // stray critic grads are zeroed by the next critic step
    if (cfg.grad_clip > 0.0) clip_global_norm(ap, cfg.grad_clip);
    actor_opt.step();
    losses.actor = actor_loss.values()[0];

    polyak_update(named(agent.actor), named(agent.actor_target), cfg.rho);
    polyak_update(named(agent.critic), named(agent.critic_target), cfg.rho);
    return losses;
}

}  // namespace omlab::rl
