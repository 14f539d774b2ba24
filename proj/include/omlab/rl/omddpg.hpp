#pragma once

#include <cstdint>
#include <memory>

#include "omlab/core/adam.hpp"
#include "omlab/core/random.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/rl/ddpg.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::rl {

struct OmddpgConfig {
    DdpgConfig ddpg;
};

// DDPG on the augmented observation [obs | z], with z from a pretrained,
// frozen opponent-side encoder. Every step reads the opponent's previewed
// (obs, action) tuple — a counted privileged access — so the step-t latent is
// conditioned on the opponent trajectory through t.
class OmddpgTrainer {
  public:
    OmddpgTrainer(envs::EnvFactory make_env, envs::Pool pool, vae::TrajectoryEncoder encoder,
                  const OmddpgConfig& cfg, std::uint64_t seed);

    // One episode of interaction; updates run on the configured cadence once
    // the warmup has filled the buffer. Returns the episode return.
    double train_episode();

    long long episodes() const { return episodes_; }
    long long env_steps() const { return steps_; }
    // Resuming from a checkpoint restores both counters alongside params. The
    // replay buffer is not checkpointed; it refills from a cold start and the
    // batch-size guard keeps updates paused until it can serve a batch.
    void restore_progress(long long steps, long long episodes) {
        steps_ = steps;
        episodes_ = episodes;
    }
    double epsilon() const;  // current exploration rate

    const vae::TrajectoryEncoder& encoder() const { return enc_; }
    DdpgAgent& agent() { return agent_; }
    ReplayBuffer& buffer() { return buffer_; }
    core::Adam& actor_opt() { return actor_opt_; }
    core::Adam& critic_opt() { return critic_opt_; }
    core::Rng& rng() { return rng_; }
    DdpgLosses last_losses() const { return last_losses_; }

  private:
    envs::EnvFactory make_env_;
    envs::Pool pool_;
    OmddpgConfig cfg_;
    core::Rng rng_;
    vae::TrajectoryEncoder enc_;  // frozen: no optimizer ever sees its params
    DdpgAgent agent_;
    ReplayBuffer buffer_;
    core::Adam actor_opt_, critic_opt_;
    long long steps_ = 0;
    long long episodes_ = 0;
    DdpgLosses last_losses_;
};

}  // namespace omlab::rl
