#pragma once

#include <cstdint>
#include <vector>

#include "omlab/core/adam.hpp"
#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/rl/a2c.hpp"
#include "omlab/vae/decoder.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::rl {

struct Sma2cConfig {
    int n_envs = 8;
    double lr = 3e-4;
    double grad_clip = 0.5;
    A2cConfig a2c;
    double c_vae = 1.0;  // weight of the VAE term in the joint loss
    double beta = 0.01;  // KL weight inside the VAE term
    vae::EncoderInputs inputs = vae::EncoderInputs::kFull;
    int z_dim = 8;
    int hidden = 64;  // encoder GRU width
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
};

// Joint training of encoder, decoder, actor, and critic: N synchronous envs,
// one rollout window = one full episode, one optimizer step per window over
// a2c_loss + c_vae * (reconstruction + beta * KL).
//
// Acting uses z ~ q(z | own stream up to t-1); after each step the (o, a, r, d)
// tuple enters the GRU, and the post-step posterior feeds the VAE terms. The
// opponent's streams are read once per episode (training-time privilege) to
// supply reconstruction targets; evaluation never touches them.
class Sma2cTrainer {
  public:
    Sma2cTrainer(envs::EnvFactory make_env, envs::Pool pool, Sma2cConfig cfg, std::uint64_t seed);

    struct WindowLog {
        A2cLosses a2c;
        double vae = 0.0;
        double total = 0.0;
        double mean_return = 0.0;
        int episodes = 0;
    };
    // One full-episode window across n_envs parallel envs + one gradient step.
    WindowLog train_window();

    long long episodes() const { return episodes_; }
    // Resuming from a checkpoint restores the episode count alongside params.
    void restore_progress(long long episodes) { episodes_ = episodes; }
    const Sma2cConfig& config() const { return cfg_; }

    vae::TrajectoryEncoder& encoder() { return enc_; }
    const vae::TrajectoryEncoder& encoder() const { return enc_; }
    vae::ActionDecoder& decoder() { return dec_; }
    core::Mlp& actor() { return actor_; }
    core::Mlp& critic() { return critic_; }
    core::NamedParams params() const;  // everything the optimizer updates
    core::Adam& optimizer() { return opt_; }
    core::Rng& rng() { return rng_; }

  private:
    struct Dims {
        int obs = 0, actions = 0, opp_obs = 0, opp_actions = 0, horizon = 0;
    };

    envs::EnvFactory make_env_;
    envs::Pool pool_;
    Sma2cConfig cfg_;
    core::Rng rng_;
    Dims dims_;
    vae::TrajectoryEncoder enc_;
    vae::ActionDecoder dec_;
    core::Mlp actor_, critic_;
    core::Adam opt_;
    long long episodes_ = 0;
};

}  // namespace omlab::rl
