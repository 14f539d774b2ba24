#pragma once

#include <string>
#include <vector>

#include "omlab/core/distributions.hpp"
#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"
#include "omlab/envs/trajectory.hpp"

namespace omlab::vae {

// Recurrent posterior q(z | trajectory prefix): a GRU over per-step
// [obs | one-hot action] tuples with Gaussian heads on the hidden state.
// log_std is clamped to [-5, 2].
class TrajectoryEncoder {
  public:
    struct Config {
        int obs_dim = 0;
        int action_count = 0;
        int z_dim = 8;
        int hidden = 64;
        bool use_actions = true;       // ablation: drop the action one-hot
        bool use_reward_done = false;  // self-modeling stream carries (r, d) too
    };

    TrajectoryEncoder() = default;
    TrajectoryEncoder(Config cfg, core::Rng& rng);

    const Config& config() const { return cfg_; }
    int input_dim() const {
        return cfg_.obs_dim + (cfg_.use_actions ? cfg_.action_count : 0) +
               (cfg_.use_reward_done ? 2 : 0);
    }

    // [B, input_dim] row per (obs, action) pair. Only for encoders without the
    // reward/done channel.
    core::Tensor build_input(const std::vector<const std::vector<double>*>& obs_rows,
                             const std::vector<int>& actions) const;
    // Full (obs, action, reward, done) tuples; rewards/dones are ignored (and
    // may be empty) unless the config enables them.
    core::Tensor build_input(const std::vector<const std::vector<double>*>& obs_rows,
                             const std::vector<int>& actions,
                             const std::vector<double>& rewards,
                             const std::vector<double>& dones) const;

    core::Tensor initial_state(int batch) const { return gru.initial_state(batch); }

    struct Step {
        core::Tensor h;
        core::DiagGaussian q;
    };
    Step step(const core::Tensor& x, const core::Tensor& h) const;

    // Gaussian heads over an existing hidden state (no GRU step). This is the
    // acting-time posterior: before the step-t tuple is fed, h carries the
    // prefix up to t-1.
    core::DiagGaussian posterior(const core::Tensor& h) const;

    void params(core::NamedParams& out, const std::string& prefix) const;

    core::GruCell gru;
    core::Dense mean_head;
    core::Dense logstd_head;

  private:
    Config cfg_;
};

// Per-step posteriors over one trajectory, read from the opponent's side
// (its obs/action stream) or the agent's own (obs/action, plus reward/done
// when the encoder is configured for them).
std::vector<core::DiagGaussian> encode_opponent(const TrajectoryEncoder& enc,
                                                const envs::Trajectory& tr);
std::vector<core::DiagGaussian> encode_self(const TrajectoryEncoder& enc,
                                            const envs::Trajectory& tr);

// The three encoder-input variants the self-modeling ablation compares.
enum class EncoderInputs { kObsOnly, kObsAction, kFull };

inline void set_inputs(TrajectoryEncoder::Config& cfg, EncoderInputs in) {
    cfg.use_actions = in != EncoderInputs::kObsOnly;
    cfg.use_reward_done = in == EncoderInputs::kFull;
}

}  // namespace omlab::vae
