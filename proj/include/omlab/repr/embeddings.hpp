#pragma once

#include <string>
#include <vector>

#include "omlab/core/random.hpp"
#include "omlab/envs/pool.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::repr {

// One latent embedding: the posterior at the t-th step of one episode.
// `episode` is a globally unique index so samples taken at different
// timesteps of the same episode can be paired.
struct EmbeddingSample {
    std::vector<double> z;
    int opponent_id = -1;
    int t = 0;  // 1-based timestep
    int episode = -1;
};

// Which side of the table conditions the encoder: the opponent's (obs, action)
// stream or the agent's own.
enum class Stream { kOpponent, kSelf };

struct CollectConfig {
    std::vector<int> timesteps = {15, 20, 25};
    int episodes_per_opponent = 200;
    // Default is the posterior mean; set to draw one reparameterized sample
    // per timestep instead.
    bool posterior_samples = false;
};

// Rolls episodes against every opponent in the pool under `policy`, encodes
// each trajectory on the requested stream, and records the posterior at the
// requested (1-based) timesteps. Dataset size = |pool| * episodes * |timesteps|.
std::vector<EmbeddingSample> collect_embeddings(const envs::EnvFactory& make_env,
                                                const envs::Pool& pool,
                                                const vae::TrajectoryEncoder& enc, Stream stream,
                                                const CollectConfig& cfg,
                                                const envs::PolicyFn& policy, core::Rng& rng);

// Same, over already-recorded trajectories (episode ids follow input order).
std::vector<EmbeddingSample> encode_trajectories(const std::vector<envs::Trajectory>& trips,
                                                 const vae::TrajectoryEncoder& enc, Stream stream,
                                                 const CollectConfig& cfg, core::Rng& rng);

// CSV with header "opponent_id,episode,t,z0,z1,...". All rows share one width.
void write_embeddings_csv(const std::string& path, const std::vector<EmbeddingSample>& samples);
std::vector<EmbeddingSample> read_embeddings_csv(const std::string& path);

}  // namespace omlab::repr
