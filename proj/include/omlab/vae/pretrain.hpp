#pragma once

#include <vector>

#include "omlab/core/adam.hpp"
#include "omlab/core/random.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/vae/losses.hpp"

namespace omlab::vae {

struct PretrainConfig {
    int epochs = 50;
    int batch_size = 16;
    double lr = 3e-4;
    double grad_clip = 0.5;
    VaeLossConfig loss;
    Side side = Side::Opponent;
};

struct EpochLog {
    double total = 0.0;
    double recon = 0.0;
    double kl = 0.0;
    double triplet = 0.0;
};

// Gradient training of encoder+decoder on a fixed trajectory corpus.
// Opponent side pairs each anchor with a same-id positive and a different-id
// negative for the discrimination term; Self side trains the plain ELBO.
std::vector<EpochLog> pretrain_om_vae(TrajectoryEncoder& enc, ActionDecoder& dec,
                                      const std::vector<envs::Trajectory>& data,
                                      const PretrainConfig& cfg, core::Rng& rng);

}  // namespace omlab::vae
