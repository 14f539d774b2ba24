#pragma once

#include <vector>

#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/vae/decoder.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::vae {

// Which side of the trajectory the encoder reads. The decoder always
// reconstructs the modeled agent's actions; encoding the agent's own stream
// instead is what removes the evaluation-time dependence on opponent access.
enum class Side { Opponent, Self };

// Triplet discrimination score per row: sigma(|z - z+| - |z - z-|)^2.
// Driving it down pulls same-source embeddings together and pushes
// different-source ones apart.
core::Tensor discrimination(const core::Tensor& z, const core::Tensor& z_plus,
                            const core::Tensor& z_minus);

struct VaeLossConfig {
    double beta = 0.01;        // KL weight
    double lambda_disc = 1.0;  // discrimination weight (opponent-side loss only)
};

struct VaeLossParts {
    core::Tensor total;  // scalar, mean over the batch
    double recon = 0.0;  // batch means of the parts, for logging
    double kl = 0.0;
    double triplet = 0.0;
};

// Sum over timesteps of [action cross-entropy + beta * KL], one reparameterized
// z sample per step, averaged over the batch. All trajectories must share one
// length.
VaeLossParts sequence_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                               const std::vector<const envs::Trajectory*>& batch, Side side,
                               double beta, core::Rng& rng);

// Final-step posterior mean of each trajectory, [B, z].
core::Tensor encode_final_mean(const TrajectoryEncoder& enc,
                               const std::vector<const envs::Trajectory*>& batch, Side side);

// Opponent-side ELBO plus the discrimination term on final-step means.
// positives[i] comes from the same opponent as anchors[i], negatives[i] from a
// different one.
VaeLossParts om_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                         const std::vector<const envs::Trajectory*>& anchors,
                         const std::vector<const envs::Trajectory*>& positives,
                         const std::vector<const envs::Trajectory*>& negatives,
                         const VaeLossConfig& cfg, core::Rng& rng);

// Self-side ELBO; no discrimination term.
VaeLossParts self_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                           const std::vector<const envs::Trajectory*>& batch, double beta,
                           core::Rng& rng);

}  // namespace omlab::vae
