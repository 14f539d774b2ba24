#include "omlab/vae/losses.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::vae {

using namespace core;

Tensor discrimination(const Tensor& z, const Tensor& z_plus, const Tensor& z_minus) {
    require(z.rank() == 2, "discrimination: embeddings must be [B, z]");
    require(z.shape() == z_plus.shape() && z.shape() == z_minus.shape(),
            "discrimination: shape mismatch");
    auto dist = [](const Tensor& a, const Tensor& b) {
        return omlab::core::sqrt(rowsum(square(sub(a, b))));  // [B,1]
    };
    return square(sigmoid(sub(dist(z, z_plus), dist(z, z_minus))));
}

namespace {

struct StreamRef {
    const std::vector<std::vector<double>>* obs;
    const std::vector<int>* act;
};

StreamRef side_stream(const envs::Trajectory& tr, Side side) {
    if (side == Side::Opponent) return {&tr.opp_obs, &tr.opp_actions};
    return {&tr.obs, &tr.actions};
}

int common_length(const std::vector<const envs::Trajectory*>& batch) {
    require(!batch.empty(), "vae loss: empty batch");
    const int t = batch[0]->length();
    require(t > 0, "vae loss: empty trajectory");
    for (const auto* tr : batch) {
        require(tr->length() == t, "vae loss: trajectory lengths disagree");
        require(static_cast<int>(tr->opp_actions.size()) == t,
                "vae loss: opponent stream length mismatch");
    }
    return t;
}

// Encoder input for one timestep across the batch, respecting the side and
// the encoder's input channels.
Tensor step_input(const TrajectoryEncoder& enc, const std::vector<const envs::Trajectory*>& batch,
                  Side side, int t, int t_len) {
    const int b = static_cast<int>(batch.size());
    std::vector<const std::vector<double>*> obs_rows(b);
    std::vector<int> actions(b);
    for (int i = 0; i < b; ++i) {
        StreamRef s = side_stream(*batch[i], side);
        obs_rows[i] = &s.obs->at(t);
        actions[i] = s.act->at(t);
    }
    if (!enc.config().use_reward_done) return enc.build_input(obs_rows, actions);
    require(side == Side::Self, "vae loss: reward/done inputs exist only on the self side");
    std::vector<double> rewards(b);
    for (int i = 0; i < b; ++i) {
        require(static_cast<int>(batch[i]->rewards.size()) == t_len,
                "vae loss: reward stream length mismatch");
        rewards[i] = batch[i]->rewards[t];
    }
    std::vector<double> dones(b, t + 1 == t_len ? 1.0 : 0.0);
    return enc.build_input(obs_rows, actions, rewards, dones);
}

Tensor opp_obs_tensor(const std::vector<const envs::Trajectory*>& batch, int t) {
    const int b = static_cast<int>(batch.size());
    const int d = static_cast<int>(batch[0]->opp_obs[t].size());
    std::vector<double> flat(static_cast<size_t>(b) * d);
    for (int i = 0; i < b; ++i) {
        const auto& row = batch[i]->opp_obs[t];
        require(static_cast<int>(row.size()) == d, "vae loss: opponent obs widths disagree");
        std::copy(row.begin(), row.end(), flat.begin() + static_cast<size_t>(i) * d);
    }
    return Tensor::constant({b, d}, std::move(flat));
}

struct SeqOut {
    Tensor per_traj;  // [B,1]: sum_t (ce + beta*kl)
    DiagGaussian final_q;
    double recon_mean = 0.0;
    double kl_mean = 0.0;
};

SeqOut run_sequence(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                    const std::vector<const envs::Trajectory*>& batch, Side side, double beta,
                    Rng& rng) {
    const int t_len = common_length(batch);
    const int b = static_cast<int>(batch.size());

    SeqOut out;
    Tensor h = enc.initial_state(b);
    Tensor acc;
    for (int t = 0; t < t_len; ++t) {
        auto st = enc.step(step_input(enc, batch, side, t, t_len), h);
        h = st.h;
        out.final_q = st.q;

        Tensor z = reparam_sample(st.q, rng);
        std::vector<int> targets(b);
        for (int i = 0; i < b; ++i) targets[i] = batch[i]->opp_actions[t];
        Tensor logits = dec.logits(opp_obs_tensor(batch, t), z);
        Tensor ce = neg(gather_cols(log_softmax_rows(logits), targets));  // [B,1]
        Tensor kl = kl_rows(st.q);

        for (double v : ce.values()) out.recon_mean += v / b;
        for (double v : kl.values()) out.kl_mean += v / b;

        Tensor term = (beta == 0.0) ? ce : add(ce, affine(kl, beta));
        acc = acc.defined() ? add(acc, term) : term;
    }
    out.per_traj = acc;
    return out;
}

}  // namespace

VaeLossParts sequence_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                               const std::vector<const envs::Trajectory*>& batch, Side side,
                               double beta, Rng& rng) {
    SeqOut seq = run_sequence(enc, dec, batch, side, beta, rng);
    VaeLossParts parts;
    parts.total = mean(seq.per_traj);
    parts.recon = seq.recon_mean;
    parts.kl = seq.kl_mean;
    return parts;
}

Tensor encode_final_mean(const TrajectoryEncoder& enc,
                         const std::vector<const envs::Trajectory*>& batch, Side side) {
    const int t_len = common_length(batch);
    Tensor h = enc.initial_state(static_cast<int>(batch.size()));
    for (int t = 0; t < t_len; ++t) h = enc.gru.step(step_input(enc, batch, side, t, t_len), h);
    return enc.mean_head(h);
}

VaeLossParts om_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                         const std::vector<const envs::Trajectory*>& anchors,
                         const std::vector<const envs::Trajectory*>& positives,
                         const std::vector<const envs::Trajectory*>& negatives,
                         const VaeLossConfig& cfg, Rng& rng) {
    require(anchors.size() == positives.size() && anchors.size() == negatives.size(),
            "om_vae_loss: triplet lists must align");
    SeqOut seq = run_sequence(enc, dec, anchors, Side::Opponent, cfg.beta, rng);

    VaeLossParts parts;
    if (cfg.lambda_disc == 0.0) {
        parts.total = mean(seq.per_traj);
    } else {
        Tensor zp = encode_final_mean(enc, positives, Side::Opponent);
        Tensor zn = encode_final_mean(enc, negatives, Side::Opponent);
        Tensor d = discrimination(seq.final_q.mean, zp, zn);
        for (double v : d.values()) parts.triplet += v / static_cast<double>(anchors.size());
        parts.total = mean(add(seq.per_traj, affine(d, cfg.lambda_disc)));
    }
    parts.recon = seq.recon_mean;
    parts.kl = seq.kl_mean;
    return parts;
}

VaeLossParts self_vae_loss(const TrajectoryEncoder& enc, const ActionDecoder& dec,
                           const std::vector<const envs::Trajectory*>& batch, double beta,
                           Rng& rng) {
    return sequence_vae_loss(enc, dec, batch, Side::Self, beta, rng);
}

}  // namespace omlab::vae
