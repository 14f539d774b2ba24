#include "omlab/vae/encoder.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::vae {

using namespace core;

TrajectoryEncoder::TrajectoryEncoder(Config cfg, Rng& rng) : cfg_(cfg) {
    require(cfg.obs_dim > 0 && cfg.action_count > 0 && cfg.z_dim > 0 && cfg.hidden > 0,
            "encoder: bad config");
    gru = GruCell(input_dim(), cfg.hidden, rng);
    mean_head = Dense(cfg.hidden, cfg.z_dim, rng);
    logstd_head = Dense(cfg.hidden, cfg.z_dim, rng);
}

Tensor TrajectoryEncoder::build_input(const std::vector<const std::vector<double>*>& obs_rows,
                                      const std::vector<int>& actions) const {
    require(!cfg_.use_reward_done, "encoder: this config needs reward/done inputs");
    return build_input(obs_rows, actions, {}, {});
}

Tensor TrajectoryEncoder::build_input(const std::vector<const std::vector<double>*>& obs_rows,
                                      const std::vector<int>& actions,
                                      const std::vector<double>& rewards,
                                      const std::vector<double>& dones) const {
    const int b = static_cast<int>(obs_rows.size());
    require(b > 0, "encoder: empty batch");
    require(actions.size() == obs_rows.size(), "encoder: obs/action count mismatch");
    if (cfg_.use_reward_done)
        require(rewards.size() == obs_rows.size() && dones.size() == obs_rows.size(),
                "encoder: reward/done count mismatch");
    const int d = input_dim();
    std::vector<double> flat(static_cast<size_t>(b) * d, 0.0);
    for (int i = 0; i < b; ++i) {
        const auto& o = *obs_rows[i];
        require(static_cast<int>(o.size()) == cfg_.obs_dim, "encoder: obs dim mismatch");
        size_t at = static_cast<size_t>(i) * d;
        std::copy(o.begin(), o.end(), flat.begin() + at);
        at += cfg_.obs_dim;
        if (cfg_.use_actions) {
            require(actions[i] >= 0 && actions[i] < cfg_.action_count,
                    "encoder: action out of range");
            flat[at + actions[i]] = 1.0;
            at += cfg_.action_count;
        }
        if (cfg_.use_reward_done) {
            flat[at] = rewards[i];
            flat[at + 1] = dones[i];
        }
    }
    return Tensor::constant({b, d}, std::move(flat));
}

TrajectoryEncoder::Step TrajectoryEncoder::step(const Tensor& x, const Tensor& h) const {
    Tensor hn = gru.step(x, h);
    return {hn, posterior(hn)};
}

DiagGaussian TrajectoryEncoder::posterior(const Tensor& h) const {
    return {mean_head(h), clamp(logstd_head(h), -5.0, 2.0)};
}

void TrajectoryEncoder::params(NamedParams& out, const std::string& prefix) const {
    gru.params(out, prefix + ".gru");
    mean_head.params(out, prefix + ".mean");
    logstd_head.params(out, prefix + ".logstd");
}

namespace {

std::vector<DiagGaussian> encode_stream(const TrajectoryEncoder& enc,
                                        const std::vector<std::vector<double>>& obs,
                                        const std::vector<int>& actions,
                                        const std::vector<double>* rewards) {
    require(obs.size() == actions.size(), "encode: stream length mismatch");
    std::vector<DiagGaussian> out;
    out.reserve(obs.size());
    Tensor h = enc.initial_state(1);
    for (size_t t = 0; t < obs.size(); ++t) {
        Tensor x = rewards ? enc.build_input({&obs[t]}, {actions[t]}, {(*rewards)[t]},
                                             {t + 1 == obs.size() ? 1.0 : 0.0})
                           : enc.build_input({&obs[t]}, {actions[t]});
        auto s = enc.step(x, h);
        h = s.h;
        out.push_back(s.q);
    }
    return out;
}

}  // namespace

std::vector<DiagGaussian> encode_opponent(const TrajectoryEncoder& enc,
                                          const envs::Trajectory& tr) {
    require(!enc.config().use_reward_done,
            "encode: opponent rewards are not observed; reward/done input is self-side only");
    return encode_stream(enc, tr.opp_obs, tr.opp_actions, nullptr);
}

std::vector<DiagGaussian> encode_self(const TrajectoryEncoder& enc,
                                      const envs::Trajectory& tr) {
    if (!enc.config().use_reward_done) return encode_stream(enc, tr.obs, tr.actions, nullptr);
    require(tr.rewards.size() == tr.obs.size(), "encode: reward stream length mismatch");
    return encode_stream(enc, tr.obs, tr.actions, &tr.rewards);
}

}  // namespace omlab::vae
