#include "omlab/vae/pretrain.hpp"

#include <algorithm>
#include <map>

#include "omlab/core/error.hpp"

namespace omlab::vae {

using namespace core;

std::vector<EpochLog> pretrain_om_vae(TrajectoryEncoder& enc, ActionDecoder& dec,
                                      const std::vector<envs::Trajectory>& data,
                                      const PretrainConfig& cfg, Rng& rng) {
    require(!data.empty(), "pretrain: no trajectories");
    require(cfg.batch_size > 0, "pretrain: batch_size must be positive");
    require(cfg.lr > 0.0, "pretrain: lr must be positive");

    std::map<int, std::vector<size_t>> by_id;
    for (size_t i = 0; i < data.size(); ++i) by_id[data[i].opponent_id].push_back(i);
    std::vector<int> ids;
    for (const auto& [id, _] : by_id) ids.push_back(id);

    const bool triplets = cfg.side == Side::Opponent && cfg.loss.lambda_disc != 0.0;
    require(!triplets || ids.size() >= 2,
            "pretrain: discrimination term needs at least two opponent ids");

    NamedParams params;
    enc.params(params, "enc");
    dec.params(params, "dec");
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    Adam opt(params, acfg);

    // Uniform over the anchor's group minus the anchor itself (swap-with-last
    // trick); a singleton group has to pair the anchor with its own trajectory.
    auto draw_positive = [&](size_t anchor) -> size_t {
        const auto& group = by_id.at(data[anchor].opponent_id);
        if (group.size() == 1) return anchor;
        size_t pick = group[rng.uniform_int(static_cast<int>(group.size()) - 1)];
        if (pick == anchor) pick = group.back();
        return pick;
    };
    auto draw_negative = [&](size_t anchor) -> size_t {
        int id = ids[rng.uniform_int(static_cast<int>(ids.size()) - 1)];
        if (id == data[anchor].opponent_id) id = ids.back();
        const auto& group = by_id.at(id);
        return group[rng.uniform_int(static_cast<int>(group.size()))];
    };

    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<EpochLog> logs;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        EpochLog log;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t stop = std::min(order.size(), start + cfg.batch_size);
            const int bs = static_cast<int>(stop - start);
            std::vector<const envs::Trajectory*> anchors, pos, neg;
            for (size_t k = start; k < stop; ++k) {
                anchors.push_back(&data[order[k]]);
                if (triplets) {
                    pos.push_back(&data[draw_positive(order[k])]);
                    neg.push_back(&data[draw_negative(order[k])]);
                }
            }
            VaeLossParts parts =
                triplets ? om_vae_loss(enc, dec, anchors, pos, neg, cfg.loss, rng)
                         : sequence_vae_loss(enc, dec, anchors, cfg.side, cfg.loss.beta, rng);
            opt.zero_grad();
            parts.total.backward();
            if (cfg.grad_clip > 0.0) clip_global_norm(params, cfg.grad_clip);
            opt.step();

            log.total += parts.total.values()[0] * bs;
            log.recon += parts.recon * bs;
            log.kl += parts.kl * bs;
            log.triplet += parts.triplet * bs;
        }
        const double n = static_cast<double>(order.size());
        log.total /= n;
        log.recon /= n;
        log.kl /= n;
        log.triplet /= n;
        logs.push_back(log);
    }
    return logs;
}

}  // namespace omlab::vae
