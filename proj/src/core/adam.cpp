#include "omlab/core/adam.hpp"

#include <cmath>

#include "omlab/core/error.hpp"

namespace omlab::core {

Adam::Adam(NamedParams params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    slots_.reserve(params_.size());
    for (auto& [name, p] : params_) {
        require(p.defined() && p.requires_grad(), "Adam: param '" + name + "' not trainable");
        slots_.push_back({std::vector<double>(p.size(), 0.0), std::vector<double>(p.size(), 0.0)});
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        Tensor& p = params_[i].second;
        if (!p.has_grad()) continue;  // untouched this round
        auto& vals = p.mutable_values();
        const auto& g = p.grad();
        auto& m = slots_[i].m;
        auto& v = slots_[i].v;
        for (size_t j = 0; j < vals.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            vals[j] -= cfg_.lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg_.eps);
        }
    }
}

void Adam::zero_grad() {
    for (auto& [name, p] : params_) p.zero_grad();
}

void Adam::restore(std::vector<Slot> slots, int64_t t) {
    require(slots.size() == params_.size(), "Adam::restore: slot count mismatch");
    for (size_t i = 0; i < slots.size(); ++i)
        require(slots[i].m.size() == params_[i].second.size() &&
                    slots[i].v.size() == params_[i].second.size(),
                "Adam::restore: slot size mismatch for '" + params_[i].first + "'");
    slots_ = std::move(slots);
    t_ = t;
}

double clip_global_norm(const NamedParams& params, double max_norm) {
    require(max_norm > 0.0, "clip_global_norm: max_norm must be positive");
    double sq = 0.0;
    for (const auto& [name, p] : params) {
        if (!p.has_grad()) continue;
        for (double g : p.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (const auto& [name, p] : params) {
            if (!p.has_grad()) continue;
            for (double& g : p.node()->grad) g *= scale;
        }
    }
    return norm;
}

}  // namespace omlab::core
