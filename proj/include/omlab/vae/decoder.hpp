#pragma once

#include <string>

#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"

namespace omlab::vae {

// p(a | o, z): action logits from the modeled agent's observation and the
// latent, a small tanh MLP over [obs | z].
class ActionDecoder {
  public:
    ActionDecoder() = default;
    ActionDecoder(int obs_dim, int z_dim, int action_count, core::Rng& rng);

    core::Tensor logits(const core::Tensor& obs, const core::Tensor& z) const;
    void params(core::NamedParams& out, const std::string& prefix) const;

    int action_count() const { return actions_; }

    core::Mlp net;

  private:
    int obs_dim_ = 0, z_dim_ = 0, actions_ = 0;
};

}  // namespace omlab::vae
