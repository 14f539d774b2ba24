#include "omlab/vae/decoder.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::vae {

using namespace core;

ActionDecoder::ActionDecoder(int obs_dim, int z_dim, int action_count, Rng& rng)
    : net(obs_dim + z_dim, {64, 64}, action_count, rng),
      obs_dim_(obs_dim),
      z_dim_(z_dim),
      actions_(action_count) {}

Tensor ActionDecoder::logits(const Tensor& obs, const Tensor& z) const {
    require(obs.cols() == obs_dim_ && z.cols() == z_dim_, "decoder: bad input widths");
    require(obs.rows() == z.rows(), "decoder: batch sizes disagree");
    return net(concat_cols({obs, z}));
}

void ActionDecoder::params(NamedParams& out, const std::string& prefix) const {
    net.params(out, prefix + ".net");
}

}  // namespace omlab::vae
