#include "omlab/core/layers.hpp"

#include <cmath>

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::core {

namespace {

Tensor glorot(int in, int out, Rng& rng) {
    const double lim = std::sqrt(6.0 / (in + out));
    std::vector<double> v(static_cast<size_t>(in) * out);
    for (auto& x : v) x = rng.uniform(-lim, lim);
    return Tensor::param({in, out}, v);
}

}  // namespace

Dense::Dense(int in, int out, Rng& rng)
    : w(glorot(in, out, rng)), b(Tensor::param({out}, std::vector<double>(out, 0.0))) {}

Tensor Dense::operator()(const Tensor& x) const { return add(matmul(x, w), b); }

void Dense::params(NamedParams& out, const std::string& prefix) const {
    out.emplace_back(prefix + ".w", w);
    out.emplace_back(prefix + ".b", b);
}

Mlp::Mlp(int in, const std::vector<int>& hidden, int out, Rng& rng) {
    int d = in;
    for (int h : hidden) {
        layers.emplace_back(d, h, rng);
        d = h;
    }
    layers.emplace_back(d, out, rng);
}

Tensor Mlp::operator()(const Tensor& x) const {
    require(!layers.empty(), "Mlp: not initialized");
    Tensor h = x;
    for (size_t i = 0; i + 1 < layers.size(); ++i) h = tanh(layers[i](h));
    return layers.back()(h);
}

void Mlp::params(NamedParams& out, const std::string& prefix) const {
    for (size_t i = 0; i < layers.size(); ++i)
        layers[i].params(out, prefix + ".l" + std::to_string(i));
}

GruCell::GruCell(int in_dim, int hidden_dim, Rng& rng)
    : in(in_dim),
      hidden(hidden_dim),
      w_x(glorot(in_dim, 3 * hidden_dim, rng)),
      u_zr(glorot(hidden_dim, 2 * hidden_dim, rng)),
      u_c(glorot(hidden_dim, hidden_dim, rng)),
      b(Tensor::param({3 * hidden_dim}, std::vector<double>(3 * hidden_dim, 0.0))) {}

Tensor GruCell::step(const Tensor& x, const Tensor& h) const {
    require(x.cols() == in && h.cols() == hidden, "GruCell: bad input shape");
    const int H = hidden;
    Tensor xw = add(matmul(x, w_x), b);        // [B, 3H]
    Tensor hu = matmul(h, u_zr);               // [B, 2H]
    Tensor z = sigmoid(add(slice_cols(xw, 0, H), slice_cols(hu, 0, H)));
    Tensor r = sigmoid(add(slice_cols(xw, H, H), slice_cols(hu, H, H)));
    Tensor c = tanh(add(slice_cols(xw, 2 * H, H), matmul(mul(r, h), u_c)));
    return add(sub(h, mul(z, h)), mul(z, c));
}

Tensor GruCell::initial_state(int batch) const { return Tensor::zeros({batch, hidden}); }

void GruCell::params(NamedParams& out, const std::string& prefix) const {
    out.emplace_back(prefix + ".w_x", w_x);
    out.emplace_back(prefix + ".u_zr", u_zr);
    out.emplace_back(prefix + ".u_c", u_c);
    out.emplace_back(prefix + ".b", b);
}

}  // namespace omlab::core
