#pragma once

#include <string>
#include <vector>

#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"

namespace omlab::core {

// Fully connected layer, Glorot-uniform weights, zero bias.
struct Dense {
    Tensor w;  // [in, out]
    Tensor b;  // [out]

    Dense() = default;
    Dense(int in, int out, Rng& rng);

    Tensor operator()(const Tensor& x) const;
    void params(NamedParams& out, const std::string& prefix) const;
};

// Dense stack with tanh between layers and a linear head.
struct Mlp {
    std::vector<Dense> layers;

    Mlp() = default;
    Mlp(int in, const std::vector<int>& hidden, int out, Rng& rng);

    Tensor operator()(const Tensor& x) const;
    void params(NamedParams& out, const std::string& prefix) const;
};

// GRU cell:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   c = tanh(x Wc + (r*h) Uc + bc)
//   h' = (1-z)*h + z*c
// Input-side weights and biases are packed in gate order z|r|c.
struct GruCell {
    int in = 0;
    int hidden = 0;
    Tensor w_x;   // [in, 3H]
    Tensor u_zr;  // [H, 2H]
    Tensor u_c;   // [H, H]
    Tensor b;     // [3H]

    GruCell() = default;
    GruCell(int in_dim, int hidden_dim, Rng& rng);

    // x: [B, in], h: [B, H] -> [B, H]
    Tensor step(const Tensor& x, const Tensor& h) const;
    Tensor initial_state(int batch) const;
    void params(NamedParams& out, const std::string& prefix) const;
};

}  // namespace omlab::core
