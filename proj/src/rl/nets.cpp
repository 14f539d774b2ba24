#include "omlab/rl/nets.hpp"

#include <cmath>

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::rl {

using namespace core;

Tensor gumbel_softmax(const Tensor& logits, double temperature, Rng& rng) {
    require(logits.rank() == 2, "gumbel_softmax: logits must be [B, A]");
    require(temperature > 0.0, "gumbel_softmax: temperature must be positive");
    std::vector<double> noise(logits.size());
    for (auto& g : noise) g = rng.gumbel();
    Tensor g = Tensor::constant(logits.shape(), std::move(noise));
    return softmax_rows(affine(add(logits, g), 1.0 / temperature));
}

int argmax_row(const std::vector<double>& row) {
    require(!row.empty(), "argmax_row: empty row");
    int best = 0;
    for (int i = 1; i < static_cast<int>(row.size()); ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

std::vector<int> argmax_rows(const Tensor& t) {
    require(t.rank() == 2, "argmax_rows: need a [B, A] tensor");
    const int r = t.rows(), c = t.cols();
    std::vector<int> out(r);
    for (int i = 0; i < r; ++i) {
        int best = 0;
        for (int j = 1; j < c; ++j)
            if (t.values()[i * c + j] > t.values()[i * c + best]) best = j;
        out[i] = best;
    }
    return out;
}

std::vector<int> sample_rows(const Tensor& logits, Rng& rng) {
    require(logits.rank() == 2, "sample_rows: need a [B, A] tensor");
    const int r = logits.rows(), c = logits.cols();
    std::vector<int> out(r);
    std::vector<double> probs(c);
    for (int i = 0; i < r; ++i) {
        double mx = logits.values()[i * c];
        for (int j = 1; j < c; ++j) mx = std::max(mx, logits.values()[i * c + j]);
        double z = 0.0;
        for (int j = 0; j < c; ++j) {
            probs[j] = std::exp(logits.values()[i * c + j] - mx);
            z += probs[j];
        }
        for (auto& p : probs) p /= z;
        out[i] = rng.categorical(probs);
    }
    return out;
}

std::vector<double> one_hot(int index, int width) {
    require(index >= 0 && index < width, "one_hot: index out of range");
    std::vector<double> v(width, 0.0);
    v[index] = 1.0;
    return v;
}

void polyak_update(const NamedParams& src, const NamedParams& dst, double rho) {
    require(src.size() == dst.size(), "polyak: parameter lists differ in length");
    require(rho >= 0.0 && rho <= 1.0, "polyak: rho must lie in [0, 1]");
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto& s = src[i].second.node()->values;
        auto& d = dst[i].second.node()->values;
        require(s.size() == d.size(), "polyak: parameter shapes differ");
        for (std::size_t k = 0; k < s.size(); ++k) d[k] = (1.0 - rho) * d[k] + rho * s[k];
    }
}

}  // namespace omlab::rl
