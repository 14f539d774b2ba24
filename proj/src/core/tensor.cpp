#include "omlab/core/tensor.hpp"

#include <algorithm>
#include <unordered_set>

namespace omlab::core {

namespace {

std::size_t shape_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        require(d > 0, "tensor: dimensions must be positive");
        n *= static_cast<std::size_t>(d);
    }
    require(!shape.empty(), "tensor: rank must be 1 or 2");
    require(shape.size() <= 2, "tensor: rank must be 1 or 2");
    return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->values.assign(shape_size(shape), 0.0);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::constant(std::vector<int> shape, std::vector<double> values) {
    require(shape_size(shape) == values.size(),
            "tensor: shape does not match value count");
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v) { return constant({1}, {v}); }

Tensor Tensor::param(std::vector<int> shape, std::vector<double> values) {
    Tensor t = constant(std::move(shape), std::move(values));
    t.node()->requires_grad = true;
    return t;
}

double Tensor::value() const {
    require(size() == 1, "value: tensor is not a scalar");
    return node_->values[0];
}

const std::vector<double>& Tensor::grad() const {
    require(has_grad(), "grad: no gradient present; run backward first");
    return node_->grad;
}

std::vector<double>& Tensor::mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
}

void Tensor::zero_grad() {
    node_->ensure_grad();
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::backward() const {
    require(node_ != nullptr, "backward: undefined tensor");
    require(size() == 1, "backward: loss must be a scalar");
    if (!node_->requires_grad) return;  // nothing downstream wants gradients

    // Post-order DFS over the requires_grad subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(node_.get(), 0);
    visited.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        bool descended = false;
        while (next < n->parents.size()) {
            Node* p = n->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) {
                stack.emplace_back(p, 0);
                descended = true;
                break;
            }
        }
        if (!descended) {
            order.push_back(n);
            stack.pop_back();
        }
    }

    // Interior gradients are per-sweep scratch; leaf gradients accumulate.
    for (Node* n : order) {
        n->ensure_grad();
        if (!n->parents.empty()) std::fill(n->grad.begin(), n->grad.end(), 0.0);
    }
    node_->grad[0] += 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backward_fn) (*it)->backward_fn();
}

}  // namespace omlab::core
