#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "omlab/core/error.hpp"

namespace omlab::core {

// One vertex of the computation graph. Ops allocate a Node per result and
// wire a backward closure that scatters the node's gradient into its parents.
// Rank is at most 2: {n} vectors and {rows, cols} matrices; scalars are {1}.
struct Node {
    std::vector<int> shape;
    std::vector<double> values;
    std::vector<double> grad;  // sized lazily, same length as values
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void()> backward_fn;

    std::size_t size() const { return values.size(); }

    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    }
};

// Value-semantics handle to a graph node. Copies share the node.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor constant(std::vector<int> shape, std::vector<double> values);
    static Tensor scalar(double v);
    // Leaf with requires_grad set; the unit every optimizer and checkpoint touches.
    static Tensor param(std::vector<int> shape, std::vector<double> values);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int rank() const { return static_cast<int>(node_->shape.size()); }
    std::size_t size() const { return node_->values.size(); }

    // Row/column view treating rank-1 tensors as a single row.
    int rows() const { return rank() == 2 ? node_->shape[0] : 1; }
    int cols() const { return rank() == 2 ? node_->shape[1] : node_->shape[0]; }

    const std::vector<double>& values() const { return node_->values; }
    std::vector<double>& mutable_values() { return node_->values; }
    double value() const;  // scalar tensors only

    bool requires_grad() const { return node_->requires_grad; }
    bool has_grad() const { return node_->grad.size() == node_->values.size(); }
    const std::vector<double>& grad() const;
    std::vector<double>& mutable_grad();
    void zero_grad();

    // Reverse-mode sweep from a scalar. Gradients of leaf tensors accumulate
    // across calls; gradients of interior nodes are rewritten each call.
    void backward() const;

    const std::shared_ptr<Node>& node() const { return node_; }
    explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<Node> node_;
};

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

inline void append_params(NamedParams& out, const std::string& prefix,
                          const NamedParams& items) {
    for (const auto& [name, t] : items) out.emplace_back(prefix + name, t);
}

}  // namespace omlab::core
