#pragma once

#include <vector>

#include "hsr/kernels.hpp"
#include "hsr/tensor.hpp"

namespace hsr {

using NodeId = int;

// Define-by-run tape. Ops execute eagerly as they are recorded; nodes are
// stored in issue order, which is a topological order by construction.
// backward() walks the tape once in reverse and accumulates gradients into
// every requires_grad leaf tensor's grad buffer.
//
// Leaf tensors are owned by the caller and must outlive the graph. A graph
// is single-threaded; distinct graphs may run on distinct threads.
template <typename T>
class Graph {
public:
    // External leaf; gradients flow into t->grad when t->requires_grad.
    NodeId leaf(Tensor<T>* t);

    // Graph-owned input that never receives gradients.
    NodeId constant(Tensor<T> t);

    NodeId conv2d(NodeId x, NodeId w, NodeId b, int stride, kernels::Pad pad);
    NodeId pixel_shuffle(NodeId x, int r);
    NodeId pixel_unshuffle(NodeId x, int r);
    NodeId activation(NodeId x, kernels::Act kind, T slope = T(0));
    NodeId global_avg_pool(NodeId x);
    NodeId linear(NodeId x, NodeId w, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId concat_channels(NodeId a, NodeId b);

    // Reductions to a 1x1x1x1 scalar.
    NodeId sum(NodeId x);
    NodeId weighted_sum(NodeId x, std::vector<T> weights);
    NodeId l1_loss(NodeId pred, NodeId gt);

    const Tensor<T>& value(NodeId id) const;
    T scalar(NodeId id) const { return value(id).data[0]; }

    // loss must be scalar-shaped; gradients accumulate additively across
    // fan-out and into leaf grad buffers.
    void backward(NodeId loss);

    // Gradient w.r.t. any node, valid after backward(). Empty if the node
    // did not require grad.
    const std::vector<T>& node_grad(NodeId id) const { return grads_.at(id); }

    int size() const { return static_cast<int>(nodes_.size()); }

private:
    enum class Op {
        Leaf,
        Conv2d,
        PixelShuffle,
        PixelUnshuffle,
        Activation,
        GlobalAvgPool,
        Linear,
        Add,
        Mul,
        ConcatChannels,
        Sum,
        WeightedSum,
        L1Loss,
    };

    struct Node {
        Op op;
        NodeId in0 = -1, in1 = -1, in2 = -1;
        Tensor<T> out;            // unused for external leaves
        Tensor<T>* external = nullptr;
        bool needs_grad = false;
        // op attributes
        int stride = 1;
        int factor = 1;
        kernels::Pad pad = kernels::Pad::Reflect;
        kernels::Act act = kernels::Act::Identity;
        T slope = T(0);
        std::vector<T> weights;   // WeightedSum
    };

    const Tensor<T>& val(NodeId id) const {
        const Node& n = nodes_[id];
        return n.external ? *n.external : n.out;
    }

    bool needs(NodeId id) const { return id >= 0 && nodes_[id].needs_grad; }

    NodeId push(Node n);
    void check_id(NodeId id) const;
    std::vector<T>& grad_buf(NodeId id);

    std::vector<Node> nodes_;
    std::vector<std::vector<T>> grads_;
};

} // namespace hsr
