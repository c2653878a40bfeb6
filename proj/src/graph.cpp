#include "hsr/graph.hpp"

#include <cmath>

namespace hsr {

namespace k = kernels;

template <typename T>
void Graph<T>::check_id(NodeId id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size()))
        throw ShapeError("graph: invalid node id " + std::to_string(id));
}

template <typename T>
NodeId Graph<T>::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

template <typename T>
NodeId Graph<T>::leaf(Tensor<T>* t) {
    Node n;
    n.op = Op::Leaf;
    n.external = t;
    n.needs_grad = t->requires_grad;
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::constant(Tensor<T> t) {
    Node n;
    n.op = Op::Leaf;
    n.out = std::move(t);
    n.needs_grad = false;
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::conv2d(NodeId x, NodeId w, NodeId b, int stride, k::Pad pad) {
    check_id(x);
    check_id(w);
    check_id(b);
    Node n;
    n.op = Op::Conv2d;
    n.in0 = x;
    n.in1 = w;
    n.in2 = b;
    n.stride = stride;
    n.pad = pad;
    n.out = k::conv2d(val(x), val(w), val(b), stride, pad);
    n.needs_grad = needs(x) || needs(w) || needs(b);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::pixel_shuffle(NodeId x, int r) {
    check_id(x);
    Node n;
    n.op = Op::PixelShuffle;
    n.in0 = x;
    n.factor = r;
    n.out = k::pixel_shuffle(val(x), r);
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::pixel_unshuffle(NodeId x, int r) {
    check_id(x);
    Node n;
    n.op = Op::PixelUnshuffle;
    n.in0 = x;
    n.factor = r;
    n.out = k::pixel_unshuffle(val(x), r);
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::activation(NodeId x, k::Act kind, T slope) {
    check_id(x);
    Node n;
    n.op = Op::Activation;
    n.in0 = x;
    n.act = kind;
    n.slope = slope;
    n.out = k::activation(val(x), kind, slope);
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::global_avg_pool(NodeId x) {
    check_id(x);
    Node n;
    n.op = Op::GlobalAvgPool;
    n.in0 = x;
    n.out = k::global_avg_pool(val(x));
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::linear(NodeId x, NodeId w, NodeId b) {
    check_id(x);
    check_id(w);
    check_id(b);
    Node n;
    n.op = Op::Linear;
    n.in0 = x;
    n.in1 = w;
    n.in2 = b;
    n.out = k::linear(val(x), val(w), val(b));
    n.needs_grad = needs(x) || needs(w) || needs(b);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::add(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    Node n;
    n.op = Op::Add;
    n.in0 = a;
    n.in1 = b;
    n.out = k::add(val(a), val(b));
    n.needs_grad = needs(a) || needs(b);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::mul(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    Node n;
    n.op = Op::Mul;
    n.in0 = a;
    n.in1 = b;
    n.out = k::mul(val(a), val(b));
    n.needs_grad = needs(a) || needs(b);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::concat_channels(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    Node n;
    n.op = Op::ConcatChannels;
    n.in0 = a;
    n.in1 = b;
    n.out = k::concat_channels(val(a), val(b));
    n.needs_grad = needs(a) || needs(b);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::sum(NodeId x) {
    check_id(x);
    Node n;
    n.op = Op::Sum;
    n.in0 = x;
    n.out = Tensor<T>(Shape{1, 1, 1, 1});
    double s = 0.0;
    for (T v : val(x).data) s += static_cast<double>(v);
    n.out.data[0] = static_cast<T>(s);
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::weighted_sum(NodeId x, std::vector<T> weights) {
    check_id(x);
    if (static_cast<std::int64_t>(weights.size()) != val(x).numel())
        throw ShapeError("weighted_sum: weight count mismatch");
    Node n;
    n.op = Op::WeightedSum;
    n.in0 = x;
    n.out = Tensor<T>(Shape{1, 1, 1, 1});
    double s = 0.0;
    const auto& d = val(x).data;
    for (std::size_t i = 0; i < d.size(); ++i)
        s += static_cast<double>(d[i]) * static_cast<double>(weights[i]);
    n.out.data[0] = static_cast<T>(s);
    n.weights = std::move(weights);
    n.needs_grad = needs(x);
    return push(std::move(n));
}

template <typename T>
NodeId Graph<T>::l1_loss(NodeId pred, NodeId gt) {
    check_id(pred);
    check_id(gt);
    if (!(val(pred).shape == val(gt).shape))
        throw ShapeError("l1_loss: shape mismatch " + val(pred).shape.str() + " vs " +
                         val(gt).shape.str());
    Node n;
    n.op = Op::L1Loss;
    n.in0 = pred;
    n.in1 = gt;
    n.out = Tensor<T>(Shape{1, 1, 1, 1});
    const auto& a = val(pred).data;
    const auto& b = val(gt).data;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    n.out.data[0] = static_cast<T>(s / static_cast<double>(a.size()));
    n.needs_grad = needs(pred) || needs(gt);
    return push(std::move(n));
}

template <typename T>
const Tensor<T>& Graph<T>::value(NodeId id) const {
    check_id(id);
    return val(id);
}

template <typename T>
std::vector<T>& Graph<T>::grad_buf(NodeId id) {
    auto& g = grads_[id];
    if (g.size() != static_cast<std::size_t>(val(id).numel()))
        g.assign(static_cast<std::size_t>(val(id).numel()), T(0));
    return g;
}

template <typename T>
void Graph<T>::backward(NodeId loss) {
    check_id(loss);
    if (!(val(loss).shape == Shape{1, 1, 1, 1}))
        throw ShapeError("backward: loss must be scalar 1x1x1x1, got " + val(loss).shape.str());

    grads_.assign(nodes_.size(), {});
    grad_buf(loss)[0] = T(1);

    // Wrap node grads in tensors so kernel adjoints can be reused directly.
    auto as_tensor = [&](NodeId id, std::vector<T>& buf) {
        Tensor<T> t;
        t.shape = val(id).shape;
        t.data.swap(buf);
        return t;
    };

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.needs_grad || grads_[id].empty()) continue;
        Tensor<T> g = as_tensor(id, grads_[id]);

        switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Conv2d: {
            Tensor<T> gx, gw, gb;
            Tensor<T>*pgx = nullptr, *pgw = nullptr, *pgb = nullptr;
            if (needs(n.in0)) {
                gx.shape = val(n.in0).shape;
                gx.data.swap(grad_buf(n.in0));
                pgx = &gx;
            }
            if (needs(n.in1)) {
                gw.shape = val(n.in1).shape;
                gw.data.swap(grad_buf(n.in1));
                pgw = &gw;
            }
            if (needs(n.in2)) {
                gb.shape = val(n.in2).shape;
                gb.data.swap(grad_buf(n.in2));
                pgb = &gb;
            }
            k::conv2d_backward(val(n.in0), val(n.in1), n.stride, n.pad, g, pgx, pgw, pgb);
            if (pgx) grads_[n.in0].swap(gx.data);
            if (pgw) grads_[n.in1].swap(gw.data);
            if (pgb) grads_[n.in2].swap(gb.data);
            break;
        }
        case Op::PixelShuffle: {
            Tensor<T> gi = k::pixel_unshuffle(g, n.factor);
            auto& dst = grad_buf(n.in0);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gi.data[i];
            break;
        }
        case Op::PixelUnshuffle: {
            Tensor<T> gi = k::pixel_shuffle(g, n.factor);
            auto& dst = grad_buf(n.in0);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gi.data[i];
            break;
        }
        case Op::Activation: {
            Tensor<T> gx;
            gx.shape = val(n.in0).shape;
            gx.data.swap(grad_buf(n.in0));
            k::activation_backward(val(n.in0), n.out, n.act, n.slope, g, &gx);
            grads_[n.in0].swap(gx.data);
            break;
        }
        case Op::GlobalAvgPool: {
            Tensor<T> gx;
            gx.shape = val(n.in0).shape;
            gx.data.swap(grad_buf(n.in0));
            k::global_avg_pool_backward(val(n.in0).shape, g, &gx);
            grads_[n.in0].swap(gx.data);
            break;
        }
        case Op::Linear: {
            Tensor<T> gx, gw, gb;
            Tensor<T>*pgx = nullptr, *pgw = nullptr, *pgb = nullptr;
            if (needs(n.in0)) {
                gx.shape = val(n.in0).shape;
                gx.data.swap(grad_buf(n.in0));
                pgx = &gx;
            }
            if (needs(n.in1)) {
                gw.shape = val(n.in1).shape;
                gw.data.swap(grad_buf(n.in1));
                pgw = &gw;
            }
            if (needs(n.in2)) {
                gb.shape = val(n.in2).shape;
                gb.data.swap(grad_buf(n.in2));
                pgb = &gb;
            }
            k::linear_backward(val(n.in0), val(n.in1), g, pgx, pgw, pgb);
            if (pgx) grads_[n.in0].swap(gx.data);
            if (pgw) grads_[n.in1].swap(gw.data);
            if (pgb) grads_[n.in2].swap(gb.data);
            break;
        }
        case Op::Add: {
            for (NodeId in : {n.in0, n.in1}) {
                if (!needs(in)) continue;
                auto& dst = grad_buf(in);
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g.data[i];
            }
            break;
        }
        case Op::Mul: {
            Tensor<T> ga, gb;
            Tensor<T>*pga = nullptr, *pgb = nullptr;
            if (needs(n.in0)) {
                ga.shape = val(n.in0).shape;
                ga.data.swap(grad_buf(n.in0));
                pga = &ga;
            }
            if (needs(n.in1)) {
                gb.shape = val(n.in1).shape;
                gb.data.swap(grad_buf(n.in1));
                pgb = &gb;
            }
            k::mul_backward(val(n.in0), val(n.in1), g, pga, pgb);
            if (pga) grads_[n.in0].swap(ga.data);
            if (pgb) grads_[n.in1].swap(gb.data);
            break;
        }
        case Op::ConcatChannels: {
            Tensor<T> ga, gb;
            Tensor<T>*pga = nullptr, *pgb = nullptr;
            if (needs(n.in0)) {
                ga.shape = val(n.in0).shape;
                ga.data.swap(grad_buf(n.in0));
                pga = &ga;
            }
            if (needs(n.in1)) {
                gb.shape = val(n.in1).shape;
                gb.data.swap(grad_buf(n.in1));
                pgb = &gb;
            }
            k::concat_channels_backward(val(n.in0).shape.c, g, pga, pgb);
            if (pga) grads_[n.in0].swap(ga.data);
            if (pgb) grads_[n.in1].swap(gb.data);
            break;
        }
        case Op::Sum: {
            auto& dst = grad_buf(n.in0);
            const T gv = g.data[0];
            for (auto& v : dst) v += gv;
            break;
        }
        case Op::WeightedSum: {
            auto& dst = grad_buf(n.in0);
            const T gv = g.data[0];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gv * n.weights[i];
            break;
        }
        case Op::L1Loss: {
            const auto& a = val(n.in0).data;
            const auto& b = val(n.in1).data;
            const T gv = g.data[0] / static_cast<T>(a.size());
            // subgradient of |.| at 0 is 0
            if (needs(n.in0)) {
                auto& dst = grad_buf(n.in0);
                for (std::size_t i = 0; i < dst.size(); ++i) {
                    const T d = a[i] - b[i];
                    dst[i] += d > T(0) ? gv : (d < T(0) ? -gv : T(0));
                }
            }
            if (needs(n.in1)) {
                auto& dst = grad_buf(n.in1);
                for (std::size_t i = 0; i < dst.size(); ++i) {
                    const T d = a[i] - b[i];
                    dst[i] += d > T(0) ? -gv : (d < T(0) ? gv : T(0));
                }
            }
            break;
        }
        }

        grads_[id].swap(g.data); // restore the node's own grad
    }

    // Deposit leaf gradients.
    for (NodeId id = 0; id < static_cast<int>(nodes_.size()); ++id) {
        Node& n = nodes_[id];
        if (n.op != Op::Leaf || !n.external || !n.external->requires_grad) continue;
        if (grads_[id].empty()) continue;
        n.external->ensure_grad();
        auto& dst = n.external->grad;
        const auto& src = grads_[id];
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
}

template class Graph<float>;
template class Graph<double>;

} // namespace hsr
