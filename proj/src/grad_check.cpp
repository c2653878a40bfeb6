#include "hsr/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace hsr {

namespace {

double eval_loss(const OpBuilder& op, std::vector<Tensor<double>>& inputs,
                 const std::vector<double>& loss_weights) {
    Graph<double> g;
    std::vector<NodeId> ids;
    ids.reserve(inputs.size());
    for (auto& t : inputs) ids.push_back(g.leaf(&t));
    const NodeId out = op(g, ids);
    const NodeId loss = g.weighted_sum(out, loss_weights);
    return g.scalar(loss);
}

std::vector<std::int64_t> sample_indices(std::int64_t numel, int max_samples, Rng& rng) {
    std::vector<std::int64_t> idx;
    if (numel <= max_samples) {
        idx.resize(numel);
        for (std::int64_t i = 0; i < numel; ++i) idx[i] = i;
        return idx;
    }
    std::unordered_set<std::int64_t> seen;
    idx.reserve(max_samples);
    while (static_cast<int>(idx.size()) < max_samples) {
        const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(numel)));
        if (seen.insert(i).second) idx.push_back(i);
    }
    return idx;
}

} // namespace

CheckReport grad_check(const OpBuilder& op, const std::vector<Shape>& input_shapes,
                       std::uint64_t seed, double tolerance,
                       int max_samples_per_input, double fd_step, double corrupt_scale) {
    std::vector<Tensor<double>> inputs;
    inputs.reserve(input_shapes.size());
    for (std::size_t i = 0; i < input_shapes.size(); ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        auto t = Tensor<double>::uniform(input_shapes[i], rng, -1.0, 1.0);
        t.requires_grad = true;
        inputs.push_back(std::move(t));
    }

    // Analytic pass.
    std::vector<double> loss_weights;
    {
        Graph<double> g;
        std::vector<NodeId> ids;
        for (auto& t : inputs) ids.push_back(g.leaf(&t));
        const NodeId out = op(g, ids);
        Rng wrng(mix_seed(seed, "loss-weights"));
        loss_weights.resize(static_cast<std::size_t>(g.value(out).numel()));
        for (auto& w : loss_weights) w = wrng.uniform(-1.0, 1.0);
        const NodeId loss = g.weighted_sum(out, loss_weights);
        g.backward(loss);
    }

    CheckReport report;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto& t = inputs[i];
        Rng srng(mix_seed(mix_seed(seed, "sample"), static_cast<std::uint64_t>(i)));
        for (const std::int64_t j : sample_indices(t.numel(), max_samples_per_input, srng)) {
            const double saved = t.data[j];
            t.data[j] = saved + fd_step;
            const double lp = eval_loss(op, inputs, loss_weights);
            t.data[j] = saved - fd_step;
            const double lm = eval_loss(op, inputs, loss_weights);
            t.data[j] = saved;

            const double numeric = (lp - lm) / (2.0 * fd_step);
            const double analytic = t.grad[j] * corrupt_scale;
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-2});
            report.max_rel_err = std::max(report.max_rel_err,
                                          std::abs(analytic - numeric) / denom);
        }
    }
    report.pass = report.max_rel_err <= tolerance;
    return report;
}

} // namespace hsr
