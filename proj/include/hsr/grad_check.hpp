#pragma once

#include <functional>
#include <vector>

#include "hsr/graph.hpp"

namespace hsr {

struct CheckReport {
    double max_rel_err = 0.0;
    bool pass = false;
};

// Builds the op under test inside a fresh graph. Receives one leaf node per
// requested input shape, in order, and returns the output node.
using OpBuilder = std::function<NodeId(Graph<double>&, const std::vector<NodeId>&)>;

// Central finite differences against the analytic backward pass, in 64-bit.
// The op output is reduced to a scalar by a fixed random weighting so that
// every output element influences the loss. Inputs are uniform in (-1, 1);
// element sampling (for inputs larger than max_samples_per_input) is
// deterministic in the seed. Failures are reported, never thrown.
//
// Relative error per element: |analytic - numeric| / max(|analytic|,
// |numeric|, 0.01); the floor keeps finite-difference noise on near-zero
// gradients from dominating the report.
//
// corrupt_scale multiplies the analytic gradients before comparison; it
// exists only so tests can assert that a wrong gradient is detected.
CheckReport grad_check(const OpBuilder& op, const std::vector<Shape>& input_shapes,
                       std::uint64_t seed, double tolerance,
                       int max_samples_per_input = 200, double fd_step = 1e-4,
                       double corrupt_scale = 1.0);

} // namespace hsr
