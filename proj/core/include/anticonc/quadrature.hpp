#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace anticonc {

/// Adaptive tensor Gauss-Legendre over the sup-norm box [-T, T]^d, d <= 3.
struct QuadratureSpec {
    std::size_t nodes_per_panel = 16;
    /// Absolute target for the change between successive panel halvings,
    /// measured on the caller's output scale.
    double tolerance = 1e-8;
    std::size_t max_refinements = 12;
};

struct QuadratureResult {
    double value = 0.0;
    double last_change = 0.0;
    std::size_t panels_per_axis = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Tensor rule with a fixed number of equal panels per axis.
double integrate_box_fixed(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                           double half_width, std::size_t panels_per_axis, std::size_t nodes_per_panel);

/// Halves panels until output_scale * |I(2P) - I(P)| < tolerance or the
/// refinement limit is hit (converged = false; value is the finest estimate).
QuadratureResult integrate_box(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                               double half_width, const QuadratureSpec& spec, std::size_t initial_panels = 1,
                               double output_scale = 1.0);

}  // namespace anticonc
