#include "anticonc/quadrature.hpp"

#include "anticonc/errors.hpp"
#include "anticonc/parallel.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace anticonc {

namespace {

GaussLegendreRule make_rule(std::size_t n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 =
                ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t n) {
    if (n == 0 || n > 256) throw InvalidInputError("Gauss-Legendre order must lie in [1, 256]");
    static std::mutex mutex;
    static std::map<std::size_t, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        if (n == 1) {
            it = cache.emplace(n, GaussLegendreRule{{0.0}, {2.0}}).first;
        } else {
            it = cache.emplace(n, make_rule(n)).first;
        }
    }
    return it->second;
}

double integrate_box_fixed(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                           double half_width, std::size_t panels_per_axis, std::size_t nodes_per_panel) {
    if (dim == 0 || dim > 3) throw DimensionError("box quadrature supports 1 <= d <= 3, got " + std::to_string(dim));
    if (panels_per_axis == 0) throw InvalidInputError("panel count must be positive");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidInputError("box half-width must be positive");

    const GaussLegendreRule& rule = gauss_legendre(nodes_per_panel);
    const std::size_t per_axis = panels_per_axis * nodes_per_panel;
    const double h = 2.0 * half_width / static_cast<double>(panels_per_axis);

    std::vector<double> x(per_axis);
    std::vector<double> w(per_axis);
    for (std::size_t p = 0; p < panels_per_axis; ++p) {
        const double mid = -half_width + (static_cast<double>(p) + 0.5) * h;
        for (std::size_t q = 0; q < nodes_per_panel; ++q) {
            x[p * nodes_per_panel + q] = mid + 0.5 * h * rule.nodes[q];
            w[p * nodes_per_panel + q] = 0.5 * h * rule.weights[q];
        }
    }

    // One slab per first-axis node; slabs are summed in index order.
    std::vector<double> slab(per_axis, 0.0);
    parallel_for(per_axis, [&](std::size_t i0) {
        double t[3] = {x[i0], 0.0, 0.0};
        const std::span<const double> point(t, dim);
        double acc = 0.0;
        if (dim == 1) {
            acc = f(point);
        } else if (dim == 2) {
            for (std::size_t i1 = 0; i1 < per_axis; ++i1) {
                t[1] = x[i1];
                acc += w[i1] * f(point);
            }
        } else {
            for (std::size_t i1 = 0; i1 < per_axis; ++i1) {
                t[1] = x[i1];
                double inner = 0.0;
                for (std::size_t i2 = 0; i2 < per_axis; ++i2) {
                    t[2] = x[i2];
                    inner += w[i2] * f(point);
                }
                acc += w[i1] * inner;
            }
        }
        slab[i0] = w[i0] * acc;
    });
    double total = 0.0;
    for (double s : slab) total += s;
    return total;
}

QuadratureResult integrate_box(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                               double half_width, const QuadratureSpec& spec, std::size_t initial_panels,
                               double output_scale) {
    if (spec.nodes_per_panel == 0) throw InvalidInputError("quadrature needs at least one node per panel");
    if (!(spec.tolerance > 0.0)) throw InvalidInputError("quadrature tolerance must be positive");

    auto evaluations = [&](std::size_t panels) {
        std::size_t per_axis = panels * spec.nodes_per_panel;
        std::size_t total = 1;
        for (std::size_t c = 0; c < dim; ++c) total *= per_axis;
        return total;
    };

    QuadratureResult result;
    std::size_t panels = std::max<std::size_t>(1, initial_panels);
    double coarse = integrate_box_fixed(f, dim, half_width, panels, spec.nodes_per_panel);
    result.evaluations = evaluations(panels);
    for (std::size_t level = 0; level < spec.max_refinements; ++level) {
        panels *= 2;
        const double fine = integrate_box_fixed(f, dim, half_width, panels, spec.nodes_per_panel);
        result.evaluations += evaluations(panels);
        result.last_change = output_scale * std::abs(fine - coarse);
        result.value = fine;
        result.panels_per_axis = panels;
        if (result.last_change < spec.tolerance) {
            result.converged = true;
            return result;
        }
        coarse = fine;
    }
    if (spec.max_refinements == 0) {
        result.value = coarse;
        result.panels_per_axis = panels;
        result.last_change = std::numeric_limits<double>::infinity();
    }
    return result;
}

}  // namespace anticonc
