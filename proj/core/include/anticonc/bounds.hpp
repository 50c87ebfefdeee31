#pragma once

#include "anticonc/charfn.hpp"
#include "anticonc/concentration.hpp"
#include "anticonc/measure.hpp"
#include "anticonc/quadrature.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anticonc {

// Upper bounds for Q(F_a, tau) of the form
//
//     Q(H_1^lambda, eps) * exp(d * integral log(1 + paper_floor(tau / (eps |z|))) F{dz}),
//
// with V = f * G <= G, lambda = V(R) and F = V / lambda. Q(H_1^lambda, eps) is
// replaced by its Esseen functional (two-sided up to d-constants because
// H_1^lambda is symmetric with a positive characteristic function), or by a
// Monte Carlo estimate in cross-check mode. All constants c(d) are omitted.

enum class QProxyMode { esseen, monte_carlo };

struct BoundOptions {
    QuadratureSpec quadrature;
    QProxyMode q_mode = QProxyMode::esseen;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 0;
};

struct BoundReport {
    std::string method;
    std::size_t dim = 1;
    double eps = 0.0;
    double tau = 0.0;
    std::optional<double> delta;
    std::optional<double> p_delta;
    double lambda = 0.0;
    double q_proxy = 0.0;
    /// Monte Carlo half-width of q_proxy; zero in Esseen mode.
    double q_half_width = 0.0;
    /// d * integral of the log-factor against F = V / lambda.
    double exponent_integral = 0.0;
    /// Coarser exponent d * G{|z| < tau/eps} / lambda (log-weight bound only).
    std::optional<double> bounding_exponent;
    double rhs = 0.0;
    /// V charges z = 0, so the exponent diverges and the bound is vacuous.
    bool infinite = false;
    QuadratureResult quadrature;
    std::vector<std::string> notes;
};

/// Q-proxy eps^d * integral_{|t| <= 1/eps} H^_1^lambda(t) dt (or its MC counterpart).
/// Second member is the MC half-width (zero for the Esseen path).
struct QProxy {
    double value = 0.0;
    double half_width = 0.0;
    QuadratureResult quadrature;
};
QProxy q_proxy(const CoefficientVector& a, double lambda, double eps, const BoundOptions& options = {});

/// General weight f. Throws EmptySubmeasureError when lambda = 0.
BoundReport theorem1_rhs(const CoefficientVector& a, const SubMeasureSpec& v, double eps, double tau,
                         const BoundOptions& options = {});

/// f = indicator{|z| >= delta}: exponent Delta = (d / p(delta)) * sum_{|z| >= delta} log-factor * G{z}.
/// Throws ZeroTailError when p(delta) = 0.
BoundReport corollary_threshold_rhs(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double delta,
                                    double eps, double tau, const BoundOptions& options = {});

/// f(z) = 1 / max{1, log-factor(z)}, f(0) = 0.
std::vector<double> logweight_weights(const FiniteDiscreteMeasure& g, double eps, double tau);

/// Bound with the log-weight sub-measure; also reports the coarser exponent
/// d * G{|z| < tau/eps} / lambda. Throws DegenerateLawError when G = E_0.
BoundReport corollary_logweight_rhs(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double eps,
                                    double tau, const BoundOptions& options = {});

struct ThresholdRow {
    /// Empty for the log-weight row.
    std::optional<double> delta;
    bool feasible = false;
    BoundReport report;
};

struct ThresholdSearch {
    std::size_t best_row = 0;
    std::optional<double> best_delta;
    BoundReport best;
    /// One row per grid entry in grid order, then the log-weight row.
    std::vector<ThresholdRow> table;
};

/// Minimizes rhs over indicator thresholds and the log-weight choice. Ties
/// (relative 1e-12) go to the larger delta; the log-weight row must win strictly.
ThresholdSearch optimize_threshold(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double eps, double tau,
                                   std::span<const double> delta_grid, const BoundOptions& options = {});

struct SupFormReport {
    /// max |H^_z(t) - H^_1(z t)| over the random probes.
    double cf_scaling_error = 0.0;
    std::size_t cf_probes = 0;
    /// z-grid tau/eps * {1, 2, 4, 8} and Q(H_1^p, tau/z) on one shared sample.
    std::vector<double> z_grid;
    std::vector<ConcentrationResult> grid_values;
    std::size_t argmax = 0;
    /// Q(H_1^p, eps) on an independent sample.
    ConcentrationResult direct;
    /// The grid maximum sits at z = tau/eps (up to 3 half-widths).
    bool sup_at_smallest_z = false;
    /// Grid value at z = tau/eps within 3 half-widths of `direct`.
    bool direct_agrees = false;
};

/// Checks the collapse sup_{z >= tau/eps} Q(H_z^p, tau) = Q(H_1^p, eps) on
/// characteristic functions and on Monte Carlo estimates.
SupFormReport sup_form_identity(const CoefficientVector& a, double p, double eps, double tau, std::uint64_t seed,
                                std::size_t n_samples = 20000);

// --- proof-step checks ---------------------------------------------------------

struct HolderCheck {
    double lhs = 0.0;  ///< integral of exp(-1/2 sum_j p_j s_j)
    double rhs = 0.0;  ///< prod_j (integral of exp(-1/2 s_j))^{p_j}
};

/// For F = sum_j p_j E_{z_j} and s_j(t) = lambda sum_k (1 - cos(<t, a_k> z_j)),
/// both sides of the Holder step over the box |t| <= half_width.
HolderCheck holder_step(const CoefficientVector& a, const FiniteDiscreteMeasure& f, double lambda,
                        double half_width, const QuadratureSpec& spec = {});

struct ChainCheck {
    double esseen_fa = 0.0;       ///< tau^d int |F^_a|
    double esseen_envelope_g = 0.0;  ///< tau^d int envelope(G)
    double esseen_envelope_v = 0.0;  ///< tau^d int envelope(V)
    double holder_bound = 0.0;    ///< exp(int log(tau^d int H^_z^lambda) dF)
};

/// The four quantities of the Esseen -> envelope -> V -> Holder chain for
/// X ~ law, G = symmetrize(law) and V = f * G given by `weights`.
ChainCheck theorem1_chain(const CoefficientVector& a, const FiniteDiscreteMeasure& law, std::span<const double> weights,
                          double tau, const QuadratureSpec& spec = {});

}  // namespace anticonc
