#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace anticonc {

/// Which total-mass constraint a measure satisfies.
enum class MeasureKind {
    probability,      ///< total mass within 1e-12 of 1
    sub_probability,  ///< total mass at most 1 + 1e-12
    unnormalized,     ///< any positive total (spectral measures)
};

const char* to_string(MeasureKind kind) noexcept;

/// One atom as supplied by a caller; the point must have the measure's dimension.
struct Atom {
    std::vector<double> x;
    double mass = 0.0;
};

/// A finite discrete measure on R^d: positive masses at distinct points.
///
/// Points closer than kMergeTolerance in the sup-norm are merged on
/// construction (masses add, the lexicographically smallest point is kept).
/// Atoms are stored in lexicographic order of their points, so for d = 1
/// they are sorted ascending.
class FiniteDiscreteMeasure {
public:
    static constexpr double kMergeTolerance = 1e-12;
    static constexpr double kMassTolerance = 1e-12;

    /// Atom-list constructor. Throws InvalidMeasureError on nonpositive or
    /// non-finite masses, non-finite coordinates, or a total that violates
    /// `kind`; DimensionError on inconsistent point sizes.
    FiniteDiscreteMeasure(std::size_t dim, const std::vector<Atom>& atoms,
                          MeasureKind kind = MeasureKind::probability);

    /// Flat-storage constructor: `coords` holds masses.size() points of `dim` reals each.
    FiniteDiscreteMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> masses,
                          MeasureKind kind = MeasureKind::probability);

    static FiniteDiscreteMeasure point_mass(std::vector<double> x);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return masses_.size(); }
    bool empty() const noexcept { return masses_.empty(); }
    MeasureKind kind() const noexcept { return kind_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, dim_};
    }
    /// Shorthand for point(i)[0].
    double location(std::size_t i) const noexcept { return coords_[i * dim_]; }
    double mass(std::size_t i) const noexcept { return masses_[i]; }

    std::span<const double> coords() const noexcept { return coords_; }
    std::span<const double> masses() const noexcept { return masses_; }

    double total_mass() const noexcept { return total_; }
    double max_mass() const noexcept;

    /// Mass of the atom within kMergeTolerance (sup-norm) of x, or 0.
    double mass_at(std::span<const double> x) const noexcept;

    /// True when mass(x) = mass(-x) for every atom, to `tolerance`.
    bool is_symmetric(double tolerance = 1e-12) const noexcept;

private:
    void canonicalize(std::vector<double> coords, std::vector<double> masses);

    std::size_t dim_;
    MeasureKind kind_;
    std::vector<double> coords_;
    std::vector<double> masses_;
    double total_ = 0.0;
};

/// The coefficient vector a = (a_1, ..., a_n), a_k in R^d.
class CoefficientVector {
public:
    /// Throws InvalidMeasureError when empty or when an entry is not finite.
    CoefficientVector(std::size_t dim, std::vector<std::vector<double>> entries);
    CoefficientVector(std::size_t dim, std::vector<double> flat);

    /// d = 1 convenience.
    static CoefficientVector scalars(std::vector<double> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return flat_.size() / dim_; }
    std::span<const double> operator[](std::size_t k) const noexcept {
        return {flat_.data() + k * dim_, dim_};
    }
    std::span<const double> flat() const noexcept { return flat_; }

    /// <t, a_k>.
    double dot(std::size_t k, std::span<const double> t) const noexcept;

private:
    std::size_t dim_;
    std::vector<double> flat_;
};

/// A sub-measure V = f * G given by weights f(z_j) in [0, 1] on the atoms of G.
/// The domination V <= G is structural: it holds atom by atom.
class SubMeasureSpec {
public:
    /// Throws InvalidMeasureError if the weight count differs from G's atom
    /// count or some weight lies outside [0, 1].
    SubMeasureSpec(FiniteDiscreteMeasure base, std::vector<double> weights);

    /// f = indicator{|z| >= delta}.
    static SubMeasureSpec indicator_tail(FiniteDiscreteMeasure base, double delta);

    const FiniteDiscreteMeasure& base() const noexcept { return base_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// lambda = V(R) = sum_j f(z_j) G{z_j}.
    double lambda() const noexcept { return lambda_; }

    /// V-mass of atom j.
    double mass(std::size_t j) const noexcept { return weights_[j] * base_.mass(j); }

    /// V as a measure (zero-weight atoms dropped).
    FiniteDiscreteMeasure measure() const;

private:
    FiniteDiscreteMeasure base_;
    std::vector<double> weights_;
    double lambda_ = 0.0;
};

// --- scalar helpers --------------------------------------------------------

/// Largest integer k with k < x (strict). This differs from std::floor at
/// integers: paper_floor(1.0) == 0.
std::int64_t paper_floor(double x);

/// log(1 + paper_floor(tau / (eps |z|))). Zero for |z| >= tau/eps,
/// +infinity at z = 0.
double log_factor(double z, double tau, double eps);

// --- measure algebra (d = 1 unless stated) --------------------------------

/// Law of X1 - X2 for independent copies of X. Requires a d = 1 probability measure.
FiniteDiscreteMeasure symmetrize(const FiniteDiscreteMeasure& law);

/// Law of -Y.
FiniteDiscreteMeasure reflect(const FiniteDiscreteMeasure& law);

/// Law of Y1 + Y2 for independent Y1 ~ lhs, Y2 ~ rhs (any dimension).
FiniteDiscreteMeasure convolve(const FiniteDiscreteMeasure& lhs, const FiniteDiscreteMeasure& rhs);

/// Law of c * Y for a scalar c (any dimension).
FiniteDiscreteMeasure scale(const FiniteDiscreteMeasure& law, double c);

/// Law of Y + shift.
FiniteDiscreteMeasure translate(const FiniteDiscreteMeasure& law, std::span<const double> shift);

/// G{|z| >= delta} (closed) for a d = 1 measure.
double tail_mass(const FiniteDiscreteMeasure& g, double delta);

/// Exact law of S_a = sum_k X_k a_k for i.i.d. X ~ law (d = 1), as a measure in R^d.
/// Throws InstanceTooLargeError when the support would exceed `max_atoms`.
FiniteDiscreteMeasure weighted_sum_law(const FiniteDiscreteMeasure& law, const CoefficientVector& a,
                                       std::size_t max_atoms = std::size_t{1} << 24);

// --- standard laws ---------------------------------------------------------

/// X = +-1 with probability 1/2 each.
FiniteDiscreteMeasure rademacher();

/// Equal-mass quantile discretization of N(0, 1): k atoms at the midpoint
/// quantiles (i + 1/2) / k, each with mass 1/k.
FiniteDiscreteMeasure discretize_gaussian(std::size_t k = 256);

}  // namespace anticonc
