#include "anticonc/measure.hpp"

#include "anticonc/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace anticonc {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double sup_distance(std::span<const double> x, std::span<const double> y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

void require_dim1(const FiniteDiscreteMeasure& m, const char* op) {
    if (m.dim() != 1) throw DimensionError(std::string(op) + ": expected a measure on R");
}

}  // namespace

const char* to_string(MeasureKind kind) noexcept {
    switch (kind) {
        case MeasureKind::probability: return "probability";
        case MeasureKind::sub_probability: return "sub-probability";
        case MeasureKind::unnormalized: return "unnormalized";
    }
    return "unknown";
}

FiniteDiscreteMeasure::FiniteDiscreteMeasure(std::size_t dim, const std::vector<Atom>& atoms,
                                             MeasureKind kind)
    : dim_(dim), kind_(kind) {
    if (dim == 0) throw DimensionError("measure dimension must be positive");
    std::vector<double> coords;
    std::vector<double> masses;
    coords.reserve(atoms.size() * dim);
    masses.reserve(atoms.size());
    for (const auto& atom : atoms) {
        if (atom.x.size() != dim) {
            throw DimensionError("atom has " + std::to_string(atom.x.size()) +
                                 " coordinates, expected " + std::to_string(dim));
        }
        coords.insert(coords.end(), atom.x.begin(), atom.x.end());
        masses.push_back(atom.mass);
    }
    canonicalize(std::move(coords), std::move(masses));
}

FiniteDiscreteMeasure::FiniteDiscreteMeasure(std::size_t dim, std::vector<double> coords,
                                             std::vector<double> masses, MeasureKind kind)
    : dim_(dim), kind_(kind) {
    if (dim == 0) throw DimensionError("measure dimension must be positive");
    if (coords.size() != masses.size() * dim) {
        throw DimensionError("coordinate storage does not match atom count times dimension");
    }
    canonicalize(std::move(coords), std::move(masses));
}

FiniteDiscreteMeasure FiniteDiscreteMeasure::point_mass(std::vector<double> x) {
    const std::size_t d = x.size();
    return FiniteDiscreteMeasure(d, std::move(x), std::vector<double>{1.0});
}

void FiniteDiscreteMeasure::canonicalize(std::vector<double> coords, std::vector<double> masses) {
    if (!all_finite(coords)) throw InvalidMeasureError("atom coordinates must be finite");
    for (double m : masses) {
        if (!std::isfinite(m) || !(m > 0.0)) {
            throw InvalidMeasureError("atom masses must be finite and positive");
        }
    }

    const std::size_t n = masses.size();
    const std::size_t d = dim_;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (d == 1) {
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return coords[i] < coords[j]; });
    } else {
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return std::lexicographical_compare(coords.begin() + i * d, coords.begin() + (i + 1) * d,
                                                coords.begin() + j * d, coords.begin() + (j + 1) * d);
        });
    }

    auto at = [&](std::size_t i) { return std::span<const double>(coords.data() + i * d, d); };
    std::vector<char> absorbed(n, 0);
    coords_.clear();
    masses_.clear();
    coords_.reserve(coords.size());
    masses_.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = order[a];
        if (absorbed[i]) continue;
        double m = masses[i];
        // Candidates within tolerance share a first coordinate within tolerance,
        // which is a contiguous run in lexicographic order.
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::size_t j = order[b];
            if (coords[j * d] - coords[i * d] > kMergeTolerance) break;
            if (!absorbed[j] && sup_distance(at(i), at(j)) <= kMergeTolerance) {
                m += masses[j];
                absorbed[j] = 1;
            }
        }
        const auto p = at(i);
        coords_.insert(coords_.end(), p.begin(), p.end());
        masses_.push_back(m);
    }

    // Compensated sum keeps the probability check meaningful for large supports.
    double sum = 0.0;
    double carry = 0.0;
    for (double m : masses_) {
        const double y = m - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    total_ = sum;

    switch (kind_) {
        case MeasureKind::probability:
            if (std::abs(total_ - 1.0) > kMassTolerance) {
                throw InvalidMeasureError("probability measure has total mass " + std::to_string(total_));
            }
            break;
        case MeasureKind::sub_probability:
            if (total_ > 1.0 + kMassTolerance) {
                throw InvalidMeasureError("sub-probability measure has total mass " + std::to_string(total_));
            }
            break;
        case MeasureKind::unnormalized:
            break;
    }
}

double FiniteDiscreteMeasure::max_mass() const noexcept {
    return masses_.empty() ? 0.0 : *std::max_element(masses_.begin(), masses_.end());
}

double FiniteDiscreteMeasure::mass_at(std::span<const double> x) const noexcept {
    if (x.size() != dim_) return 0.0;
    // Binary search on the first coordinate, then a short scan.
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (location(mid) < x[0] - kMergeTolerance) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    for (std::size_t i = lo; i < size() && location(i) <= x[0] + kMergeTolerance; ++i) {
        if (sup_distance(point(i), x) <= kMergeTolerance) return masses_[i];
    }
    return 0.0;
}

bool FiniteDiscreteMeasure::is_symmetric(double tolerance) const noexcept {
    std::vector<double> neg(dim_);
    for (std::size_t i = 0; i < size(); ++i) {
        const auto p = point(i);
        std::transform(p.begin(), p.end(), neg.begin(), [](double v) { return -v; });
        if (std::abs(mass_at(neg) - masses_[i]) > tolerance) return false;
    }
    return true;
}

// --- CoefficientVector -------------------------------------------------------

CoefficientVector::CoefficientVector(std::size_t dim, std::vector<std::vector<double>> entries) : dim_(dim) {
    if (dim == 0) throw DimensionError("coefficient dimension must be positive");
    flat_.reserve(entries.size() * dim);
    for (const auto& e : entries) {
        if (e.size() != dim) {
            throw DimensionError("coefficient has " + std::to_string(e.size()) + " components, expected " +
                                 std::to_string(dim));
        }
        flat_.insert(flat_.end(), e.begin(), e.end());
    }
    if (flat_.empty()) throw InvalidMeasureError("coefficient vector must have at least one entry");
    if (!all_finite(flat_)) throw InvalidMeasureError("coefficients must be finite");
}

CoefficientVector::CoefficientVector(std::size_t dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
    if (dim == 0) throw DimensionError("coefficient dimension must be positive");
    if (flat_.size() % dim != 0) throw DimensionError("flat coefficient storage is not a multiple of dim");
    if (flat_.empty()) throw InvalidMeasureError("coefficient vector must have at least one entry");
    if (!all_finite(flat_)) throw InvalidMeasureError("coefficients must be finite");
}

CoefficientVector CoefficientVector::scalars(std::vector<double> values) {
    return CoefficientVector(1, std::move(values));
}

double CoefficientVector::dot(std::size_t k, std::span<const double> t) const noexcept {
    const double* a = flat_.data() + k * dim_;
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += a[i] * t[i];
    return s;
}

// --- SubMeasureSpec ------------------------------------------------------------

SubMeasureSpec::SubMeasureSpec(FiniteDiscreteMeasure base, std::vector<double> weights)
    : base_(std::move(base)), weights_(std::move(weights)) {
    if (weights_.size() != base_.size()) {
        throw InvalidMeasureError("sub-measure has " + std::to_string(weights_.size()) + " weights for " +
                                  std::to_string(base_.size()) + " atoms");
    }
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        const double f = weights_[j];
        if (!(f >= 0.0 && f <= 1.0)) {
            throw InvalidMeasureError("weight " + std::to_string(j) + " = " + std::to_string(f) +
                                      " lies outside [0, 1]");
        }
        lambda_ += f * base_.mass(j);
    }
}

SubMeasureSpec SubMeasureSpec::indicator_tail(FiniteDiscreteMeasure base, double delta) {
    std::vector<double> w(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) w[j] = std::abs(base.location(j)) >= delta ? 1.0 : 0.0;
    return SubMeasureSpec(std::move(base), std::move(w));
}

FiniteDiscreteMeasure SubMeasureSpec::measure() const {
    std::vector<double> coords;
    std::vector<double> masses;
    for (std::size_t j = 0; j < base_.size(); ++j) {
        if (weights_[j] <= 0.0) continue;
        const auto p = base_.point(j);
        coords.insert(coords.end(), p.begin(), p.end());
        masses.push_back(mass(j));
    }
    return FiniteDiscreteMeasure(base_.dim(), std::move(coords), std::move(masses),
                                 base_.kind() == MeasureKind::unnormalized ? MeasureKind::unnormalized
                                                                           : MeasureKind::sub_probability);
}

// --- scalar helpers ------------------------------------------------------------

std::int64_t paper_floor(double x) {
    constexpr double kLimit = 9.0e18;
    if (!std::isfinite(x) || std::abs(x) > kLimit) {
        throw InvalidInputError("paper_floor: argument out of integer range");
    }
    return static_cast<std::int64_t>(std::ceil(x)) - 1;
}

double log_factor(double z, double tau, double eps) {
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    const double ratio = tau / (eps * std::abs(z));
    if (ratio <= 1.0) return 0.0;
    if (!std::isfinite(ratio)) return std::numeric_limits<double>::infinity();
    // Beyond 2^53 every double is an integer, so 1 + paper_floor(ratio) == ratio.
    if (ratio >= 0x1.0p53) return std::log(ratio);
    return std::log1p(static_cast<double>(paper_floor(ratio)));
}

// --- measure algebra ---------------------------------------------------------

FiniteDiscreteMeasure symmetrize(const FiniteDiscreteMeasure& law) {
    require_dim1(law, "symmetrize");
    if (law.kind() != MeasureKind::probability) {
        throw InvalidMeasureError("symmetrize: input must be a probability measure");
    }
    return convolve(law, reflect(law));
}

FiniteDiscreteMeasure reflect(const FiniteDiscreteMeasure& law) {
    return scale(law, -1.0);
}

FiniteDiscreteMeasure convolve(const FiniteDiscreteMeasure& lhs, const FiniteDiscreteMeasure& rhs) {
    if (lhs.dim() != rhs.dim()) throw DimensionError("convolve: dimension mismatch");
    const std::size_t d = lhs.dim();
    std::vector<double> coords;
    std::vector<double> masses;
    coords.reserve(lhs.size() * rhs.size() * d);
    masses.reserve(lhs.size() * rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const auto x = lhs.point(i);
        for (std::size_t j = 0; j < rhs.size(); ++j) {
            const auto y = rhs.point(j);
            for (std::size_t c = 0; c < d; ++c) coords.push_back(x[c] + y[c]);
            masses.push_back(lhs.mass(i) * rhs.mass(j));
        }
    }
    MeasureKind kind = MeasureKind::unnormalized;
    if (lhs.kind() == MeasureKind::probability && rhs.kind() == MeasureKind::probability) {
        kind = MeasureKind::probability;
    } else if (lhs.kind() != MeasureKind::unnormalized && rhs.kind() != MeasureKind::unnormalized) {
        kind = MeasureKind::sub_probability;
    }
    return FiniteDiscreteMeasure(d, std::move(coords), std::move(masses), kind);
}

FiniteDiscreteMeasure scale(const FiniteDiscreteMeasure& law, double c) {
    if (!std::isfinite(c)) throw InvalidInputError("scale: factor must be finite");
    std::vector<double> coords(law.coords().begin(), law.coords().end());
    for (double& v : coords) v *= c;
    return FiniteDiscreteMeasure(law.dim(), std::move(coords),
                                 std::vector<double>(law.masses().begin(), law.masses().end()), law.kind());
}

FiniteDiscreteMeasure translate(const FiniteDiscreteMeasure& law, std::span<const double> shift) {
    if (shift.size() != law.dim()) throw DimensionError("translate: dimension mismatch");
    std::vector<double> coords(law.coords().begin(), law.coords().end());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += shift[i % law.dim()];
    return FiniteDiscreteMeasure(law.dim(), std::move(coords),
                                 std::vector<double>(law.masses().begin(), law.masses().end()), law.kind());
}

double tail_mass(const FiniteDiscreteMeasure& g, double delta) {
    require_dim1(g, "tail_mass");
    double p = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g.location(j)) >= delta) p += g.mass(j);
    }
    return p;
}

FiniteDiscreteMeasure weighted_sum_law(const FiniteDiscreteMeasure& law, const CoefficientVector& a,
                                       std::size_t max_atoms) {
    require_dim1(law, "weighted_sum_law");
    const std::size_t d = a.dim();
    FiniteDiscreteMeasure acc = FiniteDiscreteMeasure::point_mass(std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (acc.size() * law.size() > max_atoms) {
            throw InstanceTooLargeError("weighted_sum_law: support would exceed " + std::to_string(max_atoms) +
                                        " atoms");
        }
        std::vector<double> coords;
        coords.reserve(law.size() * d);
        const auto ak = a[k];
        for (std::size_t j = 0; j < law.size(); ++j) {
            for (std::size_t c = 0; c < d; ++c) coords.push_back(law.location(j) * ak[c]);
        }
        FiniteDiscreteMeasure term(d, std::move(coords), std::vector<double>(law.masses().begin(), law.masses().end()),
                                   law.kind());
        acc = convolve(acc, term);
    }
    return acc;
}

FiniteDiscreteMeasure rademacher() {
    return FiniteDiscreteMeasure(1, std::vector<double>{-1.0, 1.0}, std::vector<double>{0.5, 0.5});
}

FiniteDiscreteMeasure discretize_gaussian(std::size_t k) {
    if (k == 0) throw InvalidInputError("discretize_gaussian: atom count must be positive");
    const boost::math::normal_distribution<double> standard;
    std::vector<double> coords(k);
    for (std::size_t i = 0; i < k; ++i) {
        coords[i] = boost::math::quantile(standard, (static_cast<double>(i) + 0.5) / static_cast<double>(k));
    }
    // Enforce exact symmetry of the quantile grid.
    for (std::size_t i = 0; i < k / 2; ++i) {
        const double v = 0.5 * (coords[k - 1 - i] - coords[i]);
        coords[i] = -v;
        coords[k - 1 - i] = v;
    }
    if (k % 2 == 1) coords[k / 2] = 0.0;
    return FiniteDiscreteMeasure(1, std::move(coords), std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

}  // namespace anticonc
