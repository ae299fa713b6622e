#ifndef GMLAB_HOMSPACE_HPP
#define GMLAB_HOMSPACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gmlab/core.hpp"

namespace gmlab {

/// Which axiom of a quasi-metric measure space a table violates.
enum class Axiom {
  NotSquare,
  NonFiniteDistance,
  NegativeDistance,
  NonZeroDiagonal,
  ZeroDistanceOffDiagonal,
  NonPositiveWeight,
  SymmetryViolation,
  QuasiTriangleViolation,
};

inline const char* axiom_name(Axiom a) {
  switch (a) {
    case Axiom::NotSquare: return "NotSquare";
    case Axiom::NonFiniteDistance: return "NonFiniteDistance";
    case Axiom::NegativeDistance: return "NegativeDistance";
    case Axiom::NonZeroDiagonal: return "NonZeroDiagonal";
    case Axiom::ZeroDistanceOffDiagonal: return "ZeroDistanceOffDiagonal";
    case Axiom::NonPositiveWeight: return "NonPositiveWeight";
    case Axiom::SymmetryViolation: return "SymmetryViolation";
    case Axiom::QuasiTriangleViolation: return "QuasiTriangleViolation";
  }
  return "Unknown";
}

/// Raised when a distance table or weight vector fails validation. The
/// witness holds the offending indices: (i) for weights, (i,j) for pairwise
/// axioms and (i,j,k) for the quasi-triangle inequality.
class SpaceValidationError : public Error {
 public:
  SpaceValidationError(Axiom axiom, std::vector<std::size_t> witness)
      : Error(format(axiom, witness)), axiom_(axiom), witness_(std::move(witness)) {}

  Axiom axiom() const noexcept { return axiom_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }

 private:
  static std::string format(Axiom axiom, const std::vector<std::size_t>& w) {
    std::ostringstream os;
    os << axiom_name(axiom) << '(';
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
    os << ')';
    return os.str();
  }

  Axiom axiom_;
  std::vector<std::size_t> witness_;
};

/// Closed balls {y : d(x,y) <= rho} at the distinct distances rho realized
/// from each center. Rank k of center x is the k-th smallest such distance;
/// its members are the first end(x,k) entries of order(x).
class BallFamily {
 public:
  struct Center {
    std::vector<std::uint32_t> order;  // points sorted by distance, then index
    std::vector<double> radius;        // distinct realized distances, ascending
    std::vector<std::uint32_t> end;    // members of rank k: order[0, end[k])
    std::vector<double> measure;       // ball measure per rank
  };

  BallFamily() = default;

  BallFamily(std::size_t n, std::span<const double> dist, std::span<const double> weight) {
    centers_.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      Center& c = centers_[x];
      const double* row = dist.data() + x * n;
      c.order.resize(n);
      std::iota(c.order.begin(), c.order.end(), 0u);
      std::stable_sort(c.order.begin(), c.order.end(),
                       [row](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t y = c.order[i];
        mass += weight[y];
        const bool last_of_rank = (i + 1 == n) || (row[c.order[i + 1]] != row[y]);
        if (last_of_rank) {
          c.radius.push_back(row[y]);
          c.end.push_back(static_cast<std::uint32_t>(i + 1));
          c.measure.push_back(mass);
        }
      }
      total_balls_ += c.radius.size();
    }
  }

  std::size_t centers() const noexcept { return centers_.size(); }
  std::size_t total_balls() const noexcept { return total_balls_; }
  const Center& center(std::size_t x) const { return centers_[x]; }

  std::size_t rank_count(std::size_t x) const { return centers_[x].radius.size(); }
  double radius(std::size_t x, std::size_t k) const { return centers_[x].radius[k]; }
  double measure(std::size_t x, std::size_t k) const { return centers_[x].measure[k]; }

  std::span<const std::uint32_t> members(std::size_t x, std::size_t k) const {
    const Center& c = centers_[x];
    return std::span<const std::uint32_t>(c.order.data(), c.end[k]);
  }

  /// Largest rank whose radius is <= r, i.e. the closed ball B[x, r].
  std::size_t closed_rank(std::size_t x, double r) const {
    const auto& rad = centers_[x].radius;
    auto it = std::upper_bound(rad.begin(), rad.end(), r);
    return it == rad.begin() ? 0 : static_cast<std::size_t>(it - rad.begin()) - 1;
  }

  double closed_measure(std::size_t x, double r) const {
    return measure(x, closed_rank(x, r));
  }

 private:
  std::vector<Center> centers_;
  std::size_t total_balls_ = 0;
};

enum class Geometry { Interval, Circle };

/// Finite quasi-metric measure space (X, d, mu) with its cached ball family.
/// Immutable after construction.
class DiscreteHomSpace {
 public:
  enum class Validation { Full, Trusted };

  DiscreteHomSpace(std::vector<double> dist, std::vector<double> weight, double ct, double cs,
                   std::vector<std::vector<double>> labels = {},
                   Validation validation = Validation::Full, std::string descriptor = "table")
      : n_(weight.size()),
        dist_(std::move(dist)),
        weight_(std::move(weight)),
        ct_(ct),
        cs_(cs),
        labels_(std::move(labels)),
        descriptor_(std::move(descriptor)) {
    if (dist_.size() != n_ * n_) throw SpaceValidationError(Axiom::NotSquare, {n_, dist_.size()});
    if (n_ == 0) throw SpaceValidationError(Axiom::NotSquare, {0, 0});
    if (!(ct_ > 0.0) || !(cs_ > 0.0)) throw ParameterError("C_t and C_s must be positive");
    validate(validation);
    diameter_ = *std::max_element(dist_.begin(), dist_.end());
    total_ = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    balls_ = BallFamily(n_, dist_, weight_);
    kernel_measure_.resize(n_ * n_);
    for (std::size_t x = 0; x < n_; ++x) {
      const auto& c = balls_.center(x);
      for (std::size_t k = 0; k < c.radius.size(); ++k) {
        const std::size_t begin = k == 0 ? 0 : c.end[k - 1];
        const double open = k == 0 ? weight_[x] : c.measure[k - 1];
        for (std::size_t i = begin; i < c.end[k]; ++i) kernel_measure_[x * n_ + c.order[i]] = open;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  double dist(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  std::span<const double> dist_row(std::size_t i) const { return {dist_.data() + i * n_, n_}; }
  const std::vector<double>& dist_table() const noexcept { return dist_; }
  double weight(std::size_t i) const { return weight_[i]; }
  const std::vector<double>& weights() const noexcept { return weight_; }
  double ct() const noexcept { return ct_; }
  double cs() const noexcept { return cs_; }
  double diameter() const noexcept { return diameter_; }
  double total_measure() const noexcept { return total_; }
  const std::vector<std::vector<double>>& labels() const noexcept { return labels_; }
  const BallFamily& balls() const noexcept { return balls_; }
  /// Short provenance tag, e.g. "circle256", "interval64", "table".
  const std::string& descriptor() const noexcept { return descriptor_; }

  /// mu of the open ball {z : d(x,z) < d(x,y)}; for y = x the atom weight.
  double kernel_measure(std::size_t x, std::size_t y) const { return kernel_measure_[x * n_ + y]; }

  void require_function(std::span<const double> f) const {
    if (f.size() != n_)
      throw ParameterError("function length " + std::to_string(f.size()) +
                           " does not match space size " + std::to_string(n_));
    for (double v : f)
      if (!std::isfinite(v)) throw ParameterError("function has non-finite values");
  }

 private:
  // relative slack so Euclidean tables with collinear points are not rejected
  static constexpr double kRoundoff = 1e-12;

  void validate(Validation validation) const {
    for (std::size_t i = 0; i < n_ * n_; ++i) {
      if (!std::isfinite(dist_[i])) throw SpaceValidationError(Axiom::NonFiniteDistance, {i / n_, i % n_});
      if (dist_[i] < 0.0) throw SpaceValidationError(Axiom::NegativeDistance, {i / n_, i % n_});
    }
    for (std::size_t i = 0; i < n_; ++i)
      if (!(weight_[i] > 0.0) || !std::isfinite(weight_[i]))
        throw SpaceValidationError(Axiom::NonPositiveWeight, {i});
    for (std::size_t i = 0; i < n_; ++i) {
      if (dist(i, i) != 0.0) throw SpaceValidationError(Axiom::NonZeroDiagonal, {i, i});
      for (std::size_t j = 0; j < n_; ++j)
        if (i != j && dist(i, j) == 0.0) throw SpaceValidationError(Axiom::ZeroDistanceOffDiagonal, {i, j});
    }
    if (validation == Validation::Trusted) return;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (dist(i, j) > cs_ * dist(j, i) * (1 + kRoundoff)) throw SpaceValidationError(Axiom::SymmetryViolation, {i, j});
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double dij = dist(i, j);
        for (std::size_t k = 0; k < n_; ++k)
          if (dij > ct_ * (dist(i, k) + dist(k, j)) * (1 + kRoundoff))
            throw SpaceValidationError(Axiom::QuasiTriangleViolation, {i, j, k});
      }
  }

  std::size_t n_;
  std::vector<double> dist_;
  std::vector<double> weight_;
  double ct_;
  double cs_;
  std::vector<std::vector<double>> labels_;
  std::string descriptor_;
  double diameter_ = 0.0;
  double total_ = 0.0;
  BallFamily balls_;
  std::vector<double> kernel_measure_;
};

/// Equispaced grid on [0,1]^dim (Euclidean) or on the unit circle / flat
/// torus (arc-length metric, circumference 2*pi). Every atom has weight
/// 1/n^dim. Labels hold the coordinates (angles for the circle).
inline DiscreteHomSpace build_uniform_grid(std::size_t n, int dim = 1,
                                           Geometry geometry = Geometry::Interval) {
  if (n < 2) throw ParameterError("grid needs n >= 2");
  if (dim != 1 && dim != 2) throw ParameterError("grid dimension must be 1 or 2");
  const std::size_t total = dim == 1 ? n : n * n;
  const double w = 1.0 / static_cast<double>(total);

  auto axis_dist = [&](std::size_t a, std::size_t b) {
    const std::size_t k = a > b ? a - b : b - a;
    if (geometry == Geometry::Interval) return static_cast<double>(k) / static_cast<double>(n - 1);
    const std::size_t m = std::min(k, n - k);
    return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
  };
  auto axis_coord = [&](std::size_t a) {
    return geometry == Geometry::Interval ? static_cast<double>(a) / static_cast<double>(n - 1)
                                          : 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(n);
  };

  std::vector<double> dist(total * total);
  std::vector<std::vector<double>> labels(total);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t ix = dim == 1 ? i : i / n, iy = dim == 1 ? 0 : i % n;
    labels[i] = dim == 1 ? std::vector<double>{axis_coord(ix)}
                         : std::vector<double>{axis_coord(ix), axis_coord(iy)};
    for (std::size_t j = 0; j < total; ++j) {
      const std::size_t jx = dim == 1 ? j : j / n, jy = dim == 1 ? 0 : j % n;
      const double dx = axis_dist(ix, jx);
      dist[i * total + j] = dim == 1 ? dx : std::hypot(dx, axis_dist(iy, jy));
    }
  }
  std::string tag = geometry == Geometry::Interval ? (dim == 1 ? "interval" : "square")
                                                  : (dim == 1 ? "circle" : "torus");
  tag += std::to_string(n);
  return DiscreteHomSpace(std::move(dist), std::vector<double>(total, w), 1.0, 1.0,
                          std::move(labels), DiscreteHomSpace::Validation::Trusted, std::move(tag));
}

/// Validating ingestion of a distance table.
inline DiscreteHomSpace build_from_table(std::vector<double> dist, std::vector<double> weight,
                                         double ct, double cs,
                                         std::vector<std::vector<double>> labels = {}) {
  return DiscreteHomSpace(std::move(dist), std::move(weight), ct, cs, std::move(labels));
}

/// Weighted point cloud in R^dim with the Euclidean metric.
inline DiscreteHomSpace build_point_cloud(const std::vector<std::vector<double>>& coords,
                                          std::vector<double> weight) {
  const std::size_t n = coords.size();
  if (weight.size() != n) throw ParameterError("point cloud: weight count differs from point count");
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (coords[i].size() != coords[j].size()) throw ParameterError("point cloud: ragged coordinates");
      double s = 0.0;
      for (std::size_t d = 0; d < coords[i].size(); ++d) {
        const double t = coords[i][d] - coords[j][d];
        s += t * t;
      }
      dist[i * n + j] = std::sqrt(s);
    }
  return DiscreteHomSpace(std::move(dist), std::move(weight), 1.0, 1.0, coords,
                          DiscreteHomSpace::Validation::Trusted, "cloud" + std::to_string(n));
}

/// Empirical doubling constant: the largest mu B[x,2r] / mu B[x,r] over all
/// centers and all r > 0, using closed balls. The ratio only changes at
/// r = rho and r = rho/2 for realized distances rho, so those are scanned.
inline double doubling_constant(const DiscreteHomSpace& space) {
  const BallFamily& balls = space.balls();
  double cd = 1.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    for (double rho : c.radius) {
      if (rho <= 0.0) continue;
      for (double r : {rho, 0.5 * rho}) {
        const double ratio = balls.closed_measure(x, 2.0 * r) / balls.closed_measure(x, r);
        cd = std::max(cd, ratio);
      }
    }
  }
  return cd;
}

class DegenerateFit : public Error {
 public:
  explicit DegenerateFit(const std::string& what) : Error(what) {}
};

struct ReverseDoubling {
  double constant;  // envelope C: mu B(x,r)/mu B(x,R) <= C (r/R)^gamma on every nested pair
  double gamma;     // least-squares exponent
  std::size_t pairs;
};

/// Reverse doubling exponent. gamma is the least-squares slope of
/// log(m(x,r)/m(x,R)) against log(r/R) over pairs of realized radii
/// 0 < r < R <= d_X/2 at a common center, where m is the midpoint measure
/// (mu B[x,rho] + mu B(x,rho)) / 2 that counts the sphere at half weight.
/// The envelope C is then taken over every nested pair of closed balls.
inline ReverseDoubling reverse_doubling_exponent(const DiscreteHomSpace& space) {
  const BallFamily& balls = space.balls();
  const double limit = 0.5 * space.diameter();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  std::vector<double> lr, lm;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    lr.clear();
    lm.clear();
    for (std::size_t k = 1; k < c.radius.size() && c.radius[k] <= limit; ++k) {
      lr.push_back(std::log(c.radius[k]));
      lm.push_back(std::log(0.5 * (c.measure[k] + c.measure[k - 1])));
    }
    for (std::size_t a = 0; a < lr.size(); ++a)
      for (std::size_t b = a + 1; b < lr.size(); ++b) {
        const double u = lr[a] - lr[b], v = lm[a] - lm[b];
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
        ++count;
      }
  }
  if (count < 2) throw DegenerateFit("reverse doubling fit needs at least 2 nested ball pairs");
  const double m = static_cast<double>(count);
  const double var = sxx - sx * sx / m;
  if (!(var > 0.0)) throw DegenerateFit("reverse doubling fit: radius ratios do not vary");
  const double gamma = (sxy - sx * sy / m) / var;

  double log_env = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    for (std::size_t a = 1; a < c.radius.size(); ++a)
      for (std::size_t b = a + 1; b < c.radius.size(); ++b) {
        const double v = std::log(c.measure[a] / c.measure[b]) -
                         gamma * std::log(c.radius[a] / c.radius[b]);
        log_env = std::max(log_env, v);
      }
  }
  return {std::exp(log_env), gamma, count};
}

struct AnnulusWitness {
  std::size_t center;
  double inner;
  double outer;
};

struct AnnulusReport {
  bool passed = true;
  std::size_t pairs_checked = 0;
  std::vector<AnnulusWitness> failures;
  std::string note;
};

/// Checks mu(B(x,R) \ B(x,r)) > 0 for all realized radii 0 < r < R < d_X.
inline AnnulusReport check_annulus(const DiscreteHomSpace& space) {
  AnnulusReport report;
  const BallFamily& balls = space.balls();
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    // Measures are cumulative, so positivity on consecutive ranks implies it
    // on every pair; the count still reflects all pairs.
    std::size_t inner = 0;
    for (std::size_t a = 0; a + 1 < c.radius.size(); ++a) {
      if (c.radius[a] <= 0.0 || !(c.radius[a + 1] < space.diameter())) continue;
      ++inner;
      if (!(c.measure[a + 1] - c.measure[a] > 0.0)) {
        report.passed = false;
        report.failures.push_back({x, c.radius[a], c.radius[a + 1]});
      }
    }
    // inner consecutive gaps span inner + 1 radii below d_X
    report.pairs_checked += inner * (inner + 1) / 2;
  }
  report.note =
      "radii restricted to realized distances with closed balls; open balls at radii strictly "
      "between two consecutive realized distances coincide and are not compared";
  return report;
}

}  // namespace gmlab

#endif  // GMLAB_HOMSPACE_HPP
