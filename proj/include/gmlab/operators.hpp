#ifndef GMLAB_OPERATORS_HPP
#define GMLAB_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmlab/core.hpp"
#include "gmlab/homspace.hpp"
#include "gmlab/profile.hpp"

namespace gmlab {

// ---------------------------------------------------------------------------
// Maximal operators

/// Hardy-Littlewood maximal function over the realized balls at each point.
inline GridFunction maximal(const DiscreteHomSpace& space, std::span<const double> f) {
  space.require_function(f);
  const BallFamily& balls = space.balls();
  GridFunction out(f.size());
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    double s = 0.0, best = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < c.end.size(); ++k) {
      for (; idx < c.end[k]; ++idx) s += std::abs(f[c.order[idx]]) * space.weight(c.order[idx]);
      best = std::max(best, s / c.measure[k]);
    }
    out[x] = best;
  }
  return out;
}

/// M_s f = (M |f|^s)^(1/s).
inline GridFunction maximal_s(const DiscreteHomSpace& space, std::span<const double> f, double s) {
  if (!(s >= 1.0)) throw ParameterError("maximal_s needs s >= 1");
  if (s == 1.0) return maximal(space, f);
  GridFunction g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = std::pow(std::abs(f[i]), s);
  GridFunction m = maximal(space, g);
  for (double& v : m.values()) v = std::pow(v, 1.0 / s);
  return m;
}

/// Sharp maximal function: max over balls at x of the mean of |f - f_B|.
inline GridFunction sharp_maximal(const DiscreteHomSpace& space, std::span<const double> f) {
  space.require_function(f);
  const BallFamily& balls = space.balls();
  GridFunction out(f.size());
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    double s = 0.0, best = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < c.end.size(); ++k) {
      for (; idx < c.end[k]; ++idx) s += f[c.order[idx]] * space.weight(c.order[idx]);
      if (k == 0 && c.end[0] == 1) continue;  // a single atom has no oscillation
      const double avg = s / c.measure[k];
      double osc = 0.0;
      for (std::size_t i = 0; i < c.end[k]; ++i) {
        const std::uint32_t y = c.order[i];
        osc += std::abs(f[y] - avg) * space.weight(y);
      }
      best = std::max(best, osc / c.measure[k]);
    }
    out[x] = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernel moduli

class DivergenceSuspected : public Error {
 public:
  explicit DivergenceSuspected(const std::string& what) : Error(what) {}
};

struct DiniResult {
  double integral = 0.0;    // int_0^1 w(t)/t dt on the table
  double series = 0.0;      // sum_{k=1}^{K} w(2^-k)
  std::size_t terms = 0;    // K, set by the table resolution
};

/// Tabulates w on a dyadic-geometric grid t = 2^(-j/per_octave), j = 0..octaves*per_octave.
inline Profile tabulate_modulus(const std::function<double(double)>& w, int octaves = 60,
                                int per_octave = 16) {
  std::vector<double> x, y;
  for (int j = octaves * per_octave; j >= 0; --j) {
    const double t = std::exp2(-static_cast<double>(j) / per_octave);
    x.push_back(t);
    y.push_back(w(t));
  }
  return Profile::table(std::move(x), std::move(y));
}

/// Integral of w(t)/t over (0,1] for the piecewise-linear interpolant of a
/// tabulated modulus (exact for that interpolant), together with the dyadic
/// partial sum down to the table resolution. Throws DivergenceSuspected when
/// the second half of the dyadic terms still carries more than 1% of the sum.
inline DiniResult dini_integral(const Profile& w) {
  if (w.kind() != Profile::Kind::Table) throw ParameterError("dini_integral expects a tabulated modulus");
  const auto& x = w.nodes();
  const auto& y = w.node_values();
  if (!(x.front() > 0.0) || x.back() < 1.0) throw ParameterError("modulus table must cover (0, 1]");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) throw ParameterError("modulus must be positive");
    if (i > 0 && y[i] < y[i - 1]) throw ParameterError("modulus must be non-decreasing");
  }
  DiniResult r;
  r.integral = y.front();  // linear from the origin: w(t)/t constant on (0, x0]
  for (std::size_t i = 0; i + 1 < x.size() && x[i] < 1.0; ++i) {
    const double t0 = x[i], t1 = std::min(x[i + 1], 1.0);
    const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    const double intercept = y[i] - slope * t0;
    r.integral += intercept * std::log(t1 / t0) + slope * (t1 - t0);
  }
  r.terms = static_cast<std::size_t>(std::floor(std::log2(1.0 / x.front()) + 1e-9));
  double half = 0.0;
  for (std::size_t k = 1; k <= r.terms; ++k) {
    r.series += w(std::exp2(-static_cast<double>(k)));
    if (k == r.terms / 2) half = r.series;
  }
  if (r.terms >= 2 && r.series - half > 0.01 * r.series)
    throw DivergenceSuspected("dyadic partial sums of the modulus do not settle: S_K = " +
                              std::to_string(r.series) + ", S_{K/2} = " + std::to_string(half));
  return r;
}

/// Doubling constant of a tabulated modulus: max w(2t)/w(t) over the nodes.
inline double delta2_constant(const Profile& w) {
  double c = 1.0;
  for (double t : w.nodes())
    if (2.0 * t <= w.nodes().back()) c = std::max(c, w(2.0 * t) / w(t));
  return c;
}

// ---------------------------------------------------------------------------
// Calderon-Zygmund kernels

class KernelSizeViolation : public Error {
 public:
  KernelSizeViolation(std::size_t x, std::size_t y, double bound)
      : Error("KernelSizeViolation(" + std::to_string(x) + "," + std::to_string(y) +
              "): |K| * mu B exceeds " + std::to_string(bound)),
        x_(x),
        y_(y) {}
  std::size_t x() const noexcept { return x_; }
  std::size_t y() const noexcept { return y_; }

 private:
  std::size_t x_, y_;
};

/// Dense kernel on a fixed space with its size and smoothness data.
struct KernelSpec {
  std::string name;
  std::size_t n = 0;
  std::vector<double> table;  // row-major K(x,y); diagonal ignored
  double size_constant = 0.0;  // C with |K(x,y)| <= C / mu B(x, d(x,y))
  Profile modulus;
  double delta2 = 1.0;
  DiniResult dini;

  double operator()(std::size_t x, std::size_t y) const { return table[x * n + y]; }
};

/// Smallest C with |K(x,y)| mu B(x,d(x,y)) <= C over all off-diagonal pairs.
inline double kernel_size_constant(const DiscreteHomSpace& space, std::span<const double> table) {
  const std::size_t n = space.size();
  double c = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) c = std::max(c, std::abs(table[x * n + y]) * space.kernel_measure(x, y));
  return c;
}

inline void attach_modulus(KernelSpec& k, Profile modulus) {
  k.modulus = std::move(modulus);
  k.delta2 = delta2_constant(k.modulus);
  k.dini = dini_integral(k.modulus);
}

/// Kernel from a dense table. A negative size_constant requests the
/// smallest admissible one; otherwise the declared value is validated.
inline KernelSpec kernel_from_table(const DiscreteHomSpace& space, std::vector<double> table,
                                    std::string name = "table", double size_constant = -1.0) {
  const std::size_t n = space.size();
  if (table.size() != n * n) throw ParameterError("kernel table must be N x N");
  for (std::size_t i = 0; i < table.size(); ++i)
    if (i / n != i % n && !std::isfinite(table[i])) throw ParameterError("kernel table has non-finite entries");
  KernelSpec k;
  k.name = std::move(name);
  k.n = n;
  k.table = std::move(table);
  const double needed = kernel_size_constant(space, k.table);
  k.size_constant = size_constant < 0.0 ? needed : size_constant;
  attach_modulus(k, tabulate_modulus([](double t) { return t; }));
  return k;
}

/// Conjugate-function kernel on a circle grid, normalized to the space
/// measure: T f(x) = sum_{y != x} cot((x - y)/2) f(y) w(y) / mu X, which is
/// (1/2pi) p.v. int cot((x-t)/2) f(t) dt for the arc-length density.
inline KernelSpec conjugate_circle_kernel(const DiscreteHomSpace& space) {
  const std::size_t n = space.size();
  if (space.labels().size() != n) throw ParameterError("circle kernel needs angle labels");
  std::vector<double> t(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) {
        const double d = space.labels()[x][0] - space.labels()[y][0];
        t[x * n + y] = 1.0 / std::tan(0.5 * d) / space.total_measure();
      }
  KernelSpec k = kernel_from_table(space, std::move(t), "conjugate_circle");
  return k;
}

/// Hilbert kernel 1/(pi (x - y)) on a one-dimensional point set, rescaled by
/// length / mu X so that the atoms integrate like Lebesgue measure.
inline KernelSpec hilbert_interval_kernel(const DiscreteHomSpace& space) {
  const std::size_t n = space.size();
  if (space.labels().size() != n) throw ParameterError("interval kernel needs coordinate labels");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& l : space.labels()) {
    lo = std::min(lo, l[0]);
    hi = std::max(hi, l[0]);
  }
  const double density = (hi - lo) / space.total_measure();
  std::vector<double> t(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y)
        t[x * n + y] = density / (std::numbers::pi * (space.labels()[x][0] - space.labels()[y][0]));
  return kernel_from_table(space, std::move(t), "hilbert_interval");
}

inline KernelSpec make_kernel(const DiscreteHomSpace& space, const std::string& name) {
  if (name == "conjugate_circle" || name == "circle") return conjugate_circle_kernel(space);
  if (name == "hilbert_interval" || name == "interval") return hilbert_interval_kernel(space);
  throw ParameterError("unknown kernel '" + name + "'");
}

struct SmoothnessEstimate {
  double constant = 0.0;  // best C in the smoothness bound for the stored modulus
  double threshold = 2.0;
  std::size_t triples = 0;
};

/// Best constant C in
///   |K(x1,y)-K(x2,y)| + |K(y,x1)-K(y,x2)| <= C w(d(x2,x1)/d(x2,y)) / mu B(x2,d(x2,y))
/// over all triples with d(x2,y) >= threshold * d(x1,x2).
inline SmoothnessEstimate estimate_smoothness(const DiscreteHomSpace& space, const KernelSpec& k,
                                              double threshold = 2.0) {
  SmoothnessEstimate est;
  est.threshold = threshold;
  const std::size_t n = space.size();
  for (std::size_t x1 = 0; x1 < n; ++x1)
    for (std::size_t x2 = 0; x2 < n; ++x2) {
      if (x1 == x2) continue;
      const double d12 = space.dist(x2, x1);
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x1 || y == x2) continue;
        const double d2y = space.dist(x2, y);
        if (d2y < threshold * space.dist(x1, x2)) continue;
        const double lhs = std::abs(k(x1, y) - k(x2, y)) + std::abs(k(y, x1) - k(y, x2));
        const double rhs = k.modulus(d12 / d2y) / space.kernel_measure(x2, y);
        est.constant = std::max(est.constant, lhs / rhs);
        ++est.triples;
      }
    }
  return est;
}

/// Discrete principal value: T f(x) = sum_{y != x} K(x,y) f(y) w(y).
inline GridFunction cz_apply(const DiscreteHomSpace& space, const KernelSpec& k, std::span<const double> f) {
  space.require_function(f);
  const std::size_t n = space.size();
  if (k.n != n) throw ParameterError("kernel size does not match the space");
  const double bound = k.size_constant * (1.0 + 1e-12);
  GridFunction out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double* row = k.table.data() + x * n;
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      if (std::abs(row[y]) * space.kernel_measure(x, y) > bound) throw KernelSizeViolation(x, y, k.size_constant);
      s += row[y] * f[y] * space.weight(y);
    }
    out[x] = s;
  }
  return out;
}

/// Bound CZ operator; the size condition is validated once at construction.
class CzOperator {
 public:
  CzOperator(const DiscreteHomSpace& space, KernelSpec kernel) : space_(&space), kernel_(std::move(kernel)) {
    if (kernel_.n != space.size()) throw ParameterError("kernel size does not match the space");
    const double needed = kernel_size_constant(space, kernel_.table);
    if (needed > kernel_.size_constant * (1.0 + 1e-12)) {
      for (std::size_t x = 0; x < kernel_.n; ++x)
        for (std::size_t y = 0; y < kernel_.n; ++y)
          if (x != y && std::abs(kernel_(x, y)) * space.kernel_measure(x, y) >
                            kernel_.size_constant * (1.0 + 1e-12))
            throw KernelSizeViolation(x, y, kernel_.size_constant);
    }
    weighted_.resize(kernel_.table.size());
    const std::size_t n = kernel_.n;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) weighted_[x * n + y] = x == y ? 0.0 : kernel_(x, y) * space.weight(y);
  }

  const KernelSpec& kernel() const noexcept { return kernel_; }

  GridFunction operator()(std::span<const double> f) const {
    space_->require_function(f);
    const std::size_t n = kernel_.n;
    GridFunction out(n);
    for (std::size_t x = 0; x < n; ++x) {
      const double* row = weighted_.data() + x * n;
      double s = 0.0;
      for (std::size_t y = 0; y < n; ++y) s += row[y] * f[y];
      out[x] = s;
    }
    return out;
  }

 private:
  const DiscreteHomSpace* space_;
  KernelSpec kernel_;
  std::vector<double> weighted_;
};

// ---------------------------------------------------------------------------
// Potential operator

/// I^alpha f(x) = sum_y f(y) w(y) / mu B(x, d(x,y))^(1-alpha), with the open
/// ball measure and mu B(x,0) := w(x) on the diagonal.
class PotentialOperator {
 public:
  PotentialOperator(const DiscreteHomSpace& space, double alpha) : space_(&space), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("potential operator needs 0 < alpha < 1");
    const std::size_t n = space.size();
    matrix_.resize(n * n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        matrix_[x * n + y] = space.weight(y) * std::pow(space.kernel_measure(x, y), alpha - 1.0);
  }

  double alpha() const noexcept { return alpha_; }

  GridFunction operator()(std::span<const double> f) const {
    space_->require_function(f);
    const std::size_t n = space_->size();
    GridFunction out(n);
    for (std::size_t x = 0; x < n; ++x) {
      const double* row = matrix_.data() + x * n;
      double s = 0.0;
      for (std::size_t y = 0; y < n; ++y) s += row[y] * f[y];
      out[x] = s;
    }
    return out;
  }

 private:
  const DiscreteHomSpace* space_;
  double alpha_;
  std::vector<double> matrix_;
};

inline GridFunction potential_apply(const DiscreteHomSpace& space, std::span<const double> f, double alpha) {
  return PotentialOperator(space, alpha)(f);
}

// ---------------------------------------------------------------------------
// Commutators

/// [b, U] f = b U(f) - U(b f) for a linear operator U.
template <class Op>
GridFunction commutator(std::span<const double> b, const Op& op, std::span<const double> f) {
  if (b.size() != f.size()) throw ParameterError("commutator: symbol and function sizes differ");
  GridFunction bf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) bf[i] = b[i] * f[i];
  const GridFunction uf = op(f);
  const GridFunction ubf = op(bf.span());
  GridFunction out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = b[i] * uf[i] - ubf[i];
  return out;
}

}  // namespace gmlab

#endif  // GMLAB_OPERATORS_HPP
