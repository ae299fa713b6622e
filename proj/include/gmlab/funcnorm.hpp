#ifndef GMLAB_FUNCNORM_HPP
#define GMLAB_FUNCNORM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmlab/core.hpp"
#include "gmlab/homspace.hpp"
#include "gmlab/profile.hpp"

namespace gmlab {

/// A norm value together with where the maximum was attained.
struct NormResult {
  double value = 0.0;
  std::optional<double> eps;
  std::optional<std::size_t> center;
  std::optional<std::size_t> radius_rank;
};

class EmptyGrid : public Error {
 public:
  explicit EmptyGrid(const std::string& what) : Error(what) {}
};

inline double lp_norm(const DiscreteHomSpace& space, std::span<const double> f, double p) {
  if (!(p >= 1.0)) throw ParameterError("lp_norm needs p >= 1");
  space.require_function(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * space.weight(i);
  return std::pow(s, 1.0 / p);
}

namespace detail {

/// Flat per-ball table of mu(B)^(-lambda), laid out center by center.
inline std::vector<double> ball_scale_table(const DiscreteHomSpace& space, double lambda) {
  const BallFamily& balls = space.balls();
  std::vector<double> t;
  t.reserve(balls.total_balls());
  for (std::size_t x = 0; x < space.size(); ++x)
    for (double m : balls.center(x).measure) t.push_back(lambda == 0.0 ? 1.0 : std::pow(m, -lambda));
  return t;
}

/// max over balls of scale(B) * sum_{y in B} v_y, with the arg-max ball.
inline NormResult ball_scan(const DiscreteHomSpace& space, std::span<const double> v,
                            std::span<const double> scale) {
  const BallFamily& balls = space.balls();
  NormResult best;
  best.value = -1.0;
  std::size_t offset = 0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    double s = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < c.end.size(); ++k) {
      for (; idx < c.end[k]; ++idx) s += v[c.order[idx]];
      const double val = s * scale[offset + k];
      if (val > best.value) {
        best.value = val;
        best.center = x;
        best.radius_rank = k;
      }
    }
    offset += c.end.size();
  }
  return best;
}

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ParameterError("Morrey parameter lambda must lie in [0,1)");
}

}  // namespace detail

/// Morrey norm: max over realized balls of (mu(B)^-lambda sum_B |f|^p w)^(1/p).
inline NormResult morrey_norm(const DiscreteHomSpace& space, std::span<const double> f, double p,
                              double lambda) {
  if (!(p >= 1.0)) throw ParameterError("morrey_norm needs p >= 1");
  detail::check_lambda(lambda);
  space.require_function(f);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::pow(std::abs(f[i]), p) * space.weight(i);
  const auto scale = detail::ball_scale_table(space, lambda);
  NormResult r = detail::ball_scan(space, v, scale);
  r.value = std::pow(r.value, 1.0 / p);
  return r;
}

enum class BmoVariant { Mean, Inf, JohnNirenberg };

struct BmoOptions {
  BmoVariant variant = BmoVariant::Mean;
  double p = 2.0;  // John-Nirenberg exponent
};

namespace detail {

/// Weighted lower median of (value, weight) pairs sorted by value.
inline double weighted_lower_median(const std::vector<std::pair<double, double>>& sorted, double total) {
  double acc = 0.0;
  for (const auto& [v, w] : sorted) {
    acc += w;
    if (acc >= 0.5 * total) return v;
  }
  return sorted.back().first;
}

}  // namespace detail

/// Ball-wise mean oscillation maximized over the ball family. Mean uses
/// |b - b_B|, Inf the best constant (a weighted median), JohnNirenberg the
/// p-th power mean of |b - b_B|.
inline NormResult bmo_norm(const DiscreteHomSpace& space, std::span<const double> b, BmoOptions opts = {}) {
  if (opts.variant == BmoVariant::JohnNirenberg && !(opts.p > 1.0 && std::isfinite(opts.p)))
    throw ParameterError("John-Nirenberg BMO variant needs 1 < p < inf");
  space.require_function(b);
  const BallFamily& balls = space.balls();
  NormResult best;
  best.value = -1.0;
  std::vector<std::pair<double, double>> sorted;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& c = balls.center(x);
    sorted.clear();
    double mass_sum = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < c.end.size(); ++k) {
      for (; idx < c.end[k]; ++idx) {
        const std::uint32_t y = c.order[idx];
        mass_sum += b[y] * space.weight(y);
        if (opts.variant == BmoVariant::Inf) {
          auto it = std::upper_bound(sorted.begin(), sorted.end(), b[y],
                                     [](double v, const auto& e) { return v < e.first; });
          sorted.insert(it, {b[y], space.weight(y)});
        }
      }
      const double mu = c.measure[k];
      const auto members = balls.members(x, k);
      double osc = 0.0;
      if (opts.variant == BmoVariant::Inf) {
        const double med = detail::weighted_lower_median(sorted, mu);
        for (const auto& [v, w] : sorted) osc += std::abs(v - med) * w;
        osc /= mu;
      } else {
        const double avg = mass_sum / mu;
        for (std::uint32_t y : members) {
          const double d = std::abs(b[y] - avg);
          osc += (opts.variant == BmoVariant::Mean ? d : std::pow(d, opts.p)) * space.weight(y);
        }
        osc /= mu;
        if (opts.variant == BmoVariant::JohnNirenberg) osc = std::pow(osc, 1.0 / opts.p);
      }
      if (osc > best.value) {
        best.value = osc;
        best.center = x;
        best.radius_rank = k;
      }
    }
  }
  return best;
}

/// sup{x > 0 : A(x) <= lambda} capped at p - 1.
inline double s_max(double p, double lambda, const Profile& A) {
  const double a = A.sup_below(lambda, p - 1.0);
  return std::min(p - 1.0, a);
}

/// Geometric eps-grid s * r^k (k >= 1) down to `floor`, ascending.
inline std::vector<double> geometric_eps_grid(double s, double ratio = 0.9, double floor = 1e-6) {
  if (!(s > 0.0) || !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0))
    throw ParameterError("geometric grid needs s > 0, 0 < ratio < 1, floor > 0");
  std::vector<double> g;
  for (double e = s * ratio; e >= floor; e *= ratio) g.push_back(e);
  std::reverse(g.begin(), g.end());
  return g;
}

/// Exponent bundle of a generalized grand Morrey norm.
struct GrandParams {
  double p = 2.0;
  double lambda = 0.0;
  Profile phi = Profile::theta(1.0);
  Profile A = Profile::zero();
  std::vector<double> eps_grid;
  double s_max = 1.0;

  /// Validates and completes a parameter bundle; an empty grid selects the
  /// default geometric grid on (0, s_max).
  /// lambda - A(eps), with roundoff at eps = s_max clamped to zero.
  double shifted_lambda(double eps) const { return std::max(0.0, lambda - A(eps)); }

  static GrandParams make(double p, double lambda, Profile phi, Profile A,
                          std::vector<double> grid = {}) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("grand norms need 1 < p < inf");
    detail::check_lambda(lambda);
    GrandParams g;
    g.p = p;
    g.lambda = lambda;
    g.phi = std::move(phi);
    g.A = std::move(A);
    g.s_max = gmlab::s_max(p, lambda, g.A);
    if (!(g.s_max > 0.0)) throw ParameterError("s_max is zero: A exceeds lambda immediately");
    g.eps_grid = grid.empty() ? geometric_eps_grid(g.s_max) : std::move(grid);
    for (std::size_t i = 0; i < g.eps_grid.size(); ++i) {
      const double e = g.eps_grid[i];
      if (!(e > 0.0 && e <= g.s_max)) throw ParameterError("eps grid point outside (0, s_max]");
      if (i > 0 && !(e > g.eps_grid[i - 1])) throw ParameterError("eps grid must increase strictly");
      const double shifted = g.lambda - g.A(e);
      if (!(shifted >= -1e-12 * std::max(1.0, g.lambda))) throw ParameterError("lambda - A(eps) < 0 on the grid");
      const double ph = g.phi(e);
      if (!(ph > 0.0) || !std::isfinite(ph)) throw ParameterError("phi must be positive and finite on the grid");
    }
    return g;
  }
};

/// Reusable evaluator for one (space, params) pair. Caches the per-ball
/// scale tables mu(B)^-(lambda - A(eps)), one per distinct shifted lambda.
class GrandMorreyEvaluator {
 public:
  struct Level {
    double eps;
    double exponent;  // p - eps
    double lambda;    // lambda - A(eps)
    double weight;    // phi(eps)^(1/(p - eps))
    std::size_t table;
  };

  GrandMorreyEvaluator(const DiscreteHomSpace& space, GrandParams params)
      : space_(&space), params_(std::move(params)) {
    std::map<double, std::size_t> by_lambda;
    for (double e : params_.eps_grid) {
      Level lv{e, params_.p - e, params_.shifted_lambda(e), 0.0, 0};
      lv.weight = std::pow(params_.phi(e), 1.0 / lv.exponent);
      auto [it, inserted] = by_lambda.emplace(lv.lambda, tables_.size());
      if (inserted) tables_.push_back(detail::ball_scale_table(space, lv.lambda));
      lv.table = it->second;
      levels_.push_back(lv);
    }
  }

  const GrandParams& params() const noexcept { return params_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  const DiscreteHomSpace& space() const noexcept { return *space_; }

  /// Morrey norm of f at every grid level.
  std::vector<NormResult> profile(std::span<const double> f) const {
    space_->require_function(f);
    std::vector<NormResult> out;
    out.reserve(levels_.size());
    std::vector<double> v(f.size());
    for (const Level& lv : levels_) {
      for (std::size_t i = 0; i < f.size(); ++i)
        v[i] = std::pow(std::abs(f[i]), lv.exponent) * space_->weight(i);
      NormResult r = detail::ball_scan(*space_, v, tables_[lv.table]);
      r.value = std::pow(r.value, 1.0 / lv.exponent);
      r.eps = lv.eps;
      out.push_back(r);
    }
    return out;
  }

  /// max over grid levels eps < s of weight(eps) * morrey(eps).
  NormResult phi(const std::vector<NormResult>& profile, double s) const {
    NormResult best;
    best.value = -1.0;
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      if (!(levels_[k].eps < s)) continue;
      const double val = levels_[k].weight * profile[k].value;
      if (val > best.value) {
        best = profile[k];
        best.value = val;
      }
    }
    if (best.value < 0.0) throw EmptyGrid("no eps grid point lies below s");
    return best;
  }

  NormResult phi(std::span<const double> f, double s) const { return phi(profile(f), s); }
  NormResult norm(std::span<const double> f) const { return phi(profile(f), params_.s_max); }

 private:
  const DiscreteHomSpace* space_;
  GrandParams params_;
  std::vector<std::vector<double>> tables_;
  std::vector<Level> levels_;
};

/// Phi(f, s) = max over grid eps < s of phi(eps)^(1/(p-eps)) ||f||_{p-eps, lambda-A(eps)}.
inline NormResult phi_functional(const DiscreteHomSpace& space, std::span<const double> f,
                                 const GrandParams& params, double s) {
  if (!(s > 0.0 && s <= params.s_max)) throw ParameterError("phi_functional needs 0 < s <= s_max");
  return GrandMorreyEvaluator(space, params).phi(f, s);
}

inline NormResult grand_morrey_norm(const DiscreteHomSpace& space, std::span<const double> f,
                                    const GrandParams& params) {
  return GrandMorreyEvaluator(space, params).norm(f);
}

/// max over the grid of eps^(theta/(p-eps)) ||f||_{p-eps}.
inline NormResult grand_lebesgue_norm(const DiscreteHomSpace& space, std::span<const double> f, double p,
                                      double theta, std::span<const double> eps_grid) {
  if (!(p > 1.0)) throw ParameterError("grand Lebesgue norm needs p > 1");
  if (!(theta > 0.0)) throw ParameterError("grand Lebesgue norm needs theta > 0");
  if (eps_grid.empty()) throw EmptyGrid("empty eps grid");
  for (double e : eps_grid)
    if (!(e > 0.0 && e < p - 1.0)) throw ParameterError("eps grid point outside (0, p-1)");
  NormResult best;
  best.value = -1.0;
  for (double e : eps_grid) {
    const double val = std::pow(e, theta / (p - e)) * lp_norm(space, f, p - e);
    if (val > best.value) {
      best.value = val;
      best.eps = e;
    }
  }
  return best;
}

}  // namespace gmlab

#endif  // GMLAB_FUNCNORM_HPP
