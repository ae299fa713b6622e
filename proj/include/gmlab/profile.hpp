#ifndef GMLAB_PROFILE_HPP
#define GMLAB_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gmlab/core.hpp"

namespace gmlab {

/// A scalar function of one positive variable used for the grand weights
/// phi(eps) and the exponent shift A(eps). Three representations:
///   power   c * x^e
///   table   piecewise-linear through (x_i, y_i), joined linearly to (0,0)
///           on the left and held constant past the last node
///   custom  an arbitrary callable with a label
class Profile {
 public:
  enum class Kind { Power, Table, Custom };

  Profile() : Profile(power(0.0, 1.0)) {}

  static Profile power(double coef, double exponent) {
    if (!(exponent > 0.0)) throw ParameterError("power profile needs a positive exponent");
    Profile p(Kind::Power);
    p.coef_ = coef;
    p.exponent_ = exponent;
    return p;
  }

  /// phi(eps) = eps^theta.
  static Profile theta(double theta) { return power(1.0, theta); }
  /// A(x) = c * x.
  static Profile linear(double slope) { return power(slope, 1.0); }
  static Profile zero() { return power(0.0, 1.0); }

  static Profile table(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || x.size() != y.size()) throw ParameterError("table profile: node/value size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] >= 0.0) || !std::isfinite(y[i])) throw ParameterError("table profile: invalid node");
      if (i > 0 && !(x[i] > x[i - 1])) throw ParameterError("table profile: nodes must increase strictly");
    }
    Profile p(Kind::Table);
    p.x_ = std::move(x);
    p.y_ = std::move(y);
    return p;
  }

  static Profile custom(std::function<double(double)> fn, std::string label,
                        double right_derivative_at_zero = std::numeric_limits<double>::quiet_NaN()) {
    Profile p(Kind::Custom);
    p.fn_ = std::make_shared<std::function<double(double)>>(std::move(fn));
    p.label_ = std::move(label);
    p.derivative0_ = right_derivative_at_zero;
    return p;
  }

  Kind kind() const noexcept { return kind_; }
  double coef() const noexcept { return coef_; }
  double exponent() const noexcept { return exponent_; }
  const std::vector<double>& nodes() const noexcept { return x_; }
  const std::vector<double>& node_values() const noexcept { return y_; }
  const std::string& label() const noexcept { return label_; }

  bool is_zero() const noexcept { return kind_ == Kind::Power && coef_ == 0.0; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Power: return coef_ == 0.0 ? 0.0 : coef_ * std::pow(x, exponent_);
      case Kind::Table: return interpolate(x);
      case Kind::Custom: return (*fn_)(x);
    }
    return 0.0;
  }

  /// lim_{x->0+} of the derivative; +inf when it blows up.
  double right_derivative_at_zero() const {
    switch (kind_) {
      case Kind::Power:
        if (coef_ == 0.0 || exponent_ > 1.0) return 0.0;
        if (exponent_ == 1.0) return coef_;
        return std::numeric_limits<double>::infinity();
      case Kind::Table:
        if (x_.front() > 0.0) return y_.front() / x_.front();
        if (x_.size() == 1) return 0.0;
        return (y_[1] - y_[0]) / (x_[1] - x_[0]);
      case Kind::Custom: return derivative0_;
    }
    return 0.0;
  }

  /// sup{x > 0 : value(x) <= level} for a non-decreasing profile; +inf when
  /// the level is never exceeded. Tables use the rightmost bracket in which
  /// the piecewise-linear interpolant crosses the level; custom profiles are
  /// bisected on (0, search_limit].
  double sup_below(double level, double search_limit) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case Kind::Power:
        if (coef_ <= 0.0) return inf;
        if (level <= 0.0) return 0.0;
        return std::pow(level / coef_, 1.0 / exponent_);
      case Kind::Table: {
        if (y_.back() <= level) return inf;
        // rightmost node index with y <= level
        std::size_t i = y_.size();
        while (i > 0 && y_[i - 1] > level) --i;
        const double x0 = i == 0 ? 0.0 : x_[i - 1];
        const double y0 = i == 0 ? 0.0 : y_[i - 1];
        if (i == 0 && level < 0.0) return 0.0;
        const double x1 = x_[i], y1 = y_[i];
        return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
      }
      case Kind::Custom: {
        if ((*this)(search_limit) <= level) return inf;
        double lo = 0.0, hi = search_limit;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((*this)(mid) <= level ? lo : hi) = mid;
        }
        return lo;
      }
    }
    return inf;
  }

 private:
  explicit Profile(Kind k) : kind_(k) {}

  double interpolate(double x) const {
    if (x <= x_.front()) {
      if (x_.front() == 0.0) return y_.front();
      return y_.front() * x / x_.front();
    }
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    const double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return y_[i - 1] + t * (y_[i] - y_[i - 1]);
  }

  Kind kind_;
  double coef_ = 0.0;
  double exponent_ = 1.0;
  std::vector<double> x_, y_;
  std::shared_ptr<std::function<double(double)>> fn_;
  std::string label_;
  double derivative0_ = 0.0;
};

}  // namespace gmlab

#endif  // GMLAB_PROFILE_HPP
