#ifndef GMLAB_CORPUS_HPP
#define GMLAB_CORPUS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gmlab/core.hpp"
#include "gmlab/homspace.hpp"

namespace gmlab {

/// Portable uniform draws on top of mt19937_64 (whose output sequence is
/// fixed by the standard, unlike the std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream for sample i of a corpus with the given seed.
inline Rng sample_rng(std::uint64_t seed, std::size_t i, std::uint64_t salt = 0) {
  return Rng(splitmix64(splitmix64(seed ^ salt) + static_cast<std::uint64_t>(i)));
}

enum class Family { Step, Trig, Spike, Mixture };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Step: return "step";
    case Family::Trig: return "trig";
    case Family::Spike: return "spike";
    case Family::Mixture: return "mixture";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "step") return Family::Step;
  if (s == "trig") return Family::Trig;
  if (s == "spike") return Family::Spike;
  if (s == "mixture") return Family::Mixture;
  throw ParameterError("unknown corpus family '" + s + "'");
}

struct CorpusOptions {
  std::size_t size = 500;
  std::uint64_t seed = 0;
  std::vector<Family> families{Family::Step, Family::Trig, Family::Spike, Family::Mixture};
  bool mean_zero = false;
};

namespace detail {

/// Angle used by trigonometric samples: the label itself on circle grids,
/// otherwise the first coordinate (or the index) rescaled to [0, 2pi).
inline std::vector<double> sample_angles(const DiscreteHomSpace& space) {
  const std::size_t n = space.size();
  std::vector<double> a(n);
  const bool circle = space.descriptor().rfind("circle", 0) == 0 || space.descriptor().rfind("torus", 0) == 0;
  if (space.labels().size() == n && circle) {
    for (std::size_t i = 0; i < n; ++i) a[i] = space.labels()[i][0];
    return a;
  }
  if (space.labels().size() == n && !space.labels().front().empty()) {
    double lo = space.labels()[0][0], hi = lo;
    for (const auto& l : space.labels()) {
      lo = std::min(lo, l[0]);
      hi = std::max(hi, l[0]);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < n; ++i) a[i] = 2.0 * std::numbers::pi * (space.labels()[i][0] - lo) / span;
    return a;
  }
  for (std::size_t i = 0; i < n; ++i) a[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  return a;
}

inline void add_ball_step(const DiscreteHomSpace& space, Rng& rng, GridFunction& f, double height) {
  const std::size_t x = rng.index(space.size());
  const auto& balls = space.balls();
  const std::size_t k = rng.index(balls.rank_count(x));
  for (std::uint32_t y : balls.members(x, k)) f[y] += height;
}

inline GridFunction step_sample(const DiscreteHomSpace& space, Rng& rng) {
  GridFunction f(space.size());
  const std::size_t pieces = 1 + rng.index(4);
  for (std::size_t j = 0; j < pieces; ++j) add_ball_step(space, rng, f, rng.uniform(0.1, 1.0));
  return f;
}

inline GridFunction trig_sample(const DiscreteHomSpace& space, Rng& rng) {
  const auto angle = sample_angles(space);
  const std::size_t modes = 1 + rng.index(8);
  std::vector<double> a(modes + 1), b(modes + 1);
  a[0] = rng.uniform(-0.5, 0.5);
  for (std::size_t m = 1; m <= modes; ++m) {
    a[m] = rng.uniform(-1.0, 1.0) / static_cast<double>(m);
    b[m] = rng.uniform(-1.0, 1.0) / static_cast<double>(m);
  }
  GridFunction f(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    double v = a[0];
    for (std::size_t m = 1; m <= modes; ++m)
      v += a[m] * std::cos(static_cast<double>(m) * angle[i]) + b[m] * std::sin(static_cast<double>(m) * angle[i]);
    f[i] = v;
  }
  return f;
}

inline GridFunction spike_sample(const DiscreteHomSpace& space, Rng& rng) {
  GridFunction f(space.size());
  f[rng.index(space.size())] = rng.sign() * rng.uniform(0.5, 1.0);
  return f;
}

inline GridFunction mixture_sample(const DiscreteHomSpace& space, Rng& rng) {
  GridFunction f(space.size());
  const GridFunction s = step_sample(space, rng);
  const GridFunction t = trig_sample(space, rng);
  const GridFunction k = spike_sample(space, rng);
  const double cs = rng.sign() * rng.uniform(0.2, 1.0);
  const double ct = rng.uniform(-1.0, 1.0);
  const double ck = rng.uniform(0.0, 2.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cs * s[i] + ct * t[i] + ck * k[i];
  return f;
}

inline void remove_mean(const DiscreteHomSpace& space, GridFunction& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m += f[i] * space.weight(i);
  m /= space.total_measure();
  for (double& v : f.values()) v -= m;
}

}  // namespace detail

/// Sample i of a corpus. Families cycle with i; every sample draws from its
/// own stream, so the corpus does not depend on evaluation order.
inline GridFunction corpus_sample(const DiscreteHomSpace& space, const CorpusOptions& opts, std::size_t i) {
  if (opts.families.empty()) throw ParameterError("corpus needs at least one family");
  Rng rng = sample_rng(opts.seed, i);
  GridFunction f;
  switch (opts.families[i % opts.families.size()]) {
    case Family::Step: f = detail::step_sample(space, rng); break;
    case Family::Trig: f = detail::trig_sample(space, rng); break;
    case Family::Spike: f = detail::spike_sample(space, rng); break;
    case Family::Mixture: f = detail::mixture_sample(space, rng); break;
  }
  if (opts.mean_zero) detail::remove_mean(space, f);
  return f;
}

/// BMO symbol paired with sample i: a ball indicator, a clipped logarithmic
/// profile log(1/max(d(x,x0), d_min)), or a signed mixture of the two.
inline GridFunction bmo_symbol(const DiscreteHomSpace& space, std::uint64_t seed, std::size_t i) {
  Rng rng = sample_rng(seed, i, 0xB30ull);
  const std::size_t n = space.size();
  GridFunction step(n), logp(n);
  detail::add_ball_step(space, rng, step, 1.0);
  const std::size_t x0 = rng.index(n);
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < n; ++y)
    if (y != x0) dmin = std::min(dmin, space.dist(x0, y));
  if (!std::isfinite(dmin)) dmin = 1.0;
  for (std::size_t y = 0; y < n; ++y) logp[y] = std::log(1.0 / std::max(space.dist(x0, y), dmin));
  switch (i % 3) {
    case 0: return rng.uniform(0.5, 2.0) * step;
    case 1: return rng.uniform(0.2, 1.0) * logp;
    default: {
      const double a = rng.sign() * rng.uniform(0.2, 1.0), c = rng.uniform(0.1, 0.5);
      GridFunction b(n);
      for (std::size_t y = 0; y < n; ++y) b[y] = a * step[y] + c * logp[y];
      return b;
    }
  }
}

}  // namespace gmlab

#endif  // GMLAB_CORPUS_HPP
