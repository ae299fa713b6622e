#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmlab/corpus.hpp"
#include "gmlab/funcnorm.hpp"
#include "oracles.hpp"

using namespace gmlab;

namespace {

oracle::Table table_of(const DiscreteHomSpace& X) {
  return {X.size(), X.dist_table(), X.weights()};
}

DiscreteHomSpace space_of(const oracle::Table& t) { return build_from_table(t.dist, t.w, 1.0, 1.0); }

}  // namespace

TEST(Lp, Fixtures) {
  const auto X2 = build_uniform_grid(2);
  EXPECT_DOUBLE_EQ(lp_norm(X2, std::vector<double>{0, 0}, 2), 0.0);
  EXPECT_NEAR(lp_norm(X2, std::vector<double>{0, 2}, 2), std::sqrt(2.0), 1e-15);
  const auto X = build_uniform_grid(7);
  for (double p : {1.0, 1.5, 3.0}) EXPECT_NEAR(lp_norm(X, GridFunction(7, 1.0), p), 1.0, 1e-14);
  EXPECT_THROW(lp_norm(X, GridFunction(7, 1.0), 0.5), ParameterError);
}

TEST(Morrey, Fixtures) {
  const auto X3 = build_uniform_grid(3);
  const auto r = morrey_norm(X3, std::vector<double>{1, 0, 0}, 1.0, 0.5);
  EXPECT_NEAR(r.value, 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(r.center, 0u);
  EXPECT_EQ(r.radius_rank, 0u);
  EXPECT_NEAR(morrey_norm(X3, GridFunction(3, 1.0), 2.0, 0.0).value, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(morrey_norm(X3, GridFunction(3, 0.0), 2.0, 0.3).value, 0.0);
  EXPECT_THROW(morrey_norm(X3, GridFunction(3, 1.0), 2.0, 1.0), ParameterError);
  EXPECT_THROW(morrey_norm(X3, GridFunction(3, 1.0), 2.0, -0.1), ParameterError);
}

TEST(Morrey, MatchesOracleAndProperties) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = oracle::random_space(rng, 6 + trial % 9);
    const auto X = space_of(t);
    std::vector<double> f(t.n), h(t.n);
    for (auto& v : f) v = g(rng);
    for (auto& v : h) v = g(rng);
    for (double p : {1.0, 1.7, 3.0})
      for (double lam : {0.0, 0.4, 0.9}) {
        const double v = morrey_norm(X, f, p, lam).value;
        EXPECT_NEAR(v, oracle::morrey(t, f, p, lam), 1e-12 * std::max(1.0, v));
        // homogeneity and triangle inequality
        GridFunction cf = -2.5 * GridFunction(f);
        EXPECT_NEAR(morrey_norm(X, cf, p, lam).value, 2.5 * v, 1e-12 * v);
        EXPECT_LE(morrey_norm(X, GridFunction(f) + GridFunction(h), p, lam).value,
                  v + morrey_norm(X, h, p, lam).value + 1e-12);
      }
  }
}

TEST(Morrey, MonotoneInLambdaWhenBallsAreSmall) {
  const auto X = build_uniform_grid(20, 1, Geometry::Circle);
  CorpusOptions opts;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto f = corpus_sample(X, opts, i);
    EXPECT_LE(morrey_norm(X, f, 2, 0.1).value, morrey_norm(X, f, 2, 0.6).value * (1 + 1e-14));
  }
}

TEST(Bmo, TwoAtomFixtures) {
  const auto X = build_uniform_grid(2);
  const std::vector<double> b{0, 1};
  EXPECT_NEAR(bmo_norm(X, b, {BmoVariant::Mean}).value, 0.5, 1e-12);
  EXPECT_NEAR(bmo_norm(X, b, {BmoVariant::Inf}).value, 0.5, 1e-12);
  EXPECT_NEAR(bmo_norm(X, b, {BmoVariant::JohnNirenberg, 2.0}).value, 0.5, 1e-12);
  for (auto v : {BmoVariant::Mean, BmoVariant::Inf, BmoVariant::JohnNirenberg})
    EXPECT_DOUBLE_EQ(bmo_norm(X, std::vector<double>{3, 3}, {v, 2.0}).value, 0.0);
  EXPECT_THROW(bmo_norm(X, b, {BmoVariant::JohnNirenberg, 1.0}), ParameterError);
}

TEST(Bmo, VariantEquivalenceAndOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = oracle::random_space(rng, 5 + trial % 10);
    const auto X = space_of(t);
    std::vector<double> b(t.n);
    for (auto& v : b) v = g(rng);
    const double mean = bmo_norm(X, b).value, inf = bmo_norm(X, b, {BmoVariant::Inf}).value;
    EXPECT_NEAR(mean, oracle::bmo_mean(t, b), 1e-12);
    EXPECT_LE(inf, mean + 1e-12);
    EXPECT_LE(mean, 2 * inf + 1e-12);
  }
}

TEST(SMax, Fixtures) {
  EXPECT_DOUBLE_EQ(s_max(3.0, 0.2, Profile::zero()), 2.0);
  EXPECT_NEAR(s_max(2.0, 0.5, Profile::linear(1.0)), 0.5, 1e-12);
  EXPECT_NEAR(s_max(4.0, 0.5, Profile::linear(2.0)), 0.25, 1e-12);
  // rightmost bracket on a table
  EXPECT_NEAR(s_max(2.0, 0.5, Profile::table({0.25, 0.5, 0.75}, {0.25, 0.5, 0.75})), 0.5, 1e-12);
  EXPECT_NEAR(GrandParams::make(2.0, 0.5, Profile::theta(1), Profile::linear(1)).s_max, 0.5, 1e-12);
}

TEST(GrandParams, Validation) {
  EXPECT_THROW(GrandParams::make(1.0, 0.1, Profile::theta(1), Profile::zero()), ParameterError);
  EXPECT_THROW(GrandParams::make(2.0, 0.1, Profile::theta(1), Profile::zero(), {0.5, 0.4}), ParameterError);
  EXPECT_THROW(GrandParams::make(2.0, 0.1, Profile::theta(1), Profile::zero(), {0.5, 1.5}), ParameterError);
  const auto g = GrandParams::make(2.0, 0.1, Profile::theta(1), Profile::zero());
  EXPECT_TRUE(std::is_sorted(g.eps_grid.begin(), g.eps_grid.end()));
  EXPECT_LE(g.eps_grid.back(), g.s_max);
  EXPECT_GE(g.eps_grid.front(), 1e-6);
}

TEST(GrandLebesgue, Fixtures) {
  const auto X = build_uniform_grid(9);
  const std::vector<double> grid{0.1, 0.5, 0.9, 1 - 1e-6};
  EXPECT_DOUBLE_EQ(grand_lebesgue_norm(X, GridFunction(9, 0.0), 2, 1, grid).value, 0.0);
  EXPECT_NEAR(grand_lebesgue_norm(X, GridFunction(9, 1.0), 2, 1, grid).value, 1.0, 1e-5);
  EXPECT_THROW(grand_lebesgue_norm(X, GridFunction(9, 1.0), 2, 1, std::vector<double>{0.5, 1.0}), ParameterError);
  // refinement never decreases the value
  CorpusOptions opts;
  const auto f = corpus_sample(X, opts, 3);
  const auto coarse = geometric_eps_grid(1.0, 0.8);
  auto fine = coarse;
  fine.push_back(0.55);
  std::sort(fine.begin(), fine.end());
  EXPECT_GE(grand_lebesgue_norm(X, f, 2, 1, fine).value, grand_lebesgue_norm(X, f, 2, 1, coarse).value);
}

TEST(GrandMorrey, ReducesToGrandLebesgue) {
  const auto X = build_uniform_grid(12, 1, Geometry::Circle);
  const auto g = GrandParams::make(2.5, 0.0, Profile::theta(1.5), Profile::zero());
  CorpusOptions opts;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto f = corpus_sample(X, opts, i);
    // lambda = 0 and muX = 1: the whole space is the richest ball
    EXPECT_NEAR(grand_morrey_norm(X, f, g).value, grand_lebesgue_norm(X, f, 2.5, 1.5, g.eps_grid).value, 1e-12);
  }
}

TEST(GrandMorrey, PhiFunctional) {
  const auto X = build_uniform_grid(10);
  const auto g = GrandParams::make(2.0, 0.3, Profile::theta(1), Profile::linear(0.2));
  CorpusOptions opts;
  const auto f = corpus_sample(X, opts, 1);
  EXPECT_DOUBLE_EQ(phi_functional(X, GridFunction(10, 0.0), g, 0.5).value, 0.0);
  EXPECT_LE(phi_functional(X, f, g, 0.3).value, phi_functional(X, f, g, 0.6).value);
  EXPECT_THROW(phi_functional(X, f, g, g.eps_grid.front() * 0.5), EmptyGrid);
  EXPECT_THROW(phi_functional(X, f, g, 2.0), ParameterError);
  // A = 0 and phi = eps^theta: explicit max over the grid
  const auto g0 = GrandParams::make(2.0, 0.3, Profile::theta(1), Profile::zero());
  double best = 0;
  for (double e : g0.eps_grid) best = std::max(best, std::pow(e, 1 / (2 - e)) * morrey_norm(X, f, 2 - e, 0.3).value);
  EXPECT_NEAR(grand_morrey_norm(X, f, g0).value, best, 1e-14);
}

TEST(GrandMorrey, FivePointBruteForce) {
  std::mt19937_64 rng(3);
  const auto t = oracle::random_space(rng, 5);
  const auto X = space_of(t);
  const std::vector<double> grid{0.01, 0.05, 0.1, 0.2, 0.3, 0.35, 0.4, 0.45};
  const auto g = GrandParams::make(2.0, 0.5, Profile::theta(2), Profile::linear(1.0), grid);
  const std::vector<double> f{1.0, -2.0, 0.5, 0.0, 3.0};
  const double ref = oracle::grand_morrey(
      t, f, 2.0, 0.5, [](double e) { return e * e; }, [](double e) { return e; }, grid);
  EXPECT_NEAR(grand_morrey_norm(X, f, g).value, ref, 1e-12 * ref);
}

TEST(Norms, Homogeneity) {
  const auto X = build_uniform_grid(15, 1, Geometry::Circle);
  const auto g = GrandParams::make(3.0, 0.25, Profile::theta(1), Profile::linear(0.1));
  CorpusOptions opts;
  const auto f = corpus_sample(X, opts, 5);
  const GridFunction cf = -3.0 * f;
  EXPECT_NEAR(grand_morrey_norm(X, cf, g).value, 3 * grand_morrey_norm(X, f, g).value, 1e-12);
  EXPECT_NEAR(bmo_norm(X, cf).value, 3 * bmo_norm(X, f).value, 1e-12);
  EXPECT_NEAR(bmo_norm(X, cf, {BmoVariant::Inf}).value, 3 * bmo_norm(X, f, {BmoVariant::Inf}).value, 1e-12);
}
