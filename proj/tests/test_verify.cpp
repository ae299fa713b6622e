#include <gtest/gtest.h>

#include <cmath>

#include "gmlab/verify.hpp"

using namespace gmlab;

namespace {

VerifyContext small_ctx(const DiscreteHomSpace& X, std::size_t size = 40, CheckSettings st = {}) {
  CorpusOptions c;
  c.size = size;
  return VerifyContext(X, c, st);
}

}  // namespace

TEST(Formula, CzBranches) {
  FormulaParams f{3.0, 0.5};
  EXPECT_NEAR(constant_formula(ConstantFormula::CzMorrey, f, 1.0), 13.0, 1e-12);
  f.p = 1.5;
  EXPECT_NEAR(constant_formula(ConstantFormula::CzMorrey, f, 1.0), 3.0 + 3.0 + 4.0, 1e-12);
  f.p = 2.0;
  EXPECT_THROW(constant_formula(ConstantFormula::CzMorrey, f, 1.0), ParameterError);
}

TEST(Formula, MaximalAtZeroLambda) {
  for (double b : {1.0, 3.0, 9.0})
    for (double p : {1.5, 2.0, 4.0}) {
      FormulaParams f{p, 0.0, b};
      EXPECT_NEAR(constant_formula(ConstantFormula::MaximalMorrey, f, 1.0),
                  std::pow(p / (p - 1), 1 / p) + 1, 1e-12);
    }
}

TEST(Formula, CommutatorPotentialLimit) {
  // lambda = 0, alpha -> 0, q -> p: finite, close to the s-maximal shape
  const double p = 2.0, s = 1.5;
  double prev = 0;
  for (double alpha : {1e-2, 1e-4, 1e-6}) {
    FormulaParams f{p, 0.0, 3.0, s, 1.0 / (1.0 / p - alpha), alpha};
    const double v = constant_formula(ConstantFormula::CommutatorPotentialMorrey, f, 1.0);
    EXPECT_TRUE(std::isfinite(v));
    prev = v;
  }
  const double core = std::pow(4.0, 0.75) + 1;  // ((p/s)')^{s/p} + 1 with p/s = 4/3
  EXPECT_NEAR(prev, core * core * 3.0 * (std::sqrt(2.0) + 1.0), 1e-3);  // O(alpha) approach
  FormulaParams bad{p, 0.0, 3.0, s, 4.0, 0.6};
  EXPECT_THROW(constant_formula(ConstantFormula::CommutatorPotentialMorrey, bad, 1.0), ParameterError);
}

TEST(Formula, ImpliedConstantInverts) {
  FormulaParams f{2.5, 0.3, 3.0, 1.5, 0, 0};
  for (auto k : {ConstantFormula::MaximalMorrey, ConstantFormula::MaximalSMorrey, ConstantFormula::CzMorrey}) {
    const double v = constant_formula(k, f, 0.37);
    EXPECT_NEAR(implied_constant(k, f, v), 0.37, 1e-12);
    EXPECT_EQ(parse_formula(formula_name(k)), k);
  }
}

TEST(Ratios, ExcludesZeroOverZero) {
  const auto s = summarize({{0, 0}, {1, 2}, {3, 1}, {0, 0}});
  EXPECT_DOUBLE_EQ(s.max, 3.0);
  EXPECT_EQ(*s.argmax, 2u);
  EXPECT_EQ(s.excluded, 2u);
  EXPECT_DOUBLE_EQ(s.half_max, 0.5);
  EXPECT_THROW(summarize({{0, 0}, {0, 0}}), AllSamplesDegenerate);
  EXPECT_TRUE(std::isinf(summarize({{1, 0}}).max));
}

TEST(NormRatio, IdentityAndConstantCommutator) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  const auto ctx = small_ctx(X);
  const auto id = operator_norm_ratio(ctx, "identity", [](const GridFunction& f) { return f; },
                                      NormSpec::morrey(2, 0.25), NormSpec::morrey(2, 0.25));
  EXPECT_NEAR(id.primary_value(), 1.0, 1e-15);
  const CzOperator T(X, conjugate_circle_kernel(X));
  const GridFunction b(32, 2.0);
  const auto zero = operator_norm_ratio(ctx, "commutator", [&](const GridFunction& f) { return commutator(b, T, f); },
                                        NormSpec::lp(2), NormSpec::lp(2));
  EXPECT_LE(zero.primary_value(), 1e-13);
  // maximal operator on Morrey, n = 64, p = 2, lambda = 1/4, 200 samples
  const auto X64 = build_uniform_grid(64);
  const auto c64 = small_ctx(X64, 200);
  const auto m = operator_norm_ratio(c64, "maximal", [&](const GridFunction& f) { return maximal(X64, f); },
                                     NormSpec::morrey(2, 0.25), NormSpec::morrey(2, 0.25));
  EXPECT_TRUE(std::isfinite(m.primary_value()));
  EXPECT_GE(m.primary_value(), 1.0);
}

TEST(Checks, EtaAndAux) {
  const auto X = build_uniform_grid(8, 1, Geometry::Circle);
  const auto ctx = small_ctx(X);
  const auto eta = check_eta_identity(ctx);
  EXPECT_TRUE(eta.passed);
  EXPECT_LE(eta.primary_value(), 1e-12);
  EXPECT_EQ(eta.to_json()["empirical"]["fixture_table"].size(), 6u);
  EXPECT_TRUE(check_aux_functions(ctx).passed);
}

TEST(Checks, EmbeddingChain) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  auto ctx = small_ctx(X, 100);
  const auto r = check_embedding_chain(ctx);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.empirical["violations"].get<int>(), 0);
  EXPECT_LE(r.empirical["max_theta2_over_theta1"].get<double>(), 1.0);
  ctx.settings.theta2 = ctx.settings.theta;
  EXPECT_NEAR(check_embedding_chain(ctx).empirical["max_theta2_over_theta1"].get<double>(), 1.0, 1e-15);
}

TEST(Checks, DominanceInvariantUnderScaling) {
  const auto X = build_uniform_grid(24, 1, Geometry::Circle);
  const auto g = GrandParams::make(2.0, 0.25, Profile::theta(1), Profile::zero());
  auto ctx = small_ctx(X, 30);
  const auto a = check_dominance(ctx, g);
  EXPECT_TRUE(a.passed);
  // rescaled corpus: same constant. Mixture and step samples carry random
  // heights, so compare against an explicit evaluation instead.
  const GrandMorreyEvaluator eval(X, g);
  const GridFunction one(24, 1.0);
  const auto prof = eval.profile(one), prof5 = eval.profile(5.0 * one);
  for (double sg : sigma_grid(g)) {
    const double w = std::pow(g.phi(sg), 1 / (g.p - sg));
    EXPECT_NEAR(eval.phi(prof, g.s_max).value * w / eval.phi(prof, sg).value,
                eval.phi(prof5, g.s_max).value * w / eval.phi(prof5, sg).value, 1e-12);
  }
}

TEST(Checks, ReductionIdentity) {
  const auto X = build_uniform_grid(24, 1, Geometry::Circle);
  const auto ctx = small_ctx(X, 30);
  const auto g = GrandParams::make(2.0, 0.25, Profile::theta(1), Profile::zero(),
                                   geometric_eps_grid(1.0, ctx.settings.eps_ratio));
  const CorpusOperator id = [](const GridFunction& f) { return f; };
  const auto r = reduction_transfer_check(ctx, "reduction_identity", "identity", id, id, g, g, 0.5);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.primary_value(), 1.0, 1e-15);
  EXPECT_LE(r.primary_value(), r.empirical["transfer_bound"].get<double>());
  EXPECT_THROW(reduction_transfer_check(ctx, "x", "x", id, id, g, g, 2.0), ParameterError);
}

TEST(Checks, CalibrationHeadroom) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  auto ctx = small_ctx(X, 30);
  const auto fresh = check_maximal_morrey(ctx);
  EXPECT_TRUE(fresh.passed);
  EXPECT_FALSE(fresh.calibrated.has_value());
  const double implied = fresh.empirical["implied_constant"].get<double>();

  Calibration cal;
  cal.store(X.descriptor(), Calibration::key(fresh.check, fresh.params), implied);
  ctx.calibration = &cal;
  const auto ok = check_maximal_morrey(ctx);
  EXPECT_TRUE(ok.passed);
  EXPECT_DOUBLE_EQ(*ok.calibrated, implied);
  // the bound uses 1.5 x the frozen constant
  FormulaParams fp{2.0, 0.25, ctx.doubling};
  EXPECT_NEAR(*ok.theoretical, constant_formula(ConstantFormula::MaximalMorrey, fp, 1.5 * implied), 1e-12);

  Calibration tight;
  tight.store(X.descriptor(), Calibration::key(fresh.check, fresh.params), implied / 4);
  ctx.calibration = &tight;
  EXPECT_FALSE(check_maximal_morrey(ctx).passed);

  const Calibration round(cal.json());
  EXPECT_EQ(*round.lookup(X.descriptor(), Calibration::key(fresh.check, fresh.params)), implied);
}

TEST(Checks, ScalingInvariance) {
  const auto X = build_uniform_grid(24, 1, Geometry::Circle);
  const CzOperator T(X, conjugate_circle_kernel(X));
  const auto g = GrandParams::make(2.0, 0.25, Profile::theta(1), Profile::zero());
  const GrandMorreyEvaluator eval(X, g);
  CorpusOptions opts;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto f = corpus_sample(X, opts, i);
    const auto b = bmo_symbol(X, 0, i);
    const GridFunction cf = 7.0 * f;
    const double r1 = eval.norm(commutator(b, T, f)).value / eval.norm(f).value;
    const double r2 = eval.norm(commutator(b, T, cf)).value / eval.norm(cf).value;
    EXPECT_NEAR(r1, r2, 1e-12 * r1);
    const double m1 = morrey_norm(X, maximal(X, f), 2, 0.25).value / morrey_norm(X, f, 2, 0.25).value;
    const double m2 = morrey_norm(X, maximal(X, cf), 2, 0.25).value / morrey_norm(X, cf, 2, 0.25).value;
    EXPECT_NEAR(m1, m2, 1e-12 * m1);
  }
}

TEST(Checks, TwoAtomPotentialCommutator) {
  // b = (0,1), f = (1,1), alpha = 1/2: [b,I]f = (-r, r) with r = 2^{-1/2}, M of it = (r, r)
  const auto X = build_uniform_grid(2);
  const PotentialOperator I(X, 0.5);
  const GridFunction b{0, 1}, f{1, 1};
  EXPECT_NEAR(bmo_norm(X, b).value, 0.5, 1e-15);
  const auto g = commutator(b, I, f);
  const auto mg = maximal(X, g);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(g[0], -r, 1e-12);
  EXPECT_NEAR(g[1], r, 1e-12);
  EXPECT_NEAR(mg[0], r, 1e-12);
  EXPECT_NEAR(mg[1], r, 1e-12);
  // Morrey ratio with p = 2, lambda = 0: ||Mg||_2 / (||b|| ||f||_2) = r / (1/2)
  EXPECT_NEAR(morrey_norm(X, mg, 2, 0).value / (0.5 * morrey_norm(X, f, 2, 0).value), 2 * r, 1e-12);
}

TEST(Checks, CommutatorSuites) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  const auto ctx = small_ctx(X, 24);
  const auto cz = commutator_suite(ctx, "cz");
  ASSERT_EQ(cz.size(), 2u);
  for (const auto& r : cz) EXPECT_TRUE(std::isfinite(r.primary_value())) << r.check;
  const auto pot = commutator_suite(ctx, "potential");
  ASSERT_EQ(pot.size(), 3u);
  for (const auto& r : pot) EXPECT_TRUE(r.passed) << r.check << " " << r.to_json().dump();
  EXPECT_THROW(commutator_suite(ctx, "other"), ParameterError);
}

TEST(Checks, FeffermanSteinUsesMeanZeroCorpus) {
  const auto X = build_uniform_grid(24, 1, Geometry::Circle);
  const auto r = check_fefferman_stein(small_ctx(X, 20));
  EXPECT_TRUE(r.corpus["mean_zero"].get<bool>());
  EXPECT_TRUE(std::isfinite(r.primary_value()));
  EXPECT_FALSE(r.notes.empty());
}

TEST(Checks, CzMorreyRejectsExponentTwo) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  const CzOperator T(X, conjugate_circle_kernel(X));
  const auto ctx = small_ctx(X, 10);
  EXPECT_THROW(check_cz_morrey(ctx, T, 2.0), ParameterError);
  EXPECT_TRUE(check_cz_morrey(ctx, T, 3.0).passed);
}

TEST(Checks, DeterministicAcrossJobCounts) {
  const auto X = build_uniform_grid(32, 1, Geometry::Circle);
  auto a = small_ctx(X, 20), b = small_ctx(X, 20);
  a.jobs = 1;
  b.jobs = 3;
  const std::vector<std::string> names{"maximal_morrey", "dominance", "commutator_cz_grand", "bmo_equivalence"};
  EXPECT_EQ(reports_to_json(run_checks(a, names)).dump(), reports_to_json(run_checks(b, names)).dump());
}

TEST(Reports, JsonAndCsvShape) {
  const auto X = build_uniform_grid(16, 1, Geometry::Circle);
  const auto reports = run_checks(small_ctx(X, 8), {"eta_identity", "maximal_morrey"});
  const auto j = reports_to_json(reports);
  ASSERT_EQ(j.size(), 2u);
  for (const char* key : {"check", "statement", "corpus", "params", "empirical", "primary", "theoretical",
                          "calibrated_constant", "worst_sample", "verdict", "notes"})
    EXPECT_TRUE(j[1].contains(key)) << key;
  const auto csv = reports_to_csv(reports);
  EXPECT_EQ(csv.rfind("check,verdict,primary,value,theoretical,worst_sample\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_THROW(run_checks(small_ctx(X, 8), {"nonsense"}), ParameterError);
}
