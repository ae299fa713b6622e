#include <gtest/gtest.h>

#include <filesystem>

#include "gmlab/io.hpp"
#include "gmlab/suite.hpp"

using namespace gmlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "gmlab_io_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  write_file(p.string(), content);
  return p;
}

}  // namespace

TEST(SpaceFile, ParsesTable) {
  const auto X = space_from_json(nlohmann::json::parse(
      R"({"n": 3, "dist": [[0,1,2],[1,0,1],[2,1,0]], "weight": [1,1,2], "ct": 1, "cs": 1, "labels": [0, 1, 2]})"));
  EXPECT_EQ(X.size(), 3u);
  EXPECT_DOUBLE_EQ(X.total_measure(), 4.0);
  EXPECT_DOUBLE_EQ(X.labels()[2][0], 2.0);
}

TEST(SpaceFile, SchemaAndAxiomErrors) {
  EXPECT_THROW(space_from_json(nlohmann::json::parse(R"({"n": 2, "dist": [[0,1],[1,0]], "ct": 1, "cs": 1})")),
               ParseError);
  EXPECT_THROW(space_from_json(nlohmann::json::parse(
                   R"({"n": 2, "dist": [[0,1]], "weight": [1,1], "ct": 1, "cs": 1})")),
               ParseError);
  EXPECT_THROW(space_from_json(nlohmann::json::parse(
                   R"({"n": 3, "dist": [[0,1,5],[1,0,1],[5,1,0]], "weight": [1,1,1], "ct": 1, "cs": 1})")),
               SpaceValidationError);
}

TEST(SpaceFile, ParseErrorHasLineContext) {
  const auto p = scratch("bad.json", "{\n  \"n\": 2,\n  \"dist\": [[0,1],[1,0]\n}\n");
  try {
    load_space(p.string());
    FAIL() << "malformed JSON accepted";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:4:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_space((fs::temp_directory_path() / "gmlab_io_tests" / "missing.json").string()), ParseError);
}

TEST(SpaceFile, PointCloudCsv) {
  const auto p = scratch("cloud.csv", "x1,x2,weight\n0,0,1\n3,4,1\n0,1,0.5\n");
  const auto X = load_space(p.string());
  EXPECT_EQ(X.size(), 3u);
  EXPECT_DOUBLE_EQ(X.dist(0, 1), 5.0);
  const auto bad = scratch("cloud_bad.csv", "x1,weight\n0,1\n1,oops\n");
  try {
    load_space(bad.string());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(FunctionFile, JsonAndCsv) {
  EXPECT_EQ(load_function(scratch("f.json", "[1, 2.5, -3]").string()).values(), (std::vector<double>{1, 2.5, -3}));
  EXPECT_EQ(load_function(scratch("f.csv", "f\n1\n2.5\n-3\n").string()).values(), (std::vector<double>{1, 2.5, -3}));
  EXPECT_THROW(load_function(scratch("g.csv", "1,2\n3,4\n").string()), ParseError);
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_suite_config(nlohmann::json::parse(R"({
    "space": {"kind": "interval", "n": 40},
    "corpus": {"size": 12, "seed": 9, "families": ["step", "spike"]},
    "params": {"p": 3, "lambda": 0.5, "cz_p": [1.25]},
    "tolerances": {"headroom": 2},
    "checks": ["eta_identity", "maximal_morrey"],
    "jobs": 2
  })"));
  EXPECT_EQ(c.space.kind, "interval");
  EXPECT_EQ(c.space.n, 40u);
  EXPECT_EQ(c.corpus.size, 12u);
  EXPECT_EQ(c.corpus.seed, 9u);
  EXPECT_EQ(c.corpus.families.size(), 2u);
  EXPECT_DOUBLE_EQ(c.settings.p, 3.0);
  EXPECT_DOUBLE_EQ(c.settings.cz_p.at(0), 1.25);
  EXPECT_DOUBLE_EQ(c.tol.headroom, 2.0);
  EXPECT_DOUBLE_EQ(c.tol.eta_residual, 1e-12);
  EXPECT_EQ(c.checks.size(), 2u);
  EXPECT_EQ(c.jobs, 2u);
  EXPECT_EQ(parse_suite_config(nlohmann::json::parse(R"({"checks": "all"})")).checks, all_checks());
  EXPECT_TRUE(parse_suite_config(nlohmann::json::parse(R"({"checks": []})")).checks.empty());
}

TEST(Config, EnumeratesAllSchemaErrors) {
  try {
    parse_suite_config(nlohmann::json::parse(R"({
      "space": {"kind": "sphere"},
      "corpus": {"size": "many"},
      "params": {"p": 0.5, "bogus": 1},
      "checks": ["eta_identity", "nope"],
      "extra": true
    })"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.problems().size(), 5u);
    const std::string all = e.what();
    for (const char* frag : {"space.kind", "corpus.size", "params.p", "params: unknown key 'bogus'", "nope", "extra"})
      EXPECT_NE(all.find(frag), std::string::npos) << frag << " missing from: " << all;
  }
}

TEST(Config, RelativePathsResolveAgainstConfigFile) {
  const auto p = scratch("cfg.json", R"({"calibration": "cal.json", "space": {"kind": "file", "path": "s.json"}})");
  const auto c = load_suite_config(p.string());
  EXPECT_EQ(fs::path(c.calibration), p.parent_path() / "cal.json");
  EXPECT_EQ(fs::path(c.space.path), p.parent_path() / "s.json");
}

TEST(Suite, RunsSelectedChecks) {
  SuiteConfig cfg;
  cfg.space = {"circle", 16, ""};
  cfg.corpus.size = 8;
  cfg.checks = {"eta_identity", "bmo_equivalence"};
  cfg.jobs = 1;
  const auto X = build_space(cfg.space);
  EXPECT_EQ(X.descriptor(), "circle16");
  const auto r = run_suite(cfg, X, nullptr);
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_TRUE(r.passed);
}
