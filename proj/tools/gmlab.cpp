// gmlab: command-line front end for the grand Morrey numerical laboratory.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gmlab/io.hpp"
#include "gmlab/suite.hpp"

namespace {

using gmlab::Json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : gmlab::Error {
  explicit UsageError(const std::string& w) : gmlab::Error(w) {}
};

struct SpaceFlags {
  std::string file;
  std::size_t grid = 0;
  std::size_t circle = 0;

  void attach(CLI::App* app) {
    auto* f = app->add_option("--space", file, "space file (.json table or .csv point cloud)");
    auto* g = app->add_option("--grid", grid, "uniform grid on [0,1] with N atoms");
    auto* c = app->add_option("--circle", circle, "uniform circle with N atoms");
    f->excludes(g)->excludes(c);
    g->excludes(c);
  }

  gmlab::DiscreteHomSpace build() const {
    if (!file.empty()) return gmlab::load_space(file);
    if (grid) return gmlab::build_uniform_grid(grid, 1, gmlab::Geometry::Interval);
    if (circle) return gmlab::build_uniform_grid(circle, 1, gmlab::Geometry::Circle);
    throw UsageError("one of --space, --grid or --circle is required");
  }
};

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_space(const SpaceFlags& sf, const std::vector<std::string>& checks) {
  bool all = checks.empty();
  auto want = [&](const char* name) {
    return all || std::find(checks.begin(), checks.end(), "all") != checks.end() ||
           std::find(checks.begin(), checks.end(), name) != checks.end();
  };
  for (const auto& c : checks)
    if (c != "all" && c != "axioms" && c != "doubling" && c != "reverse" && c != "annulus")
      throw UsageError("unknown space check '" + c + "'");
  try {
    const auto X = sf.build();
    Json out;
    out["descriptor"] = X.descriptor();
    out["n"] = X.size();
    out["ct"] = X.ct();
    out["cs"] = X.cs();
    out["axioms"] = "pass";
    bool ok = true;
    if (want("doubling")) out["doubling_constant"] = gmlab::number(gmlab::doubling_constant(X));
    if (want("reverse")) {
      try {
        const auto rd = gmlab::reverse_doubling_exponent(X);
        out["reverse_doubling"] = {{"gamma", gmlab::number(rd.gamma)}, {"constant", gmlab::number(rd.constant)},
                                   {"pairs", rd.pairs}};
      } catch (const gmlab::DegenerateFit& e) {
        out["reverse_doubling"] = {{"gamma", nullptr}, {"note", e.what()}};
      }
    }
    if (want("annulus")) {
      const auto a = gmlab::check_annulus(X);
      Json fails = Json::array();
      for (std::size_t i = 0; i < a.failures.size() && i < 10; ++i)
        fails.push_back({{"center", a.failures[i].center}, {"inner", a.failures[i].inner}, {"outer", a.failures[i].outer}});
      out["annulus"] = {{"passed", a.passed}, {"pairs_checked", a.pairs_checked}, {"failures", fails}, {"note", a.note}};
      ok = ok && a.passed;
    }
    out["verdict"] = ok ? "pass" : "fail";
    print(out);
    return ok ? kPass : kFail;
  } catch (const gmlab::SpaceValidationError& e) {
    Json out;
    out["axioms"] = "fail";
    out["violation"] = gmlab::axiom_name(e.axiom());
    out["witness"] = e.witness();
    out["message"] = e.what();
    out["verdict"] = "fail";
    print(out);
    return kFail;
  }
}

struct NormFlags {
  std::string f;
  std::string norm;
  double p = 2.0, lambda = 0.0, theta = 1.0, A_slope = 0.0;
};

int cmd_norm(const SpaceFlags& sf, const NormFlags& nf) {
  static const std::vector<std::string> names{"lp", "morrey", "bmo", "bmo-inf", "bmo-jn", "grand-lebesgue", "grand-morrey"};
  if (std::find(names.begin(), names.end(), nf.norm) == names.end())
    throw UsageError("unknown norm '" + nf.norm + "'");
  const auto X = sf.build();
  const auto f = gmlab::load_function(nf.f);
  X.require_function(f);
  Json params;
  gmlab::NormResult r;
  if (nf.norm == "lp") {
    params = {{"p", nf.p}};
    r.value = gmlab::lp_norm(X, f, nf.p);
  } else if (nf.norm == "morrey") {
    params = {{"p", nf.p}, {"lambda", nf.lambda}};
    r = gmlab::morrey_norm(X, f, nf.p, nf.lambda);
  } else if (nf.norm.rfind("bmo", 0) == 0) {
    gmlab::BmoOptions opts;
    if (nf.norm == "bmo-inf") opts.variant = gmlab::BmoVariant::Inf;
    if (nf.norm == "bmo-jn") {
      opts.variant = gmlab::BmoVariant::JohnNirenberg;
      opts.p = nf.p;
      params = {{"p", nf.p}};
    }
    r = gmlab::bmo_norm(X, f, opts);
  } else if (nf.norm == "grand-lebesgue") {
    params = {{"p", nf.p}, {"theta", nf.theta}};
    r = gmlab::grand_lebesgue_norm(X, f, nf.p, nf.theta, gmlab::geometric_eps_grid(nf.p - 1.0));
  } else {
    params = {{"p", nf.p}, {"lambda", nf.lambda}, {"theta", nf.theta}, {"A_slope", nf.A_slope}};
    const auto g = gmlab::GrandParams::make(nf.p, nf.lambda, gmlab::Profile::theta(nf.theta),
                                            gmlab::Profile::linear(nf.A_slope));
    r = gmlab::grand_morrey_norm(X, f, g);
  }
  print(gmlab::norm_record(nf.norm, params, r));
  return kPass;
}

struct OpFlags {
  std::string op, f, b, kernel, kernel_file;
  double s = 2.0, alpha = 0.5;
};

int cmd_op(const SpaceFlags& sf, const OpFlags& of) {
  const auto X = sf.build();
  const auto f = gmlab::load_function(of.f);
  X.require_function(f);
  auto kernel = [&] {
    if (!of.kernel_file.empty()) {
      const auto j = gmlab::load_json(of.kernel_file);
      std::vector<double> table;
      for (const auto& row : j)
        for (const auto& v : row) table.push_back(v.get<double>());
      return gmlab::kernel_from_table(X, std::move(table), of.kernel_file);
    }
    const std::string name = of.kernel.empty()
                                 ? (X.descriptor().rfind("circle", 0) == 0 ? "conjugate_circle" : "hilbert_interval")
                                 : of.kernel;
    return gmlab::make_kernel(X, name);
  };
  auto symbol = [&] {
    if (of.b.empty()) throw UsageError("--b is required for commutators");
    auto b = gmlab::load_function(of.b);
    X.require_function(b);
    return b;
  };
  Json params = Json::object();
  gmlab::GridFunction out;
  if (of.op == "maximal") {
    out = gmlab::maximal(X, f);
  } else if (of.op == "maximal_s") {
    params["s"] = of.s;
    out = gmlab::maximal_s(X, f, of.s);
  } else if (of.op == "sharp") {
    out = gmlab::sharp_maximal(X, f);
  } else if (of.op == "cz") {
    const gmlab::CzOperator T(X, kernel());
    params["kernel"] = T.kernel().name;
    out = T(f);
  } else if (of.op == "potential") {
    params["alpha"] = of.alpha;
    out = gmlab::PotentialOperator(X, of.alpha)(f);
  } else if (of.op == "commutator_cz") {
    const gmlab::CzOperator T(X, kernel());
    params["kernel"] = T.kernel().name;
    out = gmlab::commutator(symbol(), T, f);
  } else if (of.op == "commutator_potential") {
    params["alpha"] = of.alpha;
    out = gmlab::commutator(symbol(), gmlab::PotentialOperator(X, of.alpha), f);
  } else {
    throw UsageError("unknown operator '" + of.op + "'");
  }
  print(gmlab::operator_record(of.op, params, out));
  return kPass;
}

struct VerifyFlags {
  std::string config, out, format = "json", calibration;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
};

gmlab::SuiteConfig resolve_config(const VerifyFlags& vf) {
  if (vf.config.empty()) throw UsageError("--config is required");
  auto cfg = gmlab::load_suite_config(vf.config);
  if (vf.seed) cfg.corpus.seed = *vf.seed;
  if (vf.jobs) cfg.jobs = *vf.jobs;
  if (!vf.calibration.empty()) cfg.calibration = vf.calibration;
  if (cfg.checks.empty()) throw UsageError("no checks selected");
  return cfg;
}

int cmd_verify(const VerifyFlags& vf) {
  const auto cfg = resolve_config(vf);
  const auto X = gmlab::build_space(cfg.space);
  const auto cal = gmlab::load_calibration(cfg.calibration);
  const auto result = gmlab::run_suite(cfg, X, &cal);
  const std::string json = gmlab::reports_to_json(result.reports).dump(2) + "\n";
  const std::string csv = gmlab::reports_to_csv(result.reports);
  if (!vf.out.empty()) {
    std::filesystem::create_directories(vf.out);
    gmlab::write_file((std::filesystem::path(vf.out) / "report.json").string(), json);
    gmlab::write_file((std::filesystem::path(vf.out) / "summary.csv").string(), csv);
  }
  std::cout << (vf.format == "csv" ? csv : json);
  return result.passed ? kPass : kFail;
}

int cmd_calibrate(VerifyFlags vf, std::size_t size, const std::string& target) {
  auto cfg = resolve_config(vf);
  cfg.corpus.size = size;
  if (!vf.seed) cfg.corpus.seed = 0;
  const auto X = gmlab::build_space(cfg.space);
  gmlab::Calibration cal = gmlab::load_calibration(target);
  const auto result = gmlab::run_suite(cfg, X, nullptr);
  const gmlab::VerifyContext ctx(X, cfg.corpus, cfg.settings, cfg.tol);
  gmlab::harvest_calibration(cal, ctx, result.reports);
  Json corpus = ctx.corpus_json();
  cal.set_corpus(corpus);
  const auto dir = std::filesystem::path(target).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  gmlab::write_file(target, cal.json().dump(2) + "\n");
  std::cout << cal.json().dump(2) << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for grand Morrey spaces on finite spaces of homogeneous type"};
  app.require_subcommand(1);

  SpaceFlags space_flags, norm_space, op_space;
  std::vector<std::string> space_checks;
  auto* space = app.add_subcommand("space", "validate a space and report its constants");
  space_flags.attach(space);
  space->add_option("--check", space_checks, "all | axioms | doubling | reverse | annulus");

  NormFlags nf;
  auto* norm = app.add_subcommand("norm", "evaluate a norm of a function");
  norm_space.attach(norm);
  norm->add_option("--f", nf.f, "function file (JSON array or CSV column)")->required();
  norm->add_option("--norm", nf.norm, "lp | morrey | bmo | bmo-inf | bmo-jn | grand-lebesgue | grand-morrey")->required();
  norm->add_option("--p", nf.p);
  norm->add_option("--lambda", nf.lambda);
  norm->add_option("--theta", nf.theta);
  norm->add_option("--A-slope", nf.A_slope, "A(eps) = slope * eps");

  OpFlags of;
  auto* op = app.add_subcommand("op", "apply an operator to a function");
  op_space.attach(op);
  op->add_option("--op", of.op, "maximal | maximal_s | sharp | cz | potential | commutator_cz | commutator_potential")
      ->required();
  op->add_option("--f", of.f)->required();
  op->add_option("--b", of.b, "commutator symbol file");
  op->add_option("--s", of.s);
  op->add_option("--alpha", of.alpha);
  op->add_option("--kernel", of.kernel, "conjugate_circle | hilbert_interval");
  op->add_option("--kernel-file", of.kernel_file, "dense N x N kernel table (JSON)");

  VerifyFlags vf;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  auto* verify = app.add_subcommand("verify", "run verification suites from a config file");
  verify->add_option("--config", vf.config)->required();
  auto* seed_opt = verify->add_option("--seed", seed, "corpus seed override");
  verify->add_option("--out", vf.out, "directory for report.json and summary.csv");
  verify->add_option("--format", vf.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  auto* jobs_opt = verify->add_option("--jobs", jobs, "worker threads (default: all cores)");
  verify->add_option("--calibration", vf.calibration, "calibration file override");

  VerifyFlags cf;
  std::uint64_t cseed = 0;
  std::size_t csize = 1000;
  std::string target = "data/calibration.json";
  unsigned cjobs = 0;
  auto* calibrate = app.add_subcommand("calibrate", "freeze absolute constants on a calibration corpus");
  calibrate->add_option("--config", cf.config)->required();
  auto* cseed_opt = calibrate->add_option("--seed", cseed);
  calibrate->add_option("--size", csize, "calibration corpus size");
  calibrate->add_option("--out", target, "calibration file to update");
  auto* cjobs_opt = calibrate->add_option("--jobs", cjobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*space) return cmd_space(space_flags, space_checks);
    if (*norm) return cmd_norm(norm_space, nf);
    if (*op) return cmd_op(op_space, of);
    if (*verify) {
      if (*seed_opt) vf.seed = seed;
      if (*jobs_opt) vf.jobs = jobs;
      return cmd_verify(vf);
    }
    if (*calibrate) {
      if (*cseed_opt) cf.seed = cseed;
      if (*cjobs_opt) cf.jobs = cjobs;
      return cmd_calibrate(cf, csize, target);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gmlab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const gmlab::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kUsage;
  } catch (const gmlab::SpaceValidationError& e) {
    std::cerr << "space error: " << e.what() << "\n";
    return kFail;
  } catch (const gmlab::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
