#ifndef GMLAB_SUITE_HPP
#define GMLAB_SUITE_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gmlab/io.hpp"
#include "gmlab/verify.hpp"

namespace gmlab {

/// Schema violations in a suite configuration, all collected before failing.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out;
    for (const auto& s : p) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> problems_;
};

struct SpaceSource {
  std::string kind = "circle";  // circle | interval | square | torus | file
  std::size_t n = 256;
  std::string path;
};

struct SuiteConfig {
  SpaceSource space;
  CorpusOptions corpus;
  CheckSettings settings;
  Tolerances tol;
  std::string calibration;  // path, resolved against the config's directory
  std::vector<std::string> checks = all_checks();
  unsigned jobs = 0;        // 0 = all cores
};

namespace detail {

class SchemaReader {
 public:
  std::vector<std::string> problems;

  void keys(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) problems.push_back(where + ": unknown key '" + k + "'");
    }
  }
  bool object(const nlohmann::json& j, const std::string& where) {
    if (j.is_object()) return true;
    problems.push_back(where + ": expected an object");
    return false;
  }
  void real(const nlohmann::json& obj, const char* key, const std::string& where, double& out) {
    if (!obj.contains(key)) return;
    if (obj[key].is_number()) out = obj[key].get<double>();
    else problems.push_back(where + "." + key + ": expected a number");
  }
  template <class T>
  void count(const nlohmann::json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    if (obj[key].is_number_unsigned()) out = obj[key].get<T>();
    else problems.push_back(where + "." + key + ": expected a non-negative integer");
  }
  void text(const nlohmann::json& obj, const char* key, const std::string& where, std::string& out) {
    if (!obj.contains(key)) return;
    if (obj[key].is_string()) out = obj[key].get<std::string>();
    else problems.push_back(where + "." + key + ": expected a string");
  }
};

}  // namespace detail

inline SuiteConfig parse_suite_config(const nlohmann::json& j) {
  SuiteConfig c;
  detail::SchemaReader r;
  if (!r.object(j, "config")) throw ConfigError(r.problems);
  r.keys(j, "config", {"space", "corpus", "params", "tolerances", "calibration", "checks", "jobs"});

  if (j.contains("space") && r.object(j["space"], "space")) {
    const auto& s = j["space"];
    r.keys(s, "space", {"kind", "n", "path"});
    r.text(s, "kind", "space", c.space.kind);
    r.count(s, "n", "space", c.space.n);
    r.text(s, "path", "space", c.space.path);
    const auto& k = c.space.kind;
    if (k != "circle" && k != "interval" && k != "square" && k != "torus" && k != "file")
      r.problems.push_back("space.kind: must be circle, interval, square, torus or file");
    if (k == "file" && c.space.path.empty()) r.problems.push_back("space.path: required when kind is file");
    if (k != "file" && c.space.n < 2) r.problems.push_back("space.n: must be at least 2");
  }

  if (j.contains("corpus") && r.object(j["corpus"], "corpus")) {
    const auto& s = j["corpus"];
    r.keys(s, "corpus", {"size", "seed", "families", "mean_zero"});
    r.count(s, "size", "corpus", c.corpus.size);
    r.count(s, "seed", "corpus", c.corpus.seed);
    if (s.contains("mean_zero")) {
      if (s["mean_zero"].is_boolean()) c.corpus.mean_zero = s["mean_zero"].get<bool>();
      else r.problems.push_back("corpus.mean_zero: expected a boolean");
    }
    if (s.contains("families")) {
      if (!s["families"].is_array() || s["families"].empty()) {
        r.problems.push_back("corpus.families: expected a non-empty array");
      } else {
        c.corpus.families.clear();
        for (const auto& f : s["families"]) {
          try {
            c.corpus.families.push_back(parse_family(f.is_string() ? f.get<std::string>() : f.dump()));
          } catch (const Error&) {
            r.problems.push_back("corpus.families: unknown family " + f.dump());
          }
        }
      }
    }
    if (c.corpus.size == 0) r.problems.push_back("corpus.size: must be positive");
  }

  if (j.contains("params") && r.object(j["params"], "params")) {
    const auto& s = j["params"];
    auto& st = c.settings;
    r.keys(s, "params", {"p", "lambda", "theta", "theta2", "A_slope", "s", "sigma", "alpha", "theta1", "A2_slope",
                         "cz_p", "eps_ratio", "eps_floor", "eta_draws", "kernel", "embed_eps", "bmo_samples"});
    r.real(s, "p", "params", st.p);
    r.real(s, "lambda", "params", st.lambda);
    r.real(s, "theta", "params", st.theta);
    r.real(s, "theta2", "params", st.theta2);
    r.real(s, "A_slope", "params", st.A_slope);
    r.real(s, "s", "params", st.s);
    r.real(s, "sigma", "params", st.sigma);
    r.real(s, "alpha", "params", st.alpha);
    r.real(s, "theta1", "params", st.theta1);
    r.real(s, "A2_slope", "params", st.A2_slope);
    r.real(s, "eps_ratio", "params", st.eps_ratio);
    r.real(s, "eps_floor", "params", st.eps_floor);
    r.real(s, "embed_eps", "params", st.embed_eps);
    r.count(s, "eta_draws", "params", st.eta_draws);
    r.count(s, "bmo_samples", "params", st.bmo_samples);
    r.text(s, "kernel", "params", st.kernel);
    if (s.contains("cz_p")) {
      if (!s["cz_p"].is_array()) {
        r.problems.push_back("params.cz_p: expected an array of numbers");
      } else {
        st.cz_p.clear();
        for (const auto& v : s["cz_p"]) {
          if (v.is_number()) st.cz_p.push_back(v.get<double>());
          else r.problems.push_back("params.cz_p: expected an array of numbers");
        }
      }
    }
    if (!(st.p > 1.0)) r.problems.push_back("params.p: must exceed 1");
    if (!(st.lambda >= 0.0 && st.lambda < 1.0)) r.problems.push_back("params.lambda: must lie in [0,1)");
    if (!(st.s >= 1.0 && st.s < st.p)) r.problems.push_back("params.s: must satisfy 1 <= s < p");
    if (!(st.alpha > 0.0 && st.alpha < 1.0)) r.problems.push_back("params.alpha: must lie in (0,1)");
    if (!(st.eps_ratio > 0.0 && st.eps_ratio < 1.0)) r.problems.push_back("params.eps_ratio: must lie in (0,1)");
    if (!(st.eps_floor > 0.0)) r.problems.push_back("params.eps_floor: must be positive");
    if (!(st.embed_eps > 0.0 && st.embed_eps < 1.0)) r.problems.push_back("params.embed_eps: must lie in (0,1)");
    if (!st.kernel.empty() && st.kernel != "conjugate_circle" && st.kernel != "hilbert_interval")
      r.problems.push_back("params.kernel: must be conjugate_circle or hilbert_interval");
    for (double p : st.cz_p)
      if (!(p > 1.0) || p == 2.0) r.problems.push_back("params.cz_p: entries must exceed 1 and differ from 2");
  }

  if (j.contains("tolerances") && r.object(j["tolerances"], "tolerances")) {
    const auto& s = j["tolerances"];
    r.keys(s, "tolerances", {"eta_residual", "aux_value", "slope", "headroom", "dominance_stability", "stability", "exact"});
    r.real(s, "eta_residual", "tolerances", c.tol.eta_residual);
    r.real(s, "aux_value", "tolerances", c.tol.aux_value);
    r.real(s, "slope", "tolerances", c.tol.slope);
    r.real(s, "headroom", "tolerances", c.tol.headroom);
    r.real(s, "dominance_stability", "tolerances", c.tol.dominance_stability);
    r.real(s, "stability", "tolerances", c.tol.stability);
    r.real(s, "exact", "tolerances", c.tol.exact);
    if (!(c.tol.headroom >= 1.0)) r.problems.push_back("tolerances.headroom: must be at least 1");
  }

  r.text(j, "calibration", "config", c.calibration);
  r.count(j, "jobs", "config", c.jobs);

  if (j.contains("checks")) {
    const auto& s = j["checks"];
    if (s.is_string() && s.get<std::string>() == "all") {
      c.checks = all_checks();
    } else if (s.is_array()) {
      c.checks.clear();
      for (const auto& v : s) {
        if (!v.is_string()) {
          r.problems.push_back("checks: entries must be strings");
        } else if (!is_check_name(v.get<std::string>())) {
          r.problems.push_back("checks: unknown check '" + v.get<std::string>() + "'");
        } else {
          c.checks.push_back(v.get<std::string>());
        }
      }
    } else {
      r.problems.push_back("checks: expected \"all\" or an array of check names");
    }
  }
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

inline SuiteConfig load_suite_config(const std::string& path) {
  SuiteConfig c = parse_suite_config(load_json(path));
  const auto base = std::filesystem::path(path).parent_path();
  if (!c.calibration.empty() && std::filesystem::path(c.calibration).is_relative())
    c.calibration = (base / c.calibration).lexically_normal().string();
  if (c.space.kind == "file" && std::filesystem::path(c.space.path).is_relative())
    c.space.path = (base / c.space.path).lexically_normal().string();
  return c;
}

inline DiscreteHomSpace build_space(const SpaceSource& s) {
  if (s.kind == "circle") return build_uniform_grid(s.n, 1, Geometry::Circle);
  if (s.kind == "interval") return build_uniform_grid(s.n, 1, Geometry::Interval);
  if (s.kind == "square") return build_uniform_grid(s.n, 2, Geometry::Interval);
  if (s.kind == "torus") return build_uniform_grid(s.n, 2, Geometry::Circle);
  if (s.kind == "file") return load_space(s.path);
  throw ParameterError("unknown space kind '" + s.kind + "'");
}

inline Calibration load_calibration(const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) return Calibration();
  return Calibration(load_json(path));
}

struct SuiteResult {
  std::vector<VerificationReport> reports;
  bool passed = true;
};

inline SuiteResult run_suite(const SuiteConfig& cfg, const DiscreteHomSpace& space, const Calibration* cal) {
  const VerifyContext ctx(space, cfg.corpus, cfg.settings, cfg.tol, cal, resolve_jobs(cfg.jobs));
  SuiteResult out;
  out.reports = run_checks(ctx, cfg.checks);
  for (const auto& r : out.reports) out.passed = out.passed && r.passed;
  return out;
}

}  // namespace gmlab

#endif  // GMLAB_SUITE_HPP
