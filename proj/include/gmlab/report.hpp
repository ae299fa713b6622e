#ifndef GMLAB_REPORT_HPP
#define GMLAB_REPORT_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gmlab/funcnorm.hpp"

namespace gmlab {

using Json = nlohmann::ordered_json;

/// Non-finite doubles become null; everything else is stored as is.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

/// Outcome of one verification check.
struct VerificationReport {
  std::string check;
  std::string statement;  // the inequality or identity being checked
  Json corpus = nullptr;
  Json params = Json::object();
  Json empirical = Json::object();
  std::string primary;                  // key in `empirical` summarizing the check
  std::optional<double> theoretical;    // bound the empirical value is compared against
  std::optional<double> calibrated;     // frozen absolute constant, if one applies
  std::optional<std::size_t> worst_sample;
  bool passed = false;
  std::vector<std::string> notes;

  double primary_value() const {
    if (primary.empty() || !empirical.contains(primary) || empirical[primary].is_null())
      return std::numeric_limits<double>::quiet_NaN();
    return empirical[primary].get<double>();
  }

  Json to_json() const {
    Json j;
    j["check"] = check;
    j["statement"] = statement;
    j["corpus"] = corpus;
    j["params"] = params;
    j["empirical"] = empirical;
    j["primary"] = primary;
    j["theoretical"] = theoretical ? number(*theoretical) : Json(nullptr);
    j["calibrated_constant"] = calibrated ? number(*calibrated) : Json(nullptr);
    j["worst_sample"] = optional_json(worst_sample);
    j["verdict"] = passed ? "pass" : "fail";
    j["notes"] = notes;
    return j;
  }
};

inline Json reports_to_json(const std::vector<VerificationReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(r.to_json());
  return a;
}

/// One CSV row per check: check,verdict,primary,value,theoretical,worst_sample.
inline std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  auto fmt = [](std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return std::string();
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
  };
  std::ostringstream os;
  os << "check,verdict,primary,value,theoretical,worst_sample\n";
  for (const auto& r : reports) {
    os << r.check << ',' << (r.passed ? "pass" : "fail") << ',' << r.primary << ','
       << fmt(r.primary_value()) << ',' << fmt(r.theoretical) << ','
       << (r.worst_sample ? std::to_string(*r.worst_sample) : std::string()) << '\n';
  }
  return os.str();
}

/// {"norm", "params", "value", "argmax": {"eps", "center", "radius_rank"}}.
inline Json norm_record(const std::string& name, const Json& params, const NormResult& r) {
  Json j;
  j["norm"] = name;
  j["params"] = params;
  j["value"] = number(r.value);
  Json arg;
  arg["eps"] = optional_json(r.eps);
  arg["center"] = optional_json(r.center);
  arg["radius_rank"] = optional_json(r.radius_rank);
  j["argmax"] = arg;
  return j;
}

inline Json operator_record(const std::string& name, const Json& params, const GridFunction& values) {
  Json j;
  j["op"] = name;
  j["params"] = params;
  Json v = Json::array();
  for (double x : values) v.push_back(number(x));
  j["values"] = v;
  return j;
}

}  // namespace gmlab

#endif  // GMLAB_REPORT_HPP
