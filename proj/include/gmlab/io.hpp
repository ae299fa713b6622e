#ifndef GMLAB_IO_HPP
#define GMLAB_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gmlab/core.hpp"
#include "gmlab/homspace.hpp"

namespace gmlab {

/// Malformed input file. The message carries file:line:column when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace detail

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based and points one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    const auto cut = msg.find("parse error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw ParseError(origin + ":" + detail::line_context(text, at) + ": " + msg);
  }
}

inline nlohmann::json load_json(const std::string& path) { return parse_json_text(read_file(path), path); }

namespace detail {

inline double json_real(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + ": expected a number");
  return v.get<double>();
}

}  // namespace detail

/// Space file: {"n": N, "dist": [[...]], "weight": [...], "ct": c, "cs": c, "labels": optional}.
inline DiscreteHomSpace space_from_json(const nlohmann::json& j, const std::string& origin = "space") {
  if (!j.is_object()) throw ParseError(origin + ": expected an object");
  for (const char* key : {"n", "dist", "weight", "ct", "cs"})
    if (!j.contains(key)) throw ParseError(origin + ": missing field '" + key + "'");
  for (const auto& [k, v] : j.items())
    if (k != "n" && k != "dist" && k != "weight" && k != "ct" && k != "cs" && k != "labels")
      throw ParseError(origin + ": unknown field '" + k + "'");
  if (!j["n"].is_number_unsigned()) throw ParseError(origin + ": 'n' must be a positive integer");
  const std::size_t n = j["n"].get<std::size_t>();
  const auto& d = j["dist"];
  if (!d.is_array() || d.size() != n) throw ParseError(origin + ": 'dist' must have n rows");
  std::vector<double> dist;
  dist.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!d[i].is_array() || d[i].size() != n)
      throw ParseError(origin + ": 'dist' row " + std::to_string(i) + " must have n entries");
    for (std::size_t k = 0; k < n; ++k)
      dist.push_back(detail::json_real(d[i][k], origin + ": dist[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
  }
  const auto& w = j["weight"];
  if (!w.is_array() || w.size() != n) throw ParseError(origin + ": 'weight' must have n entries");
  std::vector<double> weight;
  for (std::size_t i = 0; i < n; ++i) weight.push_back(detail::json_real(w[i], origin + ": weight[" + std::to_string(i) + "]"));
  std::vector<std::vector<double>> labels;
  if (j.contains("labels") && !j["labels"].is_null()) {
    const auto& l = j["labels"];
    if (!l.is_array() || l.size() != n) throw ParseError(origin + ": 'labels' must have n entries");
    for (const auto& row : l) {
      std::vector<double> v;
      if (row.is_number()) v.push_back(row.get<double>());
      else if (row.is_array()) for (const auto& x : row) v.push_back(detail::json_real(x, origin + ": label"));
      else throw ParseError(origin + ": labels must be numbers or arrays of numbers");
      labels.push_back(std::move(v));
    }
  }
  return build_from_table(std::move(dist), std::move(weight), detail::json_real(j["ct"], origin + ": ct"),
                          detail::json_real(j["cs"], origin + ": cs"), std::move(labels));
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  return out;
}

inline bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

/// Numeric CSV rows; a non-numeric first line is taken as a header.
inline std::vector<std::vector<double>> read_csv_rows(const std::string& text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      double v;
      if (!parse_real(c, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;
      throw ParseError(origin + ":" + std::to_string(lineno) + ": non-numeric value in '" + line + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                       " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace detail

/// Point-cloud CSV: columns x1..x_dim, weight; Euclidean metric.
inline DiscreteHomSpace space_from_csv(const std::string& text, const std::string& origin = "cloud") {
  const auto rows = detail::read_csv_rows(text, origin);
  if (rows.empty()) throw ParseError(origin + ": no points");
  if (rows.front().size() < 2) throw ParseError(origin + ": need at least one coordinate column and a weight column");
  std::vector<std::vector<double>> coords;
  std::vector<double> weight;
  for (const auto& r : rows) {
    coords.emplace_back(r.begin(), r.end() - 1);
    weight.push_back(r.back());
  }
  return build_point_cloud(coords, std::move(weight));
}

/// Loads a space from a .json table or a .csv point cloud.
inline DiscreteHomSpace load_space(const std::string& path) {
  const std::string text = read_file(path);
  if (detail::has_suffix(path, ".csv")) return space_from_csv(text, path);
  return space_from_json(parse_json_text(text, path), path);
}

/// Function file: JSON array of reals or a single CSV column.
inline GridFunction load_function(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    const auto j = parse_json_text(text, path);
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i)
      v.push_back(detail::json_real(j[i], path + ": entry " + std::to_string(i)));
    return GridFunction(std::move(v));
  }
  const auto rows = detail::read_csv_rows(text, path);
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.size() != 1) throw ParseError(path + ": function CSV must have one column");
    v.push_back(r[0]);
  }
  return GridFunction(std::move(v));
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot write file");
  out << content;
}

}  // namespace gmlab

#endif  // GMLAB_IO_HPP
