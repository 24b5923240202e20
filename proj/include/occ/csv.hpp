#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "occ/data.hpp"

namespace occ {

/// How the CSV label column is interpreted.
///   observed: 1 -> labeled positive, 0 -> labeled negative, -1 -> background
///   truth:    1 -> true presence,    0 -> true absence,     -1 -> unknown
enum class LabelMode { observed, truth };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(std::string_view sv, const std::string& path, std::size_t line) {
  double v = 0;
  const char* first = sv.data();
  const char* last = sv.data() + sv.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(path, line, "not a number: '" + std::string(sv) + "'");
  return v;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

}  // namespace detail

/// Reads a dataset CSV (header `id,f1,...,fK,label`). Feature order follows
/// the header; the label column is mapped per LabelMode.
inline Dataset load_csv(const std::string& path, LabelMode mode = LabelMode::observed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.front() != "id" || header.back() != "label")
    throw ParseError(path, 1, "header must be id,f1,...,fK,label");
  for (std::size_t i = 1; i + 1 < header.size(); ++i)
    d.feature_names.emplace_back(header[i]);
  const std::size_t k = d.feature_names.size();

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != k + 2)
      throw ParseError(path, lineno,
                       "expected " + std::to_string(k + 2) + " fields, got " +
                           std::to_string(fields.size()));
    Sample s;
    s.id = std::string(fields[0]);
    s.features.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
      s.features.push_back(detail::parse_double(fields[i + 1], path, lineno));
    const std::string_view code = fields.back();
    if (code == "1") {
      if (mode == LabelMode::observed) {
        s.label.observed = Observed::positive;
        s.label.truth = Truth::presence;
      } else {
        s.label.observed = Observed::background;
        s.label.truth = Truth::presence;
      }
    } else if (code == "0") {
      if (mode == LabelMode::observed) {
        s.label.observed = Observed::negative;
        s.label.truth = Truth::absence;
      } else {
        s.label.observed = Observed::background;
        s.label.truth = Truth::absence;
      }
    } else if (code == "-1") {
      s.label.observed = Observed::background;
    } else {
      throw ParseError(path, lineno, "unknown label code '" + std::string(code) + "'");
    }
    d.samples.push_back(std::move(s));
  }
  return d;
}

inline void save_csv(const Dataset& d, const std::string& path,
                     LabelMode mode = LabelMode::observed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "id";
  const std::size_t k = d.feature_count();
  for (std::size_t i = 0; i < k; ++i) {
    out << ',';
    out << (i < d.feature_names.size() ? d.feature_names[i] : "f" + std::to_string(i + 1));
  }
  out << ",label\n";
  for (const Sample& s : d.samples) {
    out << s.id;
    for (double v : s.features) out << ',' << detail::format_double(v);
    int code = -1;
    if (mode == LabelMode::observed) {
      if (s.label.observed == Observed::positive) code = 1;
      else if (s.label.observed == Observed::negative) code = 0;
    } else {
      if (s.label.truth) code = (*s.label.truth == Truth::presence) ? 1 : 0;
    }
    out << ',' << code << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Per-feature (min, max) table: fitting it on one dataset and applying it
/// to another reproduces the identical affine map.
struct MinMaxTable {
  std::vector<std::string> feature_names;
  std::vector<double> min;
  std::vector<double> max;
};

/// Maps each value v to (v - min) / (max - min). Constant features map
/// to 0 so the feature count stays stable.
inline std::pair<Dataset, MinMaxTable> min_max_normalize(const Dataset& d) {
  const std::size_t k = d.feature_count();
  MinMaxTable t;
  t.feature_names = d.feature_names;
  if (t.feature_names.size() != k) {
    t.feature_names.resize(k);
    for (std::size_t j = 0; j < k; ++j)
      if (t.feature_names[j].empty()) t.feature_names[j] = "f" + std::to_string(j + 1);
  }
  t.min.assign(k, std::numeric_limits<double>::infinity());
  t.max.assign(k, -std::numeric_limits<double>::infinity());
  for (const Sample& s : d.samples) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = s.features[j];
      if (!std::isfinite(v))
        throw std::runtime_error("min_max_normalize: non-finite value in sample " + s.id);
      t.min[j] = std::min(t.min[j], v);
      t.max[j] = std::max(t.max[j], v);
    }
  }
  Dataset out = d;
  for (Sample& s : out.samples) {
    for (std::size_t j = 0; j < k; ++j) {
      const double range = t.max[j] - t.min[j];
      s.features[j] = range > 0 ? (s.features[j] - t.min[j]) / range : 0.0;
    }
  }
  return {std::move(out), std::move(t)};
}

/// Applies a fitted table to new data (values may fall outside [0,1]).
inline Dataset apply_normalization(const Dataset& d, const MinMaxTable& t) {
  if (d.feature_count() != t.min.size())
    throw std::invalid_argument("apply_normalization: feature count mismatch");
  Dataset out = d;
  for (Sample& s : out.samples) {
    for (std::size_t j = 0; j < t.min.size(); ++j) {
      const double range = t.max[j] - t.min[j];
      s.features[j] = range > 0 ? (s.features[j] - t.min[j]) / range : 0.0;
    }
  }
  return out;
}

inline void save_minmax_csv(const MinMaxTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "feature,min,max\n";
  for (std::size_t j = 0; j < t.min.size(); ++j)
    out << t.feature_names[j] << ',' << detail::format_double(t.min[j]) << ','
        << detail::format_double(t.max[j]) << '\n';
}

inline MinMaxTable load_minmax_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  MinMaxTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) throw ParseError(path, lineno, "expected feature,min,max");
    t.feature_names.emplace_back(fields[0]);
    t.min.push_back(detail::parse_double(fields[1], path, lineno));
    t.max.push_back(detail::parse_double(fields[2], path, lineno));
  }
  return t;
}

}  // namespace occ
