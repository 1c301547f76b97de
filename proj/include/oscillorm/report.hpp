#pragma once

// Flat report rows, the versioned CSV they are written to, and the
// slope summary recomputed from those rows.

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "oscillorm/errors.hpp"
#include "oscillorm/fit.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::report {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

// One CSV row.  Numeric fields that do not apply to a row are NaN and are
// written as empty cells.
struct ReportRecord {
  std::string module;
  std::string operation;
  std::string family;
  double N = kNA;
  double a = kNA;
  double b = kNA;
  double lower = kNA;
  double upper = kNA;
  double slope = kNA;
  double residual = kNA;
  double ratio = kNA;
  double seed = kNA;
};

inline const std::vector<std::string>& columns() {
  static const std::vector<std::string> c{"module", "operation", "family", "N",     "a",        "b",
                                          "lower",  "upper",     "slope",  "residual", "ratio", "seed"};
  return c;
}

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (!std::isfinite(v)) throw DomainError("report values must be finite");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& s, std::size_t line) {
  if (s.empty()) return kNA;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

inline void check_text(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) throw DomainError("report text field contains a separator");
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<ReportRecord>& rows) {
  os << "# schema=" << kSchemaVersion << '\n';
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    detail::check_text(r.module);
    detail::check_text(r.operation);
    detail::check_text(r.family);
    os << r.module << ',' << r.operation << ',' << r.family;
    for (double v : {r.N, r.a, r.b, r.lower, r.upper, r.slope, r.residual, r.ratio, r.seed}) {
      os << ',' << detail::format_number(v);
    }
    os << '\n';
  }
}

inline std::vector<ReportRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "# schema=" + std::to_string(kSchemaVersion)) {
    throw ConfigError("csv: missing or unsupported schema header");
  }
  if (!std::getline(is, line) || detail::split(line) != columns()) throw ConfigError("csv: unexpected column header");
  std::vector<ReportRecord> rows;
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != columns().size()) {
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(columns().size()) +
                        " fields");
    }
    ReportRecord r;
    r.module = cells[0];
    r.operation = cells[1];
    r.family = cells[2];
    double* num[] = {&r.N, &r.a, &r.b, &r.lower, &r.upper, &r.slope, &r.residual, &r.ratio, &r.seed};
    for (std::size_t i = 0; i < 9; ++i) *num[i] = detail::parse_number(cells[3 + i], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Slope summary of norm rows.

inline constexpr const char* kNormOperation = "norm";
inline constexpr const char* kFailedOperation = "failed";

struct SlopeCell {
  std::string family;
  double a = 0.0;
  double b = 0.0;
  double expected = 0.0;  // -C for the family and point
  double lower_slope = kNA;
  double upper_slope = kNA;
  double lower_residual = kNA;
  double upper_residual = kNA;
  std::size_t rungs = 0;
  std::size_t failed = 0;
  bool pass = false;
};

struct Summary {
  double tolerance = 0.07;
  std::vector<SlopeCell> cells;
  std::size_t failures = 0;
  bool pass() const {
    if (failures) return false;
    for (const auto& c : cells) {
      if (!c.pass) return false;
    }
    return !cells.empty();
  }
};

// Parses a family tag of the form j<j>k<k>n<n>.
inline PhaseFamily parse_family(const std::string& tag) {
  int j = 0, k = 0, n = 0;
  char tail = 0;
  if (std::sscanf(tag.c_str(), "j%dk%dn%d%c", &j, &k, &n, &tail) != 3) {
    throw ConfigError("bad family tag '" + tag + "'");
  }
  return PhaseFamily(j, k, n);
}

// Groups norm rows by (family, a, b) in first-appearance order, fits both
// bound ladders, and flags each cell against -C within `tolerance`.
inline Summary summarize(const std::vector<ReportRecord>& rows, double tolerance = 0.07) {
  Summary s;
  s.tolerance = tolerance;
  std::map<std::tuple<std::string, double, double>, std::size_t> index;
  std::vector<std::vector<std::pair<double, double>>> lo, hi;
  for (const auto& r : rows) {
    if (r.module != "opnorm") continue;
    const bool failed = r.operation == kFailedOperation;
    if (!failed && r.operation != kNormOperation) continue;
    if (failed) ++s.failures;
    const auto key = std::make_tuple(r.family, r.a, r.b);
    auto it = index.find(key);
    if (it == index.end()) {
      SlopeCell c;
      c.family = r.family;
      c.a = r.a;
      c.b = r.b;
      c.expected = -theoretical_exponent(parse_family(r.family), LebesguePoint(r.a, r.b));
      it = index.emplace(key, s.cells.size()).first;
      s.cells.push_back(c);
      lo.emplace_back();
      hi.emplace_back();
    }
    SlopeCell& c = s.cells[it->second];
    if (failed) {
      ++c.failed;
      continue;
    }
    ++c.rungs;
    lo[it->second].emplace_back(r.N, r.lower);
    hi[it->second].emplace_back(r.N, r.upper);
  }
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    SlopeCell& c = s.cells[i];
    if (c.failed || lo[i].size() < 4) continue;
    const ExponentFit fl = fit_exponent(lo[i]);
    const ExponentFit fu = fit_exponent(hi[i]);
    c.lower_slope = fl.slope;
    c.upper_slope = fu.slope;
    c.lower_residual = fl.max_residual;
    c.upper_residual = fu.max_residual;
    c.pass = std::abs(fl.slope - c.expected) <= tolerance && std::abs(fu.slope - c.expected) <= tolerance;
  }
  return s;
}

inline nlohmann::json to_json(const Summary& s) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["tolerance"] = s.tolerance;
  j["failures"] = s.failures;
  j["pass"] = s.pass();
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["cells"] = nlohmann::json::array();
  for (const auto& c : s.cells) {
    j["cells"].push_back({{"family", c.family},
                          {"a", c.a},
                          {"b", c.b},
                          {"theoretical_exponent", -c.expected},
                          {"expected_slope", c.expected},
                          {"lower_slope", num(c.lower_slope)},
                          {"upper_slope", num(c.upper_slope)},
                          {"lower_deviation", num(std::abs(c.lower_slope - c.expected))},
                          {"upper_deviation", num(std::abs(c.upper_slope - c.expected))},
                          {"rungs", c.rungs},
                          {"failed_rungs", c.failed},
                          {"pass", c.pass}});
  }
  return j;
}

}  // namespace oscillorm::report
