#pragma once

// Ladder sweeps over (family, point) cells: configuration, a small worker
// pool with deterministic output order, and the report rows it produces.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "oscillorm/errors.hpp"
#include "oscillorm/opnorm.hpp"
#include "oscillorm/report.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::sweep {

struct SweepConfig {
  std::vector<PhaseFamily> families;
  std::vector<LebesguePoint> points;
  std::vector<double> ladder = opnorm::default_ladder();
  std::uint64_t seed = 1;
  int restarts = 8;
  int points_per_period = 16;
  double eta = 0.1;
  double tolerance = 0.07;
  std::string output = "sweep.csv";
  std::string summary = "summary.json";

  void validate() const {
    if (families.empty()) throw ConfigError("sweep: families must be non-empty");
    if (points.empty()) throw ConfigError("sweep: points must be non-empty");
    if (ladder.empty()) throw ConfigError("sweep: ladder must be non-empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (!(ladder[i] > 0.0) || !std::isfinite(ladder[i])) throw ConfigError("sweep: ladder values must be > 0");
      if (i && !(ladder[i] > ladder[i - 1])) throw ConfigError("sweep: ladder must be strictly increasing");
    }
    if (restarts < 1) throw ConfigError("sweep: restarts must be >= 1");
    if (points_per_period < 8) throw ConfigError("sweep: points_per_period must be >= 8");
    if (!(eta > 0.0 && eta <= 0.25)) throw ConfigError("sweep: eta must lie in (0, 1/4]");
    if (!(tolerance > 0.0)) throw ConfigError("sweep: tolerance must be > 0");
  }
};

// The six points and twelve families of the full slope sandwich.
inline std::vector<LebesguePoint> default_points() {
  return {{0.0, 1.0}, {0.0, 0.5}, {0.25, 0.25}, {0.5, 0.5}, {0.75, 0.5}, {1.0, 1.0}};
}

inline std::vector<PhaseFamily> default_families() {
  std::vector<PhaseFamily> v;
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (int n = 1; n <= 3; ++n) v.emplace_back(j, k, n);
  return v;
}

inline SweepConfig default_config() {
  SweepConfig c;
  c.families = default_families();
  c.points = default_points();
  return c;
}

namespace detail {

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

inline std::uint64_t get_seed(const nlohmann::json& v) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError("config key 'seed' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline PhaseFamily family_from_json(const nlohmann::json& v) {
  try {
    if (v.is_string()) return report::parse_family(v.get<std::string>());
    if (v.is_array() && v.size() == 3) return PhaseFamily(v[0].get<int>(), v[1].get<int>(), v[2].get<int>());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception&) {
  }
  throw ConfigError("families entries are \"j1k2n3\" strings or [j, k, n] arrays");
}

inline LebesguePoint point_from_json(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("points entries are [a, b] pairs");
  }
  try {
    return LebesguePoint(v[0].get<double>(), v[1].get<double>());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace detail

// Applies one key of a JSON object onto the config.  Unknown keys are errors.
inline void apply_key(SweepConfig& c, const std::string& key, const nlohmann::json& v) {
  using detail::get_as;
  if (key == "families") {
    if (!v.is_array()) throw ConfigError("families must be an array");
    c.families.clear();
    for (const auto& e : v) c.families.push_back(detail::family_from_json(e));
  } else if (key == "points") {
    if (!v.is_array()) throw ConfigError("points must be an array");
    c.points.clear();
    for (const auto& e : v) c.points.push_back(detail::point_from_json(e));
  } else if (key == "ladder") {
    if (!v.is_array()) throw ConfigError("ladder must be an array");
    c.ladder.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("ladder entries must be numbers");
      c.ladder.push_back(e.get<double>());
    }
  } else if (key == "seed") {
    c.seed = detail::get_seed(v);
  } else if (key == "restarts") {
    c.restarts = get_as<int>(v, key);
  } else if (key == "points_per_period") {
    c.points_per_period = get_as<int>(v, key);
  } else if (key == "eta") {
    c.eta = get_as<double>(v, key);
  } else if (key == "tolerance") {
    c.tolerance = get_as<double>(v, key);
  } else if (key == "output") {
    c.output = get_as<std::string>(v, key);
  } else if (key == "summary") {
    c.summary = get_as<std::string>(v, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

inline SweepConfig config_from_json(const nlohmann::json& j, SweepConfig base = default_config()) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) apply_key(base, k, v);
  return base;
}

// "--key=value" style override; the value is parsed as JSON and falls back
// to a plain string.
inline void apply_override(SweepConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json v = nlohmann::json::parse(text, nullptr, false);
  if (v.is_discarded()) v = text;
  apply_key(c, key, v);
}

// Worker count: OSCILLORM_THREADS if set, else the hardware concurrency,
// never more than the number of jobs.
inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OSCILLORM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, jobs) on a pool; results are written by index
// so output order never depends on scheduling.
inline void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& job) {
  const unsigned workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < jobs;) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

// One (family, N) rung: the operator and its 2 -> 2 constant are shared by
// every point.  A numerical failure marks the affected rows failed.
inline std::vector<report::ReportRecord> run_rung(const SweepConfig& c, const PhaseFamily& fam, double N) {
  std::vector<report::ReportRecord> rows;
  auto base = [&](const LebesguePoint& pt) {
    report::ReportRecord r;
    r.module = "opnorm";
    r.operation = report::kNormOperation;
    r.family = fam.tag();
    r.N = N;
    r.a = pt.a;
    r.b = pt.b;
    r.seed = static_cast<double>(c.seed);
    return r;
  };
  std::optional<opnorm::SampledOperator> op;
  double c22 = 0.0;
  try {
    op.emplace(fam, N, c.points_per_period, c.eta);
    c22 = opnorm::norm_2_2(*op);
  } catch (const Error&) {
    for (const auto& pt : c.points) {
      auto r = base(pt);
      r.operation = report::kFailedOperation;
      rows.push_back(r);
    }
    return rows;
  }
  opnorm::LowerBoundOptions opt;
  opt.restarts = c.restarts;
  opt.eta = c.eta;
  opt.seed = c.seed;
  for (const auto& pt : c.points) {
    auto r = base(pt);
    try {
      const opnorm::NormEstimate e = opnorm::norm_lower_bound(*op, pt, opt, c22);
      r.lower = e.lower;
      r.upper = e.upper;
      r.ratio = e.lower / e.upper;
    } catch (const Error&) {
      r.operation = report::kFailedOperation;
    }
    rows.push_back(r);
  }
  return rows;
}

// Rows ordered by family, then point, then N.
inline std::vector<report::ReportRecord> run_sweep(const SweepConfig& c) {
  c.validate();
  const std::size_t F = c.families.size(), L = c.ladder.size(), P = c.points.size();
  std::vector<std::vector<report::ReportRecord>> rungs(F * L);
  // Largest N first so that the long rungs do not trail at the end.
  std::vector<std::size_t> order(F * L);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [L](std::size_t x, std::size_t y) { return x % L > y % L; });
  parallel_for(order.size(), [&](std::size_t i) {
    const std::size_t cell = order[i];
    rungs[cell] = run_rung(c, c.families[cell / L], c.ladder[cell % L]);
  });
  std::vector<report::ReportRecord> rows;
  rows.reserve(F * L * P);
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t l = 0; l < L; ++l) rows.push_back(rungs[f * L + l][p]);
  return rows;
}

}  // namespace oscillorm::sweep
