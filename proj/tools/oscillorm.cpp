// oscillorm: sweeps, refits, check batteries and exponent lookup.
//
//   oscillorm sweep [config.json] [--key=value ...]
//   oscillorm fit <rows.csv> [--tolerance=0.07]
//   oscillorm verify {phase|kernels|bilinear|schrodinger} [--output=rows.csv] [--summary=summary.json]
//   oscillorm exponent <j> <k> <n> <a> <b>
//
// Exit codes: 0 pass, 1 numerical or acceptance failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oscillorm/report.hpp"
#include "oscillorm/suites.hpp"
#include "oscillorm/sweep.hpp"
#include "oscillorm/theory.hpp"

using namespace oscillorm;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_rows(const std::string& path, const std::vector<report::ReportRecord>& rows) {
  std::ostringstream os;
  report::write_csv(os, rows);
  write_text(path, os.str());
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  return j;
}

void print_summary(const report::Summary& s) {
  for (const auto& c : s.cells) {
    std::printf("%-8s (%.4g,%.4g)  -C=%+.4f  lower %+.4f  upper %+.4f  %s\n", c.family.c_str(), c.a, c.b,
                c.expected, c.lower_slope, c.upper_slope, c.pass ? "pass" : "FAIL");
  }
  std::printf("%zu cells, %zu failed rungs: %s\n", s.cells.size(), s.failures, s.pass() ? "PASS" : "FAIL");
}

int run_sweep(const std::string& config_path, const std::vector<std::string>& overrides) {
  sweep::SweepConfig cfg = sweep::default_config();
  if (!config_path.empty()) cfg = sweep::config_from_json(read_json_file(config_path));
  for (const auto& o : overrides) {
    if (o.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + o + "'");
    sweep::apply_override(cfg, o.substr(2));
  }
  cfg.validate();
  const auto rows = sweep::run_sweep(cfg);
  write_rows(cfg.output, rows);
  const report::Summary s = report::summarize(rows, cfg.tolerance);
  write_text(cfg.summary, report::to_json(s).dump(2) + "\n");
  print_summary(s);
  return s.pass() ? kPass : kFail;
}

int run_fit(const std::string& csv, double tolerance) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open '" + csv + "'");
  const report::Summary s = report::summarize(report::read_csv(in), tolerance);
  std::cout << report::to_json(s).dump(2) << "\n";
  return s.pass() ? kPass : kFail;
}

int run_verify(const std::string& suite, std::string output, std::string summary) {
  static const std::map<std::string, suites::SuiteResult (*)()> table{
      {"phase", [] { return suites::phase_suite(); }},
      {"kernels", [] { return suites::kernels_suite(); }},
      {"bilinear", [] { return suites::bilinear_suite(); }},
      {"schrodinger", [] { return suites::schrodinger_suite(); }},
  };
  const auto it = table.find(suite);
  if (it == table.end()) throw ConfigError("unknown verify suite '" + suite + "'");
  if (output.empty()) output = "verify_" + suite + ".csv";
  if (summary.empty()) summary = "verify_" + suite + ".json";
  const suites::SuiteResult res = it->second();
  write_rows(output, res.rows);
  nlohmann::json j;
  j["schema"] = report::kSchemaVersion;
  j["suite"] = suite;
  j["pass"] = res.pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : res.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json()},
                           {"limit", c.limit},
                           {"pass", c.pass},
                           {"informational", c.informational}});
    std::printf("[%s] %s: %.6g\n", c.informational ? "info" : c.pass ? "ok  " : "FAIL", c.name.c_str(), c.measured);
  }
  write_text(summary, j.dump(2) + "\n");
  std::printf("verify %s: %s\n", suite.c_str(), res.pass() ? "PASS" : "FAIL");
  return res.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for oscillatory integral operator norms"};
  app.require_subcommand(1);

  auto* sweep_cmd = app.add_subcommand("sweep", "Ladder sweep over families and Lebesgue points");
  std::string config_path;
  sweep_cmd->add_option("config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sweep_cmd->allow_extras();

  auto* fit_cmd = app.add_subcommand("fit", "Refit slopes from a sweep CSV");
  std::string csv;
  double tolerance = 0.07;
  fit_cmd->add_option("csv", csv, "sweep CSV")->required();
  fit_cmd->add_option("--tolerance", tolerance, "slope tolerance")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Run a module check battery");
  std::string suite, verify_out, verify_summary;
  verify_cmd->add_option("suite", suite, "phase | kernels | bilinear | schrodinger")
      ->required()
      ->check(CLI::IsMember({"phase", "kernels", "bilinear", "schrodinger"}));
  verify_cmd->add_option("--output", verify_out, "CSV path (default verify_<suite>.csv)");
  verify_cmd->add_option("--summary", verify_summary, "JSON path (default verify_<suite>.json)");

  auto* exp_cmd = app.add_subcommand("exponent", "Print the theoretical decay exponent C");
  int j = 0, k = 0, n = 0;
  double a = 0.0, b = 0.0;
  exp_cmd->add_option("j", j)->required();
  exp_cmd->add_option("k", k)->required();
  exp_cmd->add_option("n", n)->required();
  exp_cmd->add_option("a", a, "1/p")->required();
  exp_cmd->add_option("b", b, "1/q")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*sweep_cmd) return run_sweep(config_path, sweep_cmd->remaining());
    if (*fit_cmd) return run_fit(csv, tolerance);
    if (*verify_cmd) return run_verify(suite, verify_out, verify_summary);
    if (*exp_cmd) {
      std::printf("%.17g\n", theoretical_exponent(PhaseFamily(j, k, n), LebesguePoint(a, b)));
      return kPass;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
