#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oscillorm/report.hpp"
#include "oscillorm/sweep.hpp"

using namespace oscillorm;
using namespace oscillorm::report;

namespace {

ReportRecord norm_row(const std::string& fam, double N, double a, double b, double lower, double upper) {
  ReportRecord r;
  r.module = "opnorm";
  r.operation = kNormOperation;
  r.family = fam;
  r.N = N;
  r.a = a;
  r.b = b;
  r.lower = lower;
  r.upper = upper;
  r.seed = 1;
  return r;
}

std::vector<ReportRecord> power_law(const std::string& fam, double a, double b, double slope) {
  std::vector<ReportRecord> rows;
  for (double N : {128.0, 256.0, 512.0, 1024.0}) rows.push_back(norm_row(fam, N, a, b, 0.5 * std::pow(N, slope), 2.0 * std::pow(N, slope)));
  return rows;
}

}  // namespace

TEST(Csv, RoundTripIsExact) {
  std::vector<ReportRecord> rows{norm_row("j1k2n3", 256.0, 0.25, 0.75, 0.1 + 0.2, std::nextafter(1.0, 2.0))};
  ReportRecord sparse;
  sparse.module = "phase";
  sparse.operation = "fresnel_slope";
  sparse.slope = -0.5037;
  rows.push_back(sparse);
  std::stringstream ss;
  write_csv(ss, rows);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# schema=1\nmodule,operation,family,N,a,b,lower,upper,slope,residual,ratio,seed\n", 0), 0u);
  EXPECT_NE(text.find("phase,fresnel_slope,,,,,,,-0.50370000000000004,,,\n"), std::string::npos);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].lower, 0.1 + 0.2);
  EXPECT_EQ(back[0].upper, std::nextafter(1.0, 2.0));
  EXPECT_TRUE(std::isnan(back[0].slope));
  EXPECT_EQ(back[1].family, "");
  EXPECT_TRUE(std::isnan(back[1].N));
  std::stringstream again;
  write_csv(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(Csv, RejectsMalformedInput) {
  std::stringstream no_schema("module,operation\n");
  EXPECT_THROW(read_csv(no_schema), ConfigError);
  std::stringstream bad_number("# schema=1\nmodule,operation,family,N,a,b,lower,upper,slope,residual,ratio,seed\n"
                               "opnorm,norm,j1k1n1,12x,,,,,,,,\n");
  EXPECT_THROW(read_csv(bad_number), ConfigError);
  std::stringstream short_row("# schema=1\nmodule,operation,family,N,a,b,lower,upper,slope,residual,ratio,seed\n"
                              "opnorm,norm\n");
  EXPECT_THROW(read_csv(short_row), ConfigError);
  std::stringstream out;
  EXPECT_THROW(write_csv(out, {norm_row("j1k1n1", INFINITY, 0.5, 0.5, 1, 1)}), DomainError);
}

TEST(Summary, FlagsAgainstTheory) {
  // (2,1,1) at (1/2,1/2): C = 1/4.
  auto rows = power_law("j2k1n1", 0.5, 0.5, -0.25);
  const auto off = power_law("j1k1n2", 0.5, 0.5, -0.3);  // C = 1/2, far off
  rows.insert(rows.end(), off.begin(), off.end());
  const Summary s = summarize(rows);
  ASSERT_EQ(s.cells.size(), 2u);
  EXPECT_NEAR(s.cells[0].lower_slope, -0.25, 1e-12);
  EXPECT_NEAR(s.cells[0].expected, -0.25, 1e-15);
  EXPECT_TRUE(s.cells[0].pass);
  EXPECT_FALSE(s.cells[1].pass);
  EXPECT_FALSE(s.pass());
  const auto j = to_json(s);
  EXPECT_EQ(j["cells"][0]["theoretical_exponent"].get<double>(), 0.25);
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(Summary, FailedRungsFailTheCell) {
  auto rows = power_law("j2k1n1", 0.5, 0.5, -0.25);
  rows[1].operation = kFailedOperation;
  const Summary s = summarize(rows);
  EXPECT_EQ(s.failures, 1u);
  EXPECT_FALSE(s.cells[0].pass);
  EXPECT_FALSE(s.pass());
}

TEST(Summary, ParsesFamilyTags) {
  EXPECT_EQ(parse_family("j2k1n3"), PhaseFamily(2, 1, 3));
  EXPECT_THROW(parse_family("j2k1"), ConfigError);
  EXPECT_THROW(parse_family("j2k1n3x"), ConfigError);
  EXPECT_THROW(parse_family("j3k1n1"), DomainError);
}

TEST(Config, JsonAndOverrides) {
  const auto j = nlohmann::json::parse(R"({"families": ["j1k2n3", [2, 2, 1]], "points": [[0.25, 0.75]],
                                           "ladder": [64, 128, 256, 512], "seed": 7})");
  sweep::SweepConfig c = sweep::config_from_json(j);
  ASSERT_EQ(c.families.size(), 2u);
  EXPECT_EQ(c.families[1], PhaseFamily(2, 2, 1));
  EXPECT_EQ(c.points[0], LebesguePoint(0.25, 0.75));
  EXPECT_EQ(c.seed, 7u);
  sweep::apply_override(c, "restarts=3");
  sweep::apply_override(c, "output=rows.csv");
  sweep::apply_override(c, "ladder=[128,256,512,1024]");
  EXPECT_EQ(c.restarts, 3);
  EXPECT_EQ(c.output, "rows.csv");
  EXPECT_EQ(c.ladder.front(), 128.0);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(sweep::apply_override(c, "nokey"), ConfigError);
  EXPECT_THROW(sweep::apply_override(c, "restarts=many"), ConfigError);
  EXPECT_THROW(sweep::apply_override(c, "points=[[2,0]]"), ConfigError);
  EXPECT_THROW(sweep::apply_override(c, "seed=-1"), ConfigError);
  c.ladder = {256, 128, 512, 1024};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ladder.clear();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, DefaultsCoverTheFullGrid) {
  const sweep::SweepConfig c = sweep::default_config();
  EXPECT_EQ(c.families.size(), 12u);
  EXPECT_EQ(c.points.size(), 6u);
  EXPECT_EQ(c.ladder.size(), 7u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Sweep, RowOrderIndependentOfWorkers) {
  sweep::SweepConfig c;
  c.families = {PhaseFamily(1, 1, 1), PhaseFamily(2, 2, 2)};
  c.points = {{0.5, 0.5}, {0.75, 0.5}};
  c.ladder = {64, 128, 256, 512};
  c.restarts = 2;
  setenv("OSCILLORM_THREADS", "1", 1);
  const auto serial = sweep::run_sweep(c);
  setenv("OSCILLORM_THREADS", "3", 1);
  const auto pooled = sweep::run_sweep(c);
  unsetenv("OSCILLORM_THREADS");
  std::stringstream a, b;
  write_csv(a, serial);
  write_csv(b, pooled);
  EXPECT_EQ(a.str(), b.str());
  ASSERT_EQ(serial.size(), 16u);
  EXPECT_EQ(serial[0].family, "j1k1n1");
  EXPECT_EQ(serial[3].N, 512.0);
  EXPECT_EQ(serial[4].a, 0.75);
  for (const auto& r : serial) EXPECT_LE(r.lower, r.upper * (1 + 1e-6));
}
