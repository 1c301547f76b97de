// Acceptance runner: `acceptance <criterion>` runs one criterion (1-8),
// prints every check, and ends with a single PASS/FAIL line.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "oscillorm/suites.hpp"

using namespace oscillorm;

namespace {

struct Criterion {
  const char* title;
  suites::SuiteResult (*run)();
};

suites::SuiteResult sandwich() { return suites::sandwich_suite(); }
suites::SuiteResult energy() { return suites::energy_suite(); }
suites::SuiteResult candidates() { return suites::candidates_suite(); }
suites::SuiteResult gaussian() { return suites::gaussian_suite(); }
suites::SuiteResult remainder() { return suites::remainder_suite(); }
suites::SuiteResult inequalities() {
  suites::SuiteResult s = suites::kernels_suite();
  s.append(suites::bilinear_suite());
  return s;
}
suites::SuiteResult radial() { return suites::radial_suite(); }
suites::SuiteResult schrodinger() { return suites::schrodinger_suite(); }

const Criterion kCriteria[] = {
    {"slope sandwich of lower and interpolated upper bounds", sandwich},
    {"energy estimate slopes", energy},
    {"lower-bound construction slopes", candidates},
    {"truncated Gaussian and Fresnel decay", gaussian},
    {"stationary phase remainder", remainder},
    {"kernel and bilinear inequality drift", inequalities},
    {"radial reduction against the cartesian build", radial},
    {"Schrodinger counterexample growth and shell lower bound", schrodinger},
};

}  // namespace

int main(int argc, char** argv) {
  char* end = nullptr;
  const long id = argc == 2 ? std::strtol(argv[1], &end, 10) : 0;
  if (argc != 2 || *end != '\0' || id < 1 || id > 8) {
    std::fprintf(stderr, "usage: %s <criterion 1-8>\n", argv[0]);
    return 2;
  }
  const Criterion& c = kCriteria[id - 1];
  const auto t0 = std::chrono::steady_clock::now();
  suites::SuiteResult res;
  std::string error;
  try {
    res = c.run();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t failed = 0, gating = 0;
  for (const auto& ch : res.checks) {
    const char* tag = ch.informational ? "info" : ch.pass ? "ok  " : "FAIL";
    std::printf("  [%s] %s: %.6g\n", tag, ch.name.c_str(), ch.measured);
    if (!ch.informational) {
      ++gating;
      if (!ch.pass) ++failed;
    }
  }
  const bool pass = error.empty() && res.pass();
  if (!error.empty()) std::printf("  error: %s\n", error.c_str());
  std::printf("criterion %ld %s: %s (%zu/%zu checks passed, %.1f s)\n", id, c.title, pass ? "PASS" : "FAIL",
              gating - failed, gating, secs);
  return pass ? 0 : 1;
}
