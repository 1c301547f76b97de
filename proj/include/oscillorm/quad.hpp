#pragma once

// Oscillation-resolving quadrature on finite intervals and the closed-form
// Gaussian line integrals used by the lower-bound constructions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "oscillorm/errors.hpp"

namespace oscillorm::quad {

using cplx = std::complex<double>;

// Ordered nodes with positive weights on [lo, hi].
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// m-point Gauss-Legendre nodes by Newton iteration on the three-term
// recurrence, ordered increasingly.
inline GaussRule gauss_legendre(int m) {
  if (m < 1) throw DomainError("gauss_legendre requires m >= 1");
  GaussRule rule;
  rule.x.resize(m);
  rule.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int r = 2; r <= m; ++r) {
        const double p2 = ((2.0 * r - 1.0) * x * p1 - (r - 1.0) * p0) / r;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // One more evaluation at the converged node for the weight.
      double p0 = 1.0;
      double p1 = x;
      for (int r = 2; r <= m; ++r) {
        const double p2 = ((2.0 * r - 1.0) * x * p1 - (r - 1.0) * p0) / r;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[m - 1 - i] = x;
    rule.w[m - 1 - i] = w;
    rule.x[i] = -x;
    rule.w[i] = w;
  }
  if (m % 2 == 1) rule.x[m / 2] = 0.0;
  return rule;
}

// The fixed 16-point panel rule, computed once.
inline const GaussRule& gl16() {
  static const GaussRule rule = gauss_legendre(16);
  return rule;
}

// Composite Gauss-Legendre grid with `panels` equal panels of order m.
inline Grid1D composite_grid(double lo, double hi, int panels, int m = 16) {
  if (!(hi > lo) || panels < 1) throw DomainError("composite_grid requires hi > lo, panels >= 1");
  const GaussRule rule = m == 16 ? gl16() : gauss_legendre(m);
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.nodes.reserve(static_cast<std::size_t>(panels) * m);
  g.weights.reserve(static_cast<std::size_t>(panels) * m);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (int i = 0; i < m; ++i) {
      g.nodes.push_back(a + 0.5 * h * (rule.x[i] + 1.0));
      g.weights.push_back(0.5 * h * rule.w[i]);
    }
  }
  return g;
}

namespace detail {

// Pairwise (cascade) summation; the split order depends only on the length,
// so results are bit-stable for a fixed input sequence.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return detail::pairwise_sum(std::span<const T>(v.data(), v.size()));
}

// Integrand amplitude(x) * exp(i * lambda * phase(x)) on [lo, hi].
//
// `phase(x, d)` returns the d-th derivative of the phase (d = 0..5) and
// `amplitude(x, d)` the d-th derivative of the amplitude (d = 0..2).  Only
// orders 0 and 1 of the phase and order 0 of the amplitude are needed for
// quadrature; the higher orders feed the stationary-phase diagnostics.
struct OscIntegrand {
  double lo = 0.0;
  double hi = 1.0;
  double lambda = 0.0;
  std::function<double(double, int)> phase = [](double, int) { return 0.0; };
  std::function<double(double, int)> amplitude = [](double, int d) { return d == 0 ? 1.0 : 0.0; };
  // Interior points where the integrand is not smooth (kinks, cutoff edges).
  std::vector<double> breakpoints;
  // Lower bound on panels per smooth segment, for non-analytic amplitudes.
  int min_panels = 1;
};

namespace detail {

inline void require_finite(double v, double x, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what, x);
}

// sup of |phase'| on [u, v], sampled on 33 equispaced points.
inline double sampled_phase_slope(const OscIntegrand& f, double u, double v) {
  double m = 0.0;
  constexpr int kSamples = 33;
  for (int i = 0; i < kSamples; ++i) {
    const double x = u + (v - u) * i / (kSamples - 1);
    const double d = f.phase(x, 1);
    require_finite(d, x, "phase derivative");
    m = std::max(m, std::abs(d));
  }
  return m;
}

}  // namespace detail

// Upper limit on the number of panels a single call may use.
inline constexpr std::size_t kMaxPanels = 1u << 22;

// Integral of amplitude * exp(i lambda phase) by composite 16-point
// Gauss-Legendre panels sized so that each local oscillation period carries
// at least `min_points_per_period` nodes.
inline cplx composite_quadrature(const OscIntegrand& f, int min_points_per_period = 16) {
  if (min_points_per_period < 8) {
    throw DomainError("composite_quadrature requires min_points_per_period >= 8");
  }
  if (!(f.hi > f.lo)) {
    if (f.hi == f.lo) return {0.0, 0.0};
    throw DomainError("composite_quadrature requires lo <= hi");
  }
  if (!(f.lambda >= 0.0) || !std::isfinite(f.lambda)) {
    throw DomainError("composite_quadrature requires finite lambda >= 0");
  }

  std::vector<double> cuts{f.lo};
  for (double b : f.breakpoints) {
    if (b > f.lo && b < f.hi) cuts.push_back(b);
  }
  cuts.push_back(f.hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const GaussRule& rule = gl16();
  const double nodes_per_panel = static_cast<double>(rule.x.size());
  // Coarse segments on which the local phase slope is sampled.
  constexpr int kSlopeSegments = 64;

  std::vector<cplx> panel_sums;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double u0 = cuts[c];
    const double v0 = cuts[c + 1];
    const double global_rate = f.lambda * detail::sampled_phase_slope(f, u0, v0) * (v0 - u0);
    const int segments = global_rate < 1.0 ? 1 : kSlopeSegments;
    const int min_per_segment = std::max(1, (f.min_panels + segments - 1) / segments);
    for (int s = 0; s < segments; ++s) {
      const double u = u0 + (v0 - u0) * s / segments;
      const double v = s + 1 == segments ? v0 : u0 + (v0 - u0) * (s + 1) / segments;
      const double rate = f.lambda * detail::sampled_phase_slope(f, u, v);
      int panels = min_per_segment;
      if (rate * (v - u) >= 1.0) {
        // periods on [u,v] = rate (v-u) / 2pi; nodes needed = periods * ppp.
        const double periods = rate * (v - u) / (2.0 * std::numbers::pi);
        const double need = std::ceil(periods * min_points_per_period / nodes_per_panel);
        if (need > static_cast<double>(kMaxPanels)) {
          throw ResolutionError("composite_quadrature: oscillation too fast to resolve");
        }
        panels = std::max(panels, static_cast<int>(need));
      }
      if (panel_sums.size() + panels > kMaxPanels) {
        throw ResolutionError("composite_quadrature: panel budget exhausted");
      }
      const double h = (v - u) / panels;
      for (int p = 0; p < panels; ++p) {
        const double a = u + p * h;
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double x = a + 0.5 * h * (rule.x[i] + 1.0);
          const double amp = f.amplitude(x, 0);
          detail::require_finite(amp, x, "amplitude");
          const double ph = f.phase(x, 0);
          detail::require_finite(ph, x, "phase");
          const double arg = f.lambda * ph;
          acc += rule.w[i] * amp * cplx(std::cos(arg), std::sin(arg));
        }
        panel_sums.push_back(0.5 * h * acc);
      }
    }
  }
  return pairwise_sum(panel_sums);
}

// Closed form of the full-line Gaussian integral
//   \int_R e^{2 i N (rho - z)^2} d rho = sqrt(pi / (2N)) e^{i pi/4}.
inline cplx gaussian_line_integral(double N) {
  if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("gaussian_line_integral requires N > 0");
  const double r = std::sqrt(std::numbers::pi / (2.0 * N));
  const double c = std::numbers::sqrt2 / 2.0;
  return {r * c, r * c};
}

struct TruncatedGaussian {
  cplx value;        // \int_0^1 e^{2iN(rho-z)^2} d rho
  cplx main_term;    // full-line closed form
  cplx residual;     // value - main_term
};

// Truncated Gaussian with center z in [1/4, 1/2]; the truncation costs O(1/N).
inline TruncatedGaussian truncated_gaussian(double N, double z, int min_points_per_period = 16) {
  if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("truncated_gaussian requires N > 0");
  if (!(z >= 0.25 && z <= 0.5)) throw DomainError("truncated_gaussian requires z in [1/4, 1/2]");
  OscIntegrand f;
  f.lo = 0.0;
  f.hi = 1.0;
  f.lambda = 2.0 * N;
  f.phase = [z](double x, int d) {
    switch (d) {
      case 0: return (x - z) * (x - z);
      case 1: return 2.0 * (x - z);
      case 2: return 2.0;
      default: return 0.0;
    }
  };
  f.breakpoints = {z};
  TruncatedGaussian out;
  out.value = composite_quadrature(f, min_points_per_period);
  out.main_term = gaussian_line_integral(N);
  out.residual = out.value - out.main_term;
  return out;
}

}  // namespace oscillorm::quad
