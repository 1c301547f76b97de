#pragma once

// Stationary and non-stationary phase: conditions and leading term of the
// one-point stationary phase formula, decay checks for smooth bumps and the
// Fresnel integral, and the radial oscillatory integrals that drive the
// oscillatory-data lower bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "oscillorm/errors.hpp"
#include "oscillorm/fit.hpp"
#include "oscillorm/quad.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::phase {

using quad::cplx;
using quad::OscIntegrand;

struct StationaryReport {
  bool found = false;  // phase' changes sign on [lo, hi]
  double z = std::numeric_limits<double>::quiet_NaN();
  double phase_dd_at_z = std::numeric_limits<double>::quiet_NaN();
  // (i)   z lies in ]lo + c, hi - c[; margin = distance to that interval's edge
  bool cond_i = false;
  double margin_i = -1.0;
  // (ii)  min |phase'| over [lo, lo + c] U [hi - c, hi]
  bool cond_ii = false;
  double margin_ii = 0.0;
  // (iii) min |phase''| over [lo, hi]
  bool cond_iii = false;
  double margin_iii = 0.0;
  // (iv)  max of |amplitude^(0..2)| and |phase^(3..5)| over [lo, hi]
  bool cond_iv = false;
  double margin_iv = 0.0;

  bool all() const { return cond_i && cond_ii && cond_iii && cond_iv; }
};

// Checks the hypotheses of the one-point stationary phase formula on a mesh of
// spacing 1e-3.  The stationary point is bracketed on the mesh, bisected to
// 1e-12 and polished by one Newton step.
inline StationaryReport verify_sp_conditions(const OscIntegrand& f, double c) {
  if (!(c > 0.0) || !(f.hi - f.lo > 2.0 * c)) {
    throw DomainError("verify_sp_conditions requires 0 < c < (hi - lo) / 2");
  }
  StationaryReport rep;
  const int mesh = std::max(16, static_cast<int>(std::ceil((f.hi - f.lo) / 1e-3)));
  auto node = [&](int i) { return i == mesh ? f.hi : f.lo + (f.hi - f.lo) * i / mesh; };

  double dd_min = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  double edge_min = std::numeric_limits<double>::infinity();
  int bracket = -1;
  double prev = f.phase(node(0), 1);
  for (int i = 0; i <= mesh; ++i) {
    const double x = node(i);
    const double d1 = f.phase(x, 1);
    if (!std::isfinite(d1)) throw NumericalError("non-finite phase derivative", x);
    if (i > 0 && bracket < 0 && ((prev <= 0.0 && d1 > 0.0) || (prev >= 0.0 && d1 < 0.0))) {
      bracket = i - 1;
    }
    prev = d1;
    dd_min = std::min(dd_min, std::abs(f.phase(x, 2)));
    for (int d = 0; d <= 2; ++d) dmax = std::max(dmax, std::abs(f.amplitude(x, d)));
    for (int d = 3; d <= 5; ++d) dmax = std::max(dmax, std::abs(f.phase(x, d)));
    if (x <= f.lo + c || x >= f.hi - c) edge_min = std::min(edge_min, std::abs(d1));
  }

  rep.margin_ii = edge_min;
  rep.cond_ii = edge_min > 0.0;
  rep.margin_iii = dd_min;
  rep.cond_iii = dd_min > 0.0;
  rep.margin_iv = dmax;
  rep.cond_iv = std::isfinite(dmax);

  if (bracket >= 0) {
    double u = node(bracket), v = node(bracket + 1);
    const double su = f.phase(u, 1);
    while (v - u > 1e-12) {
      const double m = 0.5 * (u + v);
      const double sm = f.phase(m, 1);
      if ((sm > 0.0) == (su > 0.0) && sm != 0.0) {
        u = m;
      } else {
        v = m;
      }
    }
    double z = 0.5 * (u + v);
    const double dd = f.phase(z, 2);
    if (dd != 0.0) {
      const double polished = z - f.phase(z, 1) / dd;
      if (std::abs(polished - z) < 1e-9) z = polished;
    }
    rep.found = true;
    rep.z = z;
    rep.phase_dd_at_z = f.phase(z, 2);
    rep.margin_i = std::min(z - (f.lo + c), (f.hi - c) - z);
    rep.cond_i = rep.margin_i > 0.0;
  }
  return rep;
}

struct LeadingTerm {
  cplx value;
  double remainder_bound_scale = 0.0;  // 1 / lambda
};

// sqrt(2 pi / (lambda |phase''(z)|)) amplitude(z) e^{i lambda phase(z) + i sgn(phase'') pi/4}
inline LeadingTerm stationary_leading_term(const OscIntegrand& f, double z) {
  const double dd = f.phase(z, 2);
  if (dd == 0.0 || !std::isfinite(dd)) {
    throw DegenerateStationaryError("stationary_leading_term: phase'' vanishes at z");
  }
  if (!(f.lambda > 0.0)) throw DomainError("stationary_leading_term requires lambda > 0");
  const double mod = std::sqrt(2.0 * std::numbers::pi / (f.lambda * std::abs(dd))) * f.amplitude(z, 0);
  const double arg = f.lambda * f.phase(z, 0) + (dd > 0.0 ? 0.25 : -0.25) * std::numbers::pi;
  return {std::polar(1.0, arg) * mod, 1.0 / f.lambda};
}

// Phase of the forced-Schrödinger s-integral at separation
// d = |x - y| / (2N):  phase(s) = d^2 / (t - s) - s on [0, 1], frequency N^2,
// amplitude (t - s)^{-n/2}.  Stationary where t - s = d.
inline OscIntegrand schrodinger_integrand(double t, double d, int n, double N) {
  if (!(t > 1.0)) throw DomainError("schrodinger_integrand requires t > 1");
  OscIntegrand f;
  f.lo = 0.0;
  f.hi = 1.0;
  f.lambda = N * N;
  const double d2 = d * d;
  f.phase = [t, d2](double s, int m) {
    const double w = t - s;
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    const double v = d2 * fact / std::pow(w, m + 1);
    return m == 1 ? v - 1.0 : m == 0 ? v - s : v;
  };
  const double alpha = 0.5 * n;
  f.amplitude = [t, alpha](double s, int m) {
    const double w = t - s;
    double coef = 1.0;
    for (int i = 0; i < m; ++i) coef *= alpha + i;
    return coef * std::pow(w, -alpha - m);
  };
  return f;
}

// Model phase (s - 1/2)^2 on [0, 1] with unit amplitude; sign = -1 mirrors it.
inline OscIntegrand quadratic_model(double lambda, double sign = 1.0) {
  OscIntegrand f;
  f.lambda = lambda;
  f.phase = [sign](double s, int m) {
    const double u = s - 0.5;
    return sign * (m == 0 ? u * u : m == 1 ? 2.0 * u : m == 2 ? 2.0 : 0.0);
  };
  return f;
}

// A ladder of lambda -> |integral| together with its bound and fit.
struct DecayReport {
  std::vector<double> lambdas;
  std::vector<double> magnitudes;
  std::vector<double> bounds;  // bound shape without constant
  std::vector<double> ratios;  // magnitude / (C * bound)
  double constant = 0.0;       // C, calibrated at the smallest lambda times 3
  double max_ratio = 0.0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::size_t fitted_points = 0;
  bool bounded() const { return max_ratio <= 1.0; }
};

namespace detail {

inline void finish_decay(DecayReport& rep, double floor) {
  const double c0 = rep.magnitudes.front() / rep.bounds.front();
  rep.constant = 3.0 * c0;
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    rep.ratios.push_back(rep.constant > 0.0 ? rep.magnitudes[i] / (rep.constant * rep.bounds[i]) : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    if (rep.lambdas[i] > 0.0 && rep.magnitudes[i] > floor) pts.emplace_back(rep.lambdas[i], rep.magnitudes[i]);
  }
  rep.fitted_points = pts.size();
  if (pts.size() >= 2) rep.slope = fit_exponent(pts, 2).slope;
}

inline void check_ladder(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw DomainError("decay check requires a non-empty ladder");
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("decay check requires lambda >= 0");
  }
}

}  // namespace detail

// |\int psi(s) e^{i lambda s} ds| against C min{1/(1+lambda), 1/(1+lambda^2)}
// for an amplitude supported strictly inside [lo, hi].  The slope is fitted
// only over magnitudes above the roundoff floor (1e-13 of the lambda = 0 mass).
inline DecayReport nonstationary_decay_check(const std::function<double(double)>& amplitude,
                                             double lo, double hi,
                                             const std::vector<double>& lambdas,
                                             const std::vector<double>& breakpoints = {}) {
  detail::check_ladder(lambdas);
  DecayReport rep;
  OscIntegrand f;
  f.lo = lo;
  f.hi = hi;
  f.phase = [](double s, int m) { return m == 0 ? s : m == 1 ? 1.0 : 0.0; };
  f.amplitude = [amplitude](double s, int m) { return m == 0 ? amplitude(s) : 0.0; };
  f.breakpoints = breakpoints;
  f.min_panels = 64;
  double mass = 0.0;
  {
    OscIntegrand g = f;
    g.lambda = 0.0;
    mass = std::abs(quad::composite_quadrature(g));
  }
  for (double l : lambdas) {
    f.lambda = l;
    rep.lambdas.push_back(l);
    rep.magnitudes.push_back(std::abs(quad::composite_quadrature(f)));
    rep.bounds.push_back(std::min(1.0 / (1.0 + l), 1.0 / (1.0 + l * l)));
  }
  detail::finish_decay(rep, 1e-13 * mass);
  return rep;
}

// Exact value of \int_0^1 e^{i lambda s^2} ds by quadrature.
inline cplx fresnel01(double lambda) {
  OscIntegrand f;
  f.lambda = lambda;
  f.phase = [](double s, int m) { return m == 0 ? s * s : m == 1 ? 2.0 * s : m == 2 ? 2.0 : 0.0; };
  return quad::composite_quadrature(f);
}

// |\int_0^1 e^{i lambda s^2} ds| against C max{1/(1+sqrt(lambda)), 1/(1+lambda)}.
inline DecayReport fresnel_bound_check(const std::vector<double>& lambdas) {
  detail::check_ladder(lambdas);
  DecayReport rep;
  for (double l : lambdas) {
    rep.lambdas.push_back(l);
    rep.magnitudes.push_back(std::abs(fresnel01(l)));
    rep.bounds.push_back(std::max(1.0 / (1.0 + std::sqrt(l)), 1.0 / (1.0 + l)));
  }
  detail::finish_decay(rep, 0.0);
  return rep;
}

struct OscillatoryIntegralReport {
  cplx value;            // \int_0^1 e^{i N phase(rho; s)} rho^{n-1} d rho
  double center = 0.0;   // completed-square center z
  double curvature = 0.0;  // phase''(z)
  cplx leading;          // stationary-phase leading term
  double main_modulus = 0.0;  // z^{n-1} sqrt(2 pi / (N phase''))
};

// Radial integral with phase rho^j s^k + 2 rho^2 - 2 rho, the image of the
// completed-square oscillatory data under the operator.
inline OscIntegrand ijk_integrand(const PhaseFamily& fam, double N, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("ijk_integrand requires s in [0,1]");
  if (!(N >= 0.0)) throw DomainError("ijk_integrand requires N >= 0");
  const double sk = fam.k == 1 ? s : s * s;
  OscIntegrand f;
  f.lambda = N;
  const int j = fam.j;
  f.phase = [j, sk](double r, int m) {
    if (j == 1) return m == 0 ? r * sk + 2 * r * r - 2 * r : m == 1 ? sk + 4 * r - 2 : m == 2 ? 4.0 : 0.0;
    return m == 0 ? (sk + 2) * r * r - 2 * r : m == 1 ? 2 * (sk + 2) * r - 2 : m == 2 ? 2 * (sk + 2) : 0.0;
  };
  const int n = fam.n;
  f.amplitude = [n](double r, int m) {
    if (m > n - 1) return 0.0;
    double coef = 1.0;
    for (int i = 0; i < m; ++i) coef *= n - 1 - i;
    return coef * std::pow(r, n - 1 - m);
  };
  const double z = j == 1 ? (2.0 - sk) / 4.0 : 1.0 / (2.0 + sk);
  f.breakpoints = {z};
  return f;
}

inline OscillatoryIntegralReport oscillatory_integral_Ijk(const PhaseFamily& fam, double N, double s) {
  const OscIntegrand f = ijk_integrand(fam, N, s);
  OscillatoryIntegralReport rep;
  rep.value = quad::composite_quadrature(f);
  rep.center = f.breakpoints.front();
  rep.curvature = f.phase(rep.center, 2);
  if (N > 0.0) {
    rep.leading = stationary_leading_term(f, rep.center).value;
    rep.main_modulus = std::pow(rep.center, fam.n - 1) * std::sqrt(2.0 * std::numbers::pi / (N * rep.curvature));
  }
  return rep;
}

// lambda |I(lambda) - leading(lambda)| over a ladder, with the stationary
// point taken from verify_sp_conditions.
struct RemainderReport {
  std::vector<double> lambdas;
  std::vector<double> scaled_remainders;
  double max_over_min = 0.0;
};

inline RemainderReport stationary_remainder(const std::function<OscIntegrand(double)>& make,
                                            const std::vector<double>& lambdas, double c) {
  RemainderReport rep;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double l : lambdas) {
    const OscIntegrand f = make(l);
    const StationaryReport sp = verify_sp_conditions(f, c);
    if (!sp.found) throw DegenerateStationaryError("stationary_remainder: no stationary point");
    const cplx value = quad::composite_quadrature(f);
    const cplx lead = stationary_leading_term(f, sp.z).value;
    const double r = l * std::abs(value - lead);
    rep.lambdas.push_back(l);
    rep.scaled_remainders.push_back(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  rep.max_over_min = hi / lo;
  return rep;
}

}  // namespace oscillorm::phase
