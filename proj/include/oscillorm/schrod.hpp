#pragma once

// Forced Schrödinger counterexample: the solution driven by
//
//     F(t, x) = e^{-i N^2 t} 1_{[0,1]}(t) 1_{B(eta/N)}(x)
//
// concentrates on the shell 2(t - 3/4)N < |x| < 2(t - 1/4)N for t in [2,3]
// with |u| ~ eta^n N^{-(1+n)}; the ratio ||u|| / ||F|| then grows like
// N^{n/r - n/r~ - 1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oscillorm/errors.hpp"
#include "oscillorm/fit.hpp"
#include "oscillorm/phase.hpp"
#include "oscillorm/quad.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::schrod {

using quad::cplx;

inline std::vector<double> default_t_samples(int count = 9) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = count == 1 ? 2.5 : 2.0 + static_cast<double>(i) / (count - 1);
  return t;
}

struct CounterexampleConfig {
  double eta = 0.1;
  double N = 64.0;
  int n = 1;
  // a = 1/r (solution), b = 1/r~ (forcing).
  LebesguePoint exponents{1.0, 0.0};
  std::vector<double> t_samples = default_t_samples();
  // Constant phase e^{i theta} multiplying the forcing.
  double forcing_phase = 0.0;

  void validate() const {
    if (!(eta > 0.0 && eta <= 0.25)) throw ConfigError("eta must lie in ]0, 1/4]");
    if (!(N >= 64.0) || !std::isfinite(N)) throw ConfigError("N must be >= 2^6");
    if (n < 1) throw ConfigError("dimension n must be >= 1");
    if (t_samples.empty()) throw ConfigError("t_samples must be non-empty");
    for (double t : t_samples) {
      if (!(t >= 2.0 && t <= 3.0)) throw ConfigError("t_samples must lie in [2,3]");
    }
  }
};

struct ShellRegion {
  double t = 2.5;
  double inner = 0.0;
  double outer = 0.0;
  double width() const { return outer - inner; }
};

inline void check_time(double t) {
  if (!(t >= 2.0 && t <= 3.0)) throw DomainError("t must lie in [2,3]");
}

inline ShellRegion shell_region(double t, const CounterexampleConfig& cfg) {
  check_time(t);
  const double e = cfg.eta / cfg.N;
  return {t, 2.0 * (t - 0.75) * cfg.N + e, 2.0 * (t - 0.25) * cfg.N - e};
}

inline bool shell_contains(double t, double x_abs, const CounterexampleConfig& cfg) {
  const ShellRegion s = shell_region(t, cfg);
  return s.inner < x_abs && x_abs < s.outer;
}

// ||F||_{L^{q~'}_t L^{r~'}_x} = |B(eta/N)|^{1 - 1/r~}; the time factor is 1.
inline double forcing_norm(const CounterexampleConfig& cfg) {
  cfg.validate();
  return std::pow(BallGeometry(cfg.n).ball_volume(cfg.eta / cfg.N), 1.0 - cfg.exponents.b);
}

// |1/r - 1/r~| <= 1/n.
inline bool necessary_condition(int n, const LebesguePoint& pt) {
  if (n < 1) throw DomainError("necessary_condition requires n >= 1");
  return std::abs(pt.a - pt.b) <= 1.0 / n;
}

namespace detail {

// Quadrature of the ball B(eta/N) around a point at distance x_abs from its
// center, expressed through the separations |x - y| and their weights.
struct BallNodes {
  std::vector<double> separation;
  std::vector<double> weight;
};

inline BallNodes ball_nodes(double x_abs, double radius, int n) {
  BallNodes b;
  if (n == 1) {
    const quad::GaussRule r = quad::gauss_legendre(8);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double y = radius * r.x[i];
      b.separation.push_back(std::abs(x_abs - y));
      b.weight.push_back(radius * r.w[i]);
    }
    return b;
  }
  // y = rho (cos th, sin th e'), measure omega_{n-2} sin^{n-2} th rho^{n-1}.
  const quad::GaussRule r = quad::gauss_legendre(6);
  const double omega = BallGeometry(n - 1).sphere_area;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double rho = 0.5 * radius * (r.x[i] + 1.0);
    const double wr = 0.5 * radius * r.w[i] * std::pow(rho, n - 1);
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      const double th = 0.5 * std::numbers::pi * (r.x[k] + 1.0);
      const double wt = 0.5 * std::numbers::pi * r.w[k] * omega * std::pow(std::sin(th), n - 2);
      b.separation.push_back(std::sqrt(x_abs * x_abs + rho * rho - 2.0 * x_abs * rho * std::cos(th)));
      b.weight.push_back(wr * wt);
    }
  }
  return b;
}

// Barycentric interpolation through Chebyshev points of the second kind.
class ChebyshevInterpolant {
 public:
  template <class F>
  ChebyshevInterpolant(double lo, double hi, int degree, const F& f) {
    for (int i = 0; i <= degree; ++i) {
      const double c = std::cos(std::numbers::pi * i / degree);
      nodes_.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * c);
      values_.push_back(f(nodes_.back()));
      weights_.push_back((i % 2 ? -1.0 : 1.0) * (i == 0 || i == degree ? 0.5 : 1.0));
    }
  }
  cplx operator()(double x) const {
    cplx num{};
    double den = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double dx = x - nodes_[i];
      if (dx == 0.0) return values_[i];
      const double w = weights_[i] / dx;
      num += w * values_[i];
      den += w;
    }
    return num / den;
  }

 private:
  std::vector<double> nodes_, weights_;
  std::vector<cplx> values_;
};

inline constexpr int kSeparationDegree = 5;

template <class Integral>
cplx integrate_over_ball(double t, double x_abs, const CounterexampleConfig& cfg, const Integral& integral) {
  check_time(t);
  cfg.validate();
  const double radius = cfg.eta / cfg.N;
  const BallNodes b = ball_nodes(x_abs, radius, cfg.n);
  // The s-integral depends on y only through d = |x - y| / (2N), which
  // ranges over an interval of length eta / N^2; its phase moves by O(eta)
  // there, so a low-degree interpolant in d is exact to rounding.
  const double dlo = std::max(0.0, x_abs - radius) / (2.0 * cfg.N);
  const double dhi = (x_abs + radius) / (2.0 * cfg.N);
  const ChebyshevInterpolant I(dlo, dhi, kSeparationDegree, integral);
  std::vector<cplx> terms(b.weight.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = b.weight[i] * I(b.separation[i] / (2.0 * cfg.N));
  const double pre = std::pow(4.0 * std::numbers::pi, -0.5 * cfg.n);
  return pre * std::polar(1.0, cfg.forcing_phase) * quad::pairwise_sum(terms);
}

}  // namespace detail

// u(t, x) = (4 pi)^{-n/2} \int_{B(eta/N)} I_N(t, x, y) dy with the s-integral
// I_N by composite quadrature at frequency N^2.
inline cplx solution_u(double t, double x_abs, const CounterexampleConfig& cfg) {
  return detail::integrate_over_ball(t, x_abs, cfg, [&](double d) {
    return quad::composite_quadrature(phase::schrodinger_integrand(t, d, cfg.n, cfg.N));
  });
}

// The same with I_N replaced by its one-point stationary-phase term.
inline cplx solution_u_leading(double t, double x_abs, const CounterexampleConfig& cfg) {
  return detail::integrate_over_ball(t, x_abs, cfg, [&](double d) {
    const quad::OscIntegrand f = phase::schrodinger_integrand(t, d, cfg.n, cfg.N);
    return phase::stationary_leading_term(f, t - d).value;
  });
}

struct ShellStationaryReport {
  phase::StationaryReport conditions;  // c = 1/4
  double z_expected = 0.0;              // t - |x - y| / (2N)
  // phase'(0) + 1 - (1 - 3/(4t))^2, the lower bound on the s-derivative
  double derivative_margin = 0.0;
  bool all() const { return conditions.all() && derivative_margin > 0.0; }
};

inline ShellStationaryReport shell_stationary_check(double t, double x_abs, double y_offset,
                                                    const CounterexampleConfig& cfg) {
  check_time(t);
  if (std::abs(y_offset) >= cfg.eta / cfg.N) throw DomainError("y must lie in B(eta/N)");
  const double d = std::abs(x_abs - y_offset) / (2.0 * cfg.N);
  const quad::OscIntegrand f = phase::schrodinger_integrand(t, d, cfg.n, cfg.N);
  ShellStationaryReport rep;
  rep.conditions = phase::verify_sp_conditions(f, 0.25);
  rep.z_expected = t - d;
  const double lb = 1.0 - 3.0 / (4.0 * t);
  rep.derivative_margin = f.phase(0.0, 1) + 1.0 - lb * lb;
  return rep;
}

// |u| sampled on the shell for every t sample.
struct ShellProfile {
  double N = 0.0;
  int n = 1;
  double eta = 0.1;
  std::vector<double> t;
  std::vector<std::vector<double>> x;        // per t: GL nodes over [inner, outer]
  std::vector<std::vector<double>> weight;   // per t: omega_{n-1} |x|^{n-1} dx weights
  std::vector<std::vector<double>> modulus;  // per t: |u(t, x)|
};

inline ShellProfile shell_profile(const CounterexampleConfig& cfg, int x_nodes = 16) {
  cfg.validate();
  if (x_nodes < 1) throw ConfigError("x_nodes must be >= 1");
  const quad::GaussRule r = quad::gauss_legendre(x_nodes);
  const double omega = BallGeometry(cfg.n).sphere_area;
  ShellProfile p;
  p.N = cfg.N;
  p.n = cfg.n;
  p.eta = cfg.eta;
  for (double t : cfg.t_samples) {
    const ShellRegion s = shell_region(t, cfg);
    if (!(s.width() > 0.0)) throw ConfigError("empty shell");
    std::vector<double> xs, ws, us;
    for (int i = 0; i < x_nodes; ++i) {
      const double x = s.inner + 0.5 * s.width() * (r.x[i] + 1.0);
      xs.push_back(x);
      ws.push_back(0.5 * s.width() * r.w[i] * omega * std::pow(x, cfg.n - 1));
      us.push_back(std::abs(solution_u(t, x, cfg)));
    }
    p.t.push_back(t);
    p.x.push_back(std::move(xs));
    p.weight.push_back(std::move(ws));
    p.modulus.push_back(std::move(us));
  }
  return p;
}

// Shell-restricted lower-bound proxy for ||u||_{L^q_t L^r_x}: the mean over
// the t samples of ||u(t)||_{L^r(shell)}.
inline double shell_norm(const ShellProfile& p, double recip_r) {
  if (p.t.empty()) throw ConfigError("empty shell sample");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    double v = 0.0;
    if (recip_r == 0.0) {
      for (double m : p.modulus[k]) v = std::max(v, m);
    } else {
      const double r = 1.0 / recip_r;
      std::vector<double> terms(p.x[k].size());
      for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = p.weight[k][i] * std::pow(p.modulus[k][i], r);
      v = std::pow(quad::pairwise_sum(terms), recip_r);
    }
    acc += v;
  }
  return acc / p.t.size();
}

inline double expected_growth_slope(int n, const LebesguePoint& pt) { return n * pt.a - n * pt.b - 1.0; }

// Fit of log(shell_norm / forcing_norm) against log N over profiles that
// share n and eta.
inline ExponentFit ratio_growth(const std::vector<ShellProfile>& profiles, const LebesguePoint& pt) {
  if (profiles.size() < 4) throw ConfigError("ratio_growth requires a ladder of >= 4 values");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : profiles) {
    CounterexampleConfig c;
    c.eta = p.eta;
    c.N = p.N;
    c.n = p.n;
    c.exponents = pt;
    pts.emplace_back(p.N, shell_norm(p, pt.a) / forcing_norm(c));
  }
  return fit_exponent(pts);
}

inline ExponentFit ratio_growth(const CounterexampleConfig& base, const std::vector<double>& ladder) {
  if (ladder.size() < 4) throw ConfigError("ratio_growth requires a ladder of >= 4 values");
  std::vector<ShellProfile> profiles;
  for (double N : ladder) {
    CounterexampleConfig c = base;
    c.N = N;
    profiles.push_back(shell_profile(c));
  }
  return ratio_growth(profiles, base.exponents);
}

struct ShellLowerBound {
  double constant = 0.0;   // c, calibrated at the smallest N as min / 3
  double worst = 0.0;      // min over all samples of |u| N^{1+n} / eta^n
  std::size_t samples = 0;
  bool holds() const { return worst >= constant; }
};

// |u| >= c eta^n N^{-(1+n)} at every sampled shell point with one c.
inline ShellLowerBound shell_lower_bound(const std::vector<ShellProfile>& profiles) {
  if (profiles.empty()) throw ConfigError("shell_lower_bound requires profiles");
  ShellLowerBound b;
  b.worst = INFINITY;
  double first_min = INFINITY;
  double nmin = INFINITY;
  for (const auto& p : profiles) nmin = std::min(nmin, p.N);
  for (const auto& p : profiles) {
    const double scale = std::pow(p.N, 1.0 + p.n) / std::pow(p.eta, p.n);
    for (const auto& row : p.modulus) {
      for (double m : row) {
        b.worst = std::min(b.worst, m * scale);
        if (p.N == nmin) first_min = std::min(first_min, m * scale);
        ++b.samples;
      }
    }
  }
  b.constant = first_min / 3.0;
  return b;
}

}  // namespace oscillorm::schrod
