#pragma once

// Closed-form exponent surface for the oscillatory operators
//
//     T f(s) = \int_B f(x) e^{i N |x|^j s^k} dx,   B = unit ball of R^n,
//
// and the Riesz-Thorin / Hölder chain that turns an L^2 -> L^2 constant
// into an L^p -> L^q bound.  Asymptotics throughout are in the frequency
// N -> infinity; the dimension n is fixed.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oscillorm/errors.hpp"

namespace oscillorm {

// (1/p, 1/q) in the unit square; a = 0 encodes p = infinity.
struct LebesguePoint {
  double a = 0.5;
  double b = 0.5;

  LebesguePoint() = default;
  LebesguePoint(double recip_p, double recip_q) : a(recip_p), b(recip_q) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
      throw DomainError("LebesguePoint outside [0,1]^2: (" + std::to_string(a) +
                        ", " + std::to_string(b) + ")");
    }
  }

  // Exponents themselves; infinity for a reciprocal of zero.
  double p() const { return a == 0.0 ? INFINITY : 1.0 / a; }
  double q() const { return b == 0.0 ? INFINITY : 1.0 / b; }
  // Hölder conjugate exponent of p.
  double p_conj() const { return a == 1.0 ? INFINITY : 1.0 / (1.0 - a); }

  friend bool operator==(const LebesguePoint&, const LebesguePoint&) = default;
};

// Selects the phase N |x|^j s^k on the unit ball of R^n.
struct PhaseFamily {
  int j = 1;
  int k = 1;
  int n = 1;

  PhaseFamily() = default;
  PhaseFamily(int j_, int k_, int n_) : j(j_), k(k_), n(n_) {
    if (j < 1 || j > 2 || k < 1 || k > 2 || n < 1) {
      throw DomainError("PhaseFamily requires j,k in {1,2} and n >= 1, got (" +
                        std::to_string(j) + "," + std::to_string(k) + "," +
                        std::to_string(n) + ")");
    }
  }

  std::string tag() const {
    return "j" + std::to_string(j) + "k" + std::to_string(k) + "n" + std::to_string(n);
  }

  friend bool operator==(const PhaseFamily&, const PhaseFamily&) = default;
};

// Unit ball volume |B| and unit sphere area omega_{n-1} = n |B|.
struct BallGeometry {
  int n = 1;
  double volume = 2.0;
  double sphere_area = 2.0;

  BallGeometry() = default;
  explicit BallGeometry(int dim) : n(dim) {
    if (dim < 1) throw DomainError("BallGeometry requires n >= 1");
    const double half = 0.5 * dim;
    volume = std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
    sphere_area = dim * volume;
  }

  // |B(r)| for a ball of radius r.
  double ball_volume(double r) const { return volume * std::pow(r, n); }
};

namespace detail {

enum class SigmaBranch { kTwoB, kTwoOneMinusA, kOne };

// First matching branch in the order 2b, 2(1-a), 1.
inline SigmaBranch sigma_branch(const LebesguePoint& pt) {
  if (pt.b <= 0.5 && pt.a <= 1.0 - pt.b) return SigmaBranch::kTwoB;
  if (pt.a >= 0.5 && pt.a + pt.b >= 1.0) return SigmaBranch::kTwoOneMinusA;
  return SigmaBranch::kOne;
}

inline void check_point(const LebesguePoint& pt) {
  if (!(pt.a >= 0.0 && pt.a <= 1.0 && pt.b >= 0.0 && pt.b <= 1.0)) {
    throw DomainError("LebesguePoint outside [0,1]^2");
  }
}

}  // namespace detail

// Piecewise-linear interpolation weight of the L^2 constant:
//   2b       on {a <= 1-b, b <= 1/2}
//   2(1-a)   on {a >= 1/2, a+b >= 1}
//   1        on {a <= 1/2, b >= 1/2}
inline double sigma(const LebesguePoint& pt) {
  detail::check_point(pt);
  switch (detail::sigma_branch(pt)) {
    case detail::SigmaBranch::kTwoB:
      return 2.0 * pt.b;
    case detail::SigmaBranch::kTwoOneMinusA:
      return 2.0 * (1.0 - pt.a);
    case detail::SigmaBranch::kOne:
      break;
  }
  return 1.0;
}

// Claimed decay exponent alpha with ||T||_{p->q} ~ N^{-alpha}.
inline double theoretical_exponent(const PhaseFamily& fam, const LebesguePoint& pt) {
  const double s = sigma(pt);
  if (fam.n == 1 && fam.j == 2) return 0.25 * s;
  return s / (2.0 * fam.k);
}

// Decay exponent certified by the three explicit test functions
// (shrinking ball, constant, completed-square chirp):
//   min{ (n/j)(1-a), b/k, 1/2 }.
inline double test_function_exponent(const PhaseFamily& fam, const LebesguePoint& pt) {
  detail::check_point(pt);
  const double focusing = static_cast<double>(fam.n) / fam.j * (1.0 - pt.a);
  const double constant = pt.b / fam.k;
  return std::min({focusing, constant, 0.5});
}

// Multiplicative bound on ||T||_{p->q} from ||T||_{2->2} <= c22 and
// ||T||_{1->inf} <= 1, via interpolation and Hölder on B and [0,1].
inline double interpolated_upper_bound(double c22, const BallGeometry& geom,
                                       const LebesguePoint& pt) {
  if (!(c22 > 0.0) || !std::isfinite(c22)) {
    throw DomainError("interpolated_upper_bound requires c22 > 0");
  }
  detail::check_point(pt);
  switch (detail::sigma_branch(pt)) {
    case detail::SigmaBranch::kTwoB:
      return std::pow(geom.volume, 1.0 - pt.a - pt.b) * std::pow(c22, 2.0 * pt.b);
    case detail::SigmaBranch::kTwoOneMinusA:
      return std::pow(c22, 2.0 * (1.0 - pt.a));
    case detail::SigmaBranch::kOne:
      break;
  }
  return std::pow(geom.volume, 0.5 - pt.a) * c22;
}

}  // namespace oscillorm
