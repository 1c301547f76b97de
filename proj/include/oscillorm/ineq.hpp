#pragma once

// Kernel bounds and bilinear inequalities behind the L^2 energy estimate:
// decay of the s-integrated kernels, Young-type bounds for kernels of
// |x|^m - |y|^m, homogeneous kernels of degree -1 (Hilbert's inequality),
// even reduction, and the two diagonal-singular forms on [-1,1]^2.
//
// Test functions are piecewise constant on uniform cells; bilinear forms
// are assembled from exact-to-quadrature cell-pair integrals of the kernel,
// so the discrete checks are checks of the continuous inequalities on the
// subspace of step functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "oscillorm/errors.hpp"
#include "oscillorm/fftw_lock.hpp"
#include "oscillorm/fit.hpp"
#include "oscillorm/quad.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::ineq {

using quad::cplx;

// ---------------------------------------------------------------------------
// Cutoff

// psi(s) = B((s + 1)/eps) B((2 - s)/eps) with eps = 1/2 and B the smooth
// step built from e^{-1/x}:  psi = 1 on [-1/2, 3/2], psi = 0 outside ]-1, 2[.
class Cutoff {
 public:
  static constexpr double kEps = 0.5;
  static constexpr double kLo = -1.0;
  static constexpr double kHi = 2.0;

  // d-th derivative, d = 0, 1, 2.
  double operator()(double s, int d = 0) const {
    const double a = (s - kLo) / kEps;
    const double b = (kHi - s) / kEps;
    const double c = 1.0 / kEps;
    const auto [Ba, Ba1, Ba2] = step(a);
    const auto [Bb, Bb1, Bb2] = step(b);
    switch (d) {
      case 0: return Ba * Bb;
      case 1: return c * (Ba1 * Bb - Ba * Bb1);
      case 2: return c * c * (Ba2 * Bb - 2.0 * Ba1 * Bb1 + Ba * Bb2);
      default: throw DomainError("Cutoff supports derivatives up to order 2");
    }
  }

  // The flat region and the support edges, as quadrature breakpoints.
  static std::vector<double> breakpoints() { return {kLo, kLo + kEps, kHi - kEps, kHi}; }

 private:
  struct Jet {
    double v, d1, d2;
  };
  // e(x) = e^{-1/x} for x > 0 and its first two derivatives.
  static Jet glue(double x) {
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    const double e = std::exp(-1.0 / x);
    const double x2 = x * x;
    return {e, e / x2, e * (1.0 - 2.0 * x) / (x2 * x2)};
  }
  // B(x) = e(x) / (e(x) + e(1 - x)) with derivatives.
  static std::tuple<double, double, double> step(double x) {
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0, 0.0};
    const Jet u = glue(x);
    const Jet w = glue(1.0 - x);
    // v(x) = e(1 - x): v' = -e'(1 - x), v'' = e''(1 - x)
    const double v = w.v, v1 = -w.d1, v2 = w.d2;
    const double s = u.v + v;
    const double num = u.d1 * v - u.v * v1;
    const double num1 = u.d2 * v - u.v * v2;
    const double s1 = u.d1 + v1;
    return {u.v / s, num / (s * s), (num1 * s - 2.0 * num * s1) / (s * s * s)};
  }
};

// ---------------------------------------------------------------------------
// Sampled functions

enum class Domain { kUnit, kSymmetric };  // [0,1] or [-1,1]

// Piecewise-constant function on uniform cells of its domain.
struct SampledFunction {
  Domain domain = Domain::kUnit;
  std::vector<cplx> values;

  double lo() const { return domain == Domain::kUnit ? 0.0 : -1.0; }
  double width() const { return domain == Domain::kUnit ? 1.0 : 2.0; }
  std::size_t cells() const { return values.size(); }
  double cell_width() const { return width() / static_cast<double>(values.size()); }

  // (sum_i h |f_i|^p)^{1/p}, optionally against the radial measure
  // omega r^{n-1} dr on [0,1] (n = 0 selects plain dx).
  double norm(double p, int n = 0) const {
    if (values.empty()) return 0.0;
    if (std::isinf(p)) {
      double m = 0.0;
      for (const auto& z : values) m = std::max(m, std::abs(z));
      return m;
    }
    const double h = cell_width();
    std::vector<double> terms(values.size());
    const double omega = n > 0 ? BallGeometry(n).sphere_area : 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      double w = h;
      if (n > 0) {
        // exact cell mass of omega r^{n-1}
        const double a = lo() + i * h;
        w = omega * (std::pow(a + h, n) - std::pow(a, n)) / n;
      }
      terms[i] = w * std::pow(std::abs(values[i]), p);
    }
    return std::pow(quad::pairwise_sum(terms), 1.0 / p);
  }
};

// Seeded complex Gaussian cell values smoothed by a 3-tap average.
inline SampledFunction random_function(Domain dom, std::size_t cells, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cplx> raw(cells);
  for (auto& z : raw) {
    const double re = nd(gen);
    const double im = nd(gen);
    z = {re, im};
  }
  SampledFunction f{dom, std::vector<cplx>(cells)};
  for (std::size_t i = 0; i < cells; ++i) {
    const cplx l = raw[i == 0 ? 0 : i - 1];
    const cplx r = raw[i + 1 == cells ? i : i + 1];
    f.values[i] = (l + raw[i] + r) / 3.0;
  }
  return f;
}

inline SampledFunction constant_function(Domain dom, std::size_t cells, double value = 1.0) {
  return {dom, std::vector<cplx>(cells, cplx(value, 0.0))};
}

inline SampledFunction abs_of(const SampledFunction& f) {
  SampledFunction g = f;
  for (auto& z : g.values) z = std::abs(z);
  return g;
}

// t -> f(t) + f(-t) on [0,1].
inline SampledFunction even_reduction(const SampledFunction& f) {
  if (f.domain != Domain::kSymmetric) throw DomainError("even_reduction expects a function on [-1,1]");
  if (f.cells() % 2 != 0) throw DomainError("even_reduction needs an even cell count");
  const std::size_t M = f.cells() / 2;
  SampledFunction r{Domain::kUnit, std::vector<cplx>(M)};
  for (std::size_t i = 0; i < M; ++i) r.values[i] = f.values[M + i] + f.values[M - 1 - i];
  return r;
}

// ---------------------------------------------------------------------------
// Graded quadrature

struct InequalityReport {
  double lhs = 0.0;
  double rhs_scale = 0.0;
  double ratio = 0.0;
  double N = 0.0;
  std::string tag;
};

namespace detail {

inline constexpr int kGradingDepth = 12;

inline const quad::GaussRule& gl8() {
  static const quad::GaussRule r = quad::gauss_legendre(8);
  return r;
}

template <class F>
double gl_piece(const F& f, double a, double b) {
  const auto& r = gl8();
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(a + 0.5 * (b - a) * (r.x[i] + 1.0));
  return 0.5 * (b - a) * s;
}

// \int_a^b f with a possibly singular endpoint at a: geometric grading
// toward a; the innermost piece uses y = a + u^2, which removes inverse
// square-root singularities.
template <class F>
double graded_from(const F& f, double a, double b) {
  const double L = b - a;
  if (L == 0.0) return 0.0;
  double s = 0.0;
  double hi = b;
  for (int d = 1; d <= kGradingDepth; ++d) {
    const double lo = a + L * std::ldexp(1.0, -d);
    s += gl_piece(f, lo, hi);
    hi = lo;
  }
  const double du = std::sqrt(std::abs(hi - a));
  const double sign = hi > a ? 1.0 : -1.0;
  s += sign * gl_piece([&](double u) { return f(a + sign * u * u) * 2.0 * u; }, 0.0, du);
  return s;
}

// \int_a^b f with grading toward every listed point in [a, b].
template <class F>
double graded_integral(const F& f, double a, double b, std::vector<double> points) {
  std::vector<double> cuts{a, b};
  for (double p : points) {
    if (p > a && p < b) cuts.push_back(p);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto singular = [&](double x) {
    for (double p : points) {
      if (p == x) return true;
    }
    return false;
  };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    const bool su = singular(u), sv = singular(v);
    if (su && sv) {
      const double m = 0.5 * (u + v);
      s += graded_from(f, u, m) - graded_from(f, v, m);
    } else if (su) {
      s += graded_from(f, u, v);
    } else if (sv) {
      s -= graded_from(f, v, u);
    } else {
      s += gl_piece(f, u, v);
    }
  }
  return s;
}

}  // namespace detail

// A real kernel on a square with known singular curves y = c(x).
struct SingularKernel {
  std::function<double(double, double)> k;
  // y-locations where k(x, .) is not smooth; fixed count per call, each a
  // linear function of x.
  std::function<std::vector<double>(double)> singular_y;
  std::string tag;
};

// Matrix A_ij = \int_{cell i} \int_{cell j} k(x, y) dy dx over uniform cells.
class CellPairMatrix {
 public:
  CellPairMatrix(const SingularKernel& kernel, double lo, double hi, std::size_t cells)
      : M_(cells), a_(cells * cells) {
    if (cells < 2 || !(hi > lo)) throw DomainError("CellPairMatrix needs >= 2 cells on a proper interval");
    const double h = (hi - lo) / cells;
    const auto& r = detail::gl8();
    for (std::size_t i = 0; i < cells; ++i) {
      const double xa = lo + i * h, xb = xa + h;
      const std::vector<double> sa = kernel.singular_y(xa), sb = kernel.singular_y(xb);
      for (std::size_t j = 0; j < cells; ++j) {
        const double ya = lo + j * h, yb = ya + h;
        bool near = false;
        for (std::size_t b = 0; b < sa.size(); ++b) {
          const double c0 = std::min(sa[b], sb[b]), c1 = std::max(sa[b], sb[b]);
          if (c1 >= ya - 1.01 * h && c0 <= yb + 1.01 * h) near = true;
        }
        double v = 0.0;
        if (!near) {
          for (std::size_t p = 0; p < r.x.size(); ++p) {
            const double x = xa + 0.5 * h * (r.x[p] + 1.0);
            double row = 0.0;
            for (std::size_t q = 0; q < r.x.size(); ++q) {
              row += r.w[q] * kernel.k(x, ya + 0.5 * h * (r.x[q] + 1.0));
            }
            v += r.w[p] * row;
          }
          v *= 0.25 * h * h;
        } else {
          // Grade only toward singular points within one cell of the range.
          auto inner = [&](double x) {
            std::vector<double> pts;
            for (double c : kernel.singular_y(x)) {
              if (c >= ya - h && c <= yb + h) pts.push_back(std::clamp(c, ya, yb));
            }
            return detail::graded_integral([&](double y) { return kernel.k(x, y); }, ya, yb, pts);
          };
          // x where a singular curve crosses the edges of cell j
          std::vector<double> xpts;
          for (double e : {ya, yb}) {
            for (std::size_t b = 0; b < sa.size(); ++b) {
              const double d = sb[b] - sa[b];
              if (d == 0.0) continue;
              const double xc = xa + (e - sa[b]) / d * h;
              if (xc >= xa - h && xc <= xb + h) xpts.push_back(std::clamp(xc, xa, xb));
            }
          }
          v = detail::graded_integral(inner, xa, xb, xpts);
        }
        if (!std::isfinite(v)) throw NumericalError("non-finite cell-pair integral", xa);
        a_[i * cells + j] = v;
      }
    }
  }

  std::size_t cells() const { return M_; }
  double at(std::size_t i, std::size_t j) const { return a_[i * M_ + j]; }

  // sum_ij f_i g_j A_ij
  cplx form(const std::vector<cplx>& f, const std::vector<cplx>& g) const {
    if (f.size() != M_ || g.size() != M_) throw DomainError("CellPairMatrix: function size mismatch");
    std::vector<cplx> rows(M_);
    for (std::size_t i = 0; i < M_; ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < M_; ++j) acc += a_[i * M_ + j] * g[j];
      rows[i] = f[i] * acc;
    }
    return quad::pairwise_sum(rows);
  }

 private:
  std::size_t M_;
  std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// Kernels of the s-integration

// k = 1: \int psi(s) e^{i N (x^j - y^j) s} ds over ]-1, 2[ (or over [0, 1]
// with indicator = true); k = 2: \int_0^1 e^{i N (x^j - y^j) s^2} ds.
inline cplx kernel_K(int j, int k, double N, double x_abs, double y_abs, bool indicator = false) {
  if (j < 1 || j > 2 || k < 1 || k > 2) throw DomainError("kernel_K requires j, k in {1,2}");
  if (!(x_abs >= 0.0 && x_abs <= 1.0 && y_abs >= 0.0 && y_abs <= 1.0)) {
    throw DomainError("kernel_K requires |x|, |y| in [0,1]");
  }
  const double delta = std::pow(x_abs, j) - std::pow(y_abs, j);
  quad::OscIntegrand f;
  // Fold the sign of delta into the phase so lambda stays >= 0.
  const double sg = delta < 0.0 ? -1.0 : 1.0;
  f.lambda = N * std::abs(delta);
  if (k == 1) {
    if (indicator) {
      f.lo = 0.0;
      f.hi = 1.0;
    } else {
      static const Cutoff psi;
      f.lo = Cutoff::kLo;
      f.hi = Cutoff::kHi;
      f.amplitude = [](double s, int d) { return psi(s, d); };
      f.breakpoints = Cutoff::breakpoints();
      f.min_panels = 8;
    }
    f.phase = [sg](double s, int d) { return d == 0 ? sg * s : d == 1 ? sg : 0.0; };
  } else {
    f.phase = [sg](double s, int d) { return d == 0 ? sg * s * s : d == 1 ? 2.0 * sg * s : d == 2 ? 2.0 * sg : 0.0; };
  }
  return quad::composite_quadrature(f);
}

// The claimed decay shape of |K| in u = N |x^j - y^j|.
inline double kernel_bound_shape(int k, double u) {
  if (k == 1) return std::min(1.0 / (1.0 + u), 1.0 / (1.0 + u * u));
  return std::max(1.0 / (1.0 + std::sqrt(u)), 1.0 / (1.0 + u));
}

// Direct evaluation of K as a function of u = N (x^j - y^j) on a fixed
// quadrature grid resolving all |u| <= u_max; also returns dK/du.
class KernelTable {
 public:
  KernelTable(int k, double u_max) {
    quad::OscIntegrand f;
    if (k == 1) {
      static const Cutoff psi;
      f.lo = Cutoff::kLo;
      f.hi = Cutoff::kHi;
      f.breakpoints = Cutoff::breakpoints();
      f.amplitude = [](double s, int d) { return psi(s, d); };
    }
    // Highest local frequency times the interval length, in periods.
    const double span = k == 1 ? f.hi - f.lo : 2.0;
    const int panels = std::max(16, static_cast<int>(std::ceil(u_max * span / (2.0 * std::numbers::pi))) + 8);
    const quad::Grid1D g = quad::composite_grid(f.lo, f.hi, panels);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = g.nodes[i];
      const double w = g.weights[i] * f.amplitude(s, 0);
      if (w == 0.0) continue;
      nodes_.push_back(k == 1 ? s : s * s);
      weights_.push_back(w);
    }
  }
  cplx operator()(double u) const { return eval(u).first; }

  // (K(u), K'(u))
  std::pair<cplx, cplx> eval(double u) const {
    double re = 0.0, im = 0.0, dre = 0.0, dim = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double a = u * nodes_[i];
      const double c = std::cos(a), s = std::sin(a);
      re += weights_[i] * c;
      im += weights_[i] * s;
      dre -= weights_[i] * nodes_[i] * s;
      dim += weights_[i] * nodes_[i] * c;
    }
    return {{re, im}, {dre, dim}};
  }

 private:
  std::vector<double> nodes_, weights_;
};

// K(u) and K'(u) sampled on a uniform u-grid over [0, u_max] and read back
// by cubic Hermite interpolation; K(-u) = conj K(u).  For k = 1 the samples
// come from one FFT of the cutoff (the trapezoid rule is spectrally accurate
// for a smooth compactly supported amplitude); for k = 2 from KernelTable.
class KernelSpectrum {
 public:
  KernelSpectrum(int k, double u_max) {
    if (k == 1) {
      build_cutoff(u_max);
    } else {
      step_ = 0.5;
      const std::size_t count = static_cast<std::size_t>(std::ceil(u_max / step_)) + 2;
      const KernelTable table(2, u_max + 2.0 * step_);
      value_.resize(count);
      deriv_.resize(count);
      for (std::size_t m = 0; m < count; ++m) std::tie(value_[m], deriv_[m]) = table.eval(m * step_);
    }
  }

  cplx operator()(double u) const {
    const bool neg = u < 0.0;
    const double a = std::abs(u) / step_;
    const std::size_t m = static_cast<std::size_t>(a);
    if (m + 1 >= value_.size()) throw DomainError("KernelSpectrum: u beyond the sampled range");
    const double t = a - m;
    const double t2 = t * t, t3 = t2 * t;
    const cplx v = (2 * t3 - 3 * t2 + 1) * value_[m] + (t3 - 2 * t2 + t) * step_ * deriv_[m] +
                   (-2 * t3 + 3 * t2) * value_[m + 1] + (t3 - t2) * step_ * deriv_[m + 1];
    return neg ? std::conj(v) : v;
  }

  double step() const { return step_; }

 private:
  void build_cutoff(double u_max) {
    static const Cutoff psi;
    const double span = Cutoff::kHi - Cutoff::kLo;
    // Sample spacing: Nyquist at twice the largest u; FFT length: u-step <= 0.1.
    std::size_t samples = 1024;
    while (std::numbers::pi * samples / span < 2.0 * u_max) samples *= 2;
    const double h = span / samples;
    std::size_t L = 2 * samples;
    while (2.0 * std::numbers::pi / (L * h) > 0.1) L *= 2;
    step_ = 2.0 * std::numbers::pi / (L * h);
    std::vector<cplx> a(L), b(L), A(L), B(L);
    for (std::size_t i = 0; i <= samples; ++i) {
      const double s = Cutoff::kLo + i * h;
      a[i] = h * psi(s);
      b[i] = h * s * psi(s);
    }
    auto run = [L](std::vector<cplx>& in, std::vector<cplx>& out) {
      auto* pin = reinterpret_cast<fftw_complex*>(in.data());
      auto* pout = reinterpret_cast<fftw_complex*>(out.data());
      fftw_plan plan;
      {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(L), pin, pout, FFTW_BACKWARD, FFTW_ESTIMATE);
      }
      fftw_execute(plan);
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    };
    run(a, A);
    run(b, B);
    const std::size_t count = std::min(L / 2, static_cast<std::size_t>(std::ceil(u_max / step_)) + 2);
    value_.resize(count);
    deriv_.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
      // shift of the sample origin to s = kLo
      const cplx shift = std::polar(1.0, m * step_ * Cutoff::kLo);
      value_[m] = shift * A[m];
      deriv_[m] = cplx(0.0, 1.0) * shift * B[m];
    }
  }

  double step_ = 0.1;
  std::vector<cplx> value_, deriv_;
};

// Per N, max of |K| / bound over a midpoint grid of (x, y) in [0,1]^2 with
// max(grid_density, 4N) points per axis, so that the u-spacing stays below
// the scale on which K varies.  lhs / rhs_scale are taken at the argmax.
inline std::vector<InequalityReport> kernel_bound_check(int j, int k, const std::vector<double>& ladder,
                                                        int grid_density = 64) {
  if (grid_density < 64) throw DomainError("kernel_bound_check requires grid_density >= 64");
  if (ladder.empty()) throw DomainError("kernel_bound_check requires a ladder");
  if (j < 1 || j > 2 || k < 1 || k > 2) throw DomainError("kernel_bound_check requires j, k in {1,2}");
  const double nmax = *std::max_element(ladder.begin(), ladder.end());
  const KernelSpectrum spectrum(k, nmax);
  std::vector<InequalityReport> out;
  for (double N : ladder) {
    InequalityReport rep;
    rep.N = N;
    rep.tag = "kernel j" + std::to_string(j) + "k" + std::to_string(k);
    const int D = std::max(grid_density, static_cast<int>(std::ceil(4.0 * N)));
    std::vector<double> pw(D);
    for (int a = 0; a < D; ++a) pw[a] = std::pow((a + 0.5) / D, j);
    for (int a = 0; a < D; ++a) {
      for (int b = 0; b <= a; ++b) {  // |K(x,y)| = |K(y,x)|
        const double u = N * (pw[a] - pw[b]);
        const double val = std::abs(spectrum(u));
        const double bound = kernel_bound_shape(k, u);
        if (val / bound > rep.ratio) {
          rep.ratio = val / bound;
          rep.lhs = val;
          rep.rhs_scale = bound;
        }
      }
    }
    out.push_back(rep);
  }
  return out;
}

// max/min of the ratios in a ladder of reports.
inline double drift(const std::vector<InequalityReport>& reps) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : reps) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  return hi / lo;
}

// ---------------------------------------------------------------------------
// Young-type bound for h(|x|^m - |y|^m)

// h on [0,1], evaluated at |z|.
struct ProfileKernel {
  std::function<double(double)> h;
  std::string tag;
};

inline ProfileKernel lorentzian_profile(double N) {
  return {[N](double z) { return 1.0 / (1.0 + N * N * z * z); }, "1/(1+N^2 z^2)"};
}
inline ProfileKernel sqrt_profile(double N) {
  const double r = std::sqrt(N);
  return {[r](double z) { return 1.0 / (1.0 + r * std::sqrt(z)); }, "1/(1+sqrt(N z))"};
}

inline double profile_norm(const ProfileKernel& h, double r) {
  if (std::isinf(r)) return h.h(0.0);
  return std::pow(detail::graded_integral([&](double z) { return std::pow(std::abs(h.h(z)), r); }, 0.0, 1.0, {0.0}),
                  1.0 / r);
}

// Bilinear form of h(|r1^m - r2^m|) for radial profiles on the unit ball
// of R^n, including the measures omega r^{n-1} dr.
class YoungForm {
 public:
  YoungForm(const ProfileKernel& h, int m, int n, std::size_t cells)
      : n_(n), omega_(BallGeometry(n).sphere_area),
        matrix_(SingularKernel{[h, m, n](double x, double y) {
                                 return h.h(std::abs(std::pow(x, m) - std::pow(y, m))) *
                                        std::pow(x, n - 1) * std::pow(y, n - 1);
                               },
                               [](double x) { return std::vector<double>{x}; }, h.tag},
                0.0, 1.0, cells) {
    if (m < 1 || m > n) throw DomainError("young form requires 1 <= m <= n");
  }
  cplx value(const SampledFunction& f, const SampledFunction& g) const {
    return omega_ * omega_ * matrix_.form(f.values, g.values);
  }
  int n() const { return n_; }

 private:
  int n_;
  double omega_;
  CellPairMatrix matrix_;
};

struct YoungExponents {
  double p = 2.0, q = 2.0, r = 1.0;
};

// |\int_B \int_B f(x) g(y) h(|x|^m - |y|^m)| against ||f||_p ||g||_q ||h||_r.
inline InequalityReport young_bilinear_check(const YoungForm& form, const ProfileKernel& h,
                                             const SampledFunction& f, const SampledFunction& g,
                                             const YoungExponents& e, double N = 0.0) {
  if (std::abs(1.0 / e.p + 1.0 / e.q + 1.0 / e.r - 2.0) > 1e-10) {
    throw DomainError("young_bilinear_check requires 1/p + 1/q + 1/r = 2");
  }
  InequalityReport rep;
  rep.N = N;
  rep.tag = "young " + h.tag;
  rep.lhs = std::abs(form.value(f, g));
  rep.rhs_scale = f.norm(e.p, form.n()) * g.norm(e.q, form.n()) * profile_norm(h, e.r);
  rep.ratio = rep.lhs / rep.rhs_scale;
  return rep;
}

// Convenience overload assembling the form on the cells of f.
inline InequalityReport young_bilinear_check(const SampledFunction& f, const SampledFunction& g,
                                             const ProfileKernel& h, int m, int n, const YoungExponents& e) {
  if (m > n) throw DomainError("young_bilinear_check requires m <= n");
  if (std::abs(1.0 / e.p + 1.0 / e.q + 1.0 / e.r - 2.0) > 1e-10) {
    throw DomainError("young_bilinear_check requires 1/p + 1/q + 1/r = 2");
  }
  return young_bilinear_check(YoungForm(h, m, n, f.cells()), h, f, g, e);
}

// ---------------------------------------------------------------------------
// Homogeneous kernels of degree -1 on [0,1]^2

namespace detail {

// \int_{e^{-L}}^{e^{L}} |K(x,1)| x^{-1/p} dx in log variables.
inline double log_scale_integral(const SingularKernel& kernel, double p, double L) {
  auto g = [&](double u) {
    const double x = std::exp(u);
    return std::abs(kernel.k(x, 1.0)) * std::pow(x, 1.0 - 1.0 / p);
  };
  std::vector<double> pts;
  for (double c : kernel.singular_y(1.0)) {
    // singular y = c(x) at x = 1 corresponds to a singular x = 1 / c at y = 1
    if (c > 0.0) pts.push_back(std::log(1.0 / c));
  }
  // Split the range into unit pieces for accuracy on the long interval.
  double s = 0.0;
  for (double a = -L; a < L - 1e-12; a += 1.0) s += graded_integral(g, a, std::min(L, a + 1.0), pts);
  return s;
}

}  // namespace detail

struct HomogeneityPrecondition {
  bool finite = false;
  double integral = 0.0;             // the capped integral at the widest cap
  double increment_ratio = 0.0;      // (I18 - I12) / (I12 - I6)
};

// Tail-capped check that \int_0^\infty |K(x,1)| x^{-1/p} dx is finite: the
// increments between caps e^{6}, e^{12}, e^{18} must shrink at least 2x.
inline HomogeneityPrecondition homogeneous_precondition(const SingularKernel& kernel, double p) {
  const double i6 = detail::log_scale_integral(kernel, p, 6.0);
  const double i12 = detail::log_scale_integral(kernel, p, 12.0);
  const double i18 = detail::log_scale_integral(kernel, p, 18.0);
  HomogeneityPrecondition pre;
  pre.integral = i18;
  const double d1 = i12 - i6, d2 = i18 - i12;
  pre.increment_ratio = d1 > 0.0 ? d2 / d1 : 0.0;
  pre.finite = std::isfinite(i18) && pre.increment_ratio < 0.5;
  return pre;
}

inline void check_homogeneity(const SingularKernel& kernel) {
  for (double x : {0.13, 0.5, 0.77}) {
    for (double y : {0.21, 0.64}) {
      for (double lam : {2.0, 3.7}) {
        const double a = kernel.k(lam * x, lam * y) * lam;
        const double b = kernel.k(x, y);
        if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(b))) {
          throw DomainError("kernel is not homogeneous of degree -1");
        }
      }
    }
  }
}

inline SingularKernel hilbert_kernel() {
  return {[](double x, double y) { return 1.0 / (x + y); }, [](double x) { return std::vector<double>{-x}; },
          "1/(x+y)"};
}

// 1/sqrt|x^2 - y^2| (the kernel of the V form after even reduction).
inline SingularKernel inverse_sqrt_kernel() {
  return {[](double x, double y) {
            const double d = std::abs(x * x - y * y);
            return d == 0.0 ? 0.0 : 1.0 / std::sqrt(d);
          },
          [](double x) { return std::vector<double>{x, -x}; }, "1/sqrt|x^2-y^2|"};
}

// |\int_0^1 \int_0^1 K f g| against ||f||_p ||g||_{p'}; the precondition and
// homogeneity are verified first.
inline InequalityReport homogeneous_bilinear_check(const SingularKernel& kernel, const CellPairMatrix& A,
                                                   const SampledFunction& f, const SampledFunction& g, double p) {
  check_homogeneity(kernel);
  const HomogeneityPrecondition pre = homogeneous_precondition(kernel, p);
  if (!pre.finite) throw DomainError("homogeneous kernel: \\int |K(x,1)| x^{-1/p} dx diverges");
  InequalityReport rep;
  rep.tag = "homogeneous " + kernel.tag;
  rep.lhs = std::abs(A.form(f.values, g.values));
  const double pc = p == 1.0 ? INFINITY : p / (p - 1.0);
  rep.rhs_scale = f.norm(p) * g.norm(pc);
  rep.ratio = rep.lhs / rep.rhs_scale;
  return rep;
}

inline InequalityReport homogeneous_bilinear_check(const SingularKernel& kernel, const SampledFunction& f,
                                                   const SampledFunction& g, double p) {
  check_homogeneity(kernel);
  const HomogeneityPrecondition pre = homogeneous_precondition(kernel, p);
  if (!pre.finite) throw DomainError("homogeneous kernel: \\int |K(x,1)| x^{-1/p} dx diverges");
  return homogeneous_bilinear_check(kernel, CellPairMatrix(kernel, 0.0, 1.0, f.cells()), f, g, p);
}

// ---------------------------------------------------------------------------
// Forms on [-1,1]^2 with kernels even in both variables

inline SingularKernel w_kernel(double N) {
  return {[N](double x, double y) { return 1.0 / (1.0 + N * std::abs(x * x - y * y)); },
          [](double x) { return std::vector<double>{x, -x}; }, "1/(1+N|x^2-y^2|)"};
}

// W_N = \int\int |f||g| / (1 + N |x^2 - y^2|) over [-1,1]^2, evaluated on
// [0,1]^2 after even reduction.  Ratio: sqrt(N) W_N / (||f||_2 ||g||_2),
// maximized over the supplied pairs, per N.
inline std::vector<InequalityReport> bilinear_W_check(
    const std::vector<std::pair<SampledFunction, SampledFunction>>& pairs, const std::vector<double>& ladder) {
  if (ladder.size() < 4) throw DomainError("bilinear_W_check requires a ladder of >= 4 values");
  if (pairs.empty()) throw DomainError("bilinear_W_check requires test functions");
  std::vector<InequalityReport> out;
  const std::size_t M = pairs.front().first.cells() / 2;
  for (double N : ladder) {
    const CellPairMatrix A(w_kernel(N), 0.0, 1.0, M);
    InequalityReport rep;
    rep.N = N;
    rep.tag = "W";
    for (const auto& [f, g] : pairs) {
      const SampledFunction fr = even_reduction(abs_of(f)), gr = even_reduction(abs_of(g));
      const double w = std::abs(A.form(fr.values, gr.values));
      const double scale = f.norm(2.0) * g.norm(2.0) / std::sqrt(N);
      if (w / scale > rep.ratio) {
        rep.ratio = w / scale;
        rep.lhs = w;
        rep.rhs_scale = scale;
      }
    }
    out.push_back(rep);
  }
  return out;
}

// V = \int\int |f||g| / sqrt|x^2 - y^2| over [-1,1]^2 against ||f||_2 ||g||_2.
inline InequalityReport bilinear_V_check(const SampledFunction& f, const SampledFunction& g,
                                         const CellPairMatrix* reduced = nullptr) {
  const SampledFunction fr = even_reduction(abs_of(f)), gr = even_reduction(abs_of(g));
  InequalityReport rep;
  rep.tag = "V";
  if (reduced) {
    rep.lhs = std::abs(reduced->form(fr.values, gr.values));
  } else {
    rep.lhs = std::abs(CellPairMatrix(inverse_sqrt_kernel(), 0.0, 1.0, fr.cells()).form(fr.values, gr.values));
  }
  rep.rhs_scale = f.norm(2.0) * g.norm(2.0);
  rep.ratio = rep.lhs / rep.rhs_scale;
  return rep;
}

}  // namespace oscillorm::ineq
