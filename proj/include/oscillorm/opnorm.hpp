#pragma once

// Radially reduced discretization of
//
//     T f(s) = \int_B f(x) e^{i N |x|^j s^k} dx,   s in [0, 1],
//
// and estimators for its discrete L^p(B) -> L^q([0,1]) norms.
//
// Because the kernel depends on x only through |x|, T acts on radial
// profiles:  T f(s) = \int_0^1 f(rho) e^{i N rho^j s^k} omega rho^{n-1} d rho.
// The rho and s integrals are discretized in the variables t = rho^j and
// v = s^k, in which the phase N t v is bilinear.  Uniform Gauss-Legendre
// panels in t and v then turn the body of the kernel into a sum of chirp
// transforms, applied exactly in O(M log M) with FFTs.  A short head
// interval near the origin, where the change of variables is singular, is
// discretized in rho (resp. s) directly and applied densely.

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oscillorm/errors.hpp"
#include "oscillorm/fftw_lock.hpp"
#include "oscillorm/fit.hpp"
#include "oscillorm/quad.hpp"
#include "oscillorm/theory.hpp"

namespace oscillorm::opnorm {

using quad::cplx;
using CVec = std::vector<cplx>;

// ---------------------------------------------------------------------------
// Grids

// Quadrature for \int_0^1 . omega rho^{n-1} d rho and \int_0^1 . ds.
//
// Node layout on each axis: `head` nodes first (Gauss-Legendre panels in
// rho or s on [0, H^{1/j}] resp. [0, H^{1/k}]), then body panels
// P = first_panel..last_panel of width H in t = rho^j (resp. v = s^k), 16
// nodes each, panel-major.
struct RadialGrid {
  std::vector<double> rho_nodes;
  std::vector<double> rho_weights;
  std::vector<double> s_nodes;
  std::vector<double> s_weights;

  std::size_t rho_head = 0;
  std::size_t s_head = 0;
  int first_panel = 1;
  int last_panel = 0;
  double H = 1.0;                // body panel width in t and v
  double focus_radius = 0.0;     // a node-aligned breakpoint of the rho grid
};

namespace detail {

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Appends Gauss-Legendre panels on [lo, hi] with `panels` equal pieces;
// weight multiplied by density(x).
template <class Density>
void append_panels(std::vector<double>& nodes, std::vector<double>& weights, double lo, double hi,
                   int panels, Density density) {
  const auto& rule = quad::gl16();
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double x = a + 0.5 * h * (rule.x[i] + 1.0);
      nodes.push_back(x);
      weights.push_back(0.5 * h * rule.w[i] * density(x));
    }
  }
}

}  // namespace detail

// Body panel count per axis so that every oscillation period carries at
// least `points_per_period` nodes: 16 (Np) >= ppp N / (2 pi).
inline int body_panel_count(double N, int points_per_period) {
  const double need = std::ceil(points_per_period * N / (32.0 * std::numbers::pi));
  return std::max(4, static_cast<int>(need));
}

// Upper limit on nodes per axis; beyond this the dense head blocks and the
// FFT kernels no longer fit a desk-scale memory budget.
inline constexpr std::size_t kMaxNodesPerAxis = 1u << 20;

inline RadialGrid make_radial_grid(const PhaseFamily& fam, double N, int points_per_period = 16,
                                   double eta = 0.1) {
  if (points_per_period < 8) throw DomainError("radial grid requires points_per_period >= 8");
  if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("radial grid requires finite N >= 0");
  const int Np = body_panel_count(N, points_per_period);
  if (static_cast<std::size_t>(Np) * 16 > kMaxNodesPerAxis) {
    throw ResolutionError("radial grid: N too large for the node budget");
  }
  const BallGeometry geom(fam.n);
  RadialGrid g;
  g.H = 1.0 / Np;
  g.first_panel = 1;
  g.last_panel = Np - 1;

  // rho head on [0, H^{1/j}], breakpoint at the focusing radius.
  const double head_end = std::pow(g.H, 1.0 / fam.j);
  const double omega = geom.sphere_area;
  const int n = fam.n;
  auto rho_density = [omega, n](double r) { return omega * detail::ipow(r, n - 1); };
  const double rf = N > 0.0 ? eta * std::pow(N, -1.0 / fam.j) : head_end;
  if (rf < head_end) {
    g.focus_radius = rf;
    detail::append_panels(g.rho_nodes, g.rho_weights, 0.0, rf, 1, rho_density);
    // geometric panels with ratio <= 8 up to the head end
    double a = rf;
    while (a < head_end) {
      const double b = std::min(head_end, 8.0 * a);
      detail::append_panels(g.rho_nodes, g.rho_weights, a, b, 1, rho_density);
      a = b;
    }
  } else {
    g.focus_radius = head_end;
    detail::append_panels(g.rho_nodes, g.rho_weights, 0.0, head_end, 1, rho_density);
  }
  g.rho_head = g.rho_nodes.size();

  // s head on [0, H^{1/k}].
  detail::append_panels(g.s_nodes, g.s_weights, 0.0, std::pow(g.H, 1.0 / fam.k), 1,
                        [](double) { return 1.0; });
  g.s_head = g.s_nodes.size();

  // Bodies in t and v.
  const auto& rule = quad::gl16();
  const double mu_pow = static_cast<double>(fam.n) / fam.j - 1.0;
  for (int P = g.first_panel; P <= g.last_panel; ++P) {
    for (std::size_t l = 0; l < rule.x.size(); ++l) {
      const double x = 0.5 * (rule.x[l] + 1.0);
      const double t = (P + x) * g.H;
      g.rho_nodes.push_back(std::pow(t, 1.0 / fam.j));
      g.rho_weights.push_back(g.H * 0.5 * rule.w[l] * omega / fam.j * std::pow(t, mu_pow));
      g.s_nodes.push_back(std::pow(t, 1.0 / fam.k));
      g.s_weights.push_back(g.H * 0.5 * rule.w[l] / fam.k * std::pow(t, 1.0 / fam.k - 1.0));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// FFT plumbing

namespace detail {

// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
inline std::size_t good_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

// Owns a forward/backward pair of in-place-capable 1-D complex plans of a
// fixed length, executed on caller buffers (new-array execute).
class FftPair {
 public:
  explicit FftPair(std::size_t n) : n_(n) {
    std::vector<cplx> a(n), b(n);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* ia = reinterpret_cast<fftw_complex*>(a.data());
    auto* ib = reinterpret_cast<fftw_complex*>(b.data());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), ia, ib, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), ia, ib, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !bwd_) throw Error("FFTW plan creation failed");
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }
  std::size_t size() const { return n_; }
  void forward(cplx* in, cplx* out) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  void backward(cplx* in, cplx* out) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }

 private:
  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Complex kernels

namespace detail {

inline cplx unit(double arg) { return {std::cos(arg), std::sin(arg)}; }

// sum_i a[i] * b[i] in plain real arithmetic (vectorizable, no NaN fixups).
inline cplx dot(const cplx* a, const cplx* b, std::size_t n) {
  const double* x = reinterpret_cast<const double*>(a);
  const double* y = reinterpret_cast<const double*>(b);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1], yr = y[2 * i], yi = y[2 * i + 1];
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

// y[i] += c * x[i]
inline void axpy(cplx c, const cplx* x, cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const double cr = c.real(), ci = c.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += cr * xr - ci * xi;
    ys[2 * i + 1] += cr * xi + ci * xr;
  }
}

// y[i] += a[i] * b[i]
inline void mul_add(const cplx* a, const cplx* b, cplx* y, std::size_t n) {
  const double* as = reinterpret_cast<const double*>(a);
  const double* bs = reinterpret_cast<const double*>(b);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = as[2 * i], ai = as[2 * i + 1], br = bs[2 * i], bi = bs[2 * i + 1];
    ys[2 * i] += ar * br - ai * bi;
    ys[2 * i + 1] += ar * bi + ai * br;
  }
}

}  // namespace detail

// out[Q][m] = sum_{P, l} in[P][l] exp(i alpha (P + x_l)(Q + y_m))
// for panel ranges P in [P0, P1], Q in [Q0, Q1] and in-panel offsets x, y.
//
// With (P+x)(Q+y) = ((P+x)^2 + (Q+y)^2 - (Q-P+y-x)^2) / 2 every (l, m)
// pair is a chirp-modulated linear convolution over the panel index.  The
// input is transformed once per l, the kernel spectra are precomputed per
// (l, m), and one inverse transform per m finishes the sum over l.
class ChirpProduct {
 public:
  ChirpProduct(int P0, int P1, std::vector<double> x, int Q0, int Q1, std::vector<double> y,
               double alpha)
      : P0_(P0), Q0_(Q0), nP_(P1 - P0 + 1), nQ_(Q1 - Q0 + 1), x_(std::move(x)), y_(std::move(y)),
        alpha_(alpha),
        fft_(detail::good_fft_size(static_cast<std::size_t>(nP_ + nQ_ - 1))) {
    if (nP_ < 1 || nQ_ < 1) throw DomainError("ChirpProduct requires non-empty panel ranges");
    const std::size_t L = fft_.size();
    const std::size_t nx = x_.size(), ny = y_.size();
    spectra_.assign(nx * ny * L, cplx{});
    CVec buf(L);
    const double scale = 1.0 / static_cast<double>(L);
    for (std::size_t l = 0; l < nx; ++l) {
      for (std::size_t m = 0; m < ny; ++m) {
        std::fill(buf.begin(), buf.end(), cplx{});
        for (int i = 0; i < nP_ + nQ_ - 1; ++i) {
          const double d = (Q0_ - (P0_ + nP_ - 1)) + i + y_[m] - x_[l];
          buf[i] = std::polar(scale, -0.5 * alpha_ * d * d);
        }
        fft_.forward(buf.data(), spectra_.data() + (l * ny + m) * L);
      }
    }
    in_chirp_.resize(static_cast<std::size_t>(nP_) * nx);
    for (int p = 0; p < nP_; ++p)
      for (std::size_t l = 0; l < nx; ++l) {
        const double u = P0_ + p + x_[l];
        in_chirp_[p * nx + l] = std::polar(1.0, 0.5 * alpha_ * u * u);
      }
    out_chirp_.resize(static_cast<std::size_t>(nQ_) * ny);
    for (int q = 0; q < nQ_; ++q)
      for (std::size_t m = 0; m < ny; ++m) {
        const double u = Q0_ + q + y_[m];
        out_chirp_[q * ny + m] = std::polar(1.0, 0.5 * alpha_ * u * u);
      }
  }

  std::size_t input_size() const { return static_cast<std::size_t>(nP_) * x_.size(); }
  std::size_t output_size() const { return static_cast<std::size_t>(nQ_) * y_.size(); }

  // `in` has input_size() entries (panel-major); adds into `out`.
  void apply_add(const cplx* in, cplx* out) const {
    const std::size_t L = fft_.size();
    const std::size_t nx = x_.size(), ny = y_.size();
    std::vector<CVec> uhat(nx, CVec(L));
    CVec buf(L);
    for (std::size_t l = 0; l < nx; ++l) {
      std::fill(buf.begin(), buf.end(), cplx{});
      for (int p = 0; p < nP_; ++p) buf[p] = in[p * nx + l] * in_chirp_[p * nx + l];
      fft_.forward(buf.data(), uhat[l].data());
    }
    CVec acc(L), res(L);
    for (std::size_t m = 0; m < ny; ++m) {
      std::fill(acc.begin(), acc.end(), cplx{});
      for (std::size_t l = 0; l < nx; ++l) {
        detail::mul_add(uhat[l].data(), spectra_.data() + (l * ny + m) * L, acc.data(), L);
      }
      fft_.backward(acc.data(), res.data());
      for (int q = 0; q < nQ_; ++q) out[q * ny + m] += res[q + nP_ - 1] * out_chirp_[q * ny + m];
    }
  }

 private:
  int P0_, Q0_, nP_, nQ_;
  std::vector<double> x_, y_;
  double alpha_;
  detail::FftPair fft_;
  CVec spectra_;
  CVec in_chirp_, out_chirp_;
};

// Discretized T: (T f)_m = sum_i w_rho_i K_mi f_i with K_mi = e^{i N rho_i^j s_m^k}.
class SampledOperator {
 public:
  SampledOperator(const PhaseFamily& fam, double N, int points_per_period = 16, double eta = 0.1)
      : family_(fam), N_(N), grid_(make_radial_grid(fam, N, points_per_period, eta)) {
    const std::size_t Mr = grid_.rho_nodes.size();
    const std::size_t Ms = grid_.s_nodes.size();
    t_.resize(Mr);
    v_.resize(Ms);
    for (std::size_t i = 0; i < Mr; ++i) t_[i] = detail::ipow(grid_.rho_nodes[i], fam.j);
    for (std::size_t m = 0; m < Ms; ++m) v_[m] = detail::ipow(grid_.s_nodes[m], fam.k);
    // Body nodes are exactly (P + x) H in t and v; keep those exact values.
    const auto& rule = quad::gl16();
    std::vector<double> x(rule.x.size());
    for (std::size_t l = 0; l < x.size(); ++l) x[l] = 0.5 * (rule.x[l] + 1.0);
    for (int P = grid_.first_panel; P <= grid_.last_panel; ++P)
      for (std::size_t l = 0; l < x.size(); ++l) {
        const std::size_t off = (P - grid_.first_panel) * x.size() + l;
        t_[grid_.rho_head + off] = (P + x[l]) * grid_.H;
        v_[grid_.s_head + off] = (P + x[l]) * grid_.H;
      }
    const std::size_t hr = grid_.rho_head, hs = grid_.s_head;
    head_rows_.resize(hs * Mr);
    for (std::size_t m = 0; m < hs; ++m)
      for (std::size_t i = 0; i < Mr; ++i) head_rows_[m * Mr + i] = entry(m, i);
    head_cols_.resize((Ms - hs) * hr);
    for (std::size_t m = hs; m < Ms; ++m)
      for (std::size_t i = 0; i < hr; ++i) head_cols_[(m - hs) * hr + i] = entry(m, i);
    const double alpha = N * grid_.H * grid_.H;
    body_.emplace(grid_.first_panel, grid_.last_panel, x, grid_.first_panel, grid_.last_panel, x, alpha);
  }

  const PhaseFamily& family() const { return family_; }
  double N() const { return N_; }
  const RadialGrid& grid() const { return grid_; }
  std::size_t rows() const { return grid_.s_nodes.size(); }
  std::size_t cols() const { return grid_.rho_nodes.size(); }
  const std::vector<double>& domain_weights() const { return grid_.rho_weights; }
  const std::vector<double>& range_weights() const { return grid_.s_weights; }

  cplx entry(std::size_t m, std::size_t i) const { return detail::unit(N_ * t_[i] * v_[m]); }

  // Row-major rows() x cols() kernel; for tests and small N only.
  CVec dense_kernel() const {
    CVec k(rows() * cols());
    for (std::size_t m = 0; m < rows(); ++m)
      for (std::size_t i = 0; i < cols(); ++i) k[m * cols() + i] = entry(m, i);
    return k;
  }

  CVec apply(const CVec& f) const {
    check_size(f.size(), cols());
    const std::size_t Mr = cols(), Ms = rows(), hr = grid_.rho_head, hs = grid_.s_head;
    CVec a(Mr);
    for (std::size_t i = 0; i < Mr; ++i) a[i] = grid_.rho_weights[i] * f[i];
    CVec g(Ms, cplx{});
    for (std::size_t m = 0; m < hs; ++m) g[m] = detail::dot(head_rows_.data() + m * Mr, a.data(), Mr);
    for (std::size_t m = hs; m < Ms; ++m) {
      g[m] = detail::dot(head_cols_.data() + (m - hs) * hr, a.data(), hr);
    }
    body_->apply_add(a.data() + hr, g.data() + hs);
    return g;
  }

  // Adjoint for the weighted inner products: (T* g)_i = sum_m w_s_m conj(K_mi) g_m.
  CVec adjoint(const CVec& g) const {
    check_size(g.size(), rows());
    const std::size_t Mr = cols(), Ms = rows(), hr = grid_.rho_head, hs = grid_.s_head;
    // Work with h = conj(w_s g) and return conj(K^T h).
    CVec h(Ms);
    for (std::size_t m = 0; m < Ms; ++m) h[m] = std::conj(grid_.s_weights[m] * g[m]);
    CVec f(Mr, cplx{});
    for (std::size_t m = 0; m < hs; ++m) detail::axpy(h[m], head_rows_.data() + m * Mr, f.data(), Mr);
    for (std::size_t m = hs; m < Ms; ++m) {
      detail::axpy(h[m], head_cols_.data() + (m - hs) * hr, f.data(), hr);
    }
    // The body kernel is symmetric under swapping (P, x) and (Q, y).
    body_->apply_add(h.data() + hs, f.data() + hr);
    for (auto& z : f) z = std::conj(z);
    return f;
  }

 private:
  static void check_size(std::size_t got, std::size_t want) {
    if (got != want) throw DomainError("operator vector size mismatch");
  }

  PhaseFamily family_;
  double N_;
  RadialGrid grid_;
  std::vector<double> t_, v_;
  CVec head_rows_;  // s-head rows x all rho columns
  CVec head_cols_;  // s-body rows x rho-head columns
  std::optional<ChirpProduct> body_;
};

// Explicit-matrix operator with the same weighted conventions.
class DenseOperator {
 public:
  DenseOperator(CVec kernel, std::vector<double> domain_w, std::vector<double> range_w)
      : k_(std::move(kernel)), wd_(std::move(domain_w)), wr_(std::move(range_w)) {
    if (k_.size() != wd_.size() * wr_.size()) throw DomainError("DenseOperator shape mismatch");
  }
  explicit DenseOperator(const SampledOperator& op)
      : DenseOperator(op.dense_kernel(), op.domain_weights(), op.range_weights()) {}

  std::size_t rows() const { return wr_.size(); }
  std::size_t cols() const { return wd_.size(); }
  const std::vector<double>& domain_weights() const { return wd_; }
  const std::vector<double>& range_weights() const { return wr_; }
  cplx entry(std::size_t m, std::size_t i) const { return k_[m * cols() + i]; }

  CVec apply(const CVec& f) const {
    if (f.size() != cols()) throw DomainError("operator vector size mismatch");
    CVec a(cols());
    for (std::size_t i = 0; i < cols(); ++i) a[i] = wd_[i] * f[i];
    CVec g(rows());
    for (std::size_t m = 0; m < rows(); ++m) {
      cplx acc{};
      const cplx* row = k_.data() + m * cols();
      for (std::size_t i = 0; i < cols(); ++i) acc += row[i] * a[i];
      g[m] = acc;
    }
    return g;
  }
  CVec adjoint(const CVec& g) const {
    if (g.size() != rows()) throw DomainError("operator vector size mismatch");
    CVec f(cols(), cplx{});
    for (std::size_t m = 0; m < rows(); ++m) {
      const cplx h = wr_[m] * g[m];
      const cplx* row = k_.data() + m * cols();
      for (std::size_t i = 0; i < cols(); ++i) f[i] += std::conj(row[i]) * h;
    }
    return f;
  }

 private:
  CVec k_;
  std::vector<double> wd_, wr_;
};

// Tensor Gauss-Legendre grid on [-1,1]^2 masked to the unit disk, with the
// same s grid as the radial build.  Oracle for the radial reduction.
inline DenseOperator build_cartesian_operator(const PhaseFamily& fam, double N, int side_points = 256,
                                              int points_per_period = 16) {
  if (fam.n != 2) throw DomainError("build_cartesian_operator supports n = 2 only");
  if (side_points < 16 || side_points > 256 || side_points % 16 != 0) {
    throw DomainError("build_cartesian_operator requires side_points in {16, 32, ..., 256}");
  }
  const quad::Grid1D g1 = quad::composite_grid(-1.0, 1.0, side_points / 16);
  std::vector<double> tvals, wd;
  for (std::size_t a = 0; a < g1.size(); ++a)
    for (std::size_t b = 0; b < g1.size(); ++b) {
      const double r2 = g1.nodes[a] * g1.nodes[a] + g1.nodes[b] * g1.nodes[b];
      if (r2 > 1.0) continue;
      tvals.push_back(fam.j == 2 ? r2 : std::sqrt(r2));
      wd.push_back(g1.weights[a] * g1.weights[b]);
    }
  const RadialGrid rg = make_radial_grid(fam, N, points_per_period);
  std::vector<double> wr = rg.s_weights;
  CVec k(wr.size() * wd.size());
  for (std::size_t m = 0; m < wr.size(); ++m) {
    const double v = detail::ipow(rg.s_nodes[m], fam.k);
    for (std::size_t i = 0; i < wd.size(); ++i) k[m * wd.size() + i] = detail::unit(N * tvals[i] * v);
  }
  return DenseOperator(std::move(k), std::move(wd), std::move(wr));
}

// ---------------------------------------------------------------------------
// Discrete norms

// (sum w |f|^p)^{1/p}, with recip = 1/p; recip = 0 is the sup norm.
inline double weighted_norm(const CVec& f, const std::vector<double>& w, double recip) {
  if (recip == 0.0) {
    double m = 0.0;
    for (const auto& z : f) m = std::max(m, std::abs(z));
    return m;
  }
  const double p = 1.0 / recip;
  // scale by the max modulus to avoid under/overflow for large p
  double mx = 0.0;
  for (const auto& z : f) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return 0.0;
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) terms[i] = w[i] * std::pow(std::abs(f[i]) / mx, p);
  return mx * std::pow(quad::pairwise_sum(terms), recip);
}

// Duality map J_r(x) = x |x|^{r-2}, with |x|^{r-2} := 0 at x = 0.
inline CVec duality_map(const CVec& x, double r) {
  CVec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    y[i] = a == 0.0 ? cplx{} : x[i] * std::pow(a, r - 2.0);
  }
  return y;
}

template <class Op>
double rayleigh_ratio(const Op& op, const CVec& f, const LebesguePoint& pt) {
  const double den = weighted_norm(f, op.domain_weights(), pt.a);
  if (!(den > 0.0)) return 0.0;
  return weighted_norm(op.apply(f), op.range_weights(), pt.b) / den;
}

// ---------------------------------------------------------------------------
// 2 -> 2 norm

// Complex vector with independent standard normal real and imaginary parts.
inline CVec random_complex_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  CVec v(n);
  for (auto& z : v) {
    const double re = d(gen);
    const double im = d(gen);
    z = {re, im};
  }
  return v;
}

namespace detail {

// |last component| of the unit eigenvector of the symmetric tridiagonal
// matrix (diag alpha, off-diagonal beta) for its largest eigenvalue theta,
// by inverse iteration with a shift just above theta (T - sigma is then
// negative definite and the LDL^T sweep needs no pivoting).
inline double top_ritz_last_component(const std::vector<double>& alpha, const std::vector<double>& beta,
                                      double theta) {
  const std::size_t k = alpha.size();
  if (k == 1) return 1.0;
  double scale = std::abs(theta);
  for (double a : alpha) scale = std::max(scale, std::abs(a));
  const double sigma = theta + 1e-10 * scale + std::numeric_limits<double>::min();
  std::vector<double> d(k), l(k), y(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = alpha[i] - sigma - (i > 0 ? l[i - 1] * beta[i - 1] : 0.0);
    if (i + 1 < k) l[i] = beta[i] / d[i];
  }
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t i = 1; i < k; ++i) y[i] -= l[i - 1] * y[i - 1];  // L z = y
    for (std::size_t i = 0; i < k; ++i) y[i] /= d[i];                 // D
    for (std::size_t i = k - 1; i-- > 0;) y[i] -= l[i] * y[i + 1];    // L^T x = z
    double nrm = 0.0;
    for (double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : y) v /= nrm;
  }
  return std::abs(y[k - 1]);
}

}  // namespace detail

struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative eigen-residual of the Gram map
};

// Largest singular value of T between the weighted L^2 spaces: the top
// eigenvalue of the Gram map T* T, from a Lanczos (Krylov-accelerated power)
// iteration with full reorthogonalization.  Converged when the Ritz residual
// falls below tol relative to the Ritz value, or when the Ritz value has
// stagnated at roundoff.
template <class Op>
PowerResult norm_2_2_detail(const Op& op, double tol = 1e-10, int max_iter = 400,
                            std::uint64_t seed = 0x5eed) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw DomainError("norm_2_2 requires tol in (0, 1e-3]");
  const auto& wd = op.domain_weights();
  const std::size_t M = op.cols();
  // Work in coordinates q~ = sqrt(w) q, where the weighted inner product is
  // the plain one and reorthogonalization runs on contiguous vectors.
  std::vector<double> sw(M);
  for (std::size_t i = 0; i < M; ++i) sw[i] = std::sqrt(wd[i]);
  using VecMap = Eigen::Map<Eigen::VectorXcd>;
  const Eigen::Index Mi = static_cast<Eigen::Index>(M);
  CVec q = random_complex_vector(M, seed);
  for (std::size_t i = 0; i < M; ++i) q[i] = (q[i] + 1.0) * sw[i];
  VecMap(q.data(), Mi).normalize();
  // Orthonormal Krylov basis as matrix columns, grown geometrically.
  Eigen::MatrixXcd basis(Mi, 0);
  std::vector<double> alpha, beta;
  PowerResult res;
  double theta_prev = -1.0;
  int stagnant = 0;
  const int cap = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_iter), M));
  CVec x(M);
  for (int it = 1; it <= cap; ++it) {
    const Eigen::Index kb = it;
    if (basis.cols() < kb) basis.conservativeResize(Mi, std::min<Eigen::Index>(2 * kb + 16, cap));
    basis.col(kb - 1) = VecMap(q.data(), Mi);
    for (std::size_t i = 0; i < M; ++i) x[i] = q[i] / sw[i];
    CVec w = op.adjoint(op.apply(x));
    for (std::size_t i = 0; i < M; ++i) w[i] *= sw[i];
    VecMap wm(w.data(), Mi);
    const double a = std::real(VecMap(q.data(), Mi).dot(wm));
    alpha.push_back(a);
    // Three-term recurrence, then full reorthogonalization by classical
    // Gram-Schmidt, repeated only when a pass cancelled most of w.
    wm -= a * basis.col(kb - 1);
    if (kb > 1) wm -= beta.back() * basis.col(kb - 2);
    for (int pass = 0; pass < 2; ++pass) {
      const double before = wm.norm();
      const Eigen::VectorXcd c = basis.leftCols(kb).adjoint() * wm;
      wm.noalias() -= basis.leftCols(kb) * c;
      if (wm.norm() > 0.7071 * before) break;
    }
    const double b = wm.norm();
    const int k = static_cast<int>(alpha.size());
    Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
    for (int i = 0; i < k; ++i) diag[i] = alpha[i];
    for (int i = 0; i + 1 < k; ++i) sub[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const double theta = eig.eigenvalues()[k - 1];
    const double last = detail::top_ritz_last_component(alpha, beta, theta);
    res.iterations = it;
    res.value = std::sqrt(std::max(theta, 0.0));
    if (!(theta > 0.0)) {
      if (b == 0.0) return res;  // T vanishes on the Krylov space
    } else {
      res.residual = b * last / theta;
      if (res.residual <= tol || b <= 1e-14 * theta) return res;
      stagnant = std::abs(theta - theta_prev) <= 1e-15 * theta ? stagnant + 1 : 0;
      if (stagnant >= 5) return res;
    }
    theta_prev = theta;
    if (b == 0.0) return res;
    beta.push_back(b);
    for (std::size_t i = 0; i < M; ++i) q[i] = w[i] / b;
  }
  if (res.iterations == static_cast<int>(M)) return res;  // Krylov space exhausted: exact
  throw ConvergenceError("norm_2_2 did not converge", res.residual);
}

template <class Op>
double norm_2_2(const Op& op, double tol = 1e-10) {
  return norm_2_2_detail(op, tol).value;
}

// ---------------------------------------------------------------------------
// Candidates and bounds

struct CandidateVectors {
  CVec focusing;     // indicator of rho <= eta N^{-1/j}
  CVec constant;     // 1
  CVec oscillatory;  // e^{2 i N (rho^2 - rho)}
};

inline CandidateVectors candidate_vectors(const PhaseFamily& fam, double N, const RadialGrid& grid,
                                          double eta = 0.1) {
  if (!(eta > 0.0 && eta <= 0.25)) throw DomainError("candidate_vectors requires 0 < eta <= 1/4");
  if (!(N >= 0.0)) throw DomainError("candidate_vectors requires N >= 0");
  // At N = 0 the focusing ball covers all of B.
  const double rf = N > 0.0 ? eta * std::pow(N, -1.0 / fam.j) : INFINITY;
  CandidateVectors c;
  const std::size_t M = grid.rho_nodes.size();
  c.focusing.assign(M, cplx{});
  c.constant.assign(M, cplx{1.0, 0.0});
  c.oscillatory.resize(M);
  bool any = false;
  for (std::size_t i = 0; i < M; ++i) {
    const double r = grid.rho_nodes[i];
    if (r <= rf) {
      c.focusing[i] = 1.0;
      any = true;
    }
    c.oscillatory[i] = detail::unit(2.0 * N * (r * r - r));
  }
  if (!any) throw DegenerateSupportError("focusing radius below the smallest rho node");
  return c;
}

enum class LowerMethod { kFocusing, kConstant, kOscillatory, kAscent, kEndpoint, kSvd };
enum class UpperMethod { kInterpolation, kEndpoint, kSvd };

inline const char* to_string(LowerMethod m) {
  switch (m) {
    case LowerMethod::kFocusing: return "focusing";
    case LowerMethod::kConstant: return "constant";
    case LowerMethod::kOscillatory: return "oscillatory";
    case LowerMethod::kAscent: return "ascent";
    case LowerMethod::kEndpoint: return "endpoint";
    case LowerMethod::kSvd: return "svd";
  }
  return "?";
}
inline const char* to_string(UpperMethod m) {
  switch (m) {
    case UpperMethod::kInterpolation: return "interpolation";
    case UpperMethod::kEndpoint: return "endpoint";
    case UpperMethod::kSvd: return "svd";
  }
  return "?";
}

struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  LowerMethod method_lower = LowerMethod::kConstant;
  UpperMethod method_upper = UpperMethod::kInterpolation;
  double c22 = 0.0;  // the 2 -> 2 constant fed into the interpolation
  // Individual candidate ratios, before ascent.
  double focusing_ratio = 0.0;
  double constant_ratio = 0.0;
  double oscillatory_ratio = 0.0;
};

struct LowerBoundOptions {
  int restarts = 8;
  int ascent_steps = 200;
  double eta = 0.1;
  std::uint64_t seed = 1;
  double ascent_tol = 1e-4;  // relative improvement per step below which ascent stops
};

namespace detail {

inline bool is_endpoint(double r) { return r == 0.0 || r == 1.0; }

// Nonlinear power ascent f <- J_{p'}(T* J_q(T f)); returns the best ratio.
// Each step costs one apply and one adjoint: T f is carried over.
template <class Op>
double ascend(const Op& op, CVec f, const LebesguePoint& pt, const LowerBoundOptions& opt,
              int* steps_used = nullptr) {
  const double p_conj = 1.0 / (1.0 - pt.a);
  const double q = 1.0 / pt.b;
  const auto& wd = op.domain_weights();
  const auto& wr = op.range_weights();
  double nf = weighted_norm(f, wd, pt.a);
  if (!(nf > 0.0)) return 0.0;
  CVec g = op.apply(f);
  double best = weighted_norm(g, wr, pt.b) / nf;
  int step = 0;
  for (; step < opt.ascent_steps; ++step) {
    CVec next = duality_map(op.adjoint(duality_map(g, q)), p_conj);
    const double nn = weighted_norm(next, wd, pt.a);
    if (!(nn > 0.0) || !std::isfinite(nn)) break;
    for (auto& z : next) z /= nn;
    g = op.apply(next);
    const double r = weighted_norm(g, wr, pt.b);
    if (!(r > best * (1.0 + opt.ascent_tol))) {
      best = std::max(best, r);
      break;
    }
    best = r;
  }
  if (steps_used) *steps_used = step;
  return best;
}

}  // namespace detail

// Lower bound from the three test functions plus seeded random starts, each
// refined by nonlinear power ascent for interior exponents; upper bound
// from the interpolation chain with the computed 2 -> 2 constant, tightened
// by the exact endpoint identities.
template <class Op>
NormEstimate norm_lower_bound(const Op& op, const PhaseFamily& fam, double N, const RadialGrid& grid,
                              const LebesguePoint& pt, const LowerBoundOptions& opt = {},
                              std::optional<double> c22_hint = std::nullopt) {
  if (opt.restarts < 1) throw DomainError("norm_lower_bound requires restarts >= 1");
  NormEstimate est;
  est.c22 = c22_hint ? *c22_hint : norm_2_2(op);
  const BallGeometry geom(fam.n);
  double wr_sum = 0.0, wd_sum = 0.0;
  for (double w : op.range_weights()) wr_sum += w;
  for (double w : op.domain_weights()) wd_sum += w;

  // Upper bound.
  est.upper = interpolated_upper_bound(est.c22, geom, pt);
  est.method_upper = UpperMethod::kInterpolation;
  if (pt.a == 0.5 && pt.b == 0.5) {
    est.method_upper = UpperMethod::kSvd;
  }
  // Exact endpoint norms of a unimodular kernel:
  //   ||T||_{1->q} = (sum w_s)^{1/q},   ||T||_{p->inf} = (sum w_rho)^{1-1/p}.
  std::optional<double> exact;
  if (pt.a == 1.0) exact = std::pow(wr_sum, pt.b);
  if (pt.b == 0.0) exact = std::pow(wd_sum, 1.0 - pt.a);
  if (exact) {
    est.upper = *exact;
    est.method_upper = UpperMethod::kEndpoint;
  }

  // Candidates.
  const CandidateVectors cand = candidate_vectors(fam, N, grid, opt.eta);
  est.focusing_ratio = rayleigh_ratio(op, cand.focusing, pt);
  est.constant_ratio = rayleigh_ratio(op, cand.constant, pt);
  est.oscillatory_ratio = rayleigh_ratio(op, cand.oscillatory, pt);
  est.lower = est.focusing_ratio;
  est.method_lower = LowerMethod::kFocusing;
  auto consider = [&](double r, LowerMethod m) {
    if (r > est.lower) {
      est.lower = r;
      est.method_lower = m;
    }
  };
  consider(est.constant_ratio, LowerMethod::kConstant);
  consider(est.oscillatory_ratio, LowerMethod::kOscillatory);

  // At p = q = 2 the ascent is the power iteration already behind c22.
  const bool l2 = pt.a == 0.5 && pt.b == 0.5;
  const bool interior = !l2 && !detail::is_endpoint(pt.a) && !detail::is_endpoint(pt.b);
  int degenerate = 0;
  std::vector<CVec> starts{cand.focusing, cand.constant, cand.oscillatory};
  for (int r = 0; r < opt.restarts; ++r) {
    starts.push_back(random_complex_vector(op.cols(), opt.seed * 1000003u + r));
  }
  // At p = q = 2 the random starts are already spent inside the 2 -> 2 solve.
  for (std::size_t sidx = l2 ? starts.size() : 0; sidx < starts.size(); ++sidx) {
    const bool random = sidx >= 3;
    double r = 0.0;
    if (interior) {
      r = detail::ascend(op, starts[sidx], pt, opt);
      if (r > est.lower) consider(r, LowerMethod::kAscent);
    } else if (random) {
      r = rayleigh_ratio(op, starts[sidx], pt);
      consider(r, LowerMethod::kAscent);
    }
    if (random && !(r > 0.0)) ++degenerate;
  }
  if (degenerate == opt.restarts && !(est.lower > 0.0)) {
    throw EstimationError("norm_lower_bound: every start degenerated");
  }
  if (l2 && est.c22 >= est.lower) {
    est.lower = est.c22;
    est.method_lower = LowerMethod::kSvd;
  }
  if (exact && *exact >= est.lower) {
    // The extremal vectors (point masses / row phases) attain the exact value.
    est.lower = *exact;
    est.method_lower = LowerMethod::kEndpoint;
  }
  if (est.lower > est.upper * (1.0 + 1e-6)) {
    throw EstimationError("norm estimate violates lower <= upper: " + std::to_string(est.lower) +
                          " > " + std::to_string(est.upper));
  }
  return est;
}

// Convenience overload for the production operator.
inline NormEstimate norm_lower_bound(const SampledOperator& op, const LebesguePoint& pt,
                                     const LowerBoundOptions& opt = {},
                                     std::optional<double> c22_hint = std::nullopt) {
  return norm_lower_bound(op, op.family(), op.N(), op.grid(), pt, opt, c22_hint);
}

// Default frequency ladder 2^7 .. 2^13.
inline std::vector<double> default_ladder() {
  std::vector<double> v;
  for (int e = 7; e <= 13; ++e) v.push_back(std::ldexp(1.0, e));
  return v;
}

}  // namespace oscillorm::opnorm
