#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oscillorm/opnorm.hpp"

using namespace oscillorm;
using namespace oscillorm::opnorm;

namespace {

double max_diff(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const CVec& a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST(Grid, WeightSums) {
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (int n = 1; n <= 3; ++n)
        for (double N : {0.0, 100.0, 4096.0}) {
          const RadialGrid g = make_radial_grid({j, k, n}, N);
          double sr = 0.0, ss = 0.0;
          for (double w : g.rho_weights) sr += w;
          for (double w : g.s_weights) ss += w;
          EXPECT_NEAR(sr, BallGeometry(n).volume, 1e-10) << j << k << n << " N=" << N;
          EXPECT_NEAR(ss, 1.0, 1e-10) << j << k << n << " N=" << N;
          EXPECT_GE(g.rho_nodes.size(), std::max(64.0, 16 * N / (2 * std::numbers::pi)));
          EXPECT_GE(g.s_nodes.size(), std::max(64.0, 16 * N / (2 * std::numbers::pi)));
          for (std::size_t i = 1; i < g.rho_nodes.size(); ++i) EXPECT_LT(g.rho_nodes[i - 1], g.rho_nodes[i]);
          for (std::size_t i = 1; i < g.s_nodes.size(); ++i) EXPECT_LT(g.s_nodes[i - 1], g.s_nodes[i]);
        }
}

TEST(Grid, RejectsCoarse) {
  EXPECT_THROW(make_radial_grid({1, 1, 1}, 10.0, 4), DomainError);
  EXPECT_THROW(make_radial_grid({1, 1, 1}, 1e9), ResolutionError);
}

TEST(Operator, ZeroFrequencyKernelIsOne) {
  const SampledOperator op({1, 1, 1}, 0.0);
  for (std::size_t m = 0; m < op.rows(); m += 7)
    for (std::size_t i = 0; i < op.cols(); i += 5) EXPECT_EQ(op.entry(m, i), cplx(1.0, 0.0));
}

TEST(Operator, UnimodularKernel) {
  const SampledOperator op({2, 2, 2}, 64.0);
  for (std::size_t m = 0; m < op.rows(); m += 3)
    for (std::size_t i = 0; i < op.cols(); i += 3) EXPECT_NEAR(std::abs(op.entry(m, i)), 1.0, 1e-15);
}

TEST(Operator, ConstantDataClosedForm) {
  const double N = 32.0;
  const SampledOperator op({1, 1, 1}, N);
  const CVec g = op.apply(CVec(op.cols(), 1.0));
  for (std::size_t m = 0; m < op.rows(); ++m) {
    const double s = op.grid().s_nodes[m];
    const cplx iNs(0.0, N * s);
    const cplx expect = 2.0 * (std::exp(iNs) - 1.0) / iNs;
    EXPECT_NEAR(std::abs(g[m] - expect), 0.0, 1e-8) << "s=" << s;
  }
}

TEST(Operator, FastApplyMatchesDense) {
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (int n : {1, 3}) {
        const SampledOperator op({j, k, n}, 300.0);
        const DenseOperator dense(op);
        const CVec f = random_complex_vector(op.cols(), 11);
        const CVec g = random_complex_vector(op.rows(), 12);
        const CVec a1 = op.apply(f), a2 = dense.apply(f);
        EXPECT_LT(max_diff(a1, a2) / max_abs(a2), 1e-11) << j << k << n;
        const CVec b1 = op.adjoint(g), b2 = dense.adjoint(g);
        EXPECT_LT(max_diff(b1, b2) / max_abs(b2), 1e-11) << j << k << n;
      }
}

TEST(Operator, AdjointIdentity) {
  const SampledOperator op({2, 1, 2}, 1000.0);
  const CVec f = random_complex_vector(op.cols(), 3);
  const CVec g = random_complex_vector(op.rows(), 4);
  const CVec tf = op.apply(f), tg = op.adjoint(g);
  cplx lhs{}, rhs{};
  for (std::size_t m = 0; m < op.rows(); ++m) lhs += op.range_weights()[m] * tf[m] * std::conj(g[m]);
  for (std::size_t i = 0; i < op.cols(); ++i) rhs += op.domain_weights()[i] * f[i] * std::conj(tg[i]);
  EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-11);
}

TEST(Norms, WeightedNormBasics) {
  const std::vector<double> w{0.5, 0.25, 0.25};
  const CVec f{1.0, cplx(0, 2.0), -3.0};
  EXPECT_NEAR(weighted_norm(f, w, 1.0), 0.5 + 0.5 + 0.75, 1e-15);
  EXPECT_NEAR(weighted_norm(f, w, 0.5), std::sqrt(0.5 + 1.0 + 2.25), 1e-15);
  EXPECT_DOUBLE_EQ(weighted_norm(f, w, 0.0), 3.0);
  const CVec j = duality_map(CVec{0.0, 2.0}, 1.5);
  EXPECT_EQ(j[0], cplx(0.0, 0.0));
  EXPECT_NEAR(j[1].real(), std::sqrt(2.0), 1e-15);
}

TEST(Norm22, ZeroFrequencyRankOne) {
  const SampledOperator op({1, 1, 1}, 0.0);
  EXPECT_NEAR(norm_2_2(op), std::sqrt(2.0), 1e-9);
  EXPECT_THROW(norm_2_2(op, 0.1), DomainError);
}

TEST(Norm22, MatchesDenseAtSmallN) {
  const SampledOperator op({1, 2, 2}, 200.0);
  EXPECT_NEAR(norm_2_2(op), norm_2_2(DenseOperator(op)), 1e-8);
}

TEST(Norm22, EnergySlopes) {
  // Short ladder here; the full ladder is part of the acceptance suite.
  for (auto [fam, expect] : {std::pair{PhaseFamily(1, 1, 2), -0.5}, std::pair{PhaseFamily(2, 1, 1), -0.25}}) {
    std::vector<std::pair<double, double>> pts;
    for (int e = 7; e <= 10; ++e) {
      const double N = std::ldexp(1.0, e);
      pts.emplace_back(N, norm_2_2(SampledOperator(fam, N)));
    }
    EXPECT_NEAR(fit_exponent(pts).slope, expect, 0.05) << fam.tag();
  }
}

TEST(Candidates, Shapes) {
  const RadialGrid g = make_radial_grid({2, 1, 3}, 1024.0);
  const CandidateVectors c = candidate_vectors({2, 1, 3}, 1024.0, g);
  const double rf = 0.1 / 32.0;
  double vol = 0.0;
  for (std::size_t i = 0; i < g.rho_nodes.size(); ++i) {
    EXPECT_EQ(c.focusing[i], cplx(g.rho_nodes[i] <= rf ? 1.0 : 0.0, 0.0));
    if (g.rho_nodes[i] <= rf) vol += g.rho_weights[i];
    EXPECT_NEAR(std::abs(c.oscillatory[i]), 1.0, 1e-15);
  }
  // ||f||_p = |B(rf)|^{1/p}
  EXPECT_NEAR(vol, BallGeometry(3).ball_volume(rf), 1e-15);
  EXPECT_NEAR(weighted_norm(c.focusing, g.rho_weights, 0.25), std::pow(BallGeometry(3).ball_volume(rf), 0.25), 1e-12);
  EXPECT_THROW(candidate_vectors({2, 1, 3}, 1024.0, g, 0.5), DomainError);
}

TEST(Candidates, DegenerateSupport) {
  // A grid built for a tiny N has no node inside the focusing ball of a huge N.
  const RadialGrid g = make_radial_grid({1, 1, 1}, 1.0);
  EXPECT_THROW(candidate_vectors({1, 1, 1}, 1e12, g), DegenerateSupportError);
}

TEST(Candidates, ScalingInvariance) {
  const SampledOperator op({1, 1, 2}, 256.0);
  const CVec f = random_complex_vector(op.cols(), 7);
  CVec g = f;
  for (auto& z : g) z *= cplx(-3.5, 0.7);
  const LebesguePoint pt(0.3, 0.6);
  EXPECT_NEAR(rayleigh_ratio(op, f, pt), rayleigh_ratio(op, g, pt), 1e-12 * rayleigh_ratio(op, f, pt));
}

TEST(LowerBound, EndpointOneToInfinity) {
  const SampledOperator op({1, 2, 2}, 512.0);
  const NormEstimate e = norm_lower_bound(op, {1.0, 0.0}, {.restarts = 1});
  EXPECT_NEAR(e.lower, 1.0, 1e-12);
  EXPECT_NEAR(e.upper, 1.0, 1e-12);
}

TEST(LowerBound, ZeroFrequencyConstantExtremal) {
  const SampledOperator op({1, 1, 3}, 0.0);
  for (auto pt : {LebesguePoint(0.25, 0.25), LebesguePoint(0.75, 0.5), LebesguePoint(0.0, 1.0)}) {
    const NormEstimate e = norm_lower_bound(op, pt, {.restarts = 2});
    EXPECT_NEAR(e.lower / std::pow(BallGeometry(3).volume, 1.0 - pt.a), 1.0, 0.01);
    EXPECT_LE(e.lower, e.upper * (1 + 1e-6));
  }
}

TEST(LowerBound, SandwichHoldsAcrossPoints) {
  const SampledOperator op({2, 1, 2}, 512.0);
  const double c22 = norm_2_2(op);
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (double b : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const NormEstimate e = norm_lower_bound(op, {a, b}, {.restarts = 2}, c22);
      EXPECT_GT(e.lower, 0.0);
      EXPECT_LE(e.lower, e.upper * (1 + 1e-6)) << a << "," << b;
    }
}

TEST(LowerBound, MonotoneInQ) {
  const SampledOperator op({1, 1, 1}, 256.0);
  const double c22 = norm_2_2(op);
  const double big = norm_lower_bound(op, {0.5, 0.25}, {.restarts = 2}, c22).lower;
  const double small = norm_lower_bound(op, {0.5, 0.75}, {.restarts = 2}, c22).lower;
  // q-bar = 4/3 <= q = 4: Hölder on [0,1] gives ||.||_{4/3} <= ||.||_4.
  EXPECT_LE(small, big * (1 + 2e-2));
}

TEST(Fit, ExactPowerLaws) {
  std::vector<std::pair<double, double>> a, b;
  for (int e = 7; e <= 13; ++e) {
    const double N = std::ldexp(1.0, e);
    a.emplace_back(N, 3.0 / std::sqrt(N));
    b.emplace_back(N, 0.7);
  }
  const ExponentFit fa = fit_exponent(a);
  EXPECT_NEAR(fa.slope, -0.5, 1e-12);
  EXPECT_NEAR(fa.max_residual, 0.0, 1e-12);
  EXPECT_NEAR(fit_exponent(b).slope, 0.0, 1e-12);
  b[2].second = 0.0;
  EXPECT_THROW(fit_exponent(b), DomainError);
  EXPECT_THROW(fit_exponent({{1.0, 1.0}, {2.0, 1.0}}), DomainError);
}

TEST(Cartesian, ZeroFrequency) {
  const DenseOperator op = build_cartesian_operator({1, 1, 2}, 0.0, 128);
  EXPECT_NEAR(norm_2_2(op) / std::sqrt(std::numbers::pi), 1.0, 0.02);
  EXPECT_THROW(build_cartesian_operator({1, 1, 3}, 0.0, 64), DomainError);
}

TEST(Cartesian, MatchesRadialAtSmallN) {
  for (int j = 1; j <= 2; ++j) {
    const PhaseFamily fam(j, j, 2);
    const double rad = norm_2_2(SampledOperator(fam, 32.0));
    const double car = norm_2_2(build_cartesian_operator(fam, 32.0, 256));
    EXPECT_NEAR(car / rad, 1.0, 0.01) << fam.tag();
  }
}
