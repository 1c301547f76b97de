#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oscillorm/ineq.hpp"

using namespace oscillorm;
using namespace oscillorm::ineq;

namespace {

// The same bilinear form evaluated on [-1,1]^2 without reduction.
double full_square_form(const SingularKernel& k, const SampledFunction& f, const SampledFunction& g) {
  const CellPairMatrix A(k, -1.0, 1.0, f.cells());
  return std::abs(A.form(f.values, g.values));
}

}  // namespace

TEST(Cutoff, PlateauAndSupport) {
  const Cutoff psi;
  for (int i = 0; i <= 1000; ++i) EXPECT_EQ(psi(i * 1e-3), 1.0);
  EXPECT_EQ(psi(-1.0 - 1e-3), 0.0);
  EXPECT_EQ(psi(2.0 + 1e-3), 0.0);
  EXPECT_EQ(psi(-1.0), 0.0);
  EXPECT_EQ(psi(2.0), 0.0);
  for (double s = -1.2; s <= 2.2; s += 0.01) {
    EXPECT_GE(psi(s), 0.0);
    EXPECT_LE(psi(s), 1.0);
  }
}

TEST(Cutoff, DerivativesMatchDifferences) {
  const Cutoff psi;
  const double h = 1e-5;
  for (double s : {-0.9, -0.75, -0.6, 1.55, 1.7, 1.93}) {
    EXPECT_NEAR(psi(s, 1), (psi(s + h) - psi(s - h)) / (2 * h), 1e-6) << s;
    EXPECT_NEAR(psi(s, 2), (psi(s + h, 1) - psi(s - h, 1)) / (2 * h), 1e-5) << s;
  }
  EXPECT_THROW(psi(0.0, 3), DomainError);
}

TEST(KernelK, ZeroFrequency) {
  // Integral of psi: plateau of length 2 plus two ramps of mass 1/4.
  EXPECT_NEAR(std::abs(kernel_K(1, 1, 1000.0, 0.4, 0.4) - cplx(2.5, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(kernel_K(2, 2, 1000.0, 0.7, 0.7) - cplx(1.0, 0.0)), 0.0, 1e-14);
}

TEST(KernelK, FullPeriodsVanishWithIndicator) {
  const double N = 64.0;
  for (int m = 1; m <= 4; ++m) {
    const double x = 0.9, y = x - 2.0 * std::numbers::pi * m / N;
    EXPECT_LT(std::abs(kernel_K(1, 1, N, x, y, true)), 1e-12) << m;
  }
}

TEST(KernelK, HermitianSymmetry) {
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      const cplx a = kernel_K(j, k, 300.0, 0.83, 0.31);
      const cplx b = kernel_K(j, k, 300.0, 0.31, 0.83);
      EXPECT_LT(std::abs(a - std::conj(b)), 1e-10) << j << k;
    }
}

TEST(KernelK, Preconditions) {
  EXPECT_THROW(kernel_K(3, 1, 10.0, 0.1, 0.2), DomainError);
  EXPECT_THROW(kernel_K(1, 1, 10.0, 1.1, 0.2), DomainError);
  EXPECT_THROW(kernel_K(1, 1, 10.0, 0.1, -0.2), DomainError);
}

TEST(KernelK, TableMatchesDirect) {
  const KernelTable t1(1, 2000.0), t2(2, 2000.0);
  for (double x : {0.05, 0.5, 0.97})
    for (double y : {0.0, 0.33, 0.99}) {
      const double u = 2000.0 * (x - y);
      EXPECT_LT(std::abs(t1(u) - kernel_K(1, 1, 2000.0, x, y)), 1e-10);
      EXPECT_LT(std::abs(t2(u) - kernel_K(1, 2, 2000.0, x, y)), 1e-10);
    }
}

TEST(KernelK, DecayUnderDoubling) {
  // (j,k) = (2,2), N = 2^10: |K| against the max-form bound, stable under N -> 2N.
  const std::vector<double> ladder{1024.0, 2048.0};
  const auto reps = kernel_bound_check(2, 2, ladder, 64);
  for (const auto& r : reps) {
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_GT(r.ratio, 0.0);
  }
  EXPECT_LT(drift(reps), 2.0);
}

TEST(KernelBound, LadderDrift) {
  const std::vector<double> ladder{64, 128, 256, 512, 1024, 2048, 4096};
  for (auto [j, k] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{1, 2}, std::pair{2, 1}}) {
    const auto reps = kernel_bound_check(j, k, ladder, 64);
    ASSERT_EQ(reps.size(), ladder.size());
    // The diagonal (u = 0) is in range and the +1 keeps every ratio finite.
    for (const auto& r : reps) EXPECT_TRUE(std::isfinite(r.ratio) && r.ratio > 0.0);
    EXPECT_LT(drift(reps), 2.0) << j << k;
  }
  EXPECT_THROW(kernel_bound_check(1, 1, ladder, 32), DomainError);
}

TEST(EvenReduction, EvenAndOdd) {
  SampledFunction f = random_function(Domain::kSymmetric, 32, 5);
  SampledFunction even = f, odd = f;
  for (std::size_t i = 0; i < 32; ++i) {
    even.values[i] = f.values[i] + f.values[31 - i];
    odd.values[i] = f.values[i] - f.values[31 - i];
  }
  const SampledFunction re = even_reduction(even), ro = even_reduction(odd);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(re.values[i], 2.0 * even.values[16 + i]);
    EXPECT_EQ(ro.values[i], cplx(0.0, 0.0));
  }
  EXPECT_THROW(even_reduction(random_function(Domain::kUnit, 8, 1)), DomainError);
}

TEST(EvenReduction, FullSquareMatchesReduced) {
  const double N = 256.0;
  for (std::uint64_t seed : {1u, 2u}) {
    const SampledFunction f = abs_of(random_function(Domain::kSymmetric, 64, seed));
    const SampledFunction g = abs_of(random_function(Domain::kSymmetric, 64, seed + 100));
    const double full = full_square_form(w_kernel(N), f, g);
    const SampledFunction fr = even_reduction(f), gr = even_reduction(g);
    const double reduced = std::abs(CellPairMatrix(w_kernel(N), 0.0, 1.0, 32).form(fr.values, gr.values));
    EXPECT_NEAR(full, reduced, 1e-8 * full) << seed;
  }
}

TEST(Young, ConstantsExact) {
  // f = g = h = 1, m = n = 1, (2,2,1): lhs = |B|^2 = 4, ||f||_2 = sqrt 2.
  const SampledFunction one = constant_function(Domain::kUnit, 16);
  const ProfileKernel h{[](double) { return 1.0; }, "1"};
  const auto rep = young_bilinear_check(one, one, h, 1, 1, {2.0, 2.0, 1.0});
  EXPECT_NEAR(rep.lhs, 4.0, 1e-12);
  EXPECT_NEAR(rep.ratio, 2.0, 1e-12);
}

TEST(Young, Preconditions) {
  const SampledFunction one = constant_function(Domain::kUnit, 8);
  const ProfileKernel h{[](double) { return 1.0; }, "1"};
  EXPECT_THROW(young_bilinear_check(one, one, h, 1, 1, {2.0, 2.0, 2.0}), DomainError);
  EXPECT_THROW(young_bilinear_check(one, one, h, 3, 2, {2.0, 2.0, 1.0}), DomainError);
}

TEST(Young, RandomTriplesBounded) {
  // Random step profiles h on [0,1] together with random f, g.
  const std::size_t M = 32;
  const std::vector<YoungExponents> exps{{2.0, 2.0, 1.0}, {1.5, 1.5, 1.5}, {1.0, 2.0, 2.0}};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const SampledFunction hv = random_function(Domain::kUnit, M, 7000 + seed);
    std::vector<double> hvals(M);
    for (std::size_t i = 0; i < M; ++i) hvals[i] = hv.values[i].real();
    const ProfileKernel h{[hvals, M](double z) { return hvals[std::min<std::size_t>(M - 1, z * M)]; }, "random"};
    const int n = 1 + seed % 3, m = 1 + seed % n;
    const YoungForm form(h, m, n, M);
    const SampledFunction f = random_function(Domain::kUnit, M, seed);
    const SampledFunction g = random_function(Domain::kUnit, M, seed + 500);
    const auto rep = young_bilinear_check(form, h, f, g, exps[seed % exps.size()]);
    EXPECT_TRUE(std::isfinite(rep.ratio));
    worst = std::max(worst, rep.ratio);
  }
  // Radial Young: the constant is a power of omega_{n-1} <= 4 pi.
  EXPECT_LT(worst, 4.0 * std::numbers::pi);
}

TEST(Young, EnergyKernelsStableInN) {
  const std::vector<double> ladder{64, 128, 256, 512, 1024, 2048, 4096};
  const SampledFunction f = random_function(Domain::kUnit, 128, 11);
  const SampledFunction g = random_function(Domain::kUnit, 128, 12);
  for (int which = 0; which < 2; ++which) {
    std::vector<InequalityReport> young, rate;
    for (double N : ladder) {
      const ProfileKernel h = which == 0 ? lorentzian_profile(N) : sqrt_profile(N);
      const YoungForm form(h, 2, 2, 128);
      auto rep = young_bilinear_check(form, h, f, g, {2.0, 2.0, 1.0}, N);
      young.push_back(rep);
      // \int_0^1 h ~ 1/N and ~ 1/sqrt N respectively.
      rep.ratio = rep.lhs * (which == 0 ? N : std::sqrt(N)) / (f.norm(2.0, 2) * g.norm(2.0, 2));
      rate.push_back(rep);
    }
    EXPECT_LT(drift(young), 2.0) << which;
    EXPECT_LT(drift(rate), 2.0) << which;
  }
}

TEST(Homogeneous, HilbertConstant) {
  const SingularKernel K = hilbert_kernel();
  const CellPairMatrix A(K, 0.0, 1.0, 64);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto rep = homogeneous_bilinear_check(K, A, random_function(Domain::kUnit, 64, seed),
                                                random_function(Domain::kUnit, 64, seed + 1000), 2.0);
    worst = std::max(worst, rep.ratio);
  }
  EXPECT_LE(worst, std::numbers::pi + 0.05);
  EXPECT_GT(worst, 0.1);
}

TEST(Homogeneous, Preconditions) {
  const HomogeneityPrecondition h = homogeneous_precondition(hilbert_kernel(), 2.0);
  EXPECT_TRUE(h.finite);
  EXPECT_NEAR(h.integral, std::numbers::pi, 1e-3);
  const SingularKernel bad{[](double x, double y) { return 1.0 / std::sqrt(x * y); },
                           [](double) { return std::vector<double>{}; }, "1/sqrt(xy)"};
  const SampledFunction f = random_function(Domain::kUnit, 16, 1);
  EXPECT_THROW(homogeneous_bilinear_check(bad, f, f, 2.0), DomainError);
  const SingularKernel inhomogeneous{[](double x, double y) { return 1.0 / (1.0 + x + y); },
                                     [](double) { return std::vector<double>{}; }, "1/(1+x+y)"};
  EXPECT_THROW(homogeneous_bilinear_check(inhomogeneous, f, f, 2.0), DomainError);
}

TEST(Bilinear, VMatchesHomogeneousForm) {
  const SampledFunction f = random_function(Domain::kSymmetric, 64, 3);
  const SampledFunction g = random_function(Domain::kSymmetric, 64, 4);
  const auto v = bilinear_V_check(f, g);
  const SampledFunction fr = even_reduction(abs_of(f)), gr = even_reduction(abs_of(g));
  const auto h = homogeneous_bilinear_check(inverse_sqrt_kernel(), fr, gr, 2.0);
  EXPECT_NEAR(v.lhs, h.lhs, 1e-12 * v.lhs);
  // Schur: ratio <= C with C = \int_0^\infty dz / (sqrt z sqrt|1 - z^2|),
  // and ||f_red||_2 <= sqrt 2 ||f||_2.
  const double C = homogeneous_precondition(inverse_sqrt_kernel(), 2.0).integral;
  EXPECT_LE(h.ratio, C * 1.001);
  EXPECT_LE(v.ratio, 2.0 * C * 1.001);
}

TEST(Bilinear, VConstantsConverge) {
  // f = g = 1: V = 4 \int\int_{[0,1]^2} = 8 \int_0^1 \int_0^x dy / sqrt(x^2 - y^2) dx = 4 pi.
  const SampledFunction one = constant_function(Domain::kSymmetric, 32);
  const auto v = bilinear_V_check(one, one);
  EXPECT_NEAR(v.lhs, 4.0 * std::numbers::pi, 1e-6);
}

TEST(Bilinear, VConcentratedNearDiagonal) {
  SampledFunction f{Domain::kSymmetric, std::vector<cplx>(128, 0.0)};
  f.values[95] = f.values[96] = 1.0;  // around x = 1/2
  const auto v = bilinear_V_check(f, f);
  EXPECT_TRUE(std::isfinite(v.ratio));
  const double C = homogeneous_precondition(inverse_sqrt_kernel(), 2.0).integral;
  EXPECT_LE(v.ratio, 2.0 * C);
}

TEST(Bilinear, VSeesModuli) {
  SampledFunction f = random_function(Domain::kSymmetric, 32, 8);
  const SampledFunction g = random_function(Domain::kSymmetric, 32, 9);
  const double base = bilinear_V_check(f, g).lhs;
  for (std::size_t i = 0; i < 16; ++i) f.values[i] = -f.values[i];
  EXPECT_EQ(bilinear_V_check(f, g).lhs, base);
}

TEST(Bilinear, WConstantAndRandom) {
  const std::vector<double> ladder{64, 128, 256, 512, 1024, 2048, 4096};
  const SampledFunction one = constant_function(Domain::kSymmetric, 128);
  const auto c = bilinear_W_check({{one, one}}, ladder);
  for (const auto& r : c) EXPECT_TRUE(std::isfinite(r.ratio));
  // f = g = 1 is not extremal: sqrt(N) W_N ~ (log N)^2 / sqrt(N) -> 0.
  EXPECT_LT(c.back().ratio, c.front().ratio);
  EXPECT_THROW(bilinear_W_check({{one, one}}, {64, 128, 256}), DomainError);
}

TEST(Bilinear, WSupportsOnOppositeSides) {
  SampledFunction f{Domain::kSymmetric, std::vector<cplx>(64, 0.0)};
  SampledFunction g = f;
  for (std::size_t i = 0; i < 32; ++i) {
    f.values[32 + i] = 1.0;
    g.values[i] = 1.0;
  }
  const SampledFunction one = constant_function(Domain::kSymmetric, 64);
  const std::vector<double> ladder{64, 128, 256, 512};
  const auto split = bilinear_W_check({{f, g}}, ladder);
  const auto same = bilinear_W_check({{f, f}}, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) EXPECT_NEAR(split[i].ratio, same[i].ratio, 1e-12 * same[i].ratio);
}

TEST(KernelK, SpectrumMatchesDirect) {
  for (int k = 1; k <= 2; ++k) {
    const KernelSpectrum spec(k, 3000.0);
    for (double u : {0.0, 0.37, 3.3, 11.2, -11.2, 47.9, 250.5, 1999.1, 2950.0}) {
      // u = N (x - y) with x, y in [0,1].
      const double N = 4000.0;
      const cplx ref = kernel_K(1, k, N, u >= 0 ? u / N : 0.0, u >= 0 ? 0.0 : -u / N);
      // Cubic Hermite error: step^4 / 384 * max |K''''|, with |K''''| <= \int s^4 psi (k = 1) or 1/9 (k = 2).
      const double tol = std::pow(spec.step(), 4) / 384.0 * (k == 1 ? 8.0 : 1.0 / 9.0) + 1e-12;
      EXPECT_LT(std::abs(spec(u) - ref), tol) << k << " u=" << u;
    }
  }
}
