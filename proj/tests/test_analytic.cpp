#include <gtest/gtest.h>

#include <numbers>

#include <qhecke/qhecke.hpp>

using namespace qhecke;

namespace {

// Oracle: Stirling-series log Gamma (shifted by recurrence) and trapezoidal quadrature on Re w = 1.
cplx stirling_lgamma(cplx z) {
  cplx shift = 0.0;
  while (z.real() < 12.0) {
    shift -= std::log(z);
    z += 1.0;
  }
  cplx iz = 1.0 / z, iz2 = iz * iz;
  cplx series = iz * (1.0 / 12 - iz2 * (1.0 / 360 - iz2 * (1.0 / 1260 - iz2 * (1.0 / 1680))));
  return shift + (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double oracle_kernel(kernel_kind kind, int omega, double y, double sigma = 1.0) {
  const double a = 0.5 + 0.5 * std::abs(omega);
  const int power = kind == kernel_kind::V ? 1 : 2;
  const double lb = (kind == kernel_kind::V ? std::log(2.0 * std::numbers::pi) : std::log(4.0 * std::numbers::pi * std::numbers::pi)) +
                    std::log(y);
  const double h = 0.01;
  long double s = 0;
  for (int k = -1000; k <= 1000; ++k) {
    cplx w(sigma, h * k);
    cplx f = std::exp(-w * lb + w * w + static_cast<double>(power) * (stirling_lgamma(a + w) - stirling_lgamma(cplx(a)))) / w;
    s += f.real();
  }
  return static_cast<double>(s) * h / (2.0 * std::numbers::pi);
}

}  // namespace

TEST(Analytic, KernelsMatchIndependentQuadrature) {
  for (auto kind : {kernel_kind::V, kernel_kind::W})
    for (int omega : {0, 1, 2, 4})
      for (double y : {0.01, 0.3, 1.0, 5.0, 40.0}) {
        auto e = kernel_direct(kind, omega, y);
        ASSERT_NEAR(e.value, oracle_kernel(kind, omega, y), 1e-10 + e.err) << to_string(kind) << omega << " y=" << y;
      }
}

TEST(Analytic, KernelsTendToOneAtZero) {
  // The pole of Gamma(1/2 + w) at w = -1/2 gives V_0(y) = 1 - 2 e^{1/4} sqrt(2y) + O(y^{3/2}),
  // so the approach to 1 is at rate sqrt(y), not faster.
  for (double y : {1e-6, 1e-8}) {
    double pred = 1.0 - 2.0 * std::exp(0.25) * std::sqrt(2.0 * y);
    EXPECT_NEAR(V_omega(y, 0).value, pred, 100.0 * y);
  }
  EXPECT_NEAR(V_omega(1e-10, 0).value, 1.0, 1e-4);
  double prev = 1.0;
  for (double y : {1e-6, 1e-8, 1e-10, 1e-12, 1e-14}) {
    double d = std::abs(W_omega(y, 0).value - 1.0);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Analytic, KernelDecay) {
  // V_0(y) <= C_A (1 + y)^{-3} with C_A = 10
  for (double y : {10.0, 100.0, 1000.0}) EXPECT_LT(std::abs(V_omega(y, 0).value) * std::pow(1 + y, 3), 10.0);
  EXPECT_LT(std::abs(V_omega(1e4, 0).value), 1e-12);
}

TEST(Analytic, KernelsAreReal) {
  EXPECT_LT(std::abs(V_omega(1.0, 2).imag), 1e-10);
  for (int omega : {0, 1, 3, 4})
    for (double y : {0.1, 1.0, 10.0}) {
      EXPECT_LT(std::abs(V_omega(y, omega).imag), 1e-10);
      EXPECT_LT(std::abs(W_omega(y, omega).imag), 1e-10);
    }
}

TEST(Analytic, WidthGrowsWithFrequency) {
  double prev = 0.0;
  for (double y : {1.0, 3.0, 10.0, 30.0}) {
    double r = W_omega(y, 4).value / W_omega(y, 0).value;
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Analytic, StepHalvingStability) {
  // a second abscissa is an independent discretization of the same integral
  for (double y : {0.2, 2.0, 20.0}) {
    auto e = V_omega(y, 1);
    EXPECT_NEAR(oracle_kernel(kernel_kind::V, 1, y, 0.5), oracle_kernel(kernel_kind::V, 1, y, 1.5), 1e-11);
    EXPECT_NEAR(e.value, oracle_kernel(kernel_kind::V, 1, y, 0.5), 10 * e.err + 1e-11);
  }
}

TEST(Analytic, BoundAndEnvelopeDominateKernel) {
  for (auto kind : {kernel_kind::V, kernel_kind::W})
    for (int omega : {0, 1, 2, 3, 4}) {
      auto env = kernel_envelope_for(kind, omega);
      for (double u = -5; u <= 6; u += 0.37) {
        double y = std::exp(u);
        double v = std::abs(kernel_direct(kind, omega, y).value);
        ASSERT_LE(v, kernel_bound(kind, omega, y) * (1 + 1e-12));
        ASSERT_LE(v, (*env)(y) * (1 + 1e-12));
      }
    }
}

TEST(Analytic, TableAgreesWithDirect) {
  for (auto kind : {kernel_kind::V, kernel_kind::W})
    for (int omega : {0, 3}) {
      auto tab = kernel_table_for(kind, omega);
      for (double u = -8; u < 5; u += 0.173) {
        double y = std::exp(u);
        auto t = (*tab)(y);
        auto d = kernel_direct(kind, omega, y);
        ASSERT_LE(std::abs(t.value - d.value), t.err + d.err + 1e-14) << u;
      }
    }
}

TEST(Analytic, NonPositiveArgument) {
  try {
    V_omega(0.0, 0);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::nonpositive_argument);
  }
}

TEST(Analytic, SmoothingBump) {
  smoothing_bump F;
  EXPECT_EQ(F(1.0), 0.0);
  EXPECT_EQ(F(2.0), 0.0);
  EXPECT_NEAR(F(1.5), 1.0, 1e-15);
  for (double t = 0.9; t < 2.1; t += 0.01) {
    EXPECT_GE(F(t), 0.0);
    EXPECT_LE(F(t), 1.0);
  }
}

TEST(Analytic, MellinTransform) {
  cplx f0 = mellin_F(0.0);
  EXPECT_GT(f0.real(), 0.0);
  EXPECT_NEAR(f0.imag(), 0.0, 1e-15);
  // Simpson oracle for F^(0)
  const int n = 200000;
  long double s = 0;
  for (int k = 0; k <= n; ++k) {
    double t = 1.0 + static_cast<double>(k) / n;
    s += (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2)) * smoothing_bump::operator_value(t);
  }
  EXPECT_NEAR(f0.real(), static_cast<double>(s / (3.0L * n)), 1e-12);
  for (double t : {0.5, 3.0, 20.0}) EXPECT_LE(std::abs(mellin_F(cplx(0, t))), f0.real());
  // entire: derivative by Taylor step against the derivative integral
  for (cplx w : {cplx(0.0), cplx(1.0, 2.0), cplx(-0.5, 5.0)}) {
    const double h = 1e-3;
    cplx fd = (mellin_F(w + h) - mellin_F(w - h)) / (2 * h);
    cplx exact = gauss_legendre([w](double t) -> cplx { return smoothing_bump::operator_value(t) * std::log(t) * std::exp(w * std::log(t)); },
                                1.0, 2.0, 64);
    EXPECT_LT(std::abs(fd - exact), 1e-6);
  }
}

TEST(Analytic, BesselJ0) {
  EXPECT_EQ(bessel_j0(0.0), 1.0);
  EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-10);
  for (double x : {1.0, 7.3, 11.9, 12.1, 30.0, 250.0}) {
    double q = gauss_legendre([x](double th) { return std::cos(x * std::cos(th)); }, 0.0, 2.0 * std::numbers::pi, 200) /
               (2.0 * std::numbers::pi);
    EXPECT_NEAR(bessel_j0(x), q, 1e-10) << x;
  }
}

TEST(Analytic, PoissonPlainGaussian) {
  poisson_params p;
  auto r = poisson_verify(poisson_level::plain, p);
  EXPECT_LT(r.discrepancy, 1e-12);
  EXPECT_GT(r.lhs.real(), 1.0);
}

TEST(Analytic, PoissonPeriodicReducesToPlain) {
  poisson_params p;
  p.M = 3.0;
  p.psi = psi_kind::trivial;
  auto a = poisson_verify(poisson_level::plain, p);
  auto b = poisson_verify(poisson_level::periodic, p);
  EXPECT_LT(std::abs(a.lhs - b.lhs), 1e-12);
  EXPECT_LT(std::abs(a.rhs - b.rhs), 1e-12);
}

TEST(Analytic, PoissonPeriodicCharacters) {
  for (auto f : {test_function::gaussian, test_function::bump})
    for (gint q : {gint(-3), gint(-1, 2), gint(3, 2)})
      for (auto psi : {psi_kind::character, psi_kind::indicator}) {
        poisson_params p;
        p.f = f;
        p.M = f == test_function::bump ? 40.0 : 5.0;
        p.q = q;
        p.c = gint(2, 1);
        p.psi = psi;
        auto r = poisson_verify(poisson_level::periodic, p);
        EXPECT_LT(r.discrepancy, 1e-8) << to_string(f) << " " << to_string(q);
      }
}

TEST(Analytic, PoissonCongruenceLevel) {
  poisson_params p;
  p.M = 10.0;
  p.q = gint(-3);
  p.c = gint(1);
  p.psi = psi_kind::character;
  auto r = poisson_verify(poisson_level::congruence, p);
  EXPECT_LT(r.discrepancy, 1e-8);
}

TEST(Analytic, PoissonDiscrepancyShrinksWithCutoff) {
  poisson_params p;
  p.f = test_function::bump;
  p.M = 30.0;
  p.q = gint(-1, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {0.05, 0.1, 0.2}) {
    p.cutoff_scale = scale;
    double d = poisson_verify(poisson_level::periodic, p).discrepancy;
    EXPECT_LE(d, prev * (1 + 1e-9) + 1e-13);
    prev = d;
  }
}

TEST(Analytic, PoissonBudget) {
  poisson_params p;
  p.f = test_function::bump;
  p.M = 0.01;
  p.budget = 1000;
  try {
    poisson_verify(poisson_level::plain, p);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::budget_exceeded);
  }
}
