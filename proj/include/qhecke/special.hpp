#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace qhecke {

using cplx = std::complex<double>;

// log Gamma(z) for Re z > 0 (Lanczos, g = 7, nine terms; about 15 digits).
inline cplx lgamma_complex(cplx z) {
  static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // reflection keeps the series in its accurate half-plane
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  cplx x = c[0];
  for (int k = 1; k < 9; ++k) x += c[k] / (z + static_cast<double>(k));
  cplx t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// J0: power series (long double) for |x| <= 17, Hankel asymptotics beyond.
inline double bessel_j0(double x) {
  x = std::fabs(x);
  if (x <= 17.0) {
    long double q = -0.25L * x * x, term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<long double>(k) * k);
      sum += term;
      if (std::fabs(static_cast<double>(term)) < 1e-22L) break;
    }
    return static_cast<double>(sum);
  }
  // P = 1 - 9/(128x^2) + ..., Q = -1/(8x) + 75/(1024x^3) - ...; term magnitudes prod (2j-1)^2 / (k! (8x)^k)
  double p = 0, qs = 0, a = 1, prev = 1e300;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) a *= (2.0 * k - 1) * (2.0 * k - 1) / (8.0 * k * x);
    if (std::fabs(a) > prev) break;
    prev = std::fabs(a);
    int m = k % 4;
    if (m == 0) p += a;
    else if (m == 1) qs -= a;
    else if (m == 2) p -= a;
    else qs += a;
    if (std::fabs(a) < 1e-18) break;
  }
  double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - qs * std::sin(chi));
}

// Composite 20-point Gauss-Legendre on [a, b] with the given panel count.
template <class F>
auto gauss_legendre(const F& f, double a, double b, int panels) -> decltype(f(a)) {
  using R = decltype(f(a));
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = rule::abscissa();
  const auto& ws = rule::weights();
  R total{};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * h, half = 0.5 * h;
    R s{};
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] == 0.0) {
        s += ws[k] * f(mid);
      } else {
        s += ws[k] * (f(mid - half * xs[k]) + f(mid + half * xs[k]));
      }
    }
    total += half * s;
  }
  return total;
}

}  // namespace qhecke
