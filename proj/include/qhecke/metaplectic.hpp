#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "moments.hpp"

namespace qhecke {

// Truncated psi_alpha(r, s, xi; v) = sum_{c = v mod 4, (c, alpha) = 1, N(c) <= cutoff} g4(r, c) xi(c) N(c)^{-s}.
struct psi_eval {
  cplx s{0.0, 0.0};
  cplx partial{0.0, 0.0};
  double tail_bound = 0.0;  // terms with N(c) > cutoff
  double err = 0.0;         // rounding and Gauss-sum error of the partial sum
  std::int64_t cutoff = 0;
  std::int64_t terms = 0;

  double bound() const { return tail_bound + err; }
};

inline constexpr double psi_min_re_s = 1.6;

namespace detail {

inline void require_psi_region(cplx s) {
  if (!(s.real() >= psi_min_re_s))
    throw error(errc::region, "Re s = " + std::to_string(s.real()) + " < " + std::to_string(psi_min_re_s));
}

inline void require_primary_arg(const gint& z, const char* what) {
  if (!is_primary(z)) throw error(errc::hypothesis_violated, std::string(what) + " = " + to_string(z) + " is not primary");
}

// Distinct prime factors of a squarefree primary element, as primary generators.
inline std::vector<gint> squarefree_primes(const gint& a, errc code = errc::not_squarefree) {
  std::vector<gint> out;
  if (a == gint(1)) return out;
  for (auto& [p, e] : factor(a).factors) {
    if (e > 1) throw error(code, to_string(a) + " is not squarefree");
    out.push_back(primary(p));
  }
  return out;
}

// sum_{c = v mod 4, N(c) > X} N(c)^{-a}, a > 1. The number of such c with N(c) <= t is at most
// (pi/16)(sqrt t + 2 sqrt 2)^2, since each lies in its own 4x4 cell inside the disk of radius sqrt t + 2 sqrt 2.
inline double lattice4_power_tail(double X, double a) {
  const double c = std::numbers::pi / 16.0;
  return c * a *
         (std::pow(X, 1.0 - a) / (a - 1.0) + 4.0 * std::numbers::sqrt2 * std::pow(X, 0.5 - a) / (a - 0.5) +
          8.0 * std::pow(X, -a) / a);
}

// sum over ideals of norm > X of N^{-sigma}, sigma > 1, through the ideal counting bound.
inline double ideal_power_tail(double X, double sigma) {
  return sigma * (0.7854 * std::pow(X, 1.0 - sigma) / (sigma - 1.0) +
                  1.111 * std::pow(X, 0.5 - sigma) / (sigma - 0.5) + 1.143 * std::pow(X, -sigma) / sigma);
}

// Bound for |g4(r, c)| / sqrt N(c): sqrt N(gcd(lambda^2 r, c)) <= sqrt N(odd part of lambda^2 r).
inline double gauss_twist_factor(const lam2_elem& r) {
  gint odd = r.num;
  strip_lambda(odd);
  return std::sqrt(static_cast<double>(norm(odd)));
}

inline cplx norm_pow(std::int64_t n, cplx s) { return std::exp(-s * std::log(static_cast<double>(n))); }

inline int mobius_mask(std::size_t mask) {
  return (std::popcount(mask) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

// alpha given by its distinct prime factors, so that huge products stay representable.
inline psi_eval psi_truncated_primes(const std::vector<gint>& alpha_primes, const lam2_elem& r, cplx s, int omega,
                                     const gint& v, std::int64_t cutoff,
                                     prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_psi_region(s);
  if (r.is_zero()) throw error(errc::zero, "r = 0");
  detail::require_primary_arg(v, "v");
  if (cutoff < 1) throw error(errc::region, "cutoff < 1");
  psi_eval out;
  out.s = s;
  out.cutoff = cutoff;
  const double R = std::sqrt(static_cast<double>(cutoff)) + 1.0;
  const std::int64_t tmax = static_cast<std::int64_t>((R + std::abs(static_cast<double>(v.re)) + std::abs(static_cast<double>(v.im))) / 4.0) + 1;
  long double sr = 0, si = 0, mag = 0, gerr = 0;
  for (std::int64_t a = -tmax; a <= tmax; ++a) {
    for (std::int64_t b = -tmax; b <= tmax; ++b) {
      gint c(v.re + 4 * a, v.im + 4 * b);
      std::int64_t n = norm(c);
      if (n > cutoff) continue;
      bool coprime = true;
      for (auto& p : alpha_primes)
        if (divides(p, c)) {
          coprime = false;
          break;
        }
      if (!coprime) continue;
      auto g = gauss4_fast(r, c, cache);
      if (g.value == cplx(0.0) && g.err == 0.0) continue;
      cplx w = detail::norm_pow(n, s);
      cplx term = g.value * xi_eval(c, omega) * w;
      sr += term.real();
      si += term.imag();
      mag += std::abs(term);
      gerr += g.err * std::abs(w);
      ++out.terms;
    }
  }
  out.partial = cplx(static_cast<double>(sr), static_cast<double>(si));
  out.err = static_cast<double>(gerr) + 1e-15 * static_cast<double>(mag);
  const double a = s.real() - 0.5;
  out.tail_bound = detail::gauss_twist_factor(r) * detail::lattice4_power_tail(static_cast<double>(cutoff), a);
  return out;
}

inline psi_eval psi_truncated(const gint& alpha, const lam2_elem& r, cplx s, int omega, const gint& v, std::int64_t cutoff,
                              prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_primary_arg(alpha, "alpha");
  return psi_truncated_primes(detail::squarefree_primes(alpha), r, s, omega, v, cutoff, cache);
}

// Delta_alpha(s, xi) = prod_{pi | alpha} (1 - N(pi)^{3-4s} xi(pi)^4).
inline cplx delta_factor(const gint& alpha, cplx s, int omega) {
  detail::require_primary_arg(alpha, "alpha");
  cplx out = 1.0;
  for (auto& p : detail::squarefree_primes(alpha)) {
    double n = static_cast<double>(norm(p));
    out *= 1.0 - std::exp((3.0 - 4.0 * s) * std::log(n)) * infinity_type(p, 4 * omega);
  }
  return out;
}

// Delta*_alpha(r, s, xi) = prod_{pi | alpha} (1 + g2(r/pi, pi) N(pi)^{1-2s} xi(pi)^2), g2(r/pi, pi) = 0 if pi does not divide r.
inline gauss_value delta_star(const gint& alpha, const lam2_elem& r, cplx s, int omega,
                              prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_primary_arg(alpha, "alpha");
  detail::err_product out;
  out.mul_exact(1.0);
  for (auto& p : detail::squarefree_primes(alpha)) {
    if (!divides(p, r.num)) continue;
    auto g = gauss2_fast(lam2_elem::over_lambda2(exact_div(r.num, p)), p, cache);
    double n = static_cast<double>(norm(p));
    cplx w = std::exp((1.0 - 2.0 * s) * std::log(n)) * infinity_type(p, 2 * omega);
    out.mul({1.0 + g.value * w, g.err * std::abs(w)});
  }
  return {out.value, out.err};
}

enum class reduction_part { i, ii, iii, iv };

// Sign in the d-sum of part (iv): (-1)^{C(d, dv)} = chi_d(-1) (-1)^{C(d, v)}, or the uncorrected (-1)^{C(d, v)},
// which breaks the identity whenever d has a prime factor of norm 5 mod 8.
enum class reduction_sign { corrected, uncorrected };

inline std::string to_string(reduction_part p) {
  switch (p) {
    case reduction_part::i: return "i";
    case reduction_part::ii: return "ii";
    case reduction_part::iii: return "iii";
    case reduction_part::iv: return "iv";
  }
  return "?";
}

struct identity_check {
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double discrepancy = 0.0;
  double bound = 0.0;  // combined truncation and rounding bound of both sides
  std::int64_t psi_calls = 0;
  bool pass() const { return discrepancy <= bound; }
};

namespace detail {

// Accumulates coef * psi with its error contribution.
struct psi_side {
  cplx value{0.0, 0.0};
  double bound = 0.0;
  std::int64_t calls = 0;

  void add(cplx coef, double coef_err, const psi_eval& p) {
    value += coef * p.partial;
    bound += std::abs(coef) * p.bound() + coef_err * (std::abs(p.partial) + p.bound());
    ++calls;
  }
};

inline identity_check finish(const psi_side& l, const psi_side& r) {
  identity_check out;
  out.lhs = l.value;
  out.rhs = r.value;
  out.discrepancy = std::abs(l.value - r.value);
  out.bound = l.bound + r.bound + 1e-14 * (std::abs(l.value) + std::abs(r.value));
  out.psi_calls = l.calls + r.calls;
  return out;
}

inline std::vector<gint> concat(std::vector<gint> a, const std::vector<gint>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline gint product_all(const std::vector<gint>& ps) {
  gint out(1);
  for (auto& p : ps) out = out * p;
  return out;
}

inline double norm_d(const gint& z) { return static_cast<double>(norm(z)); }

}  // namespace detail

inline identity_check verify_reduction(reduction_part part, const gint& alpha, const gint& beta, const lam2_elem& r, cplx s,
                                     int omega, const gint& v, std::int64_t cutoff,
                                     reduction_sign sign = reduction_sign::corrected,
                                     prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_psi_region(s);
  detail::require_primary_arg(alpha, "alpha");
  detail::require_primary_arg(beta, "beta");
  detail::require_primary_arg(v, "v");
  if (r.is_zero()) throw error(errc::hypothesis_violated, "r = 0");
  auto ap = detail::squarefree_primes(alpha, errc::hypothesis_violated);
  if (!is_unit(gcd(alpha, beta * r.num)))
    throw error(errc::hypothesis_violated, "(alpha, beta r) != 1");
  std::vector<gint> bp;
  for (auto& [p, e] : factor(beta).factors) bp.push_back(primary(p));
  const auto abp = detail::concat(ap, bp);
  const cplx D = delta_factor(alpha, s, omega);
  const gint a2 = alpha * alpha;
  detail::psi_side L, R;
  switch (part) {
    case reduction_part::i: {
      lam2_elem x = r * (a2 * alpha);
      L.add(D, 1e-16, psi_truncated_primes(abp, x, s, omega, v, cutoff, cache));
      R.add(1.0, 0.0, psi_truncated_primes(bp, x, s, omega, v, cutoff, cache));
      break;
    }
    case reduction_part::iii: {
      lam2_elem x = r * alpha;
      auto ds = delta_star(alpha, x, s, omega, cache);
      L.add(ds.value, ds.err, psi_truncated_primes(abp, x, s, omega, v, cutoff, cache));
      R.add(1.0, 0.0, psi_truncated_primes(bp, x, s, omega, v, cutoff, cache));
      break;
    }
    case reduction_part::ii: {
      lam2_elem x = r * a2;
      L.add(D, 1e-16, psi_truncated_primes(abp, x, s, omega, v, cutoff, cache));
      for (std::size_t mask = 0; mask < (std::size_t(1) << ap.size()); ++mask) {
        gint d = detail::product_of(ap, mask);
        lam2_elem xd = lam2_elem::over_lambda2(exact_div(x.num, d * d));
        auto g = gauss4_fast(xd, d, cache);
        double nd = detail::norm_d(d);
        cplx coef = static_cast<double>(detail::mobius_mask(mask) * reciprocity_sign(d, v)) *
                    quartic_symbol_fast(gint(-1), d).to_complex() * infinity_type(d, 3 * omega) *
                    std::exp((2.0 - 3.0 * s) * std::log(nd)) * std::conj(g.value);
        double cerr = g.err * std::abs(std::exp((2.0 - 3.0 * s) * std::log(nd)));
        R.add(coef, cerr, psi_truncated_primes(bp, xd, s, omega, d * v, cutoff, cache));
      }
      break;
    }
    case reduction_part::iv: {
      L.add(D, 1e-16, psi_truncated_primes(abp, r, s, omega, v, cutoff, cache));
      for (std::size_t mask = 0; mask < (std::size_t(1) << ap.size()); ++mask) {
        gint d = detail::product_of(ap, mask);
        auto g = gauss4_fast(r, d, cache);
        double nd = detail::norm_d(d);
        cplx w = std::exp(-s * std::log(nd));
        int sg = reciprocity_sign(d, sign == reduction_sign::corrected ? d * v : v);
        cplx coef = static_cast<double>(detail::mobius_mask(mask) * sg) *
                    infinity_type(d, omega) * w * g.value;
        R.add(coef, g.err * std::abs(w), psi_truncated_primes(bp, r * (d * d), s, omega, d * v, cutoff, cache));
      }
      break;
    }
  }
  return detail::finish(L, R);
}

// psi_{abcd}(a b^2 c^3 r) Delta*_a(acr) Delta_{bcd} against the double divisor sum over e | b, f | d.
// Composing parts (i)-(iv) gives the sign (-1)^{C(e, v) + C(f, efv)}.
inline identity_check verify_twisted_reduction(const gint& a, const gint& b, const gint& c, const gint& d, const lam2_elem& r,
                                         cplx s, int omega, const gint& v, std::int64_t cutoff,
                                         reduction_sign sign = reduction_sign::corrected,
                                         prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_psi_region(s);
  for (auto* z : {&a, &b, &c, &d}) detail::require_primary_arg(*z, "a, b, c, d");
  detail::require_primary_arg(v, "v");
  if (r.is_zero()) throw error(errc::hypothesis_violated, "r = 0");
  const gint abcd = a * b * c * d;
  auto all = detail::squarefree_primes(abcd, errc::hypothesis_violated);
  if (!is_unit(gcd(abcd, r.num))) throw error(errc::hypothesis_violated, "(abcd, r) != 1");
  auto bp = detail::squarefree_primes(b), dp = detail::squarefree_primes(d);
  const lam2_elem x = r * (a * b * b * c * c * c);

  detail::psi_side L, R;
  auto ds = delta_star(a, r * (a * c), s, omega, cache);
  cplx coefL = ds.value * delta_factor(b * c * d, s, omega);
  L.add(coefL, ds.err, psi_truncated_primes(all, x, s, omega, v, cutoff, cache));
  for (std::size_t em = 0; em < (std::size_t(1) << bp.size()); ++em) {
    gint e = detail::product_of(bp, em);
    lam2_elem xe = lam2_elem::over_lambda2(exact_div(x.num, e * e));
    auto ge = gauss4_fast(xe, e, cache);
    for (std::size_t fm = 0; fm < (std::size_t(1) << dp.size()); ++fm) {
      gint f = detail::product_of(dp, fm);
      gint ef = e * f;
      auto gf = gauss4_fast(xe, f, cache);
      double ne = detail::norm_d(e), nef3 = detail::norm_d(e * e * ef);
      cplx w = ne * ne * std::exp(-s * std::log(nef3));
      int mu = detail::mobius_mask(em) * detail::mobius_mask(fm);
      int sg = sign == reduction_sign::corrected ? reciprocity_sign(e, v) * reciprocity_sign(f, ef * v)
                                                 : reciprocity_sign(ef, v);
      cplx coef = static_cast<double>(mu * sg) * quartic_symbol_fast(gint(-1), e).to_complex() *
                  infinity_type(e, 3 * omega) * infinity_type(f, omega) * w * std::conj(ge.value) * gf.value;
      double cerr = std::abs(w) * (ge.err * (std::abs(gf.value) + gf.err) + gf.err * std::abs(ge.value));
      R.add(coef, cerr, psi_truncated_primes({}, xe * (f * f), s, omega, ef * v, cutoff, cache));
    }
  }
  return detail::finish(L, R);
}

// zeta_lambda(s, xi) = sum over primary c of xi(c)^4 N(c)^{-s}, truncated at N(c) <= X.
inline psi_eval zeta_lambda_sum(cplx s, int omega, std::int64_t X) {
  if (!(s.real() > 1.0)) throw error(errc::region, "Re s <= 1");
  psi_eval out;
  out.s = s;
  out.cutoff = X;
  long double sr = 0, si = 0, mag = 0;
  for (auto& e : ideal_stream(X)) {
    if (e.norm % 2 == 0) continue;
    cplx t = infinity_type(e.odd_part, 4 * omega) * detail::norm_pow(e.norm, s);
    sr += t.real();
    si += t.imag();
    mag += std::abs(t);
    ++out.terms;
  }
  out.partial = cplx(static_cast<double>(sr), static_cast<double>(si));
  out.err = 1e-15 * static_cast<double>(mag);
  out.tail_bound = detail::ideal_power_tail(static_cast<double>(X), s.real());
  return out;
}

// Closed form L(s, xi^4)(1 - xi^4(lambda) 2^{-s}), with L(s, xi^4) as an Euler product over prime ideals of norm <= P.
inline euler_value zeta_lambda_closed(cplx s, int omega, std::int64_t P) {
  const double sigma = s.real();
  if (!(sigma >= psi_min_re_s)) throw error(errc::region, "Re s < 1.6");
  cplx x_lambda = infinity_type(gint(1, 1), 4 * omega) * std::exp(-s * std::log(2.0));
  std::complex<long double> prod = 1.0L / (1.0L - std::complex<long double>(x_lambda));
  euler_value out;
  out.cutoff = P;
  for (auto& p : odd_prime_ideals(P)) {
    cplx x = infinity_type(p.pi, 4 * omega) * detail::norm_pow(p.norm, s);
    prod /= 1.0L - std::complex<long double>(x);
    ++out.primes;
  }
  prod *= 1.0L - std::complex<long double>(x_lambda);
  out.value = cplx(static_cast<double>(prod.real()), static_cast<double>(prod.imag()));
  // |log (1 - x)^{-1}| <= 1.09 |x| for |x| <= 5^{-1.6}
  double t = detail::ideal_power_tail(static_cast<double>(P), sigma);
  out.tail_bound = std::abs(out.value) * std::expm1(1.09 * t) + 1e-15 * static_cast<double>(out.primes) * std::abs(out.value);
  return out;
}

// Hypothesis-satisfying parameter tuples for the identity suite.
struct reduction_tuple {
  gint alpha, beta;
  lam2_elem r;
  gint v;
  int omega;
};

struct twisted_tuple {
  gint a, b, c, d;
  lam2_elem r;
  gint v;
  int omega;
};

inline std::vector<reduction_tuple> reduction_matrix() {
  const gint p5(-1, -2), p5b(-1, 2), p9(-3, 0), p13(3, 2), p13b(3, -2), p17(1, 4), p29(-5, 2);
  auto I = [](const gint& z) { return lam2_elem::integral(z); };
  auto H = [](const gint& z) { return lam2_elem::over_lambda2(z); };
  return {
      {p9, gint(1), I(gint(1)), gint(1), 0},
      {p5, p9, I(gint(1)), gint(1), 0},
      {p5, p9, H(gint(1)), gint(1), 1},
      {p5b, p13, I(gint(0, 1)), gint(-3), 2},
      {p13, p5, H(gint(3, 0)), gint(1), 4},
      {p5 * p13, gint(1), I(gint(1)), gint(1), 0},
      {p5 * p13, p9, H(gint(1, 1)), gint(5), 1},
      {p9 * p5b, p13b, I(gint(2, -1)), gint(1), 3},
      {p17, p5 * p5, I(gint(1)), gint(-3), 0},
      {p17, p9, H(gint(7, 0)), gint(1), 4},
      {p29, p5, I(gint(-1)), gint(1), 2},
      {p29, gint(1), H(gint(1)), gint(-3, 4), 0},
      {p13b, p17, I(gint(3, 2)), gint(1), 1},
      {p5b * p17, p9, I(gint(1)), gint(1), 0},
      {p9, p5 * p13, H(gint(2, 1)), gint(-3), 4},
      {p5, p5b, I(gint(1)), gint(1), 0},
      {p13, gint(1), I(gint(1, 0)), gint(1, 4), -1},
      {p5 * p9, p29, H(gint(1, 0)), gint(1), 2},
      {p17, p13 * p13b, I(gint(0, -1)), gint(1), 5},
      {p5 * p5b * p9, gint(1), I(gint(1)), gint(1), 0},
  };
}

inline std::vector<twisted_tuple> twisted_matrix() {
  const gint one(1), p5(-1, -2), p5b(-1, 2), p9(-3, 0), p13(3, 2), p17(1, 4);
  auto I = [](const gint& z) { return lam2_elem::integral(z); };
  auto H = [](const gint& z) { return lam2_elem::over_lambda2(z); };
  return {
      {one, one, one, one, I(one), one, 0},
      {p9, one, one, one, I(one), one, 0},
      {one, p5, one, one, I(one), one, 0},
      {one, one, p5, one, H(one), one, 1},
      {one, one, one, p9, I(gint(0, 1)), gint(-3), 4},
      {p5, p9, one, one, I(one), one, 2},
      {one, p5, p13, p9, H(gint(1, 1)), one, 0},
      {p13, p5b, one, p17, I(one), gint(5), 1},
      {p5, one, p9, p13, H(gint(7)), one, 4},
      {one, p5 * p13, one, p9, I(one), one, 0},
      {one, one, one, p5, I(one), one, 0},
      {one, p5b, one, p13, I(one), one, 1},
      {p9, p13, one, p5, I(one), one, 4},
      {one, one, one, p5 * p17, H(gint(3)), gint(5), 2},
  };
}

}  // namespace qhecke
