#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "analytic.hpp"
#include "hecke.hpp"

namespace qhecke {

struct lvalue_options {
  double tail_tol = 1e-10;
  std::int64_t norm_budget = 200000000;  // largest ideal norm summed in B
  std::int64_t pair_budget = 200000000;  // largest N(n1 n2) summed in A
  bool interpolate = true;               // Chebyshev kernel tables instead of direct quadrature
  bool cap_at_budget = false;            // truncate at the budget (err widened) instead of throwing
};

struct sum_value {
  cplx value{0.0, 0.0};
  double err = 0.0;
  double tail = 0.0;  // truncation part of err
  std::int64_t cutoff = 0;
  std::int64_t terms = 0;
};

struct central_value_record {
  gint q{1};
  int omega = 0;
  double U = 1.0;
  cplx value{0.0, 0.0};
  double err = 0.0;
  cplx root_number{1.0, 0.0};
  std::int64_t terms_used = 0;
};

// Explicit counting bounds. Lattice points of norm <= x lie in a disc of radius sqrt(x) + 1/sqrt2.
inline double ideal_count_bound(double x) { return 0.7854 * x + 1.111 * std::sqrt(x) + 1.143; }

// Pairs of ideals with N(n1 n2) <= x, summing the bound above against sum 1/N and sum 1/sqrt N.
inline double ideal_pair_count_bound(double x) {
  double lx = std::log(std::max(x, 1.0));
  return 0.617 * x * lx + 5.94 * x + std::sqrt(x) * (0.62 * lx + 5.1) + 1.3;
}

namespace detail {

// int_{x0}^inf C(x) (-f'(x)) dx over geometric shells, C a counting bound, f decreasing.
template <class Count, class F>
double stieltjes_tail(double x0, const Count& count, const F& f) {
  double total = 0.0, x = x0, fx = f(x);
  for (int j = 0; j < 20000 && fx > 0.0; ++j) {
    double xn = x * 1.05, fn = f(xn);
    total += count(xn) * (fx - fn);
    if (count(xn) * fn < 1e-40) break;
    x = xn;
    fx = fn;
  }
  return total;
}

// Smallest cutoff on a geometric grid where the tail bound drops below tol.
template <class Tail>
std::int64_t find_cutoff(double scale, double tol, std::int64_t budget, const Tail& tail, double& tail_at) {
  double y = 0.5;
  for (;;) {
    double x = std::max(1.0, std::floor(y * scale));
    double t = tail(x);
    if (t <= tol || x >= static_cast<double>(budget)) {
      tail_at = t;
      return static_cast<std::int64_t>(std::min(x, static_cast<double>(budget)));
    }
    y *= 1.1;
  }
}

}  // namespace detail

// nu_{q,omega} on ideals, read off any generator x + iy (chi_q is trivial on units and lambda in the family).
class nu_evaluator {
 public:
  nu_evaluator(const hecke_spec& s) : omega_(s.omega), rs_(s.q) {
    quartic_character chi(s.q);
    table_ = chi.dense_table(rs_);
    if (chi.exponent(0, 1) != 0 || chi.exponent(1, 1) != 0)
      throw error(errc::not_in_family, "chi_q must be trivial on i and lambda");
  }

  cplx operator()(std::int64_t x, std::int64_t y) const {
    int e = table_[static_cast<std::size_t>(rs_.index(x, y))];
    if (e < 0) return 0.0;
    cplx c = quartic_value::from_exponent(e).to_complex();
    if (omega_ == 0) return c;
    bool odd = ((x + y) & 1) != 0;
    if (!odd && (omega_ % 4) != 0) return 0.0;
    if (odd) {
      // primary associate: imaginary part even, real + imaginary = 1 mod 4
      for (int k = 0; k < 4; ++k) {
        if ((y & 1) == 0 && mod_floor(x + y, std::int64_t(4)) == 1) break;
        std::int64_t t = x;
        x = -y;
        y = t;
      }
    }
    double r = std::sqrt(static_cast<double>(x * x + y * y));
    cplx u(static_cast<double>(x) / r, -static_cast<double>(y) / r);
    return c * unit_power(u, omega_);
  }

 private:
  static cplx unit_power(cplx u, int n) {
    if (n < 0) {
      u = std::conj(u);
      n = -n;
    }
    cplx r = 1.0;
    while (n) {
      if (n & 1) r *= u;
      u *= u;
      n >>= 1;
    }
    return r;
  }

  int omega_;
  residue_system rs_;
  std::vector<std::int8_t> table_;
};

// Accumulates S(a) = sum_{N(n) = a} nu(n) for a in [a0, a1), one generator per ideal (re > 0, im >= 0).
inline void norm_coefficients(const nu_evaluator& nu, std::int64_t a0, std::int64_t a1, std::vector<cplx>& S) {
  S.assign(static_cast<std::size_t>(a1 - a0), cplx(0.0));
  std::int64_t xmax = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(a1 - 1)));
  for (std::int64_t x = 1; x <= xmax; ++x) {
    std::int64_t x2 = x * x;
    std::int64_t ylo = 0;
    if (a0 > x2) {
      ylo = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(a0 - x2)));
      if (ylo * ylo + x2 < a0) ++ylo;
    }
    for (std::int64_t y = ylo;; ++y) {
      std::int64_t n = x2 + y * y;
      if (n >= a1) break;
      S[static_cast<std::size_t>(n - a0)] += nu(x, y);
    }
  }
}

inline void require_family(const hecke_spec& s) {
  if (is_trivial(s)) throw error(errc::trivial, "trivial character (q, omega) = (1, 0)");
  if (!is_squarefree(s.q)) throw error(errc::not_in_family, to_string(s.q) + " is not squarefree");
}

class kernel_source {
 public:
  kernel_source(kernel_kind kind, int omega, bool interpolate) : kind_(kind), omega_(omega) {
    if (interpolate) table_ = kernel_table_for(kind, omega);
  }
  kernel_eval operator()(double y) const { return table_ ? (*table_)(y) : kernel_direct(kind_, omega_, y); }

 private:
  kernel_kind kind_;
  int omega_;
  std::shared_ptr<const kernel_table> table_;
};

inline constexpr std::int64_t coefficient_block = 1 << 20;

// B_{omega,U}(q) for several U in one pass over the ideals.
inline std::vector<sum_value> B_values(const hecke_spec& s, const std::vector<double>& Us, const lvalue_options& opt = {}) {
  require_family(s);
  nu_evaluator nu(s);
  kernel_source V(kernel_kind::V, s.omega, opt.interpolate);
  auto env = kernel_envelope_for(kernel_kind::V, s.omega);
  const double root = 2.0 * std::sqrt(static_cast<double>(norm(s.q)) * static_cast<double>(norm(m_omega_generator(s.omega))));
  std::vector<sum_value> out(Us.size());
  std::vector<double> scale(Us.size());
  std::int64_t amax = 0;
  for (std::size_t j = 0; j < Us.size(); ++j) {
    if (!(Us[j] > 0)) throw error(errc::nonpositive_argument, "U must be positive");
    scale[j] = Us[j] * root;
    double Y = scale[j];
    auto f = [&](double x) { return (*env)(x / Y) / std::sqrt(x); };
    auto tail = [&](double x0) { return detail::stieltjes_tail(x0, ideal_count_bound, f); };
    double t = 0;
    out[j].cutoff = detail::find_cutoff(Y, opt.tail_tol, opt.norm_budget, tail, t);
    if (t > opt.tail_tol && !opt.cap_at_budget)
      throw error(errc::budget_exceeded, "B sum needs norms beyond " + std::to_string(opt.norm_budget));
    out[j].tail = t;
    amax = std::max(amax, out[j].cutoff);
  }
  std::vector<long double> re(Us.size(), 0), im(Us.size(), 0), er(Us.size(), 0);
  std::vector<cplx> S;
  for (std::int64_t a0 = 1; a0 <= amax; a0 += coefficient_block) {
    std::int64_t a1 = std::min(amax + 1, a0 + coefficient_block);
    norm_coefficients(nu, a0, a1, S);
    for (std::int64_t a = a0; a < a1; ++a) {
      cplx c = S[static_cast<std::size_t>(a - a0)];
      if (c == cplx(0.0)) continue;
      double inv = 1.0 / std::sqrt(static_cast<double>(a));
      for (std::size_t j = 0; j < Us.size(); ++j) {
        if (a > out[j].cutoff) continue;
        auto k = V(static_cast<double>(a) / scale[j]);
        re[j] += c.real() * inv * k.value;
        im[j] += c.imag() * inv * k.value;
        er[j] += std::abs(c) * inv * k.err;
        ++out[j].terms;
      }
    }
  }
  for (std::size_t j = 0; j < Us.size(); ++j) {
    out[j].value = cplx(static_cast<double>(re[j]), static_cast<double>(im[j]));
    out[j].err = static_cast<double>(er[j]) + out[j].tail + 1e-15 * std::abs(out[j].value);
  }
  return out;
}

inline sum_value B_value(const hecke_spec& s, double U, const lvalue_options& opt = {}) { return B_values(s, {U}, opt)[0]; }

// B~ summed on its own from conj(nu); equals conj(B) exactly in theory.
inline sum_value B_tilde(const hecke_spec& s, double U, const lvalue_options& opt = {}) {
  require_family(s);
  nu_evaluator nu(s);
  kernel_source V(kernel_kind::V, s.omega, opt.interpolate);
  auto b = B_value(s, U, opt);  // cutoff and tail bound
  const double Y = U * 2.0 * std::sqrt(static_cast<double>(norm(s.q)) * static_cast<double>(norm(m_omega_generator(s.omega))));
  long double re = 0, im = 0;
  std::int64_t xmax = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(b.cutoff)));
  for (std::int64_t x = 1; x <= xmax; ++x)
    for (std::int64_t y = 0; x * x + y * y <= b.cutoff; ++y) {
      cplx c = std::conj(nu(x, y));
      if (c == cplx(0.0)) continue;
      double n = static_cast<double>(x * x + y * y);
      double k = V(n / Y).value / std::sqrt(n);
      re += c.real() * k;
      im += c.imag() * k;
    }
  b.value = cplx(static_cast<double>(re), static_cast<double>(im));
  return b;
}

inline constexpr double central_U_values[3] = {0.25, 1.0, 4.0};

// L(1/2, nu) = B_U + W(nu) conj(B_{1/U}).
inline central_value_record central_value(const hecke_spec& s, double U = 1.0, const lvalue_options& opt = {},
                                          prime_gauss_cache& cache = default_prime_cache()) {
  require_family(s);
  auto w = root_number(s, cache);
  auto b = B_values(s, {U, 1.0 / U}, opt);
  central_value_record r;
  r.q = s.q;
  r.omega = s.omega;
  r.U = U;
  r.root_number = w.value;
  r.value = b[0].value + w.value * std::conj(b[1].value);
  r.err = b[0].err + std::abs(w.value) * b[1].err + w.err * std::abs(b[1].value);
  r.terms_used = b[0].terms + b[1].terms;
  return r;
}

// Records for several U sharing one pass over the ideals.
inline std::vector<central_value_record> central_values(const hecke_spec& s, const std::vector<double>& Us,
                                                        const lvalue_options& opt = {},
                                                        prime_gauss_cache& cache = default_prime_cache()) {
  require_family(s);
  auto w = root_number(s, cache);
  std::vector<double> all;
  for (double U : Us) {
    all.push_back(U);
    all.push_back(1.0 / U);
  }
  auto b = B_values(s, all, opt);
  std::vector<central_value_record> out;
  for (std::size_t j = 0; j < Us.size(); ++j) {
    const auto& b1 = b[2 * j];
    const auto& b2 = b[2 * j + 1];
    central_value_record r;
    r.q = s.q;
    r.omega = s.omega;
    r.U = Us[j];
    r.root_number = w.value;
    r.value = b1.value + w.value * std::conj(b2.value);
    r.err = b1.err + std::abs(w.value) * b2.err + w.err * std::abs(b2.value);
    r.terms_used = b1.terms + b2.terms;
    out.push_back(r);
  }
  return out;
}

struct a_value {
  double value = 0.0;
  double imag = 0.0;  // vanishes in exact arithmetic
  double err = 0.0;
  double tail = 0.0;
  std::int64_t cutoff = 0;
  std::int64_t pairs = 0;
};

// A_omega(q) = sum_{n1,n2} nu(n1) conj(nu(n2)) N(n1 n2)^{-1/2} W(N(n1 n2) / (4 N(q m))).
// Grouped by norms a = N(n1), b = N(n2); the a < b half is traversed with a <= sqrt(T) kept in memory
// and b streamed in blocks.
inline a_value A_value(const hecke_spec& s, const lvalue_options& opt = {}) {
  require_family(s);
  nu_evaluator nu(s);
  kernel_source W(kernel_kind::W, s.omega, opt.interpolate);
  auto env = kernel_envelope_for(kernel_kind::W, s.omega);
  const double Z = 4.0 * static_cast<double>(norm(s.q)) * static_cast<double>(norm(m_omega_generator(s.omega)));
  a_value out;
  {
    auto f = [&](double x) { return (*env)(x / Z) / std::sqrt(x); };
    auto tail = [&](double x0) { return detail::stieltjes_tail(x0, ideal_pair_count_bound, f); };
    double t = 0;
    out.cutoff = detail::find_cutoff(Z, opt.tail_tol, opt.pair_budget, tail, t);
    if (t > opt.tail_tol && !opt.cap_at_budget)
      throw error(errc::budget_exceeded, "A sum needs products beyond " + std::to_string(opt.pair_budget));
    out.tail = t;
  }
  const std::int64_t T = out.cutoff;
  const std::int64_t root = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(T)));
  struct small_coeff {
    std::int64_t a;
    cplx s;
  };
  std::vector<small_coeff> small;
  std::vector<cplx> S;
  norm_coefficients(nu, 1, root + 1, S);
  for (std::int64_t a = 1; a <= root; ++a) {
    cplx c = S[static_cast<std::size_t>(a - 1)];
    if (c != cplx(0.0)) small.push_back({a, c / std::sqrt(static_cast<double>(a))});
  }
  long double diag = 0, off_re = 0, off_im = 0, err = 0;
  for (auto& e : small) {
    auto k = W(static_cast<double>(e.a) * static_cast<double>(e.a) / Z);
    diag += std::norm(e.s) * k.value;
    err += std::norm(e.s) * k.err;
    ++out.pairs;
  }
  for (std::int64_t b0 = 2; b0 <= T; b0 += coefficient_block) {
    std::int64_t b1 = std::min(T + 1, b0 + coefficient_block);
    norm_coefficients(nu, b0, b1, S);
    for (std::int64_t b = b0; b < b1; ++b) {
      cplx cb = S[static_cast<std::size_t>(b - b0)];
      if (cb == cplx(0.0)) continue;
      cplx sb = std::conj(cb) / std::sqrt(static_cast<double>(b));
      std::int64_t amax = std::min(b - 1, T / b);
      long double ar = 0, ai = 0, ae = 0;
      for (auto& e : small) {
        if (e.a > amax) break;
        auto k = W(static_cast<double>(e.a) * static_cast<double>(b) / Z);
        ar += e.s.real() * k.value;
        ai += e.s.imag() * k.value;
        ae += std::abs(e.s) * k.err;
        ++out.pairs;
      }
      cplx acc(static_cast<double>(ar), static_cast<double>(ai));
      cplx t = acc * sb;
      off_re += t.real();
      off_im += t.imag();
      err += 2.0L * ae * std::abs(sb);
    }
  }
  out.value = static_cast<double>(diag + 2.0L * off_re);
  out.imag = 0.0;
  out.err = static_cast<double>(err) + out.tail + 1e-15 * std::abs(out.value);
  return out;
}

}  // namespace qhecke
