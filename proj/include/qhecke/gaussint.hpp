#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"
#include "integer.hpp"

namespace qhecke {

template <class T>
struct gaussian {
  T re{};
  T im{};

  gaussian() = default;
  gaussian(T r) : re(std::move(r)), im(0) {}
  gaussian(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(const gaussian& a, const gaussian& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const gaussian& a, const gaussian& b) { return !(a == b); }
};

using gint = gaussian<std::int64_t>;
using big_gint = gaussian<mpz_class>;

template <class T>
using wide_t = typename int_traits<T>::wide;

template <class T>
gaussian<T> operator+(const gaussian<T>& a, const gaussian<T>& b) {
  return {int_traits<T>::narrow(wide_t<T>(a.re) + wide_t<T>(b.re)), int_traits<T>::narrow(wide_t<T>(a.im) + wide_t<T>(b.im))};
}
template <class T>
gaussian<T> operator-(const gaussian<T>& a, const gaussian<T>& b) {
  return {int_traits<T>::narrow(wide_t<T>(a.re) - wide_t<T>(b.re)), int_traits<T>::narrow(wide_t<T>(a.im) - wide_t<T>(b.im))};
}
template <class T>
gaussian<T> operator-(const gaussian<T>& a) {
  return {T(-a.re), T(-a.im)};
}
template <class T>
gaussian<T> operator*(const gaussian<T>& a, const gaussian<T>& b) {
  using W = wide_t<T>;
  W r = W(a.re) * W(b.re) - W(a.im) * W(b.im);
  W i = W(a.re) * W(b.im) + W(a.im) * W(b.re);
  return {int_traits<T>::narrow(r), int_traits<T>::narrow(i)};
}
template <class T>
gaussian<T>& operator*=(gaussian<T>& a, const gaussian<T>& b) {
  return a = a * b;
}
template <class T>
gaussian<T>& operator+=(gaussian<T>& a, const gaussian<T>& b) {
  return a = a + b;
}
template <class T>
gaussian<T>& operator-=(gaussian<T>& a, const gaussian<T>& b) {
  return a = a - b;
}

template <class T>
gaussian<T> conj(const gaussian<T>& z) {
  return {z.re, T(-z.im)};
}

template <class T>
wide_t<T> norm_wide(const gaussian<T>& z) {
  using W = wide_t<T>;
  return W(z.re) * W(z.re) + W(z.im) * W(z.im);
}

template <class T>
T norm(const gaussian<T>& z) {
  return int_traits<T>::narrow(norm_wide(z));
}

// Lexicographic order by (norm, re, im): the canonical ordering of factors and streams.
template <class T>
bool norm_less(const gaussian<T>& a, const gaussian<T>& b) {
  auto na = norm_wide(a), nb = norm_wide(b);
  if (na != nb) return na < nb;
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

template <class T>
gaussian<T> unit_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {T(1), T(0)};
    case 1: return {T(0), T(1)};
    case 2: return {T(-1), T(0)};
    default: return {T(0), T(-1)};
  }
}

template <class T>
gaussian<T> lambda() {
  return {T(1), T(1)};
}

template <class T>
gaussian<T> pow(gaussian<T> b, unsigned e) {
  gaussian<T> r(T(1));
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

template <class T>
gaussian<T> lambda_pow(unsigned k) {
  return pow(lambda<T>(), k);
}

// Quotient rounded to the nearest lattice point, so N(remainder) <= N(b)/2.
template <class T>
std::pair<gaussian<T>, gaussian<T>> divmod(const gaussian<T>& a, const gaussian<T>& b) {
  using W = wide_t<T>;
  W n = norm_wide(b);
  if (n == 0) throw error(errc::zero, "division by zero");
  W xr = W(a.re) * W(b.re) + W(a.im) * W(b.im);
  W xi = W(a.im) * W(b.re) - W(a.re) * W(b.im);
  gaussian<T> q(int_traits<T>::narrow(round_div(xr, n)), int_traits<T>::narrow(round_div(xi, n)));
  return {q, a - q * b};
}

template <class T>
gaussian<T> mod(const gaussian<T>& a, const gaussian<T>& b) {
  return divmod(a, b).second;
}

template <class T>
bool divides(const gaussian<T>& d, const gaussian<T>& a) {
  using W = wide_t<T>;
  W n = norm_wide(d);
  if (n == 0) return a.is_zero();
  W xr = W(a.re) * W(d.re) + W(a.im) * W(d.im);
  W xi = W(a.im) * W(d.re) - W(a.re) * W(d.im);
  return mod_floor(xr, n) == 0 && mod_floor(xi, n) == 0;
}

template <class T>
gaussian<T> exact_div(const gaussian<T>& a, const gaussian<T>& d) {
  using W = wide_t<T>;
  W n = norm_wide(d);
  if (n == 0) throw error(errc::zero, "division by zero");
  W xr = W(a.re) * W(d.re) + W(a.im) * W(d.im);
  W xi = W(a.im) * W(d.re) - W(a.re) * W(d.im);
  if (mod_floor(xr, n) != 0 || mod_floor(xi, n) != 0) throw error(errc::not_coprime, "inexact division");
  return {int_traits<T>::narrow(W(xr / n)), int_traits<T>::narrow(W(xi / n))};
}

template <class T>
bool is_odd(const gaussian<T>& z) {
  // lambda | a+bi iff a+b is even
  return ((z.re + z.im) % 2) != 0;
}

template <class T>
gaussian<T> div_lambda(const gaussian<T>& z) {
  // (a+bi)/(1+i) = ((a+b) + (b-a)i)/2
  using W = wide_t<T>;
  return {int_traits<T>::narrow(W(W(z.re) + W(z.im)) / 2), int_traits<T>::narrow(W(W(z.im) - W(z.re)) / 2)};
}

// Strips the full lambda-power; returns the exponent.
template <class T>
int strip_lambda(gaussian<T>& z) {
  if (z.is_zero()) throw error(errc::zero, "lambda valuation of zero");
  int k = 0;
  while (!is_odd(z)) {
    z = div_lambda(z);
    ++k;
  }
  return k;
}

template <class T>
bool is_primary(const gaussian<T>& z) {
  // (z-1) divisible by lambda^3 = -2+2i
  return divides(gaussian<T>(T(-2), T(2)), z - gaussian<T>(T(1)));
}

template <class T>
bool is_one_mod_lambda7(const gaussian<T>& z) {
  // lambda^7 = 8-8i
  return divides(gaussian<T>(T(8), T(-8)), z - gaussian<T>(T(1)));
}

template <class T>
bool is_unit(const gaussian<T>& z) {
  return norm_wide(z) == 1;
}

// z = i^unit * primary
template <class T>
std::pair<int, gaussian<T>> primary_associate(const gaussian<T>& z) {
  if (z.is_zero()) throw error(errc::zero, "primary_associate of zero");
  if (!is_odd(z)) throw error(errc::norm_even, "element divisible by lambda");
  for (int k = 0; k < 4; ++k) {
    gaussian<T> cand = z * unit_pow<T>(-k);
    if (is_primary(cand)) return {k, cand};
  }
  throw error(errc::not_primary, "no primary associate");  // unreachable
}

template <class T>
gaussian<T> primary(const gaussian<T>& z) {
  return primary_associate(z).second;
}

template <class T>
gaussian<T> raw_gcd(gaussian<T> a, gaussian<T> b) {
  while (!b.is_zero()) {
    gaussian<T> r = mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Canonical ideal generator lambda^k * n', n' primary.
template <class T>
gaussian<T> canonical(gaussian<T> z) {
  int k = strip_lambda(z);
  return lambda_pow<T>(static_cast<unsigned>(k)) * primary(z);
}

template <class T>
gaussian<T> gcd(const gaussian<T>& a, const gaussian<T>& b) {
  if (a.is_zero() || b.is_zero()) throw error(errc::zero, "gcd with zero argument");
  return canonical(raw_gcd(a, b));
}

template <class T>
struct factorization {
  int unit = 0;  // exponent of i
  int lambda_exp = 0;
  std::vector<std::pair<gaussian<T>, int>> factors;

  gaussian<T> reassemble() const {
    gaussian<T> r = unit_pow<T>(unit) * lambda_pow<T>(static_cast<unsigned>(lambda_exp));
    for (auto& [p, e] : factors) r = r * pow(p, static_cast<unsigned>(e));
    return r;
  }
};

namespace detail {

inline std::vector<std::pair<std::int64_t, int>> factor_norm(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (auto& [p, e] : factor_integer(static_cast<std::uint64_t>(n))) out.emplace_back(static_cast<std::int64_t>(p), e);
  return out;
}
inline std::vector<std::pair<mpz_class, int>> factor_norm(const mpz_class& n) { return factor_integer(n); }

inline std::int64_t sqrt_m1(std::int64_t p) { return static_cast<std::int64_t>(sqrt_minus_one(static_cast<std::uint64_t>(p))); }
inline mpz_class sqrt_m1(const mpz_class& p) { return sqrt_minus_one(p); }

inline int mod4(std::int64_t p) { return static_cast<int>(p % 4); }
inline int mod4(const mpz_class& p) { return static_cast<int>(mpz_fdiv_ui(p.get_mpz_t(), 4)); }

template <class T>
int unit_exponent(const gaussian<T>& u) {
  for (int k = 0; k < 4; ++k)
    if (u == unit_pow<T>(k)) return k;
  throw error(errc::mismatch, "cofactor is not a unit");
}

}  // namespace detail

template <class T>
factorization<T> factor(gaussian<T> z) {
  if (z.is_zero()) throw error(errc::zero, "factor of zero");
  factorization<T> f;
  T n = norm(z);
  if (n == 1) {
    f.unit = detail::unit_exponent(z);
    return f;
  }
  for (auto& [p, e] : detail::factor_norm(n)) {
    if (p == 2) {
      f.lambda_exp = strip_lambda(z);
    } else if (detail::mod4(p) == 3) {
      for (int k = 0; k < e / 2; ++k) z = {T(-z.re / p), T(-z.im / p)};  // divide by the primary prime -p
      f.factors.emplace_back(gaussian<T>(T(-p), T(0)), e / 2);
    } else {
      T x = detail::sqrt_m1(p);
      gaussian<T> pi = primary(raw_gcd(gaussian<T>(p), gaussian<T>(x, T(1))));
      gaussian<T> pib = primary(conj(pi));
      int k1 = 0;
      while (k1 < e && divides(pi, z)) {
        z = exact_div(z, pi);
        ++k1;
      }
      int k2 = e - k1;
      for (int k = 0; k < k2; ++k) z = exact_div(z, pib);
      if (k1) f.factors.emplace_back(pi, k1);
      if (k2) f.factors.emplace_back(pib, k2);
    }
  }
  f.unit = detail::unit_exponent(z);
  std::sort(f.factors.begin(), f.factors.end(), [](auto& a, auto& b) { return norm_less(a.first, b.first); });
  return f;
}

template <class T>
int moebius(const gaussian<T>& z) {
  auto f = factor(z);
  if (f.lambda_exp > 1) return 0;
  int s = f.lambda_exp ? -1 : 1;
  for (auto& [p, e] : f.factors) {
    if (e > 1) return 0;
    s = -s;
  }
  return s;
}

template <class T>
bool is_squarefree(const gaussian<T>& z) {
  return moebius(z) != 0;
}

template <class T>
T euler_phi(const gaussian<T>& z) {
  auto f = factor(z);
  wide_t<T> r = 1;
  if (f.lambda_exp) {
    for (int k = 1; k < f.lambda_exp; ++k) r *= 2;
  }
  for (auto& [p, e] : f.factors) {
    wide_t<T> np = norm_wide(p);
    for (int k = 1; k < e; ++k) r *= np;
    r *= (np - 1);
  }
  return int_traits<T>::narrow(r);
}

template <class T>
gaussian<T> radical(const gaussian<T>& z) {
  auto f = factor(z);
  gaussian<T> r = f.lambda_exp ? lambda<T>() : gaussian<T>(T(1));
  for (auto& [p, e] : f.factors) r = r * p;
  return r;
}

template <class T>
std::string to_string(const gaussian<T>& z) {
  std::string s = int_traits<T>::to_string(z.re);
  if (z.im < 0) {
    s += "-" + int_traits<T>::to_string(T(-z.im));
  } else {
    s += "+" + int_traits<T>::to_string(z.im);
  }
  return s + "i";
}

template <class T>
std::ostream& operator<<(std::ostream& os, const gaussian<T>& z) {
  return os << to_string(z);
}

// Accepts "a+bi", "a-bi", "a", "bi", "i", "-i", "a+i"; whitespace ignored.
template <class T>
gaussian<T> parse_gaussian(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s += ch;
  if (s.empty()) throw error(errc::parse, "empty Gaussian integer");
  auto coeff = [&](const std::string& t) -> T {
    if (t.empty() || t == "+") return T(1);
    if (t == "-") return T(-1);
    return int_traits<T>::from_string(t);
  };
  if (s.back() != 'i') return {int_traits<T>::from_string(s), T(0)};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if (s[k] == '+' || s[k] == '-') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {T(0), coeff(s)};
  return {int_traits<T>::from_string(s.substr(0, split)), coeff(s.substr(split))};
}

inline big_gint to_big(const gint& z) { return {mpz_class(static_cast<long>(z.re)), mpz_class(static_cast<long>(z.im))}; }

inline gint to_small(const big_gint& z) {
  if (!z.re.fits_slong_p() || !z.im.fits_slong_p()) throw error(errc::overflow, "component exceeds int64");
  return {static_cast<std::int64_t>(z.re.get_si()), static_cast<std::int64_t>(z.im.get_si())};
}

enum class congruence { lambda3, lambda7 };

// Primary q with N(q) <= X in (norm, re, im) order.
inline std::vector<gint> enumerate_primary(std::int64_t X, congruence cond, bool squarefree_only) {
  std::vector<gint> out;
  if (X < 1) return out;
  std::int64_t r = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(X)));
  for (std::int64_t b = -r; b <= r; ++b) {
    std::int64_t ra = static_cast<std::int64_t>(isqrt_u64(static_cast<std::uint64_t>(X - b * b)));
    for (std::int64_t a = -ra; a <= ra; ++a) {
      gint z(a, b);
      if (cond == congruence::lambda7 ? !is_one_mod_lambda7(z) : !is_primary(z)) continue;
      if (squarefree_only && !is_squarefree(z)) continue;
      out.push_back(z);
    }
  }
  std::sort(out.begin(), out.end(), norm_less<std::int64_t>);
  return out;
}

struct ideal_entry {
  gint generator;
  std::int64_t norm;
  int lambda_exp;
  gint odd_part;
};

// Every nonzero ideal of norm <= bound once, as lambda^g * n with n primary.
inline std::vector<ideal_entry> ideal_stream(std::int64_t bound) {
  std::vector<ideal_entry> out;
  for (auto& n : enumerate_primary(bound, congruence::lambda3, false)) {
    std::int64_t nn = norm(n);
    gint gen = n;
    for (int g = 0; nn <= bound; ++g) {
      out.push_back({gen, nn, g, n});
      nn *= 2;
      gen = gen * lambda<std::int64_t>();
    }
  }
  std::sort(out.begin(), out.end(), [](const ideal_entry& a, const ideal_entry& b) { return norm_less(a.generator, b.generator); });
  return out;
}

}  // namespace qhecke
