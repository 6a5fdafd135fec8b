#pragma once

#include <complex>
#include <string>

#include "gaussint.hpp"

namespace qhecke {

// i^exponent, or zero.
struct quartic_value {
  int exponent = 0;
  bool zero = false;

  static quartic_value zero_value() { return {0, true}; }
  static quartic_value from_exponent(int e) { return {((e % 4) + 4) % 4, false}; }

  quartic_value operator*(const quartic_value& o) const {
    if (zero || o.zero) return zero_value();
    return from_exponent(exponent + o.exponent);
  }
  quartic_value& operator*=(const quartic_value& o) { return *this = *this * o; }
  quartic_value pow(int k) const {
    if (zero) return k == 0 ? quartic_value{} : zero_value();
    return from_exponent(exponent * k);
  }
  quartic_value conj() const { return zero ? zero_value() : from_exponent(-exponent); }
  friend bool operator==(const quartic_value& a, const quartic_value& b) {
    return a.zero == b.zero && (a.zero || a.exponent == b.exponent);
  }
  friend bool operator!=(const quartic_value& a, const quartic_value& b) { return !(a == b); }

  std::complex<double> to_complex() const {
    if (zero) return 0.0;
    static const std::complex<double> roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return roots[exponent];
  }
  std::string to_string() const {
    if (zero) return "0";
    static const char* names[4] = {"1", "i", "-1", "-i"};
    return names[exponent];
  }
};

namespace detail {

template <class T>
void require_primary(const gaussian<T>& c) {
  if (!is_primary(c)) throw error(errc::not_primary, to_string(c) + " is not primary");
}

template <class T>
gaussian<T> powmod(gaussian<T> b, wide_t<T> e, const gaussian<T>& m) {
  gaussian<T> r(T(1));
  b = mod(b, m);
  while (e > 0) {
    if (e % 2 != 0) r = mod(r * b, m);
    e /= 2;
    if (e > 0) b = mod(b * b, m);
  }
  return r;
}

}  // namespace detail

// Euler criterion prime by prime over the factorization of c.
template <class T>
quartic_value quartic_symbol_euler(const gaussian<T>& a, const gaussian<T>& c) {
  detail::require_primary(c);
  quartic_value v;
  for (auto& [p, e] : factor(c).factors) {
    gaussian<T> r = mod(a, p);
    if (r.is_zero()) return quartic_value::zero_value();
    wide_t<T> ex = (norm_wide(p) - 1) / 4;
    gaussian<T> t = detail::powmod(r, ex, p);
    int k = 0;
    for (; k < 4; ++k)
      if (divides(p, t - unit_pow<T>(k))) break;
    if (k == 4) throw error(errc::mismatch, "Euler criterion produced no root of unity");
    v *= quartic_value::from_exponent(k * e);
  }
  return v;
}

template <class T>
int quarter_norm_parity(const gaussian<T>& z) {
  wide_t<T> q = (norm_wide(z) - 1) / 4;
  return (q % 2 != 0) ? 1 : 0;
}

// (-1)^C(alpha, gamma), C = ((N alpha - 1)/4)((N gamma - 1)/4)
template <class T>
int reciprocity_sign(const gaussian<T>& alpha, const gaussian<T>& gamma) {
  detail::require_primary(alpha);
  detail::require_primary(gamma);
  return (quarter_norm_parity(alpha) & quarter_norm_parity(gamma)) ? -1 : 1;
}

struct supplement_exponents {
  int lambda_exp;  // (lambda/gamma) = i^lambda_exp
  int unit_exp;    // (i/gamma) = i^unit_exp
};

// Digits a3..a6 of the lambda-adic expansion gamma = 1 + a3 l^3 + a4 l^4 + a5 l^5 + a6 l^6 + ...
template <class T>
supplement_exponents supplements(const gaussian<T>& gamma) {
  const gaussian<T> one(T(1));
  gaussian<T> t = gamma - one;
  for (int k = 0; k < 3; ++k) t = div_lambda(t);
  int a3 = is_odd(t) ? 1 : 0;
  t = div_lambda(t - gaussian<T>(T(a3)));
  int a4 = is_odd(t) ? 1 : 0;
  t = div_lambda(t - gaussian<T>(T(a4)));
  int a5 = is_odd(t) ? 1 : 0;
  t = div_lambda(t - gaussian<T>(T(a5)));
  int a6 = is_odd(t) ? 1 : 0;
  supplement_exponents s{-a4 + 2 * a6, 2 * (a4 + a5)};
  if (a3) {
    s.lambda_exp += 2;
    s.unit_exp += 1;
  }
  s.lambda_exp = ((s.lambda_exp % 4) + 4) % 4;
  s.unit_exp = ((s.unit_exp % 4) + 4) % 4;
  return s;
}

// Reciprocity-driven reduction; no factorization.
template <class T>
quartic_value quartic_symbol_fast(gaussian<T> a, gaussian<T> c) {
  detail::require_primary(c);
  const gaussian<T> one(T(1));
  int e = 0;
  for (;;) {
    if (c == one) return quartic_value::from_exponent(e);
    a = mod(a, c);
    if (a.is_zero()) return quartic_value::zero_value();
    int m = strip_lambda(a);
    auto [k, ap] = primary_associate(a);
    if (m || k) {
      auto s = supplements(c);
      e += m * s.lambda_exp + k * s.unit_exp;
    }
    if (reciprocity_sign(ap, c) < 0) e += 2;
    a = std::move(c);
    c = std::move(ap);
  }
}

template <class T>
quartic_value quadratic_symbol(const gaussian<T>& a, const gaussian<T>& c) {
  return quartic_symbol_fast(a, c).pow(2);
}

}  // namespace qhecke
