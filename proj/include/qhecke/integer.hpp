#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace qhecke {

using i128 = __int128;

// Component-type traits. int64 arithmetic widens to __int128 for products.
template <class T>
struct int_traits;

template <>
struct int_traits<std::int64_t> {
  using wide = i128;
  static std::int64_t narrow(i128 x) {
    if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
      throw error(errc::overflow, "int64 component overflow");
    return static_cast<std::int64_t>(x);
  }
  static double to_double(std::int64_t x) { return static_cast<double>(x); }
  static std::string to_string(std::int64_t x) { return std::to_string(x); }
  static std::int64_t from_string(const std::string& s) {
    std::int64_t v = 0;
    const char* b = s.data() + ((!s.empty() && s[0] == '+') ? 1 : 0);
    auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) throw error(errc::overflow, "integer out of range: " + s);
    if (ec != std::errc() || p != s.data() + s.size() || b == p) throw error(errc::parse, "bad integer: " + s);
    return v;
  }
};

template <>
struct int_traits<mpz_class> {
  using wide = mpz_class;
  static mpz_class narrow(const mpz_class& x) { return x; }
  static double to_double(const mpz_class& x) { return x.get_d(); }
  static std::string to_string(const mpz_class& x) { return x.get_str(); }
  static mpz_class from_string(const std::string& s) {
    if (s.empty()) throw error(errc::parse, "empty integer");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw error(errc::parse, "bad integer: " + s);
    for (std::size_t k = start; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw error(errc::parse, "bad integer: " + s);
    return mpz_class(s[0] == '+' ? s.substr(1) : s, 10);
  }
};

inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}
inline i128 mod_floor(i128 a, i128 b) { return a - b * floor_div(a, b); }
inline mpz_class mod_floor(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}
inline std::int64_t mod_floor(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  return r < 0 ? r + b : r;
}

// Nearest integer to a/b for b > 0, halves rounded up.
template <class W>
W round_div(const W& a, const W& b) {
  return floor_div(W(2 * a + b), W(2 * b));
}

inline std::uint64_t isqrt_u64(std::uint64_t n) {
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static const std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto p : small) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (auto a : small) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

// Brent's variant of Pollard rho; seeds walk c = 1, 2, ... so runs are reproducible.
inline std::uint64_t rho_u64(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t x) { return (mulmod_u64(x, x, n) + c) % n; };
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    std::uint64_t r = 1;
    const std::uint64_t m = 128;
    do {
      x = y;
      for (std::uint64_t k = 0; k < r; ++k) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t j = 0; j < std::min(m, r - k); ++j) {
          y = f(y);
          q = mulmod_u64(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_u64(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = rho_u64(n);
  split_u64(d, out);
  split_u64(n / d, out);
}

inline mpz_class rho_mpz(const mpz_class& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    mpz_class x = 2, y = 2, g = 1, t;
    auto f = [&](mpz_class& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    while (g == 1) {
      f(x);
      f(y);
      f(y);
      t = x - y;
      mpz_abs(t.get_mpz_t(), t.get_mpz_t());
      mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    }
    if (g != n) return g;
  }
}

inline void split_mpz(const mpz_class& n, std::vector<mpz_class>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
    out.push_back(n);
    return;
  }
  mpz_class d = rho_mpz(n);
  split_mpz(d, out);
  split_mpz(mpz_class(n / d), out);
}

template <class T>
std::vector<std::pair<T, int>> collect(std::vector<T> ps) {
  std::sort(ps.begin(), ps.end());
  std::vector<std::pair<T, int>> out;
  for (auto& p : ps) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t trial_division_limit = 1000000;

inline std::vector<std::pair<std::uint64_t, int>> factor_integer(std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p : {2ull, 3ull}) {
    while (n % p == 0) {
      ps.push_back(p);
      n /= p;
    }
  }
  for (std::uint64_t p = 5; p < trial_division_limit && p * p <= n; p += 6) {
    for (std::uint64_t d : {p, p + 2}) {
      while (n % d == 0) {
        ps.push_back(d);
        n /= d;
      }
    }
  }
  if (n > 1) detail::split_u64(n, ps);
  return detail::collect(std::move(ps));
}

inline std::vector<std::pair<mpz_class, int>> factor_integer(mpz_class n) {
  if (n <= 0) throw error(errc::zero, "factor_integer needs n > 0");
  if (n.fits_ulong_p() && sizeof(unsigned long) == 8) {
    std::vector<std::pair<mpz_class, int>> out;
    for (auto& [p, e] : factor_integer(static_cast<std::uint64_t>(n.get_ui()))) out.emplace_back(mpz_class(static_cast<unsigned long>(p)), e);
    return out;
  }
  std::vector<mpz_class> ps;
  for (unsigned long p = 2; p < trial_division_limit; p += (p == 2 ? 1 : 2)) {
    if (mpz_class(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ps.emplace_back(p);
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
    }
  }
  if (n > 1) detail::split_mpz(n, ps);
  return detail::collect(std::move(ps));
}

// x with x^2 = -1 mod p, p = 1 mod 4 prime: raise the first non-residue to (p-1)/4.
inline std::uint64_t sqrt_minus_one(std::uint64_t p) {
  for (std::uint64_t z = 2;; ++z) {
    std::uint64_t t = powmod_u64(z, (p - 1) / 4, p);
    if (mulmod_u64(t, t, p) == p - 1) return t;
  }
}

inline mpz_class sqrt_minus_one(const mpz_class& p) {
  mpz_class e = (p - 1) / 4, t, t2;
  for (unsigned long z = 2;; ++z) {
    mpz_class zz(z);
    mpz_powm(t.get_mpz_t(), zz.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    t2 = t * t + 1;
    if (mpz_divisible_p(t2.get_mpz_t(), p.get_mpz_t())) return t;
  }
}

}  // namespace qhecke
