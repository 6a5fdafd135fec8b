#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "residue.hpp"

namespace qhecke {

using cplx = std::complex<double>;

struct gauss_value {
  cplx value{0.0, 0.0};
  double err = 0.0;
};

// nu = num / lambda^2, an element of lambda^{-2} Z[i].
struct lam2_elem {
  gint num;

  static lam2_elem integral(const gint& nu) { return {nu * gint(0, 2)}; }
  static lam2_elem over_lambda2(const gint& num) { return {num}; }
  bool is_zero() const { return num.is_zero(); }
};

inline lam2_elem operator*(const lam2_elem& a, const gint& b) { return {a.num * b}; }

inline std::string to_string(const lam2_elem& x) {
  // num / (2i) integral iff 2 | num in Z[i]
  if (divides(gint(2), x.num)) return to_string(exact_div(x.num, gint(0, 2)));
  return "lam^-2*" + to_string(x.num);
}

inline lam2_elem parse_lam2(const std::string& s) {
  const std::string prefix = "lam^-2*";
  if (s.rfind(prefix, 0) == 0) return lam2_elem::over_lambda2(parse_gaussian<std::int64_t>(s.substr(prefix.size())));
  return lam2_elem::integral(parse_gaussian<std::int64_t>(s));
}

inline constexpr std::int64_t default_direct_budget = 1000000;

namespace detail {

inline const std::vector<cplx>& unit_roots(std::int64_t n) {
  static thread_local std::int64_t cached_n = 0;
  static thread_local std::vector<cplx> roots;
  if (cached_n != n) {
    roots.resize(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
      double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      roots[static_cast<std::size_t>(k)] = {std::cos(t), std::sin(t)};
    }
    cached_n = n;
  }
  return roots;
}

// Sum of i^(power * chi(d)) * e(Im(num * d * conj(c)) / N(c)) over a residue system mod c.
template <class Chi>
gauss_value twisted_sum(const lam2_elem& nu, const gint& c, int power, const Chi& chi_exponent) {
  residue_system rs(c);
  std::int64_t n = rs.size();
  gint w = nu.num * conj(c);
  std::int64_t wr = mod_floor(w.re, n), wi = mod_floor(w.im, n);
  const auto& roots = unit_roots(n);
  static const int rot[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  long double sr = 0, si = 0;
  for (std::int64_t y = 0; y < rs.height(); ++y) {
    std::int64_t ph = static_cast<std::int64_t>(i128(wr) * y % n);
    for (std::int64_t x = 0; x < rs.width(); ++x) {
      int e = chi_exponent(x + rs.width() * y, x, y);
      if (e >= 0) {
        const cplx& r = roots[static_cast<std::size_t>(ph)];
        int k = (e * power) & 3;
        sr += rot[k][0] * r.real() - rot[k][1] * r.imag();
        si += rot[k][0] * r.imag() + rot[k][1] * r.real();
      }
      ph += wi;
      if (ph >= n) ph -= n;
    }
  }
  return {cplx(static_cast<double>(sr), static_cast<double>(si)), 6e-16 * static_cast<double>(n) + 1e-300};
}

inline void require_odd_primary(const gint& c) {
  if (!is_primary(c)) throw error(errc::not_primary, to_string(c) + " is not primary");
}

}  // namespace detail

// Literal sum over a complete residue system; the character comes from per-prime tables.
inline gauss_value gauss_direct(const lam2_elem& nu, const gint& c, int order, std::int64_t budget = default_direct_budget) {
  detail::require_odd_primary(c);
  if (norm(c) > budget) throw error(errc::budget_exceeded, "direct Gauss sum modulus norm " + std::to_string(norm(c)));
  quartic_character chi(c);
  int power = order == 4 ? 1 : 2;
  return detail::twisted_sum(nu, c, power, [&](std::int64_t, std::int64_t x, std::int64_t y) { return chi.exponent(x, y); });
}

inline gauss_value gauss4_direct(const lam2_elem& nu, const gint& c, std::int64_t budget = default_direct_budget) {
  return gauss_direct(nu, c, 4, budget);
}
inline gauss_value gauss2_direct(const lam2_elem& nu, const gint& c, std::int64_t budget = default_direct_budget) {
  return gauss_direct(nu, c, 2, budget);
}

// Direct sum whose character values come from the reciprocity algorithm, one residue at a time.
inline gauss_value gauss4_direct_by_symbol(const lam2_elem& nu, const gint& c, std::int64_t budget = default_direct_budget) {
  detail::require_odd_primary(c);
  if (norm(c) > budget) throw error(errc::budget_exceeded, "direct Gauss sum modulus norm " + std::to_string(norm(c)));
  return detail::twisted_sum(nu, c, 1, [&](std::int64_t, std::int64_t x, std::int64_t y) {
    auto v = quartic_symbol_fast(gint(x, y), c);
    return v.zero ? -1 : v.exponent;
  });
}

// Cache of g4(pi) = g4(1, pi) and g2(pi) keyed by (pi, order); optionally persisted.
class prime_gauss_cache {
 public:
  gauss_value get(const gint& pi, int order) {
    auto key = std::make_tuple(pi.re, pi.im, order);
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    auto pc = prime_character_for(pi);
    int power = order == 4 ? 1 : 2;
    gauss_value v = detail::twisted_sum(lam2_elem::integral(gint(1)), pi, power,
                                        [&](std::int64_t idx, std::int64_t, std::int64_t) { return pc->exponent_at(idx); });
    std::unique_lock lock(mu_);
    map_.emplace(key, v);
    return v;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

  void save(const std::string& path) const {
    std::shared_lock lock(mu_);
    std::ofstream out(path, std::ios::trunc);
    for (auto& [k, v] : map_) {
      out << std::get<0>(k) << ' ' << std::get<1>(k) << ' ' << std::get<2>(k) << ' ' << fmt(v.value.real()) << ' '
          << fmt(v.value.imag()) << ' ' << fmt(v.err) << '\n';
    }
  }

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::unique_lock lock(mu_);
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::int64_t re, im;
      int order;
      std::string a, b, e;
      if (!(ls >> re >> im >> order >> a >> b >> e)) throw error(errc::corrupt_cache, "bad Gauss-sum cache line: " + line);
      map_[std::make_tuple(re, im, order)] = {cplx(std::stod(a), std::stod(b)), std::stod(e)};
    }
  }

  static std::string fmt(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::tuple<std::int64_t, std::int64_t, int>, gauss_value> map_;
};

inline prime_gauss_cache& default_prime_cache() {
  static prime_gauss_cache cache;
  return cache;
}

namespace detail {

struct err_product {
  cplx value{1.0, 0.0};
  double err = 0.0;
  void mul(cplx v, double e) {
    err = err * (std::abs(v) + e) + std::abs(value) * e;
    value *= v;
  }
  void mul(const gauss_value& g) { mul(g.value, g.err); }
  void mul_exact(cplx v) {
    err *= std::abs(v);
    value *= v;
  }
};

// valuation of n at pi; n nonzero
inline int valuation(gint& n, const gint& pi) {
  int k = 0;
  while (divides(pi, n)) {
    n = exact_div(n, pi);
    ++k;
  }
  return k;
}

inline double pow_norm(const gint& pi, int k) { return std::pow(static_cast<double>(norm(pi)), k); }

}  // namespace detail

// g4(pi^k, pi^l) by the local table; k < 0 encodes nu = 0.
inline gauss_value gauss4_prime_power(const gint& pi, int k, int l, prime_gauss_cache& cache = default_prime_cache()) {
  if (l == 0) return {1.0, 0.0};
  double np = static_cast<double>(norm(pi));
  if (k < 0 || k >= l) {
    if (l % 4 != 0) return {0.0, 0.0};
    return {std::pow(np, l - 1) * (np - 1), 0.0};
  }
  if (l != k + 1) return {0.0, 0.0};
  double s = std::pow(np, k);
  switch (k % 4) {
    case 0: {
      auto g = cache.get(pi, 4);
      return {s * g.value, s * g.err};
    }
    case 1: {
      auto g = cache.get(pi, 2);
      return {s * g.value, s * g.err};
    }
    case 2: {
      auto g = cache.get(pi, 4);
      cplx sign = quartic_symbol_fast(gint(-1), pi).to_complex();
      return {s * sign * std::conj(g.value), s * g.err};
    }
    default: return {-s, 0.0};
  }
}

// Factorization-driven evaluation: local table per prime power, recombined with the cross symbols.
inline gauss_value gauss4_fast(const lam2_elem& nu, const gint& c, prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_odd_primary(c);
  if (c == gint(1)) return {1.0, 0.0};
  auto fc = factor(c).factors;
  detail::err_product out;
  out.mul_exact(quartic_symbol_fast(gint(0, 2), c).to_complex());  // chi_c(lambda^2)
  for (std::size_t a = 0; a < fc.size(); ++a) {
    const auto& [pi, l] = fc[a];
    int k = -1;
    quartic_value twist;
    if (!nu.is_zero()) {
      gint delta = nu.num;
      k = detail::valuation(delta, pi);
      if (k < l) twist = quartic_symbol_fast(delta, pi).pow(l).conj();
    }
    auto local = gauss4_prime_power(pi, k, l, cache);
    if (local.value == cplx(0.0) && local.err == 0.0) return {0.0, 0.0};
    out.mul(local);
    out.mul_exact(twist.to_complex());
    for (std::size_t b = a + 1; b < fc.size(); ++b) {
      const auto& [pj, lj] = fc[b];
      int e = l * lj;
      out.mul_exact((quartic_symbol_fast(pj, pi).pow(e) * quartic_symbol_fast(pi, pj).pow(e)).to_complex());
    }
  }
  return {out.value, out.err + 1e-15 * std::abs(out.value)};
}

// Quadratic analogue for squarefree c; other moduli fall back to direct summation.
inline gauss_value gauss2_fast(const lam2_elem& nu, const gint& c, prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_odd_primary(c);
  if (c == gint(1)) return {1.0, 0.0};
  auto fc = factor(c).factors;
  for (auto& [p, e] : fc)
    if (e > 1) return gauss2_direct(nu, c);
  detail::err_product out;
  out.mul_exact(quartic_symbol_fast(gint(0, 2), c).pow(2).to_complex());
  for (std::size_t a = 0; a < fc.size(); ++a) {
    const auto& pi = fc[a].first;
    if (nu.is_zero() || divides(pi, nu.num)) return {0.0, 0.0};
    out.mul(cache.get(pi, 2));
    out.mul_exact(quartic_symbol_fast(nu.num, pi).pow(2).conj().to_complex());
    for (std::size_t b = a + 1; b < fc.size(); ++b) {
      const auto& pj = fc[b].first;
      out.mul_exact((quartic_symbol_fast(pj, pi).pow(2) * quartic_symbol_fast(pi, pj).pow(2)).to_complex());
    }
  }
  return {out.value, out.err + 1e-15 * std::abs(out.value)};
}

inline gauss_value normalized(const gauss_value& g, const gint& c) {
  double s = std::sqrt(static_cast<double>(norm(c)));
  return {g.value / s, g.err / s};
}

// g4(nu*mu, c) = conj(chi_c(nu)) g4(mu, c), both sides by direct summation.
inline bool gauss4_scaling(const gint& nu, const lam2_elem& mu, const gint& c, double slack = 1.0) {
  if (!(raw_gcd(nu, c).is_zero() == false && is_unit(raw_gcd(nu, c)))) return true;
  auto lhs = gauss4_direct(mu * nu, c);
  auto rhs = gauss4_direct(mu, c);
  cplx scaled = quartic_symbol_fast(nu, c).conj().to_complex() * rhs.value;
  return std::abs(lhs.value - scaled) <= slack * (lhs.err + rhs.err) + 1e-12 * (1 + std::abs(lhs.value));
}

namespace detail {

inline void require_h4_hypotheses(const gint& c1, const gint& c2, const gint& c3) {
  for (auto* c : {&c1, &c2, &c3}) require_odd_primary(*c);
  if (!is_squarefree(c1 * c2)) throw error(errc::not_squarefree, "mu^2(c1 c2) != 1");
}

}  // namespace detail

// (1/sqrt N(c1c2c3)) sum over x mod c1c2c3 of chi_{c1}(x) chi_{c2}(x)^2 chi_{c3}(x)^3 e(mu x/(c1c2c3))
inline gauss_value h4_tilde_direct(const lam2_elem& mu, const gint& c1, const gint& c2, const gint& c3,
                                   std::int64_t budget = default_direct_budget) {
  detail::require_h4_hypotheses(c1, c2, c3);
  gint m = c1 * c2 * c3;
  if (norm(m) > budget) throw error(errc::budget_exceeded, "h4 modulus too large");
  quartic_character x1(c1), x2(c2), x3(c3);
  auto g = detail::twisted_sum(mu, m, 1, [&](std::int64_t, std::int64_t x, std::int64_t y) {
    int a = x1.exponent(x, y), b = x2.exponent(x, y), c = x3.exponent(x, y);
    if (a < 0 || b < 0 || c < 0) return -1;
    return (a + 2 * b + 3 * c) & 3;
  });
  return normalized(g, m);
}

inline gauss_value h4_tilde_formula(const lam2_elem& mu, const gint& c1, const gint& c2, const gint& c3,
                                    prime_gauss_cache& cache = default_prime_cache()) {
  detail::require_h4_hypotheses(c1, c2, c3);
  if (!is_unit(raw_gcd(c1, c2)) || !is_unit(raw_gcd(c1, c3)) || !is_unit(raw_gcd(c2, c3)))
    throw error(errc::not_coprime, "c1, c2, c3 not pairwise coprime");
  // The c3 block is conj(g4(-mu, c3)), hence the extra chi_{c3}(-1).
  quartic_value sym = quartic_symbol_fast(c2 * c3, c1) * quartic_symbol_fast(c1 * c3, c2).pow(2) *
                      quartic_symbol_fast(c1 * c2, c3).conj() * quartic_symbol_fast(gint(-1), c3);
  detail::err_product out;
  out.mul_exact(sym.to_complex());
  out.mul(normalized(gauss4_fast(mu, c1, cache), c1));
  out.mul(normalized(gauss2_fast(mu, c2, cache), c2));
  auto g3 = normalized(gauss4_fast(mu, c3, cache), c3);
  out.mul(std::conj(g3.value), g3.err);
  return {out.value, out.err};
}

}  // namespace qhecke
