#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>

#include "gauss_sums.hpp"

namespace qhecke {

// Generator of the modulus m_omega of xi: lambda^3, 2 or 1.
inline gint m_omega_generator(int omega) {
  int r = ((omega % 4) + 4) % 4;
  if (r == 1 || r == 3) return {-2, 2};
  if (r == 2) return {2, 0};
  return {1, 0};
}

// (conj(g)/|g|)^omega
inline cplx infinity_type(const gint& g, int omega) {
  if (omega == 0) return 1.0;
  double th = -std::atan2(static_cast<double>(g.im), static_cast<double>(g.re));
  return std::polar(1.0, static_cast<double>(omega) * th);
}

// xi on the ideal (n), evaluated at its canonical generator lambda^k n'.
inline cplx xi_eval(const gint& n, int omega) {
  if (n.is_zero()) return 0.0;
  gint odd = n;
  int k = strip_lambda(odd);
  if (k > 0 && omega % 4 != 0) return 0.0;
  if (omega == 0) return 1.0;
  gint g = lambda_pow<std::int64_t>(static_cast<unsigned>(k)) * primary(odd);
  return infinity_type(g, omega);
}

struct hecke_spec {
  gint q{1};
  int omega = 0;
  gint q1{1}, q2{1}, q3{1}, q4{1}, q5{1};
  gint conductor{1};
  bool primitive = true;
};

// q = q1 q2^2 q3^3 q4^4 q5^4 with mu^2(q1q2q3q4) = 1 and q5 | (q1q2q3q4)^infinity.
inline hecke_spec make_spec(const gint& q, int omega) {
  if (!is_primary(q)) throw error(errc::not_primary, to_string(q) + " is not primary");
  if (!is_one_mod_lambda7(q)) throw error(errc::not_in_family, to_string(q) + " is not 1 mod lambda^7");
  hecke_spec s;
  s.q = q;
  s.omega = omega;
  for (auto& [p, e] : factor(q).factors) {
    int r = e % 4;
    gint* slot = r == 1 ? &s.q1 : r == 2 ? &s.q2 : r == 3 ? &s.q3 : &s.q4;
    *slot = *slot * p;
    int rest = r == 0 ? (e - 4) / 4 : (e - r) / 4;
    s.q5 = s.q5 * pow(p, static_cast<unsigned>(rest));
  }
  s.primitive = s.q4 == gint(1);
  s.conductor = s.q1 * s.q2 * s.q3 * m_omega_generator(omega);
  return s;
}

inline bool is_trivial(const hecke_spec& s) { return s.q == gint(1) && s.omega == 0; }

// nu_{q,omega}((n)) = chi_q(n) xi(n) at the canonical generator.
inline cplx nu_eval(const hecke_spec& s, const gint& n) {
  cplx x = xi_eval(n, s.omega);
  if (x == cplx(0.0)) return 0.0;
  return quartic_symbol_fast(canonical(n), s.q).to_complex() * x;
}

// Rational Jacobi symbol (2/|omega|) for odd omega.
inline int jacobi_two(int omega) {
  int m = std::abs(omega) % 8;
  return (m == 1 || m == 7) ? 1 : -1;
}

// Sign in W(nu_{q,omega}) = epsilon(omega) xi(q) g~4(q): (-1)^{(|omega|-1)/2} (2/|omega|) for odd omega.
// The archimedean factor is i^{-|omega|}; with i^{omega} positive odd omega would get the opposite sign.
inline int epsilon_factor(int omega) {
  if (omega % 2 == 0) return 1;
  int sign = (((std::abs(omega) - 1) / 2) % 2 == 0) ? 1 : -1;
  return sign * jacobi_two(omega);
}

struct root_value {
  cplx value;
  double err;
};

inline void require_root_number_domain(const hecke_spec& s) {
  if (is_trivial(s)) throw error(errc::trivial, "trivial character (q, omega) = (1, 0)");
  if (!s.primitive) throw error(errc::not_primitive, "q4 != 1");
}

// Product formula through normalized Gauss sums of q1, q2, q3.
inline root_value root_number_formula(const hecke_spec& s, prime_gauss_cache& cache = default_prime_cache()) {
  require_root_number_domain(s);
  const gint& q1 = s.q1;
  const gint& q2 = s.q2;
  const gint& q3 = s.q3;
  gint qt = q1 * q2 * q3;
  if (q2 == gint(1) && q3 == gint(1)) {
    auto g = normalized(gauss4_fast(lam2_elem::integral(gint(1)), q1, cache), q1);
    cplx w = static_cast<double>(epsilon_factor(s.omega)) * xi_eval(q1, s.omega) * g.value;
    return {w, g.err};
  }
  quartic_value sym = quartic_symbol_fast(q2 * q3, q1) * quartic_symbol_fast(q1 * q3, q2).pow(2) *
                      quartic_symbol_fast(q1 * q2, q3).conj() * quartic_symbol_fast(gint(-1), q3);
  auto one = lam2_elem::integral(gint(1));
  detail::err_product out;
  out.mul_exact(static_cast<double>(epsilon_factor(s.omega)) * xi_eval(qt, s.omega) * sym.to_complex());
  out.mul(normalized(gauss4_fast(one, q1, cache), q1));
  out.mul(normalized(gauss2_fast(one, q2, cache), q2));
  auto g3 = normalized(gauss4_fast(one, q3, cache), q3);
  out.mul(std::conj(g3.value), g3.err);
  return {out.value, out.err};
}

inline constexpr std::int64_t default_root_direct_budget = 10000;

// Raw definition: i^{-|omega|} chi_inf(2m) N(c)^{-1/2} sum_{x mod c} chi(x) e(x/(2m)), c = (m) the conductor.
inline root_value root_number_direct(const hecke_spec& s, std::int64_t budget = default_root_direct_budget) {
  require_root_number_domain(s);
  const gint m = s.conductor;
  const gint mo = m_omega_generator(s.omega);
  std::int64_t n = norm(m);
  if (n > budget) throw error(errc::budget_exceeded, "conductor norm " + std::to_string(n));
  residue_system rs(m);
  quartic_character chi(s.q);
  const auto& roots = detail::unit_roots(n);
  long double sr = 0, si = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    gint x = rs.element(k);
    int e = chi.exponent(x.re, x.im);
    if (e < 0) continue;
    int ue = 0;
    if (mo != gint(1)) {
      if (!is_odd(x)) continue;
      int u = 0;
      while (u < 4 && !divides(mo, x - unit_pow<std::int64_t>(u))) ++u;
      if (u == 4) continue;
      ue = static_cast<int>(((static_cast<long>(u) * s.omega) % 4 + 4) % 4);
    }
    // e(2 Re(x/(2m))) = e(Re(x conj m) / N(m))
    std::int64_t ph = mod_floor(x.re * m.re + x.im * m.im, n);
    cplx term = quartic_value::from_exponent(e + ue).to_complex() * roots[static_cast<std::size_t>(ph)];
    sr += term.real();
    si += term.imag();
  }
  cplx w = cplx(static_cast<double>(sr), static_cast<double>(si)) / std::sqrt(static_cast<double>(n));
  w *= quartic_value::from_exponent(-std::abs(s.omega)).to_complex() * infinity_type(gint(2) * m, s.omega);
  return {w, 1e-15 * static_cast<double>(n)};
}

inline root_value root_number(const hecke_spec& s, prime_gauss_cache& cache = default_prime_cache()) {
  return root_number_formula(s, cache);
}

}  // namespace qhecke
