#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cache.hpp"
#include "lvalues.hpp"

namespace qhecke {

// ---------------------------------------------------------------- sieve

struct sieve_split {
  std::int64_t M = 0;
  std::int64_t R = 0;
};

// mu^2(q) = M_Y(q) + R_Y(q): sum of mu(l) over l^2 | q, split at N(l) <= Y.
inline sieve_split sieve_MY_RY(const gint& q, double Y) {
  if (!is_primary(q)) throw error(errc::not_primary, to_string(q) + " is not primary");
  std::vector<std::int64_t> norms;
  for (auto& [p, e] : factor(q).factors)
    if (e >= 2) norms.push_back(norm(p));
  sieve_split out;
  const std::size_t n = norms.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    std::int64_t N = 1;
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1) {
        N *= norms[j];
        sign = -sign;
      }
    if (static_cast<double>(N) <= Y) out.M += sign;
    else out.R += sign;
  }
  return out;
}

// ---------------------------------------------------------------- multiplicative functions

// xi(p^4) for a primary prime p.
inline cplx xi_fourth(const gint& p, int omega) { return infinity_type(p, 4 * omega); }

enum class mult_kind { r, g, h, G, H };

inline std::string to_string(mult_kind k) {
  switch (k) {
    case mult_kind::r: return "r";
    case mult_kind::g: return "g";
    case mult_kind::h: return "h";
    case mult_kind::G: return "G";
    case mult_kind::H: return "H";
  }
  return "?";
}

// Value at p^k for an odd prime p (k >= 1 for r, g, h; k = 1 for G, H which live on squarefree ideals).
inline cplx mult_fn(mult_kind kind, const gint& p, int k, int omega) {
  if (!is_odd(p)) throw error(errc::even_prime, "multiplicative functions are defined at odd primes");
  if (k == 0) return 1.0;
  if (k > 1 && (kind == mult_kind::G || kind == mult_kind::H))
    throw error(errc::not_squarefree, "G and H are supported on squarefree ideals");
  const gint pp = primary(p);
  const double q = static_cast<double>(norm(pp));
  const cplx x = xi_fourth(pp, omega);
  const double q2 = q * q, q3 = q2 * q;
  const double den = q2 * q3 + 2 * q2 * q2 + q3 + (1.0 - 2.0 * x.real()) * q2 + 1.0;
  auto r = [&] { return q3 / (q3 + q2 - x); };
  auto g = [&] { return cplx(q2 * (q2 + 1) * (q + 1) / den, 0.0); };
  auto h = [&] { return q3 * (q2 + q * (x + 1.0) + 1.0) / den; };
  switch (kind) {
    case mult_kind::r: return r();
    case mult_kind::g: return g();
    case mult_kind::h: return h();
    case mult_kind::G: return x * r() / q - h();
    case mult_kind::H: return g() - std::norm(h()) / q;
  }
  return 0.0;
}

// Multiplicative extension to an odd ideal.
inline cplx mult_fn_ideal(mult_kind kind, const gint& n, int omega) {
  if (!is_odd(n)) throw error(errc::even_prime, "ideal is not coprime to 2");
  cplx v = 1.0;
  for (auto& [p, e] : factor(n).factors) v *= mult_fn(kind, p, e, omega);
  return v;
}

// ---------------------------------------------------------------- prime ideals and Euler products

struct prime_ideal {
  gint pi;  // primary generator
  std::int64_t norm;
};

// Odd prime ideals of norm <= P, by norm.
inline std::vector<prime_ideal> odd_prime_ideals(std::int64_t P) {
  std::vector<prime_ideal> out;
  if (P < 5) return out;
  std::vector<bool> composite(static_cast<std::size_t>(P) + 1, false);
  for (std::int64_t p = 2; p <= P; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    for (std::int64_t m = p * p; m <= P; m += p) composite[static_cast<std::size_t>(m)] = true;
    if (p == 2) continue;
    if (p % 4 == 1) {
      gint pi = primary(gcd(gint(p, 0), gint(detail::sqrt_m1(p), 1)));
      out.push_back({pi, p});
      out.push_back({conj(pi), p});
    } else if (p * p <= P) {
      out.push_back({gint(-p, 0), p * p});
    }
  }
  std::sort(out.begin(), out.end(), [](const prime_ideal& a, const prime_ideal& b) { return norm_less(a.pi, b.pi); });
  return out;
}

inline constexpr double catalan_constant = 0.915965594177219015054603514932384110774;

// zeta_{Q(i)}(2) = zeta(2) L(2, chi_{-4}).
inline double zeta_K2() { return std::numbers::pi * std::numbers::pi / 6.0 * catalan_constant; }

// Sum over prime ideals of norm > P of N^{-2}, through the ideal counting bound.
inline double prime_inverse_square_tail(double P) {
  return 2.0 * 0.7854 / P + (4.0 / 3.0) * 1.111 / std::pow(P, 1.5) + 1.143 / (P * P);
}

struct euler_value {
  cplx value{0.0, 0.0};
  double tail_bound = 0.0;
  std::int64_t cutoff = 0;
  std::int64_t primes = 0;
};

// Euler product for zeta_{Q(i)}(2) over all prime ideals of norm <= P.
inline euler_value zeta_K2_euler(std::int64_t P) {
  long double prod = 1.0L / (1.0L - 0.25L);
  euler_value out;
  out.cutoff = P;
  for (auto& p : odd_prime_ideals(P)) {
    long double n = static_cast<long double>(p.norm);
    prod /= 1.0L - 1.0L / (n * n);
    ++out.primes;
  }
  double t = prime_inverse_square_tail(static_cast<double>(P));
  out.value = static_cast<double>(prod);
  out.tail_bound = static_cast<double>(prod) * (std::expm1(1.05 * t)) + 1e-15 * static_cast<double>(out.primes) * static_cast<double>(prod);
  return out;
}

enum class euler_name { C, D };

inline std::string to_string(euler_name n) { return n == euler_name::C ? "C" : "D"; }

inline cplx xi_lambda(int omega) { return xi_eval(gint(1, 1), omega); }

// C_omega, D_omega: closed-form prefactor times the Euler product over odd primes of norm <= P.
inline euler_value euler_constant(euler_name name, int omega, std::int64_t P) {
  if (P < 1000) throw error(errc::region, "Euler cutoff must be at least 1000");
  const double pi = std::numbers::pi;
  const cplx xl = xi_lambda(omega);
  const cplx s2 = cplx(std::numbers::sqrt2, 0.0) - xl;
  cplx pre = name == euler_name::C ? pi / (48.0 * std::numbers::sqrt2 * zeta_K2() * s2)
                                   : cplx(pi * pi / (768.0 * zeta_K2() * std::norm(s2)), 0.0);
  long double re = 1.0L, im = 0.0L;
  euler_value out;
  out.cutoff = P;
  for (auto& p : odd_prime_ideals(P)) {
    const double q = static_cast<double>(p.norm);
    const cplx x = xi_fourth(p.pi, omega);
    cplx f;
    if (name == euler_name::C) {
      f = 1.0 + q / ((q + 1.0) * (q * q * std::conj(x) - 1.0));
    } else {
      f = 1.0 - 1.0 / (q * (q + 1.0)) + 2.0 * std::real(q / ((q + 1.0) * (q * q * x - 1.0)));
    }
    long double nr = re * f.real() - im * f.imag();
    long double ni = re * f.imag() + im * f.real();
    re = nr;
    im = ni;
    ++out.primes;
  }
  cplx partial(static_cast<double>(re), static_cast<double>(im));
  out.value = pre * partial;
  // |factor - 1| <= k / N^2 with k = 1.05 (C) or 3.1 (D) once N >= 5; |log(1+t)| <= 1.05 |t| here
  const double k = name == euler_name::C ? 1.05 : 3.1;
  const double lt = 1.05 * k * prime_inverse_square_tail(static_cast<double>(P));
  out.tail_bound = std::abs(out.value) * std::expm1(lt) + 1e-15 * static_cast<double>(out.primes) * std::abs(out.value);
  return out;
}

// ---------------------------------------------------------------- mollifier

struct odd_ideal {
  gint gen;  // primary generator
  std::int64_t norm;
  std::vector<gint> primes;
};

// Squarefree ideals coprime to 2 with norm <= M, by norm.
inline std::vector<odd_ideal> squarefree_odd_ideals(std::int64_t M) {
  std::vector<odd_ideal> out;
  for (auto& n : enumerate_primary(M, congruence::lambda3, true)) {
    odd_ideal d{n, norm(n), {}};
    for (auto& [p, e] : factor(n).factors) d.primes.push_back(primary(p));
    out.push_back(std::move(d));
  }
  return out;
}

struct mollifier_spec {
  std::int64_t M = 2;
  int omega = 0;
  double theta = 0.3;
  cplx C{0.0, 0.0};
  double D = 0.0;
  std::vector<odd_ideal> ideals;
  std::vector<cplx> kappa;
  std::vector<cplx> lambda;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> index;
  cplx Q1_kappa_G{0.0, 0.0};  // sum kappa(d) G(d)
  cplx Q1_lambda{0.0, 0.0};   // sum lambda(b) xi(b^4) r(b) / N(b)
  double roundtrip_error = 0.0;    // max |kappa' - kappa| / max |kappa| after kappa -> lambda -> kappa'
  double max_scaled_lambda = 0.0;  // max N(d) |lambda(d)| log M

  std::size_t find(const gint& g) const {
    auto it = index.find({g.re, g.im});
    if (it == index.end()) throw error(errc::mismatch, "ideal outside mollifier support");
    return it->second;
  }

  // M_omega(q) = sum_b lambda(b) sqrt(N b) nu_{q,omega}(b)
  cplx value(const hecke_spec& s) const {
    cplx v = 0.0;
    for (std::size_t j = 0; j < ideals.size(); ++j)
      v += lambda[j] * std::sqrt(static_cast<double>(ideals[j].norm)) * nu_eval(s, ideals[j].gen);
    return v;
  }
};

namespace detail {

inline gint product_of(const std::vector<gint>& primes, std::size_t mask) {
  gint g(1);
  for (std::size_t j = 0; j < primes.size(); ++j)
    if (mask >> j & 1) g = g * primes[j];
  return primary(g);
}

inline cplx mult_over(mult_kind kind, const std::vector<gint>& primes, std::size_t mask, int omega) {
  cplx v = 1.0;
  for (std::size_t j = 0; j < primes.size(); ++j)
    if (mask >> j & 1) v *= mult_fn(kind, primes[j], 1, omega);
  return v;
}

}  // namespace detail

// kappa by the optimal choice, lambda by Moebius inversion, then kappa recovered from lambda.
inline mollifier_spec mollifier_build(std::int64_t M, int omega, double theta, std::int64_t euler_cutoff = 100000) {
  if (M < 2) throw error(errc::nonpositive_argument, "mollifier length M must be at least 2");
  mollifier_spec m;
  m.M = M;
  m.omega = omega;
  m.theta = theta;
  m.C = euler_constant(euler_name::C, omega, euler_cutoff).value;
  m.D = euler_constant(euler_name::D, omega, euler_cutoff).value.real();
  m.ideals = squarefree_odd_ideals(M);
  const std::size_t n = m.ideals.size();
  for (std::size_t j = 0; j < n; ++j) m.index[{m.ideals[j].gen.re, m.ideals[j].gen.im}] = j;
  const double logM = std::log(static_cast<double>(M));
  const cplx k0 = std::conj(m.C) / (m.D * logM);
  m.kappa.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& d = m.ideals[j];
    std::size_t all = (std::size_t(1) << d.primes.size()) - 1;
    cplx G = detail::mult_over(mult_kind::G, d.primes, all, omega);
    cplx H = detail::mult_over(mult_kind::H, d.primes, all, omega);
    m.kappa[j] = k0 * std::conj(G) / (static_cast<double>(d.norm) * H);
  }
  // lambda(l) = sum_{l | d} mu(d/l) h(d/l) kappa(d)
  m.lambda.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& d = m.ideals[j];
    std::size_t full = (std::size_t(1) << d.primes.size()) - 1;
    for (std::size_t mask = 0; mask <= full; ++mask) {
      std::size_t comp = full & ~mask;
      double mu = (std::popcount(comp) % 2) ? -1.0 : 1.0;
      m.lambda[m.find(detail::product_of(d.primes, mask))] +=
          mu * detail::mult_over(mult_kind::h, d.primes, comp, omega) * m.kappa[j];
    }
  }
  // kappa'(l) = sum_{l | d} lambda(d) h(d/l)
  std::vector<cplx> back(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& d = m.ideals[j];
    std::size_t full = (std::size_t(1) << d.primes.size()) - 1;
    for (std::size_t mask = 0; mask <= full; ++mask) {
      std::size_t comp = full & ~mask;
      back[m.find(detail::product_of(d.primes, mask))] += m.lambda[j] * detail::mult_over(mult_kind::h, d.primes, comp, omega);
    }
  }
  double kmax = 0.0, dmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    kmax = std::max(kmax, std::abs(m.kappa[j]));
    dmax = std::max(dmax, std::abs(back[j] - m.kappa[j]));
  }
  m.roundtrip_error = kmax > 0 ? dmax / kmax : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& d = m.ideals[j];
    std::size_t all = (std::size_t(1) << d.primes.size()) - 1;
    m.Q1_kappa_G += m.kappa[j] * detail::mult_over(mult_kind::G, d.primes, all, omega);
    cplx x4 = 1.0;
    for (auto& p : d.primes) x4 *= xi_fourth(p, omega);
    m.Q1_lambda += m.lambda[j] * x4 * detail::mult_over(mult_kind::r, d.primes, all, omega) / static_cast<double>(d.norm);
    m.max_scaled_lambda = std::max(m.max_scaled_lambda, static_cast<double>(d.norm) * std::abs(m.lambda[j]) * logM);
  }
  return m;
}

// ---------------------------------------------------------------- family sweeps

struct family_options {
  lvalue_options lv{1e-8};
  double U = 1.0;
  unsigned threads = 1;
  record_cache* cache = nullptr;
  double consistency_rate = 0.01;    // fraction of q rechecked at U = 1/4 and 4
  double cache_check_rate = 0.001;   // fraction of cache hits recomputed
  std::size_t batch = 256;
};

struct family_stats {
  std::int64_t computed = 0;
  std::int64_t cache_hits = 0;
  std::int64_t consistency_checks = 0;
  std::int64_t cache_checks = 0;
  double max_consistency_ratio = 0.0;  // max |L_U' - L_U| / (err + err')
};

namespace detail {

// Deterministic sample membership keyed by q and omega.
inline bool sampled(const gint& q, int omega, double rate, std::uint64_t salt) {
  if (rate <= 0) return false;
  if (rate >= 1) return true;
  std::uint64_t h = fnv1a(to_string(q) + "/" + std::to_string(omega), salt);
  return static_cast<double>(h % 1000000) < rate * 1e6;
}

}  // namespace detail

// L(1/2, nu_{q,omega}) at the configured U for every q (all in the squarefree family), cached and
// spot-checked; results are in input order and independent of the thread count.
inline std::vector<central_value_record> family_values(const std::vector<gint>& qs, int omega, const family_options& opt,
                                                       family_stats* stats = nullptr) {
  family_stats st;
  std::vector<central_value_record> out(qs.size());
  std::vector<char> have(qs.size(), 0);
  if (opt.cache) {
    for (std::size_t j = 0; j < qs.size(); ++j)
      if (auto r = opt.cache->find(qs[j], omega, opt.U)) {
        out[j] = *r;
        have[j] = 1;
        ++st.cache_hits;
      }
  }
  struct check_result {
    double ratio = 0.0;
    bool checked = false, cache_checked = false;
  };
  std::vector<check_result> checks(qs.size());
  auto work = [&](std::size_t j) {
    auto s = make_spec(qs[j], omega);
    bool consistency = detail::sampled(qs[j], omega, opt.consistency_rate, 17);
    if (have[j]) {
      if (!detail::sampled(qs[j], omega, opt.cache_check_rate, 29)) return;
      auto fresh = central_value(s, opt.U, opt.lv);
      if (std::abs(fresh.value - out[j].value) > fresh.err + out[j].err)
        throw error(errc::corrupt_cache, "cached value for " + to_string(qs[j]) + " disagrees with recomputation");
      checks[j].cache_checked = true;
      return;
    }
    if (consistency) {
      std::vector<double> Us{opt.U, 0.25, 4.0};
      auto rs = central_values(s, Us, opt.lv);
      out[j] = rs[0];
      for (std::size_t k = 1; k < rs.size(); ++k) {
        double ratio = std::abs(rs[k].value - rs[0].value) / (rs[k].err + rs[0].err);
        checks[j].ratio = std::max(checks[j].ratio, ratio);
        if (ratio > 1.0)
          throw error(errc::mismatch, "functional-equation check failed for " + to_string(qs[j]));
      }
      checks[j].checked = true;
    } else {
      out[j] = central_value(s, opt.U, opt.lv);
    }
  };
  const unsigned threads = std::max(1u, opt.threads);
  for (std::size_t b0 = 0; b0 < qs.size(); b0 += opt.batch) {
    std::size_t b1 = std::min(qs.size(), b0 + opt.batch);
    std::atomic<std::size_t> next{b0};
    std::vector<std::exception_ptr> errs(threads);
    auto worker = [&](unsigned t) {
      try {
        for (std::size_t j; (j = next++) < b1;) work(j);
      } catch (...) {
        errs[t] = std::current_exception();
        next = b1;
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    std::vector<central_value_record> fresh;
    for (std::size_t j = b0; j < b1; ++j)
      if (!have[j]) fresh.push_back(out[j]);
    st.computed += static_cast<std::int64_t>(fresh.size());
    if (opt.cache) opt.cache->append(fresh);
  }
  for (auto& c : checks) {
    if (c.checked) ++st.consistency_checks;
    if (c.cache_checked) ++st.cache_checks;
    st.max_consistency_ratio = std::max(st.max_consistency_ratio, c.ratio);
  }
  if (stats) *stats = st;
  return out;
}

// Squarefree q = 1 mod lambda^7 with lo < N(q) < hi, excluding the trivial character.
inline std::vector<gint> family_window(double lo, double hi, int omega) {
  std::vector<gint> out;
  auto hi_int = static_cast<std::int64_t>(std::ceil(hi));
  for (auto& q : enumerate_primary(hi_int, congruence::lambda7, true)) {
    double n = static_cast<double>(norm(q));
    if (n <= lo || n >= hi) continue;
    if (q == gint(1) && omega == 0) continue;
    out.push_back(q);
  }
  return out;
}

inline double bump_check0() { return mellin_F(0.0).real(); }

struct window_result {
  double X = 0;
  std::int64_t family_size = 0;  // squarefree q = 1 mod lambda^7 with X < N(q) < 2X
  double weight = 0;             // sum of F(N(q)/X)
  double S2 = 0, S2_err = 0;     // sum mu^2 |L|^2 F
  cplx S1{0.0, 0.0};             // sum mu^2 L F
  double S1_err = 0;
  double ratio = 0;              // S2 / (2 D F^(0) X)
};

struct moment_report {
  int omega = 0;
  std::string bump = smoothing_bump::id;
  double fcheck0 = 0;
  cplx C{0.0, 0.0};
  double D = 0;
  std::vector<window_result> windows;
  double slope = 0, intercept = 0;  // least squares of ratio against log X
  family_stats stats;
};

inline constexpr double desk_budget_X = 100000;

inline std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sx += x[j];
    sy += y[j];
    sxx += x[j] * x[j];
    sxy += x[j] * y[j];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

namespace detail {

// L-values for the union of windows (X, 2X), keyed by q.
inline std::map<std::pair<std::int64_t, std::int64_t>, central_value_record> window_values(
    const std::vector<double>& Xs, int omega, const family_options& opt, family_stats& stats) {
  std::map<std::pair<std::int64_t, std::int64_t>, gint> uni;
  for (double X : Xs)
    for (auto& q : family_window(X, 2 * X, omega)) uni[{q.re, q.im}] = q;
  std::vector<gint> qs;
  for (auto& [k, q] : uni) qs.push_back(q);
  std::sort(qs.begin(), qs.end(), norm_less<std::int64_t>);
  auto recs = family_values(qs, omega, opt, &stats);
  std::map<std::pair<std::int64_t, std::int64_t>, central_value_record> out;
  for (std::size_t j = 0; j < qs.size(); ++j) out[{qs[j].re, qs[j].im}] = recs[j];
  return out;
}

}  // namespace detail

// S2(X) = sum over the squarefree family of |L(1/2)|^2 F(N(q)/X), by direct summation, per window.
inline moment_report second_moment_experiment(const std::vector<double>& Xs, int omega, const family_options& opt = {},
                                              double budget = desk_budget_X) {
  for (double X : Xs)
    if (X > budget) throw error(errc::budget_exceeded, "window X = " + format_double(X) + " exceeds the desk budget");
  moment_report rep;
  rep.omega = omega;
  rep.fcheck0 = bump_check0();
  rep.C = euler_constant(euler_name::C, omega, 100000).value;
  rep.D = euler_constant(euler_name::D, omega, 100000).value.real();
  auto vals = detail::window_values(Xs, omega, opt, rep.stats);
  std::vector<double> lx, ys;
  for (double X : Xs) {
    window_result w;
    w.X = X;
    long double s2 = 0, s2e = 0, s1r = 0, s1i = 0, s1e = 0, wt = 0;
    for (auto& q : family_window(X, 2 * X, omega)) {
      const auto& r = vals.at({q.re, q.im});
      double F = smoothing_bump::operator_value(static_cast<double>(norm(q)) / X);
      double a = std::abs(r.value);
      s2 += F * a * a;
      s2e += F * (2 * a * r.err + r.err * r.err);
      s1r += F * r.value.real();
      s1i += F * r.value.imag();
      s1e += F * r.err;
      wt += F;
      ++w.family_size;
    }
    w.S2 = static_cast<double>(s2);
    w.S2_err = static_cast<double>(s2e);
    w.S1 = cplx(static_cast<double>(s1r), static_cast<double>(s1i));
    w.S1_err = static_cast<double>(s1e);
    w.weight = static_cast<double>(wt);
    w.ratio = w.S2 / (2.0 * rep.D * rep.fcheck0 * X);
    lx.push_back(std::log(X));
    ys.push_back(w.ratio);
    rep.windows.push_back(w);
  }
  if (Xs.size() >= 2) std::tie(rep.slope, rep.intercept) = least_squares(lx, ys);
  return rep;
}

struct mollified_report {
  double X = 0;
  std::int64_t M = 0;
  double Y = 0, U = 1;
  int omega = 0;
  double theta = 0;               // (log M / log X)^{1/3}
  std::int64_t family_size = 0;
  double weight = 0;              // sum mu^2 F
  cplx S1{0.0, 0.0};              // sum mu^2 L M F
  double S1_err = 0;
  double S2 = 0, S2_err = 0;      // sum mu^2 |L M|^2 F
  cplx S1_plain{0.0, 0.0};        // unmollified first moment
  double S2_plain = 0;
  double cs_ratio = 0;            // |S1|^2 / (S2 weight)
  cplx predicted_first{0.0, 0.0}; // C X F^(0) Q1
  double predicted_first_limit = 0;   // pi/(48 zeta_K(2)) F^(0) X
  double predicted_second_limit = 0;  // pi/(24 zeta_K(2)) (1 + theta^-3) F^(0) X
  double roundtrip_error = 0;
  std::string warning;
  family_stats stats;
};

// Mollified first and second moments over the window (X, 2X), by direct summation.
inline mollified_report mollified_moments(double X, std::int64_t M, double Y, double U, int omega,
                                          family_options opt = {}, double budget = desk_budget_X) {
  if (X > budget) throw error(errc::budget_exceeded, "X exceeds the desk budget");
  mollified_report rep;
  rep.X = X;
  rep.M = M;
  rep.Y = Y;
  rep.U = U;
  rep.omega = omega;
  rep.theta = std::cbrt(std::log(static_cast<double>(M)) / std::log(X));
  if ((1.0 + std::abs(omega)) * static_cast<double>(M) * Y * Y * U > std::sqrt(X))
    rep.warning = "(1+|omega|) M Y^2 U exceeds X^{1/2}: outside the first-moment parameter range";
  auto mol = mollifier_build(M, omega, rep.theta);
  rep.roundtrip_error = mol.roundtrip_error;
  opt.U = U;
  auto qs = family_window(X, 2 * X, omega);
  auto recs = family_values(qs, omega, opt, &rep.stats);
  const double f0 = bump_check0();
  long double s1r = 0, s1i = 0, s1e = 0, s2 = 0, s2e = 0, pr = 0, pi_ = 0, p2 = 0, wt = 0;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    double F = smoothing_bump::operator_value(static_cast<double>(norm(qs[j])) / X);
    cplx m = mol.value(make_spec(qs[j], omega));
    cplx lm = recs[j].value * m;
    double e = recs[j].err * std::abs(m);
    s1r += F * lm.real();
    s1i += F * lm.imag();
    s1e += F * e;
    s2 += F * std::norm(lm);
    s2e += F * (2 * std::abs(lm) * e + e * e);
    pr += F * recs[j].value.real();
    pi_ += F * recs[j].value.imag();
    p2 += F * std::norm(recs[j].value);
    wt += F;
  }
  rep.family_size = static_cast<std::int64_t>(qs.size());
  rep.S1 = cplx(static_cast<double>(s1r), static_cast<double>(s1i));
  rep.S1_err = static_cast<double>(s1e);
  rep.S2 = static_cast<double>(s2);
  rep.S2_err = static_cast<double>(s2e);
  rep.S1_plain = cplx(static_cast<double>(pr), static_cast<double>(pi_));
  rep.S2_plain = static_cast<double>(p2);
  rep.weight = static_cast<double>(wt);
  rep.cs_ratio = rep.S2 > 0 && rep.weight > 0 ? std::norm(rep.S1) / (rep.S2 * rep.weight) : 0.0;
  rep.predicted_first = mol.C * X * f0 * mol.Q1_kappa_G;
  rep.predicted_first_limit = std::numbers::pi / (48.0 * zeta_K2()) * f0 * X;
  rep.predicted_second_limit = std::numbers::pi / (24.0 * zeta_K2()) * (1.0 + 1.0 / std::pow(rep.theta, 3)) * f0 * X;
  return rep;
}

struct census_report {
  double X = 0;
  int omega = 0;
  double threshold = 0;
  std::int64_t total = 0;
  std::int64_t nonzero = 0;      // |L| > max(threshold, 3 err)
  std::int64_t undecidable = 0;  // |L| <= 3 err
  std::int64_t small = 0;        // 3 err < |L| <= threshold
  double proportion = 0;
  double undecidable_fraction = 0;
  std::vector<central_value_record> records;
  family_stats stats;
};

inline constexpr double default_census_threshold = 1e-6;

// Nonvanishing count over the squarefree family with N(q) <= X.
inline census_report nonvanishing_census(double X, int omega, double threshold = default_census_threshold,
                                         const family_options& opt = {}, double budget = desk_budget_X) {
  if (X > budget) throw error(errc::budget_exceeded, "X exceeds the desk budget");
  census_report rep;
  rep.X = X;
  rep.omega = omega;
  rep.threshold = threshold;
  auto qs = family_window(0.0, X + 0.5, omega);
  rep.records = family_values(qs, omega, opt, &rep.stats);
  for (auto& r : rep.records) {
    double a = std::abs(r.value);
    ++rep.total;
    if (a <= 3.0 * r.err) ++rep.undecidable;
    else if (a > std::max(threshold, 3.0 * r.err)) ++rep.nonzero;
    else ++rep.small;
  }
  if (rep.total) {
    rep.proportion = static_cast<double>(rep.nonzero) / static_cast<double>(rep.total);
    rep.undecidable_fraction = static_cast<double>(rep.undecidable) / static_cast<double>(rep.total);
  }
  return rep;
}

// ---------------------------------------------------------------- large sieve

enum class sieve_coefficients { random_sign, single };

struct large_sieve_result {
  double max_ratio = 0;
  std::vector<double> running_max;  // after each trial
};

// LHS / ((AB)^eps (A + B + (AB)^{2/3}) ||mu^2 lambda||^2) for sum_a mu^2(a) |sum_b mu^2(b) lambda_b chi_a(b)|^2.
inline large_sieve_result large_sieve_spotcheck(std::int64_t A, std::int64_t B, int trials, std::uint64_t seed = 1,
                                                sieve_coefficients kind = sieve_coefficients::random_sign,
                                                double eps = 0.0) {
  if (A < 1 || B < 1 || A > 1000 || B > 1000) throw error(errc::region, "A and B must lie in [1, 1000]");
  auto as = enumerate_primary(A, congruence::lambda3, true);
  auto bs = enumerate_primary(B, congruence::lambda3, true);
  std::vector<std::vector<cplx>> chi(as.size(), std::vector<cplx>(bs.size()));
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j) chi[i][j] = quartic_symbol_fast(bs[j], as[i]).to_complex();
  const double scale = std::pow(static_cast<double>(A) * static_cast<double>(B), eps) *
                       (static_cast<double>(A) + static_cast<double>(B) +
                        std::pow(static_cast<double>(A) * static_cast<double>(B), 2.0 / 3.0));
  std::mt19937_64 rng(seed);
  large_sieve_result out;
  std::vector<double> lam(bs.size());
  for (int t = 0; t < trials; ++t) {
    if (kind == sieve_coefficients::random_sign) {
      for (auto& x : lam) x = (rng() & 1) ? 1.0 : -1.0;
    } else {
      std::fill(lam.begin(), lam.end(), 0.0);
      lam[static_cast<std::size_t>(rng() % bs.size())] = 1.0;
    }
    double norm2 = 0;
    for (double x : lam) norm2 += x * x;
    long double lhs = 0;
    for (std::size_t i = 0; i < as.size(); ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < bs.size(); ++j) s += lam[j] * chi[i][j];
      lhs += std::norm(s);
    }
    out.max_ratio = std::max(out.max_ratio, static_cast<double>(lhs) / (scale * norm2));
    out.running_max.push_back(out.max_ratio);
  }
  return out;
}

}  // namespace qhecke
