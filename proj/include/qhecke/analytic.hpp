#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <vector>

#include "residue.hpp"
#include "special.hpp"

namespace qhecke {

struct kernel_eval {
  double value = 0.0;
  double imag = 0.0;  // imaginary part of the quadrature; zero in exact arithmetic
  double err = 0.0;
};

enum class kernel_kind { V, W };

inline std::string to_string(kernel_kind k) { return k == kernel_kind::V ? "V" : "W"; }

namespace detail {

inline constexpr double kernel_cutoff_T = 7.0;

struct kernel_params {
  double a;      // 1/2 + |omega|/2
  double log_b;  // log(2 pi) for V, log(4 pi^2) for W
  int power;     // 1 for V, 2 for W
};

inline kernel_params params_for(kernel_kind kind, int omega) {
  double a = 0.5 + 0.5 * std::abs(omega);
  if (kind == kernel_kind::V) return {a, std::log(2.0 * std::numbers::pi), 1};
  return {a, std::log(4.0 * std::numbers::pi * std::numbers::pi), 2};
}

// log of the integrand's modulus bound on Re w = s: (b y)^{-s} e^{s^2} (Gamma(a+s)/Gamma(a))^p.
inline double log_envelope(const kernel_params& p, double log_y, double s) {
  return -s * (p.log_b + log_y) + s * s + p.power * (std::lgamma(p.a + s) - std::lgamma(p.a));
}

// Abscissa in (0, 2] minimizing the integrand envelope over 1/s.
inline double choose_abscissa(const kernel_params& p, double log_y) {
  double best = 2.0, best_v = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 200; ++k) {
    double s = 0.01 * k;
    double v = log_envelope(p, log_y, s) - std::log(s);
    if (v < best_v) {
      best_v = v;
      best = s;
    }
  }
  return best;
}

}  // namespace detail

// Rigorous bound |K(y)| <= (b y)^{-s} e^{s^2} G(s)^p / (2 sqrt(pi) s), minimized over s.
inline double kernel_bound(kernel_kind kind, int omega, double y) {
  auto p = detail::params_for(kind, omega);
  double ly = std::log(y), best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 400; ++k) {
    double s = 0.05 * k;
    best = std::min(best, detail::log_envelope(p, ly, s) - std::log(2.0 * std::sqrt(std::numbers::pi) * s));
  }
  return std::exp(best);
}

// Trapezoid rule on the vertical line Re w = sigma, |Im w| <= T.
inline kernel_eval kernel_direct(kernel_kind kind, int omega, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw error(errc::nonpositive_argument, "kernel argument must be positive");
  if (std::abs(omega) > 64) throw error(errc::region, "|omega| > 64 not supported");
  auto p = detail::params_for(kind, omega);
  const double ly = std::log(y);
  const double sigma = detail::choose_abscissa(p, ly);
  const double h = std::min(sigma, 1.0) / 16.0;
  const double T = detail::kernel_cutoff_T;
  const int K = static_cast<int>(std::ceil(T / h));
  const cplx lga = lgamma_complex(cplx(p.a, 0.0));
  const double lb = p.log_b + ly;
  long double sr = 0, si = 0, sabs = 0, slg = 0;
  for (int k = -K; k <= K; ++k) {
    cplx w(sigma, k * h);
    cplx lg = lgamma_complex(p.a + w) - lga;
    cplx f = std::exp(-w * lb + w * w + static_cast<double>(p.power) * lg) / w;
    sr += f.real();
    si += f.imag();
    double af = std::abs(f);
    sabs += af;
    // Lanczos log-gamma carries absolute error ~ eps * |z log z|
    double z = std::abs(p.a + w);
    slg += af * 4e-16 * p.power * (4.0 + z * std::log(z + 2.0));
  }
  const double scale = h / (2.0 * std::numbers::pi);
  kernel_eval out;
  out.value = static_cast<double>(sr) * scale;
  out.imag = static_cast<double>(si) * scale;
  double rounding = scale * (16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(sabs) + static_cast<double>(slg));
  // omitted |t| > T, using int_T^inf e^{-t^2}/t dt <= e^{-T^2}/(2T^2)
  double tail = std::exp(detail::log_envelope(p, ly, sigma)) * std::exp(-T * T) / (T * T) / (2.0 * std::numbers::pi);
  // discretization: the integrand is analytic for |Im t| < sigma; use d = sigma/2
  double d = sigma / 2.0;
  double strip = std::max(std::exp(detail::log_envelope(p, ly, sigma - d)), std::exp(detail::log_envelope(p, ly, sigma + d))) *
                 std::exp(d * d) * std::sqrt(std::numbers::pi) / (sigma - d);
  double disc = 2.0 * strip * std::exp(-2.0 * std::numbers::pi * d / h) / (2.0 * std::numbers::pi);
  out.err = rounding + tail + disc;
  return out;
}

inline kernel_eval V_omega(double y, int omega) { return kernel_direct(kernel_kind::V, omega, y); }
inline kernel_eval W_omega(double y, int omega) { return kernel_direct(kernel_kind::W, omega, y); }

// Piecewise Chebyshev table of a kernel in u = log y.
class kernel_table {
 public:
  static constexpr double panel_width = 0.5;
  static constexpr int degree = 24;
  static constexpr double u_min = -40.0;
  static constexpr double negligible = 1e-22;

  kernel_table(kernel_kind kind, int omega) : kind_(kind), omega_(omega) {
    // upper end: first y where the rigorous bound is negligible
    double u = 0.0;
    while (kernel_bound(kind, omega, std::exp(u)) > negligible) u += panel_width;
    u_max_ = u;
    int panels = static_cast<int>(std::ceil((u_max_ - u_min) / panel_width));
    coeffs_.resize(static_cast<std::size_t>(panels));
    const int n = degree + 1;
    std::array<double, degree + 1> nodes{}, vals{};
    for (int j = 0; j < n; ++j) nodes[j] = std::cos(std::numbers::pi * (j + 0.5) / n);
    err_.resize(static_cast<std::size_t>(panels));
    for (int pnl = 0; pnl < panels; ++pnl) {
      double lo = u_min + pnl * panel_width, mid = lo + 0.5 * panel_width;
      double node_err = 0.0, check = 0.0;
      for (int j = 0; j < n; ++j) {
        auto e = kernel_direct(kind, omega, std::exp(mid + 0.5 * panel_width * nodes[j]));
        vals[j] = e.value;
        node_err = std::max(node_err, e.err);
      }
      auto& c = coeffs_[static_cast<std::size_t>(pnl)];
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += vals[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
        c[k] = 2.0 * s / n;
      }
      c[0] *= 0.5;
      for (double x : {-0.77, 0.31}) {
        auto e = kernel_direct(kind, omega, std::exp(mid + 0.5 * panel_width * x));
        check = std::max(check, std::abs(clenshaw(c, x) - e.value));
      }
      // measured interpolation error, inflated, plus the node values' own error
      err_[static_cast<std::size_t>(pnl)] = node_err + 10.0 * check + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(c[0]);
    }
  }

  kernel_kind kind() const { return kind_; }
  int omega() const { return omega_; }
  double err() const { return *std::max_element(err_.begin(), err_.end()); }
  double u_max() const { return u_max_; }

  kernel_eval operator()(double y) const {
    if (!(y > 0.0)) throw error(errc::nonpositive_argument, "kernel argument must be positive");
    double u = std::log(y);
    if (u < u_min) return kernel_direct(kind_, omega_, y);
    if (u >= u_max_) return {0.0, 0.0, kernel_bound(kind_, omega_, y)};
    int pnl = std::min(static_cast<int>((u - u_min) / panel_width), static_cast<int>(coeffs_.size()) - 1);
    double mid = u_min + (pnl + 0.5) * panel_width;
    return {clenshaw(coeffs_[static_cast<std::size_t>(pnl)], (u - mid) / (0.5 * panel_width)), 0.0,
            err_[static_cast<std::size_t>(pnl)]};
  }

 private:
  static double clenshaw(const std::array<double, degree + 1>& c, double x) {
    double b1 = 0, b2 = 0;
    for (int k = degree; k >= 1; --k) {
      double t = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + c[0];
  }

  kernel_kind kind_;
  int omega_;
  double u_max_ = 0.0;
  std::vector<double> err_;
  std::vector<std::array<double, degree + 1>> coeffs_;
};

// Shared tables, built on first use.
inline std::shared_ptr<const kernel_table> kernel_table_for(kernel_kind kind, int omega) {
  static std::shared_mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const kernel_table>> cache;
  auto key = std::make_pair(static_cast<int>(kind), std::abs(omega));
  {
    std::shared_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tab = std::make_shared<const kernel_table>(kind, std::abs(omega));
  cache.emplace(key, tab);
  return tab;
}

// Step-function envelope: kernel_bound is decreasing in y, so its value at the grid point
// log y_k <= log y bounds |K(y)|. Grid step 0.05 in log y over [-50, 120].
class kernel_envelope {
 public:
  static constexpr double u_lo = -50.0, u_hi = 120.0, step = 0.05;

  kernel_envelope(kernel_kind kind, int omega) : kind_(kind), omega_(omega) {
    int n = static_cast<int>((u_hi - u_lo) / step) + 1;
    vals_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) vals_[static_cast<std::size_t>(k)] = kernel_bound(kind, omega, std::exp(u_lo + k * step));
  }

  double operator()(double y) const {
    double u = std::log(y);
    if (u < u_lo || u >= u_hi) return kernel_bound(kind_, omega_, y);
    auto k = static_cast<std::size_t>(std::floor((u - u_lo) / step));
    return vals_[std::min(k, vals_.size() - 1)];
  }

 private:
  kernel_kind kind_;
  int omega_;
  std::vector<double> vals_;
};

inline std::shared_ptr<const kernel_envelope> kernel_envelope_for(kernel_kind kind, int omega) {
  static std::shared_mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const kernel_envelope>> cache;
  auto key = std::make_pair(static_cast<int>(kind), std::abs(omega));
  {
    std::shared_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto env = std::make_shared<const kernel_envelope>(kind, std::abs(omega));
  cache.emplace(key, env);
  return env;
}

// Smoothing bump F(t) = exp(4 - 1/((t-1)(2-t))) on (1, 2), peak 1 at t = 3/2.
struct smoothing_bump {
  static constexpr const char* id = "exp4-bump-1-2";
  static double operator_value(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    double d = (t - 1.0) * (2.0 - t);
    return std::min(1.0, std::exp(4.0 - 1.0 / d));
  }
  double operator()(double t) const { return operator_value(t); }
};

inline constexpr double mellin_tolerance = 1e-13;

// F^(w) = int_1^2 F(t) t^w dt by composite Gauss-Legendre with panel doubling.
inline cplx mellin_F(cplx w) {
  auto f = [w](double t) -> cplx { return smoothing_bump::operator_value(t) * std::exp(w * std::log(t)); };
  cplx prev = gauss_legendre(f, 1.0, 2.0, 4);
  for (int panels = 8; panels <= 4096; panels *= 2) {
    cplx cur = gauss_legendre(f, 1.0, 2.0, panels);
    if (std::abs(cur - prev) < mellin_tolerance * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

// Radial test functions f with V(z) = f(N(z)/M), and their Hankel transforms H(b) = int_0^inf r f(r^2) J0(b r) dr.
enum class test_function { gaussian, bump };

inline std::string to_string(test_function f) { return f == test_function::gaussian ? "gaussian" : "bump"; }

inline double test_value(test_function f, double t) {
  return f == test_function::gaussian ? std::exp(-std::numbers::pi * t) : smoothing_bump::operator_value(t);
}

inline double hankel_transform(test_function f, double b) {
  if (f == test_function::gaussian) return std::exp(-b * b / (4.0 * std::numbers::pi)) / (2.0 * std::numbers::pi);
  int panels = 40 + static_cast<int>(b / 4.0);
  return gauss_legendre([b](double r) { return r * smoothing_bump::operator_value(r * r) * bessel_j0(b * r); }, 1.0,
                        std::numbers::sqrt2, panels);
}

// Frequency beyond which |H| is below ~1e-18 (measured decay for the bump).
inline double hankel_cutoff(test_function f) {
  return f == test_function::gaussian ? std::sqrt(4.0 * std::numbers::pi * 42.0) : 2000.0;
}

// Support of f in t = N(z)/M (effective for the Gaussian).
inline double test_support(test_function f) { return f == test_function::gaussian ? 42.0 / std::numbers::pi : 2.0; }

enum class poisson_level { plain, periodic, congruence };

// q-periodic weights: 1, chi_q, or the indicator of the class of c mod q.
enum class psi_kind { trivial, character, indicator };

inline std::string to_string(poisson_level l) {
  return l == poisson_level::plain ? "plain" : l == poisson_level::periodic ? "periodic" : "congruence";
}

struct poisson_params {
  test_function f = test_function::gaussian;
  double M = 1.0;
  gint q{1};
  gint c{1};
  psi_kind psi = psi_kind::character;
  double cutoff_scale = 1.0;  // multiplies the frequency cutoff
  std::int64_t budget = 50000000;
};

struct poisson_result {
  cplx lhs;
  cplx rhs;
  double discrepancy;
  std::int64_t lhs_terms = 0;
  std::int64_t rhs_terms = 0;
};

namespace detail {

inline double tau() { return 2.0 * std::numbers::pi; }

inline cplx unit_phase(double x) {
  x -= std::floor(x);
  return std::polar(1.0, tau() * x);
}

// psi values on a residue system of q.
inline std::vector<cplx> psi_table(const poisson_params& p, const residue_system& rs) {
  std::vector<cplx> t(static_cast<std::size_t>(rs.size()), cplx(1.0));
  if (p.psi == psi_kind::trivial || p.q == gint(1)) return t;
  if (p.psi == psi_kind::indicator) {
    std::fill(t.begin(), t.end(), cplx(0.0));
    t[static_cast<std::size_t>(rs.index(p.c))] = 1.0;
    return t;
  }
  quartic_character chi(p.q);
  for (std::int64_t k = 0; k < rs.size(); ++k) {
    gint z = rs.element(k);
    t[static_cast<std::size_t>(k)] = chi(z).to_complex();
  }
  return t;
}

template <class Body>
void for_disc(double radius2, const Body& body) {
  std::int64_t R = static_cast<std::int64_t>(std::floor(std::sqrt(radius2)));
  for (std::int64_t x = -R; x <= R; ++x) {
    std::int64_t ymax = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, radius2 - double(x) * double(x)))));
    for (std::int64_t y = -ymax; y <= ymax; ++y) body(gint(x, y));
  }
}

class hankel_memo {
 public:
  explicit hankel_memo(test_function f) : f_(f) {}
  double operator()(double b) {
    auto it = memo_.find(b);
    if (it != memo_.end()) return it->second;
    double v = hankel_transform(f_, b);
    memo_.emplace(b, v);
    return v;
  }

 private:
  test_function f_;
  std::map<double, double> memo_;
};

}  // namespace detail

// Both sides of the plain, periodic and congruence-level Poisson summation identities.
inline poisson_result poisson_verify(poisson_level level, const poisson_params& p) {
  if (!(p.M > 0)) throw error(errc::nonpositive_argument, "M must be positive");
  if (!is_primary(p.q)) throw error(errc::not_primary, "q must be primary");
  const double M = p.M, sq = std::sqrt(M);
  const gint q = level == poisson_level::plain ? gint(1) : p.q;
  const std::int64_t Nq = norm(q);
  residue_system rs(q);
  auto psi = detail::psi_table(p, rs);
  auto psi_at = [&](const gint& z) { return psi[static_cast<std::size_t>(rs.index(z))]; };
  detail::hankel_memo H(p.f);
  const double bmax = hankel_cutoff(p.f) * p.cutoff_scale;
  poisson_result out;

  // left side
  long double lr = 0, li = 0;
  const gint l7 = lambda_pow<std::int64_t>(7);
  detail::for_disc(test_support(p.f) * M, [&](const gint& m) {
    if (level == poisson_level::congruence && !divides(l7, m - p.c)) return;
    double v = test_value(p.f, static_cast<double>(norm(m)) / M);
    if (v == 0.0) return;
    cplx t = (level == poisson_level::plain ? cplx(1.0) : psi_at(m)) * v;
    lr += t.real();
    li += t.imag();
    ++out.lhs_terms;
  });
  out.lhs = cplx(static_cast<double>(lr), static_cast<double>(li));

  // right side
  long double rr = 0, ri = 0;
  const double absq = std::sqrt(static_cast<double>(Nq));
  if (level == poisson_level::plain || level == poisson_level::periodic) {
    // b = 2 pi |k| sqrt(M) / |q|
    double kmax = bmax * absq / (detail::tau() * sq);
    if (kmax * kmax * 3.2 > static_cast<double>(p.budget)) throw error(errc::budget_exceeded, "Poisson frequency range");
    detail::for_disc(kmax * kmax, [&](const gint& k) {
      double b = detail::tau() * std::sqrt(static_cast<double>(norm(k))) * sq / absq;
      double hb = H(b);
      cplx dot(0.0);
      if (level == poisson_level::plain) {
        dot = 1.0;
      } else {
        for (std::int64_t t = 0; t < rs.size(); ++t) {
          gint tt = rs.element(t);
          gint kt = k * tt * conj(q);
          dot += psi[static_cast<std::size_t>(t)] * detail::unit_phase(-static_cast<double>(mod_floor(kt.re, Nq)) / Nq);
        }
      }
      cplx term = dot * (detail::tau() * M * hb);
      rr += term.real();
      ri += term.imag();
      ++out.rhs_terms;
    });
    out.rhs = cplx(static_cast<double>(rr), static_cast<double>(ri)) / static_cast<double>(Nq);
  } else {
    // b = pi |k| sqrt(M) / (4 sqrt2 |q|)
    double kmax = bmax * 4.0 * std::numbers::sqrt2 * absq / (std::numbers::pi * sq);
    if (kmax * kmax * 3.2 > static_cast<double>(p.budget)) throw error(errc::budget_exceeded, "Poisson frequency range");
    const gint q3 = q * q * q;
    const gint l7c = conj(l7);
    const gint twol7 = gint(2) * l7;
    std::vector<cplx> psi2(static_cast<std::size_t>(rs.size()));
    for (std::int64_t t = 0; t < rs.size(); ++t) psi2[static_cast<std::size_t>(t)] = psi_at(twol7 * rs.element(t));
    detail::for_disc(kmax * kmax, [&](const gint& k) {
      double b = std::numbers::pi * std::sqrt(static_cast<double>(norm(k))) * sq / (4.0 * std::numbers::sqrt2 * absq);
      double hb = H(b);
      // e(-Re(k c q^3 conj(lambda^7)) / 128)
      gint ph = k * p.c * q3 * l7c;
      cplx phase = detail::unit_phase(-static_cast<double>(mod_floor(ph.re, std::int64_t(128))) / 128.0);
      cplx dd(0.0);
      for (std::int64_t t = 0; t < rs.size(); ++t) {
        gint kb = k * rs.element(t) * conj(q);
        dd += psi2[static_cast<std::size_t>(t)] * detail::unit_phase(-2.0 * static_cast<double>(mod_floor(kb.re, Nq)) / Nq);
      }
      cplx term = phase * dd * hb;
      rr += term.real();
      ri += term.imag();
      ++out.rhs_terms;
    });
    out.rhs = cplx(static_cast<double>(rr), static_cast<double>(ri)) * (std::numbers::pi * M / (64.0 * Nq));
  }
  out.discrepancy = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace qhecke
