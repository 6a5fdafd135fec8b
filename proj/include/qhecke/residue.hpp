#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <vector>

#include "quartic.hpp"

namespace qhecke {

// Complete residue system mod m: {x + y i : 0 <= x < N/d, 0 <= y < d}, d = gcd(re, im).
// The lattice mZ[i] has Hermite basis (N/d, 0), (x0, d).
class residue_system {
 public:
  explicit residue_system(const gint& m) : m_(m) {
    if (m.is_zero()) throw error(errc::zero, "residue system mod 0");
    n_ = norm(m);
    std::int64_t a = m.re, b = m.im;
    // extended gcd: u*b + v*a = d
    std::int64_t r0 = b, r1 = a, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      std::int64_t q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    if (r0 < 0) {
      r0 = -r0;
      s0 = -s0;
      t0 = -t0;
    }
    d_ = r0;
    w_ = n_ / d_;
    i128 x0 = i128(a) * s0 - i128(b) * t0;
    x0_ = static_cast<std::int64_t>(mod_floor(x0, i128(w_)));
  }

  const gint& modulus() const { return m_; }
  std::int64_t size() const { return n_; }
  std::int64_t width() const { return w_; }
  std::int64_t height() const { return d_; }
  gint element(std::int64_t idx) const { return {idx % w_, idx / w_}; }

  std::int64_t index(std::int64_t a, std::int64_t b) const {
    std::int64_t k = b >= 0 ? b / d_ : -((-b + d_ - 1) / d_);
    std::int64_t y = b - k * d_;
    std::int64_t x = mod_floor(static_cast<std::int64_t>(a - static_cast<std::int64_t>(i128(k) * x0_ % w_)), w_);
    return x + w_ * y;
  }
  std::int64_t index(const gint& z) const { return index(z.re, z.im); }

 private:
  gint m_;
  std::int64_t n_ = 1, d_ = 1, w_ = 1, x0_ = 0;
};

inline std::uint64_t primitive_root(std::uint64_t p) {
  auto fs = factor_integer(p - 1);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (auto& [f, e] : fs)
      if (powmod_u64(g, (p - 1) / f, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
}

// Quartic character mod a primary prime, tabulated over its residue system by a discrete-log walk.
class prime_character {
 public:
  explicit prime_character(const gint& pi) : pi_(pi), rs_(pi) {
    std::int64_t n = rs_.size();
    table_.assign(static_cast<std::size_t>(n), -1);
    if (rs_.height() == 1) {
      std::uint64_t p = static_cast<std::uint64_t>(n);
      std::uint64_t g = primitive_root(p);
      std::uint64_t r = static_cast<std::uint64_t>(rs_.index(0, 1));  // image of i
      std::uint64_t t = powmod_u64(g, (p - 1) / 4, p);
      int k = 0;
      for (std::uint64_t v = 1; k < 4 && v != t; ++k) v = mulmod_u64(v, r, p);
      if (k == 4) throw error(errc::mismatch, "no quartic root for generator");
      std::uint64_t v = 1;
      for (std::uint64_t j = 0; j + 1 < p; ++j) {
        table_[v] = static_cast<std::int8_t>((j * k) % 4);
        v = mulmod_u64(v, g, p);
      }
    } else {
      // inert: F_{p^2} = F_p[i]
      std::int64_t p = rs_.width();
      auto mul = [p](std::pair<std::int64_t, std::int64_t> a, std::pair<std::int64_t, std::int64_t> b) {
        std::int64_t re = mod_floor(a.first * b.first - a.second * b.second, p);
        std::int64_t im = mod_floor(a.first * b.second + a.second * b.first, p);
        return std::make_pair(re, im);
      };
      auto powf = [&](std::pair<std::int64_t, std::int64_t> b, std::uint64_t e) {
        std::pair<std::int64_t, std::int64_t> r{1, 0};
        while (e) {
          if (e & 1) r = mul(r, b);
          b = mul(b, b);
          e >>= 1;
        }
        return r;
      };
      std::uint64_t order = static_cast<std::uint64_t>(p * p - 1);
      auto fs = factor_integer(order);
      std::pair<std::int64_t, std::int64_t> g{0, 0};
      for (std::int64_t cand = p + 1; cand < p * p; ++cand) {
        std::pair<std::int64_t, std::int64_t> c{cand % p, cand / p};
        bool ok = true;
        for (auto& [f, e] : fs)
          if (powf(c, order / f) == std::make_pair<std::int64_t, std::int64_t>(1, 0)) {
            ok = false;
            break;
          }
        if (ok) {
          g = c;
          break;
        }
      }
      auto t = powf(g, order / 4);
      std::pair<std::int64_t, std::int64_t> roots[4] = {{1, 0}, {0, 1}, {p - 1, 0}, {0, p - 1}};
      int k = 0;
      while (k < 4 && roots[k] != t) ++k;
      if (k == 4) throw error(errc::mismatch, "no quartic root for generator");
      std::pair<std::int64_t, std::int64_t> v{1, 0};
      for (std::uint64_t j = 0; j < order; ++j) {
        table_[static_cast<std::size_t>(v.first + p * v.second)] = static_cast<std::int8_t>((j * k) % 4);
        v = mul(v, g);
      }
    }
  }

  const gint& prime() const { return pi_; }
  const residue_system& residues() const { return rs_; }
  // exponent of i, or -1 when pi | z
  int exponent(std::int64_t a, std::int64_t b) const { return table_[static_cast<std::size_t>(rs_.index(a, b))]; }
  int exponent_at(std::int64_t idx) const { return table_[static_cast<std::size_t>(idx)]; }
  quartic_value operator()(const gint& z) const {
    int e = exponent(z.re, z.im);
    return e < 0 ? quartic_value::zero_value() : quartic_value::from_exponent(e);
  }

 private:
  gint pi_;
  residue_system rs_;
  std::vector<std::int8_t> table_;
};

// Shared tables for small primes; larger ones are built per use to bound memory.
inline std::shared_ptr<const prime_character> prime_character_for(const gint& pi) {
  static std::shared_mutex mu;
  static std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const prime_character>> cache;
  constexpr std::int64_t cached_norm_limit = 1 << 17;
  auto key = std::make_pair(pi.re, pi.im);
  {
    std::shared_lock lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto tab = std::make_shared<const prime_character>(pi);
  if (norm(pi) <= cached_norm_limit) {
    std::unique_lock lock(mu);
    cache.emplace(key, tab);
  }
  return tab;
}

// chi_q(z) = (z/q)_4 for primary q, as a product of prime tables.
class quartic_character {
 public:
  quartic_character() = default;
  explicit quartic_character(const gint& q) : q_(q) {
    if (!is_primary(q)) throw error(errc::not_primary, to_string(q) + " is not primary");
    for (auto& [p, e] : factor(q).factors) parts_.push_back({prime_character_for(p), e});
  }

  const gint& modulus() const { return q_; }

  int exponent(std::int64_t a, std::int64_t b) const {
    int e = 0;
    for (auto& part : parts_) {
      int x = part.table->exponent(a, b);
      if (x < 0) return -1;
      e += x * part.power;
    }
    return e & 3;
  }
  quartic_value operator()(const gint& z) const {
    int e = exponent(z.re, z.im);
    return e < 0 ? quartic_value::zero_value() : quartic_value::from_exponent(e);
  }

  // Dense table over the residue system of q; entry -1 marks non-units.
  std::vector<std::int8_t> dense_table(const residue_system& rs) const {
    std::vector<std::int8_t> t(static_cast<std::size_t>(rs.size()));
    for (std::int64_t k = 0; k < rs.size(); ++k) {
      gint z = rs.element(k);
      t[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(exponent(z.re, z.im));
    }
    return t;
  }

 private:
  struct part {
    std::shared_ptr<const prime_character> table;
    int power;
  };
  gint q_{1};
  std::vector<part> parts_;
};

}  // namespace qhecke
