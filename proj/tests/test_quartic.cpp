#include <gtest/gtest.h>

#include <random>

#include <qhecke/qhecke.hpp>

using namespace qhecke;

namespace {

// Independent oracle: Euler criterion prime by prime, with naive modular exponentiation.
int euler_exponent_prime(const gint& a, const gint& pi) {
  std::int64_t n = norm(pi);
  gint x = mod(a, pi);
  if (x.is_zero()) return -1;
  gint r(1);
  for (std::int64_t k = 0; k < (n - 1) / 4; ++k) r = mod(r * x, pi);
  for (int k = 0; k < 4; ++k)
    if (divides(pi, r - unit_pow<std::int64_t>(k))) return k;
  return -2;
}

quartic_value oracle_symbol(const gint& a, const gint& c) {
  quartic_value out;
  for (auto& [p, e] : factor(c).factors) {
    int k = euler_exponent_prime(a, p);
    if (k < 0) return quartic_value::zero_value();
    out *= quartic_value::from_exponent(k * e);
  }
  return out;
}

gint random_primary(std::mt19937_64& rng, std::int64_t max_norm) {
  std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(max_norm)));
  std::uniform_int_distribution<std::int64_t> d(-r, r);
  for (;;) {
    gint z(d(rng), d(rng));
    if (norm(z) > max_norm || norm(z) < 2 || !is_odd(z)) continue;
    return primary(z);
  }
}

}  // namespace

TEST(Quartic, Examples) {
  EXPECT_EQ(quartic_symbol_euler(gint(1), gint(-3)), quartic_value{});
  EXPECT_EQ(quartic_symbol_euler(gint(2), gint(-1, -2)).to_string(), "i");
  EXPECT_EQ(quartic_symbol_fast(gint(2), gint(-1, -2)).to_string(), "i");
  EXPECT_EQ(quartic_symbol_fast(gint(0, 1), gint(-3)).to_string(), "-1");
  EXPECT_EQ(quartic_symbol_euler(gint(0, 1), gint(-3)).to_string(), "-1");
  // gamma = 1 + lambda^6 = 1 - 8i
  EXPECT_EQ(quartic_symbol_fast(gint(1, 1), gint(1, -8)).to_string(), "-1");
  EXPECT_EQ(oracle_symbol(gint(1, 1), gint(1, -8)).to_string(), "-1");
}

TEST(Quartic, OneOverAnyPrimaryIsOne) {
  for (auto& c : enumerate_primary(2000, congruence::lambda3, false)) {
    ASSERT_EQ(quartic_symbol_fast(gint(1), c), quartic_value{});
    ASSERT_EQ(quartic_symbol_euler(gint(1), c), quartic_value{});
  }
}

TEST(Quartic, FastEulerAndOracleAgreeOnRandomPairs) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> d(-1000, 1000);
  for (int k = 0; k < 3000; ++k) {
    gint c = random_primary(rng, 1000000);
    gint a(d(rng), d(rng));
    auto fast = quartic_symbol_fast(a, c);
    ASSERT_EQ(fast, quartic_symbol_euler(a, c)) << to_string(a) << " / " << to_string(c);
    if (norm(c) < 20000) {
      ASSERT_EQ(fast, oracle_symbol(a, c)) << to_string(a) << " / " << to_string(c);
    }
  }
}

TEST(Quartic, ZeroIffCommonFactor) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 2000; ++k) {
    gint c = random_primary(rng, 5000);
    gint a = random_primary(rng, 5000) * gint(1, 1);
    bool z = quartic_symbol_fast(a, c).zero;
    ASSERT_EQ(z, !is_unit(raw_gcd(a, c)));
  }
}

TEST(Quartic, GroupLaw) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 2000; ++k) {
    gint c = random_primary(rng, 100000);
    gint a = random_primary(rng, 10000), b = random_primary(rng, 10000);
    ASSERT_EQ(quartic_symbol_fast(a * b, c), quartic_symbol_fast(a, c) * quartic_symbol_fast(b, c));
    ASSERT_EQ(quartic_symbol_fast(a, c * b), quartic_symbol_fast(a, c) * quartic_symbol_fast(a, b));
  }
}

TEST(Quartic, ReciprocityInstance) {
  const gint a(-3), c(-1, -2);
  // C = ((9-1)/4)((5-1)/4) = 2, even
  EXPECT_EQ(reciprocity_sign(a, c), 1);
  EXPECT_EQ(oracle_symbol(a, c), oracle_symbol(c, a));
  EXPECT_EQ(quartic_symbol_fast(a, c), quartic_symbol_fast(c, a));
}

TEST(Quartic, ReciprocityLawAgainstOracle) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    gint a = random_primary(rng, 3000), c = random_primary(rng, 3000);
    if (!is_unit(raw_gcd(a, c))) continue;
    quartic_value lhs = oracle_symbol(a, c), rhs = oracle_symbol(c, a);
    if (reciprocity_sign(a, c) < 0) rhs *= quartic_value::from_exponent(2);
    ASSERT_EQ(lhs, rhs) << to_string(a) << " " << to_string(c);
  }
}

TEST(Quartic, ReciprocitySign) {
  std::mt19937_64 rng(17);
  EXPECT_EQ(reciprocity_sign(gint(-3), gint(-3)), 1);
  for (int k = 0; k < 500; ++k) {
    gint g = random_primary(rng, 10000), a = random_primary(rng, 1000), b = random_primary(rng, 1000);
    ASSERT_EQ(reciprocity_sign(gint(1), g), 1);
    ASSERT_EQ(reciprocity_sign(a * b, g), reciprocity_sign(a, g) * reciprocity_sign(b, g));
    std::int64_t C = ((norm(a) - 1) / 4) * ((norm(g) - 1) / 4);
    ASSERT_EQ(reciprocity_sign(a, g), C % 2 == 0 ? 1 : -1);
  }
}

TEST(Quartic, QuadraticSymbol) {
  EXPECT_EQ(quadratic_symbol(gint(1), gint(-3)).to_string(), "1");
  EXPECT_EQ(quadratic_symbol(gint(2), gint(-1, -2)).to_string(), "-1");
  std::mt19937_64 rng(21);
  for (int k = 0; k < 1000; ++k) {
    gint c = random_primary(rng, 10000), a = random_primary(rng, 10000);
    auto v = quadratic_symbol(a, c);
    if (is_unit(raw_gcd(a, c))) {
      ASSERT_TRUE(!v.zero && (v.exponent == 0 || v.exponent == 2));
    }
  }
}

TEST(Quartic, NonPrimaryModulusRejected) {
  try {
    quartic_symbol_fast(gint(2), gint(3));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::not_primary);
  }
}
