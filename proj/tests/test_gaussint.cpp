#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <qhecke/qhecke.hpp>

using namespace qhecke;

namespace {

// Independent oracles: brute-force primality of a norm and associate search.
bool rational_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool irreducible(const gint& p) {
  std::int64_t n = norm(p);
  if (rational_prime(n)) return true;
  std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n && rational_prime(r) && r % 4 == 3;
}

bool brute_primary(const gint& z) {
  // (z - 1) / (-2 + 2i) in Z[i]: (z-1)(-2-2i) / 8
  gint t = (z - gint(1)) * gint(-2, -2);
  return t.re % 8 == 0 && t.im % 8 == 0;
}

}  // namespace

TEST(GaussInt, NormIsMultiplicative) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-30000, 30000);
  for (int k = 0; k < 1000; ++k) {
    gint z(d(rng), d(rng)), w(d(rng), d(rng));
    EXPECT_EQ(norm(z * w), norm(z) * norm(w));
    EXPECT_GE(norm(z), 0);
  }
  EXPECT_EQ(norm(gint(0)), 0);
}

TEST(GaussInt, PrimaryAssociateExamples) {
  EXPECT_EQ(primary_associate(gint(1)), std::make_pair(0, gint(1)));
  auto [u3, p3] = primary_associate(gint(3));
  EXPECT_EQ(p3, gint(-3));
  EXPECT_EQ(unit_pow<std::int64_t>(u3), gint(-1));
  auto [u, p] = primary_associate(gint(1, 2));
  EXPECT_EQ(p, gint(-1, -2));
  EXPECT_EQ(unit_pow<std::int64_t>(u), gint(-1));
}

TEST(GaussInt, PrimaryAssociateIsUniqueAndExact) {
  for (std::int64_t a = -40; a <= 40; ++a)
    for (std::int64_t b = -40; b <= 40; ++b) {
      gint z(a, b);
      if (z.is_zero() || !is_odd(z)) continue;
      int hits = 0;
      for (int k = 0; k < 4; ++k) hits += brute_primary(z * unit_pow<std::int64_t>(k));
      ASSERT_EQ(hits, 1);
      auto [e, q] = primary_associate(z);
      ASSERT_TRUE(brute_primary(q));
      ASSERT_EQ(unit_pow<std::int64_t>(e) * q, z);
    }
}

TEST(GaussInt, PrimaryAssociateErrors) {
  try {
    primary_associate(gint(0));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::zero);
  }
  try {
    primary_associate(gint(1, 1));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::norm_even);
  }
}

TEST(GaussInt, FactorExamples) {
  auto f2 = factor(gint(2));
  EXPECT_EQ(unit_pow<std::int64_t>(f2.unit), gint(0, -1));
  EXPECT_EQ(f2.lambda_exp, 2);
  EXPECT_TRUE(f2.factors.empty());

  auto f3 = factor(gint(-3));
  EXPECT_EQ(f3.unit, 0);
  EXPECT_EQ(f3.lambda_exp, 0);
  ASSERT_EQ(f3.factors.size(), 1u);
  EXPECT_EQ(f3.factors[0], std::make_pair(gint(-3), 1));

  auto f5 = factor(gint(5));
  std::set<std::pair<std::int64_t, std::int64_t>> ps;
  for (auto& [p, e] : f5.factors) ps.insert({p.re, p.im});
  EXPECT_EQ(ps, (std::set<std::pair<std::int64_t, std::int64_t>>{{-1, -2}, {-1, 2}}));
  EXPECT_EQ(f5.reassemble(), gint(5));
}

TEST(GaussInt, FactorReassemblesWithPrimaryIrreducibles) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> d(-3000, 3000);
  for (int k = 0; k < 2000; ++k) {
    gint z(d(rng), d(rng));
    if (z.is_zero()) continue;
    auto f = factor(z);
    ASSERT_EQ(f.reassemble(), z);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (auto& [p, e] : f.factors) {
      ASSERT_TRUE(brute_primary(p)) << to_string(p);
      ASSERT_TRUE(irreducible(p)) << to_string(p);
      ASSERT_GT(e, 0);
      ASSERT_TRUE(seen.insert({p.re, p.im}).second);
    }
  }
}

TEST(GaussInt, FactorBigComponents) {
  big_gint p(mpz_class("1000000000000000000000007"), mpz_class("999999999999999999999999"));
  big_gint q(mpz_class(12345), mpz_class(-678));
  big_gint z = p * q * q;
  auto f = factor(z);
  EXPECT_EQ(f.reassemble(), z);
  for (auto& [pp, e] : f.factors) EXPECT_TRUE(is_primary(pp));
}

TEST(GaussInt, MultiplicativeFunctions) {
  EXPECT_EQ(moebius(gint(1)), 1);
  EXPECT_EQ(euler_phi(gint(1)), 1);
  EXPECT_EQ(euler_phi(gint(-3)), 8);
  EXPECT_FALSE(is_squarefree(gint(49)));
  EXPECT_EQ(radical(gint(49)), gint(-7));
  EXPECT_EQ(moebius(gint(5)), 1);
  EXPECT_EQ(moebius(gint(-3)), -1);
  EXPECT_EQ(moebius(gint(2)), 0);
}

TEST(GaussInt, EulerPhiMatchesResidueCount) {
  for (std::int64_t a = -9; a <= 9; ++a)
    for (std::int64_t b = -9; b <= 9; ++b) {
      gint z(a, b);
      if (z.is_zero() || is_unit(z)) continue;
      residue_system rs(z);
      std::int64_t count = 0;
      for (std::int64_t k = 0; k < norm(z); ++k) count += is_unit(raw_gcd(rs.element(k), z)) ? 1 : 0;
      ASSERT_EQ(euler_phi(z), count) << to_string(z);
    }
}

TEST(GaussInt, GcdIsPrimaryNormalizedWhenOdd) {
  EXPECT_EQ(gcd(gint(15), gint(5, 10)), gint(5));
  EXPECT_EQ(gcd(gint(3), gint(6)), gint(-3));
  gint g = gcd(gint(-7, 4) * gint(3, 2), gint(3, 2) * gint(11));
  EXPECT_TRUE(is_primary(g));
  EXPECT_EQ(norm(g), 13);
}

TEST(GaussInt, EnumeratePrimarySmall) {
  auto one = enumerate_primary(1, congruence::lambda7, false);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], gint(1));
  // Box brute force is the oracle.
  for (bool sf : {false, true}) {
    auto got = enumerate_primary(50, congruence::lambda7, sf);
    std::vector<gint> want;
    for (std::int64_t a = -8; a <= 8; ++a)
      for (std::int64_t b = -8; b <= 8; ++b) {
        gint z(a, b);
        if (norm(z) > 50 || z.is_zero()) continue;
        gint t = z - gint(1);
        if (!divides(gint(8, -8), t)) continue;
        if (sf && moebius(z) == 0) continue;
        want.push_back(z);
      }
    std::sort(want.begin(), want.end(), norm_less<std::int64_t>);
    EXPECT_EQ(got, want);
  }
}

TEST(GaussInt, FamilyDensity) {
  auto fam = enumerate_primary(10000, congruence::lambda7, true);
  double predicted = std::numbers::pi / 96.0 * 10000.0 / zeta_K2();
  EXPECT_NEAR(static_cast<double>(fam.size()) / predicted, 1.0, 0.05);
}

TEST(GaussInt, IdealStream) {
  auto s1 = ideal_stream(1);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1[0].generator, gint(1));
  auto s5 = ideal_stream(5);
  std::vector<std::int64_t> norms;
  for (auto& e : s5) norms.push_back(e.norm);
  EXPECT_EQ(norms, (std::vector<std::int64_t>{1, 2, 4, 5, 5}));
  // Sum of r2(n)/4 over n <= X counts ideals.
  const std::int64_t X = 10000;
  std::int64_t lattice = 0;
  for (std::int64_t a = -100; a <= 100; ++a)
    for (std::int64_t b = -100; b <= 100; ++b)
      if (a * a + b * b >= 1 && a * a + b * b <= X) ++lattice;
  EXPECT_EQ(static_cast<std::int64_t>(ideal_stream(X).size()) * 4, lattice);
}

TEST(GaussInt, ParseAndPrintRoundTrip) {
  for (auto s : {"0", "1", "-1", "i", "-i", "3+2i", "-1-2i", "7i", "5-i"}) {
    gint z = parse_gaussian<std::int64_t>(s);
    EXPECT_EQ(parse_gaussian<std::int64_t>(to_string(z)), z);
  }
  EXPECT_EQ(parse_gaussian<std::int64_t>("-1-2i"), gint(-1, -2));
}
