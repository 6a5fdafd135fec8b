#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include <qhecke/qhecke.hpp>

using namespace qhecke;

namespace {

// Oracle: Euler-criterion character and the raw Gauss-sum root number for omega = 0,
// summed over the box [0, N)^2 (each class mod q appears N times).
int euler_exponent(const gint& a, const gint& c) {
  int out = 0;
  for (auto& [p, e] : factor(c).factors) {
    gint x = mod(a, p);
    if (x.is_zero()) return -1;
    gint r(1);
    for (std::int64_t k = 0; k < (norm(p) - 1) / 4; ++k) r = mod(r * x, p);
    int j = 0;
    while (!divides(p, r - unit_pow<std::int64_t>(j))) ++j;
    out += j * e;
  }
  return out & 3;
}

cplx oracle_root_number_omega0(const gint& q) {
  std::int64_t n = norm(q);
  std::complex<long double> s = 0;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b) {
      int e = euler_exponent(gint(a, b), q);
      if (e < 0) continue;
      long double ph = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(a * q.re + b * q.im) / n;
      s += std::polar(1.0L, std::numbers::pi_v<long double> / 2 * e + ph);
    }
  s /= static_cast<long double>(n) * std::sqrt(static_cast<long double>(n));
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

std::vector<gint> squarefree_family(std::int64_t max_norm) {
  std::vector<gint> out;
  for (auto& q : enumerate_primary(max_norm, congruence::lambda7, true))
    if (q != gint(1)) out.push_back(q);
  return out;
}

}  // namespace

TEST(Hecke, XiExamples) {
  for (auto& n : {gint(3, 2), gint(-1, -2), gint(1, 1), gint(2)}) EXPECT_EQ(xi_eval(n, 0), cplx(1.0));
  EXPECT_EQ(xi_eval(gint(1, 1), 2), cplx(0.0));
  EXPECT_EQ(xi_eval(gint(1, 1), 1), cplx(0.0));
  cplx want = std::pow(cplx(-1, 2) / std::sqrt(5.0), 4);
  cplx got = xi_eval(gint(-1, -2), 4);
  EXPECT_LT(std::abs(got - want), 1e-12);
  EXPECT_NEAR(std::abs(got), 1.0, 1e-12);
  // lambda is the canonical generator of (2) up to units only through lambda^2 = 2i
  EXPECT_NEAR(std::abs(xi_eval(gint(1, 1), 4)), 1.0, 1e-12);
}

TEST(Hecke, ModulusGenerators) {
  EXPECT_EQ(m_omega_generator(0), gint(1));
  EXPECT_EQ(m_omega_generator(4), gint(1));
  EXPECT_EQ(m_omega_generator(2), gint(2));
  EXPECT_EQ(norm(m_omega_generator(1)), 8);
  EXPECT_EQ(norm(m_omega_generator(3)), 8);
}

TEST(Hecke, NuIsUnitInvariantAndMultiplicative) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::int64_t> d(-200, 200);
  auto fam = squarefree_family(3000);
  for (int k = 0; k < 400; ++k) {
    auto spec = make_spec(fam[static_cast<std::size_t>(k) % fam.size()], k % 5);
    gint n(d(rng), d(rng)), m(d(rng), d(rng));
    if (n.is_zero() || m.is_zero()) continue;
    EXPECT_EQ(nu_eval(spec, gint(1)), cplx(1.0));
    for (int u = 0; u < 4; ++u)
      ASSERT_LT(std::abs(nu_eval(spec, n * unit_pow<std::int64_t>(u)) - nu_eval(spec, n)), 1e-12);
    ASSERT_LT(std::abs(nu_eval(spec, n * m) - nu_eval(spec, n) * nu_eval(spec, m)), 1e-12);
  }
}

TEST(Hecke, NuAtOmegaZeroIsTheSymbol) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::int64_t> d(-300, 300);
  for (auto& q : squarefree_family(2000)) {
    auto spec = make_spec(q, 0);
    gint n = primary(gint(2 * d(rng) + 1, 2 * d(rng)));
    ASSERT_LT(std::abs(nu_eval(spec, n) - quartic_symbol_fast(n, q).to_complex()), 1e-15);
  }
}

TEST(Hecke, CharacterTrivialOnUnitsIffNormOneMod16) {
  for (auto& q : enumerate_primary(5000, congruence::lambda3, true)) {
    bool trivial = quartic_symbol_fast(gint(0, 1), q) == quartic_value{};
    ASSERT_EQ(trivial, norm(q) % 16 == 1) << to_string(q);
  }
}

TEST(Hecke, SpecDecomposition) {
  for (auto& q : enumerate_primary(20000, congruence::lambda7, false)) {
    auto s = make_spec(q, 1);
    gint back = s.q1 * pow(s.q2, 2) * pow(s.q3, 3) * pow(s.q4, 4) * pow(s.q5, 4);
    ASSERT_EQ(back, q);
    ASSERT_TRUE(is_squarefree(s.q1 * s.q2 * s.q3 * s.q4));
    ASSERT_EQ(s.primitive, s.q4 == gint(1));
    ASSERT_EQ(norm(s.conductor), norm(s.q1 * s.q2 * s.q3) * 8);
  }
}

TEST(Hecke, EpsilonFactor) {
  EXPECT_EQ(epsilon_factor(0), 1);
  EXPECT_EQ(epsilon_factor(2), 1);
  EXPECT_EQ(epsilon_factor(4), 1);
  // archimedean factor i^{-|omega|}: epsilon(1) = +1
  EXPECT_EQ(jacobi_two(3), -1);
  EXPECT_EQ(epsilon_factor(1), 1);
  EXPECT_EQ(epsilon_factor(3), 1);
  EXPECT_EQ(epsilon_factor(5), -1);
}

TEST(Hecke, RootNumberOfTrivialModulusFrequencyFour) {
  auto w = root_number(make_spec(gint(1), 4));
  EXPECT_LT(std::abs(w.value - cplx(1.0)), 1e-15);
  EXPECT_LT(std::abs(root_number_direct(make_spec(gint(1), 4)).value - cplx(1.0)), 1e-12);
}

TEST(Hecke, RootNumberMatchesIndependentOracle) {
  for (auto& q : squarefree_family(300)) {
    auto w = root_number(make_spec(q, 0));
    ASSERT_LT(std::abs(w.value - oracle_root_number_omega0(q)), 1e-9) << to_string(q);
  }
}

TEST(Hecke, RootNumberFormulaMatchesDirect) {
  std::mt19937_64 rng(15);
  auto fam = squarefree_family(1000);
  std::shuffle(fam.begin(), fam.end(), rng);
  fam.resize(std::min<std::size_t>(fam.size(), 20));
  for (auto& q : fam)
    for (int omega = 0; omega <= 4; ++omega) {
      auto s = make_spec(q, omega);
      auto f = root_number_formula(s), d = root_number_direct(s);
      ASSERT_NEAR(std::abs(f.value), 1.0, 1e-9);
      ASSERT_LT(std::abs(f.value - d.value), 1e-8) << to_string(q) << " omega " << omega;
    }
}

TEST(Hecke, RootNumberGeneralFamilyMember) {
  // q with q2 or q3 nontrivial: product formula against direct summation
  int seen = 0;
  for (auto& q : enumerate_primary(2500, congruence::lambda7, false)) {
    auto s = make_spec(q, 0);
    if (!s.primitive || (s.q2 == gint(1) && s.q3 == gint(1))) continue;
    for (int omega : {0, 1, 2}) {
      auto so = make_spec(q, omega);
      if (norm(so.conductor) > default_root_direct_budget) continue;
      auto f = root_number_formula(so), d = root_number_direct(so);
      ASSERT_LT(std::abs(f.value - d.value), 1e-8) << to_string(q) << " omega " << omega;
      ++seen;
    }
  }
  EXPECT_GT(seen, 0);
}

TEST(Hecke, RootNumberUnimodularAcrossFamily) {
  for (auto& q : squarefree_family(1000))
    for (int omega = 0; omega <= 4; ++omega) ASSERT_NEAR(std::abs(root_number(make_spec(q, omega)).value), 1.0, 1e-9);
}

TEST(Hecke, Errors) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const error& e) {
      return e.code();
    }
    return errc::zero;
  };
  EXPECT_EQ(code([] { root_number(make_spec(gint(1), 0)); }), errc::trivial);
  EXPECT_EQ(code([] { make_spec(gint(3), 0); }), errc::not_primary);
  EXPECT_EQ(code([] { make_spec(gint(-3), 0); }), errc::not_in_family);
  gint p4 = pow(gint(-1, -2), 4);
  gint q = p4;
  while (!is_one_mod_lambda7(q)) q = q * p4;
  EXPECT_EQ(code([&] { root_number(make_spec(q, 0)); }), errc::not_primitive);
}
