#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <qhecke/qhecke.hpp>

using namespace qhecke;
namespace fs = std::filesystem;

namespace {

fs::path fresh_path(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("qhecke_cache_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

central_value_record sample_record(int k) {
  central_value_record r;
  r.q = gint(-15 + 16 * k, 8 * k);
  r.omega = k % 5;
  r.U = k % 2 ? 0.25 : 4.0;
  r.value = cplx(1.0 / (k + 3), -std::sqrt(2.0) * k);
  r.err = 1e-11 * (k + 1);
  return r;
}

auto error_code = [](auto f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  return errc::zero;
};

}  // namespace

TEST(Cache, Fnv1aReferenceValues) {
  // published FNV-1a 64-bit test vectors
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
}

TEST(Cache, RecordRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int k = 0; k < 1000; ++k) {
    central_value_record r = sample_record(k);
    r.value = cplx(d(rng), d(rng) * 1e-300);
    r.err = std::abs(d(rng)) * 1e-12;
    auto back = parse_record(format_record(r));
    ASSERT_EQ(back.q, r.q);
    ASSERT_EQ(back.omega, r.omega);
    ASSERT_EQ(back.U, r.U);
    ASSERT_EQ(back.value, r.value);
    ASSERT_EQ(back.err, r.err);
  }
}

TEST(Cache, ParseRejectsMalformedLines) {
  EXPECT_EQ(error_code([] { parse_record("1 2 3"); }), errc::corrupt_cache);
  EXPECT_EQ(error_code([] { parse_record("1 2 x 1 0 0 0"); }), errc::parse);
}

TEST(Cache, AppendReloadAndLookup) {
  auto p = fresh_path("roundtrip.txt");
  {
    record_cache c(p);
    EXPECT_EQ(c.size(), 0u);
    c.append({sample_record(0), sample_record(1)});
    c.append({sample_record(2)});
    EXPECT_EQ(c.size(), 3u);
  }
  record_cache again(p);
  ASSERT_EQ(again.size(), 3u);
  auto r = sample_record(2);
  auto hit = again.find(r.q, r.omega, r.U);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->value, r.value);
  EXPECT_FALSE(again.find(r.q, r.omega, 123.0).has_value());
  std::ifstream in(p);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, record_cache::header);
}

TEST(Cache, RealRecordsMatchRecomputation) {
  auto p = fresh_path("real.txt");
  std::vector<central_value_record> recs;
  for (auto& q : {gint(-15), gint(-7, -8)})
    for (int omega : {0, 1}) recs.push_back(central_value(make_spec(q, omega)));
  record_cache(p).append(recs);
  record_cache c(p);
  for (auto& r : recs) {
    auto hit = c.find(r.q, r.omega, r.U);
    ASSERT_TRUE(hit.has_value());
    auto fresh = central_value(make_spec(r.q, r.omega), r.U);
    EXPECT_LE(std::abs(hit->value - fresh.value), hit->err);
  }
}

TEST(Cache, DetectsTampering) {
  auto p = fresh_path("tamper.txt");
  record_cache(p).append({sample_record(0), sample_record(1)});
  std::string text;
  {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto pos = text.find('\n') + 1;
  text[pos] = text[pos] == '1' ? '2' : '1';
  {
    std::ofstream out(p, std::ios::trunc);
    out << text;
  }
  EXPECT_EQ(error_code([&] { record_cache c(p); }), errc::corrupt_cache);
}

TEST(Cache, DetectsMissingFooterAndTruncation) {
  auto p = fresh_path("truncated.txt");
  {
    std::ofstream out(p);
    out << record_cache::header << '\n' << format_record(sample_record(3)) << '\n';
  }
  EXPECT_EQ(error_code([&] { record_cache c(p); }), errc::corrupt_cache);
  {
    std::ofstream out(p, std::ios::trunc);
    out << record_cache::header << '\n' << format_record(sample_record(3));
  }
  EXPECT_EQ(error_code([&] { record_cache c(p); }), errc::corrupt_cache);
}
