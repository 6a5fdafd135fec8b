#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "lvalues.hpp"

namespace qhecke {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Shortest round-trip representation.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw error(errc::parse, "bad number '" + std::string(s) + "'");
  return x;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw error(errc::parse, "bad integer '" + std::string(s) + "'");
  return x;
}

// q_re q_im omega U value_re value_im err
inline std::string format_record(const central_value_record& r) {
  std::string out = std::to_string(r.q.re) + ' ' + std::to_string(r.q.im) + ' ' + std::to_string(r.omega) + ' ';
  out += format_double(r.U) + ' ' + format_double(r.value.real()) + ' ' + format_double(r.value.imag()) + ' ';
  out += format_double(r.err);
  return out;
}

inline central_value_record parse_record(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t e = line.find(' ', pos);
    if (e == std::string_view::npos) e = line.size();
    if (e > pos) f.push_back(line.substr(pos, e - pos));
    pos = e + 1;
  }
  if (f.size() != 7) throw error(errc::corrupt_cache, "record with " + std::to_string(f.size()) + " fields");
  central_value_record r;
  r.q = gint(parse_int(f[0]), parse_int(f[1]));
  r.omega = static_cast<int>(parse_int(f[2]));
  r.U = parse_double(f[3]);
  r.value = cplx(parse_double(f[4]), parse_double(f[5]));
  r.err = parse_double(f[6]);
  r.root_number = cplx(0.0, 0.0);  // not stored
  r.terms_used = -1;
  return r;
}

// Append-only record file. Each batch of lines is closed by "# batch <count> <fnv1a hex>" over the batch
// text; the file is fsynced after every batch. A missing or mismatching footer means CorruptCache.
class record_cache {
 public:
  using key = std::tuple<std::int64_t, std::int64_t, int, double>;
  static constexpr const char* header = "# qhecke central-value cache v1";

  record_cache() = default;

  explicit record_cache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) load();
  }

  const std::filesystem::path& path() const { return path_; }
  std::size_t size() const { return records_.size(); }

  std::optional<central_value_record> find(const gint& q, int omega, double U) const {
    auto it = records_.find(key{q.re, q.im, omega, U});
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<central_value_record> all() const {
    std::vector<central_value_record> out;
    for (auto& [k, r] : records_) out.push_back(r);
    return out;
  }

  void append(const std::vector<central_value_record>& batch) {
    if (batch.empty()) return;
    std::string text;
    for (auto& r : batch) text += format_record(r) + '\n';
    char footer[64];
    std::snprintf(footer, sizeof footer, "# batch %zu %016llx\n", batch.size(),
                  static_cast<unsigned long long>(fnv1a(text)));
    bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (!f) throw error(errc::corrupt_cache, "cannot open " + path_.string() + " for append");
    std::string all = (fresh ? std::string(header) + '\n' : std::string()) + text + footer;
    bool ok = std::fwrite(all.data(), 1, all.size(), f) == all.size();
    ok = std::fflush(f) == 0 && ok;
    ok = ::fsync(::fileno(f)) == 0 && ok;
    std::fclose(f);
    if (!ok) throw error(errc::corrupt_cache, "write to " + path_.string() + " failed");
    for (auto& r : batch) records_[key{r.q.re, r.q.im, r.omega, r.U}] = r;
  }

 private:
  void load() {
    std::ifstream in(path_, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string content = ss.str();
    std::string pending;
    std::vector<central_value_record> batch;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < content.size()) {
      std::size_t e = content.find('\n', pos);
      if (e == std::string::npos) throw error(errc::corrupt_cache, path_.string() + ": truncated final line");
      std::string_view line(content.data() + pos, e - pos);
      ++line_no;
      pos = e + 1;
      if (line_no == 1 && line == header) continue;
      if (line.starts_with("# batch ")) {
        unsigned long long count = 0, hash = 0;
        std::string l(line);
        if (std::sscanf(l.c_str(), "# batch %llu %llx", &count, &hash) != 2 || count != batch.size() ||
            hash != fnv1a(pending))
          throw error(errc::corrupt_cache, path_.string() + ": batch check failed at line " + std::to_string(line_no));
        for (auto& r : batch) records_[key{r.q.re, r.q.im, r.omega, r.U}] = r;
        batch.clear();
        pending.clear();
        continue;
      }
      if (line.starts_with("#")) throw error(errc::corrupt_cache, path_.string() + ": unexpected comment line");
      try {
        batch.push_back(parse_record(line));
      } catch (const error& ex) {
        throw error(errc::corrupt_cache, path_.string() + ": line " + std::to_string(line_no) + ": " + ex.what());
      }
      pending.append(line);
      pending.push_back('\n');
    }
    if (!batch.empty()) throw error(errc::corrupt_cache, path_.string() + ": batch without footer");
  }

  std::filesystem::path path_;
  std::map<key, central_value_record> records_;
};

}  // namespace qhecke
