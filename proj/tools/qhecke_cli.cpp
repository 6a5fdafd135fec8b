// qhecke command-line driver. Exit status: 0 success, 1 computation error, 2 usage error.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include <qhecke/qhecke.hpp>
#include <qhecke_module_hashes.hpp>

using json = nlohmann::ordered_json;
using namespace qhecke;
namespace fs = std::filesystem;

namespace {

constexpr const char* schema = "qhecke.report.v1";

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gint parse_g(const std::string& s) {
  try {
    return parse_gaussian<std::int64_t>(s);
  } catch (const error& e) {
    throw usage_error("cannot parse Gaussian integer '" + s + "'");
  }
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
std::string gs(const gint& z) { return to_string(z); }

std::string sha1_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "";
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string out;
  char hex[3];
  for (unsigned k = 0; k < len; ++k) {
    std::snprintf(hex, sizeof hex, "%02x", md[k]);
    out += hex;
  }
  return out;
}

bool nonzero_flag(const central_value_record& r) { return std::abs(r.value) > std::max(default_census_threshold, 3.0 * r.err); }

json record_json(const central_value_record& r) {
  return {{"q", gs(r.q)},          {"omega", r.omega},       {"U", r.U},
          {"L", cj(r.value)},      {"err", r.err},           {"root_number", cj(r.root_number)},
          {"terms", r.terms_used}, {"nonzero", nonzero_flag(r)}};
}

void write_csv(std::ostream& os, const std::vector<central_value_record>& recs) {
  os << "q_re,q_im,omega,L_re,L_im,err,nonzero_flag\n";
  for (auto& r : recs)
    os << r.q.re << ',' << r.q.im << ',' << r.omega << ',' << format_double(r.value.real()) << ','
       << format_double(r.value.imag()) << ',' << format_double(r.err) << ',' << (nonzero_flag(r) ? 1 : 0) << '\n';
}

json stats_json(const family_stats& s) {
  return {{"computed", s.computed},
          {"cache_hits", s.cache_hits},
          {"consistency_checks", s.consistency_checks},
          {"cache_checks", s.cache_checks},
          {"max_consistency_ratio", s.max_consistency_ratio}};
}

// Shared state filled by the global options and the selected subcommand.
struct context {
  std::string format = "auto";
  std::string cache_dir;
  bool no_cache = false;
  unsigned threads = 1;
  std::string csv_path;
  std::unique_ptr<record_cache> cache;

  json result;                                  // subcommand payload
  std::string text;                             // text rendering
  std::vector<central_value_record> records;    // csv rendering
  bool has_records = false;
  bool failed = false;                          // a verification did not pass

  family_options family() {
    family_options o;
    o.threads = threads;
    o.cache = cache.get();
    return o;
  }
};

json config_echo(const CLI::App& app) {
  json cfg = json::object();
  for (const CLI::Option* o : app.get_options()) {
    if (o->get_name() == "--help" || o->get_name() == "-h") continue;
    std::string name = o->get_name(false, true);
    auto res = o->count() ? o->results() : std::vector<std::string>{};
    if (res.empty()) {
      if (!o->get_default_str().empty()) cfg[name] = o->get_default_str();
      else if (o->get_type_size() == 0) cfg[name] = false;
      continue;
    }
    if (o->get_type_size() == 0) cfg[name] = true;
    else if (res.size() == 1 && o->get_expected_max() <= 1) cfg[name] = res[0];
    else cfg[name] = res;
  }
  return cfg;
}

int identity_part_arg(const std::string& s) {
  if (s == "i") return 0;
  if (s == "ii") return 1;
  if (s == "iii") return 2;
  if (s == "iv") return 3;
  if (s == "twisted") return 4;
  throw usage_error("--identity must be one of i, ii, iii, iv, twisted");
}

json check_json(const identity_check& c) {
  return {{"lhs", cj(c.lhs)},     {"rhs", cj(c.rhs)},         {"discrepancy", c.discrepancy},
          {"bound", c.bound},     {"psi_calls", c.psi_calls}, {"pass", c.pass()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quartic Hecke L-functions over Q(i): symbols, Gauss sums, central values, moments"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  context ctx;
  if (const char* t = std::getenv("THREADS")) ctx.threads = static_cast<unsigned>(std::max(1, std::atoi(t)));
  if (const char* d = std::getenv("CACHE_DIR")) ctx.cache_dir = d;
  app.add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"auto", "json", "csv", "text"}));
  app.add_option("--cache-dir", ctx.cache_dir, "Central-value cache directory (default: $CACHE_DIR)");
  app.add_flag("--no-cache", ctx.no_cache, "Ignore the cache directory");
  app.add_option("--threads", ctx.threads, "Worker threads (default: $THREADS or 1)")->check(CLI::Range(1u, 256u));
  app.add_option("--csv", ctx.csv_path, "Also write central-value records as CSV to this file");

  std::function<void()> action;
  std::string default_format = "text";
  CLI::App* chosen = nullptr;
  auto sub = [&](const char* name, const char* help, const char* fmt, std::function<void()> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&, s, fmt, fn] {
      chosen = s;
      default_format = fmt;
      action = fn;
    });
    return s;
  };

  // symbol
  std::string a_str, c_str, method = "fast";
  int order = 4;
  auto* sym = sub("symbol", "Quartic (or quadratic) residue symbol (a/c)", "text", [&] {
    gint a = parse_g(a_str), c = parse_g(c_str);
    auto eval = [&](bool euler) {
      quartic_value v = euler ? quartic_symbol_euler(a, c) : quartic_symbol_fast(a, c);
      return order == 2 ? v.pow(2) : v;
    };
    json r = {{"a", gs(a)}, {"c", gs(c)}, {"order", order}};
    std::string value;
    if (method == "both") {
      auto f = eval(false), e = eval(true);
      if (f != e) throw error(errc::mismatch, "fast " + f.to_string() + " != euler " + e.to_string());
      value = f.to_string();
    } else {
      value = eval(method == "euler").to_string();
    }
    r["value"] = value;
    ctx.result = r;
    ctx.text = value;
  });
  sym->add_option("--a", a_str, "Numerator")->required();
  sym->add_option("--c", c_str, "Primary modulus")->required();
  sym->add_option("--method", method, "Evaluation method")->check(CLI::IsMember({"fast", "euler", "both"}));
  sym->add_option("--order", order, "Symbol order")->check(CLI::IsMember({2, 4}));

  // gauss-sum
  std::string nu_str = "1", gc_str, gmethod = "fast";
  bool over_l2 = false;
  auto* gsum = sub("gauss-sum", "Gauss sum g(nu, c) of order 4 or 2", "text", [&] {
    gint c = parse_g(gc_str), n = parse_g(nu_str);
    lam2_elem nu = over_l2 ? lam2_elem::over_lambda2(n) : lam2_elem::integral(n);
    auto eval = [&](bool direct) {
      if (order == 2) return direct ? gauss2_direct(nu, c) : gauss2_fast(nu, c);
      return direct ? gauss4_direct(nu, c) : gauss4_fast(nu, c);
    };
    json r = {{"nu", to_string(nu)}, {"c", gs(c)}, {"order", order}};
    gauss_value g = eval(gmethod == "direct");
    if (gmethod == "both") {
      auto d = eval(true);
      r["direct"] = {{"value", cj(d.value)}, {"err", d.err}};
      if (std::abs(d.value - g.value) > d.err + g.err) throw error(errc::mismatch, "fast and direct Gauss sums disagree");
    }
    r["value"] = cj(g.value);
    r["err"] = g.err;
    r["normalized"] = cj(normalized(g, c).value);
    ctx.result = r;
    std::ostringstream os;
    os << format_double(g.value.real()) << ' ' << format_double(g.value.imag()) << " err " << format_double(g.err);
    ctx.text = os.str();
  });
  gsum->add_option("--nu", nu_str, "Numerator of nu (integral unless --over-lambda2)");
  gsum->add_flag("--over-lambda2", over_l2, "Interpret nu as num / lambda^2");
  gsum->add_option("--c", gc_str, "Primary modulus")->required();
  gsum->add_option("--method", gmethod, "Evaluation method")->check(CLI::IsMember({"fast", "direct", "both"}));
  gsum->add_option("--order", order, "Character order")->check(CLI::IsMember({2, 4}));

  // root-number
  std::string q_str;
  int omega = 0;
  std::string rmethod = "formula";
  auto* rn = sub("root-number", "Root number W(nu_{q, omega})", "text", [&] {
    auto s = make_spec(parse_g(q_str), omega);
    root_value w = rmethod == "direct" ? root_number_direct(s) : root_number(s);
    json r = {{"q", gs(s.q)}, {"omega", omega}, {"conductor", gs(s.conductor)}, {"value", cj(w.value)}, {"err", w.err}};
    if (rmethod == "both") {
      auto d = root_number_direct(s);
      r["direct"] = {{"value", cj(d.value)}, {"err", d.err}};
      if (std::abs(d.value - w.value) > 1e-8) throw error(errc::mismatch, "formula and direct root numbers disagree");
    }
    ctx.result = r;
    std::ostringstream os;
    os << format_double(w.value.real()) << ' ' << format_double(w.value.imag());
    ctx.text = os.str();
  });
  rn->add_option("--q", q_str, "Primary modulus")->required();
  rn->add_option("--omega", omega, "Frequency");
  rn->add_option("--method", rmethod, "Evaluation method")->check(CLI::IsMember({"formula", "direct", "both"}));

  // character
  std::string n_str;
  auto* ch = sub("character", "Hecke character value nu_{q, omega}(n)", "text", [&] {
    auto s = make_spec(parse_g(q_str), omega);
    gint n = parse_g(n_str);
    cplx v = nu_eval(s, n);
    ctx.result = {{"q", gs(s.q)}, {"omega", omega}, {"n", gs(n)}, {"value", cj(v)}};
    ctx.text = format_double(v.real()) + " " + format_double(v.imag());
  });
  ch->add_option("--q", q_str, "Primary modulus")->required();
  ch->add_option("--omega", omega, "Frequency");
  ch->add_option("--n", n_str, "Argument")->required();

  // lvalue
  std::vector<double> Us{1.0};
  double tail_tol = 1e-10;
  bool exact_kernel = false, with_A = false;
  auto* lv = sub("lvalue", "Central value L(1/2, nu_{q, omega}) by the approximate functional equation", "json", [&] {
    auto s = make_spec(parse_g(q_str), omega);
    lvalue_options opt;
    opt.tail_tol = tail_tol;
    opt.interpolate = !exact_kernel;
    std::vector<central_value_record> recs;
    std::vector<double> todo;
    for (double U : Us) {
      auto hit = ctx.cache ? ctx.cache->find(s.q, omega, U) : std::nullopt;
      if (!hit) todo.push_back(U);
    }
    std::vector<central_value_record> fresh;
    if (!todo.empty()) fresh = central_values(s, todo, opt);
    if (ctx.cache && !fresh.empty()) ctx.cache->append(fresh);
    std::size_t k = 0;
    for (double U : Us) {
      auto hit = ctx.cache ? ctx.cache->find(s.q, omega, U) : std::nullopt;
      recs.push_back(hit ? *hit : fresh[k++]);
    }
    json arr = json::array();
    for (auto& r : recs) arr.push_back(record_json(r));
    json r = {{"q", gs(s.q)}, {"omega", omega}, {"values", arr}};
    double spread = 0, errs = 0;
    for (auto& x : recs) {
      spread = std::max(spread, std::abs(x.value - recs[0].value));
      errs = std::max(errs, x.err + recs[0].err);
    }
    r["U_consistent"] = spread <= errs;
    ctx.failed = spread > errs;
    if (with_A) {
      auto A = A_value(s, opt);
      double sq = std::norm(recs[0].value);
      r["A"] = {{"value", A.value}, {"err", A.err}, {"cutoff", A.cutoff}, {"abs_L_squared", sq}};
    }
    ctx.result = r;
    ctx.records = recs;
    ctx.has_records = true;
    std::ostringstream os;
    for (auto& x : recs)
      os << "U=" << format_double(x.U) << " L=" << format_double(x.value.real()) << ' ' << format_double(x.value.imag())
         << " err " << format_double(x.err) << '\n';
    ctx.text = os.str();
  });
  lv->add_option("--q", q_str, "Family member")->required();
  lv->add_option("--omega", omega, "Frequency");
  lv->add_option("--U", Us, "Balance parameters")->expected(1, 16);
  lv->add_option("--tail-tol", tail_tol, "Truncation tolerance")->check(CLI::PositiveNumber);
  lv->add_flag("--exact-kernel", exact_kernel, "Direct kernel quadrature instead of tables");
  lv->add_flag("--A", with_A, "Also evaluate the quadratic form A_omega(q)");

  // kernel
  std::string which = "V";
  double y = 1.0;
  auto* kr = sub("kernel", "Smooth cutoff kernel V_omega(y) or W_omega(y)", "text", [&] {
    auto e = kernel_direct(which == "V" ? kernel_kind::V : kernel_kind::W, omega, y);
    ctx.result = {{"which", which}, {"omega", omega}, {"y", y}, {"value", e.value}, {"imag", e.imag}, {"err", e.err}};
    ctx.text = format_double(e.value) + " err " + format_double(e.err);
  });
  kr->add_option("--which", which, "Kernel")->check(CLI::IsMember({"V", "W"}));
  kr->add_option("--omega", omega, "Frequency");
  kr->add_option("--y", y, "Argument")->required();

  // poisson-check
  std::string level = "plain", fn = "gaussian", psi = "character", pc_str = "1";
  double M = 1.0, cutoff_scale = 1.0;
  std::string pq_str = "1";
  auto* po = sub("poisson-check", "Both sides of a Poisson summation identity", "json", [&] {
    poisson_params p;
    p.f = fn == "gaussian" ? test_function::gaussian : test_function::bump;
    p.M = M;
    p.q = parse_g(pq_str);
    p.c = parse_g(pc_str);
    p.psi = psi == "trivial" ? psi_kind::trivial : psi == "indicator" ? psi_kind::indicator : psi_kind::character;
    p.cutoff_scale = cutoff_scale;
    poisson_level lvl = level == "plain" ? poisson_level::plain : level == "periodic" ? poisson_level::periodic : poisson_level::congruence;
    auto r = poisson_verify(lvl, p);
    ctx.result = {{"level", level},       {"lhs", cj(r.lhs)},         {"rhs", cj(r.rhs)},
                  {"discrepancy", r.discrepancy}, {"lhs_terms", r.lhs_terms}, {"rhs_terms", r.rhs_terms}};
    ctx.text = "discrepancy " + format_double(r.discrepancy);
  });
  po->add_option("--level", level, "Identity level")->check(CLI::IsMember({"plain", "periodic", "congruence"}));
  po->add_option("--f", fn, "Test function")->check(CLI::IsMember({"gaussian", "bump"}));
  po->add_option("--M", M, "Scale")->check(CLI::PositiveNumber);
  po->add_option("--q", pq_str, "Primary modulus of the periodic weight");
  po->add_option("--c", pc_str, "Residue class");
  po->add_option("--psi", psi, "Periodic weight")->check(CLI::IsMember({"trivial", "character", "indicator"}));
  po->add_option("--cutoff-scale", cutoff_scale, "Frequency cutoff multiplier")->check(CLI::PositiveNumber);

  // psi-check
  std::string identity = "i", params_text = "{}";
  bool matrix = false;
  auto* ps = sub("psi-check", "Coprimality-reduction identities for Dirichlet series of quartic Gauss sums", "json", [&] {
    json out;
    if (matrix) {
      json rows = json::array();
      int fails = 0;
      for (cplx s : {cplx(2.0), cplx(2.5), cplx(2.0, 1.0)}) {
        for (auto& t : reduction_matrix())
          for (auto part : {reduction_part::i, reduction_part::ii, reduction_part::iii, reduction_part::iv}) {
            auto c = verify_reduction(part, t.alpha, t.beta, t.r, s, t.omega, t.v, 10000);
            fails += c.pass() ? 0 : 1;
            json row = check_json(c);
            row["identity"] = to_string(part);
            row["s"] = cj(s);
            rows.push_back(row);
          }
        for (auto& t : twisted_matrix()) {
          auto c = verify_twisted_reduction(t.a, t.b, t.c, t.d, t.r, s, t.omega, t.v, 10000);
          fails += c.pass() ? 0 : 1;
          json row = check_json(c);
          row["identity"] = "twisted";
          row["s"] = cj(s);
          rows.push_back(row);
        }
      }
      out = {{"checks", rows.size()}, {"failures", fails}, {"rows", rows}};
      ctx.failed = fails > 0;
      ctx.text = std::to_string(rows.size()) + " checks, " + std::to_string(fails) + " failures";
    } else {
      json p;
      try {
        p = json::parse(params_text);
      } catch (const json::exception& e) {
        throw usage_error(std::string("--params is not valid JSON: ") + e.what());
      }
      auto g = [&](const char* k, const char* dflt) { return parse_g(p.value(k, std::string(dflt))); };
      cplx s = 2.0;
      if (p.contains("s")) {
        if (p["s"].is_array()) s = cplx(p["s"][0].get<double>(), p["s"][1].get<double>());
        else s = p["s"].get<double>();
      }
      gint rnum = g("r", "1");
      lam2_elem r = p.value("r_over_lambda2", false) ? lam2_elem::over_lambda2(rnum) : lam2_elem::integral(rnum);
      int w = p.value("omega", 0);
      gint v = g("v", "1");
      std::int64_t cut = p.value("cutoff", std::int64_t(10000));
      auto sign = p.value("sign", std::string("corrected")) == "uncorrected" ? reduction_sign::uncorrected : reduction_sign::corrected;
      int part = identity_part_arg(identity);
      identity_check c;
      if (part < 4) {
        static const reduction_part parts[] = {reduction_part::i, reduction_part::ii, reduction_part::iii, reduction_part::iv};
        c = verify_reduction(parts[part], g("alpha", "1"), g("beta", "1"), r, s, w, v, cut, sign);
      } else {
        c = verify_twisted_reduction(g("a", "1"), g("b", "1"), g("c", "1"), g("d", "1"), r, s, w, v, cut, sign);
      }
      out = check_json(c);
      out["identity"] = identity;
      out["params"] = p;
      ctx.failed = !c.pass();
      ctx.text = std::string(c.pass() ? "PASS" : "FAIL") + " discrepancy " + format_double(c.discrepancy) + " bound " +
                 format_double(c.bound);
    }
    ctx.result = out;
  });
  ps->add_option("--identity", identity, "Reduction identity: i, ii, iii, iv or twisted");
  ps->add_option("--params", params_text,
                 "JSON object: alpha, beta | a, b, c, d, r, r_over_lambda2, s (number or [re, im]), omega, v, cutoff, sign");
  ps->add_flag("--matrix", matrix, "Run the fixed parameter matrix at s = 2, 2.5, 2+i");

  // euler-const
  std::string ename = "D";
  std::int64_t P = 100000;
  auto* ec = sub("euler-const", "Main-term Euler-product constants C_omega and D_omega", "text", [&] {
    auto v = euler_constant(ename == "C" ? euler_name::C : euler_name::D, omega, P);
    ctx.result = {{"name", ename}, {"omega", omega}, {"P", P}, {"value", cj(v.value)}, {"tail_bound", v.tail_bound}, {"primes", v.primes}};
    ctx.text = format_double(v.value.real()) + " " + format_double(v.value.imag()) + " tail " + format_double(v.tail_bound);
  });
  ec->add_option("--name", ename, "Constant")->check(CLI::IsMember({"C", "D"}));
  ec->add_option("--omega", omega, "Frequency");
  ec->add_option("--P", P, "Prime-norm cutoff");

  // moment
  double X = 1000, Y = 1.0, U = 1.0;
  std::int64_t Mm = 10;
  auto* mo = sub("moment", "Mollified first and second moments over the window (X, 2X)", "json", [&] {
    auto r = mollified_moments(X, Mm, Y, U, omega, ctx.family());
    ctx.result = {{"X", r.X},
                  {"M", r.M},
                  {"Y", r.Y},
                  {"U", r.U},
                  {"omega", r.omega},
                  {"theta", r.theta},
                  {"family_size", r.family_size},
                  {"weight", r.weight},
                  {"S1", cj(r.S1)},
                  {"S1_err", r.S1_err},
                  {"S2", r.S2},
                  {"S2_err", r.S2_err},
                  {"S1_plain", cj(r.S1_plain)},
                  {"S2_plain", r.S2_plain},
                  {"cs_ratio", r.cs_ratio},
                  {"predicted_first", cj(r.predicted_first)},
                  {"predicted_first_limit", r.predicted_first_limit},
                  {"predicted_second_limit", r.predicted_second_limit},
                  {"roundtrip_error", r.roundtrip_error},
                  {"warning", r.warning},
                  {"stats", stats_json(r.stats)}};
    ctx.text = "cs_ratio " + format_double(r.cs_ratio) + " over " + std::to_string(r.family_size) + " members";
  });
  mo->add_option("--X", X, "Window start")->check(CLI::PositiveNumber);
  mo->add_option("--M", Mm, "Mollifier length")->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 40));
  mo->add_option("--Y", Y, "Sieve parameter")->check(CLI::PositiveNumber);
  mo->add_option("--U", U, "Balance parameter")->check(CLI::PositiveNumber);
  mo->add_option("--omega", omega, "Frequency");

  // scan
  std::vector<double> Xs{1000};
  auto* sc = sub("scan", "Second moment S2 over windows (X, 2X) of the squarefree family", "json", [&] {
    auto opt = ctx.family();
    auto rep = second_moment_experiment(Xs, omega, opt);
    json wins = json::array();
    for (auto& w : rep.windows)
      wins.push_back({{"X", w.X}, {"family_size", w.family_size}, {"weight", w.weight}, {"S2", w.S2}, {"S2_err", w.S2_err},
                      {"S1", cj(w.S1)}, {"S1_err", w.S1_err}, {"ratio", w.ratio}});
    ctx.result = {{"omega", rep.omega}, {"bump", rep.bump},     {"F_check_0", rep.fcheck0}, {"C", cj(rep.C)},
                  {"D", rep.D},         {"windows", wins},      {"slope", rep.slope},       {"intercept", rep.intercept},
                  {"stats", stats_json(rep.stats)}};
    std::ostringstream os;
    for (auto& w : rep.windows) os << "X=" << format_double(w.X) << " n=" << w.family_size << " ratio=" << format_double(w.ratio) << '\n';
    ctx.text = os.str();
    if (ctx.format == "csv" || !ctx.csv_path.empty()) {
      std::vector<gint> qs;
      for (double x : Xs)
        for (auto& q : family_window(x, 2 * x, omega)) qs.push_back(q);
      ctx.records = family_values(qs, omega, opt);
      ctx.has_records = true;
    }
  });
  sc->add_option("--X", Xs, "Window starts")->expected(1, 16)->check(CLI::PositiveNumber);
  sc->add_option("--omega", omega, "Frequency");

  // census
  double threshold = default_census_threshold;
  auto* ce = sub("census", "Nonvanishing census of central values over N(q) <= X", "json", [&] {
    auto rep = nonvanishing_census(X, omega, threshold, ctx.family());
    ctx.result = {{"X", rep.X},
                  {"omega", rep.omega},
                  {"threshold", rep.threshold},
                  {"total", rep.total},
                  {"nonzero", rep.nonzero},
                  {"small", rep.small},
                  {"undecidable", rep.undecidable},
                  {"proportion", rep.proportion},
                  {"undecidable_fraction", rep.undecidable_fraction},
                  {"stats", stats_json(rep.stats)}};
    ctx.records = rep.records;
    ctx.has_records = true;
    ctx.text = "proportion " + format_double(rep.proportion) + " of " + std::to_string(rep.total);
  });
  ce->add_option("--X", X, "Norm bound")->check(CLI::PositiveNumber);
  ce->add_option("--omega", omega, "Frequency");
  ce->add_option("--threshold", threshold, "Nonvanishing threshold")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!ctx.no_cache && !ctx.cache_dir.empty()) {
      fs::create_directories(ctx.cache_dir);
      ctx.cache = std::make_unique<record_cache>(fs::path(ctx.cache_dir) / "central_values.txt");
    }
    if (ctx.format == "auto") ctx.format = default_format;
    action();
    if (ctx.format == "csv" && !ctx.has_records) throw usage_error("--format csv applies to lvalue, scan and census");
    if (!ctx.csv_path.empty()) {
      if (!ctx.has_records) throw usage_error("--csv applies to lvalue, scan and census");
      std::ofstream f(ctx.csv_path);
      write_csv(f, ctx.records);
    }
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  if (ctx.format == "text") {
    std::cout << ctx.text;
    if (ctx.text.empty() || ctx.text.back() != '\n') std::cout << '\n';
  } else if (ctx.format == "csv") {
    write_csv(std::cout, ctx.records);
  } else {
    json cfg = {{"command", chosen->get_name()}, {"options", config_echo(*chosen)}, {"threads", ctx.threads}};
    cfg["cache_dir"] = ctx.cache ? ctx.cache_dir : "";
    json hashes = json::object();
    for (auto& [k, v] : module_hashes()) hashes[k] = v;
    json cache = nullptr;
    if (ctx.cache) cache = {{"path", ctx.cache->path().string()}, {"records", ctx.cache->size()}, {"sha1", sha1_file(ctx.cache->path())}};
    json report = {{"schema", schema}, {"config", cfg}, {"module_hashes", hashes}, {"cache", cache}, {"result", ctx.result}};
    std::cout << report.dump(2) << '\n';
  }
  return ctx.failed ? 1 : 0;
}
