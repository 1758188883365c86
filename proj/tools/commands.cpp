#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "rsavg/averages.hpp"
#include "rsavg/checks.hpp"
#include "rsavg/heckechar.hpp"
#include "rsavg/newform.hpp"
#include "rsavg/quadfield.hpp"

namespace rsavg::cli {

using nlohmann::json;

namespace {

struct VerifyFailure {};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no NaN: absent values become null
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int parse_int(const std::string& s, const char* name) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw InputError(std::string("bad value for ") + name + ": '" + s + "'");
  return v;
}

// exact label of a root of unity: 1, -1 or e(num/order)
std::string root_label(const RootOfUnity& z) {
  if (z.order() == 1) return "1";
  if (z.order() == 2) return "-1";
  return "e(" + std::to_string(z.num()) + "/" + std::to_string(z.order()) + ")";
}

std::string tame_label(const std::vector<RootOfUnity>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ';';
    s += root_label(t[i]);
  }
  return s.empty() ? "1" : s;
}

bool is_forced_zero(const HeckeCharacterW& W, int k) {
  return k == 0 && W.self_dual && W.root_number == RootOfUnity(1, 2);
}

std::string value_verdict(const HeckeCharacterW& W, int k, cplx v, double cert) {
  if (is_forced_zero(W, k)) return "forced-zero";
  return std::abs(v) > cert ? "nonzero" : "indeterminate";
}

class Session {
 public:
  explicit Session(const RunConfig& c) : cfg(c), K(c.disc), kernel(parse_kernel(c.kernel)) {
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw InputError("tol must lie in (0, 1)");
    if (cfg.format != "csv" && cfg.format != "json") throw InputError("format must be csv or json");
    if (cfg.depletion != "top" && cfg.depletion != "own" && cfg.depletion != "both")
      throw InputError("depletion must be top, own or both");
    if (!cfg.seeds_path.empty() && !cfg.curve.empty()) throw InputError("give --seeds or --curve, not both");
    if (!cfg.seeds_path.empty()) {
      file_seeds = read_seeds_file(cfg.seeds_path);
      N = file_seeds->level;
      source = "seeds " + cfg.seeds_path;
    } else {
      curve = WeierstrassCurve::parse(cfg.curve.empty() ? kDefaultCurve : cfg.curve);
      N = curve->semistable_conductor();
      source = "curve " + curve->str();
    }
    check_hypotheses(K, N, cfg.prime);
    opt.tol = cfg.tol;
    opt.kernel = kernel;
  }

  // coefficient table of length at least n
  void prepare(std::uint64_t n) {
    if (n > cfg.n_cap) throw ResourceLimit("tolerance needs " + std::to_string(n) + " coefficients, above n-cap");
    n = std::max<std::uint64_t>(n, 2);
    if (file_seeds) {
      if (!file_seeds->covers(n))
        throw InputError("seed file covers primes up to " + std::to_string(file_seeds->bound) + ", " +
                         std::to_string(n) + " needed");
      seeds = *file_seeds;
    } else {
      seeds = seeds_from_curve(*curve, n);
    }
    table = std::make_unique<NewformTable>(build_table(seeds, n));
  }

  void echo(std::ostream& out) const {
    const auto cfgj = config_json();
    if (cfg.format == "json") {
      out << json{{"config", cfgj}}.dump() << '\n';
      return;
    }
    for (auto it = cfgj.begin(); it != cfgj.end(); ++it)
      out << "# " << it.key() << " = " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
  }

  json config_json() const {
    json j;
    j["command"] = cfg.command;
    j["source"] = source;
    j["level"] = N;
    j["disc"] = cfg.disc;
    j["prime"] = cfg.prime;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["k"] = cfg.k;
    j["tol"] = num(cfg.tol);
    j["depletion"] = cfg.depletion;
    j["kernel"] = cfg.kernel;
    j["n_cap"] = cfg.n_cap;
    if (cfg.command == "havg") j["sym2_x"] = num(cfg.sym2_x);
    if (cfg.command == "lvalue") {
      j["rho"] = cfg.rho;
      j["chi"] = cfg.chi;
    }
    if (cfg.command == "diag") {
      j["kind"] = cfg.kind;
      if (cfg.kind == "shortsum") {
        j["b"] = cfg.b;
        j["x_max"] = cfg.x_max;
      } else {
        j["eps"] = num(cfg.eps_weight);
        j["gamma"] = num(cfg.gamma_weight);
      }
    }
    return j;
  }

  const RunConfig& cfg;
  ImagQuadField K;
  Kernel kernel;
  PassOptions opt;
  i64 N = 0;
  std::string source;
  std::optional<Seeds> file_seeds;
  std::optional<WeierstrassCurve> curve;
  Seeds seeds;
  std::unique_ptr<NewformTable> table;
};

// ---- lvalue ----------------------------------------------------------------

int cmd_lvalue(const RunConfig& cfg, std::ostream& out) {
  Session S(cfg);
  auto [a0, a1] = parse_range(cfg.alpha, "alpha");
  auto [b0, b1] = parse_range(cfg.beta, "beta");
  if (a0 != a1 || b0 != b1) throw InputError("lvalue needs single values for --alpha and --beta");
  const auto ks = parse_k(cfg.k);
  auto F = enumerate_family(S.K, S.N, cfg.prime, a0, b0);
  const i64 phi_q = euler_phi(F.q());
  if (cfg.rho < 0 || cfg.rho >= F.group()->size()) throw InputError("rho index out of range");
  if (cfg.chi < 0 || cfg.chi >= phi_q) throw InputError("chi index out of range");
  const auto& W = F.members()[static_cast<std::size_t>(cfg.rho) * phi_q + cfg.chi];

  const double level = static_cast<double>(S.N) * static_cast<double>(-S.K.disc()) *
                       std::pow(static_cast<double>(cfg.prime), 2.0 * (W.x + W.y));
  std::uint64_t need = 1;
  for (int k : ks) need = std::max(need, truncation_length(k + 1, std::max(level, 1.0), cfg.tol, S.kernel).n_max);
  S.prepare(need);
  S.echo(out);

  std::vector<std::pair<std::string, i64>> deps;
  if (cfg.depletion != "own") deps.emplace_back("top", top_depletion(cfg.prime, a0, b0));
  if (cfg.depletion != "top") deps.emplace_back("own", 0);

  if (cfg.format == "csv")
    out << "p,alpha,beta,rho,chi,x,y,k,depletion,value_re,value_im,certificate,root_number,classification,verdict\n";
  for (int k : ks) {
    std::vector<CentralValue> vals;
    for (auto& [name, M] : deps) vals.push_back(central_value(F, W, *S.table, k, M, cfg.tol, cfg.n_cap, S.kernel));
    const std::string cls = W.exceptional ? "exceptional" : "generic";
    const std::string eps = root_label(W.root_number);
    if (cfg.format == "csv") {
      for (std::size_t i = 0; i < deps.size(); ++i)
        out << cfg.prime << ',' << a0 << ',' << b0 << ',' << cfg.rho << ',' << cfg.chi << ',' << W.x << ',' << W.y
            << ',' << k << ',' << deps[i].first << ',' << num(vals[i].value.real()) << ',' << num(vals[i].value.imag())
            << ',' << num(vals[i].certificate) << ',' << eps << ',' << cls << ','
            << value_verdict(W, k, vals[i].value, vals[i].certificate) << '\n';
      continue;
    }
    json j;
    j["p"] = cfg.prime;
    j["alpha"] = a0;
    j["beta"] = b0;
    j["rho"] = cfg.rho;
    j["chi"] = cfg.chi;
    j["x"] = W.x;
    j["y"] = W.y;
    j["k"] = k;
    j["self_dual"] = W.self_dual;
    j["classification"] = cls;
    j["root_number"] = {{"re", W.root_number.value().real()}, {"im", W.root_number.value().imag()}};
    j["root_number_exact"] = eps;
    for (std::size_t i = 0; i < deps.size(); ++i) {
      const auto& v = vals[i];
      j[deps[i].first] = {{"value", v.value.real()},
                          {"value_imag", v.value.imag()},
                          {"certificate", v.certificate},
                          {"n_max", v.n_max},
                          {"level_exponent", v.level_exponent},
                          {"verdict", value_verdict(W, k, v.value, v.certificate)}};
    }
    if (deps.size() == 2 && std::abs(vals[1].value) > vals[1].certificate) {
      const cplx r = vals[0].value / vals[1].value;
      j["ratio_top_own"] = {{"re", r.real()}, {"im", r.imag()}};
    }
    out << j.dump() << '\n';
  }
  return 0;
}

// ---- family averages ---------------------------------------------------------

struct Grid {
  int a0, a1, b0, b1;
  std::vector<int> ks;
  std::unique_ptr<FamilyGrid> G;
};

Grid make_grid(Session& S, std::uint64_t extra_need) {
  Grid g;
  std::tie(g.a0, g.a1) = parse_range(S.cfg.alpha, "alpha");
  std::tie(g.b0, g.b1) = parse_range(S.cfg.beta, "beta");
  g.ks = parse_k(S.cfg.k);
  const auto need = pass_table_length(S.K, S.N, S.cfg.prime, g.a1, g.b1, S.opt);
  S.prepare(std::max(need, extra_need));
  g.G = std::make_unique<FamilyGrid>(S.K, *S.table, S.N, S.cfg.prime, g.a1, g.b1, S.opt);
  return g;
}

// mean of the own-conductor central values over X_{p^a, p^b}
std::pair<cplx, double> own_average(const Session& S, const FamilyPass& P, int a, int b, int k) {
  CompensatedSum<cplx> s;
  double c = 0.0;
  const auto idx = P.family().subfamily(a, b);
  for (int i : idx) {
    auto v = central_value(P.family(), P.family().members()[i], *S.table, k, 0, S.cfg.tol, S.cfg.n_cap, S.kernel);
    s.add(v.value);
    c += v.certificate;
  }
  const double h = static_cast<double>(idx.size());
  return {s.value() / h, c / h};
}

int cmd_havg(const RunConfig& cfg, std::ostream& out) {
  Session S(cfg);
  const auto sym2_need = static_cast<std::uint64_t>(14.0 * cfg.sym2_x) + 2;
  auto g = make_grid(S, sym2_need);
  S.echo(out);
  const int wN = S.K.omega(S.N);
  std::map<i64, MainTermInputs> inputs;
  auto in = [&](i64 c) -> const MainTermInputs& {
    auto it = inputs.find(c);
    if (it == inputs.end()) it = inputs.emplace(c, main_term_inputs(S.seeds, S.K, c, cfg.sym2_x)).first;
    return it->second;
  };
  auto main_term = [&](int a, int b, int k) {
    const i64 c = ipow(cfg.prime, a), q = ipow(cfg.prime, b);
    if (b == 0 && k == 0) return wN == 1 ? 0.0 : main_term_generic(in(c));
    if (b == 0 && k == 1 && wN == 1)
      return main_term_exceptional(in(c), S.N, static_cast<double>(-S.K.disc()) * static_cast<double>(c * c));
    if (b >= 1 && k == 0) return main_term_cyclotomic(S.K, S.N, q);
    return std::nan("");
  };

  if (cfg.format == "csv") out << "p,alpha,beta,k,H_direct,H_formula,residual,main_term,verdict\n";
  for (int a = g.a0; a <= g.a1; ++a)
    for (int b = g.b0; b <= g.b1; ++b)
      for (int k : g.ks) {
        const auto& P = g.G->pass_for(a, b);
        const cplx Hd = P.H_direct(a, b, k);
        const double Hf = P.H_formula(a, b, k);
        const double res = std::abs(Hd - Hf);
        const double M = main_term(a, b, k);
        const std::string verdict = family_verdict(P, a, b, k);
        if (cfg.format == "csv") {
          out << cfg.prime << ',' << a << ',' << b << ',' << k << ',' << num(Hd.real()) << ',' << num(Hf) << ','
              << num(res) << ',' << num(M) << ',' << verdict << '\n';
          continue;
        }
        json j;
        j["p"] = cfg.prime;
        j["alpha"] = a;
        j["beta"] = b;
        j["k"] = k;
        j["family_size"] = P.family_size(a, b);
        j["H_direct"] = Hd.real();
        j["H_direct_imag"] = Hd.imag();
        j["H_formula"] = Hf;
        j["residual"] = res;
        j["certificate"] = 2.0 * P.family_certificate(a, b, k) / static_cast<double>(P.family_size(a, b));
        j["main_term"] = jnum(M);
        j["verdict"] = verdict;
        j["H_decomposed_both_below"] = P.H_decomposed(a, b, k, ErrorIndexing::kBothBelow);
        j["H_decomposed_self_dual_row"] = P.H_decomposed(a, b, k, ErrorIndexing::kSelfDualRow);
        if (cfg.depletion != "top") {
          auto [Ho, co] = own_average(S, P, a, b, k);
          j["H_own"] = Ho.real();
          j["H_own_imag"] = Ho.imag();
          j["own_certificate"] = co;
        }
        out << j.dump() << '\n';
      }
  return 0;
}

int cmd_gavg(const RunConfig& cfg, std::ostream& out) {
  Session S(cfg);
  if (class_number(S.K.disc(), 1) % cfg.prime == 0) throw InputError("Galois averages need p prime to h(O_K)");
  auto g = make_grid(S, 0);
  S.echo(out);
  if (cfg.format == "csv") out << "p,alpha,beta,k,tame,size,delta_re,delta_im,certificate\n";
  for (int a = g.a0; a <= g.a1; ++a)
    for (int b = g.b0; b <= g.b1; ++b)
      for (int k : g.ks) {
        const auto& P = g.G->pass_for(a, b);
        for (const auto& e : galois_averages(P, a, b, k)) {
          if (e.x != a || e.y != b) continue;
          if (cfg.format == "csv") {
            out << cfg.prime << ',' << a << ',' << b << ',' << k << ',' << tame_label(e.tame) << ',' << e.size << ','
                << num(e.delta.real()) << ',' << num(e.delta.imag()) << ',' << num(e.certificate) << '\n';
            continue;
          }
          json j;
          j["p"] = cfg.prime;
          j["alpha"] = a;
          j["beta"] = b;
          j["k"] = k;
          j["tame"] = tame_label(e.tame);
          j["size"] = e.size;
          j["delta"] = e.delta.real();
          j["delta_imag"] = e.delta.imag();
          j["certificate"] = e.certificate;
          out << j.dump() << '\n';
        }
      }
  return 0;
}

int cmd_table(const RunConfig& cfg, std::ostream& out) {
  Session S(cfg);
  auto g = make_grid(S, 0);
  const bool galois = g.G->pass_for(0, 0).family().has_tame_parts();
  S.echo(out);
  const char* cols[] = {"p",  "alpha", "beta", "k",  "family_size", "H_direct", "H_formula", "H_decomposed_both_below",
                        "H_decomposed_self_dual_row", "R1", "R2", "R3", "certificate", "verdict"};
  if (cfg.format == "csv") {
    for (std::size_t i = 0; i < std::size(cols); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
  }
  for (int a = g.a0; a <= g.a1; ++a)
    for (int b = g.b0; b <= g.b1; ++b)
      for (int k : g.ks) {
        const auto& P = g.G->pass_for(a, b);
        RelationResiduals R{std::nan(""), std::nan(""), std::nan(""), std::nan("")};
        if (galois) R = relation_residuals(P, a, b, k);
        const double cert = 2.0 * P.family_certificate(a, b, k) / static_cast<double>(P.family_size(a, b));
        const double vals[] = {P.H_direct(a, b, k).real(),
                               P.H_formula(a, b, k),
                               P.H_decomposed(a, b, k, ErrorIndexing::kBothBelow),
                               P.H_decomposed(a, b, k, ErrorIndexing::kSelfDualRow),
                               R.R1,
                               R.R2,
                               R.R3,
                               cert};
        const std::string verdict = family_verdict(P, a, b, k);
        if (cfg.format == "csv") {
          out << cfg.prime << ',' << a << ',' << b << ',' << k << ',' << P.family_size(a, b);
          for (double v : vals) out << ',' << num(v);
          out << ',' << verdict << '\n';
          continue;
        }
        json j;
        j["p"] = cfg.prime;
        j["alpha"] = a;
        j["beta"] = b;
        j["k"] = k;
        j["family_size"] = P.family_size(a, b);
        for (std::size_t i = 0; i < std::size(vals); ++i) j[cols[5 + i]] = jnum(vals[i]);
        j["verdict"] = verdict;
        out << j.dump() << '\n';
      }
  return 0;
}

// ---- diagnostics -----------------------------------------------------------

int cmd_diag(const RunConfig& cfg, std::ostream& out) {
  Session S(cfg);
  if (cfg.kind == "shortsum") {
    if (cfg.b < 1 || cfg.x_max < 1) throw InputError("shortsum needs b >= 1 and x-max >= 1");
    S.prepare(cfg.x_max * cfg.x_max + static_cast<std::uint64_t>(cfg.b * cfg.b * -S.K.disc()));
    S.echo(out);
    auto T = short_sum_diag(*S.table, S.K, cfg.b, cfg.x_max);
    if (cfg.format == "csv") {
      out << "x,S,S_over_x\n";
      for (const auto& r : T.rows)
        out << r.x << ',' << num(r.S) << ',' << num(r.S / static_cast<double>(r.x)) << '\n';
      out << "# exponent = " << num(T.exponent) << '\n';
    } else {
      for (const auto& r : T.rows) out << json{{"x", r.x}, {"S", r.S}}.dump() << '\n';
      out << json{{"exponent", T.exponent}}.dump() << '\n';
    }
    return 0;
  }
  if (cfg.kind != "difference") throw InputError("diag kind must be shortsum or difference");
  auto g = make_grid(S, 0);
  S.echo(out);
  if (cfg.format == "csv")
    out << "p,alpha,beta,k,direct,factored,factorization_exact,theta,J0,measured,leading_chi,leading_chi2,certificate\n";
  for (int a = std::max(g.a0, 1); a <= g.a1; ++a)
    for (int b = g.b0; b <= g.b1; ++b)
      for (int k : g.ks) {
        auto d = difference_sum(g.G->pass_for(a, b), a, b, k, cfg.eps_weight, cfg.gamma_weight);
        if (cfg.format == "csv") {
          out << cfg.prime << ',' << a << ',' << b << ',' << k << ',' << num(d.direct) << ',' << num(d.factored) << ','
              << (d.factorization_exact ? "true" : "false") << ',' << num(d.theta) << ',' << num(d.J0) << ','
              << num(d.measured) << ',' << num(d.leading_chi) << ',' << num(d.leading_chi2) << ','
              << num(d.certificate) << '\n';
          continue;
        }
        out << json{{"p", cfg.prime},
                    {"alpha", a},
                    {"beta", b},
                    {"k", k},
                    {"direct", d.direct},
                    {"factored", d.factored},
                    {"factorization_exact", d.factorization_exact},
                    {"theta", d.theta},
                    {"J0", d.J0},
                    {"measured", d.measured},
                    {"leading_chi", d.leading_chi},
                    {"leading_chi2", d.leading_chi2},
                    {"certificate", d.certificate}}
                   .dump()
            << '\n';
      }
  return 0;
}

// ---- verification suites -----------------------------------------------------

void report(std::ostream& out, const std::string& name, const CheckResult& r, bool& ok) {
  out << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << '\n';
  ok = ok && r.pass;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  bool ok = true;
  const std::string& s = cfg.suite;
  if (s == "counting") {
    report(out, "ideal counts vs divisor sums", check_counting({-7, -11, -23}, 100000), ok);
    report(out, "order ideal counts", check_ring_counts({-7, -11, -23}, {3, 9, 5}, 10000), ok);
    report(out, "class numbers", check_class_numbers({-7, -11, -19, -23, -43}, {1, 3, 9, 27, 5, 25}), ok);
  } else if (s == "cutoff") {
    report(out, "cutoff kernels", check_cutoff(60, 100, 20240601), ok);
  } else if (s == "afe" || s == "haf" || s == "mobius") {
    Session S(cfg);
    auto [a0, a1] = parse_range(cfg.alpha, "alpha");
    auto [b0, b1] = parse_range(cfg.beta, "beta");
    (void)a0;
    (void)b0;
    if (s == "afe") {
      const double level = static_cast<double>(S.N) * static_cast<double>(-S.K.disc()) *
                           std::pow(static_cast<double>(cfg.prime), 2.0 * a1);
      S.prepare(truncation_length(1, level, cfg.tol, S.kernel).n_max);
      report(out, "forced zeros", check_forced_zero(S.K, *S.table, S.N, cfg.prime, a1, cfg.tol, 4.0 * cfg.tol), ok);
    } else {
      S.prepare(pass_table_length(S.K, S.N, cfg.prime, a1, b1, S.opt));
      FamilyGrid G(S.K, *S.table, S.N, cfg.prime, a1, b1, S.opt);
      const bool galois = s == "mobius";
      if (galois && !G.pass_for(0, 0).family().has_tame_parts())
        throw InputError("Galois averages need p prime to h(O_K)");
      auto rows = grid_rows(G, a1, b1, galois);
      if (s == "haf")
        report(out, "direct vs closed-form averages", check_haf(rows, 1e-6), ok);
      else
        report(out, "Moebius relations", check_mobius(rows), ok);
    }
  } else {
    throw InputError("unknown suite '" + s + "' (afe, haf, mobius, cutoff, counting)");
  }
  return ok ? 0 : 1;
}

}  // namespace

std::pair<int, int> parse_range(const std::string& s, const char* name) {
  auto dots = s.find("..");
  int lo, hi;
  if (dots == std::string::npos) {
    lo = hi = parse_int(s, name);
  } else {
    lo = parse_int(s.substr(0, dots), name);
    hi = parse_int(s.substr(dots + 2), name);
  }
  if (lo < 0 || hi < lo) throw InputError(std::string("bad range for ") + name + ": '" + s + "'");
  return {lo, hi};
}

std::vector<int> parse_k(const std::string& s) {
  if (s == "both") return {0, 1};
  if (s == "0") return {0};
  if (s == "1") return {1};
  throw InputError("k must be 0, 1 or both");
}

Kernel parse_kernel(const std::string& s) {
  if (s == "degree2") return Kernel::kDegree2;
  if (s == "degree4") return Kernel::kDegree4;
  throw InputError("kernel must be degree2 or degree4");
}

int run(const RunConfig& cfg, std::ostream& out) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  try {
    if (cfg.command == "lvalue") return cmd_lvalue(cfg, out);
    if (cfg.command == "havg") return cmd_havg(cfg, out);
    if (cfg.command == "gavg") return cmd_gavg(cfg, out);
    if (cfg.command == "table") return cmd_table(cfg, out);
    if (cfg.command == "diag") return cmd_diag(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    throw InputError("unknown command '" + cfg.command + "'");
  } catch (const ResourceLimit& e) {
    std::cerr << "rsavg: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "rsavg: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rsavg: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "rsavg: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "rsavg: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    // truncation searches give up when the tolerance cannot be met
    std::cerr << "rsavg: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace rsavg::cli
