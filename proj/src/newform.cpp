#include "rsavg/newform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace rsavg {

WeierstrassCurve WeierstrassCurve::parse(const std::string& s) {
  std::vector<i64> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    i64 x = 0;
    auto first = tok.data() + tok.find_first_not_of(' ');
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw InputError("curve coefficients: cannot parse '" + tok + "'");
    v.push_back(x);
  }
  if (v.size() != 5) throw InputError("curve coefficients: expected a1,a2,a3,a4,a6");
  return {v[0], v[1], v[2], v[3], v[4]};
}

namespace {
struct BQuant {
  __int128 b2, b4, b6, b8;
};
BQuant bq(const WeierstrassCurve& E) {
  __int128 a1 = E.a1, a2 = E.a2, a3 = E.a3, a4 = E.a4, a6 = E.a6;
  return {a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6,
          a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4};
}
}  // namespace

__int128 WeierstrassCurve::discriminant() const {
  auto [b2, b4, b6, b8] = bq(*this);
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

i64 WeierstrassCurve::c4() const {
  auto q = bq(*this);
  return static_cast<i64>(q.b2 * q.b2 - 24 * q.b4);
}

i64 WeierstrassCurve::c6() const {
  auto q = bq(*this);
  return static_cast<i64>(-q.b2 * q.b2 * q.b2 + 36 * q.b2 * q.b4 - 216 * q.b6);
}

i64 WeierstrassCurve::semistable_conductor() const {
  __int128 d = discriminant();
  if (d == 0) throw InputError("curve is singular");
  if (d < 0) d = -d;
  i64 N = 1;
  for (i64 p = 2; d > 1; ++p) {
    if (p * p > d) {
      if (d > (static_cast<__int128>(1) << 62)) throw InputError("curve discriminant too large to factor");
      p = static_cast<i64>(d);
    }
    if (d % p != 0) continue;
    while (d % p == 0) d /= p;
    if (c4() % p == 0) throw InputError("curve has additive reduction at " + std::to_string(p));
    N *= p;
  }
  return N;
}

std::string WeierstrassCurve::str() const {
  std::ostringstream o;
  o << a1 << ',' << a2 << ',' << a3 << ',' << a4 << ',' << a6;
  return o.str();
}

i64 ap_naive(const WeierstrassCurve& E, i64 p) {
  if (p == 2) {
    i64 cnt = 0;
    for (i64 x = 0; x < 2; ++x)
      for (i64 y = 0; y < 2; ++y) {
        i64 lhs = y * y + E.a1 * x * y + E.a3 * y;
        i64 rhs = x * x * x + E.a2 * x * x + E.a4 * x + E.a6;
        if (mod(lhs - rhs, 2) == 0) ++cnt;
      }
    return p - cnt;
  }
  // (2y + a1 x + a3)^2 = g(x), so #y = 1 + (g(x)/p)
  i64 s = 0;
  i64 a1 = mod(E.a1, p), a2 = mod(E.a2, p), a3 = mod(E.a3, p), a4 = mod(E.a4, p), a6 = mod(E.a6, p);
  for (i64 x = 0; x < p; ++x) {
    i64 cub = ((x * x % p * x + a2 * x % p * x + a4 * x + a6) % p);
    i64 lin = (a1 * x + a3) % p;
    i64 g = (4 * cub + lin * lin) % p;
    s += jacobi(g, p);
  }
  return -s;
}

namespace {

// Montgomery arithmetic modulo an odd n < 2^31
struct Mont {
  std::uint32_t n, ninv, r2;
  explicit Mont(std::uint32_t n_) : n(n_) {
    std::uint32_t inv = n;
    for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
    ninv = -inv;
    r2 = static_cast<std::uint32_t>((static_cast<unsigned __int128>(1) << 64) % n);
  }
  std::uint32_t reduce(std::uint64_t t) const {
    std::uint32_t m = static_cast<std::uint32_t>(t) * ninv;
    std::uint64_t u = (t + static_cast<std::uint64_t>(m) * n) >> 32;
    return static_cast<std::uint32_t>(u >= n ? u - n : u);
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return reduce(static_cast<std::uint64_t>(a) * b); }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t s = a + b;
    return s >= n ? s - n : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + n - b; }
  std::uint32_t to(std::uint64_t a) const { return mul(static_cast<std::uint32_t>(a % n), r2); }
  std::uint32_t from(std::uint32_t a) const { return reduce(a); }
  std::uint32_t inv(std::uint32_t a) const {
    i64 x = invmod(from(a), n);
    return to(static_cast<std::uint64_t>(x));
  }
};

struct Jac {
  std::uint32_t X, Y, Z;  // Z == 0 is the point at infinity
};
struct Aff {
  std::uint32_t x, y;
};

struct ShortCurve {
  const Mont& M;
  std::uint32_t A;  // Montgomery form

  Jac dbl(const Jac& P) const {
    if (P.Z == 0 || P.Y == 0) return {0, 0, 0};
    std::uint32_t XX = M.mul(P.X, P.X), YY = M.mul(P.Y, P.Y), YYYY = M.mul(YY, YY), ZZ = M.mul(P.Z, P.Z);
    std::uint32_t S = M.mul(P.X, YY);
    S = M.add(S, S);
    S = M.add(S, S);
    std::uint32_t Mm = M.add(M.add(XX, XX), XX);
    Mm = M.add(Mm, M.mul(A, M.mul(ZZ, ZZ)));
    std::uint32_t X3 = M.sub(M.mul(Mm, Mm), M.add(S, S));
    std::uint32_t Y8 = M.add(YYYY, YYYY);
    Y8 = M.add(Y8, Y8);
    Y8 = M.add(Y8, Y8);
    std::uint32_t Y3 = M.sub(M.mul(Mm, M.sub(S, X3)), Y8);
    std::uint32_t Z3 = M.mul(P.Y, P.Z);
    Z3 = M.add(Z3, Z3);
    return {X3, Y3, Z3};
  }

  Jac add_aff(const Jac& P, const Aff& Q) const {
    if (P.Z == 0) return {Q.x, Q.y, M.to(1)};
    std::uint32_t Z1Z1 = M.mul(P.Z, P.Z);
    std::uint32_t U2 = M.mul(Q.x, Z1Z1);
    std::uint32_t S2 = M.mul(Q.y, M.mul(P.Z, Z1Z1));
    std::uint32_t H = M.sub(U2, P.X), r = M.sub(S2, P.Y);
    if (H == 0) {
      if (r == 0) return dbl(P);
      return {0, 0, 0};
    }
    std::uint32_t HH = M.mul(H, H), HHH = M.mul(H, HH), V = M.mul(P.X, HH);
    std::uint32_t X3 = M.sub(M.sub(M.mul(r, r), HHH), M.add(V, V));
    std::uint32_t Y3 = M.sub(M.mul(r, M.sub(V, X3)), M.mul(P.Y, HHH));
    return {X3, Y3, M.mul(P.Z, H)};
  }

  Jac mul(const Aff& P, std::uint64_t k) const {
    Jac R{0, 0, 0};
    if (k == 0) return R;
    int top = 63 - __builtin_clzll(k);
    for (int i = top; i >= 0; --i) {
      R = dbl(R);
      if ((k >> i) & 1) R = add_aff(R, P);
    }
    return R;
  }

  Aff normalize(const Jac& P) const {
    std::uint32_t zi = M.inv(P.Z), zi2 = M.mul(zi, zi);
    return {M.mul(P.X, zi2), M.mul(P.Y, M.mul(zi2, zi))};
  }
};

// Affine normalization of many points with one inversion; infinity maps to
// x = y = n (an impossible residue).
void batch_normalize(const Mont& M, const std::vector<Jac>& pts, std::vector<Aff>& out) {
  std::size_t k = pts.size();
  out.resize(k);
  std::vector<std::uint32_t> pref(k + 1);
  std::uint32_t one = M.to(1);
  pref[0] = one;
  for (std::size_t i = 0; i < k; ++i) pref[i + 1] = pts[i].Z == 0 ? pref[i] : M.mul(pref[i], pts[i].Z);
  std::uint32_t inv = M.inv(pref[k]);
  for (std::size_t i = k; i-- > 0;) {
    if (pts[i].Z == 0) {
      out[i] = {M.n, M.n};
      continue;
    }
    std::uint32_t zi = M.mul(inv, pref[i]);
    inv = M.mul(inv, pts[i].Z);
    std::uint32_t zi2 = M.mul(zi, zi);
    out[i] = {M.mul(pts[i].X, zi2), M.mul(pts[i].Y, M.mul(zi2, zi))};
  }
}

std::vector<std::pair<std::uint64_t, int>> factor_small(std::uint64_t m) {
  static const std::vector<std::uint32_t> small = primes_upto(1 << 16);
  std::vector<std::pair<std::uint64_t, int>> f;
  for (std::uint32_t q : small) {
    if (static_cast<std::uint64_t>(q) * q > m) break;
    if (m % q) continue;
    int e = 0;
    while (m % q == 0) {
      m /= q;
      ++e;
    }
    f.emplace_back(q, e);
  }
  if (m > 1) f.emplace_back(m, 1);
  return f;
}

std::uint64_t exact_order(const ShortCurve& C, const Aff& P, std::uint64_t m) {
  std::uint64_t o = m;
  for (auto& [q, e] : factor_small(m)) {
    for (int k = 0; k < e; ++k) {
      if (C.mul(P, o / q).Z == 0)
        o /= q;
      else
        break;
    }
  }
  return o;
}

std::vector<std::uint64_t> multiples_in(std::uint64_t o, std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = (lo + o - 1) / o * o; m <= hi; m += o) out.push_back(m);
  return out;
}

// All m in [lo, hi] with mP = 0, ascending.
std::vector<std::uint64_t> find_multiples(const ShortCurve& C, const Aff& P, std::uint64_t lo,
                                          std::uint64_t hi) {
  const Mont& M = C.M;
  std::uint64_t width = hi - lo + 1;
  std::uint64_t s = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(width) / 2.0)));
  if (s < 1) s = 1;
  std::vector<Jac> baby;
  baby.reserve(s);
  Jac R{0, 0, 0};
  for (std::uint64_t j = 1; j <= s; ++j) {
    R = C.add_aff(R, P);
    if (R.Z == 0) return multiples_in(j, lo, hi);  // j is the exact order
    baby.push_back(R);
  }
  std::vector<Aff> bx;
  batch_normalize(M, baby, bx);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> table(s);
  for (std::uint64_t j = 0; j < s; ++j) table[j] = {bx[j].x, static_cast<std::uint32_t>(j + 1)};
  std::sort(table.begin(), table.end());

  std::uint64_t step = 2 * s + 1;
  std::uint64_t ng = (width + step - 1) / step;
  Jac Dj = C.mul(P, step);
  if (Dj.Z == 0) return multiples_in(exact_order(C, P, step), lo, hi);
  Aff D = C.normalize(Dj);
  std::vector<Jac> giant;
  giant.reserve(ng);
  Jac G = C.mul(P, lo + s);
  for (std::uint64_t i = 0; i < ng; ++i) {
    giant.push_back(G);
    G = C.add_aff(G, D);
  }
  std::vector<Aff> gx;
  batch_normalize(M, giant, gx);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < ng; ++i) {
    std::uint64_t c = lo + s + i * step;
    if (giant[i].Z == 0) {
      if (c <= hi) out.push_back(c);
      continue;
    }
    auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(gx[i].x, 0u));
    for (; it != table.end() && it->first == gx[i].x; ++it) {
      std::uint64_t j = it->second;
      // jP = cP gives c - j, jP = -cP gives c + j; both when jP has order 2
      const std::uint32_t gy = gx[i].y, neg_gy = gy == 0 ? 0 : M.n - gy;
      if (bx[j - 1].y == gy && c - j >= lo && c - j <= hi) out.push_back(c - j);
      if (bx[j - 1].y == neg_gy && c + j >= lo && c + j <= hi) out.push_back(c + j);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// combine x = r1 mod m1 with x = r2 mod m2; returns false if inconsistent
bool crt_merge(i64& r1, i64& m1, i64 r2, i64 m2) {
  i64 g = std::gcd(m1, m2);
  if (mod(r2 - r1, g) != 0) return false;
  i64 m2g = m2 / g;
  i64 t = m2g == 1 ? 0 : mulmod((r2 - r1) / g, invmod(mod(m1 / g, m2g), m2g), m2g);
  r1 = mod(r1 + m1 * t, m1 * m2g);
  m1 *= m2g;
  return true;
}

}  // namespace

i64 ap_bsgs(const WeierstrassCurve& E, i64 p) {
  if (p < 5 || p >= (i64{1} << 31)) throw std::invalid_argument("ap_bsgs: need 5 <= p < 2^31");
  // short model y^2 = x^3 - 27 c4 x - 54 c6
  i64 A = mod(-27 * mod(E.c4(), p), p), B = mod(-54 * mod(E.c6(), p), p);
  if (mod(4 * powmod(A, 3, p) + 27 * mulmod(B, B, p), p) == 0)
    throw std::invalid_argument("ap_bsgs: bad reduction");
  Mont M(static_cast<std::uint32_t>(p));
  i64 r2 = 2 * isqrt(p);
  while ((r2 + 1) * (r2 + 1) <= 4 * p) ++r2;
  while (r2 * r2 > 4 * p) --r2;
  std::uint64_t lo = static_cast<std::uint64_t>(p + 1 - r2), hi = static_cast<std::uint64_t>(p + 1 + r2);
  i64 r = 0, m = 1;
  for (i64 x0 = 0, attempts = 0; x0 < p && attempts < 40; ++x0) {
    i64 d = mod(mulmod(mulmod(x0, x0, p), x0, p) + mulmod(A, x0, p) + B, p);
    if (d == 0) continue;
    ++attempts;
    int chi = jacobi(d, p);
    i64 d2 = mulmod(d, d, p);
    ShortCurve C{M, M.to(static_cast<std::uint64_t>(mulmod(A, d2, p)))};
    Aff P{M.to(static_cast<std::uint64_t>(mulmod(d, x0, p))), M.to(static_cast<std::uint64_t>(d2))};
    auto mults = find_multiples(C, P, lo, hi);
    if (mults.empty()) throw std::logic_error("ap_bsgs: no multiple in Hasse interval");
    if (mults.size() == 1) {
      i64 n = static_cast<i64>(mults[0]);
      return p + 1 - (chi == 1 ? n : 2 * p + 2 - n);
    }
    i64 o = static_cast<i64>(mults[1] - mults[0]);
    i64 target = chi == 1 ? 0 : mod(2 * p + 2, o);
    if (!crt_merge(r, m, target, o)) throw std::logic_error("ap_bsgs: inconsistent group orders");
    // candidates in [lo, hi] congruent to r mod m
    i64 first = static_cast<i64>(lo) + mod(r - static_cast<i64>(lo), m);
    if (first > static_cast<i64>(hi)) throw std::logic_error("ap_bsgs: no candidate order");
    if (first + m > static_cast<i64>(hi)) return p + 1 - first;
  }
  return ap_naive(E, p);
}

i64 ap_from_curve(const WeierstrassCurve& E, i64 p) {
  if (!is_prime(p)) throw std::invalid_argument("ap_from_curve: p must be prime");
  __int128 d = E.discriminant();
  if (d % p == 0) {
    if (E.c4() % p == 0) throw InputError("additive reduction at " + std::to_string(p));
    return ap_naive(E, p);
  }
  if (p < 2000) return ap_naive(E, p);
  return ap_bsgs(E, p);
}

bool Seeds::covers(std::uint64_t n) const {
  for (std::uint64_t m = bound + 1; m <= n; ++m)
    if (is_prime(static_cast<i64>(m))) return false;
  return true;
}

std::int32_t Seeds::ap_of(std::uint32_t p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) throw InputError("missing seed for prime " + std::to_string(p));
  return ap[it - primes.begin()];
}

Seeds seeds_from_curve(const WeierstrassCurve& E, std::uint64_t bound) {
  Seeds s;
  s.level = E.semistable_conductor();
  s.bound = bound;
  s.primes = primes_upto(bound);
  s.ap.assign(s.primes.size(), 0);
  const std::int64_t np = static_cast<std::int64_t>(s.primes.size());
#pragma omp parallel for schedule(dynamic, 4096)
  for (std::int64_t i = 0; i < np; ++i) s.ap[i] = static_cast<std::int32_t>(ap_from_curve(E, s.primes[i]));
  return s;
}

Seeds read_seeds(std::istream& in, const std::string& name) {
  Seeds s;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw InputError(name + ":" + std::to_string(lineno) + ": " + why);
  };
  auto parse_pair = [&](const std::string& l, i64& a, i64& b) {
    auto comma = l.find(',');
    if (comma == std::string::npos) fail("expected two comma-separated fields");
    auto r1 = std::from_chars(l.data(), l.data() + comma, a);
    auto r2 = std::from_chars(l.data() + comma + 1, l.data() + l.size(), b);
    if (r1.ec != std::errc() || r1.ptr != l.data() + comma || r2.ec != std::errc() ||
        r2.ptr != l.data() + l.size())
      fail("malformed record '" + l + "'");
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line.rfind("N,", 0) != 0) fail("header 'N,<level>' expected");
      i64 lv = 0;
      auto r = std::from_chars(line.data() + 2, line.data() + line.size(), lv);
      if (r.ec != std::errc() || r.ptr != line.data() + line.size() || lv < 1) fail("bad level");
      s.level = lv;
      continue;
    }
    i64 p = 0, a = 0;
    parse_pair(line, p, a);
    if (p < 2 || p > 0xffffffffLL) fail("prime out of range");
    if (!s.primes.empty() && static_cast<std::uint64_t>(p) <= s.primes.back()) fail("primes must be increasing");
    if (std::abs(a) > 2 * std::sqrt(static_cast<double>(p)) + 1e-9) fail("|a_p| exceeds 2 sqrt(p)");
    s.primes.push_back(static_cast<std::uint32_t>(p));
    s.ap.push_back(static_cast<std::int32_t>(a));
  }
  if (lineno == 0) throw InputError(name + ": empty seed file");
  // bound: largest b such that all primes <= b are listed
  auto all = primes_upto(s.primes.empty() ? 1 : s.primes.back());
  std::size_t k = 0;
  while (k < all.size() && k < s.primes.size() && all[k] == s.primes[k]) ++k;
  if (k < s.primes.size()) {
    // a gap: coverage stops just before the first missing prime
    s.bound = k < all.size() ? all[k] - 1 : s.primes.back();
    s.primes.resize(k);
    s.ap.resize(k);
  } else {
    s.bound = s.primes.empty() ? 1 : s.primes.back();
  }
  return s;
}

Seeds read_seeds_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open seed file " + path);
  return read_seeds(in, path);
}

void write_seeds(std::ostream& out, const Seeds& s) {
  out << "N," << s.level << '\n';
  std::string buf;
  buf.reserve(1 << 20);
  char tmp[64];
  for (std::size_t i = 0; i < s.primes.size(); ++i) {
    char* e = std::to_chars(tmp, tmp + 20, s.primes[i]).ptr;
    *e++ = ',';
    e = std::to_chars(e, tmp + 60, s.ap[i]).ptr;
    *e++ = '\n';
    buf.append(tmp, e);
    if (buf.size() > (1 << 20) - 64) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

Seeds cached_seeds(const WeierstrassCurve& E, std::uint64_t bound, const std::string& cache_path) {
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    Seeds s = read_seeds_file(cache_path);
    if (s.covers(bound) && s.level == E.semistable_conductor()) return s;
  }
  Seeds s = seeds_from_curve(E, bound);
  if (!cache_path.empty()) {
    std::string tmp = cache_path + ".tmp";
    {
      std::ofstream out(tmp);
      write_seeds(out, s);
    }
    std::filesystem::rename(tmp, cache_path);
  }
  return s;
}

NewformTable::NewformTable(i64 level, std::vector<double> lambda, Seeds seeds)
    : level_(level), lambda_(std::move(lambda)), seeds_(std::move(seeds)) {}

double NewformTable::lambda_p(std::uint32_t p) const {
  return seeds_.ap_of(p) / std::sqrt(static_cast<double>(p));
}

NewformTable build_table(const Seeds& seeds, std::uint64_t n_max) {
  if (seeds.level < 1 || !is_squarefree(seeds.level)) throw InputError("level must be squarefree");
  if (!seeds.covers(n_max))
    throw InputError("seeds cover primes up to " + std::to_string(seeds.bound) + " but n_max = " +
                     std::to_string(n_max));
  std::vector<double> lam(n_max + 1, 1.0);
  lam[0] = 0.0;
  for (std::size_t i = 0; i < seeds.primes.size() && seeds.primes[i] <= n_max; ++i) {
    std::uint64_t p = seeds.primes[i];
    i64 a = seeds.ap[i];
    bool bad = seeds.level % static_cast<i64>(p) == 0;
    if (bad && a != 1 && a != -1) throw InputError("a_p must be +-1 at p | N, p = " + std::to_string(p));
    if (!bad && static_cast<double>(a) * a > 4.0 * static_cast<double>(p))
      throw InputError("|a_p| > 2 sqrt(p) at p = " + std::to_string(p));
    double lp = a / std::sqrt(static_cast<double>(p));
    double prev = 1.0, cur = lp;
    for (std::uint64_t pk = p; pk <= n_max; pk *= p) {
      // multiply lambda(p^k) into multiples of p^k whose cofactor is prime to p
      std::uint64_t cof = 1;
      for (std::uint64_t m = pk; m <= n_max; m += pk, ++cof) {
        if (cof % p == 0) continue;
        lam[m] *= cur;
      }
      double next = bad ? cur * lp : lp * cur - prev;
      prev = cur;
      cur = next;
      if (pk > n_max / p) break;
    }
  }
  return NewformTable(seeds.level, std::move(lam), seeds);
}

}  // namespace rsavg
