#include "rsavg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rsavg/analytic.hpp"

namespace rsavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double weight(Kernel K, int k, double y) {
  if (K == Kernel::kDegree4) return v_degree4_closed(k + 1, y);
  return k == 0 ? std::exp(-kTwoPi * y) : e1(kTwoPi * y);
}

// omega(m)/m for admissible m (prime to N, and to p when drop_m), else 0
std::vector<double> m_weights(const PassSpec& S, std::uint64_t m_max) {
  std::vector<double> w(m_max + 1, 0.0);
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    i64 mm = static_cast<i64>(m);
    if (std::gcd(mm, S.N) != 1) continue;
    if (S.drop_m && mm % S.p == 0) continue;
    w[m] = kronecker(S.D, mm) / static_cast<double>(m);
  }
  return w;
}

struct NeumaierTable {
  std::vector<double> sum, comp;
  explicit NeumaierTable(std::size_t n = 0) : sum(n, 0.0), comp(n, 0.0) {}
  void add(std::size_t i, double x) {
    double s = sum[i], t = s + x;
    if (std::abs(s) >= std::abs(x))
      comp[i] += (s - t) + x;
    else
      comp[i] += (x - t) + s;
    sum[i] = t;
  }
  double value(std::size_t i) const { return sum[i] + comp[i]; }
};

int p_valuation_capped(std::uint64_t n, std::uint64_t p, int cap) {
  if (n == 0) return cap;
  int v = 0;
  while (v < cap && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// exponent of the largest p^y (y <= cap) dividing (r - t) mod q
inline int congruence_depth(i64 r, i64 t, i64 q, i64 p, int cap) {
  if (cap == 0) return 0;
  i64 diff = mod(r - t, q);
  return p_valuation_capped(static_cast<std::uint64_t>(diff), static_cast<std::uint64_t>(p), cap);
}

}  // namespace

std::uint64_t LevelSet::max_cut() const {
  std::uint64_t m = 1;
  for (int k = 0; k < 2; ++k)
    for (auto c : cut[k]) m = std::max(m, c);
  return m;
}

LevelSet make_levels(double N_absD, int p, int s_min, int s_max, double tol, Kernel K) {
  if (s_max < s_min) throw std::invalid_argument("make_levels: empty level range");
  LevelSet L;
  L.s_min = s_min;
  L.s_max = s_max;
  for (int s = s_min; s <= s_max; ++s) {
    double lev = N_absD * std::pow(static_cast<double>(p), 2.0 * s);
    L.level.push_back(lev);
    for (int k = 0; k < 2; ++k) {
      // a cut certified for max(level, 1) also covers smaller levels
      auto t = truncation_length(k + 1, std::max(lev, 1.0), tol, K);
      L.cut[k].push_back(t.n_max);
      L.tail[k].push_back(t.tail_bound);
    }
  }
  return L;
}

PassSpec family_pass_spec(const ImagQuadField& K, i64 N, int p, int alpha, int beta, int s_min, int s_max,
                          double tol, Kernel kernel) {
  PassSpec S;
  S.N = N;
  S.D = K.disc();
  S.p = p;
  S.alpha = alpha;
  S.beta = beta;
  S.drop_m = beta >= 1;
  S.drop_d = alpha + beta >= 1;
  S.kernel = kernel;
  S.levels = make_levels(static_cast<double>(N) * static_cast<double>(-K.disc()), p, s_min, s_max, tol, kernel);
  return S;
}

ClassResidueSums class_residue_sums(const PassSpec& S, const NewformTable& f, const PrimeIdealClasses& P,
                                    std::uint64_t block) {
  const auto& L = S.levels;
  const int nlev = L.size();
  const i64 q = S.q();
  const int h = P.group().size();
  const std::uint64_t X = L.max_cut();
  if (X > f.n_max()) throw InputError("newform table too short for the requested cuts");
  if (X > P.bound()) throw InputError("prime class table too short for the requested cuts");
  const auto wm = m_weights(S, static_cast<std::uint64_t>(isqrt(static_cast<i64>(X))) + 1);
  const auto small = primes_upto(static_cast<std::uint64_t>(isqrt(static_cast<i64>(X))) + 1);
  const std::uint64_t nblocks = (X + block - 1) / block;
  const std::size_t ncell = static_cast<std::size_t>(2) * nlev * h * q;
  const std::uint64_t wave = 64;

  NeumaierTable total(ncell);
  std::vector<NeumaierTable> part(wave, NeumaierTable(ncell));
  for (std::uint64_t w0 = 0; w0 < nblocks; w0 += wave) {
    const std::uint64_t wn = std::min(wave, nblocks - w0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::uint64_t bi = 0; bi < wn; ++bi) {
      NeumaierTable& T = part[bi];
      std::fill(T.sum.begin(), T.sum.end(), 0.0);
      std::fill(T.comp.begin(), T.comp.end(), 0.0);
      const std::uint64_t lo = (w0 + bi) * block + 1, hi = std::min(lo + block - 1, X);
      const std::size_t len = hi - lo + 1;
      std::vector<std::uint64_t> rem(len);
      std::vector<std::uint8_t> nf(len, 0);
      std::vector<std::uint32_t> fl(len * 10);
      std::vector<std::uint8_t> fe(len * 10);
      for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
      for (std::uint32_t l : small) {
        if (static_cast<std::uint64_t>(l) * l > hi) break;
        for (std::uint64_t j = (lo + l - 1) / l * l; j <= hi; j += l) {
          std::size_t i = j - lo;
          int e = 0;
          while (rem[i] % l == 0) {
            rem[i] /= l;
            ++e;
          }
          fl[i * 10 + nf[i]] = l;
          fe[i * 10 + nf[i]] = static_cast<std::uint8_t>(e);
          ++nf[i];
        }
      }
      std::vector<std::pair<std::uint64_t, int>> fac;
      std::vector<IdealClassCount> ideals;
      for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t d = lo + i;
        if (S.drop_d && d % S.p == 0) continue;
        const double lam = f[d];
        if (lam == 0.0) continue;
        fac.clear();
        for (int j = 0; j < nf[i]; ++j) fac.emplace_back(fl[i * 10 + j], fe[i * 10 + j]);
        if (rem[i] > 1) fac.emplace_back(rem[i], 1);
        ideal_classes_of(P, fac, ideals);
        if (ideals.empty()) continue;
        const double base = lam / std::sqrt(static_cast<double>(d));
        for (std::uint64_t m = 1; m * m * d <= X; ++m) {
          if (wm[m] == 0.0) continue;
          const std::uint64_t n = m * m * d;
          const i64 r = static_cast<i64>(n % static_cast<std::uint64_t>(q));
          const double w = wm[m] * base;
          for (int k = 0; k < 2; ++k)
            for (int si = nlev - 1; si >= 0; --si) {
              if (n > L.cut[k][si]) break;
              const double val = w * weight(S.kernel, k, static_cast<double>(n) / L.level[si]);
              for (const auto& A : ideals)
                T.add(((static_cast<std::size_t>(k) * nlev + si) * h + A.cls) * q + r, A.mult * val);
            }
        }
      }
    }
    for (std::uint64_t bi = 0; bi < wn; ++bi)
      for (std::size_t c = 0; c < ncell; ++c) total.add(c, part[bi].value(c));
  }
  ClassResidueSums out(nlev, h, q);
  for (std::size_t c = 0; c < ncell; ++c) out.raw()[c] = total.value(c);
  return out;
}

ClassResidueSums class_residue_sums_serial(const PassSpec& S, const NewformTable& f, const OrderClassGroup& G) {
  const auto& L = S.levels;
  const int nlev = L.size();
  const i64 q = S.q();
  const int h = G.size();
  const std::uint64_t X = L.max_cut();
  if (X > f.n_max()) throw InputError("newform table too short for the requested cuts");
  ClassResidueSums out(nlev, h, q);
  std::vector<CompensatedSum<double>> acc(out.raw().size());
  for (std::uint64_t d = 1; d <= X; ++d) {
    if (S.drop_d && d % S.p == 0) continue;
    auto ideals = ideals_of_norm(G, static_cast<i64>(d));
    if (ideals.empty()) continue;
    const double base = f[d] / std::sqrt(static_cast<double>(d));
    for (std::uint64_t m = 1; m * m * d <= X; ++m) {
      i64 mm = static_cast<i64>(m);
      if (std::gcd(mm, S.N) != 1 || (S.drop_m && mm % S.p == 0)) continue;
      int om = kronecker(S.D, mm);
      if (om == 0) continue;
      const std::uint64_t n = m * m * d;
      const i64 r = static_cast<i64>(n % static_cast<std::uint64_t>(q));
      for (int k = 0; k < 2; ++k)
        for (int si = 0; si < nlev; ++si) {
          if (n > L.cut[k][si]) continue;
          double val = om * base / static_cast<double>(m) * cutoff(S.kernel, k + 1, static_cast<double>(n) / L.level[si]);
          for (const auto& A : ideals) acc[out.cell(k, si, A.cls, r)].add(A.mult * val);
        }
    }
  }
  for (std::size_t c = 0; c < acc.size(); ++c) out.raw()[c] = acc[c].value();
  return out;
}

void LatticeSums::accumulate() {
  for (int k = 0; k < 2; ++k)
    for (int t = 0; t < 3; ++t)
      for (int s = 0; s < nlev_; ++s) {
        for (int x = a_; x >= 0; --x)
          for (int y = b_; y >= 0; --y) {
            double v = at(k, x, y, t, s);
            if (x < a_) v += at(k, x + 1, y, t, s);
            if (y < b_) v += at(k, x, y + 1, t, s);
            if (x < a_ && y < b_) v -= at(k, x + 1, y + 1, t, s);
            at(k, x, y, t, s) = v;
          }
      }
}

namespace {

struct LatticeContext {
  const PassSpec& S;
  const NewformTable& f;
  std::uint64_t X;
  i64 absD, q;
  i64 tgt[3];
  std::vector<double> wm;
};

// all points of row v with u >= 0 into T (cells in LatticeSums layout)
void lattice_row(const LatticeContext& C, std::uint64_t v, NeumaierTable& T, const LatticeSums& layout) {
  const auto& S = C.S;
  const auto& L = S.levels;
  const int nlev = L.size();
  const std::uint64_t fourX = 4 * C.X;
  const std::uint64_t dv = static_cast<std::uint64_t>(C.absD) * v * v;
  if (dv > fourX) return;
  const int xv = v == 0 ? S.alpha : p_valuation_capped(v, S.p, S.alpha);
  const std::uint64_t u0 = (C.absD % 2 == 1) ? (v & 1) : 0;
  for (std::uint64_t u = u0; u * u + dv <= fourX; u += 2) {
    const std::uint64_t d = (u * u + dv) / 4;
    if (d == 0) continue;
    if (S.drop_d && d % S.p == 0) continue;
    const double lam = C.f[d];
    if (lam == 0.0) continue;
    const double ptw = (u > 0 && v > 0) ? 2.0 : 1.0;
    const double base = ptw * lam / std::sqrt(static_cast<double>(d));
    for (std::uint64_t m = 1; m * m * d <= C.X; ++m) {
      if (C.wm[m] == 0.0) continue;
      const std::uint64_t n = m * m * d;
      const i64 r = static_cast<i64>(n % static_cast<std::uint64_t>(C.q));
      int yt[3];
      for (int t = 0; t < 3; ++t) yt[t] = congruence_depth(r, C.tgt[t], C.q, S.p, S.beta);
      const double w = C.wm[m] * base;
      for (int k = 0; k < 2; ++k)
        for (int si = nlev - 1; si >= 0; --si) {
          if (n > L.cut[k][si]) break;
          const double val = w * weight(S.kernel, k, static_cast<double>(n) / L.level[si]);
          for (int t = 0; t < 3; ++t) T.add(layout.cell(k, xv, yt[t], t, si), val);
        }
    }
  }
}

LatticeContext make_context(const PassSpec& S, const NewformTable& f) {
  const std::uint64_t X = S.levels.max_cut();
  if (X > f.n_max()) throw InputError("newform table too short for the requested cuts");
  LatticeContext C{S, f, X, -S.D, S.q(), {1 % S.q(), 0, 0}, {}};
  i64 N2 = mulmod(mod(S.N, C.q), mod(S.N, C.q), C.q);
  C.tgt[kTargetN2] = N2;
  C.tgt[kTargetNinv2] = C.q == 1 ? 0 : invmod(N2, C.q);
  C.wm = m_weights(S, static_cast<std::uint64_t>(isqrt(static_cast<i64>(X))) + 1);
  return C;
}

}  // namespace

LatticeSums lattice_sums(const PassSpec& S, const NewformTable& f, std::uint64_t rows_per_chunk) {
  const auto C = make_context(S, f);
  LatticeSums out(S.alpha, S.beta, S.levels.size());
  const std::size_t ncell = out.raw().size();
  const std::uint64_t vmax = static_cast<std::uint64_t>(isqrt(static_cast<i64>(4 * C.X / C.absD))) + 1;
  const std::uint64_t nchunks = (vmax + rows_per_chunk) / rows_per_chunk;
  std::vector<NeumaierTable> part(nchunks, NeumaierTable(ncell));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::uint64_t c = 0; c < nchunks; ++c)
    for (std::uint64_t v = c * rows_per_chunk; v < (c + 1) * rows_per_chunk && v <= vmax; ++v)
      lattice_row(C, v, part[c], out);
  NeumaierTable total(ncell);
  for (std::uint64_t c = 0; c < nchunks; ++c)
    for (std::size_t i = 0; i < ncell; ++i) total.add(i, part[c].value(i));
  for (std::size_t i = 0; i < ncell; ++i) out.raw()[i] = total.value(i);
  out.accumulate();
  return out;
}

LatticeSums lattice_sums_serial(const PassSpec& S, const NewformTable& f) {
  const std::uint64_t X = S.levels.max_cut();
  if (X > f.n_max()) throw InputError("newform table too short for the requested cuts");
  const auto& L = S.levels;
  const i64 absD = -S.D, q = S.q();
  const i64 N2 = mulmod(mod(S.N, q), mod(S.N, q), q);
  const i64 tgt[3] = {1 % q, N2, q == 1 ? 0 : invmod(N2, q)};
  LatticeSums out(S.alpha, S.beta, L.size());
  std::vector<CompensatedSum<double>> acc(out.raw().size());
  // every (u, v) in Z^2, signed, weight 1/2 each; cells filled cumulatively
  const i64 vmax = isqrt(static_cast<i64>(4 * X / absD)) + 1;
  const i64 umax = isqrt(static_cast<i64>(4 * X)) + 1;
  for (i64 b = -vmax; b <= vmax; ++b)
    for (i64 a = -umax; a <= umax; ++a) {
      i64 four_d = a * a + absD * b * b;
      if (four_d == 0 || four_d % 4 != 0) continue;
      i64 d = four_d / 4;
      if (static_cast<std::uint64_t>(d) > X) continue;
      if (S.drop_d && d % S.p == 0) continue;
      for (i64 m = 1; static_cast<std::uint64_t>(m * m * d) <= X; ++m) {
        if (std::gcd(m, S.N) != 1 || (S.drop_m && m % S.p == 0)) continue;
        int om = kronecker(S.D, m);
        if (om == 0) continue;
        i64 n = m * m * d;
        for (int k = 0; k < 2; ++k)
          for (int si = 0; si < L.size(); ++si) {
            if (static_cast<std::uint64_t>(n) > L.cut[k][si]) continue;
            double val = 0.5 * om * f[d] / (m * std::sqrt(static_cast<double>(d))) *
                         cutoff(S.kernel, k + 1, static_cast<double>(n) / L.level[si]);
            for (int x = 0; x <= S.alpha; ++x) {
              if (b % ipow(S.p, x) != 0) continue;
              for (int y = 0; y <= S.beta; ++y)
                for (int t = 0; t < 3; ++t)
                  if (mod(n - tgt[t], ipow(S.p, y)) == 0) acc[out.cell(k, x, y, t, si)].add(val);
            }
          }
      }
    }
  for (std::size_t i = 0; i < acc.size(); ++i) out.raw()[i] = acc[i].value();
  return out;
}

}  // namespace rsavg
