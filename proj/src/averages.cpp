#include "rsavg/averages.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsavg/analytic.hpp"

namespace rsavg {

namespace {

// k! for k in {0, 1}
constexpr double kFactorial[2] = {1.0, 1.0};

void check_k(int k) {
  if (k != 0 && k != 1) throw InputError("k must be 0 or 1");
}

double sign_k1(int k, i64 omega_N) { return (k % 2 == 0 ? -1.0 : 1.0) * static_cast<double>(omega_N); }

bool forced_zero(const HeckeCharacterW& W) { return W.self_dual && W.root_number == RootOfUnity(1, 2); }

}  // namespace

i64 top_depletion(int p, int alpha, int beta) { return alpha + beta >= 1 ? p : 0; }

CentralValue central_value(const CharacterFamily& F, const HeckeCharacterW& W, const NewformTable& f, int k,
                           i64 depletion, double tol, std::uint64_t n_cap, Kernel kernel) {
  check_k(k);
  const int s = W.x + W.y;
  const double level =
      static_cast<double>(F.level_N()) * static_cast<double>(-F.field().disc()) * std::pow(F.p(), 2.0 * s);
  const auto t = truncation_length(k + 1, std::max(level, 1.0), tol, kernel);
  if (t.n_max > n_cap) throw ResourceLimit("truncation length exceeds the configured cap");
  if (t.n_max > f.n_max()) throw InputError("newform table too short for the requested tolerance");
  const auto a = dirichlet_coefficients(F, W, f, t.n_max, depletion);
  CompensatedSum<cplx> S;
  for (std::uint64_t n = 1; n <= t.n_max; ++n) {
    if (a[n] == cplx(0.0, 0.0)) continue;
    const double dn = static_cast<double>(n);
    S.add(a[n] * (cutoff(kernel, k + 1, dn / level) / std::sqrt(dn)));
  }
  const cplx sum = S.value();
  const double sgn = k % 2 == 0 ? 1.0 : -1.0;
  CentralValue out;
  out.value = kFactorial[k] * (sum + sgn * W.root_number.value() * std::conj(sum));
  out.n_max = t.n_max;
  out.certificate = kFactorial[k] * 2.0 * t.tail_bound;
  out.level_exponent = s;
  return out;
}

std::uint64_t pass_table_length(const ImagQuadField& K, i64 N, int p, int alpha, int beta, const PassOptions& opt) {
  return family_pass_spec(K, N, p, alpha, beta, opt.s_min, alpha + beta, opt.tol, opt.kernel).levels.max_cut();
}

FamilyPass::FamilyPass(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha, int beta,
                       const PassOptions& opt)
    : opt_(opt) {
  check_hypotheses(K, N, p);
  if (alpha < 0 || beta < 0) throw InputError("exponents must be nonnegative");
  if (opt.s_min > 0) throw InputError("lowest level exponent must be <= 0");
  F_ = enumerate_family(K, N, p, alpha, beta);
  S_ = family_pass_spec(K, N, p, alpha, beta, opt.s_min, alpha + beta, opt.tol, opt.kernel);
  const std::uint64_t X = S_.levels.max_cut();
  if (X > f.n_max()) throw InputError("newform table too short for the requested tolerance");
  if (opt.reference) {
    T_ = class_residue_sums_serial(S_, f, *F_.group());
    C_ = lattice_sums_serial(S_, f);
  } else {
    const auto primes = primes_upto(X);
    PrimeIdealClasses P(F_.group(), X, primes);
    T_ = class_residue_sums(S_, f, P);
    C_ = lattice_sums(S_, f);
  }
  omega_N_ = K.omega(N);

  const auto& G = *F_.group();
  const int h = G.size();
  const i64 q = S_.q();
  for (int k = 0; k < 2; ++k) {
    val_[k].resize(F_.size());
    cert_[k].resize(F_.size());
  }
  std::vector<cplx> rv(h), cv(q);
  for (const auto& W : F_.members()) {
    for (int A = 0; A < h; ++A) rv[A] = W.rho(A).value();
    for (i64 r = 0; r < q; ++r) cv[r] = W.chi.value(r);
    const int sidx = S_.levels.idx(W.x + W.y);
    for (int k = 0; k < 2; ++k) {
      CompensatedSum<cplx> S;
      for (int A = 0; A < h; ++A)
        for (i64 r = 0; r < q; ++r) {
          const double t = T_.at(k, sidx, A, r);
          if (t != 0.0 && cv[r] != cplx(0.0, 0.0)) S.add(rv[A] * cv[r] * t);
        }
      const cplx sum = S.value();
      const double sgn = k % 2 == 0 ? 1.0 : -1.0;
      val_[k][W.index] = kFactorial[k] * (sum + sgn * W.root_number.value() * std::conj(sum));
      cert_[k][W.index] = kFactorial[k] * 2.0 * S_.levels.tail[k][sidx];
    }
  }
}

bool FamilyPass::standalone(int a, int b) const {
  if (a > S_.alpha || b > S_.beta || a < 0 || b < 0) return false;
  return (b >= 1) == S_.drop_m && (a + b >= 1) == S_.drop_d;
}

int FamilyPass::level_exponent(int i) const {
  const auto& W = F_.members()[i];
  return W.x + W.y;
}

cplx FamilyPass::family_sum(int a, int b, int k) const {
  check_k(k);
  if (a < 0 || b < 0) return cplx(0.0, 0.0);
  CompensatedSum<cplx> s;
  for (int i : F_.subfamily(a, b)) s.add(val_[k][i]);
  return s.value();
}

double FamilyPass::family_certificate(int a, int b, int k) const {
  check_k(k);
  if (a < 0 || b < 0) return 0.0;
  double c = 0.0;
  for (int i : F_.subfamily(a, b)) c += cert_[k][i];
  return c;
}

cplx FamilyPass::H_direct(int a, int b, int k) const {
  return family_sum(a, b, k) / static_cast<double>(family_size(a, b));
}

double FamilyPass::lattice_sum(int k, int x, int y, Target t, int s) const {
  check_k(k);
  const auto& L = S_.levels;
  if (s < L.s_min || s > L.s_max) throw std::out_of_range("level exponent outside the pass");
  if (x < 0 || x > S_.alpha || y < 0 || y > S_.beta) throw std::out_of_range("lattice cell outside the pass");
  return C_.at(k, x, y, t, L.idx(s));
}

double FamilyPass::H_formula(int a, int b, int k) const {
  check_k(k);
  const double sg = sign_k1(k, omega_N_);
  CompensatedSum<double> total;
  for (int x = 0; x <= a; ++x)
    for (int y = 0; y <= b; ++y) {
      const int ix = x < a, iy = y < b;
      const double coef[3] = {1.0, -static_cast<double>(ix + iy), static_cast<double>(ix * iy)};
      const double hxy = static_cast<double>(family_size(x, y));
      for (int j = 0; j < 3; ++j) {
        if (coef[j] == 0.0) continue;
        const int s = x + y + j;
        const double cell = lattice_sum(k, x, y, kTargetOne, s) + sg * lattice_sum(k, x, y, kTargetN2, s);
        total.add(hxy * coef[j] * cell);
      }
    }
  return kFactorial[k] * total.value() / static_cast<double>(family_size(a, b));
}

LeadingSums FamilyPass::leading_sums(int k, int x, int y) const {
  LeadingSums P;
  const int s = x + y;
  P.D = lattice_sum(k, 0, y, kTargetOne, s);
  P.D_tilde = lattice_sum(k, 0, y, kTargetNinv2, s);
  P.frak_D = lattice_sum(k, 0, y, kTargetOne, s - 2) - P.D;
  P.frak_D_tilde = lattice_sum(k, 0, y, kTargetNinv2, s - 2) - P.D_tilde;
  return P;
}

double FamilyPass::H_decomposed(int a, int b, int k, ErrorIndexing idx) const {
  check_k(k);
  const double sg = sign_k1(k, omega_N_);
  const auto top = leading_sums(k, a, b);
  CompensatedSum<double> E;
  auto add = [&](int x, int y) {
    const auto P = leading_sums(k, x, y);
    E.add(static_cast<double>(family_size(x, y)) * (P.frak_D + sg * P.frak_D_tilde));
  };
  if (b == 0 && idx == ErrorIndexing::kSelfDualRow) {
    for (int x = 0; x < a; ++x) add(x, 0);
  } else {
    for (int x = 0; x < a; ++x)
      for (int y = 0; y < b; ++y) add(x, y);
  }
  return kFactorial[k] * (top.D + sg * top.D_tilde + E.value() / static_cast<double>(family_size(a, b)));
}

std::vector<GaloisAverage> galois_averages(const FamilyPass& P, int a, int b, int k) {
  check_k(k);
  const auto& F = P.family();
  if (!F.has_tame_parts()) throw InputError("Galois averages need p prime to h(O_K)");
  std::vector<GaloisAverage> out;
  for (const auto& S : F.primitive_sets()) {
    if (S.x > a || S.y > b) continue;
    GaloisAverage g;
    g.x = S.x;
    g.y = S.y;
    g.tame = S.tame;
    g.size = static_cast<int>(S.members.size());
    CompensatedSum<cplx> s;
    double c = 0.0;
    for (int i : S.members) {
      s.add(P.value(k, i));
      c += P.certificate(k, i);
    }
    g.delta = g.size ? s.value() / static_cast<double>(g.size) : cplx(0.0, 0.0);
    g.certificate = g.size ? c / g.size : 0.0;
    out.push_back(std::move(g));
  }
  return out;
}

RelationResiduals relation_residuals(const FamilyPass& P, int a, int b, int k) {
  return relation_residuals(P, a, b, k, galois_averages(P, a, b, k));
}

RelationResiduals relation_residuals(const FamilyPass& P, int a, int b, int k, const std::vector<GaloisAverage>& G) {
  check_k(k);
  const int p = P.p();
  auto H = [&](int x, int y) { return P.family_sum(x, y, k); };
  CompensatedSum<cplx> all, exact;
  for (const auto& g : G) {
    if (g.x > a || g.y > b) continue;
    const cplx w = static_cast<double>(g.size) * g.delta;
    all.add(w);
    if (g.x == a && g.y == b) exact.add(w);
  }
  CompensatedSum<cplx> mob;
  for (int x = 0; x <= a; ++x)
    for (int y = 0; y <= b; ++y) {
      const int mu = moebius(ipow(p, a - x)) * moebius(ipow(p, b - y));
      if (mu != 0) mob.add(static_cast<double>(mu) * H(x, y));
    }
  CompensatedSum<cplx> direct;
  for (const auto& W : P.family().members())
    if (W.x == a && W.y == b) direct.add(P.value(k, W.index));
  const cplx r3 = H(a, b) - H(a - 1, b) - H(a, b - 1) + H(a - 1, b - 1);

  RelationResiduals R;
  R.R1 = std::abs(H(a, b) - all.value());
  R.R2 = std::abs(exact.value() - mob.value());
  R.R3 = std::abs(direct.value() - r3);
  R.certificate = P.family_certificate(a, b, k);
  return R;
}

double difference_J0(int p, double eps_weight, double gamma_weight) {
  const double pp = p;
  return (std::pow(pp, 1.0 - gamma_weight) - std::pow(pp, -gamma_weight)) *
         (std::pow(pp, 1.0 - eps_weight) - std::pow(pp, -eps_weight));
}

DifferenceReport difference_sum(const FamilyPass& P, int a, int b, int k, double eps_weight, double gamma_weight) {
  check_k(k);
  if (a < 1) throw InputError("the difference sum needs alpha >= 1");
  if (!(eps_weight > 0.0 && eps_weight < 1.0 && gamma_weight > 0.0 && gamma_weight < 1.0))
    throw InputError("weights must lie in (0, 1)");
  const int p = P.p();
  const double pp = p;
  const auto& K = P.family().field();
  auto calH = [&](int x, int y) { return P.family_sum(x, y, k).real(); };
  auto H = [&](int x, int y) { return P.H_direct(x, y, k).real(); };
  auto Leps = [&](int y) { return std::pow(pp, 1.0 - eps_weight) * H(a, y) - std::pow(pp, -eps_weight) * H(a - 1, y); };

  DifferenceReport R;
  R.direct = calH(a, b) - calH(a - 1, b) - (calH(a, b - 1) - calH(a - 1, b - 1));
  R.theta = static_cast<double>(class_number(K.disc(), ipow(p, a))) / std::pow(pp, a - 1);
  R.J0 = difference_J0(p, eps_weight, gamma_weight);
  if (b >= 1) {
    R.measured = std::pow(pp, 1.0 - gamma_weight) * Leps(b) - std::pow(pp, -gamma_weight) * Leps(b - 1);
    R.factored = R.theta * (pp - 1.0) * std::pow(pp, b + gamma_weight - 2.0) * std::pow(pp, a + eps_weight - 2.0) *
                 R.measured;
    R.factorization_exact = a >= 2 && b >= 2;
  } else {
    R.measured = Leps(0);
    R.factored = R.theta * std::pow(pp, a + eps_weight - 2.0) * R.measured;
    R.factorization_exact = a >= 2;
  }
  const i64 q = ipow(p, b);
  const i64 N = P.family().level_N();
  R.leading_chi = R.J0 * mean_L1_omega_chi(K, N, q, 1);
  R.leading_chi2 = R.J0 * mean_L1_omega_chi(K, N, q, 2);
  R.certificate = P.family_certificate(a, b, k) + P.family_certificate(a - 1, b, k) +
                  P.family_certificate(a, b - 1, k) + P.family_certificate(a - 1, b - 1, k);
  return R;
}

NonvanishingReport nonvanishing_report(const FamilyPass& P, int a, int b, int k) {
  check_k(k);
  auto H = [&](int x, int y) { return P.family_sum(x, y, k); };
  NonvanishingReport R;
  R.value = H(a, b) - H(a - 1, b) - H(a, b - 1) + H(a - 1, b - 1);
  R.certificate = P.family_certificate(a, b, k) + P.family_certificate(a - 1, b, k) +
                  P.family_certificate(a, b - 1, k) + P.family_certificate(a - 1, b - 1, k);
  R.verdict = std::abs(R.value) > R.certificate ? "nonzero" : "indeterminate";
  return R;
}

ShortSumTable short_sum_diag(const NewformTable& f, const ImagQuadField& K, i64 b, std::uint64_t x_max) {
  if (b < 1) throw InputError("b must be positive");
  if (x_max < 1) throw InputError("x_max must be positive");
  const std::uint64_t shift = static_cast<std::uint64_t>(b * b * -K.disc());
  if (x_max * x_max + shift > f.n_max()) throw InputError("newform table too short for the short sums");
  ShortSumTable T;
  CompensatedSum<double> s;
  std::uint64_t next = 1;
  for (std::uint64_t a = 1; a <= x_max; ++a) {
    s.add(f[a * a + shift]);
    if (a == next || a == x_max) {
      T.rows.push_back({a, s.value()});
      while (next <= a) next *= 2;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : T.rows) {
    if (r.x < 2 || r.S == 0.0) continue;
    const double lx = std::log(static_cast<double>(r.x)), ly = std::log(std::abs(r.S));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) T.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return T;
}

FamilyGrid::FamilyGrid(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha, int beta,
                       const PassOptions& opt) {
  if (beta >= 1) top_ = std::make_unique<FamilyPass>(K, f, N, p, alpha, beta, opt);
  if (alpha >= 1) row_ = std::make_unique<FamilyPass>(K, f, N, p, alpha, 0, opt);
  base_ = std::make_unique<FamilyPass>(K, f, N, p, 0, 0, opt);
}

const FamilyPass& FamilyGrid::pass_for(int a, int b) const {
  if (b >= 1) {
    if (!top_ || b > top_->beta() || a > top_->alpha()) throw std::out_of_range("family outside the grid");
    return *top_;
  }
  if (a >= 1) {
    if (!row_ || a > row_->alpha()) throw std::out_of_range("family outside the grid");
    return *row_;
  }
  return *base_;
}

std::vector<const FamilyPass*> FamilyGrid::passes() const {
  std::vector<const FamilyPass*> v;
  for (const auto* P : {top_.get(), row_.get(), base_.get()})
    if (P) v.push_back(P);
  return v;
}

std::string family_verdict(const FamilyPass& P, int a, int b, int k) {
  const auto& F = P.family();
  const auto idx = F.subfamily(a, b);
  const bool all_forced =
      k == 0 && std::all_of(idx.begin(), idx.end(), [&](int i) { return forced_zero(F.members()[i]); });
  if (all_forced) return "forced-zero";
  return std::abs(P.family_sum(a, b, k)) > P.family_certificate(a, b, k) ? "nonzero" : "indeterminate";
}

}  // namespace rsavg
