#include "rsavg/heckechar.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace rsavg {

namespace {

i64 lcm_of(const std::vector<i64>& v) {
  i64 l = 1;
  for (i64 x : v) l = std::lcm(l, x);
  return l;
}

bool is_power_of(i64 n, i64 p) {
  while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

RingClassCharacter::RingClassCharacter(std::shared_ptr<const OrderClassGroup> G, std::vector<i64> exps)
    : G_(std::move(G)), exps_(std::move(exps)) {
  const auto& inv = G_->invariants();
  if (exps_.size() != inv.size()) throw std::invalid_argument("RingClassCharacter: exponent vector size mismatch");
  for (std::size_t j = 0; j < inv.size(); ++j) exps_[j] = mod(exps_[j], inv[j]);
  exponent_ = lcm_of(inv);
}

RootOfUnity RingClassCharacter::operator()(int cls) const {
  const auto& inv = G_->invariants();
  const auto& co = G_->coords(cls);
  i64 num = 0;
  for (std::size_t j = 0; j < inv.size(); ++j) num += exps_[j] * co[j] * (exponent_ / inv[j]);
  return RootOfUnity(mod(num, exponent_), exponent_);
}

bool RingClassCharacter::is_trivial() const {
  return std::all_of(exps_.begin(), exps_.end(), [](i64 e) { return e == 0; });
}

RingClassCharacter RingClassCharacter::conj() const {
  std::vector<i64> e(exps_.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = -exps_[j];
  return RingClassCharacter(G_, std::move(e));
}

void check_hypotheses(const ImagQuadField& K, i64 N, int p) {
  i64 D = K.disc();
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  if (N < 1 || !is_squarefree(N)) throw InputError("level N must be squarefree");
  if (std::gcd(N, -D) != 1) throw InputError("gcd(N, D) must be 1");
  if (std::gcd(static_cast<i64>(p), N * -D) != 1) throw InputError("gcd(p, N D) must be 1");
}

const std::vector<PrimitiveSet>& CharacterFamily::primitive_sets() const {
  if (!tame_ok_) throw InputError("tame parts need p not dividing h(O_K)");
  return sets_;
}

std::vector<int> CharacterFamily::subfamily(int a, int b) const {
  std::vector<int> out;
  for (const auto& W : members_)
    if (W.x <= a && W.y <= b) out.push_back(W.index);
  return out;
}

i64 CharacterFamily::subfamily_size(int a, int b) const {
  return class_number(field().disc(), ipow(p_, a)) * euler_phi(ipow(p_, b));
}

std::vector<RootOfUnity> tame_part(const CharacterFamily& F, const HeckeCharacterW& W) {
  const auto& G = *F.group();
  if (class_number(G.field().disc(), 1) % F.p() == 0)
    throw InputError("tame part undefined at finite level when p divides h(O_K)");
  std::vector<RootOfUnity> t;
  for (std::size_t j = 0; j < G.invariants().size(); ++j)
    if (!is_power_of(G.invariants()[j], F.p())) t.push_back(W.rho(G.generators()[j]));
  if (F.beta() > 0) {
    // (Z/p^beta)^x is cyclic; its prime-to-p part is generated by g^{p^{beta-1}}
    i64 q = F.q();
    i64 u = powmod(F.units()->generators()[0], ipow(F.p(), F.beta() - 1), q);
    t.push_back(*W.chi(u));
  }
  return t;
}

CharacterFamily enumerate_family(const ImagQuadField& K, i64 N, int p, int alpha, int beta) {
  check_hypotheses(K, N, p);
  if (alpha < 0 || beta < 0) throw InputError("alpha and beta must be nonnegative");
  CharacterFamily F;
  F.p_ = p;
  F.alpha_ = alpha;
  F.beta_ = beta;
  F.N_ = N;
  F.G_ = std::make_shared<const OrderClassGroup>(K, ipow(p, alpha));
  F.U_ = std::make_shared<const UnitGroup>(ipow(p, beta));
  const auto& G = *F.G_;

  // kernels of Pic(O_{p^alpha}) -> Pic(O_{p^x}) for x < alpha
  std::vector<std::vector<int>> kernels(alpha);
  for (int x = 0; x < alpha; ++x) {
    OrderClassGroup Gx(K, ipow(p, x));
    auto proj = projection_map(G, Gx);
    for (int a = 0; a < G.size(); ++a)
      if (proj[a] == Gx.identity()) kernels[x].push_back(a);
  }

  // all exponent vectors on the invariants, in lexicographic order
  const auto& inv = G.invariants();
  std::vector<std::vector<i64>> rho_exps{{}};
  for (i64 n : inv) {
    std::vector<std::vector<i64>> next;
    for (const auto& e : rho_exps)
      for (i64 k = 0; k < n; ++k) {
        auto v = e;
        v.push_back(k);
        next.push_back(std::move(v));
      }
    rho_exps = std::move(next);
  }
  auto chis = dirichlet_group(F.q());
  for (auto& chi : chis) chi = DirichletCharacter(F.U_, chi.exponents());

  F.tame_ok_ = class_number(K.disc(), 1) % p != 0;
  const int wN = K.omega(N);
  for (const auto& e : rho_exps) {
    RingClassCharacter rho(F.G_, e);
    int x = alpha;
    for (int xx = 0; xx < alpha; ++xx) {
      bool triv = std::all_of(kernels[xx].begin(), kernels[xx].end(), [&](int a) { return rho(a).is_one(); });
      if (triv) {
        x = xx;
        break;
      }
    }
    for (const auto& chi : chis) {
      HeckeCharacterW W{rho, chi, 0, 0, {}, false, false, RootOfUnity(0, 1), 0};
      W.x = x;
      W.y = valuation(chi.conductor(), p);
      W.self_dual = chi.pow(2).is_principal();
      W.exceptional = chi.is_principal() && wN == 1;
      RootOfUnity chiN2 = chi(N)->pow(2);
      W.root_number = RootOfUnity(1, 2) * RootOfUnity(wN == 1 ? 0 : 1, 2) * chiN2;
      W.index = static_cast<int>(F.members_.size());
      F.members_.push_back(std::move(W));
    }
  }
  if (F.tame_ok_) {
    std::map<std::tuple<int, int, std::vector<RootOfUnity>>, int> where;
    for (auto& W : F.members_) {
      W.tame = tame_part(F, W);
      auto key = std::make_tuple(W.x, W.y, W.tame);
      auto it = where.find(key);
      if (it == where.end()) {
        it = where.emplace(key, static_cast<int>(F.sets_.size())).first;
        F.sets_.push_back(PrimitiveSet{W.x, W.y, W.tame, {}});
      }
      F.sets_[it->second].members.push_back(W.index);
    }
    std::sort(F.sets_.begin(), F.sets_.end(), [](const PrimitiveSet& a, const PrimitiveSet& b) {
      return std::tie(a.x, a.y, a.tame) < std::tie(b.x, b.y, b.tame);
    });
  }
  return F;
}

PrimeIdealClasses::PrimeIdealClasses(std::shared_ptr<const OrderClassGroup> G, std::uint64_t bound,
                                     const std::vector<std::uint32_t>& primes)
    : G_(std::move(G)), bound_(bound), odd_(bound / 2 + 1, 0) {
  if (G_->size() > 65535) throw InputError("class group too large for the prime class table");
  const i64 D = G_->field().disc();
  const i64 c = G_->conductor();
  const std::size_t np = std::upper_bound(primes.begin(), primes.end(), bound) - primes.begin();
#pragma omp parallel for schedule(dynamic, 8192)
  for (std::size_t i = 0; i < np; ++i) {
    const i64 l = primes[i];
    if (c % l == 0 || kronecker(D, l) == -1) continue;
    i64 b;
    if (l == 2 || (-D) % l == 0) {
      b = sqrt_mod_4n(D, l).front();
    } else {
      b = *sqrt_mod_prime(mod(D, l), l);
      if ((b - D) & 1) b = l - b;
    }
    int cl = G_->class_of_field_ideal(l, b);
    if (l == 2)
      cls2_ = cl;
    else
      odd_[static_cast<std::uint64_t>(l) >> 1] = static_cast<std::uint16_t>(cl);
  }
}

void ideal_classes_of(const PrimeIdealClasses& P, const std::vector<std::pair<std::uint64_t, int>>& fac,
                      std::vector<IdealClassCount>& out) {
  const auto& G = P.group();
  out.assign(1, IdealClassCount{G.identity(), 1});
  thread_local std::vector<IdealClassCount> next;
  for (auto [l, e] : fac) {
    int w = P.omega(l);
    if (w == -1) {
      if (e & 1) {
        out.clear();
        return;
      }
      continue;
    }
    int c = P.cls(l);
    if (w == 0) {
      int g = G.identity();
      for (int i = 0; i < e; ++i) g = G.mul(g, c);
      for (auto& a : out) a.cls = G.mul(a.cls, g);
      continue;
    }
    // l^a lbar^{e-a} has class c^{2a - e}
    int g = G.identity(), ci = G.inv(c), c2 = G.mul(c, c);
    for (int i = 0; i < e; ++i) g = G.mul(g, ci);
    next.clear();
    for (int a = 0; a <= e; ++a) {
      for (const auto& A : out) next.push_back({G.mul(A.cls, g), A.mult});
      g = G.mul(g, c2);
    }
    out.swap(next);
  }
}

std::vector<cplx> dirichlet_coefficients(const CharacterFamily& F, const HeckeCharacterW& W, const NewformTable& f,
                                         std::uint64_t n_max, i64 depletion) {
  if (n_max > f.n_max()) throw InputError("n_max exceeds the newform table");
  if (depletion < 0) throw InputError("depletion must be nonnegative");
  const auto& K = F.field();
  const i64 D = K.disc();
  const i64 N = f.level();
  const i64 p = F.p();

  // chi as used for both the m- and d-parts
  DirichletCharacter chi = W.chi;
  bool drop_d;
  if (depletion == 0) {
    auto U = std::make_shared<const UnitGroup>(ipow(p, W.y));
    std::vector<RootOfUnity> vals;
    for (i64 g : U->generators()) {
      // any lift of g prime to p has the same chi-value
      i64 a = g;
      while (std::gcd(a, p) != 1) a += U->modulus();
      vals.push_back(*W.chi(a));
    }
    chi = DirichletCharacter::from_generator_values(U, vals);
    drop_d = W.x + W.y >= 1;
  } else {
    drop_d = std::gcd(depletion, p) != 1;
  }

  // rho on prime ideals: through Pic(O_K) when its conductor is trivial so that
  // primes above p are covered
  const bool via_field = W.x == 0 && !drop_d;
  std::shared_ptr<const OrderClassGroup> G1;
  std::vector<int> lift;
  if (via_field) {
    G1 = std::make_shared<const OrderClassGroup>(K, 1);
    auto proj = projection_map(*F.group(), *G1);
    lift.assign(G1->size(), -1);
    for (int a = 0; a < F.group()->size(); ++a)
      if (lift[proj[a]] < 0) lift[proj[a]] = a;
  }
  auto rho_of_prime = [&](i64 l) -> cplx {
    i64 b;
    if (l == 2 || (-D) % l == 0)
      b = sqrt_mod_4n(D, l).front();
    else {
      b = *sqrt_mod_prime(mod(D, l), l);
      if ((b - D) & 1) b = l - b;
    }
    int cl = via_field ? lift[G1->class_of_field_ideal(l, b)] : F.group()->class_of_field_ideal(l, b);
    return W.rho(cl).value();
  };

  // b(d) = sum over ideals of norm d of rho, multiplicative in d
  std::vector<std::uint32_t> spf(n_max + 1, 0);
  for (std::uint64_t i = 2; i <= n_max; ++i)
    if (spf[i] == 0)
      for (std::uint64_t j = i; j <= n_max; j += i)
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  std::vector<cplx> b(n_max + 1, 0.0);
  if (n_max >= 1) b[1] = 1.0;
  cplx z = 0.0;
  std::uint64_t zl = 0;
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    std::uint64_t l = spf[n], r = n;
    int e = 0;
    while (r % l == 0) {
      r /= l;
      ++e;
    }
    if (drop_d && static_cast<i64>(l) == p) continue;
    int w = K.omega(static_cast<i64>(l));
    cplx local;
    if (w == -1) {
      local = (e & 1) ? 0.0 : 1.0;
    } else {
      if (zl != l) {
        z = rho_of_prime(static_cast<i64>(l));
        zl = l;
      }
      if (w == 0) {
        local = std::pow(z, e);
      } else {
        local = 0.0;
        for (int a = 0; a <= e; ++a) local += std::pow(z, 2 * a - e);
      }
    }
    b[n] = local * b[r];
  }
  std::vector<cplx> a(n_max + 1, 0.0);
  for (std::uint64_t d = 1; d <= n_max; ++d) {
    if (b[d] == cplx(0.0, 0.0)) continue;
    if (depletion > 1 && std::gcd(static_cast<i64>(d), depletion) != 1) continue;
    auto cd = chi(static_cast<i64>(d));
    if (!cd) continue;
    cplx base = cd->value() * f[d] * b[d];
    for (std::uint64_t m = 1; m * m * d <= n_max; ++m) {
      if (std::gcd(static_cast<i64>(m), N) != 1) continue;
      int wm = K.omega(static_cast<i64>(m));
      if (wm == 0) continue;
      auto cm = chi(static_cast<i64>(m));
      if (!cm) continue;
      a[m * m * d] += static_cast<double>(wm) * cm->pow(2).value() * base;
    }
  }
  return a;
}

}  // namespace rsavg
