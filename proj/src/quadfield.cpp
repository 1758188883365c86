#include "rsavg/quadfield.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace rsavg {

ImagQuadField::ImagQuadField(i64 D) : D_(D) {
  if (D >= 0 || !is_fundamental_discriminant(D))
    throw InputError("discriminant " + std::to_string(D) + " is not a negative fundamental discriminant");
  if (-D < 7) throw InputError("|D| >= 7 is required");
  auto g = std::make_shared<const UnitGroup>(-D);
  std::vector<RootOfUnity> vals;
  for (i64 x : g->generators()) vals.emplace_back(kronecker(D, x) == 1 ? 0 : 1, 2);
  omega_ = std::make_shared<DirichletCharacter>(DirichletCharacter::from_generator_values(g, vals));
}

bool QuadForm::is_reduced() const {
  if (a <= 0 || std::abs(b) > a || a > c) return false;
  if ((std::abs(b) == a || a == c) && b < 0) return false;
  return true;
}

namespace {

i64 floor_div(i64 x, i64 y) {
  i64 q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

// b into (-a, a], c recomputed from the discriminant
void normalize(QuadForm& f, i64 disc) {
  if (!(-f.a < f.b && f.b <= f.a)) {
    i64 k = floor_div(f.a - f.b, 2 * f.a);
    f.b += 2 * f.a * k;
  }
  f.c = (f.b * f.b - disc) / (4 * f.a);
}

std::tuple<i64, i64, i64> ext_gcd(i64 a, i64 b) {
  // returns (u, v, d) with u a + v b = d = gcd(a, b) >= 0
  i64 u0 = 1, v0 = 0, u1 = 0, v1 = 1;
  while (b != 0) {
    i64 q = floor_div(a, b);
    std::tie(a, b) = std::make_pair(b, a - q * b);
    std::tie(u0, u1) = std::make_pair(u1, u0 - q * u1);
    std::tie(v0, v1) = std::make_pair(v1, v0 - q * v1);
  }
  if (a < 0) return {-u0, -v0, -a};
  return {u0, v0, a};
}

}  // namespace

QuadForm reduce(QuadForm f) {
  i64 disc = f.disc();
  if (f.a <= 0 || disc >= 0) throw std::invalid_argument("reduce: form must be positive definite");
  normalize(f, disc);
  while (f.a > f.c) {
    f = QuadForm{f.c, -f.b, f.a};
    normalize(f, disc);
  }
  if (f.a == f.c && f.b < 0) f.b = -f.b;
  return f;
}

QuadForm compose(const QuadForm& f, const QuadForm& g) {
  i64 disc = f.disc();
  if (g.disc() != disc) throw std::invalid_argument("compose: discriminant mismatch");
  QuadForm f1 = f, f2 = g;
  if (f1.a > f2.a) std::swap(f1, f2);
  i64 s = (f1.b + f2.b) / 2;
  i64 n = f2.b - s;
  i64 y1, d;
  if (f2.a % f1.a == 0) {
    y1 = 0;
    d = f1.a;
  } else {
    auto [u, v, dd] = ext_gcd(f2.a, f1.a);
    (void)v;
    y1 = u;
    d = dd;
  }
  i64 x2, y2, d1;
  if (s % d == 0) {
    y2 = -1;
    x2 = 0;
    d1 = d;
  } else {
    auto [xx, yy, dd] = ext_gcd(s, d);
    x2 = xx;
    y2 = -yy;
    d1 = dd;
  }
  i64 v1 = f1.a / d1, v2 = f2.a / d1;
  __int128 rr = static_cast<__int128>(y1) * y2 % v1 * n % v1 - static_cast<__int128>(x2) * f2.c % v1;
  i64 r = mod(static_cast<i64>(rr % v1), v1);
  QuadForm h;
  h.a = v1 * v2;
  h.b = f2.b + 2 * v2 * r;
  h.c = (h.b * h.b - disc) / (4 * h.a);
  return reduce(h);
}

std::vector<QuadForm> reduced_forms(i64 disc) {
  if (disc >= 0 || (mod(disc, 4) != 0 && mod(disc, 4) != 1))
    throw std::invalid_argument("reduced_forms: discriminant must be negative and 0 or 1 mod 4");
  std::vector<QuadForm> out;
  for (i64 a = 1; 3 * a * a <= -disc; ++a) {
    for (i64 b = -a + 1; b <= a; ++b) {
      if (mod(b - disc, 2) != 0) continue;
      i64 num = b * b - disc;
      if (num % (4 * a) != 0) continue;
      i64 c = num / (4 * a);
      if (c < a) continue;
      if (a == c && b < 0) continue;
      if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
      out.push_back({a, b, c});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

i64 class_number(i64 D, i64 f) {
  if (f < 1) throw std::invalid_argument("class_number: conductor must be positive");
  if (D >= -4) throw std::invalid_argument("class_number: requires |D| >= 7");
  // Dirichlet: h_K = -(1/|D|) sum_{a<|D|} a omega(a)
  i64 s = 0;
  for (i64 a = 1; a < -D; ++a) s += a * kronecker(D, a);
  i64 h = -s / -D;
  i64 num = h * f, den = 1;
  for (auto& [l, e] : factorize(f)) {
    num = num / l * (l - kronecker(D, l));
    (void)e;
  }
  return num / den;
}

namespace {

// solutions x mod l^k of x^2 = d mod l^k, l odd prime
std::vector<i64> sqrt_mod_prime_power(i64 d, i64 l, int k) {
  i64 lk = ipow(l, k);
  std::vector<i64> out;
  if (mod(d, l) != 0) {
    auto r = sqrt_mod_prime(d, l);
    if (!r) return out;
    i64 x = *r, m = l;
    for (int j = 1; j < k; ++j) {
      // Hensel: x <- x - (x^2 - d)/(2x) mod l^{j+1}
      m *= l;
      i64 fx = mod(mulmod(x, x, m) - d, m);
      x = mod(x - mulmod(fx, invmod(2 * x, m), m), m);
    }
    out.push_back(x);
    if (lk - x != x) out.push_back(lk - x);
  } else {
    if (lk > 50'000'000) throw std::runtime_error("sqrt_mod_4n: ramified prime power too large");
    for (i64 x = 0; x < lk; ++x)
      if (mulmod(x, x, lk) == mod(d, lk)) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<i64> sqrt_mod_4n(i64 d, i64 n) {
  if (n < 1) throw std::invalid_argument("sqrt_mod_4n: n must be positive");
  int e = valuation(n, 2);
  i64 m2 = ipow(2, e + 1), m4 = 2 * m2;
  std::vector<i64> sols;
  for (i64 x = 0; x < m2; ++x)
    if (mod(x * x - d, m4) == 0) sols.push_back(x);
  i64 modulus = m2;
  i64 odd = n >> e;
  for (auto& [l, k] : (odd > 1 ? factorize(odd) : std::vector<std::pair<i64, int>>{})) {
    if (sols.empty()) return sols;
    i64 lk = ipow(l, k);
    auto part = sqrt_mod_prime_power(d, l, k);
    std::vector<i64> next;
    i64 inv = invmod(modulus, lk);
    for (i64 a : sols)
      for (i64 b : part) {
        // x = a mod modulus, x = b mod lk
        i64 t = mulmod(mod(b - a, lk), inv, lk);
        next.push_back(a + modulus * t);
      }
    modulus *= lk;
    sols = std::move(next);
  }
  std::sort(sols.begin(), sols.end());
  return sols;
}

OrderClassGroup::OrderClassGroup(const ImagQuadField& K, i64 f) : K_(K), f_(f) {
  if (f < 1) throw std::invalid_argument("OrderClassGroup: conductor must be positive");
  forms_ = reduced_forms(disc());
  for (std::size_t i = 0; i < forms_.size(); ++i) index_[{forms_[i].a, forms_[i].b}] = static_cast<int>(i);
  std::size_t h = forms_.size();
  table_.assign(h * h, 0);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = i; j < h; ++j) {
      int k = index_of(compose(forms_[i], forms_[j]));
      table_[i * h + j] = table_[j * h + i] = k;
    }
  inv_.assign(h, -1);
  for (std::size_t i = 0; i < h; ++i) inv_[i] = index_of(QuadForm{forms_[i].a, -forms_[i].b, forms_[i].c});
  build_invariants();
  build_representatives();
}

int OrderClassGroup::index_of(const QuadForm& q) const {
  QuadForm r = q.is_reduced() ? q : reduce(q);
  auto it = index_.find({r.a, r.b});
  if (it == index_.end()) throw std::logic_error("form not in class group");
  return it->second;
}

int OrderClassGroup::class_of_ideal(i64 n, i64 b) const {
  i64 d = disc();
  b = mod(b, 2 * n);
  __int128 num = static_cast<__int128>(b) * b - d;
  if (num % (4 * n) != 0) throw std::invalid_argument("class_of_ideal: b^2 != disc mod 4n");
  QuadForm q{n, b, static_cast<i64>(num / (4 * n))};
  return index_of(q);
}

int OrderClassGroup::pow(int x, i64 e) const {
  int ord = element_order(x);
  e = mod(e, ord);
  int r = identity();
  for (i64 i = 0; i < e; ++i) r = mul(r, x);
  return r;
}

int OrderClassGroup::element_order(int x) const {
  int o = 1;
  for (int y = x; y != identity(); y = mul(y, x)) ++o;
  return o;
}

void OrderClassGroup::build_invariants() {
  int h = size();
  for (auto& [r, v] : factorize(h)) {
    i64 rv = ipow(r, v);
    std::vector<int> sylow;
    for (int x = 0; x < h; ++x)
      if (pow(x, rv) == identity()) sylow.push_back(x);
    std::vector<char> inH(h, 0);
    std::vector<int> H{identity()};
    inH[identity()] = 1;
    while (H.size() < sylow.size()) {
      // element of maximal order in the quotient sylow/H
      int best = -1;
      i64 best_ord = 0;
      for (int x : sylow) {
        i64 o = 1;
        int y = x;
        while (!inH[y]) {
          y = pow(y, r);
          o *= r;
        }
        if (o > best_ord) {
          best_ord = o;
          best = x;
        }
      }
      // lift of exact order best_ord
      int gen = -1;
      for (int hh : H) {
        int y = mul(best, hh);
        if (element_order(y) == best_ord) {
          gen = y;
          break;
        }
      }
      if (gen < 0) throw std::logic_error("class group decomposition failed");
      std::vector<int> next;
      int g = identity();
      for (i64 k = 0; k < best_ord; ++k) {
        for (int hh : H) next.push_back(mul(g, hh));
        g = mul(g, gen);
      }
      H = std::move(next);
      std::fill(inH.begin(), inH.end(), 0);
      for (int x : H) inH[x] = 1;
      gens_.push_back(gen);
      invariants_.push_back(best_ord);
    }
  }
  coords_.assign(h, {});
  std::vector<char> seen(h, 0);
  std::vector<int> e(gens_.size(), 0);
  int filled = 0;
  while (true) {
    int x = identity();
    for (std::size_t i = 0; i < e.size(); ++i) x = mul(x, pow(gens_[i], e[i]));
    if (seen[x]) throw std::logic_error("class group coordinates not unique");
    seen[x] = 1;
    coords_[x] = e;
    ++filled;
    std::size_t i = 0;
    while (i < e.size() && ++e[i] == invariants_[i]) e[i++] = 0;
    if (i == e.size()) break;
  }
  if (filled != h) throw std::logic_error("class group decomposition incomplete");
}

void OrderClassGroup::build_representatives() {
  int h = size();
  reps_.assign(h, {0, 0});
  int found = 0;
  i64 bound = 50 * f_ * (-K_.disc());
  for (i64 n = 1; n <= bound && found < h; ++n) {
    if (std::gcd(n, f_) != 1) continue;
    for (i64 bK : sqrt_mod_4n(K_.disc(), n)) {
      int x = class_of_field_ideal(n, bK);
      if (reps_[x].n == 0) {
        reps_[x] = {n, bK};
        ++found;
      }
    }
  }
  if (found < h)
    throw std::logic_error("no coprime-norm representative found for some class below scan bound");
}

int project_class(const OrderClassGroup& from, int x, const OrderClassGroup& to) {
  if (from.field().disc() != to.field().disc() || from.conductor() % to.conductor() != 0)
    throw std::invalid_argument("project_class: target conductor must divide source conductor");
  const auto& r = from.representative(x);
  return to.class_of_field_ideal(r.n, r.bK);
}

std::vector<int> projection_map(const OrderClassGroup& from, const OrderClassGroup& to) {
  std::vector<int> m(from.size());
  for (int x = 0; x < from.size(); ++x) m[x] = project_class(from, x, to);
  return m;
}

std::vector<IdealClassCount> ideals_of_norm(const OrderClassGroup& G, i64 n) {
  if (n < 1) throw std::invalid_argument("ideals_of_norm: n must be positive");
  if (G.conductor() > 1 && std::gcd(n, G.conductor()) != 1)
    throw std::invalid_argument("ideals_of_norm: norm must be coprime to the conductor");
  std::vector<int> count(G.size(), 0);
  for (i64 g = 1; g * g <= n; ++g) {
    if (n % (g * g)) continue;
    i64 m = n / (g * g);
    for (i64 bK : sqrt_mod_4n(G.field().disc(), m)) ++count[G.class_of_field_ideal(m, bK)];
  }
  std::vector<IdealClassCount> out;
  for (int x = 0; x < G.size(); ++x)
    if (count[x]) out.push_back({x, count[x]});
  return out;
}

i64 ideal_count(const OrderClassGroup& G, i64 n) {
  i64 s = 0;
  for (auto& c : ideals_of_norm(G, n)) s += c.mult;
  return s;
}

i64 r1_divisor_sum(i64 D, i64 n) {
  i64 s = 0;
  for (i64 d : divisors(n)) s += kronecker(D, d);
  return s;
}

namespace {

template <class Pred>
i64 count_norm_form(i64 D, i64 n, Pred keep_b) {
  i64 cnt = 0;
  for (i64 b = 0; b * b * (-D) <= 4 * n; ++b) {
    if (!keep_b(b)) continue;
    i64 a2 = 4 * n + b * b * D;
    i64 a = isqrt(a2);
    if (a * a != a2) continue;
    i64 sols_a = (a == 0) ? 1 : 2;
    i64 sols_b = (b == 0) ? 1 : 2;
    cnt += sols_a * sols_b;
  }
  return cnt;
}

}  // namespace

i64 norm_form_count(i64 D, i64 n) {
  return count_norm_form(D, n, [](i64) { return true; });
}

i64 r1_dagger(i64 D, i64 n) {
  return count_norm_form(D, n, [](i64 b) { return b >= 1; }) / 2;
}

i64 principal_class_count(i64 D, i64 c, i64 n) {
  return count_norm_form(D, n, [c](i64 b) { return b % c == 0; }) / 2;
}

}  // namespace rsavg
