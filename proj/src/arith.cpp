#include "rsavg/arith.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

namespace rsavg {

RootOfUnity::RootOfUnity(i64 num, i64 order) {
  if (order <= 0) throw std::invalid_argument("RootOfUnity: order must be positive");
  num = mod(num, order);
  i64 g = std::gcd(num, order);
  if (num == 0) g = order;
  num_ = num / g;
  order_ = order / g;
}

RootOfUnity RootOfUnity::operator*(const RootOfUnity& o) const {
  i64 l = std::lcm(order_, o.order_);
  return RootOfUnity(num_ * (l / order_) + o.num_ * (l / o.order_), l);
}

RootOfUnity RootOfUnity::pow(i64 e) const {
  return RootOfUnity(mulmod(num_, mod(e, order_), order_), order_);
}

cplx RootOfUnity::value() const {
  // exact at the real and imaginary axis so that real characters stay real
  if (num_ == 0) return {1.0, 0.0};
  if (2 * num_ == order_) return {-1.0, 0.0};
  if (4 * num_ == order_) return {0.0, 1.0};
  if (4 * num_ == 3 * order_) return {0.0, -1.0};
  double t = 2.0 * std::numbers::pi * static_cast<double>(num_) / static_cast<double>(order_);
  return {std::cos(t), std::sin(t)};
}

int RootOfUnity::real_sign() const {
  if (num_ == 0) return 1;
  if (2 * num_ == order_) return -1;
  return 0;
}

i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>((static_cast<__int128>(mod(a, m)) * mod(b, m)) % m);
}

i64 powmod(i64 a, i64 e, i64 m) {
  if (m == 1) return 0;
  i64 r = 1;
  a = mod(a, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

i64 invmod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw std::invalid_argument("invmod: not invertible");
  return mod(x, m);
}

i64 ipow(i64 b, int e) {
  i64 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

i64 isqrt(i64 n) {
  if (n <= 0) return 0;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  i64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    i64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<i64, int>> f;
  for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

bool is_squarefree(i64 n) {
  for (auto& [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

bool is_fundamental_discriminant(i64 D) {
  if (D == 0 || D == 1) return false;
  i64 r = mod(D, 4);
  if (r == 1) return is_squarefree(std::abs(D));
  if (r != 0) return false;
  i64 m = D / 4;
  i64 m4 = mod(m, 4);
  return (m4 == 2 || m4 == 3) && is_squarefree(std::abs(m));
}

std::vector<i64> divisors(i64 n) {
  std::vector<i64> d{1};
  for (auto& [p, e] : factorize(n)) {
    std::size_t sz = d.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < sz; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<std::uint32_t> primes_upto(std::uint64_t n) {
  std::vector<std::uint32_t> ps;
  if (n < 2) return ps;
  std::vector<bool> comp(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    ps.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
  }
  return ps;
}

int valuation(i64 n, i64 p) {
  if (n == 0) return 0;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int jacobi(i64 a, i64 n) {
  if (n <= 0 || (n & 1) == 0) throw std::invalid_argument("jacobi: n must be odd positive");
  a = mod(a, n);
  int t = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      i64 r = n & 7;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

int kronecker(i64 D, i64 n) {
  i64 r = mod(D, 4);
  if (r != 0 && r != 1) throw std::invalid_argument("kronecker: D must be 0 or 1 mod 4");
  if (n < 0) throw std::invalid_argument("kronecker: n must be nonnegative");
  if (n == 0) return (D == 1 || D == -1) ? 1 : 0;
  int t = 1;
  while ((n & 1) == 0) {
    n >>= 1;
    if ((D & 1) == 0) return 0;
    i64 r8 = mod(D, 8);
    if (r8 == 3 || r8 == 5) t = -t;
  }
  return t * jacobi(D, n);
}

int moebius(i64 n) {
  if (n < 1) throw std::invalid_argument("moebius: n must be positive");
  int m = 1;
  for (auto& [p, e] : factorize(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

i64 euler_phi(i64 n) {
  if (n < 1) throw std::invalid_argument("euler_phi: n must be positive");
  i64 r = n;
  for (auto& [p, e] : factorize(n)) r = r / p * (p - 1);
  return r;
}

std::optional<i64> sqrt_mod_prime(i64 a, i64 p) {
  a = mod(a, p);
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  i64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  i64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  i64 m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    i64 i = 0, t2 = t;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
    }
    i64 b = c;
    for (i64 j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

namespace {

i64 smallest_primitive_root(i64 pe, i64 p) {
  i64 phi = pe / p * (p - 1);
  auto fs = factorize(phi);
  for (i64 g = 2; g < pe; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (auto& [r, e] : fs) {
      if (powmod(g, phi / r, pe) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  return 1;  // pe = 2
}

// CRT lift of x mod m into residues mod q that are 1 modulo q/m.
i64 lift_component(i64 x, i64 m, i64 q) {
  i64 rest = q / m;
  if (rest == 1) return mod(x, q);
  // y = x mod m, y = 1 mod rest
  i64 t = mulmod(mod(x - 1, m), invmod(rest, m), m);
  return mod(1 + rest * t, q);
}

}  // namespace

UnitGroup::UnitGroup(i64 q) : q_(q), phi_(euler_phi(q)) {
  if (q < 1) throw std::invalid_argument("UnitGroup: modulus must be positive");
  struct Comp {
    i64 pe;
    std::vector<int> log;  // per residue mod pe, -1 if non-unit
    std::vector<int> log2;  // second generator for 2-power moduli
  };
  std::vector<std::pair<std::size_t, Comp>> comps;  // generator offset, data
  for (auto& [p, e] : factorize(q)) {
    i64 pe = ipow(p, e);
    Comp c{pe, std::vector<int>(pe, -1), {}};
    if (p != 2) {
      i64 g = smallest_primitive_root(pe, p);
      i64 ord = pe / p * (p - 1);
      i64 x = 1;
      for (i64 k = 0; k < ord; ++k) {
        c.log[x] = static_cast<int>(k);
        x = x * g % pe;
      }
      comps.emplace_back(gens_.size(), std::move(c));
      gens_.push_back(lift_component(g, pe, q));
      ords_.push_back(ord);
    } else if (e == 2) {
      c.log[1] = 0;
      c.log[3] = 1;
      comps.emplace_back(gens_.size(), std::move(c));
      gens_.push_back(lift_component(3, pe, q));
      ords_.push_back(2);
    } else if (e >= 3) {
      // a = (-1)^s 5^t
      c.log2.assign(pe, -1);
      i64 ord5 = pe / 4;
      i64 x = 1;
      for (i64 t = 0; t < ord5; ++t) {
        c.log[x] = 0;
        c.log2[x] = static_cast<int>(t);
        c.log[pe - x] = 1;
        c.log2[pe - x] = static_cast<int>(t);
        x = x * 5 % pe;
      }
      comps.emplace_back(gens_.size(), std::move(c));
      gens_.push_back(lift_component(pe - 1, pe, q));
      ords_.push_back(2);
      gens_.push_back(lift_component(5, pe, q));
      ords_.push_back(ord5);
    }
    // modulus 2: trivial unit group, nothing to record beyond units
    else {
      c.log[1] = 0;
    }
  }
  for (i64 o : ords_) exponent_ = std::lcm(exponent_, o);
  std::size_t ng = gens_.size();
  unit_.assign(q, 0);
  logs_.assign(static_cast<std::size_t>(q) * ng, 0);
  for (i64 a = 0; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    unit_[a] = 1;
    for (auto& [off, c] : comps) {
      i64 r = a % c.pe;
      if (off < ng && c.pe > 2) {
        logs_[a * ng + off] = c.log[r];
        if (!c.log2.empty()) logs_[a * ng + off + 1] = c.log2[r];
      }
    }
  }
}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const UnitGroup> g, std::vector<i64> exps)
    : group_(std::move(g)), exps_(std::move(exps)) {
  if (exps_.size() != group_->orders().size())
    throw std::invalid_argument("DirichletCharacter: exponent vector size mismatch");
  for (std::size_t i = 0; i < exps_.size(); ++i) exps_[i] = mod(exps_[i], group_->orders()[i]);
  conductor_ = compute_conductor();
}

DirichletCharacter DirichletCharacter::principal(std::shared_ptr<const UnitGroup> g) {
  std::vector<i64> e(g->orders().size(), 0);
  return DirichletCharacter(std::move(g), std::move(e));
}

DirichletCharacter DirichletCharacter::from_generator_values(std::shared_ptr<const UnitGroup> g,
                                                             const std::vector<RootOfUnity>& vals) {
  const auto& ords = g->orders();
  if (vals.size() != ords.size())
    throw std::invalid_argument("from_generator_values: wrong number of values");
  std::vector<i64> e(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i) {
    // value must be an ords[i]-th root of unity: num/order = e/ords[i]
    if (ords[i] % vals[i].order() != 0)
      throw std::invalid_argument("from_generator_values: value order does not divide generator order");
    e[i] = vals[i].num() * (ords[i] / vals[i].order());
  }
  return DirichletCharacter(std::move(g), std::move(e));
}

bool DirichletCharacter::is_principal() const {
  return std::all_of(exps_.begin(), exps_.end(), [](i64 e) { return e == 0; });
}

i64 DirichletCharacter::order() const {
  i64 o = 1;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    i64 n = group_->orders()[i];
    o = std::lcm(o, n / std::gcd(n, exps_[i]));
  }
  return o;
}

std::optional<RootOfUnity> DirichletCharacter::operator()(i64 a) const {
  if (!group_->is_unit(a)) return std::nullopt;
  i64 E = group_->exponent();
  i64 num = 0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    i64 w = E / group_->orders()[i];
    num = mod(num + mulmod(exps_[i] * w, group_->log(a, i), E), E);
  }
  return RootOfUnity(num, E);
}

cplx DirichletCharacter::value(i64 a) const {
  auto v = (*this)(a);
  return v ? v->value() : cplx(0.0, 0.0);
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
  if (modulus() != o.modulus()) throw std::invalid_argument("character product: modulus mismatch");
  std::vector<i64> e(exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = exps_[i] + o.exps_[i];
  return DirichletCharacter(group_, std::move(e));
}

DirichletCharacter DirichletCharacter::pow(i64 k) const {
  std::vector<i64> e(exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = mulmod(exps_[i], mod(k, group_->orders()[i]), group_->orders()[i]);
  return DirichletCharacter(group_, std::move(e));
}

i64 DirichletCharacter::compute_conductor() const {
  i64 q = modulus();
  if (is_principal()) return 1;
  for (i64 d : divisors(q)) {
    bool trivial = true;
    for (i64 a = 1 + d; a < q && trivial; a += d) {
      if (!group_->is_unit(a)) continue;
      if (!(*this)(a)->is_one()) trivial = false;
    }
    if (trivial) return d;
  }
  return q;
}

std::vector<DirichletCharacter> dirichlet_group(i64 q) {
  auto g = std::make_shared<const UnitGroup>(q);
  const auto& ords = g->orders();
  std::vector<DirichletCharacter> out;
  std::vector<i64> e(ords.size(), 0);
  while (true) {
    out.emplace_back(g, e);
    std::size_t i = 0;
    while (i < e.size() && ++e[i] == ords[i]) e[i++] = 0;
    if (i == e.size()) break;
  }
  return out;
}

}  // namespace rsavg
