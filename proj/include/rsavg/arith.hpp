#ifndef RSAVG_ARITH_HPP
#define RSAVG_ARITH_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace rsavg {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exp(2 pi i num/order), kept in lowest terms so equal values compare equal.
class RootOfUnity {
 public:
  RootOfUnity() = default;
  RootOfUnity(i64 num, i64 order);

  i64 num() const { return num_; }
  i64 order() const { return order_; }
  bool is_one() const { return num_ == 0; }

  RootOfUnity operator*(const RootOfUnity& o) const;
  RootOfUnity& operator*=(const RootOfUnity& o) { return *this = *this * o; }
  RootOfUnity conj() const { return RootOfUnity(order_ - num_, order_); }
  RootOfUnity pow(i64 e) const;
  cplx value() const;
  // +1 or -1 when the value is real, 0 otherwise
  int real_sign() const;

  bool operator==(const RootOfUnity&) const = default;
  auto operator<=>(const RootOfUnity&) const = default;

 private:
  i64 num_ = 0;
  i64 order_ = 1;
};

i64 mod(i64 a, i64 m);
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 a, i64 e, i64 m);
i64 invmod(i64 a, i64 m);  // throws if not invertible
i64 ipow(i64 b, int e);
i64 isqrt(i64 n);
bool is_prime(i64 n);
bool is_squarefree(i64 n);
bool is_fundamental_discriminant(i64 D);
std::vector<std::pair<i64, int>> factorize(i64 n);
std::vector<i64> divisors(i64 n);
std::vector<std::uint32_t> primes_upto(std::uint64_t n);
int valuation(i64 n, i64 p);

int kronecker(i64 D, i64 n);
int jacobi(i64 a, i64 n);  // n odd positive
int moebius(i64 n);
i64 euler_phi(i64 n);

// Square roots of a modulo an odd prime p (Tonelli-Shanks); nullopt if a is
// a non-residue. For a = 0 mod p returns 0.
std::optional<i64> sqrt_mod_prime(i64 a, i64 p);

// The unit group (Z/q)^x as a product of cyclic factors with fixed
// generators, plus a discrete-log table over all residues.
class UnitGroup {
 public:
  explicit UnitGroup(i64 q);

  i64 modulus() const { return q_; }
  i64 order() const { return phi_; }
  const std::vector<i64>& generators() const { return gens_; }
  const std::vector<i64>& orders() const { return ords_; }
  i64 exponent() const { return exponent_; }
  bool is_unit(i64 a) const { return unit_[idx(a)] != 0; }
  // exponent of generator i in the decomposition of a; requires is_unit(a)
  int log(i64 a, std::size_t i) const { return logs_[idx(a) * gens_.size() + i]; }

 private:
  std::size_t idx(i64 a) const { return static_cast<std::size_t>(mod(a, q_)); }
  i64 q_;
  i64 phi_;
  i64 exponent_ = 1;
  std::vector<i64> gens_;
  std::vector<i64> ords_;
  std::vector<std::uint8_t> unit_;
  std::vector<int> logs_;
};

class DirichletCharacter {
 public:
  DirichletCharacter(std::shared_ptr<const UnitGroup> g, std::vector<i64> exps);
  static DirichletCharacter principal(std::shared_ptr<const UnitGroup> g);
  // Character determined by its values on the generators of g.
  static DirichletCharacter from_generator_values(std::shared_ptr<const UnitGroup> g,
                                                  const std::vector<RootOfUnity>& vals);

  i64 modulus() const { return group_->modulus(); }
  i64 conductor() const { return conductor_; }
  bool is_primitive() const { return conductor_ == modulus(); }
  bool is_principal() const;
  const std::vector<i64>& exponents() const { return exps_; }
  const UnitGroup& group() const { return *group_; }
  std::shared_ptr<const UnitGroup> group_ptr() const { return group_; }
  i64 order() const;

  // nullopt when gcd(a, q) > 1
  std::optional<RootOfUnity> operator()(i64 a) const;
  cplx value(i64 a) const;
  DirichletCharacter operator*(const DirichletCharacter& o) const;
  DirichletCharacter pow(i64 e) const;
  DirichletCharacter conj() const { return pow(-1); }

  bool operator==(const DirichletCharacter& o) const {
    return modulus() == o.modulus() && exps_ == o.exps_;
  }

 private:
  i64 compute_conductor() const;
  std::shared_ptr<const UnitGroup> group_;
  std::vector<i64> exps_;
  i64 conductor_ = 1;
};

std::vector<DirichletCharacter> dirichlet_group(i64 q);

// Neumaier-compensated accumulator; the result depends only on the order of
// additions.
template <class T>
struct CompensatedSum {
  T sum{};
  T comp{};
  void add(T x) {
    if constexpr (std::is_same_v<T, double>) {
      double t = sum + x;
      if (std::abs(sum) >= std::abs(x))
        comp += (sum - t) + x;
      else
        comp += (x - t) + sum;
      sum = t;
    } else {
      re_im_add(x);
    }
  }
  T value() const { return sum + comp; }

 private:
  void re_im_add(T x) {
    CompensatedSum<double> a{sum.real(), comp.real()}, b{sum.imag(), comp.imag()};
    a.add(x.real());
    b.add(x.imag());
    sum = T(a.sum, b.sum);
    comp = T(a.comp, b.comp);
  }
};

}  // namespace rsavg

#endif
