#ifndef RSAVG_QUADFIELD_HPP
#define RSAVG_QUADFIELD_HPP

#include <map>
#include <memory>
#include <vector>

#include "rsavg/arith.hpp"

namespace rsavg {

class ImagQuadField {
 public:
  explicit ImagQuadField(i64 D);
  i64 disc() const { return D_; }
  int omega(i64 n) const { return kronecker(D_, n); }
  // omega as a character modulo |D|
  const DirichletCharacter& omega_character() const { return *omega_; }

 private:
  i64 D_;
  std::shared_ptr<DirichletCharacter> omega_;
};

struct QuadForm {
  i64 a = 1, b = 1, c = 1;
  i64 disc() const { return b * b - 4 * a * c; }
  bool is_reduced() const;
  bool operator==(const QuadForm&) const = default;
  auto operator<=>(const QuadForm&) const = default;
};

QuadForm reduce(QuadForm f);
// Dirichlet composition of two primitive forms of equal discriminant, reduced.
QuadForm compose(const QuadForm& f, const QuadForm& g);
std::vector<QuadForm> reduced_forms(i64 disc);

// h(O_f) from the class number formula (unit index 1 for |D| >= 7).
i64 class_number(i64 D, i64 f);

// Solutions b mod 2n of b^2 = d (mod 4n); n >= 1.
std::vector<i64> sqrt_mod_4n(i64 d, i64 n);

class OrderClassGroup {
 public:
  OrderClassGroup(const ImagQuadField& K, i64 f);

  const ImagQuadField& field() const { return K_; }
  i64 conductor() const { return f_; }
  i64 disc() const { return f_ * f_ * K_.disc(); }
  int size() const { return static_cast<int>(forms_.size()); }
  const std::vector<QuadForm>& forms() const { return forms_; }
  int identity() const { return 0; }
  int mul(int x, int y) const { return table_[static_cast<std::size_t>(x) * forms_.size() + y]; }
  int inv(int x) const { return inv_[x]; }
  int pow(int x, i64 e) const;
  int element_order(int x) const;

  // index of the class of a form with this discriminant
  int index_of(const QuadForm& q) const;
  // class of the invertible ideal [n, (-b + sqrt(disc))/2], b^2 = disc mod 4n
  int class_of_ideal(i64 n, i64 b) const;
  // class of the O_K-ideal of norm n (coprime to f) given by b_K^2 = D mod 4n
  int class_of_field_ideal(i64 n, i64 bK) const { return class_of_ideal(n, f_ * bK); }

  // Cyclic decomposition into prime-power orders with generators; every class
  // has unique coordinates with respect to these generators.
  const std::vector<i64>& invariants() const { return invariants_; }
  const std::vector<int>& generators() const { return gens_; }
  const std::vector<int>& coords(int x) const { return coords_[x]; }

  // Norm/b_K data of an O_K-ideal coprime to scan_coprime representing each class.
  struct Representative {
    i64 n;
    i64 bK;
  };
  const Representative& representative(int x) const { return reps_[x]; }

 private:
  void build_invariants();
  void build_representatives();

  ImagQuadField K_;
  i64 f_;
  std::vector<QuadForm> forms_;
  std::map<std::pair<i64, i64>, int> index_;
  std::vector<int> table_;
  std::vector<int> inv_;
  std::vector<i64> invariants_;
  std::vector<int> gens_;
  std::vector<std::vector<int>> coords_;
  std::vector<Representative> reps_;
};

// Image of class x of `from` in `to`, where to.conductor() divides from.conductor().
int project_class(const OrderClassGroup& from, int x, const OrderClassGroup& to);
std::vector<int> projection_map(const OrderClassGroup& from, const OrderClassGroup& to);

struct IdealClassCount {
  int cls;
  int mult;
  bool operator==(const IdealClassCount&) const = default;
};

// Ideals of norm n in O_f grouped by class; requires gcd(n, f) = 1 when f > 1.
std::vector<IdealClassCount> ideals_of_norm(const OrderClassGroup& G, i64 n);
i64 ideal_count(const OrderClassGroup& G, i64 n);

// sum_{d | n} omega(d)
i64 r1_divisor_sum(i64 D, i64 n);
// #{(a, b) in Z^2 : a^2 - b^2 D = 4n}
i64 norm_form_count(i64 D, i64 n);
// #{(a, b) in Z x N^x : a^2 - b^2 D = 4n}
i64 r1_dagger(i64 D, i64 n);
// #{(a, b) : a^2 - b^2 D = 4n, c | b} / 2, the ideal count of norm n in the
// principal class of O_c for gcd(n, c) = 1.
i64 principal_class_count(i64 D, i64 c, i64 n);

}  // namespace rsavg

#endif
