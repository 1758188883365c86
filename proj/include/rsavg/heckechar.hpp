#ifndef RSAVG_HECKECHAR_HPP
#define RSAVG_HECKECHAR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "rsavg/arith.hpp"
#include "rsavg/newform.hpp"
#include "rsavg/quadfield.hpp"

namespace rsavg {

// Character of Pic(O_{p^alpha}) given by exponents on the cyclic invariants:
// rho(g_j) = exp(2 pi i e_j / n_j).
class RingClassCharacter {
 public:
  RingClassCharacter(std::shared_ptr<const OrderClassGroup> G, std::vector<i64> exps);

  const OrderClassGroup& group() const { return *G_; }
  const std::vector<i64>& exponents() const { return exps_; }
  RootOfUnity operator()(int cls) const;
  bool is_trivial() const;
  RingClassCharacter conj() const;

 private:
  std::shared_ptr<const OrderClassGroup> G_;
  std::vector<i64> exps_;
  i64 exponent_;  // lcm of the invariants
};

// rho * chi o N, stored at the level (p^alpha, p^beta) of the family that
// enumerated it; conductor exponents are the true ones.
struct HeckeCharacterW {
  RingClassCharacter rho;
  DirichletCharacter chi;
  int x = 0;  // conductor of rho is p^x
  int y = 0;  // conductor of chi is p^y
  std::vector<RootOfUnity> tame;
  bool self_dual = false;
  bool exceptional = false;
  bool generic() const { return !exceptional; }
  RootOfUnity root_number;  // -omega(N) chi(N)^2
  int index = 0;            // position in the family
};

struct PrimitiveSet {
  int x = 0, y = 0;
  std::vector<RootOfUnity> tame;
  std::vector<int> members;  // indices into the family
};

class CharacterFamily {
 public:
  int p() const { return p_; }
  int alpha() const { return alpha_; }
  int beta() const { return beta_; }
  i64 c() const { return ipow(p_, alpha_); }
  i64 q() const { return ipow(p_, beta_); }
  i64 level_N() const { return N_; }
  const ImagQuadField& field() const { return G_->field(); }
  std::shared_ptr<const OrderClassGroup> group() const { return G_; }
  std::shared_ptr<const UnitGroup> units() const { return U_; }
  const std::vector<HeckeCharacterW>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool has_tame_parts() const { return tame_ok_; }
  // primitive sets keyed by (x, y, tame part); requires has_tame_parts()
  const std::vector<PrimitiveSet>& primitive_sets() const;
  // members with conductor exponents (x, y) <= (a, b): the subfamily X_{p^a, p^b}
  std::vector<int> subfamily(int a, int b) const;
  // h(O_{p^a}) phi(p^b)
  i64 subfamily_size(int a, int b) const;

 private:
  friend CharacterFamily enumerate_family(const ImagQuadField& K, i64 N, int p, int alpha, int beta);
  int p_ = 3, alpha_ = 0, beta_ = 0;
  i64 N_ = 1;
  std::shared_ptr<const OrderClassGroup> G_;
  std::shared_ptr<const UnitGroup> U_;
  std::vector<HeckeCharacterW> members_;
  bool tame_ok_ = false;
  std::vector<PrimitiveSet> sets_;
};

// Standing hypotheses: p odd prime, gcd(p, N D) = gcd(N, D) = 1, N squarefree.
void check_hypotheses(const ImagQuadField& K, i64 N, int p);
CharacterFamily enumerate_family(const ImagQuadField& K, i64 N, int p, int alpha, int beta);

// Values of W on generators of the prime-to-p part of Pic(O_c) x (Z/q)^x;
// throws InputError when p | h(O_K).
std::vector<RootOfUnity> tame_part(const CharacterFamily& F, const HeckeCharacterW& W);

// Splitting type and class of one prime above each prime l <= bound, l prime
// to the conductor; the other prime above a split l has the inverse class.
class PrimeIdealClasses {
 public:
  PrimeIdealClasses(std::shared_ptr<const OrderClassGroup> G, std::uint64_t bound,
                    const std::vector<std::uint32_t>& primes);
  const OrderClassGroup& group() const { return *G_; }
  std::uint64_t bound() const { return bound_; }
  // class of a prime above l (l split or ramified, l prime to the conductor)
  int cls(std::uint64_t l) const { return l == 2 ? cls2_ : odd_[l >> 1]; }
  int omega(std::uint64_t l) const { return G_->field().omega(static_cast<i64>(l)); }

 private:
  std::shared_ptr<const OrderClassGroup> G_;
  std::uint64_t bound_;
  int cls2_ = 0;
  std::vector<std::uint16_t> odd_;
};

// Classes with multiplicity of the O_K-ideals of norm d (coprime to the
// conductor), from the factorization of d; empty when d is not a norm.
void ideal_classes_of(const PrimeIdealClasses& P, const std::vector<std::pair<std::uint64_t, int>>& fac,
                      std::vector<IdealClassCount>& out);

// a_n for n <= n_max of L(s, f x W). depletion = 0: W's own conductor with chi
// taken primitive; depletion = M > 1: norms d sharing a factor with M dropped
// and chi kept at its stored modulus.
std::vector<cplx> dirichlet_coefficients(const CharacterFamily& F, const HeckeCharacterW& W, const NewformTable& f,
                                         std::uint64_t n_max, i64 depletion);

}  // namespace rsavg

#endif
