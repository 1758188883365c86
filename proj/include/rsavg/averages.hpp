#ifndef RSAVG_AVERAGES_HPP
#define RSAVG_AVERAGES_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsavg/arith.hpp"
#include "rsavg/heckechar.hpp"
#include "rsavg/kernels.hpp"
#include "rsavg/newform.hpp"
#include "rsavg/quadfield.hpp"

namespace rsavg {

struct CentralValue {
  cplx value;
  std::uint64_t n_max = 0;
  double certificate = 0.0;  // bound on the truncation error of value
  int level_exponent = 0;    // s with level N |D| p^{2s}
};

// Depletion modulus that matches the family conventions of (alpha, beta):
// p when alpha + beta >= 1, otherwise 0 (own conductor).
i64 top_depletion(int p, int alpha, int beta);

// L^{(k)}(1/2, f x W) from the coefficients of W alone. depletion as in
// dirichlet_coefficients. Throws ResourceLimit when the cut exceeds n_cap.
struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
CentralValue central_value(const CharacterFamily& F, const HeckeCharacterW& W, const NewformTable& f, int k,
                           i64 depletion, double tol, std::uint64_t n_cap, Kernel kernel = Kernel::kDegree2);

struct PassOptions {
  double tol = 1e-12;
  bool reference = false;  // serial reference kernels instead of the parallel ones
  int s_min = -2;          // lowest level exponent kept for the difference sums
  Kernel kernel = Kernel::kDegree2;
};

// Length of the coefficient table a pass at (alpha, beta) needs.
std::uint64_t pass_table_length(const ImagQuadField& K, i64 N, int p, int alpha, int beta, const PassOptions& opt);

// Leading and difference sums at (p^x, p^y), with r_1 weights,
// congruence targets 1 and N^{-2} and level N |D| p^{2(x+y)}.
struct LeadingSums {
  double D = 0, D_tilde = 0, frak_D = 0, frak_D_tilde = 0;
};

enum class ErrorIndexing {
  kBothBelow,    // 0 <= x < a, 0 <= y < b
  kSelfDualRow,  // as above, but y = 0 and x < a when b = 0
};

// Every member of the family (p^alpha, p^beta) evaluated in one sweep, with
// the lattice sums behind the closed formula for all subfamilies.
class FamilyPass {
 public:
  FamilyPass(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha, int beta,
             const PassOptions& opt = {});

  const CharacterFamily& family() const { return F_; }
  const PassSpec& spec() const { return S_; }
  const ClassResidueSums& residue_sums() const { return T_; }
  const LatticeSums& lattice() const { return C_; }
  int p() const { return S_.p; }
  int alpha() const { return S_.alpha; }
  int beta() const { return S_.beta; }
  i64 omega_N() const { return omega_N_; }

  // whether X_{p^a, p^b} inside this pass uses its own top conventions
  bool standalone(int a, int b) const;

  cplx value(int k, int i) const { return val_[k][i]; }
  double certificate(int k, int i) const { return cert_[k][i]; }
  int level_exponent(int i) const;

  // calligraphic H: sum of L^{(k)} over X_{p^a, p^b}
  cplx family_sum(int a, int b, int k) const;
  double family_certificate(int a, int b, int k) const;
  i64 family_size(int a, int b) const { return F_.subfamily_size(a, b); }
  cplx H_direct(int a, int b, int k) const;
  // exact closed form through lattice sums and inclusion-exclusion over levels
  double H_formula(int a, int b, int k) const;
  // D + (-1)^{k+1} omega(N) D~ + E, the error sum E indexed by idx; not exact in general
  double H_decomposed(int a, int b, int k, ErrorIndexing idx) const;

  // raw lattice sum: p^x | v, n = target (mod p^y), level exponent s
  double lattice_sum(int k, int x, int y, Target t, int s) const;
  LeadingSums leading_sums(int k, int x, int y) const;

 private:
  PassOptions opt_;
  CharacterFamily F_;
  PassSpec S_;
  ClassResidueSums T_;
  LatticeSums C_;
  i64 omega_N_ = 1;
  std::vector<cplx> val_[2];
  std::vector<double> cert_[2];
};

struct GaloisAverage {
  int x = 0, y = 0;
  std::vector<RootOfUnity> tame;
  int size = 0;  // h*
  cplx delta;
  double certificate = 0.0;  // mean member certificate
};

// One entry per primitive set with exponents <= (a, b); requires p not
// dividing h(O_K).
std::vector<GaloisAverage> galois_averages(const FamilyPass& P, int a, int b, int k);

struct RelationResiduals {
  double R1 = 0, R2 = 0, R3 = 0;
  double certificate = 0;  // summed truncation certificates of the data involved
};
RelationResiduals relation_residuals(const FamilyPass& P, int a, int b, int k);
// same, against caller-supplied Galois averages (for perturbation checks)
RelationResiduals relation_residuals(const FamilyPass& P, int a, int b, int k, const std::vector<GaloisAverage>& G);

struct DifferenceReport {
  double direct = 0;      // H_{c,q} - H_{c/p,q} - (H_{c,q/p} - H_{c/p,q/p}), calligraphic
  double factored = 0;    // the theta-weighted factorization
  bool factorization_exact = false;  // whether the class-number and phi shapes hold at (a, b)
  double theta = 0;
  double J0 = 0;
  double measured = 0;    // p^{1-gamma} L^eps(c, q) - p^{-gamma} L^eps(c, q/p)
  double leading_chi = 0;   // J(0)/phi(q) sum_chi L^{(N)}(1, omega chi)
  double leading_chi2 = 0;  // same with chi^2
  double certificate = 0;
};
DifferenceReport difference_sum(const FamilyPass& P, int a, int b, int k, double eps_weight, double gamma_weight);
double difference_J0(int p, double eps_weight, double gamma_weight);

struct NonvanishingReport {
  cplx value;  // sum of h* delta at exact level (a, b)
  double certificate = 0;
  std::string verdict;  // "nonzero" or "indeterminate"
};
NonvanishingReport nonvanishing_report(const FamilyPass& P, int a, int b, int k);

struct ShortSumRow {
  std::uint64_t x;
  double S;
};
struct ShortSumTable {
  std::vector<ShortSumRow> rows;
  double exponent = 0;  // least-squares slope of log |S_x| against log x
};
// S_x = sum_{1 <= a <= x} lambda(a^2 + b^2 |D|) on a geometric grid of ratio 2
ShortSumTable short_sum_diag(const NewformTable& f, const ImagQuadField& K, i64 b, std::uint64_t x_max);

// The passes that carry the standalone conventions of every (a, b) <= (alpha, beta).
class FamilyGrid {
 public:
  FamilyGrid(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha, int beta,
             const PassOptions& opt = {});
  const FamilyPass& pass_for(int a, int b) const;
  std::vector<const FamilyPass*> passes() const;

 private:
  std::unique_ptr<FamilyPass> top_, row_, base_;
};

// Classification of one averaged family.
std::string family_verdict(const FamilyPass& P, int a, int b, int k);

}  // namespace rsavg

#endif
