#ifndef RSAVG_KERNELS_HPP
#define RSAVG_KERNELS_HPP

#include <cstdint>
#include <vector>

#include "rsavg/analytic.hpp"
#include "rsavg/arith.hpp"
#include "rsavg/heckechar.hpp"
#include "rsavg/newform.hpp"
#include "rsavg/quadfield.hpp"

namespace rsavg {

// AFE levels L_s = N |D| p^{2s} for s_min <= s <= s_max with certified cuts
// for V_1 (k = 0) and V_2 (k = 1).
struct LevelSet {
  int s_min = 0, s_max = 0;
  std::vector<double> level;
  std::vector<std::uint64_t> cut[2];
  std::vector<double> tail[2];

  int size() const { return s_max - s_min + 1; }
  int idx(int s) const { return s - s_min; }
  std::uint64_t max_cut() const;
};
LevelSet make_levels(double N_absD, int p, int s_min, int s_max, double tol, Kernel K = Kernel::kDegree2);

// One sweep over all n = m^2 d <= max cut for a top family (p^alpha, p^beta).
// Norms d prime to p when drop_d, m prime to p when drop_m, m prime to N.
struct PassSpec {
  i64 N = 1;
  i64 D = -7;
  int p = 3, alpha = 0, beta = 0;
  bool drop_m = false, drop_d = false;
  Kernel kernel = Kernel::kDegree2;
  LevelSet levels;

  i64 q() const { return ipow(p, beta); }
};
// The conventions of the family average at (alpha, beta): drop_m iff beta >= 1,
// drop_d iff alpha + beta >= 1.
PassSpec family_pass_spec(const ImagQuadField& K, i64 N, int p, int alpha, int beta, int s_min, int s_max,
                          double tol, Kernel kernel = Kernel::kDegree2);

// T[k][s][A][r] = sum over m^2 d = n <= cut_s with an ideal of norm d in
// class A and n = r mod q of omega(m) lambda(d) n^{-1/2} V_{k+1}(n / L_s).
class ClassResidueSums {
 public:
  ClassResidueSums() = default;
  ClassResidueSums(int nlev, int h, i64 q) : nlev_(nlev), h_(h), q_(q), v_(2 * nlev * h * q, 0.0) {}
  double at(int k, int sidx, int A, i64 r) const { return v_[cell(k, sidx, A, r)]; }
  double& at(int k, int sidx, int A, i64 r) { return v_[cell(k, sidx, A, r)]; }
  std::size_t cell(int k, int sidx, int A, i64 r) const {
    return ((static_cast<std::size_t>(k) * nlev_ + sidx) * h_ + A) * q_ + r;
  }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }
  int classes() const { return h_; }
  i64 modulus() const { return q_; }

 private:
  int nlev_ = 0, h_ = 0;
  i64 q_ = 1;
  std::vector<double> v_;
};

// Segmented, OpenMP over fixed blocks with an ordered compensated reduction:
// the result does not depend on the thread count.
ClassResidueSums class_residue_sums(const PassSpec& S, const NewformTable& f, const PrimeIdealClasses& P,
                                    std::uint64_t block = 1 << 16);
// Reference: one d at a time, trial-division factorization, ideals by ideals_of_norm.
ClassResidueSums class_residue_sums_serial(const PassSpec& S, const NewformTable& f, const OrderClassGroup& G);

// Targets of the congruence m^2 d = t (mod p^y).
enum Target { kTargetOne = 0, kTargetN2 = 1, kTargetNinv2 = 2 };

// Lattice sums over (u, v) with u^2 + |D| v^2 = 4d, each pair weighted 1/2:
//   sum[k][x][y][t][s] = sum over n = m^2 d <= cut_s with p^x | v and
//   n = target_t (mod p^y) of omega(m) lambda(d) n^{-1/2} V_{k+1}(n / L_s).
class LatticeSums {
 public:
  LatticeSums() = default;
  LatticeSums(int alpha, int beta, int nlev)
      : a_(alpha), b_(beta), nlev_(nlev), v_(2 * (alpha + 1) * (beta + 1) * 3 * nlev, 0.0) {}
  double at(int k, int x, int y, int t, int sidx) const { return v_[cell(k, x, y, t, sidx)]; }
  double& at(int k, int x, int y, int t, int sidx) { return v_[cell(k, x, y, t, sidx)]; }
  std::size_t cell(int k, int x, int y, int t, int sidx) const {
    return (((static_cast<std::size_t>(k) * (a_ + 1) + x) * (b_ + 1) + y) * 3 + t) * nlev_ + sidx;
  }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }
  // turn exact-(x, y) cells into cumulative ones (x' >= x, y' >= y)
  void accumulate();

 private:
  int a_ = 0, b_ = 0, nlev_ = 0;
  std::vector<double> v_;
};

LatticeSums lattice_sums(const PassSpec& S, const NewformTable& f, std::uint64_t rows_per_chunk = 64);
LatticeSums lattice_sums_serial(const PassSpec& S, const NewformTable& f);

}  // namespace rsavg

#endif
