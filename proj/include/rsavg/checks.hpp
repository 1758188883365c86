#ifndef RSAVG_CHECKS_HPP
#define RSAVG_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rsavg/averages.hpp"

namespace rsavg {

struct CheckResult {
  bool pass = true;
  std::string detail;
};

// ideal counts of O_K against sum_{d | n} omega(d), n <= n_max
CheckResult check_counting(const std::vector<i64>& discs, i64 n_max);
// ideal counts of O_f against those of O_K for n prime to f
CheckResult check_ring_counts(const std::vector<i64>& discs, const std::vector<i64>& conductors, i64 n_max);
// class-number formula against reduced-form enumeration
CheckResult check_class_numbers(const std::vector<i64>& discs, const std::vector<i64>& conductors);
// contour quadrature against the closed forms on a log grid of [1e-3, 10], and
// the duplication identity for v_hat at random points
CheckResult check_cutoff(int grid_points, int random_points, std::uint64_t seed);
// every exceptional member of (p^a, 1), a <= alpha_max, at k = 0 vanishes to
// its certificate, with depletion top and own
CheckResult check_forced_zero(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha_max,
                              double tol, double max_certificate);

// One family of a grid: the direct and closed-form averages, the relation
// residuals and, for alpha, beta >= 1, the difference-sum factorization.
struct GridRow {
  int a = 0, b = 0, k = 0;
  double H_direct = 0, H_formula = 0;
  double residual = 0;     // |H_direct - H_formula|
  double certificate = 0;  // truncation certificate of the average, both sides
  RelationResiduals relations;
  bool has_difference = false;
  DifferenceReport difference;
};
std::vector<GridRow> grid_rows(const FamilyGrid& G, int alpha, int beta, bool galois);

// |H_direct - H_formula| <= certificate and < abs_target on every row
CheckResult check_haf(const std::vector<GridRow>& rows, double abs_target);
// R1, R2, R3 <= 2 x certificate on every row
CheckResult check_mobius(const std::vector<GridRow>& rows);
// direct and factored difference sums agree to rel_tol where the factorization applies
CheckResult check_difference(const std::vector<GridRow>& rows, double rel_tol);

}  // namespace rsavg

#endif
