#include "rsavg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rsavg/analytic.hpp"

namespace rsavg {

namespace {

void fail(CheckResult& r, const std::string& what) {
  if (r.pass) r.detail = what;
  r.pass = false;
}

// #{(x, y) : a x^2 + b x y + c y^2 = n}, a > 0, b^2 - 4ac < 0
i64 representations(const QuadForm& q, i64 n) {
  const i64 disc = -q.disc();
  i64 cnt = 0;
  // (2 a x + b y)^2 + disc y^2 = 4 a n
  for (i64 y = -isqrt(4 * q.a * n / disc); y * y * disc <= 4 * q.a * n; ++y) {
    const i64 t2 = 4 * q.a * n - disc * y * y;
    const i64 t = isqrt(t2);
    if (t * t != t2) continue;
    if ((t - q.b * y) % (2 * q.a) == 0) ++cnt;
    if (t != 0 && (-t - q.b * y) % (2 * q.a) == 0) ++cnt;
  }
  return cnt;
}

}  // namespace

CheckResult check_counting(const std::vector<i64>& discs, i64 n_max) {
  CheckResult r;
  for (i64 D : discs) {
    ImagQuadField K(D);
    OrderClassGroup G(K, 1);
    std::vector<i64> sieve(n_max + 1, 0);
    for (i64 d = 1; d <= n_max; ++d) {
      const int w = kronecker(D, d);
      if (w)
        for (i64 n = d; n <= n_max; n += d) sieve[n] += w;
    }
    for (i64 n = 1; n <= n_max; ++n)
      if (ideal_count(G, n) != sieve[n]) {
        fail(r, "D=" + std::to_string(D) + " n=" + std::to_string(n));
        break;
      }
  }
  if (r.pass) r.detail = "n <= " + std::to_string(n_max) + ", " + std::to_string(discs.size()) + " fields";
  return r;
}

CheckResult check_ring_counts(const std::vector<i64>& discs, const std::vector<i64>& conductors, i64 n_max) {
  CheckResult r;
  for (i64 D : discs) {
    ImagQuadField K(D);
    for (i64 f : conductors) {
      OrderClassGroup G(K, f);
      for (i64 n = 1; n <= n_max; ++n) {
        if (std::gcd(n, f) != 1) continue;
        // invertible O_f-ideals of norm n: representations by the reduced forms, w = 2
        i64 rf = 0;
        for (const auto& q : G.forms()) rf += representations(q, n);
        rf /= 2;
        if (rf != r1_divisor_sum(D, n)) {
          fail(r, "D=" + std::to_string(D) + " f=" + std::to_string(f) + " n=" + std::to_string(n));
          break;
        }
      }
    }
  }
  if (r.pass) r.detail = "n <= " + std::to_string(n_max) + " prime to f";
  return r;
}

CheckResult check_class_numbers(const std::vector<i64>& discs, const std::vector<i64>& conductors) {
  CheckResult r;
  int n = 0;
  for (i64 D : discs) {
    ImagQuadField K(D);
    for (i64 f : conductors) {
      const i64 enumerated = static_cast<i64>(OrderClassGroup(K, f).size());
      if (class_number(D, f) != enumerated) fail(r, "D=" + std::to_string(D) + " f=" + std::to_string(f));
      ++n;
    }
  }
  if (r.pass) r.detail = std::to_string(n) + " orders";
  return r;
}

CheckResult check_cutoff(int grid_points, int random_points, std::uint64_t seed) {
  CheckResult r;
  double worst_grid = 0.0, worst_dup = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double y = std::pow(10.0, -3.0 + 4.0 * i / (grid_points - 1));
    const double q1 = v_quadrature(1, y).value, q2 = v_quadrature(2, y).value;
    worst_grid = std::max({worst_grid, std::abs(q1 - std::exp(-2.0 * std::numbers::pi * y)),
                           std::abs(q2 - e1(2.0 * std::numbers::pi * y))});
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.2, 6.0), im(-30.0, 30.0);
  for (int i = 0; i < random_points; ++i) {
    const cplx s(re(rng), im(rng));
    const cplx a = v_hat(1, s), b = v_hat_gamma_r(1, s);
    worst_dup = std::max(worst_dup, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  if (worst_grid >= 1e-10) fail(r, "quadrature error " + std::to_string(worst_grid));
  if (worst_dup >= 1e-11) fail(r, "duplication error " + std::to_string(worst_dup));
  std::ostringstream os;
  os.precision(3);
  os << "grid max err " << worst_grid << ", duplication max err " << worst_dup;
  if (r.pass) r.detail = os.str();
  return r;
}

CheckResult check_forced_zero(const ImagQuadField& K, const NewformTable& f, i64 N, int p, int alpha_max, double tol,
                              double max_certificate) {
  CheckResult r;
  int members = 0;
  double worst = 0.0, worst_cert = 0.0;
  for (int a = 0; a <= alpha_max; ++a) {
    auto F = enumerate_family(K, N, p, a, 0);
    for (const auto& W : F.members()) {
      if (!W.exceptional) continue;
      for (i64 dep : {top_depletion(p, a, 0), i64{0}}) {
        auto c = central_value(F, W, f, 0, dep, tol, f.n_max());
        worst = std::max(worst, std::abs(c.value));
        worst_cert = std::max(worst_cert, c.certificate);
        if (!(std::abs(c.value) < c.certificate)) fail(r, "alpha=" + std::to_string(a) + " member " + std::to_string(W.index));
      }
      ++members;
    }
  }
  if (worst_cert >= max_certificate) fail(r, "certificate above target");
  std::ostringstream os;
  os.precision(3);
  os << members << " exceptional members, max |L| " << worst << ", max certificate " << worst_cert;
  if (r.pass) r.detail = os.str();
  return r;
}

std::vector<GridRow> grid_rows(const FamilyGrid& G, int alpha, int beta, bool galois) {
  std::vector<GridRow> rows;
  for (int a = 0; a <= alpha; ++a)
    for (int b = 0; b <= beta; ++b)
      for (int k = 0; k < 2; ++k) {
        const auto& P = G.pass_for(a, b);
        GridRow row;
        row.a = a;
        row.b = b;
        row.k = k;
        row.H_direct = P.H_direct(a, b, k).real();
        row.H_formula = P.H_formula(a, b, k);
        row.residual = std::abs(P.H_direct(a, b, k) - row.H_formula);
        row.certificate = 2.0 * P.family_certificate(a, b, k) / static_cast<double>(P.family_size(a, b));
        if (galois) row.relations = relation_residuals(P, a, b, k);
        if (a >= 1 && b >= 1) {
          row.has_difference = true;
          row.difference = difference_sum(P, a, b, k, 0.5, 0.5);
        }
        rows.push_back(row);
      }
  return rows;
}

CheckResult check_haf(const std::vector<GridRow>& rows, double abs_target) {
  CheckResult r;
  double worst = 0.0;
  for (const auto& row : rows) {
    worst = std::max(worst, row.residual);
    if (!(row.residual <= row.certificate && row.residual < abs_target))
      fail(r, "(" + std::to_string(row.a) + "," + std::to_string(row.b) + ") k=" + std::to_string(row.k));
  }
  std::ostringstream os;
  os.precision(3);
  os << rows.size() << " rows, max residual " << worst;
  if (r.pass) r.detail = os.str();
  return r;
}

CheckResult check_mobius(const std::vector<GridRow>& rows) {
  CheckResult r;
  double worst = 0.0;
  for (const auto& row : rows) {
    const auto& R = row.relations;
    const double m = std::max({R.R1, R.R2, R.R3});
    worst = std::max(worst, m);
    if (!(m <= 2.0 * R.certificate))
      fail(r, "(" + std::to_string(row.a) + "," + std::to_string(row.b) + ") k=" + std::to_string(row.k));
  }
  std::ostringstream os;
  os.precision(3);
  os << rows.size() << " rows, max residual " << worst;
  if (r.pass) r.detail = os.str();
  return r;
}

CheckResult check_difference(const std::vector<GridRow>& rows, double rel_tol) {
  CheckResult r;
  double worst = 0.0;
  int checked = 0;
  for (const auto& row : rows) {
    if (!row.has_difference || !row.difference.factorization_exact) continue;
    const auto& d = row.difference;
    const double rel = std::abs(d.direct - d.factored) / std::max(std::abs(d.direct), 1e-300);
    worst = std::max(worst, rel);
    ++checked;
    if (!(rel <= rel_tol) || !(d.J0 != 0.0))
      fail(r, "(" + std::to_string(row.a) + "," + std::to_string(row.b) + ") k=" + std::to_string(row.k));
  }
  std::ostringstream os;
  os.precision(3);
  os << checked << " rows, max relative gap " << worst;
  if (r.pass) r.detail = os.str();
  return r;
}

}  // namespace rsavg
