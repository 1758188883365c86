#ifndef RSAVG_ANALYTIC_HPP
#define RSAVG_ANALYTIC_HPP

#include <cstdint>
#include <limits>

#include "rsavg/arith.hpp"
#include "rsavg/newform.hpp"
#include "rsavg/quadfield.hpp"

namespace rsavg {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kZeta2 = 1.64493406684822643647241516664602519;
inline constexpr double kZetaPrime2 = -0.93754825431584375370257409456786497;

cplx log_gamma(cplx z);  // principal branch, Re z > 0 or z off the poles
double e1(double x);      // exponential integral E_1, x > 0
double digamma(double x);

// (2 pi)^{-s} Gamma(s+1) s^{-m}
cplx v_hat(int m, cplx s);
// pi Gamma_R(s+1) Gamma_R(s+2) s^{-m}, the undoubled gamma-factor product
cplx v_hat_gamma_r(int m, cplx s);

// closed forms for m = 1, 2; contour quadrature for m >= 3
double v(int m, double y);

// (2 pi)^{-2s} Gamma(s+1)^2 s^{-m}: the gamma ratio of Gamma_C(s+1/2)^2, the
// archimedean factor of a degree-four Rankin-Selberg L-function
cplx v_hat_degree4(int m, cplx s);
// its inverse Mellin transform by the trapezoidal rule on sigma = max(2, 2 pi sqrt(y))
double v_degree4(int m, double y, double tol = 1e-14);
// closed forms for m = 1, 2 with u = 4 pi sqrt(y): V_1 = u K_1(u), V_2 = 2 K_0(u)
double v_degree4_closed(int m, double y);

// Archimedean weight of the approximate functional equation.
enum class Kernel {
  kDegree2,  // v_hat and v above
  kDegree4,  // v_hat_degree4 and v_degree4_closed
};
inline double cutoff(Kernel K, int m, double y) { return K == Kernel::kDegree2 ? v(m, y) : v_degree4_closed(m, y); }

struct QuadratureResult {
  double value;
  double tail_bound;  // bound on the discarded part of the contour
  double abscissa;
  int nodes;
};

// (1/2 pi i) int_{(sigma)} v_hat(m, s) y^{-s} ds by the trapezoidal rule with
// step h; sigma = max(2, 2 pi y) unless given.
QuadratureResult v_quadrature(int m, double y, double tol = 1e-14, double h = 0.05,
                              double sigma = std::numeric_limits<double>::quiet_NaN());

// v(m, p^4 y) - v(m, y)
double v_tilde_level(int m, double y, i64 p);
// p^{1-eps} v(m, y) - p^{-eps} v(m, p^2 y)
double v_tilde_weight(int m, double y, i64 p, double eps_weight);

struct Truncation {
  std::uint64_t n_max;
  double tail_bound;  // bound on sum_{n > n_max} d_4(n) n^{-1/2} |V_m(n/level)|
};
Truncation truncation_length(int m, double level, double tol, Kernel K = Kernel::kDegree2);
// the bound itself, for a given cut
double truncation_tail_bound(int m, double level, double x, Kernel K = Kernel::kDegree2);

class CutoffEvaluator {
 public:
  explicit CutoffEvaluator(int m, double tol = 1e-14) : m_(m), tol_(tol) {}
  int order() const { return m_; }
  bool closed_form() const { return m_ <= 2; }
  double operator()(double y) const { return closed_form() ? v(m_, y) : v_quadrature(m_, y, tol_).value; }
  Truncation truncation(double level, double tol) const { return truncation_length(m_, level, tol); }

 private:
  int m_;
  double tol_;
};

// zeta^{(M)}(2) and its logarithmic derivative, Euler factors at l | M removed
double zeta2_removed(i64 M);
double zeta2_log_derivative_removed(i64 M);

// L(1, theta) for a non-principal character by the finite digamma formula,
// times prod_{l | M} (1 - theta(l)/l).
cplx L1_dirichlet(const DirichletCharacter& theta, i64 M = 1);
// Gaussian-smoothed sum_{n <= cap} theta(n)/n exp(-(n/X)^2); independent check
cplx L1_dirichlet_smoothed(const DirichletCharacter& theta, double X);

struct SmoothedValue {
  double value;
  double error_estimate;  // |two-scale difference| after extrapolation
};

// L'/L(1, omega) with the Euler factors at l | M removed.
SmoothedValue Lprime_over_L_1(const ImagQuadField& K, i64 M = 1, double X = 2.0e5);

// L^{(M)}(1, Sym^2 f) and its logarithmic derivative at s = 1, from the
// smoothed Sym^2 Dirichlet series with a two-scale extrapolation.
struct Sym2Values {
  SmoothedValue value;
  SmoothedValue log_derivative;
};
Sym2Values L1_sym2(const Seeds& seeds, i64 M = 1, double X = 2.0e5);

// Inputs of the main terms; superscripts name the moduli whose Euler factors are removed.
struct MainTermInputs {
  double L1_omega;        // L^{(N)}(1, omega)
  double Lp_L_omega;      // L'^{(N)}/L^{(N)}(1, omega)
  double L1_sym2;         // L^{(c)}(1, Sym^2 f)
  double Lp_L_sym2;       // L'^{(c)}/L^{(c)}(1, Sym^2 f)
  double zeta2;           // zeta^{(cN)}(2)
  double zeta2_log_deriv; // zeta'^{(cN)}/zeta^{(cN)}(2)
};
MainTermInputs main_term_inputs(const Seeds& seeds, const ImagQuadField& K, i64 c, double X = 2.0e5);

double main_term_generic(const MainTermInputs& in);
// Exceptional main term with bracket 1/2 log(N Delta) + L'/L(omega) + L'/L(Sym^2) - zeta'/zeta(2) - gamma - log 2 pi.
double main_term_exceptional(const MainTermInputs& in, i64 N, double Delta);
// The s = 0 residue of the b = 0 integral recomputed from v_hat(2, s):
// 1/2 log(N Delta) + L'/L(omega) + L'/L(Sym^2) - 2 zeta'/zeta(2) - (gamma + log 2 pi)/2.
double main_term_exceptional_residue(const MainTermInputs& in, i64 N, double Delta);
// (1/phi(q)) sum_{chi mod q} L^{(N)}(1, omega chi^power)
double mean_L1_omega_chi(const ImagQuadField& K, i64 N, i64 q, int power);
// (1/phi(q)) sum_{chi mod q} L^{(N)}(1, omega chi^2)
double main_term_cyclotomic(const ImagQuadField& K, i64 N, i64 q);

}  // namespace rsavg

#endif
