#include "rsavg/analytic.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

namespace rsavg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLog2Pi = 1.83787706640934548356065947281123527;

std::vector<i64> prime_divisors(i64 M) {
  std::vector<i64> ps;
  if (M <= 1) return ps;
  for (auto& [l, e] : factorize(M)) ps.push_back(l);
  return ps;
}
}  // namespace

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  cplx shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static const double B[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
                             -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
  cplx zi = 1.0 / z, zi2 = zi * zi, series = 0.0, p = zi;
  for (double b : B) {
    series += b * p;
    p *= zi2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * kLog2Pi + series - shift;
}

double e1(double x) {
  if (!(x > 0)) throw std::domain_error("e1: argument must be positive");
  if (x > 700.0) return 0.0;
  return boost::math::expint(1, x);
}

double digamma(double x) { return boost::math::digamma(x); }

cplx v_hat(int m, cplx s) {
  if (s == cplx(0.0, 0.0)) throw std::domain_error("v_hat: pole at s = 0");
  return std::exp(log_gamma(s + 1.0) - s * std::log(2.0 * kPi)) * std::pow(s, -m);
}

cplx v_hat_gamma_r(int m, cplx s) {
  if (s == cplx(0.0, 0.0)) throw std::domain_error("v_hat: pole at s = 0");
  // Gamma_R(u) = pi^{-u/2} Gamma(u/2), at u = s + 1 and u = s + 2
  cplx a = s + 1.0, b = s + 2.0;
  cplx lg = -0.5 * a * std::log(kPi) + log_gamma(0.5 * a) - 0.5 * b * std::log(kPi) + log_gamma(0.5 * b);
  return kPi * std::exp(lg) * std::pow(s, -m);
}

double v(int m, double y) {
  if (!(y > 0)) throw std::domain_error("v: argument must be positive");
  if (m == 1) return std::exp(-2.0 * kPi * y);
  if (m == 2) return e1(2.0 * kPi * y);
  return v_quadrature(m, y).value;
}

QuadratureResult v_quadrature(int m, double y, double tol, double h, double sigma) {
  if (!(y > 0)) throw std::domain_error("v_quadrature: argument must be positive");
  if (m < 1) throw std::domain_error("v_quadrature: order must be positive");
  if (std::isnan(sigma)) sigma = std::max(2.0, 2.0 * kPi * y);
  const double ly = std::log(y);
  auto f = [&](double t) {
    cplx s(sigma, t);
    return (v_hat(m, s) * std::exp(-s * ly)).real();
  };
  // the integrand is conjugate-symmetric in t
  double sum = 0.5 * f(0.0);
  int nodes = 1;
  double tail = 0.0;
  for (int k = 1;; ++k) {
    double t = k * h;
    // |v_hat(sigma + i t)| y^{-sigma} bounds the integrand; beyond
    // t > 2(sigma + 1/2)/pi it decays at least like exp(-pi t / 4)
    double mag = std::exp(log_gamma(cplx(sigma + 1.0, t)).real() - sigma * std::log(2.0 * kPi) -
                          m * 0.5 * std::log(sigma * sigma + t * t) - sigma * ly);
    sum += f(t);
    ++nodes;
    if (t > 2.0 * (sigma + 0.5) / kPi + 1.0) {
      tail = mag * (4.0 / kPi) / kPi;
      if (tail < tol / 2) break;
    }
    if (k > 2'000'000) break;
  }
  return {sum * h / kPi, tail, sigma, nodes};
}

cplx v_hat_degree4(int m, cplx s) {
  return std::exp(2.0 * log_gamma(s + 1.0) - 2.0 * s * std::log(2.0 * kPi)) * std::pow(s, static_cast<double>(-m));
}

double v_degree4(int m, double y, double tol) {
  if (!(y > 0)) throw std::domain_error("v_degree4: argument must be positive");
  const double sigma = std::max(2.0, 2.0 * kPi * std::sqrt(y));
  const double ly = std::log(y), h = 0.05;
  auto f = [&](double t) {
    cplx s(sigma, t);
    return (v_hat_degree4(m, s) * std::exp(-s * ly)).real();
  };
  double sum = 0.5 * f(0.0);
  for (int k = 1; k < 2'000'000; ++k) {
    double t = k * h;
    double mag = std::exp(2.0 * log_gamma(cplx(sigma + 1.0, t)).real() - 2.0 * sigma * std::log(2.0 * kPi) -
                          m * 0.5 * std::log(sigma * sigma + t * t) - sigma * ly);
    sum += f(t);
    // Gamma(s+1)^2 decays like exp(-pi t); stop once the remaining mass is below tol
    if (t > 2.0 * sigma && mag / kPi < tol * 1e-3) break;
  }
  return sum * h / kPi;
}

double v_degree4_closed(int m, double y) {
  if (!(y > 0)) throw std::domain_error("v_degree4_closed: argument must be positive");
  const double u = 4.0 * kPi * std::sqrt(y);
  if (u > 700.0) return 0.0;
  if (m == 1) return u * boost::math::cyl_bessel_k(1, u);
  if (m == 2) return 2.0 * boost::math::cyl_bessel_k(0, u);
  throw std::domain_error("v_degree4_closed: m must be 1 or 2");
}

double v_tilde_level(int m, double y, i64 p) {
  double p4 = static_cast<double>(p) * p * p * p;
  return v(m, p4 * y) - v(m, y);
}

double v_tilde_weight(int m, double y, i64 p, double eps_weight) {
  if (!(eps_weight > 0.0 && eps_weight < 1.0)) throw std::domain_error("v_tilde_weight: weight must lie in (0, 1)");
  double pd = static_cast<double>(p);
  return std::pow(pd, 1.0 - eps_weight) * v(m, y) - std::pow(pd, -eps_weight) * v(m, pd * pd * y);
}

namespace {

// Degree-four weights, u = 4 pi sqrt(t / level) with t >= x:
//   K_0(u) <= sqrt(pi / 2u) e^{-u} for all u (sqrt(u) e^u K_0(u) increases to sqrt(pi/2)),
//   K_1(u) <= K_1(u_x) sqrt(u_x / u) e^{u_x - u} (sqrt(u) e^u K_1(u) decreases),
// and dt = level u du / (8 pi^2), Gamma(a, u) <= u^{a-1} e^{-u} / (1 - (a-1)/u).
void degree4_majorant(int m, double level, double x, double& b, double& ib) {
  const double u = 4.0 * kPi * std::sqrt(x / level);
  const double jac = level / (8.0 * kPi * kPi);
  if (m == 1) {
    if (u <= 3.0) {
      b = ib = std::numeric_limits<double>::infinity();
      return;
    }
    b = v_degree4_closed(1, x / level);
    ib = jac * b * u / (1.0 - 1.5 / u);
  } else if (m == 2) {
    if (u <= 1.0) {
      b = ib = std::numeric_limits<double>::infinity();
      return;
    }
    b = 2.0 * std::sqrt(kPi / (2.0 * u)) * std::exp(-u);
    ib = jac * 2.0 * std::sqrt(kPi / 2.0) * std::sqrt(u) * std::exp(-u) / (1.0 - 0.5 / u);
  } else {
    throw std::domain_error("truncation_tail_bound: degree-four weights need m = 1 or 2");
  }
}

}  // namespace

double truncation_tail_bound(int m, double level, double x, Kernel K) {
  // Partial summation against sum_{n <= t} d_4(n) <= F(t) = t (log t + 3)^3 / 6
  // with phi(t) = t^{-1/2} b(t / level) decreasing, b >= |V_m|:
  //   tail <= F(x) phi(x) + int_x^oo F'(t) phi(t) dt,
  // and F'(t) t^{-1/2} is decreasing once log x > 3, so the integral is at most
  // F'(x) x^{-1/2} int_x^oo b(t / level) dt.
  if (x < 1.0) x = 1.0;
  double lx = std::log(x);
  double F = x * std::pow(lx + 3.0, 3) / 6.0;
  double Fp = std::pow(lx + 3.0, 2) * (lx + 6.0) / 6.0;
  double u = 2.0 * kPi * x / level;
  double b, ib;
  if (K == Kernel::kDegree4) {
    degree4_majorant(m, level, x, b, ib);
    if (std::isinf(b)) return b;
  } else if (m == 1) {
    b = std::exp(-u);
    ib = level / (2.0 * kPi) * std::exp(-u);
  } else if (m == 2) {
    b = std::exp(-u) / u;
    ib = level / (2.0 * kPi) * std::exp(-u) / (u + 1.0);
  } else {
    // V_m(y) <= exp(-2 pi y) for y >= 1 and every m
    if (x < level) return std::numeric_limits<double>::infinity();
    b = std::exp(-u);
    ib = level / (2.0 * kPi) * std::exp(-u);
  }
  if (lx <= 3.0) {
    // F' t^{-1/2} not yet monotone: use its value at max(x, e^3) times a
    // safety factor covering the initial rise
    double x3 = std::exp(3.0);
    double Fp3 = std::pow(6.0, 2) * 9.0 / 6.0;
    return F * b / std::sqrt(x) + 2.0 * Fp3 / std::sqrt(x) * ib * std::sqrt(x3);
  }
  return F * b / std::sqrt(x) + Fp / std::sqrt(x) * ib;
}

Truncation truncation_length(int m, double level, double tol, Kernel K) {
  if (!(level >= 1.0)) throw std::domain_error("truncation_length: level must be >= 1");
  if (!(tol > 0)) throw std::domain_error("truncation_length: tol must be positive");
  if (std::isinf(tol)) return {1, truncation_tail_bound(m, level, 1.0, K)};
  double lo = 1.0, hi = std::max(level, 2.0);
  while (truncation_tail_bound(m, level, hi, K) > tol) {
    lo = hi;
    hi *= 1.5;
    if (hi > 1e15) throw std::runtime_error("truncation_length: tolerance unreachable");
  }
  // smallest integer x with bound <= tol (bound decreasing in x for x >= level/4)
  std::uint64_t a = static_cast<std::uint64_t>(lo), b = static_cast<std::uint64_t>(std::ceil(hi));
  while (a + 1 < b) {
    std::uint64_t mid = a + (b - a) / 2;
    if (truncation_tail_bound(m, level, static_cast<double>(mid), K) <= tol)
      b = mid;
    else
      a = mid;
  }
  return {b, truncation_tail_bound(m, level, static_cast<double>(b), K)};
}

double zeta2_removed(i64 M) {
  double z = kZeta2;
  for (i64 l : prime_divisors(M)) z *= 1.0 - 1.0 / (static_cast<double>(l) * l);
  return z;
}

double zeta2_log_derivative_removed(i64 M) {
  double d = kZetaPrime2 / kZeta2;
  for (i64 l : prime_divisors(M)) d += std::log(static_cast<double>(l)) / (static_cast<double>(l) * l - 1.0);
  return d;
}

cplx L1_dirichlet(const DirichletCharacter& theta, i64 M) {
  if (theta.is_principal()) throw std::domain_error("L1_dirichlet: principal character has a pole at s = 1");
  i64 Q = theta.modulus();
  CompensatedSum<cplx> s;
  for (i64 a = 1; a < Q; ++a) {
    auto v = theta(a);
    if (!v) continue;
    s.add(v->value() * digamma(static_cast<double>(a) / static_cast<double>(Q)));
  }
  cplx L = -s.value() / static_cast<double>(Q);
  for (i64 l : prime_divisors(M)) L *= 1.0 - theta.value(l) / static_cast<double>(l);
  return L;
}

cplx L1_dirichlet_smoothed(const DirichletCharacter& theta, double X) {
  std::uint64_t cap = static_cast<std::uint64_t>(7.0 * X) + 1;
  CompensatedSum<cplx> s;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    cplx c = theta.value(static_cast<i64>(n));
    if (c == cplx(0.0, 0.0)) continue;
    double t = static_cast<double>(n) / X;
    s.add(c * std::exp(-t * t) / static_cast<double>(n));
  }
  return s.value();
}

namespace {

// Richardson for an error ~ C X^{-2}: (4 S(2X) - S(X)) / 3
SmoothedValue richardson(double sX, double s2X) {
  double v = (4.0 * s2X - sX) / 3.0;
  return {v, std::abs(s2X - sX) / 3.0};
}

// sum_n c(n) w(n) and sum_n c(n) log(n) w(n), w(n) = exp(-(n/X)^2) / n
template <class Coef>
std::pair<double, double> smoothed_pair(Coef&& c, std::uint64_t cap, double X) {
  CompensatedSum<double> a, b;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    double cn = c(n);
    if (cn == 0.0) continue;
    double t = static_cast<double>(n) / X;
    double w = std::exp(-t * t) / static_cast<double>(n);
    a.add(cn * w);
    b.add(cn * w * std::log(static_cast<double>(n)));
  }
  return {a.value(), b.value()};
}

}  // namespace

SmoothedValue Lprime_over_L_1(const ImagQuadField& K, i64 M, double X) {
  const i64 D = K.disc();
  auto eval = [&](double x) {
    std::uint64_t cap = static_cast<std::uint64_t>(7.0 * x) + 1;
    std::vector<double> om(cap + 1);
    for (std::uint64_t n = 1; n <= cap; ++n) om[n] = kronecker(D, static_cast<i64>(n));
    auto [L, Ls] = smoothed_pair([&](std::uint64_t n) { return om[n]; }, cap, x);
    return std::make_pair(L, -Ls);  // L(1), L'(1)
  };
  auto [L1, Lp1] = eval(X);
  auto [L2, Lp2] = eval(2.0 * X);
  SmoothedValue L = richardson(L1, L2), Lp = richardson(Lp1, Lp2);
  double r = Lp.value / L.value;
  for (i64 l : prime_divisors(M)) {
    int w = K.omega(l);
    r += w * std::log(static_cast<double>(l)) / (static_cast<double>(l) - w);
  }
  double err = Lp.error_estimate / std::abs(L.value) + std::abs(Lp.value) * L.error_estimate / (L.value * L.value);
  return {r, err};
}

namespace {

// Coefficients of L(s, Sym^2 f) = zeta^{(N)}(2s) sum lambda(n^2) n^{-s}, with
// the Euler factors at l | M removed, up to cap.
std::vector<double> sym2_coefficients(const Seeds& seeds, i64 M, std::uint64_t cap) {
  if (seeds.bound < cap) throw InputError("seeds too shallow for the Sym^2 series");
  std::vector<double> c(cap + 1, 1.0);
  c[0] = 0.0;
  for (std::size_t i = 0; i < seeds.primes.size() && seeds.primes[i] <= cap; ++i) {
    std::uint64_t l = seeds.primes[i];
    double lam = seeds.ap[i] / std::sqrt(static_cast<double>(l));
    bool bad = seeds.level % static_cast<i64>(l) == 0;
    bool removed = M > 1 && M % static_cast<i64>(l) == 0;
    // lambda(l^j) for j up to 2 e_max
    int emax = 0;
    for (std::uint64_t pk = l; pk <= cap; pk *= l) {
      ++emax;
      if (pk > cap / l) break;
    }
    std::vector<double> lp(2 * emax + 1);
    lp[0] = 1.0;
    if (2 * emax >= 1) lp[1] = lam;
    for (int j = 2; j <= 2 * emax; ++j) lp[j] = bad ? lp[j - 1] * lam : lam * lp[j - 1] - lp[j - 2];
    std::uint64_t pk = 1;
    for (int e = 1; e <= emax; ++e) {
      pk *= l;
      double local = 0.0;
      if (!removed) {
        // sum over m^2 k = l^e with (m, N) = 1 of lambda(k^2)
        for (int j = 0; 2 * j <= e; ++j) {
          if (j > 0 && bad) break;
          local += lp[2 * (e - 2 * j)];
        }
      }
      std::uint64_t cof = 1;
      for (std::uint64_t n = pk; n <= cap; n += pk, ++cof) {
        if (cof % l == 0) continue;
        c[n] *= local;
      }
    }
  }
  return c;
}

}  // namespace

Sym2Values L1_sym2(const Seeds& seeds, i64 M, double X) {
  auto eval = [&](double x) {
    std::uint64_t cap = static_cast<std::uint64_t>(7.0 * x) + 1;
    auto c = sym2_coefficients(seeds, M, cap);
    auto [L, Ls] = smoothed_pair([&](std::uint64_t n) { return c[n]; }, cap, x);
    return std::make_pair(L, -Ls);
  };
  auto [L1, Lp1] = eval(X);
  auto [L2, Lp2] = eval(2.0 * X);
  SmoothedValue L = richardson(L1, L2), Lp = richardson(Lp1, Lp2);
  double r = Lp.value / L.value;
  double err = Lp.error_estimate / std::abs(L.value) + std::abs(Lp.value) * L.error_estimate / (L.value * L.value);
  return {L, {r, err}};
}

MainTermInputs main_term_inputs(const Seeds& seeds, const ImagQuadField& K, i64 c, double X) {
  const i64 N = seeds.level;
  MainTermInputs in{};
  in.L1_omega = L1_dirichlet(K.omega_character(), N).real();
  in.Lp_L_omega = Lprime_over_L_1(K, N, X).value;
  auto s2 = L1_sym2(seeds, c, X);
  in.L1_sym2 = s2.value.value;
  in.Lp_L_sym2 = s2.log_derivative.value;
  in.zeta2 = zeta2_removed(c * N);
  in.zeta2_log_deriv = zeta2_log_derivative_removed(c * N);
  return in;
}

double main_term_generic(const MainTermInputs& in) { return 2.0 * in.L1_omega * in.L1_sym2 / in.zeta2; }

double main_term_exceptional(const MainTermInputs& in, i64 N, double Delta) {
  double bracket = 0.5 * std::log(static_cast<double>(N) * Delta) + in.Lp_L_omega + in.Lp_L_sym2 -
                   in.zeta2_log_deriv - kEulerGamma - kLog2Pi;
  return 4.0 * in.L1_omega * in.L1_sym2 / in.zeta2 * bracket;
}

double main_term_exceptional_residue(const MainTermInputs& in, i64 N, double Delta) {
  double bracket = 0.5 * std::log(static_cast<double>(N) * Delta) + in.Lp_L_omega + in.Lp_L_sym2 -
                   2.0 * in.zeta2_log_deriv - 0.5 * (kEulerGamma + kLog2Pi);
  return 4.0 * in.L1_omega * in.L1_sym2 / in.zeta2 * bracket;
}

double mean_L1_omega_chi(const ImagQuadField& K, i64 N, i64 q, int power) {
  if (q < 1) throw std::domain_error("mean_L1_omega_chi: q must be positive");
  const i64 absD = -K.disc();
  auto gQ = std::make_shared<const UnitGroup>(absD * q);
  CompensatedSum<double> s;
  for (const auto& chi : dirichlet_group(q)) {
    std::vector<RootOfUnity> vals;
    for (i64 g : gQ->generators()) {
      RootOfUnity w(kronecker(K.disc(), g) == 1 ? 0 : 1, 2);
      vals.push_back(w * chi(mod(g, q))->pow(power));
    }
    auto theta = DirichletCharacter::from_generator_values(gQ, vals);
    s.add(L1_dirichlet(theta, N).real());
  }
  return s.value() / static_cast<double>(euler_phi(q));
}

double main_term_cyclotomic(const ImagQuadField& K, i64 N, i64 q) { return mean_L1_omega_chi(K, N, q, 2); }

}  // namespace rsavg
