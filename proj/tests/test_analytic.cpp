#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rsavg/analytic.hpp"
#include "support.hpp"

using namespace rsavg;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("analytic") {
  TEST_CASE("Mellin weights at small integers") {
    CHECK(std::abs(v_hat(1, 1.0) - 1.0 / (2 * kPi)) < 1e-15);
    CHECK(std::abs(v_hat(2, 1.0) - 1.0 / (2 * kPi)) < 1e-15);
    CHECK(std::abs(v_hat(1, 2.0) - 1.0 / (4 * kPi * kPi)) < 1e-15);
  }

  TEST_CASE("duplication: (2 pi)^{-s} Gamma(s+1) = pi Gamma_R(s+1) Gamma_R(s+2)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(0.2, 6.0), im(-30.0, 30.0);
    for (int i = 0; i < 100; ++i) {
      cplx s(re(rng), im(rng));
      for (int m = 1; m <= 3; ++m) {
        cplx a = v_hat(m, s), b = v_hat_gamma_r(m, s);
        CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)));
      }
    }
  }

  TEST_CASE("log-gamma against the standard library on the real axis") {
    for (double x = 0.1; x < 60.0; x *= 1.37) CHECK(log_gamma(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    // Gamma(1/2 + i t) has modulus sqrt(pi / cosh(pi t))
    for (double t : {0.5, 3.0, 11.0}) {
      double lhs = log_gamma(cplx(0.5, t)).real();
      double rhs = 0.5 * std::log(kPi / std::cosh(kPi * t));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  TEST_CASE("cutoff quadrature reproduces the closed forms") {
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      double y = std::pow(10.0, -3.0 + 4.0 * i / 59.0);
      worst = std::max(worst, std::abs(v_quadrature(1, y).value - std::exp(-2 * kPi * y)));
      worst = std::max(worst, std::abs(v_quadrature(2, y).value - e1(2 * kPi * y)));
    }
    CHECK(worst < 1e-10);
    CHECK(v(1, 1.0) == doctest::Approx(std::exp(-2 * kPi)).epsilon(1e-14));
    CHECK(std::abs(v_quadrature(1, 1.0).value - std::exp(-2 * kPi)) < 1e-12);
  }

  TEST_CASE("cutoff limits") {
    for (double y : {1e-6, 1e-8}) CHECK(std::abs(v(2, y) + std::log(2 * kPi * y) + kEulerGamma) < 10 * y);
    CHECK(std::abs(v(3, 10.0)) < 1e-20);
    for (double y : {0.01, 0.3, 2.0}) {
      CHECK(v(1, y) > 0.0);
      CHECK(v(2, y) > 0.0);
    }
    // y d/dy V_m = -V_{m-1}
    const double y = 0.37, h = 1e-5;
    double dv = (v(2, y * (1 + h)) - v(2, y * (1 - h))) / (2 * h);
    CHECK(dv == doctest::Approx(-v(1, y)).epsilon(1e-8));
  }

  TEST_CASE("auxiliary kernels") {
    CHECK(v_tilde_level(1, 1.0, 3) == doctest::Approx(std::exp(-162 * kPi) - std::exp(-2 * kPi)).epsilon(1e-14));
    CHECK(std::abs(v_tilde_level(2, 40.0, 3)) < 1e-100);
    CHECK(v_tilde_weight(1, 1.0, 3, 0.5) ==
          doctest::Approx(std::sqrt(3.0) * std::exp(-2 * kPi) - std::exp(-18 * kPi) / std::sqrt(3.0)).epsilon(1e-14));
    for (double y : {1e-3, 1e-2, 0.1}) CHECK(v_tilde_weight(1, y, 3, 0.5) > 0.0);
  }

  TEST_CASE("truncation certificates") {
    auto t1 = truncation_length(1, 1e3, 1e-12);
    CHECK(t1.n_max <= 10'000);
    CHECK(t1.tail_bound <= 1e-12);
    auto t2 = truncation_length(2, 1e3, 1e-12);
    CHECK(t2.n_max <= 2 * t1.n_max);
    CHECK(t1.n_max <= 2 * t2.n_max);
    CHECK(truncation_length(1, 1e3, std::numeric_limits<double>::infinity()).n_max == 1);

    // the certified bound dominates the actual tail with d_4 weights
    const double level = 50.0;
    auto t = truncation_length(1, level, 1e-6);
    const std::uint64_t M = 40 * t.n_max;
    std::vector<double> d2(M + 1, 0.0), d4(M + 1, 0.0);
    for (std::uint64_t a = 1; a <= M; ++a)
      for (std::uint64_t b = a; b <= M; b += a) d2[b] += 1;
    for (std::uint64_t a = 1; a <= M; ++a)
      for (std::uint64_t b = a, c = 1; b <= M; b += a, ++c) d4[b] += d2[a] * d2[c];
    double tail = 0.0;
    for (std::uint64_t n = t.n_max + 1; n <= M; ++n) tail += d4[n] / std::sqrt(double(n)) * v(1, n / level);
    CHECK(tail <= t.tail_bound);
    CHECK(tail > 0.0);
  }

  TEST_CASE("L(1, omega) and removed Euler factors") {
    ImagQuadField K(-7);
    const auto& w = K.omega_character();
    CHECK(L1_dirichlet(w).real() == doctest::Approx(kPi / std::sqrt(7.0)).epsilon(1e-13));
    CHECK(L1_dirichlet(w, 11).real() == doctest::Approx(kPi / std::sqrt(7.0) * 10.0 / 11.0).epsilon(1e-13));
    auto g3 = dirichlet_group(3);
    for (const auto& chi : g3) {
      if (chi.is_principal()) continue;
      cplx a = L1_dirichlet(chi), b = L1_dirichlet_smoothed(chi, 1e6);
      CHECK(std::abs(a - b) < 1e-8);
      CHECK(a.real() == doctest::Approx(kPi / (3 * std::sqrt(3.0))).epsilon(1e-13));
    }
    for (const auto& chi : dirichlet_group(25)) {
      if (chi.is_principal()) continue;
      CHECK(std::abs(L1_dirichlet(chi) - L1_dirichlet_smoothed(chi, 1e6)) < 1e-7);
    }
  }

  TEST_CASE("logarithmic derivative of L(s, omega) at 1") {
    ImagQuadField K(-7);
    auto a = Lprime_over_L_1(K, 1, 2e5);
    // high-precision value of L'/L(1, omega_{-7})
    CHECK(a.value == doctest::Approx(0.01563568999372038).epsilon(1e-8));
    auto b = Lprime_over_L_1(K, 1, 4e5);
    CHECK(std::abs(a.value - b.value) < 1e-6);
    CHECK(std::abs(a.value) < 2.0);
    auto c = Lprime_over_L_1(K, 11, 2e5);
    const double corr = std::log(11.0) / (11.0 - 1.0);
    CHECK(c.value - a.value == doctest::Approx(corr).epsilon(1e-12));
  }

  TEST_CASE("symmetric square values") {
    const auto& f = testing::table(11, 800'000);
    auto s1 = L1_sym2(f.seeds(), 1, 2.5e4);
    auto s2 = L1_sym2(f.seeds(), 1, 5e4);
    CHECK(s1.value.value > 0.0);
    CHECK(std::abs(s1.value.value - s2.value.value) < 1e-6);
    auto s3 = L1_sym2(f.seeds(), 3, 5e4);
    // removing the Euler factor at 3: (1 - alpha^2 x)(1 - x)(1 - beta^2 x), x = 1/3
    const double lam3 = f.lambda_p(3);
    const double x = 1.0 / 3.0;
    const double factor = (1.0 - (lam3 * lam3 - 1.0) * x + (lam3 * lam3 - 1.0) * x * x - x * x * x);
    CHECK(s3.value.value / s2.value.value == doctest::Approx(factor).epsilon(1e-9));
  }

  TEST_CASE("main terms") {
    const auto& f = testing::table(11, 800'000);
    ImagQuadField K(-7);
    auto in1 = main_term_inputs(f.seeds(), K, 1, 5e4);
    CHECK(in1.L1_omega == doctest::Approx(kPi / std::sqrt(7.0) * 10.0 / 11.0).epsilon(1e-12));
    CHECK(in1.zeta2 == doctest::Approx(kZeta2 * (1.0 - 1.0 / 121.0)).epsilon(1e-12));
    const double g1 = main_term_generic(in1);
    CHECK(g1 == doctest::Approx(2 * in1.L1_omega * in1.L1_sym2 / in1.zeta2).epsilon(1e-14));
    CHECK(g1 > 0.0);
    auto in3 = main_term_inputs(f.seeds(), K, 3, 5e4);
    CHECK(in3.L1_omega == in1.L1_omega);
    CHECK(in3.zeta2 == doctest::Approx(in1.zeta2 * (1.0 - 1.0 / 9.0)).epsilon(1e-13));

    auto in9 = main_term_inputs(f.seeds(), K, 9, 5e4);
    auto in27 = main_term_inputs(f.seeds(), K, 27, 5e4);
    const double e9 = main_term_exceptional(in9, 11, 7.0 * 81), e27 = main_term_exceptional(in27, 11, 7.0 * 729);
    CHECK(e27 > 0.0);
    CHECK(e27 > e9);
    CHECK(e27 - e9 == doctest::Approx(4 * (main_term_generic(in27) / 2) * std::log(3.0)).epsilon(1e-12));
  }

  TEST_CASE("cyclotomic main term") {
    ImagQuadField K(-7);
    // q = 3 by the digamma formula and by smoothed summation
    const double m3 = main_term_cyclotomic(K, 11, 3);
    double alt = 0.0;
    auto gQ = std::make_shared<const UnitGroup>(21);
    for (const auto& chi : dirichlet_group(3)) {
      std::vector<RootOfUnity> vals;
      for (i64 g : gQ->generators())
        vals.push_back(RootOfUnity(kronecker(-7, g) == 1 ? 0 : 1, 2) * chi(mod(g, 3))->pow(2));
      auto theta = DirichletCharacter::from_generator_values(gQ, vals);
      double euler = 1.0 - theta.value(11).real() / 11.0;
      alt += L1_dirichlet_smoothed(theta, 2e6).real() * euler;
    }
    CHECK(m3 == doctest::Approx(alt / 2).epsilon(1e-9));
    double prev = 1e9;
    for (int b = 1; b <= 5; ++b) {
      double dev = std::abs(main_term_cyclotomic(K, 11, ipow(3, b)) - 1.0);
      CHECK(dev < prev);
      prev = dev;
    }
  }

  TEST_CASE("degree-four kernel") {
    // y d/dy V_2 = -V_1 for the kernel Gamma(s+1)^2 (2 pi)^{-2s}
    const double y = 0.21, h = 1e-5;
    double dv = (v_degree4(2, y * (1 + h)) - v_degree4(2, y * (1 - h))) / (2 * h);
    CHECK(dv == doctest::Approx(-v_degree4(1, y)).epsilon(1e-7));
    // V_1(y) = 1 + O(y log y) as y -> 0
    CHECK(v_degree4(1, 1e-6) < 1.0);
    CHECK(v_degree4(1, 1e-6) > 1.0 - 1e-3);
  }
  TEST_CASE("degree-four closed forms against contour quadrature") {
    for (int m : {1, 2})
      for (double y : {1e-4, 1e-3, 0.01, 0.05, 0.2, 0.5, 1.0, 2.0}) {
        // the contour integrand grows like y^{-sigma} near y = 0, costing digits there
        const double q = v_degree4(m, y), c = v_degree4_closed(m, y), tol = y < 1e-3 ? 1e-9 : 1e-11;
        CHECK(std::abs(q - c) <= tol * std::max(1.0, std::abs(c)));
      }
    CHECK(v_degree4_closed(1, 1e9) == 0.0);
  }

  TEST_CASE("degree-four truncation certificates dominate the d_4 tail") {
    const double level = 50.0;
    for (int m : {1, 2}) {
      auto t = truncation_length(m, level, 1e-6, Kernel::kDegree4);
      CHECK(t.tail_bound <= 1e-6);
      const std::uint64_t M = 20 * t.n_max;
      std::vector<double> d2(M + 1, 0.0), d4(M + 1, 0.0);
      for (std::uint64_t a = 1; a <= M; ++a)
        for (std::uint64_t b = a; b <= M; b += a) d2[b] += 1;
      for (std::uint64_t a = 1; a <= M; ++a)
        for (std::uint64_t b = a, c = 1; b <= M; b += a, ++c) d4[b] += d2[a] * d2[c];
      double tail = 0.0;
      for (std::uint64_t n = t.n_max + 1; n <= M; ++n)
        tail += d4[n] / std::sqrt(double(n)) * v_degree4_closed(m, n / level);
      CHECK(tail <= t.tail_bound);
      CHECK(tail > 0.0);
    }
  }
}
