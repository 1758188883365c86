#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "rsavg/heckechar.hpp"
#include "support.hpp"

using namespace rsavg;

namespace {

// a_n by summing rho over the ideals of each norm directly (no convolution of
// multiplicative pieces): sum over m^2 d = n of omega chi^2(m) chi(d) lambda(d)
// sum_{N a = d} rho(a); norms prime to p, m restricted only through chi.
std::vector<cplx> coefficients_by_ideals(const CharacterFamily& F, const HeckeCharacterW& W, const NewformTable& f,
                                         std::uint64_t n_max) {
  const auto& G = *F.group();
  const i64 p = F.p(), N = F.level_N(), D = F.field().disc();
  std::vector<cplx> a(n_max + 1, 0.0);
  for (std::uint64_t d = 1; d <= n_max; ++d) {
    if (static_cast<i64>(d) % p == 0) continue;
    cplx rho_sum = 0.0;
    for (auto c : ideals_of_norm(G, static_cast<i64>(d))) rho_sum += static_cast<double>(c.mult) * W.rho(c.cls).value();
    if (rho_sum == cplx(0.0)) continue;
    for (std::uint64_t m = 1; m * m * d <= n_max; ++m) {
      const i64 mm = static_cast<i64>(m);
      if (std::gcd(mm, N) != 1) continue;
      cplx chi_m = W.chi.value(mm);
      a[m * m * d] += static_cast<double>(kronecker(D, mm)) * chi_m * chi_m * W.chi.value(static_cast<i64>(d)) *
                      f[d] * rho_sum;
    }
  }
  return a;
}

}  // namespace

TEST_SUITE("heckechar") {
  TEST_CASE("family sizes") {
    ImagQuadField K(-7);
    CHECK(enumerate_family(K, 11, 3, 0, 0).size() == 1);
    CHECK(enumerate_family(K, 11, 3, 1, 0).size() == 4);
    CHECK(enumerate_family(K, 11, 3, 1, 1).size() == 8);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 2; ++b) {
        auto F = enumerate_family(K, 11, 3, a, b);
        CHECK(static_cast<i64>(F.size()) == F.subfamily_size(a, b));
        for (int x = 0; x <= a; ++x)
          for (int y = 0; y <= b; ++y) CHECK(static_cast<i64>(F.subfamily(x, y).size()) == F.subfamily_size(x, y));
      }
  }

  TEST_CASE("hypothesis guards") {
    ImagQuadField K(-7);
    CHECK_THROWS_AS(check_hypotheses(K, 14, 3), InputError);
    CHECK_THROWS_AS(check_hypotheses(K, 11, 7), InputError);
    CHECK_THROWS_AS(check_hypotheses(K, 11, 2), InputError);
    CHECK_THROWS_AS(check_hypotheses(K, 18, 5), InputError);
    CHECK_NOTHROW(check_hypotheses(K, 11, 3));
  }

  TEST_CASE("conductors are minimal") {
    ImagQuadField K(-7);
    auto F = enumerate_family(K, 11, 3, 2, 2);
    auto G1 = std::make_shared<const OrderClassGroup>(K, 3);
    auto pm = projection_map(*F.group(), *G1);
    for (const auto& W : F.members()) {
      // rho factors through Pic(O_3) iff it is trivial on the kernel of the projection
      bool through3 = true;
      for (int c = 0; c < F.group()->size(); ++c)
        if (pm[c] == G1->identity() && !W.rho(c).is_one()) through3 = false;
      CHECK((W.x <= 1) == through3);
      CHECK(ipow(3, W.y) == W.chi.conductor());
    }
  }

  TEST_CASE("classification and root numbers") {
    ImagQuadField K(-7);
    for (i64 N : {11L, 17L}) {
      const int wN = K.omega(N);
      auto F = enumerate_family(K, N, 3, 1, 2);
      for (const auto& W : F.members()) {
        CHECK(W.exceptional == (W.chi.is_principal() && wN == 1));
        CHECK(W.generic() == !W.exceptional);
        CHECK(W.self_dual == W.chi.pow(2).is_principal());
        cplx eps = -static_cast<double>(wN) * W.chi.value(N) * W.chi.value(N);
        CHECK(std::abs(W.root_number.value() - eps) < 1e-14);
      }
    }
  }

  TEST_CASE("tame parts and primitive sets") {
    ImagQuadField K(-7);
    auto F0 = enumerate_family(K, 11, 3, 0, 0);
    for (const auto& t : tame_part(F0, F0.members()[0])) CHECK(t.is_one());

    auto F = enumerate_family(K, 11, 3, 0, 1);
    REQUIRE(F.size() == 2);
    CHECK(tame_part(F, F.members()[0]) != tame_part(F, F.members()[1]));

    auto G = enumerate_family(K, 11, 3, 2, 2);
    std::set<int> seen;
    std::size_t total = 0;
    for (const auto& S : G.primitive_sets()) {
      CHECK(!S.members.empty());
      for (int i : S.members) {
        CHECK(seen.insert(i).second);
        const auto& W = G.members()[i];
        CHECK(W.x == S.x);
        CHECK(W.y == S.y);
        CHECK(W.tame == S.tame);
      }
      total += S.members.size();
    }
    CHECK(total == G.size());

    ImagQuadField K23(-23);
    auto H = enumerate_family(K23, 11, 3, 1, 0);
    CHECK(!H.has_tame_parts());
    CHECK_THROWS_AS(tame_part(H, H.members()[0]), InputError);
    CHECK_THROWS_AS(H.primitive_sets(), InputError);
  }

  TEST_CASE("prime ideal classes reproduce ideals_of_norm") {
    for (i64 D : {-7L, -23L}) {
      ImagQuadField K(D);
      for (i64 c : {1L, 9L, 25L}) {
        auto G = std::make_shared<const OrderClassGroup>(K, c);
        const std::uint64_t B = 20000;
        PrimeIdealClasses P(G, B, primes_upto(B));
        std::vector<IdealClassCount> got;
        for (i64 n = 1; n <= static_cast<i64>(B); ++n) {
          if (std::gcd(n, c) != 1) continue;
          std::vector<std::pair<std::uint64_t, int>> fac;
          for (auto [l, e] : factorize(n)) fac.emplace_back(l, e);
          ideal_classes_of(P, fac, got);
          auto want = ideals_of_norm(*G, n);
          std::vector<int> gh(G->size(), 0), wh(G->size(), 0);
          for (auto x : got) gh[x.cls] += x.mult;
          for (auto x : want) wh[x.cls] += x.mult;
          CHECK(gh == wh);
        }
      }
    }
  }

  TEST_CASE("Dirichlet coefficients") {
    ImagQuadField K(-7);
    const auto& f = testing::table(11, 5000);
    auto F0 = enumerate_family(K, 11, 3, 0, 0);
    auto a = dirichlet_coefficients(F0, F0.members()[0], f, 100, 0);
    CHECK(a[1] == cplx(1.0, 0.0));
    CHECK(a[2].real() == doctest::Approx(2 * f[2]).epsilon(1e-14));
    auto b = dirichlet_coefficients(F0, F0.members()[0], f, 100, 3);
    CHECK(b[3] == cplx(0.0, 0.0));
    CHECK(b[1] == cplx(1.0, 0.0));

    for (auto [al, be] : {std::pair{1, 0}, {2, 0}, {1, 1}, {2, 2}, {0, 2}}) {
      auto F = enumerate_family(K, 11, 3, al, be);
      for (const auto& W : F.members()) {
        auto got = dirichlet_coefficients(F, W, f, 3000, 3);
        auto want = coefficients_by_ideals(F, W, f, 3000);
        CHECK(got[1] == cplx(1.0, 0.0));
        double err = 0.0;
        for (std::size_t n = 1; n < got.size(); ++n) err = std::max(err, std::abs(got[n] - want[n]));
        CHECK(err < 1e-12);
      }
    }
  }

  TEST_CASE("Dirichlet coefficients when h(O_K) > 1") {
    ImagQuadField K(-23);
    const auto& f = testing::table(11, 5000);
    auto F = enumerate_family(K, 11, 5, 1, 1);
    for (const auto& W : F.members()) {
      auto got = dirichlet_coefficients(F, W, f, 3000, 5);
      auto want = coefficients_by_ideals(F, W, f, 3000);
      double err = 0.0;
      for (std::size_t n = 1; n < got.size(); ++n) err = std::max(err, std::abs(got[n] - want[n]));
      CHECK(err < 1e-12);
    }
  }
}
