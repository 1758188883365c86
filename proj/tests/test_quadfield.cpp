#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "rsavg/quadfield.hpp"

using namespace rsavg;

namespace {

// reduced forms of discriminant d by bounded enumeration
std::vector<QuadForm> brute_reduced(i64 d) {
  std::vector<QuadForm> out;
  for (i64 a = 1; 3 * a * a <= -d; ++a)
    for (i64 b = -a; b <= a; ++b) {
      if ((b * b - d) % (4 * a) != 0) continue;
      i64 c = (b * b - d) / (4 * a);
      if (c < a) continue;
      if ((b < 0) && (-b == a || a == c)) continue;
      if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
      out.push_back({a, b, c});
    }
  std::sort(out.begin(), out.end());
  return out;
}

i64 classical_formula(i64 D, i64 f) {
  // h(O_f) = h(O_K) f prod_{l | f} (1 - omega(l)/l), unit index 1 for |D| > 4
  i64 h = static_cast<i64>(brute_reduced(D).size()) * f;
  for (auto [l, e] : factorize(f)) h = h / l * (l - kronecker(D, l));
  return h;
}

}  // namespace

TEST_SUITE("quadfield") {
  TEST_CASE("reduced forms") {
    auto f7 = reduced_forms(-7);
    REQUIRE(f7.size() == 1);
    CHECK(f7[0] == QuadForm{1, 1, 2});
    auto f23 = reduced_forms(-23);
    CHECK(f23.size() == 3);
    auto sorted = f23;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == brute_reduced(-23));
    CHECK(reduced_forms(-63).size() == 4);
    for (i64 d : {-7, -11, -23, -63, -99, -175, -567}) {
      auto a = reduced_forms(d);
      std::sort(a.begin(), a.end());
      CHECK(a == brute_reduced(d));
    }
  }

  TEST_CASE("class numbers") {
    CHECK(class_number(-7, 1) == 1);
    CHECK(class_number(-7, 3) == 4);
    CHECK(class_number(-7, 9) == 12);
    for (i64 D : {-7, -11, -19, -23, -43})
      for (i64 f : {1, 3, 9, 27, 5, 25}) {
        CHECK(class_number(D, f) == classical_formula(D, f));
        CHECK(class_number(D, f) == static_cast<i64>(brute_reduced(f * f * D).size()));
      }
    for (i64 x = 1; x <= 4; ++x) CHECK(class_number(-7, ipow(3, x + 1)) == 3 * class_number(-7, ipow(3, x)));
  }

  TEST_CASE("composition is an abelian group law") {
    for (i64 f : {1, 3, 5, 9}) {
      OrderClassGroup G(ImagQuadField(-23), f);
      const int h = G.size();
      for (int x = 0; x < h; ++x) {
        CHECK(G.mul(x, G.identity()) == x);
        CHECK(G.mul(x, G.inv(x)) == G.identity());
        for (int y = 0; y < h; ++y) {
          CHECK(G.mul(x, y) == G.mul(y, x));
          for (int z = 0; z < h; ++z) CHECK(G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z)));
        }
      }
      i64 prod = 1;
      for (i64 n : G.invariants()) prod *= n;
      CHECK(prod == h);
    }
  }

  TEST_CASE("ideal counts") {
    OrderClassGroup G1(ImagQuadField(-7), 1);
    auto i2 = ideals_of_norm(G1, 2);
    i64 total = 0;
    for (auto c : i2) {
      CHECK(c.cls == G1.identity());
      total += c.mult;
    }
    CHECK(total == 2);
    CHECK(ideals_of_norm(G1, 3).empty());
    auto i1 = ideals_of_norm(G1, 1);
    REQUIRE(i1.size() == 1);
    CHECK(i1[0] == IdealClassCount{0, 1});

    CHECK(r1_dagger(-7, 1) == 0);
    CHECK(r1_dagger(-7, 2) == 2);
    CHECK(r1_dagger(-7, 4) == 2);
  }

  TEST_CASE("divisor-sum oracle for r1") {
    for (i64 D : {-7, -11, -23}) {
      OrderClassGroup G(ImagQuadField(D), 1);
      for (i64 n = 1; n <= 3000; ++n) {
        i64 brute = 0;
        for (i64 d = 1; d <= n; ++d)
          if (n % d == 0) brute += kronecker(D, d);
        CHECK(r1_divisor_sum(D, n) == brute);
        CHECK(ideal_count(G, n) == brute);
      }
    }
  }

  TEST_CASE("ring class counts agree with the field away from the conductor") {
    for (i64 f : {3, 9, 5}) {
      OrderClassGroup G(ImagQuadField(-7), f);
      for (i64 n = 1; n <= 2000; ++n)
        if (std::gcd(n, f) == 1) CHECK(ideal_count(G, n) == r1_divisor_sum(-7, n));
    }
  }

  TEST_CASE("principal class counts match class-resolved ideal counts") {
    for (i64 c : {3, 9, 5}) {
      OrderClassGroup G(ImagQuadField(-7), c);
      for (i64 n = 1; n <= 1500; ++n) {
        if (std::gcd(n, c) != 1) continue;
        i64 principal = 0;
        for (auto x : ideals_of_norm(G, n))
          if (x.cls == G.identity()) principal += x.mult;
        CHECK(principal_class_count(-7, c, n) == principal);
      }
    }
  }

  TEST_CASE("projections between ring class groups") {
    ImagQuadField K(-7);
    OrderClassGroup G9(K, 9), G3(K, 3), G1(K, 1);
    CHECK(project_class(G9, G9.identity(), G3) == G3.identity());
    auto pm = projection_map(G9, G3);
    std::set<int> image(pm.begin(), pm.end());
    CHECK(static_cast<int>(image.size()) == G3.size());
    CHECK(std::count(pm.begin(), pm.end(), G3.identity()) == 3);
    for (int x = 0; x < G9.size(); ++x)
      for (int y = 0; y < G9.size(); ++y) CHECK(pm[G9.mul(x, y)] == G3.mul(pm[x], pm[y]));
    auto id = projection_map(G9, G9);
    for (int x = 0; x < G9.size(); ++x) CHECK(id[x] == x);
  }
}
