#include "doctest.h"
#include "rsavg/checks.hpp"

using namespace rsavg;

TEST_SUITE("checks") {
  TEST_CASE("row checks fail on doctored rows") {
    GridRow ok;
    ok.a = 1;
    ok.b = 1;
    ok.residual = 1e-15;
    ok.certificate = 1e-10;
    ok.relations = {1e-12, 1e-12, 1e-12, 1e-10};
    CHECK(check_haf({ok}, 1e-6).pass);
    CHECK(check_mobius({ok}).pass);

    GridRow bad = ok;
    bad.residual = 2e-10;
    CHECK_FALSE(check_haf({ok, bad}, 1e-6).pass);
    bad = ok;
    bad.residual = 1e-5;
    bad.certificate = 1e-4;
    CHECK_FALSE(check_haf({bad}, 1e-6).pass);
    bad = ok;
    bad.relations.R2 = 3e-10;
    CHECK_FALSE(check_mobius({bad}).pass);

    GridRow d = ok;
    d.has_difference = true;
    d.difference.factorization_exact = true;
    d.difference.direct = 2.0;
    d.difference.factored = 2.0 * (1 + 1e-12);
    d.difference.J0 = 4.0 / 3.0;
    CHECK(check_difference({d}, 1e-10).pass);
    d.difference.factored = 2.1;
    CHECK_FALSE(check_difference({d}, 1e-10).pass);
    d.difference.factorization_exact = false;
    CHECK(check_difference({d}, 1e-10).pass);
  }

  TEST_CASE("arithmetic and kernel checks pass at small sizes") {
    CHECK(check_counting({-7, -23}, 2000).pass);
    CHECK(check_ring_counts({-7}, {3, 5}, 2000).pass);
    CHECK(check_class_numbers({-7, -11}, {1, 3, 9}).pass);
    CHECK(check_cutoff(10, 10, 7).pass);
  }
}
