#include <doctest.h>

#include "qmint/errors.hpp"
#include "qmint/ideals.hpp"
#include "qmint/oracles.hpp"

using namespace qmint;

TEST_SUITE("oracles") {

TEST_CASE("eta product expansion at level 11") {
    CHECK(eta_product_ap(1, 40) == 1); // normalization
    CHECK(eta_product_ap(2, 40) == -2);
    CHECK(eta_product_ap(3, 40) == -1);
    CHECK(eta_product_ap(5, 40) == 1);
    CHECK(eta_product_ap(7, 40) == -2);
    CHECK(eta_product_ap(13, 40) == 4);
    CHECK_THROWS_AS(eta_product_ap(50, 40), parameter_error);
}

TEST_CASE("point counts on the level-11 curve") {
    CHECK(ec_point_count_ap(2) == -2);
    CHECK(ec_point_count_ap(3) == -1);
    CHECK_THROWS_AS(ec_point_count_ap(11), parameter_error);
}

TEST_CASE("dual-oracle agreement") {
    for (long p : {2L, 3L, 5L, 7L, 13L, 17L, 19L})
        CHECK(eta_product_ap(p, 64) == ec_point_count_ap(p));
}

TEST_CASE("mass identity at several levels") {
    for (long n : {11L, 23L, 47L}) {
        ClassGroupTable table = enumerate_classes(AlgebraParams(n));
        auto [mass, target] = mass_identity(table);
        CHECK(mass == target);
    }
}

} // TEST_SUITE
