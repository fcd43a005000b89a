#include <doctest.h>

#include "qmint/errors.hpp"
#include "qmint/exact_linalg.hpp"
#include "qmint/quaternion.hpp"
#include "qmint/rng.hpp"
#include "test_helpers.hpp"

using namespace qmint;

namespace {

Quat qi(long n) { return Quat(n, 0, 1, 0, 0); }
Quat qj(long n) { return Quat(n, 0, 0, 1, 0); }

} // namespace

TEST_SUITE("quaternion") {

TEST_CASE("defining relations") {
    const long n = 11;
    CHECK(qi(n) * qi(n) == Quat(n, -1, 0, 0, 0));
    CHECK(qj(n) * qj(n) == Quat(n, -n, 0, 0, 0));
    CHECK(qi(n) * qj(n) == Quat(n, 0, 0, 0, 1));
}

TEST_CASE("half element squares per the order presentation") {
    const long n = 11;
    Quat u(n, Rat(1, 2), 0, Rat(1, 2), 0); // (1 + sqrt(N) j)/2
    Quat expect(n, make_rat(1 - n, 4), 0, Rat(1, 2), 0);
    CHECK(u * u == expect);
    CHECK(testing::table_multiply(u, u) == expect);
}

TEST_CASE("product agrees with the structure-constant table") {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        Quat x = testing::random_small_quat(19, rng);
        Quat y = testing::random_small_quat(19, rng);
        CHECK(x * y == testing::table_multiply(x, y));
    }
}

TEST_CASE("conj, trace, norm on fixed elements") {
    const long n = 11;
    Quat x = Quat::one(n) + qi(n);
    CHECK(norm(x) == 2);
    CHECK(trace(x) == 1);

    Quat y = Quat::one(n) + qi(n) + qj(n);
    CHECK(norm(y) == 13);

    Quat u(n, Rat(1, 2), 0, Rat(1, 2), 0);
    CHECK(norm(u) == 3);
    CHECK(trace(u) == Rat(1, 2));
    // norm through the product definition z * conj(z)
    Quat zz = u * conj(u);
    CHECK(zz == Quat(n, norm(u), 0, 0, 0));
}

TEST_CASE("norm multiplicativity and conjugation anti-automorphism") {
    Rng rng(7);
    for (int t = 0; t < 1000; ++t) {
        Quat x = testing::random_small_quat(23, rng);
        Quat y = testing::random_small_quat(23, rng);
        CHECK(norm(x * y) == norm(x) * norm(y));
        CHECK(conj(x * y) == conj(y) * conj(x));
    }
}

TEST_CASE("maximal order at 11: closure, Gram determinant, basis integrality") {
    MaximalOrder order = maximal_order(AlgebraParams(11));
    for (const Quat& e : order.basis) {
        CHECK(is_integer(2 * trace(e))); // integral reduced trace
        CHECK(is_integer(norm(e)));
    }
    // closure spot check from the half-integer generator times i
    Quat u = order.basis[2];
    CHECK(order.contains(u * qi(11)));
    // Gram determinant is validated inside maximal_order; recheck here
    Rat det = 1;
    Mat4q g;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            g[r][c] = pair_trace(order.basis[r], order.basis[c]);
    det = det4(g);
    CHECK(det == 121);
}

TEST_CASE("level validation") {
    CHECK_THROWS_AS(AlgebraParams(13), parameter_error); // 1 mod 4
    CHECK_THROWS_AS(AlgebraParams(15), parameter_error); // not prime
    CHECK_THROWS_AS(AlgebraParams(7), parameter_error);  // below 11
    CHECK_NOTHROW(AlgebraParams(11));
    CHECK_NOTHROW(AlgebraParams(599));
}

TEST_CASE("inverse") {
    const long n = 19;
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        Quat x = testing::random_small_quat(n, rng);
        if (x.is_zero())
            continue;
        CHECK(x * inverse(x) == Quat::one(n));
    }
    CHECK_THROWS_AS(inverse(Quat::zero(n)), parameter_error);
}

} // TEST_SUITE
