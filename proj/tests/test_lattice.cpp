#include <doctest.h>

#include <algorithm>
#include <vector>

#include "qmint/errors.hpp"
#include "qmint/lattice.hpp"
#include "test_helpers.hpp"

using namespace qmint;

namespace {

Lattice order_lattice(long n) {
    MaximalOrder order = maximal_order(AlgebraParams(n));
    return hermite_basis(order.basis);
}

// random unimodular transform applied to a basis
std::array<Quat, 4> unimodular_shuffle(const std::array<Quat, 4>& basis, Rng& rng, int steps) {
    std::array<Quat, 4> b = basis;
    for (int s = 0; s < steps; ++s) {
        int op = static_cast<int>(rng.below(3));
        int i = static_cast<int>(rng.below(4));
        int j = static_cast<int>(rng.below(4));
        if (op == 0 && i != j) {
            long m = static_cast<long>(rng.below(7)) - 3;
            b[i] = b[i] + Rat(m) * b[j];
        } else if (op == 1) {
            std::swap(b[i], b[j]);
        } else {
            b[i] = -b[i];
        }
    }
    return b;
}

} // namespace

TEST_SUITE("lattice") {

TEST_CASE("hermite basis reproduces the order lattice") {
    Lattice o11 = order_lattice(11);
    CHECK(gram_det(o11) == 121);

    MaximalOrder order = maximal_order(AlgebraParams(11));
    // redundant generators: doubled basis plus the basis itself
    std::vector<Quat> gens;
    for (const Quat& e : order.basis)
        gens.push_back(Rat(2) * e);
    for (const Quat& e : order.basis)
        gens.push_back(e);
    CHECK(hermite_basis(gens) == o11);

    // doubled basis alone: index-16 sublattice
    std::vector<Quat> doubled;
    for (const Quat& e : order.basis)
        doubled.push_back(Rat(2) * e);
    Lattice sub = hermite_basis(doubled);
    CHECK(lattice_index(sub, o11) == 16);
    CHECK(gram_det(sub) == Rat(121) * 256);
}

TEST_CASE("rank-deficient generators are rejected") {
    MaximalOrder order = maximal_order(AlgebraParams(11));
    std::vector<Quat> gens{order.basis[0], order.basis[1], order.basis[0] + order.basis[1],
                           Rat(3) * order.basis[1]};
    CHECK_THROWS_AS(hermite_basis(gens), parameter_error);
}

TEST_CASE("reduce: minimal norm profile of the order at 11") {
    Lattice o11 = order_lattice(11);
    ReducedBasis rb = reduce(o11);
    std::array<Rat, 4> norms;
    for (int k = 0; k < 4; ++k)
        norms[k] = norm(rb.basis[k]);
    CHECK(norms == std::array<Rat, 4>{1, 1, 3, 3});

    // profile is genuinely minimal: enumerate everything with norm <= 3
    auto small = testing::brute_force_up_to_norm(o11, 3);
    int count1 = 0;
    for (const Quat& v : small)
        if (norm(v) == 1)
            ++count1;
    CHECK(count1 == 2); // 1 and i up to sign
}

TEST_CASE("reduce: scaling and idempotence") {
    Lattice o11 = order_lattice(11);
    Lattice five = scale_lattice(o11, 5);
    ReducedBasis rb = reduce(five);
    std::array<Rat, 4> norms;
    for (int k = 0; k < 4; ++k)
        norms[k] = norm(rb.basis[k]);
    CHECK(norms == std::array<Rat, 4>{25, 25, 75, 75});

    ReducedBasis again = reduce(lattice_of(rb));
    CHECK(again == rb);
}

TEST_CASE("reduce preserves the Gram determinant") {
    Rng rng(11);
    Lattice o23 = order_lattice(23);
    for (int t = 0; t < 25; ++t) {
        auto gens = unimodular_shuffle(o23.basis, rng, 12);
        Lattice lat = hermite_basis(gens);
        ReducedBasis rb = reduce(lat);
        CHECK(gram_det(lattice_of(rb)) == gram_det(lat));
    }
}

TEST_CASE("shortest vectors of the order and a scaled copy") {
    Lattice o11 = order_lattice(11);
    auto sv = shortest_vectors(o11);
    REQUIRE(sv.size() == 2);
    // i sorts before 1: coordinate tuples (0,1,0,0) < (1,0,0,0)
    CHECK(sv[0] == Quat(11, 0, 1, 0, 0));
    CHECK(sv[1] == Quat(11, 1, 0, 0, 0));

    Lattice three = scale_lattice(o11, 3);
    auto sv3 = shortest_vectors(three);
    REQUIRE(sv3.size() == 2);
    CHECK(norm(sv3[0]) == 9);
}

TEST_CASE("shortest vectors are exhaustive against brute force") {
    Rng rng(5);
    Lattice o19 = order_lattice(19);
    for (int t = 0; t < 10; ++t) {
        auto gens = unimodular_shuffle(o19.basis, rng, 10);
        // sprinkle in a sublattice step
        std::vector<Quat> g2(gens.begin(), gens.end());
        g2.push_back(Rat(2) * gens[0]);
        Lattice lat = hermite_basis(g2);
        auto fast = shortest_vectors(lat);
        auto slow = testing::brute_force_up_to_norm(lat, norm(fast.front()));
        std::vector<Quat> slow_min;
        for (const Quat& v : slow)
            if (norm(v) == norm(fast.front()))
                slow_min.push_back(v);
        CHECK(fast.size() == slow_min.size());
        for (const Quat& v : fast)
            CHECK(std::find(slow_min.begin(), slow_min.end(), v) != slow_min.end());
    }
}

TEST_CASE("hermite basis is invariant under unimodular transforms") {
    Rng rng(99);
    Lattice o31 = order_lattice(31);
    for (int t = 0; t < 500; ++t) {
        auto gens = unimodular_shuffle(o31.basis, rng, 8);
        CHECK(hermite_basis(gens) == o31);
    }
}

TEST_CASE("index identities") {
    Lattice o11 = order_lattice(11);
    CHECK(lattice_index(o11, o11) == 1);
    CHECK(lattice_index(scale_lattice(o11, 2), o11) == 16);
    for (long p : {2L, 3L, 5L}) {
        Lattice scaled = scale_lattice(o11, p);
        CHECK(lattice_index(scaled, o11) == Int(p) * p * p * p);
    }
    CHECK_THROWS_AS(lattice_index(o11, scale_lattice(o11, 2)), parameter_error);
}

TEST_CASE("canonicalize_tiebreak") {
    Lattice o11 = order_lattice(11);
    ReducedBasis rb = reduce(o11);

    CHECK(canonicalize_tiebreak({rb}) == rb);

    // first coordinate 0 beats 1/2
    ReducedBasis other = rb;
    REQUIRE(other.basis[0].a == 0);
    other.basis[0].a = Rat(1, 2);
    CHECK(canonicalize_tiebreak({other, rb}) == rb);

    // permutation stability: winner independent of candidate order
    Rng rng(17);
    std::vector<ReducedBasis> cands;
    for (int k = 0; k < 6; ++k) {
        ReducedBasis c = rb;
        std::rotate(c.basis.begin(), c.basis.begin() + (k % 4), c.basis.end());
        cands.push_back(c);
    }
    ReducedBasis winner = canonicalize_tiebreak(cands);
    for (int t = 0; t < 20; ++t) {
        for (std::size_t a = cands.size(); a > 1; --a)
            std::swap(cands[a - 1], cands[rng.below(a)]);
        CHECK(canonicalize_tiebreak(cands) == winner);
    }
}

TEST_CASE("lattice membership") {
    Lattice o11 = order_lattice(11);
    CHECK(lattice_contains(o11, Quat::one(11)));
    CHECK(lattice_contains(o11, Quat(11, Rat(1, 2), 0, Rat(1, 2), 0)));
    CHECK(!lattice_contains(o11, Quat(11, Rat(1, 2), 0, 0, 0)));
}

} // TEST_SUITE
