#ifndef QMINT_IDEALS_HPP
#define QMINT_IDEALS_HPP

#include <cstddef>
#include <vector>

#include "qmint/lattice.hpp"
#include "qmint/quaternion.hpp"

namespace qmint {

// Box constant for the admissible triple region d*a, d*b <= C*sqrt(level).
// Every canonical m observed during enumeration is asserted to fit.
inline constexpr long bell_box_constant = 4;

// floor(bell_box_constant * sqrt(level))
long box_limit(long level);

// Left fractional ideal: full-rank lattice closed under left multiplication
// by the order.
struct LeftIdeal {
    Lattice lattice;
    MaximalOrder order;
};

// Validated construction; throws invariant_error when the lattice is not
// closed under left multiplication by the order basis.
LeftIdeal make_left_ideal(Lattice lattice, const MaximalOrder& order);

// Canonical representative of an ideal class: the lexicographically first
// reduced basis of I z^{-1} over all minimal-norm z, together with the
// integral form m * I z^{-1} inside the order.
struct IdealClassRep {
    ReducedBasis canonical_lattice;
    LeftIdeal integral_form;
    long m = 1;
};

// (d, a, b) with gcd(a, d) = 1 and a <= b; encodes the projective point
// [d : a] modulo m = d * b.
struct TripleCode {
    long d = 1;
    long a = 1;
    long b = 1;

    long modulus() const { return d * b; }

    bool operator==(const TripleCode&) const = default;
};

struct ClassGroupTable {
    AlgebraParams params;
    std::vector<IdealClassRep> reps;
    std::vector<long> weights; // unit-group orders of the right orders
    std::vector<TripleCode> triples;

    std::size_t class_number() const { return reps.size(); }
    // Position of a canonical lattice in the table; throws invariant_error
    // when absent.
    std::size_t index_of(const ReducedBasis& key) const;
};

IdealClassRep canonical_rep(const LeftIdeal& ideal);

// Right order {x : I x is contained in I}, computed as conj(I) * I / nrd(I).
Lattice right_order_lattice(const Lattice& ideal_lattice, const MaximalOrder& order);

// Number of norm-1 units of the representative's right order; always even.
long unit_group_order(const IdealClassRep& rep);

// Breadth-first closure over 2-neighbors starting from the order, certified
// by the mass identity sum 1/w_i = (level - 1)/24; extends with 3-neighbors
// when the certificate fails. Table rows are sorted lexicographically by
// canonical lattice.
ClassGroupTable enumerate_classes(const AlgebraParams& params);

TripleCode triple_encode(const IdealClassRep& rep);

LeftIdeal triple_decode(const TripleCode& code, const MaximalOrder& order);

// True when the triple decodes to the integral form of its own canonical
// representative, i.e. the triple is the distinguished encoding of its class.
bool is_canonical_triple(const TripleCode& code, const MaximalOrder& order);

} // namespace qmint

#endif
