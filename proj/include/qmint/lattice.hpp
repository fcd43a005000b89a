#ifndef QMINT_LATTICE_HPP
#define QMINT_LATTICE_HPP

#include <span>
#include <vector>

#include "qmint/exact_linalg.hpp"
#include "qmint/quaternion.hpp"

namespace qmint {

// Full-rank rank-4 lattice in the quaternion algebra. The stored basis is
// always the canonical Hermite form of the row lattice (after clearing
// denominators), so two Lattice values are equal iff they are the same
// lattice. `gram` is the trace-pairing Gram matrix of the basis.
struct Lattice {
    long level = 0;
    std::array<Quat, 4> basis;
    Mat4q gram;

    bool operator==(const Lattice&) const = default;
};

// Canonical lattice from a generating set (>= 4 generators spanning rank 4).
// Throws parameter_error on a rank-deficient set.
Lattice hermite_basis(std::span<const Quat> generators);

Lattice lattice_from_rows(long level, const Mat4q& rows);

// Basis in greedy-reduced, norm-sorted, sign- and order-normalized form.
// Equal lattices always produce the identical ReducedBasis.
struct ReducedBasis {
    long level = 0;
    std::array<Quat, 4> basis;

    // Concatenated 16-tuple of coordinates, for lexicographic comparison.
    std::array<Rat, 16> key() const;

    bool operator==(const ReducedBasis&) const = default;
};

bool lex_less(const ReducedBasis& x, const ReducedBasis& y);

ReducedBasis reduce(const Lattice& lat);

Lattice lattice_of(const ReducedBasis& rb);

// All nonzero vectors of minimal norm, one per sign pair, sign-normalized so
// the first nonzero coordinate is positive; sorted lexicographically.
std::vector<Quat> shortest_vectors(const Lattice& lat);

// All vectors with norm <= radius up to sign (excluding zero), via exact
// Fincke-Pohst enumeration on the reduced basis.
std::vector<Quat> vectors_up_to_norm(const Lattice& lat, const Rat& radius);

// Group index [sup : sub]; throws parameter_error unless sub is contained
// in sup.
Int lattice_index(const Lattice& sub, const Lattice& sup);

bool lattice_contains(const Lattice& lat, const Quat& x);

// Lexicographically least candidate under the coordinate 16-tuple order.
const ReducedBasis& canonicalize_tiebreak(const std::vector<ReducedBasis>& candidates);

Lattice scale_lattice(const Lattice& lat, const Rat& s);
Lattice mul_lattice_quat(const Lattice& lat, const Quat& z);

// Lattice generated by all pairwise products x*y, x from lhs, y from rhs.
Lattice mul_lattices(const Lattice& lhs, const Lattice& rhs);

Lattice conj_lattice(const Lattice& lat);

// Lattice generated by the union of two lattices.
Lattice add_lattices(const Lattice& lhs, const Lattice& rhs);

Rat gram_det(const Lattice& lat);

} // namespace qmint

#endif
