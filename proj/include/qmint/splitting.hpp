#ifndef QMINT_SPLITTING_HPP
#define QMINT_SPLITTING_HPP

#include <array>

#include "qmint/quaternion.hpp"

namespace qmint {

// 2x2 matrix with entries reduced mod some modulus (carried externally).
struct Mat2 {
    std::array<std::array<long, 2>, 2> a{};

    bool operator==(const Mat2&) const = default;
};

Mat2 mat2_identity();
Mat2 mat2_mul(const Mat2& x, const Mat2& y, long mod);
Mat2 mat2_add(const Mat2& x, const Mat2& y, long mod);
Mat2 mat2_scale(long s, const Mat2& x, long mod);

// x^{-1} mod m; throws invariant_error when x and m are not coprime.
long inv_mod(long x, long m);

// Ring isomorphism from the order mod `modulus` onto 2x2 matrices over
// Z/modulus, stored as the images of the four order basis elements.
struct SplittingData {
    long level = 0;
    long modulus = 0;
    std::array<Mat2, 4> images;

    // Image of the element with the given order coordinates (mod modulus).
    Mat2 image_of(const std::array<long, 4>& order_coords) const;
};

// Order coordinates of x reduced mod m; throws invariant_error when x is not
// in the order.
std::array<long, 4> order_coords_mod(const MaximalOrder& order, const Quat& x, long m);

// Constructs the splitting for gcd(m, level) = 1, m > 1: rank-1 idempotent
// mod each prime divisor, idempotent-refinement lift to the prime power,
// matrix-unit frame, CRT across prime powers. The result is verified against
// the order's multiplication table before being returned.
SplittingData split_order(const MaximalOrder& order, long m);

// Solves image_of(c) = target for the order coordinates c mod the modulus.
std::array<long, 4> splitting_preimage(const SplittingData& split, const Mat2& target);

} // namespace qmint

#endif
