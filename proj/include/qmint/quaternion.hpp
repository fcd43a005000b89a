#ifndef QMINT_QUATERNION_HPP
#define QMINT_QUATERNION_HPP

#include <array>
#include <iosfwd>

#include "qmint/numeric.hpp"

namespace qmint {

// Level of the rational quaternion algebra ramified exactly at the level and
// at infinity. Constructor validates: prime, congruent to 3 mod 4, >= 11.
struct AlgebraParams {
    long level;

    explicit AlgebraParams(long n);

    bool operator==(const AlgebraParams&) const = default;
};

// Element with exact rational coordinates (a, b, c, d) against the fixed
// basis {1, i, sqrt(N) j, sqrt(N) k}. Reduced norm is a^2 + b^2 + N(c^2 + d^2).
struct Quat {
    long level = 0;
    Rat a, b, c, d;

    Quat() = default;
    Quat(long level_, Rat a_, Rat b_, Rat c_, Rat d_)
        : level(level_), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

    static Quat zero(long level) { return Quat(level, 0, 0, 0, 0); }
    static Quat one(long level) { return Quat(level, 1, 0, 0, 0); }

    bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }

    const Rat& coord(int idx) const;

    bool operator==(const Quat&) const = default;
};

Quat operator+(const Quat& x, const Quat& y);
Quat operator-(const Quat& x, const Quat& y);
Quat operator-(const Quat& x);
Quat operator*(const Quat& x, const Quat& y);
Quat operator*(const Rat& s, const Quat& x);

Quat conj(const Quat& x);

// Scalar part; equals half the reduced trace (z + zbar)/2.
Rat trace(const Quat& x);

Rat norm(const Quat& x);

// Trace-form pairing 2 * scalar(x * conj(y)). Diagonal entries are 2*norm;
// the maximal order's Gram determinant under this pairing is level^2.
Rat pair_trace(const Quat& x, const Quat& y);

// x^{-1} = conj(x) / norm(x); throws on zero.
Quat inverse(const Quat& x);

std::ostream& operator<<(std::ostream& os, const Quat& x);

// The maximal order Z[i, (1 + sqrt(N) j)/2, (i + sqrt(N) k)/2], stored as
// basis {1, i, (1 + sqrt(N) j)/2, (i + sqrt(N) k)/2}.
struct MaximalOrder {
    AlgebraParams params;
    std::array<Quat, 4> basis;

    long level() const { return params.level; }

    // Exact coordinates of x in the order basis.
    std::array<Rat, 4> order_coords(const Quat& x) const;
    Quat from_order_coords(const std::array<Rat, 4>& c) const;
    bool contains(const Quat& x) const;
};

// Builds the order and checks its invariants (multiplicative closure of the
// basis, Gram determinant = level^2).
MaximalOrder maximal_order(const AlgebraParams& params);

} // namespace qmint

#endif
