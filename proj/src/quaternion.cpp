#include "qmint/quaternion.hpp"

#include <ostream>

#include "qmint/errors.hpp"
#include "qmint/exact_linalg.hpp"

namespace qmint {

namespace {

void check_same_level(const Quat& x, const Quat& y) {
    if (x.level != y.level)
        throw invariant_error("mixed algebra levels in quaternion arithmetic");
}

} // namespace

AlgebraParams::AlgebraParams(long n) : level(n) {
    if (!is_prime(n))
        throw parameter_error("level must be prime, got " + std::to_string(n));
    if (n % 4 != 3)
        throw parameter_error("level must be congruent to 3 mod 4, got " + std::to_string(n));
    if (n < 11)
        throw parameter_error("level must be at least 11, got " + std::to_string(n));
}

const Rat& Quat::coord(int idx) const {
    switch (idx) {
    case 0: return a;
    case 1: return b;
    case 2: return c;
    default: return d;
    }
}

Quat operator+(const Quat& x, const Quat& y) {
    check_same_level(x, y);
    return Quat(x.level, x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d);
}

Quat operator-(const Quat& x, const Quat& y) {
    check_same_level(x, y);
    return Quat(x.level, x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d);
}

Quat operator-(const Quat& x) { return Quat(x.level, -x.a, -x.b, -x.c, -x.d); }

Quat operator*(const Quat& x, const Quat& y) {
    check_same_level(x, y);
    // i^2 = -1, (sqrt(N) j)^2 = (sqrt(N) k)^2 = -N, i (sqrt(N) j) = sqrt(N) k
    Rat n(x.level);
    return Quat(x.level,
                x.a * y.a - x.b * y.b - n * (x.c * y.c + x.d * y.d),
                x.a * y.b + x.b * y.a + n * (x.c * y.d - x.d * y.c),
                x.a * y.c + x.c * y.a + x.d * y.b - x.b * y.d,
                x.a * y.d + x.d * y.a + x.b * y.c - x.c * y.b);
}

Quat operator*(const Rat& s, const Quat& x) {
    return Quat(x.level, s * x.a, s * x.b, s * x.c, s * x.d);
}

Quat conj(const Quat& x) { return Quat(x.level, x.a, -x.b, -x.c, -x.d); }

Rat trace(const Quat& x) { return x.a; }

Rat norm(const Quat& x) {
    Rat n(x.level);
    return x.a * x.a + x.b * x.b + n * (x.c * x.c + x.d * x.d);
}

Rat pair_trace(const Quat& x, const Quat& y) {
    check_same_level(x, y);
    Rat n(x.level);
    return 2 * (x.a * y.a + x.b * y.b + n * (x.c * y.c + x.d * y.d));
}

Quat inverse(const Quat& x) {
    if (x.is_zero())
        throw parameter_error("inverse of zero quaternion");
    Rat nm = norm(x);
    return Rat(1) / nm * conj(x);
}

std::ostream& operator<<(std::ostream& os, const Quat& x) {
    os << "(" << rat_str(x.a) << ", " << rat_str(x.b) << ", " << rat_str(x.c) << ", "
       << rat_str(x.d) << ")";
    return os;
}

std::array<Rat, 4> MaximalOrder::order_coords(const Quat& x) const {
    // basis {1, i, u, v} with u = (1 + sqrt(N) j)/2, v = (i + sqrt(N) k)/2:
    // x = alpha + beta i + gamma u + delta v  =>
    // gamma = 2c, delta = 2d, alpha = a - c, beta = b - d
    return {x.a - x.c, x.b - x.d, 2 * x.c, 2 * x.d};
}

Quat MaximalOrder::from_order_coords(const std::array<Rat, 4>& c) const {
    Quat r = Quat::zero(params.level);
    for (int k = 0; k < 4; ++k)
        r = r + c[k] * basis[k];
    return r;
}

bool MaximalOrder::contains(const Quat& x) const {
    if (x.level != params.level)
        return false;
    for (const Rat& c : order_coords(x))
        if (!is_integer(c))
            return false;
    return true;
}

MaximalOrder maximal_order(const AlgebraParams& params) {
    long n = params.level;
    Rat half(1, 2);
    MaximalOrder order{params,
                       {Quat::one(n), Quat(n, 0, 1, 0, 0), Quat(n, half, 0, half, 0),
                        Quat(n, 0, half, 0, half)}};

    // closure: every product of basis elements has integral order coordinates
    for (const Quat& x : order.basis)
        for (const Quat& y : order.basis)
            if (!order.contains(x * y))
                throw invariant_error("maximal order basis is not multiplicatively closed");

    // Gram determinant of the trace pairing must be level^2
    Mat4q gram;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            gram[r][c] = pair_trace(order.basis[r], order.basis[c]);
    if (det4(gram) != Rat(n) * Rat(n))
        throw invariant_error("maximal order Gram determinant mismatch");

    return order;
}

} // namespace qmint
