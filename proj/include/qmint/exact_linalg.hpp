#ifndef QMINT_EXACT_LINALG_HPP
#define QMINT_EXACT_LINALG_HPP

#include <array>
#include <vector>

#include "qmint/numeric.hpp"

namespace qmint {

using Vec4q = std::array<Rat, 4>;
using Mat4q = std::array<Vec4q, 4>;
using Vec4z = std::array<Int, 4>;

Rat det4(const Mat4q& m);

// Inverse by Gauss-Jordan elimination; throws invariant_error on singular input.
Mat4q inverse4(const Mat4q& m);

// Row vector times matrix.
Vec4q row_times(const Vec4q& v, const Mat4q& m);

Mat4q mat_mul(const Mat4q& x, const Mat4q& y);

// Hermite normal form of the row lattice spanned by `rows` (any count).
// Output rows are the canonical echelon basis: pivots positive, entries
// above each pivot reduced into [0, pivot). Zero rows are dropped.
std::vector<Vec4z> hnf_rows(std::vector<Vec4z> rows);

} // namespace qmint

#endif
