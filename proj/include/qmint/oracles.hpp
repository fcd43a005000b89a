#ifndef QMINT_ORACLES_HPP
#define QMINT_ORACLES_HPP

#include <utility>

#include "qmint/ideals.hpp"
#include "qmint/numeric.hpp"

namespace qmint {

// Independent ground-truth oracles used by tests and the self-test command.
// Deliberately naive and exhaustive; they share no code with the main path.

// Coefficient of q^p in q * prod_{k>=1} (1-q^k)^2 (1-q^{11k})^2, expanded by
// exact truncated polynomial multiplication. Requires p < terms.
long eta_product_ap(long p, long terms);

// p + 1 - #points of y^2 + y = x^3 - x^2 - 10x - 20 over F_p, counted by
// exhaustive enumeration (affine pairs plus the point at infinity).
// Rejects p = 11 (bad reduction) and p > 10^4.
long ec_point_count_ap(long p);

// (computed mass sum 1/w_i, (level - 1)/24) as exact rationals.
std::pair<Rat, Rat> mass_identity(const ClassGroupTable& table);

} // namespace qmint

#endif
