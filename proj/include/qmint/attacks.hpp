#ifndef QMINT_ATTACKS_HPP
#define QMINT_ATTACKS_HPP

#include <cstdint>
#include <vector>

#include "qmint/money.hpp"

namespace qmint {

struct CollisionRecord {
    long trial = 0;
    long first = 0;  // bill indices inside the trial
    long second = 0;
    double serial_distance = 0.0; // Euclidean, phase units
    double post_fidelity = 0.0;   // fidelity of the two verified notes
};

struct AttackReport {
    long budget = 0;
    long trials = 0;
    long successes = 0;
    std::uint64_t seed = 0;
    std::vector<CollisionRecord> collisions;

    double success_rate() const {
        return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
    }
};

// Mints `budget` bills per trial and reports all pairs with serial distance
// at most eps/2. Each reported pair is verified; the post-measurement notes
// of a genuine collision agree with fidelity 1.
AttackReport birthday_attack(const ProtocolContext& ctx, const MintKeys& keys, long budget,
                             long trials, std::uint64_t seed);

enum class TriorthMode {
    haar_state, // random |phi> in W^3 and random basis
    fixed_state // phi = e1 x e1 x e1, random basis only
};

struct TriorthResult {
    double mean = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo estimate of E[sum_i |<iii|phi>|^2] over Haar-random
// orthonormal bases of a dim-dimensional space.
TriorthResult triorthogonality_experiment(long dim, long trials, std::uint64_t seed,
                                          TriorthMode mode);

} // namespace qmint

#endif
