#include "test_helpers.hpp"

#include <set>

#include "qmint/exact_linalg.hpp"

namespace qmint::testing {

std::vector<Quat> brute_force_up_to_norm(const Lattice& lat, const Rat& radius) {
    // dual bound: x_k^2 <= radius * (G^-1)_kk for the norm-form Gram G
    Mat4q g;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            g[r][c] = pair_trace(lat.basis[r], lat.basis[c]) / 2;
    Mat4q ginv = inverse4(g);
    long bound[4];
    for (int k = 0; k < 4; ++k) {
        Rat b2 = radius * ginv[k][k];
        long b = 0;
        while (Rat(b + 1) * Rat(b + 1) <= b2)
            ++b;
        bound[k] = b;
    }

    std::set<std::array<Rat, 4>> seen;
    std::vector<Quat> out;
    for (long x0 = -bound[0]; x0 <= bound[0]; ++x0)
        for (long x1 = -bound[1]; x1 <= bound[1]; ++x1)
            for (long x2 = -bound[2]; x2 <= bound[2]; ++x2)
                for (long x3 = -bound[3]; x3 <= bound[3]; ++x3) {
                    Quat v = Rat(x0) * lat.basis[0] + Rat(x1) * lat.basis[1] +
                             Rat(x2) * lat.basis[2] + Rat(x3) * lat.basis[3];
                    if (v.is_zero() || norm(v) > radius)
                        continue;
                    for (int k = 0; k < 4; ++k) {
                        if (v.coord(k) == 0)
                            continue;
                        if (v.coord(k) < 0)
                            v = -v;
                        break;
                    }
                    std::array<Rat, 4> key{v.a, v.b, v.c, v.d};
                    if (seen.insert(key).second)
                        out.push_back(v);
                }
    return out;
}

} // namespace qmint::testing
