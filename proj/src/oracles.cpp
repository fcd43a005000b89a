#include "qmint/oracles.hpp"

#include <vector>

#include "qmint/errors.hpp"

namespace qmint {

long eta_product_ap(long p, long terms) {
    if (p >= terms)
        throw parameter_error("eta_product_ap: need terms > p");
    std::vector<long long> c(static_cast<std::size_t>(terms), 0);
    c[1] = 1; // the leading factor q
    // multiply twice by (1 - q^k) and twice by (1 - q^{11k})
    for (long k = 1; k < terms; ++k) {
        for (int rep = 0; rep < 2; ++rep)
            for (long n = terms - 1; n >= k; --n)
                c[n] -= c[n - k];
        long kk = 11 * k;
        if (kk < terms)
            for (int rep = 0; rep < 2; ++rep)
                for (long n = terms - 1; n >= kk; --n)
                    c[n] -= c[n - kk];
    }
    return static_cast<long>(c[p]);
}

long ec_point_count_ap(long p) {
    if (p == 11)
        throw parameter_error("ec_point_count_ap: bad reduction at 11");
    if (!is_prime(p))
        throw parameter_error("ec_point_count_ap: p must be prime");
    if (p > 10000)
        throw parameter_error("ec_point_count_ap: p too large for exhaustive counting");
    long count = 1; // point at infinity
    for (long x = 0; x < p; ++x) {
        long rhs = ((x * x % p) * x % p - x * x % p - 10 * x % p - 20) % p;
        rhs = ((rhs % p) + p) % p;
        for (long y = 0; y < p; ++y)
            if ((y * y + y) % p == rhs)
                ++count;
    }
    return p + 1 - count;
}

std::pair<Rat, Rat> mass_identity(const ClassGroupTable& table) {
    Rat mass = 0;
    for (long w : table.weights)
        mass += make_rat(1, w);
    return {mass, make_rat(table.params.level - 1, 24)};
}

} // namespace qmint
