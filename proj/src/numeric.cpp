#include "qmint/numeric.hpp"

#include <limits>

#include "qmint/errors.hpp"

namespace qmint {

Int floor_rat(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

Int ceil_rat(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

Int round_rat(const Rat& q) {
    // floor((2n + d) / 2d)
    Int two_n = 2 * q.get_num();
    Int d = q.get_den();
    Int num = two_n + d;
    Int r;
    Int two_d = 2 * d;
    mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), two_d.get_mpz_t());
    return r;
}

bool is_integer(const Rat& q) { return q.get_den() == 1; }

Int to_int(const Rat& q) {
    if (!is_integer(q))
        throw invariant_error("expected integral rational, got " + rat_str(q));
    return Int(q.get_num());
}

long to_long(const Int& n) {
    if (!n.fits_slong_p())
        throw invariant_error("integer out of range for long: " + n.get_str());
    return n.get_si();
}

Int root_exact(const Int& n, unsigned long k) {
    if (n < 0)
        throw invariant_error("root_exact: negative radicand");
    Int r;
    int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
    if (!exact)
        throw invariant_error("root_exact: " + n.get_str() + " is not a perfect power");
    return r;
}

Rat rat_root_exact(const Rat& q, unsigned long k) {
    Rat r(root_exact(Int(q.get_num()), k), root_exact(Int(q.get_den()), k));
    r.canonicalize();
    return r;
}

bool is_prime(long n) {
    if (n < 2)
        return false;
    Int z(n);
    // GMP's test is BPSW followed by Miller-Rabin rounds; at the sizes used
    // here (well under 2^64) it is deterministic in practice.
    return mpz_probab_prime_p(z.get_mpz_t(), 40) != 0;
}

std::string rat_str(const Rat& q) { return q.get_str(); }

Rat parse_rat(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0)
        throw parameter_error("malformed rational: '" + s + "'");
    q.canonicalize();
    return q;
}

} // namespace qmint
