#ifndef QMINT_NUMERIC_HPP
#define QMINT_NUMERIC_HPP

#include <gmpxx.h>

#include <string>

namespace qmint {

using Int = mpz_class;
using Rat = mpq_class;

// Canonicalized fraction; mpq_class(n, d) alone does not reduce.
inline Rat make_rat(const Int& n, const Int& d) {
    Rat q(n, d);
    q.canonicalize();
    return q;
}

// Floor / ceiling of an exact rational.
Int floor_rat(const Rat& q);
Int ceil_rat(const Rat& q);

// Nearest integer; exact halves round toward +infinity.
Int round_rat(const Rat& q);

bool is_integer(const Rat& q);

// Conversion that throws invariant_error when the value is not integral /
// does not fit.
Int to_int(const Rat& q);
long to_long(const Int& n);

// Exact k-th root of a nonnegative integer; throws invariant_error when the
// input is not a perfect k-th power.
Int root_exact(const Int& n, unsigned long k);
Rat rat_root_exact(const Rat& q, unsigned long k);

bool is_prime(long n);

std::string rat_str(const Rat& q);
Rat parse_rat(const std::string& s);

} // namespace qmint

#endif
