#include "qmint/splitting.hpp"

#include <numeric>
#include <vector>

#include "qmint/errors.hpp"

namespace qmint {

namespace {

long mod_reduce(long x, long m) {
    long r = x % m;
    return r < 0 ? r + m : r;
}

long mul_mod(long x, long y, long m) { return mod_reduce((x % m) * (y % m), m); }

long pow_mod(long base, long exp, long m) {
    long r = 1 % m;
    base = mod_reduce(base, m);
    while (exp > 0) {
        if (exp & 1)
            r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Tonelli-Shanks; caller guarantees a is a QR mod odd prime p.
long sqrt_mod_prime(long a, long p) {
    a = mod_reduce(a, p);
    if (a == 0)
        return 0;
    if (p % 4 == 3)
        return pow_mod(a, (p + 1) / 4, p);
    long q = p - 1, s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    long z = 2;
    while (pow_mod(z, (p - 1) / 2, p) != p - 1)
        ++z;
    long m = s;
    long c = pow_mod(z, q, p);
    long t = pow_mod(a, q, p);
    long r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        long i = 0;
        long tt = t;
        while (tt != 1) {
            tt = mul_mod(tt, tt, p);
            ++i;
        }
        long b = pow_mod(c, 1L << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    return r;
}

bool is_qr(long a, long p) {
    a = mod_reduce(a, p);
    if (a == 0)
        return true;
    return pow_mod(a, (p - 1) / 2, p) == 1;
}

using Coords = std::array<long, 4>;

// Arithmetic in the order modulo M, driven by the exact structure constants
// of the order basis.
struct ModOrder {
    long modulus;
    long tensor[4][4][4]; // e_i * e_j = sum_k tensor[i][j][k] e_k

    Coords one() const { return {1 % modulus, 0, 0, 0}; }

    Coords reduce(const Coords& x) const {
        Coords r;
        for (int k = 0; k < 4; ++k)
            r[k] = mod_reduce(x[k], modulus);
        return r;
    }

    Coords mul(const Coords& x, const Coords& y) const {
        Coords r{};
        for (int i = 0; i < 4; ++i) {
            if (x[i] == 0)
                continue;
            for (int j = 0; j < 4; ++j) {
                if (y[j] == 0)
                    continue;
                long f = mul_mod(x[i], y[j], modulus);
                for (int k = 0; k < 4; ++k)
                    r[k] = mod_reduce(r[k] + f * tensor[i][j][k], modulus);
            }
        }
        return r;
    }

    Coords add(const Coords& x, const Coords& y) const {
        Coords r;
        for (int k = 0; k < 4; ++k)
            r[k] = mod_reduce(x[k] + y[k], modulus);
        return r;
    }

    Coords sub(const Coords& x, const Coords& y) const {
        Coords r;
        for (int k = 0; k < 4; ++k)
            r[k] = mod_reduce(x[k] - y[k], modulus);
        return r;
    }

    Coords scale(long s, const Coords& x) const {
        Coords r;
        for (int k = 0; k < 4; ++k)
            r[k] = mul_mod(s, x[k], modulus);
        return r;
    }

    bool is_zero(const Coords& x) const {
        return x[0] == 0 && x[1] == 0 && x[2] == 0 && x[3] == 0;
    }

    bool zero_mod(const Coords& x, long p) const {
        for (long c : x)
            if (c % p != 0)
                return false;
        return true;
    }

    // index of a coordinate that is a unit modulo the prime p
    int unit_coord(const Coords& x, long p) const {
        for (int k = 0; k < 4; ++k)
            if (x[k] % p != 0)
                return k;
        throw invariant_error("splitting: expected a unit coordinate");
    }
};

ModOrder make_mod_order(const MaximalOrder& order, long modulus) {
    ModOrder mo;
    mo.modulus = modulus;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::array<Rat, 4> c = order.order_coords(order.basis[i] * order.basis[j]);
            for (int k = 0; k < 4; ++k) {
                Int v = to_int(c[k]);
                mo.tensor[i][j][k] = mod_reduce(static_cast<long>(mpz_fdiv_ui(
                                                    v.get_mpz_t(), modulus)),
                                                modulus);
            }
        }
    return mo;
}

// candidate elements scanned when searching for splitting data
std::vector<Coords> candidate_elements(long p, const ModOrder& mo) {
    std::vector<Coords> out;
    for (int i = 0; i < 4; ++i) {
        Coords c{};
        c[i] = 1;
        out.push_back(mo.reduce(c));
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Coords c{};
            c[i] = 1;
            c[j] = 1;
            out.push_back(mo.reduce(c));
        }
    // deterministic pseudo-random tail
    unsigned long state = 0x243f6a88UL;
    for (int t = 0; t < 200; ++t) {
        Coords c{};
        for (int k = 0; k < 4; ++k) {
            state = state * 6364136223846793005UL + 1442695040888963407UL;
            c[k] = static_cast<long>((state >> 33) % static_cast<unsigned long>(p));
        }
        out.push_back(mo.reduce(c));
    }
    return out;
}

Int exact_reduced_norm(const MaximalOrder& order, const Coords& c) {
    std::array<Rat, 4> rc;
    for (int k = 0; k < 4; ++k)
        rc[k] = Rat(c[k]);
    return to_int(norm(order.from_order_coords(rc)));
}

Int exact_reduced_trace(const MaximalOrder& order, const Coords& c) {
    std::array<Rat, 4> rc;
    for (int k = 0; k < 4; ++k)
        rc[k] = Rat(c[k]);
    return to_int(2 * trace(order.from_order_coords(rc)));
}

// Rank-1 idempotent in the order mod p.
Coords find_idempotent_mod_p(const MaximalOrder& order, long p) {
    ModOrder mo = make_mod_order(order, p);
    if (p == 2) {
        // z with odd reduced trace and even reduced norm satisfies z^2 = z
        for (long c0 : {0L, 1L})
            for (long c1 : {0L, 1L})
                for (long c2 : {0L, 1L})
                    for (long c3 : {0L, 1L}) {
                        Coords c{c0, c1, c2, c3};
                        if (mo.is_zero(c))
                            continue;
                        Int trd = exact_reduced_trace(order, c);
                        Int nrd = exact_reduced_norm(order, c);
                        if (trd % 2 != 0 && nrd % 2 == 0) {
                            Coords e = mo.reduce(c);
                            if (!mo.is_zero(e) && e != mo.one())
                                return e;
                        }
                    }
        throw invariant_error("splitting: no idempotent mod 2 within budget");
    }
    long inv2 = inv_mod(2, p);
    for (const Coords& z : candidate_elements(p, mo)) {
        if (z[1] == 0 && z[2] == 0 && z[3] == 0)
            continue; // scalar
        long trd = mod_reduce(static_cast<long>(mpz_fdiv_ui(
                                  exact_reduced_trace(order, z).get_mpz_t(), p)),
                              p);
        long nrd = mod_reduce(static_cast<long>(mpz_fdiv_ui(
                                  exact_reduced_norm(order, z).get_mpz_t(), p)),
                              p);
        long disc = mod_reduce(trd * trd - 4 * nrd, p);
        if (disc == 0 || !is_qr(disc, p))
            continue;
        long root = sqrt_mod_prime(disc, p);
        long r = mul_mod(trd + root, inv2, p);
        long s = mul_mod(mod_reduce(trd - root, p), inv2, p);
        if (r == s)
            continue;
        // e = (z - r) / (s - r)
        Coords zr = z;
        zr[0] = mod_reduce(zr[0] - r, p);
        Coords e = mo.scale(inv_mod(mod_reduce(s - r, p), p), zr);
        if (mo.is_zero(e) || e == mo.one())
            continue;
        if (mo.mul(e, e) == e)
            return e;
    }
    throw invariant_error("splitting: no split element found mod " + std::to_string(p));
}

struct PrimePowerSplitting {
    long modulus;
    std::array<Mat2, 4> images;
};

PrimePowerSplitting split_prime_power(const MaximalOrder& order, long p, long pk) {
    ModOrder mo = make_mod_order(order, pk);

    // lift the mod-p idempotent: e <- 3e^2 - 2e^3 doubles p-adic precision
    Coords e = find_idempotent_mod_p(order, p);
    for (int it = 0; it < 12 && mo.mul(e, e) != e; ++it) {
        Coords e2 = mo.mul(e, e);
        Coords e3 = mo.mul(e2, e);
        e = mo.sub(mo.scale(3, e2), mo.scale(2, e3));
    }
    if (mo.mul(e, e) != e)
        throw invariant_error("splitting: idempotent lift failed");

    Coords f = mo.sub(mo.one(), e);
    int idx_e = mo.unit_coord(e, p);

    // matrix units: x spans eOf, y spans fOe with x*y = e
    Coords x{}, y{};
    bool found = false;
    auto cands = candidate_elements(pk, mo);
    for (const Coords& z1 : cands) {
        Coords xc = mo.mul(mo.mul(e, z1), f);
        if (mo.zero_mod(xc, p))
            continue;
        for (const Coords& z2 : cands) {
            Coords yc = mo.mul(mo.mul(f, z2), e);
            if (mo.zero_mod(yc, p))
                continue;
            Coords s = mo.mul(xc, yc); // in eOe = (Z/pk) e
            long c = mul_mod(s[idx_e], inv_mod(e[idx_e], pk), pk);
            if (c % p == 0)
                continue;
            if (s != mo.scale(c, e))
                throw invariant_error("splitting: eOe is not scalar");
            x = xc;
            y = mo.scale(inv_mod(c, pk), yc);
            found = true;
            break;
        }
        if (found)
            break;
    }
    if (!found)
        throw invariant_error("splitting: no matrix-unit frame within budget (p=" +
                              std::to_string(p) + ")");

    int idx_x = mo.unit_coord(x, p);
    int idx_y = mo.unit_coord(y, p);
    int idx_f = mo.unit_coord(f, p);
    long ie = inv_mod(e[idx_e], pk);
    long ix = inv_mod(x[idx_x], pk);
    long iy = inv_mod(y[idx_y], pk);
    long iff = inv_mod(f[idx_f], pk);

    auto entry = [&](const Coords& w) -> Mat2 {
        Mat2 m;
        Coords s11 = mo.mul(mo.mul(e, w), e);
        Coords s12 = mo.mul(mo.mul(e, w), f);
        Coords s21 = mo.mul(mo.mul(f, w), e);
        Coords s22 = mo.mul(mo.mul(f, w), f);
        m.a[0][0] = mul_mod(s11[idx_e], ie, pk);
        m.a[0][1] = mul_mod(s12[idx_x], ix, pk);
        m.a[1][0] = mul_mod(s21[idx_y], iy, pk);
        m.a[1][1] = mul_mod(s22[idx_f], iff, pk);
        return m;
    };

    PrimePowerSplitting out;
    out.modulus = pk;
    for (int k = 0; k < 4; ++k) {
        Coords basis{};
        basis[k] = 1;
        out.images[k] = entry(mo.reduce(basis));
    }
    return out;
}

std::vector<std::pair<long, long>> factorize(long m) {
    std::vector<std::pair<long, long>> f;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            long pk = 1;
            while (m % p == 0) {
                m /= p;
                pk *= p;
            }
            f.emplace_back(p, pk);
        }
    }
    if (m > 1)
        f.emplace_back(m, m);
    return f;
}

void verify_splitting(const MaximalOrder& order, const SplittingData& split) {
    long m = split.modulus;
    if (split.image_of({1, 0, 0, 0}) != mat2_identity())
        throw invariant_error("splitting: image of 1 is not the identity");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::array<long, 4> prod =
                order_coords_mod(order, order.basis[i] * order.basis[j], m);
            Mat2 lhs = mat2_mul(split.images[i], split.images[j], m);
            if (lhs != split.image_of(prod))
                throw invariant_error("splitting: images violate the multiplication table");
        }
}

} // namespace

Mat2 mat2_identity() {
    Mat2 m;
    m.a[0][0] = 1;
    m.a[1][1] = 1;
    return m;
}

Mat2 mat2_mul(const Mat2& x, const Mat2& y, long mod) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.a[i][j] =
                mod_reduce(x.a[i][0] * y.a[0][j] + x.a[i][1] * y.a[1][j], mod);
    return r;
}

Mat2 mat2_add(const Mat2& x, const Mat2& y, long mod) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.a[i][j] = mod_reduce(x.a[i][j] + y.a[i][j], mod);
    return r;
}

Mat2 mat2_scale(long s, const Mat2& x, long mod) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.a[i][j] = mul_mod(s, x.a[i][j], mod);
    return r;
}

long inv_mod(long x, long m) {
    if (m == 1)
        return 0;
    long a = mod_reduce(x, m), b = m;
    long u = 1, v = 0;
    while (b != 0) {
        long q = a / b;
        long t = a - q * b;
        a = b;
        b = t;
        t = u - q * v;
        u = v;
        v = t;
    }
    if (a != 1)
        throw invariant_error("inv_mod: " + std::to_string(x) + " not invertible mod " +
                              std::to_string(m));
    return mod_reduce(u, m);
}

Mat2 SplittingData::image_of(const std::array<long, 4>& order_coords) const {
    Mat2 r;
    for (int k = 0; k < 4; ++k)
        if (order_coords[k] % modulus != 0)
            r = mat2_add(r, mat2_scale(order_coords[k], images[k], modulus), modulus);
    return r;
}

std::array<long, 4> order_coords_mod(const MaximalOrder& order, const Quat& x, long m) {
    std::array<Rat, 4> c = order.order_coords(x);
    std::array<long, 4> out;
    for (int k = 0; k < 4; ++k) {
        Int v = to_int(c[k]);
        out[k] = static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), m));
    }
    return out;
}

SplittingData split_order(const MaximalOrder& order, long m) {
    if (m <= 1)
        throw parameter_error("split_order: modulus must exceed 1");
    if (std::gcd(m, order.level()) != 1)
        throw parameter_error("split_order: modulus shares a factor with the level");

    std::vector<PrimePowerSplitting> parts;
    for (auto [p, pk] : factorize(m))
        parts.push_back(split_prime_power(order, p, pk));

    SplittingData split;
    split.level = order.level();
    split.modulus = m;
    for (int k = 0; k < 4; ++k) {
        Mat2 img;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                // CRT across the prime-power components
                long r = 0;
                for (const auto& part : parts) {
                    long rest = m / part.modulus;
                    long coeff = mul_mod(rest % m, inv_mod(rest % part.modulus, part.modulus), m);
                    r = mod_reduce(r + coeff * part.images[k].a[i][j], m);
                }
                img.a[i][j] = r;
            }
        split.images[k] = img;
    }

    verify_splitting(order, split);
    return split;
}

std::array<long, 4> splitting_preimage(const SplittingData& split, const Mat2& target) {
    long m = split.modulus;
    // 4x4 system: columns are the vectorized images of the order basis
    long phi[4][4];
    for (int k = 0; k < 4; ++k) {
        phi[0][k] = split.images[k].a[0][0];
        phi[1][k] = split.images[k].a[0][1];
        phi[2][k] = split.images[k].a[1][0];
        phi[3][k] = split.images[k].a[1][1];
    }
    // adjugate inverse mod m
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) -> long {
        long d = phi[r0][c0] * (phi[r1][c1] * phi[r2][c2] - phi[r1][c2] * phi[r2][c1]) -
                 phi[r0][c1] * (phi[r1][c0] * phi[r2][c2] - phi[r1][c2] * phi[r2][c0]) +
                 phi[r0][c2] * (phi[r1][c0] * phi[r2][c1] - phi[r1][c1] * phi[r2][c0]);
        return mod_reduce(d, m);
    };
    long det = 0;
    {
        int rows[3] = {1, 2, 3};
        long sign = 1;
        for (int c = 0; c < 4; ++c) {
            int cols[3];
            int t = 0;
            for (int cc = 0; cc < 4; ++cc)
                if (cc != c)
                    cols[t++] = cc;
            det = mod_reduce(det + sign * phi[0][c] *
                                        det3(rows[0], rows[1], rows[2], cols[0], cols[1], cols[2]),
                             m);
            sign = -sign;
        }
    }
    long dinv = inv_mod(det, m);
    long vec[4] = {target.a[0][0], target.a[0][1], target.a[1][0], target.a[1][1]};
    std::array<long, 4> out{};
    for (int k = 0; k < 4; ++k) {
        // cofactor expansion for row k of the adjugate
        long acc = 0;
        for (int r = 0; r < 4; ++r) {
            int rows[3], cols[3];
            int t = 0;
            for (int rr = 0; rr < 4; ++rr)
                if (rr != r)
                    rows[t++] = rr;
            t = 0;
            for (int cc = 0; cc < 4; ++cc)
                if (cc != k)
                    cols[t++] = cc;
            long minor = det3(rows[0], rows[1], rows[2], cols[0], cols[1], cols[2]);
            long sign = ((r + k) % 2 == 0) ? 1 : -1;
            acc = mod_reduce(acc + sign * minor * vec[r], m);
        }
        out[k] = mul_mod(acc, dinv, m);
    }
    return out;
}

} // namespace qmint
