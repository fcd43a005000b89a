#include "qmint/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qmint/errors.hpp"

namespace qmint {

namespace {

Mat4q gram_of(long level, const std::array<Quat, 4>& basis) {
    Mat4q g;
    (void)level;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            g[r][c] = pair_trace(basis[r], basis[c]);
    return g;
}

Vec4q coords_of(const Quat& x) { return {x.a, x.b, x.c, x.d}; }

Quat quat_of(long level, const Vec4q& v) { return Quat(level, v[0], v[1], v[2], v[3]); }

Mat4q basis_matrix(const std::array<Quat, 4>& basis) {
    Mat4q m;
    for (int r = 0; r < 4; ++r)
        m[r] = coords_of(basis[r]);
    return m;
}

// Norm-form Gram (half the trace pairing): diagonal entries are the norms.
Mat4q norm_gram(const std::array<Quat, 4>& basis) {
    Mat4q g;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            g[r][c] = pair_trace(basis[r], basis[c]) / 2;
    return g;
}

bool sign_normalized(const Quat& q) {
    for (int k = 0; k < 4; ++k) {
        const Rat& c = q.coord(k);
        if (c != 0)
            return c > 0;
    }
    return true;
}

Quat normalize_sign(const Quat& q) { return sign_normalized(q) ? q : -q; }

bool coord_lex_less(const Quat& x, const Quat& y) {
    for (int k = 0; k < 4; ++k) {
        int c = cmp(x.coord(k), y.coord(k));
        if (c != 0)
            return c < 0;
    }
    return false;
}

void sort_normalize(std::array<Quat, 4>& basis) {
    for (Quat& b : basis)
        b = normalize_sign(b);
    std::sort(basis.begin(), basis.end(), [](const Quat& x, const Quat& y) {
        int c = cmp(norm(x), norm(y));
        if (c != 0)
            return c < 0;
        return coord_lex_less(x, y);
    });
}

} // namespace

Lattice hermite_basis(std::span<const Quat> generators) {
    if (generators.empty())
        throw parameter_error("hermite_basis: empty generator set");
    long level = generators.front().level;
    Int den = 1;
    for (const Quat& g : generators) {
        if (g.level != level)
            throw invariant_error("hermite_basis: mixed levels");
        for (int k = 0; k < 4; ++k)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), g.coord(k).get_den().get_mpz_t());
    }
    std::vector<Vec4z> rows;
    rows.reserve(generators.size());
    for (const Quat& g : generators) {
        Vec4z row;
        for (int k = 0; k < 4; ++k)
            row[k] = to_int(Rat(den) * g.coord(k));
        rows.push_back(row);
    }
    rows = hnf_rows(std::move(rows));
    if (rows.size() != 4)
        throw parameter_error("hermite_basis: rank-deficient generator set");
    Lattice lat;
    lat.level = level;
    for (int r = 0; r < 4; ++r) {
        Vec4q v;
        for (int k = 0; k < 4; ++k) {
            v[k] = Rat(rows[r][k], den);
            v[k].canonicalize();
        }
        lat.basis[r] = quat_of(level, v);
    }
    lat.gram = gram_of(level, lat.basis);
    return lat;
}

Lattice lattice_from_rows(long level, const Mat4q& rows) {
    std::array<Quat, 4> gens;
    for (int r = 0; r < 4; ++r)
        gens[r] = quat_of(level, rows[r]);
    return hermite_basis(gens);
}

std::array<Rat, 16> ReducedBasis::key() const {
    std::array<Rat, 16> k;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            k[4 * r + c] = basis[r].coord(c);
    return k;
}

bool lex_less(const ReducedBasis& x, const ReducedBasis& y) {
    auto kx = x.key();
    auto ky = y.key();
    for (int i = 0; i < 16; ++i) {
        int c = cmp(kx[i], ky[i]);
        if (c != 0)
            return c < 0;
    }
    return false;
}

ReducedBasis reduce(const Lattice& lat) {
    std::array<Quat, 4> basis = lat.basis;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (i == j)
                    continue;
                Rat mu = (pair_trace(basis[j], basis[i]) / 2) / norm(basis[i]);
                Int m = round_rat(mu);
                if (m == 0)
                    continue;
                Quat cand = basis[j] - Rat(m) * basis[i];
                if (norm(cand) < norm(basis[j])) {
                    basis[j] = cand;
                    changed = true;
                }
            }
        }
    }
    sort_normalize(basis);
    return ReducedBasis{lat.level, basis};
}

Lattice lattice_of(const ReducedBasis& rb) { return hermite_basis(rb.basis); }

std::vector<Quat> vectors_up_to_norm(const Lattice& lat, const Rat& radius) {
    ReducedBasis rb = reduce(lat);
    Mat4q g = norm_gram(rb.basis);

    // q[i][i] (x_i + sum_{j>i} mu[i][j] x_j)^2 decomposition, exact rationals
    Mat4q q = g;
    Mat4q mu{};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j)
            mu[i][j] = q[i][j] / q[i][i];
        for (int j = i + 1; j < 4; ++j)
            for (int k = j; k < 4; ++k)
                q[j][k] -= q[i][j] * q[i][k] / q[i][i];
    }

    std::vector<Quat> found;
    std::array<Int, 4> x{};

    // depth-first over coordinates 3..0; at each level the admissible x_i
    // form an interval around the real center, scanned outward with exact
    // comparisons
    auto rec = [&](auto&& self, int i, const Rat& budget) -> void {
        if (i < 0) {
            Quat v = Quat::zero(lat.level);
            for (int k = 0; k < 4; ++k)
                v = v + Rat(x[k]) * rb.basis[k];
            if (!v.is_zero())
                found.push_back(normalize_sign(v));
            return;
        }
        Rat center = 0;
        for (int j = i + 1; j < 4; ++j)
            center -= mu[i][j] * Rat(x[j]);
        auto weight = [&](const Int& xi) -> Rat {
            Rat t = Rat(xi) - center;
            return q[i][i] * t * t;
        };
        Int start = round_rat(center);
        for (Int xi = start;; ++xi) {
            Rat w = weight(xi);
            if (w > budget)
                break;
            x[i] = xi;
            self(self, i - 1, budget - w);
        }
        for (Int xi = start - 1;; --xi) {
            Rat w = weight(xi);
            if (w > budget)
                break;
            x[i] = xi;
            self(self, i - 1, budget - w);
        }
    };
    rec(rec, 3, radius);

    // one representative per sign pair
    std::set<std::array<Rat, 4>> seen;
    std::vector<Quat> out;
    for (const Quat& v : found) {
        std::array<Rat, 4> key{v.a, v.b, v.c, v.d};
        if (seen.insert(key).second)
            out.push_back(v);
    }
    std::sort(out.begin(), out.end(), [](const Quat& a, const Quat& b) {
        int c = cmp(norm(a), norm(b));
        if (c != 0)
            return c < 0;
        return coord_lex_less(a, b);
    });
    return out;
}

std::vector<Quat> shortest_vectors(const Lattice& lat) {
    // after reduce() the basis is norm-sorted, so entry 0 bounds the minimum
    ReducedBasis rb = reduce(lat);
    Rat radius = norm(rb.basis[0]);
    std::vector<Quat> all = vectors_up_to_norm(lat, radius);
    if (all.empty())
        throw invariant_error("shortest_vectors: enumeration found nothing");
    const Rat min_norm = norm(all.front());
    std::vector<Quat> out;
    for (const Quat& v : all)
        if (norm(v) == min_norm)
            out.push_back(v);
    return out;
}

Int lattice_index(const Lattice& sub, const Lattice& sup) {
    if (sub.level != sup.level)
        throw invariant_error("lattice_index: mixed levels");
    Mat4q inv = inverse4(basis_matrix(sup.basis));
    Mat4q change;
    for (int r = 0; r < 4; ++r) {
        change[r] = row_times(coords_of(sub.basis[r]), inv);
        for (int k = 0; k < 4; ++k)
            if (!is_integer(change[r][k]))
                throw parameter_error("lattice_index: containment violation");
    }
    Rat d = det4(change);
    Int idx = abs(to_int(d));
    return idx;
}

bool lattice_contains(const Lattice& lat, const Quat& x) {
    if (lat.level != x.level)
        return false;
    Mat4q inv = inverse4(basis_matrix(lat.basis));
    Vec4q c = row_times(coords_of(x), inv);
    for (int k = 0; k < 4; ++k)
        if (!is_integer(c[k]))
            return false;
    return true;
}

const ReducedBasis& canonicalize_tiebreak(const std::vector<ReducedBasis>& candidates) {
    if (candidates.empty())
        throw parameter_error("canonicalize_tiebreak: empty candidate list");
    const ReducedBasis* best = &candidates.front();
    for (const ReducedBasis& c : candidates)
        if (lex_less(c, *best))
            best = &c;
    return *best;
}

Lattice scale_lattice(const Lattice& lat, const Rat& s) {
    if (s == 0)
        throw parameter_error("scale_lattice: zero scale");
    std::array<Quat, 4> gens;
    for (int r = 0; r < 4; ++r)
        gens[r] = s * lat.basis[r];
    return hermite_basis(gens);
}

Lattice mul_lattice_quat(const Lattice& lat, const Quat& z) {
    if (z.is_zero())
        throw parameter_error("mul_lattice_quat: zero multiplier");
    std::array<Quat, 4> gens;
    for (int r = 0; r < 4; ++r)
        gens[r] = lat.basis[r] * z;
    return hermite_basis(gens);
}

Lattice mul_lattices(const Lattice& lhs, const Lattice& rhs) {
    std::vector<Quat> gens;
    gens.reserve(16);
    for (const Quat& x : lhs.basis)
        for (const Quat& y : rhs.basis)
            gens.push_back(x * y);
    return hermite_basis(gens);
}

Lattice conj_lattice(const Lattice& lat) {
    std::array<Quat, 4> gens;
    for (int r = 0; r < 4; ++r)
        gens[r] = conj(lat.basis[r]);
    return hermite_basis(gens);
}

Lattice add_lattices(const Lattice& lhs, const Lattice& rhs) {
    std::vector<Quat> gens;
    gens.reserve(8);
    for (const Quat& x : lhs.basis)
        gens.push_back(x);
    for (const Quat& y : rhs.basis)
        gens.push_back(y);
    return hermite_basis(gens);
}

Rat gram_det(const Lattice& lat) { return det4(lat.gram); }

} // namespace qmint
