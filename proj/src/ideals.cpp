#include "qmint/ideals.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

#include "qmint/errors.hpp"
#include "qmint/hecke.hpp"
#include "qmint/splitting.hpp"

namespace qmint {

namespace {

long gcd_pos(long a, long b) { return std::gcd(a, b); }

std::array<Rat, 16> key_of(const ReducedBasis& rb) { return rb.key(); }

} // namespace

long box_limit(long level) {
    Int bound = bell_box_constant * bell_box_constant * Int(level);
    Int root;
    mpz_sqrt(root.get_mpz_t(), bound.get_mpz_t());
    return to_long(root);
}

LeftIdeal make_left_ideal(Lattice lattice, const MaximalOrder& order) {
    if (lattice.level != order.level())
        throw invariant_error("make_left_ideal: level mismatch");
    for (const Quat& e : order.basis)
        for (const Quat& b : lattice.basis)
            if (!lattice_contains(lattice, e * b))
                throw invariant_error("make_left_ideal: not closed under left multiplication");
    return LeftIdeal{std::move(lattice), order};
}

std::size_t ClassGroupTable::index_of(const ReducedBasis& key) const {
    for (std::size_t i = 0; i < reps.size(); ++i)
        if (reps[i].canonical_lattice == key)
            return i;
    throw invariant_error("class table: canonical lattice not found");
}

IdealClassRep canonical_rep(const LeftIdeal& ideal) {
    const MaximalOrder& order = ideal.order;
    std::vector<Quat> zs = shortest_vectors(ideal.lattice);

    std::vector<ReducedBasis> candidates;
    candidates.reserve(zs.size());
    for (const Quat& z : zs)
        candidates.push_back(reduce(mul_lattice_quat(ideal.lattice, inverse(z))));
    ReducedBasis winner = canonicalize_tiebreak(candidates);

    // least m with m * (I z^-1) inside the order
    Lattice canonical = lattice_of(winner);
    Int m_int = 1;
    for (const Quat& b : canonical.basis)
        for (const Rat& c : order.order_coords(b))
            mpz_lcm(m_int.get_mpz_t(), m_int.get_mpz_t(), c.get_den().get_mpz_t());
    long m = to_long(m_int);

    if (gcd_pos(m, order.level()) != 1)
        throw invariant_error("canonical_rep: m shares a factor with the level");
    if (m > box_limit(order.level()))
        throw invariant_error("canonical_rep: m exceeds the box bound " +
                              std::to_string(box_limit(order.level())));

    Lattice integral = scale_lattice(canonical, Rat(m));
    return IdealClassRep{winner, make_left_ideal(integral, order), m};
}

Lattice right_order_lattice(const Lattice& ideal_lattice, const MaximalOrder& order) {
    Lattice order_lat = hermite_basis(order.basis);
    Rat ratio = gram_det(ideal_lattice) / gram_det(order_lat);
    Rat nrd = rat_root_exact(ratio, 4);
    Lattice ro = scale_lattice(mul_lattices(conj_lattice(ideal_lattice), ideal_lattice),
                               Rat(1) / nrd);
    if (!lattice_contains(ro, Quat::one(order.level())))
        throw invariant_error("right_order_lattice: result does not contain 1");
    return ro;
}

long unit_group_order(const IdealClassRep& rep) {
    Lattice ro = right_order_lattice(rep.integral_form.lattice, rep.integral_form.order);
    std::vector<Quat> sv = shortest_vectors(ro);
    if (norm(sv.front()) != 1)
        throw invariant_error("unit_group_order: right order has no norm-1 vector");
    return 2 * static_cast<long>(sv.size());
}

namespace {

struct Enumeration {
    std::vector<IdealClassRep> reps;
    std::map<std::array<Rat, 16>, std::size_t> seen;
};

void bfs_expand(Enumeration& en, long p, std::size_t start_from, long cap) {
    std::deque<std::size_t> frontier;
    for (std::size_t i = start_from; i < en.reps.size(); ++i)
        frontier.push_back(i);
    long pops = 0;
    while (!frontier.empty()) {
        if (++pops > cap)
            throw invariant_error("enumerate_classes: iteration cap exceeded");
        std::size_t idx = frontier.front();
        frontier.pop_front();
        for (const LeftIdeal& nb : p_neighbors(en.reps[idx], p)) {
            IdealClassRep r = canonical_rep(nb);
            auto key = key_of(r.canonical_lattice);
            if (en.seen.emplace(key, en.reps.size()).second) {
                en.reps.push_back(std::move(r));
                frontier.push_back(en.reps.size() - 1);
            }
        }
    }
}

Rat mass_of(const std::vector<long>& weights) {
    Rat mass = 0;
    for (long w : weights)
        mass += make_rat(1, w);
    return mass;
}

} // namespace

ClassGroupTable enumerate_classes(const AlgebraParams& params) {
    MaximalOrder order = maximal_order(params);
    Lattice order_lat = hermite_basis(order.basis);

    Enumeration en;
    IdealClassRep first = canonical_rep(make_left_ideal(order_lat, order));
    en.seen.emplace(key_of(first.canonical_lattice), 0);
    en.reps.push_back(std::move(first));

    const long cap = 64 + 16 * (params.level / 12 + 2);
    bfs_expand(en, 2, 0, cap);

    Rat target = make_rat(params.level - 1, 24);
    std::vector<long> weights;
    for (const IdealClassRep& r : en.reps)
        weights.push_back(unit_group_order(r));

    if (mass_of(weights) != target) {
        // the 2-neighbor graph closure missed classes; extend with 3-neighbors
        bfs_expand(en, 3, 0, cap);
        weights.clear();
        for (const IdealClassRep& r : en.reps)
            weights.push_back(unit_group_order(r));
        if (mass_of(weights) != target)
            throw invariant_error("enumerate_classes: mass identity failed after extension");
    }

    // sort lexicographically by canonical lattice, carrying weights along
    std::vector<std::size_t> perm(en.reps.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
        return lex_less(en.reps[i].canonical_lattice, en.reps[j].canonical_lattice);
    });

    ClassGroupTable table{params, {}, {}, {}};
    for (std::size_t i : perm) {
        table.reps.push_back(std::move(en.reps[i]));
        table.weights.push_back(weights[i]);
    }
    for (const IdealClassRep& r : table.reps)
        table.triples.push_back(triple_encode(r));
    return table;
}

TripleCode triple_encode(const IdealClassRep& rep) {
    const MaximalOrder& order = rep.integral_form.order;
    long m = rep.m;
    if (m == 1)
        return TripleCode{1, 1, 1};
    if (gcd_pos(m, order.level()) != 1)
        throw invariant_error("triple_encode: m shares a factor with the level");

    SplittingData split = split_order(order, m);
    std::array<Mat2, 4> images;
    for (int k = 0; k < 4; ++k)
        images[k] =
            split.image_of(order_coords_mod(order, rep.integral_form.lattice.basis[k], m));

    // kernel of the ideal's image: all w with A w = 0 for every generator A
    std::vector<std::pair<long, long>> kernel;
    for (long w1 = 0; w1 < m; ++w1)
        for (long w2 = 0; w2 < m; ++w2) {
            bool ok = true;
            for (const Mat2& A : images) {
                if ((A.a[0][0] * w1 + A.a[0][1] * w2) % m != 0 ||
                    (A.a[1][0] * w1 + A.a[1][1] * w2) % m != 0) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                kernel.emplace_back(w1, w2);
        }
    if (static_cast<long>(kernel.size()) != m)
        throw invariant_error("triple_encode: kernel size " + std::to_string(kernel.size()) +
                              " != m = " + std::to_string(m));

    // admissible representatives (d, a): first coordinate literally a divisor
    // of m, gcd(a, d) = 1, a <= b = m/d
    bool have = false;
    TripleCode best;
    for (auto [w1, w2] : kernel) {
        if (gcd_pos(gcd_pos(w1, w2), m) != 1)
            continue;
        long d = (w1 == 0) ? m : w1;
        if (m % d != 0)
            continue;
        long a = (w2 == 0) ? m : w2;
        if (gcd_pos(a, d) != 1)
            continue;
        long b = m / d;
        if (a > b)
            continue;
        TripleCode cand{d, a, b};
        if (!have || cand.d < best.d || (cand.d == best.d && cand.a < best.a)) {
            best = cand;
            have = true;
        }
    }
    if (!have)
        throw invariant_error(
            "triple_encode: no admissible representative for the kernel point (m = " +
            std::to_string(m) + ")");
    return best;
}

LeftIdeal triple_decode(const TripleCode& code, const MaximalOrder& order) {
    if (code.d < 1 || code.a < 1 || code.b < 1)
        throw parameter_error("triple_decode: entries must be positive");
    if (gcd_pos(code.a, code.d) != 1)
        throw parameter_error("triple_decode: gcd(a, d) must be 1");
    if (code.a > code.b)
        throw parameter_error("triple_decode: requires a <= b");
    long m = code.modulus();
    if (gcd_pos(m, order.level()) != 1)
        throw parameter_error("triple_decode: m shares a factor with the level");

    Lattice order_lat = hermite_basis(order.basis);
    if (m == 1)
        return make_left_ideal(order_lat, order);

    SplittingData split = split_order(order, m);

    // kernel basis of {r : r . (d, a) = 0 mod m}: {(A, y1), (0, m/A)} with
    // A = gcd(a, m) and (a/A) y1 = -d mod m/A
    long a_mod = code.a % m;
    long d_mod = code.d % m;
    long A = (a_mod == 0) ? m : gcd_pos(a_mod, m);
    long m1 = m / A;
    long y1 = 0;
    if (m1 > 1) {
        long aprime = (a_mod / A) % m1;
        y1 = ((m1 - d_mod % m1) % m1) * inv_mod(aprime, m1) % m1;
    }
    std::array<std::pair<long, long>, 2> row_gens = {{{A % m, y1}, {0, m1 % m}}};

    std::vector<Quat> gens;
    for (auto [u1, u2] : row_gens) {
        for (int row = 0; row < 2; ++row) {
            Mat2 target;
            target.a[row][0] = u1;
            target.a[row][1] = u2;
            std::array<long, 4> coords = splitting_preimage(split, target);
            std::array<Rat, 4> rc;
            for (int k = 0; k < 4; ++k)
                rc[k] = Rat(coords[k]);
            gens.push_back(order.from_order_coords(rc));
        }
    }
    for (const Quat& e : order.basis)
        gens.push_back(Rat(m) * e);

    Lattice lat = hermite_basis(gens);
    return make_left_ideal(std::move(lat), order);
}

bool is_canonical_triple(const TripleCode& code, const MaximalOrder& order) {
    LeftIdeal ideal = triple_decode(code, order);
    IdealClassRep rep = canonical_rep(ideal);
    return rep.integral_form.lattice == ideal.lattice;
}

} // namespace qmint
