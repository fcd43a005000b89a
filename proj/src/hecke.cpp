#include "qmint/hecke.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qmint/errors.hpp"
#include "qmint/rng.hpp"

namespace qmint {

namespace {

// coordinates of x in the ideal's basis, reduced mod p; x must lie in the ideal
std::array<long, 4> ideal_coords_mod(const Mat4q& inv_basis, const Quat& x, long p) {
    Vec4q c = row_times({x.a, x.b, x.c, x.d}, inv_basis);
    std::array<long, 4> out;
    for (int k = 0; k < 4; ++k) {
        Int v = to_int(c[k]);
        out[k] = static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), p));
    }
    return out;
}

long det4_mod(const std::array<std::array<long, 4>, 4>& m, long p) {
    // Laplace over the first row with 3x3 minors; entries are < p <= small
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) -> long {
        long d = m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
                 m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
                 m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
        return ((d % p) + p) % p;
    };
    long det = 0;
    long sign = 1;
    for (int c = 0; c < 4; ++c) {
        int cols[3];
        int t = 0;
        for (int cc = 0; cc < 4; ++cc)
            if (cc != c)
                cols[t++] = cc;
        det = (det + sign * m[0][c] * det3(1, 2, 3, cols[0], cols[1], cols[2])) % p;
        sign = -sign;
    }
    return ((det % p) + p) % p;
}

Mat4q quat_rows(const std::array<Quat, 4>& basis) {
    Mat4q m;
    for (int r = 0; r < 4; ++r)
        m[r] = {basis[r].a, basis[r].b, basis[r].c, basis[r].d};
    return m;
}

} // namespace

std::vector<LeftIdeal> p_neighbors(const IdealClassRep& rep, long p) {
    const MaximalOrder& order = rep.integral_form.order;
    if (!is_prime(p))
        throw parameter_error("p_neighbors: p must be prime");
    if (p == order.level())
        throw parameter_error("p_neighbors: p equal to the level is rejected");

    const Lattice& ideal = rep.integral_form.lattice;
    Mat4q inv_basis = inverse4(quat_rows(ideal.basis));
    SplittingData split = split_order(order, p);

    // cyclic generator g of I/pI: the action matrix e_k -> e_k * g must be
    // invertible mod p
    Quat g = Quat::zero(order.level());
    bool found = false;
    std::vector<Quat> gen_candidates(ideal.basis.begin(), ideal.basis.end());
    for (int i = 0; i < 4 && !found; ++i)
        for (int j = i + 1; j < 4; ++j)
            gen_candidates.push_back(ideal.basis[i] + ideal.basis[j]);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k)
                gen_candidates.push_back(ideal.basis[i] + ideal.basis[j] + ideal.basis[k]);
    gen_candidates.push_back(ideal.basis[0] + ideal.basis[1] + ideal.basis[2] + ideal.basis[3]);
    for (const Quat& cand : gen_candidates) {
        std::array<std::array<long, 4>, 4> action;
        for (int k = 0; k < 4; ++k)
            action[k] = ideal_coords_mod(inv_basis, order.basis[k] * cand, p);
        if (det4_mod(action, p) != 0) {
            g = cand;
            found = true;
            break;
        }
    }
    if (!found)
        throw invariant_error("p_neighbors: no cyclic generator of I/pI found");

    // projective points (1, t) and (0, 1); kernel row of (v1, v2) is (v2, -v1)
    std::vector<std::pair<long, long>> points;
    for (long t = 0; t < p; ++t)
        points.emplace_back(1, t);
    points.emplace_back(0, 1);

    std::vector<LeftIdeal> neighbors;
    neighbors.reserve(points.size());
    for (auto [v1, v2] : points) {
        long r1 = v2 % p;
        long r2 = ((-v1) % p + p) % p;
        std::vector<Quat> gens;
        for (int row = 0; row < 2; ++row) {
            Mat2 target;
            target.a[row][0] = r1;
            target.a[row][1] = r2;
            std::array<long, 4> coords = splitting_preimage(split, target);
            std::array<Rat, 4> rc;
            for (int k = 0; k < 4; ++k)
                rc[k] = Rat(coords[k]);
            gens.push_back(order.from_order_coords(rc) * g);
        }
        for (const Quat& b : ideal.basis)
            gens.push_back(Rat(p) * b);
        Lattice lat = hermite_basis(gens);
        if (lattice_index(lat, ideal) != Int(p) * p)
            throw invariant_error("p_neighbors: neighbor index is not p^2");
        neighbors.push_back(make_left_ideal(std::move(lat), order));
    }
    return neighbors;
}

BrandtMatrix brandt_matrix(const ClassGroupTable& table, long p) {
    if (p == table.params.level)
        throw parameter_error("brandt_matrix: p must not divide the level");
    std::size_t h = table.class_number();
    BrandtMatrix m;
    m.p = p;
    m.entries.assign(h, std::vector<long>(h, 0));
    for (std::size_t i = 0; i < h; ++i) {
        for (const LeftIdeal& nb : p_neighbors(table.reps[i], p)) {
            IdealClassRep r = canonical_rep(nb);
            m.entries[i][table.index_of(r.canonical_lattice)] += 1;
        }
        long sum = std::accumulate(m.entries[i].begin(), m.entries[i].end(), 0L);
        if (sum != p + 1)
            throw invariant_error("brandt_matrix: row sum is not p + 1");
    }
    return m;
}

bool weighted_symmetric(const BrandtMatrix& m, const std::vector<long>& weights) {
    std::size_t h = m.entries.size();
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j)
            if (weights[j] * m.entries[i][j] != weights[i] * m.entries[j][i])
                return false;
    return true;
}

bool unweighted_symmetric(const BrandtMatrix& m) {
    std::size_t h = m.entries.size();
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j)
            if (m.entries[i][j] != m.entries[j][i])
                return false;
    return true;
}

Eigen::MatrixXd cusp_basis(const std::vector<long>& weights) {
    const long h = static_cast<long>(weights.size());
    if (h < 2)
        throw parameter_error("cusp_basis: need at least two classes");
    Eigen::VectorXd u(h);
    for (long i = 0; i < h; ++i)
        u(i) = 1.0 / std::sqrt(static_cast<double>(weights[i]));
    u.normalize();
    // Householder reflection sending u to e_0; remaining columns span u-perp
    Eigen::VectorXd v = u;
    v(0) -= 1.0;
    Eigen::MatrixXd refl = Eigen::MatrixXd::Identity(h, h);
    double vn = v.squaredNorm();
    if (vn > 1e-28)
        refl -= (2.0 / vn) * (v * v.transpose());
    return refl.rightCols(h - 1);
}

double unitarization_scale(long p) {
    long r = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(p))));
    while (r * r < p)
        ++r;
    while ((r - 1) * (r - 1) >= p)
        --r;
    return 1.0 / static_cast<double>(2 * r + 2);
}

HeckeOperator restrict_and_symmetrize(const BrandtMatrix& m, const std::vector<long>& weights,
                                      const Eigen::MatrixXd& cusp) {
    if (!weighted_symmetric(m, weights))
        throw invariant_error("restrict_and_symmetrize: weighted symmetry violated");
    const long h = static_cast<long>(weights.size());
    Eigen::MatrixXd s(h, h);
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < h; ++j)
            s(i, j) = static_cast<double>(m.entries[i][j]) *
                      std::sqrt(static_cast<double>(weights[j]) / static_cast<double>(weights[i]));
    Eigen::MatrixXd restricted = cusp.transpose() * s * cusp;
    restricted = 0.5 * (restricted + restricted.transpose().eval());
    return HeckeOperator{m.p, std::move(restricted), unitarization_scale(m.p)};
}

namespace {

struct Cluster {
    long begin;
    long end; // half-open column range in the running basis
};

} // namespace

EigenSystem joint_eigensystem(const std::vector<HeckeOperator>& ops) {
    if (ops.empty())
        throw parameter_error("joint_eigensystem: no operators");
    const long n = ops.front().matrix.rows();
    for (const HeckeOperator& op : ops)
        if (op.matrix.rows() != n || op.matrix.cols() != n)
            throw parameter_error("joint_eigensystem: dimension mismatch");

    // seeded random combination puts the spectrum in generic position
    Rng rng(0x2bd6aa1dULL);
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(n, n);
    for (const HeckeOperator& op : ops)
        combo += (1.0 + rng.uniform()) * op.matrix;

    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
    std::vector<Cluster> clusters{{0, n}};

    std::vector<const Eigen::MatrixXd*> stages;
    stages.push_back(&combo);
    for (const HeckeOperator& op : ops)
        stages.push_back(&op.matrix);

    const double gap_tol = 1e-6;
    for (const Eigen::MatrixXd* stage : stages) {
        std::vector<Cluster> next;
        for (const Cluster& cl : clusters) {
            long w = cl.end - cl.begin;
            if (w == 1) {
                next.push_back(cl);
                continue;
            }
            Eigen::MatrixXd q = basis.middleCols(cl.begin, w);
            Eigen::MatrixXd block = q.transpose() * (*stage) * q;
            block = 0.5 * (block + block.transpose().eval());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
            basis.middleCols(cl.begin, w) = q * solver.eigenvectors();
            const Eigen::VectorXd& vals = solver.eigenvalues();
            long start = cl.begin;
            for (long k = 1; k < w; ++k) {
                if (vals(k) - vals(k - 1) > gap_tol) {
                    next.push_back({start, cl.begin + k});
                    start = cl.begin + k;
                }
            }
            next.push_back({start, cl.end});
        }
        clusters = std::move(next);
    }

    EigenSystem sys;
    sys.basis = basis;
    sys.eigenvalues.resize(n, static_cast<long>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
        sys.primes.push_back(ops[k].p);
        for (long v = 0; v < n; ++v) {
            Eigen::VectorXd vec = basis.col(v);
            double lambda = vec.dot(ops[k].matrix * vec);
            double residual = (ops[k].matrix * vec - lambda * vec).norm();
            if (residual > 1e-9)
                throw invariant_error("joint_eigensystem: residual above tolerance");
            sys.eigenvalues(v, static_cast<long>(k)) = lambda;
        }
    }

    // canonical order: sort vectors by eigenvalue tuple
    std::vector<long> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](long x, long y) {
        for (long k = 0; k < sys.eigenvalues.cols(); ++k) {
            double dx = sys.eigenvalues(x, k), dy = sys.eigenvalues(y, k);
            if (std::abs(dx - dy) > 1e-9)
                return dx < dy;
        }
        return false;
    });
    Eigen::MatrixXd sorted_basis(n, n);
    Eigen::MatrixXd sorted_vals(n, sys.eigenvalues.cols());
    for (long v = 0; v < n; ++v) {
        sorted_basis.col(v) = sys.basis.col(perm[v]);
        sorted_vals.row(v) = sys.eigenvalues.row(perm[v]);
    }
    sys.basis = std::move(sorted_basis);
    sys.eigenvalues = std::move(sorted_vals);

    if (n == 1) {
        sys.separation = std::numeric_limits<double>::max();
        return sys;
    }
    double sep = std::numeric_limits<double>::max();
    for (long x = 0; x < n; ++x)
        for (long y = x + 1; y < n; ++y)
            sep = std::min(sep, (sys.eigenvalues.row(x) - sys.eigenvalues.row(y)).norm());
    if (sep < 1e-7)
        throw parameter_error("joint_eigensystem: insufficient separation, add primes");
    sys.separation = sep;
    return sys;
}

} // namespace qmint
