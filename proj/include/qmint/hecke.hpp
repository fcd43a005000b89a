#ifndef QMINT_HECKE_HPP
#define QMINT_HECKE_HPP

#include <Eigen/Dense>
#include <vector>

#include "qmint/ideals.hpp"
#include "qmint/splitting.hpp"

namespace qmint {

// The p+1 left ideals J with p*I inside J inside I and I/J = (Z/p)^2,
// one per projective point mod p.
std::vector<LeftIdeal> p_neighbors(const IdealClassRep& rep, long p);

// Integer neighbor-count matrix: entries[i][j] = number of neighbors of
// rep i whose canonical representative is rep j. Every row sums to p + 1.
struct BrandtMatrix {
    long p = 0;
    std::vector<std::vector<long>> entries;
};

BrandtMatrix brandt_matrix(const ClassGroupTable& table, long p);

// Exact weighted symmetry w_j * a(i,j) = w_i * a(j,i).
bool weighted_symmetric(const BrandtMatrix& m, const std::vector<long>& weights);
// The plain transpose identity a(i,j) = a(j,i); reported, not relied on.
bool unweighted_symmetric(const BrandtMatrix& m);

// Orthonormal basis (columns) of the orthogonal complement of the weighted
// all-ones direction (1/sqrt(w_i))_i; built once per table and reused.
Eigen::MatrixXd cusp_basis(const std::vector<long>& weights);

// Symmetrized restriction to the cusp subspace, with the angle scale used
// for unitarization exp(i * scale * matrix).
struct HeckeOperator {
    long p = 0;
    Eigen::MatrixXd matrix;
    double scale = 0.0;
};

// 1 / (2 ceil(sqrt(p)) + 2): keeps every eigenphase inside (-1, 1), so the
// phase -> eigenvalue map never wraps.
double unitarization_scale(long p);

HeckeOperator restrict_and_symmetrize(const BrandtMatrix& m, const std::vector<long>& weights,
                                      const Eigen::MatrixXd& cusp);

// Joint eigenbasis of a commuting family, with one eigenvalue vector per
// basis vector and the minimal pairwise distance between those vectors.
struct EigenSystem {
    std::vector<long> primes;
    Eigen::MatrixXd basis;       // columns are joint eigenvectors
    Eigen::MatrixXd eigenvalues; // row v, column k: eigenvalue of ops[k] on vector v
    double separation = 0.0;
};

// Diagonalizes a seeded random combination and refines clusters on each
// operator until all residuals are at most 1e-9. Throws parameter_error
// ("insufficient separation") when two eigenvalue vectors coincide.
EigenSystem joint_eigensystem(const std::vector<HeckeOperator>& ops);

} // namespace qmint

#endif
