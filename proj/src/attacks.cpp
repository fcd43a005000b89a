#include "qmint/attacks.hpp"

#include <cmath>
#include <complex>

#include "qmint/errors.hpp"

namespace qmint {

AttackReport birthday_attack(const ProtocolContext& ctx, const MintKeys& keys, long budget,
                             long trials, std::uint64_t seed) {
    if (budget < 1 || trials < 1)
        throw parameter_error("birthday_attack: budget and trials must be positive");

    AttackReport report;
    report.budget = budget;
    report.trials = trials;
    report.seed = seed;

    Rng root(seed);
    const double window = ctx.phase_separation / 2.0;
    for (long t = 0; t < trials; ++t) {
        Rng rng = root.derive(static_cast<std::uint64_t>(t));
        WalletStore wallet;
        std::vector<Bill> bills;
        std::vector<NoteHandle> notes;
        bills.reserve(budget);
        for (long k = 0; k < budget; ++k) {
            MintResult minted = mint(ctx, keys, wallet, rng);
            bills.push_back(std::move(minted.bill));
            notes.push_back(std::move(minted.note));
        }
        bool hit = false;
        for (long i = 0; i < budget; ++i) {
            for (long j = i + 1; j < budget; ++j) {
                double dist2 = 0.0;
                for (std::size_t k = 0; k < ctx.primes.size(); ++k) {
                    double d =
                        static_cast<double>(bills[i].serial.micro[k] - bills[j].serial.micro[k]) *
                        1e-6;
                    dist2 += d * d;
                }
                double dist = std::sqrt(dist2);
                if (dist > window)
                    continue;
                hit = true;
                // a matched pair yields two identical eigenstate pairs after
                // verification: the Problem-1 state across four registers
                if (!verify(ctx, bills[i], keys.verification_key, wallet, rng).accepted ||
                    !verify(ctx, bills[j], keys.verification_key, wallet, rng).accepted)
                    throw invariant_error("birthday_attack: colliding bill failed verification");
                double fid = fidelity(wallet.snapshot(bills[i].note_id),
                                      wallet.snapshot(bills[j].note_id));
                report.collisions.push_back(CollisionRecord{t, i, j, dist, fid});
            }
        }
        if (hit)
            ++report.successes;
    }
    return report;
}

TriorthResult triorthogonality_experiment(long dim, long trials, std::uint64_t seed,
                                          TriorthMode mode) {
    if (dim < 1 || trials < 1)
        throw parameter_error("triorthogonality_experiment: dim and trials must be positive");

    Rng rng(seed);
    const long n = dim;
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXcd phi(n * n * n);
    for (long t = 0; t < trials; ++t) {
        // Haar basis: QR of a complex Gaussian matrix with phase-fixed R diagonal
        Eigen::MatrixXcd g(n, n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                g(i, j) = std::complex<double>(rng.gauss(), rng.gauss());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
        Eigen::MatrixXcd q = qr.householderQ();
        Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (long j = 0; j < n; ++j) {
            std::complex<double> diag = r(j, j);
            double mag = std::abs(diag);
            if (mag > 1e-300)
                q.col(j) *= diag / mag;
        }

        if (mode == TriorthMode::haar_state) {
            for (long k = 0; k < phi.size(); ++k)
                phi(k) = std::complex<double>(rng.gauss(), rng.gauss());
            phi /= phi.norm();
        } else {
            phi.setZero();
            phi(0) = 1.0; // e1 x e1 x e1
        }

        double value = 0.0;
        for (long i = 0; i < n; ++i) {
            // <iii|phi> contracted one tensor leg at a time
            std::complex<double> amp = 0.0;
            for (long j = 0; j < n; ++j) {
                std::complex<double> bj = std::conj(q(j, i));
                if (bj == std::complex<double>(0.0, 0.0))
                    continue;
                for (long k = 0; k < n; ++k) {
                    std::complex<double> bk = std::conj(q(k, i));
                    if (bk == std::complex<double>(0.0, 0.0))
                        continue;
                    std::complex<double> partial = 0.0;
                    for (long l = 0; l < n; ++l)
                        partial += std::conj(q(l, i)) * phi((j * n + k) * n + l);
                    amp += bj * bk * partial;
                }
            }
            value += std::norm(amp);
        }
        sum += value;
        sum_sq += value * value;
    }

    TriorthResult res;
    res.mean = sum / static_cast<double>(trials);
    double variance = sum_sq / static_cast<double>(trials) - res.mean * res.mean;
    if (variance < 0.0)
        variance = 0.0;
    res.std_error = std::sqrt(variance / static_cast<double>(trials));
    return res;
}

} // namespace qmint
