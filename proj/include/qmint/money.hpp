#ifndef QMINT_MONEY_HPP
#define QMINT_MONEY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qmint/hecke.hpp"
#include "qmint/ideals.hpp"
#include "qmint/rng.hpp"

namespace qmint {

// Simulated note over ordered pairs of class labels; amplitude index
// (i, j) = i*h + j. Unit L2 norm within 1e-9 after every operation.
struct StateVector {
    long level = 0;
    long h = 0;
    Eigen::VectorXcd amp;
};

void ensure_normalized(const StateVector& state);
double fidelity(const StateVector& x, const StateVector& y);

// Phase entries are stored in micro-units: round(phase * 10^6), which makes
// the 6-decimal serial strings exact.
struct Serial {
    std::vector<std::int64_t> micro;

    bool operator==(const Serial&) const = default;
};

std::string phase_string(std::int64_t micro);
std::int64_t parse_phase(const std::string& s);

struct MintKeys {
    std::vector<std::uint8_t> signing_key;
    std::vector<std::uint8_t> verification_key;
};

MintKeys make_mint_keys(Rng& rng);

// Pluggable detached-signature interface. The default implementation is a
// keyed hash (HMAC-SHA256), so the verification key equals the MAC key.
class SignatureScheme {
  public:
    virtual ~SignatureScheme() = default;
    virtual std::vector<std::uint8_t> sign(const std::vector<std::uint8_t>& key,
                                           const std::string& msg) const = 0;
    virtual bool verify(const std::vector<std::uint8_t>& key, const std::string& msg,
                        const std::vector<std::uint8_t>& sig) const = 0;
};

const SignatureScheme& keyed_hash_scheme();

struct Bill {
    std::string note_id;
    long level = 0;
    std::vector<long> primes;
    Serial serial;
    std::vector<std::uint8_t> signature;
    std::string basis_version;
};

// Move-only claim on a stored note; copying a handle does not compile, and a
// withdrawn or transferred handle is dead.
class NoteHandle {
  public:
    NoteHandle() = default;
    NoteHandle(const NoteHandle&) = delete;
    NoteHandle& operator=(const NoteHandle&) = delete;
    NoteHandle(NoteHandle&& other) noexcept;
    NoteHandle& operator=(NoteHandle&& other) noexcept;

    const std::string& id() const { return id_; }
    bool valid() const { return valid_; }

  private:
    friend class WalletStore;
    explicit NoteHandle(std::string id) : id_(std::move(id)), valid_(true) {}

    std::string id_;
    bool valid_ = false;
};

// Owns note states; all mutations are serialized through one lock.
class WalletStore {
  public:
    NoteHandle deposit(StateVector note);
    NoteHandle deposit_as(std::string id, StateVector note);

    // Removes the note and invalidates the handle.
    StateVector withdraw(NoteHandle& handle);

    // Moves the note into another store; the source handle dies.
    NoteHandle transfer(NoteHandle& handle, WalletStore& dst);

    void update(const std::string& id, const std::function<void(StateVector&)>& fn);
    StateVector snapshot(const std::string& id) const; // diagnostic copy
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;

  private:
    mutable std::mutex mutex_;
    std::map<std::string, StateVector> notes_;
    std::uint64_t counter_ = 0;
};

// Output of the rejection-cascade simulation: the prepared state over the
// full class-pair space, the surviving probability mass, and the surviving
// triples with their class indices.
struct BellPreparation {
    StateVector state;
    double acceptance_probability = 0.0;
    std::vector<std::pair<TripleCode, std::size_t>> survivors;
};

BellPreparation prepare_bell_state(const ClassGroupTable& table);

// Everything a mint or verifier needs for one (level, primes) deployment.
struct ProtocolContext {
    AlgebraParams params;
    MaximalOrder order;
    ClassGroupTable table;
    std::vector<long> primes;
    std::vector<BrandtMatrix> brandt;
    Eigen::MatrixXd cusp;          // h x (h-1)
    std::vector<HeckeOperator> ops;
    EigenSystem eig;
    Eigen::MatrixXd ambient_basis; // h x (h-1), joint eigenvectors in class coordinates
    Eigen::MatrixXd phases;        // (h-1) x primes, scale_p * eigenvalue
    double phase_separation = 0.0; // min pairwise distance of phase rows
    BellPreparation bell;
    std::string basis_version;

    long h() const { return static_cast<long>(table.class_number()); }
    long dim_v() const { return h() - 1; }
};

ProtocolContext make_protocol_context(const AlgebraParams& params, std::vector<long> primes);
// Same, from precomputed data (cache path); Brandt matrices are revalidated.
ProtocolContext make_protocol_context(ClassGroupTable table, std::vector<long> primes,
                                      std::vector<BrandtMatrix> brandt);

// Projects both tensor factors onto the orthogonal complement of the
// weighted all-ones direction and renormalizes.
StateVector project_to_V(const StateVector& state, const ProtocolContext& ctx);

enum class Side { first, second };

// Ideal phase estimation of the operator for primes[prime_index] on one
// tensor factor: samples an eigenvalue cluster with the squared projection
// norm, collapses, and returns the eigenphase in micro-units.
std::int64_t phase_estimate(const ProtocolContext& ctx, std::size_t prime_index, Side side,
                            StateVector& state, Rng& rng);

struct MintResult {
    Bill bill;
    NoteHandle note;
};

// Serial provenance. `approximation` records the rounded measured phases;
// `unique_rounding` additionally checks that the serial is the canonical
// rounding of the collapsed eigenstate's true phase vector (the
// quantum-lightning discipline). With exact phase estimation the two emit
// identical serials.
enum class SerialPolicy { approximation, unique_rounding };

MintResult mint(const ProtocolContext& ctx, const MintKeys& keys, WalletStore& wallet, Rng& rng,
                SerialPolicy policy = SerialPolicy::approximation);

struct VerifyResult {
    bool accepted = false;
};

// Signature check, then phase estimation on both factors for every prime;
// accepts iff each measured phase lies within eps/2 of the serial entry.
// The post-measurement state replaces the wallet note.
VerifyResult verify(const ProtocolContext& ctx, const Bill& bill,
                    const std::vector<std::uint8_t>& verification_key, WalletStore& wallet,
                    Rng& rng);

// Haar-random pure state inside the protocol subspace (both factors in the
// cusp space); used by forgery experiments.
StateVector haar_state_in_V(const ProtocolContext& ctx, Rng& rng);

} // namespace qmint

#endif
