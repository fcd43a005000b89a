#include "qmint/money.hpp"

#include <openssl/crypto.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "qmint/errors.hpp"
#include "qmint/serialize.hpp"

namespace qmint {

namespace {

constexpr double norm_tolerance = 1e-9;
constexpr double acceptance_floor = 1e-3;

Eigen::Map<Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
as_matrix(StateVector& state) {
    return {state.amp.data(), state.h, state.h};
}

Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
as_matrix(const StateVector& state) {
    return {state.amp.data(), state.h, state.h};
}

// clusters of joint eigenvectors sharing the eigenvalue of one operator
struct PhaseCluster {
    std::vector<long> members;
    double phase = 0.0;
    std::int64_t micro = 0;
};

std::vector<PhaseCluster> phase_clusters(const ProtocolContext& ctx, std::size_t prime_index) {
    const long dim = ctx.dim_v();
    std::vector<long> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long x, long y) {
        return ctx.phases(x, prime_index) < ctx.phases(y, prime_index);
    });
    std::vector<PhaseCluster> clusters;
    const double tol = 1e-7;
    for (long v : order) {
        double ph = ctx.phases(v, prime_index);
        if (clusters.empty() || ph - clusters.back().phase > tol) {
            clusters.push_back(PhaseCluster{{v}, ph, 0});
        } else {
            clusters.back().members.push_back(v);
        }
    }
    for (PhaseCluster& c : clusters) {
        double sum = 0.0;
        for (long v : c.members)
            sum += ctx.phases(v, prime_index);
        c.phase = sum / static_cast<double>(c.members.size());
        c.micro = std::llround(c.phase * 1e6);
    }
    return clusters;
}

std::string fresh_note_id(Rng& rng) {
    static const char* digits = "0123456789abcdef";
    std::string id = "note-";
    for (int w = 0; w < 2; ++w) {
        std::uint64_t x = rng.bits();
        for (int k = 15; k >= 0; --k)
            id.push_back(digits[(x >> (4 * k)) & 0xf]);
    }
    return id;
}

class HmacSha256Scheme final : public SignatureScheme {
  public:
    std::vector<std::uint8_t> sign(const std::vector<std::uint8_t>& key,
                                   const std::string& msg) const override {
        if (key.empty())
            throw parameter_error("keyed-hash scheme: empty key material");
        std::vector<std::uint8_t> out(32);
        unsigned int len = 0;
        HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), out.data(), &len);
        out.resize(len);
        return out;
    }

    bool verify(const std::vector<std::uint8_t>& key, const std::string& msg,
                const std::vector<std::uint8_t>& sig) const override {
        std::vector<std::uint8_t> expect = sign(key, msg);
        if (sig.size() != expect.size())
            return false;
        return CRYPTO_memcmp(sig.data(), expect.data(), expect.size()) == 0;
    }
};

} // namespace

void ensure_normalized(const StateVector& state) {
    if (std::abs(state.amp.norm() - 1.0) > norm_tolerance)
        throw invariant_error("state vector lost unit norm");
}

double fidelity(const StateVector& x, const StateVector& y) {
    if (x.level != y.level || x.amp.size() != y.amp.size())
        throw parameter_error("fidelity: incompatible states");
    std::complex<double> ip = x.amp.dot(y.amp);
    return std::norm(ip);
}

std::string phase_string(std::int64_t micro) {
    std::int64_t a = std::llabs(micro);
    std::ostringstream os;
    os << (micro < 0 ? "-" : "") << a / 1000000 << '.';
    std::string frac = std::to_string(a % 1000000);
    os << std::string(6 - frac.size(), '0') << frac;
    return os.str();
}

std::int64_t parse_phase(const std::string& s) {
    bool neg = !s.empty() && s[0] == '-';
    std::size_t start = neg ? 1 : 0;
    std::size_t dot = s.find('.');
    if (dot == std::string::npos || s.size() - dot - 1 != 6)
        throw parameter_error("malformed phase string: '" + s + "'");
    std::int64_t whole = std::stoll(s.substr(start, dot - start));
    std::int64_t frac = std::stoll(s.substr(dot + 1));
    std::int64_t v = whole * 1000000 + frac;
    return neg ? -v : v;
}

MintKeys make_mint_keys(Rng& rng) {
    std::vector<std::uint8_t> key(32);
    for (int k = 0; k < 4; ++k) {
        std::uint64_t x = rng.bits();
        for (int b = 0; b < 8; ++b)
            key[8 * k + b] = static_cast<std::uint8_t>(x >> (8 * b));
    }
    return MintKeys{key, key};
}

const SignatureScheme& keyed_hash_scheme() {
    static HmacSha256Scheme scheme;
    return scheme;
}

NoteHandle::NoteHandle(NoteHandle&& other) noexcept
    : id_(std::move(other.id_)), valid_(other.valid_) {
    other.valid_ = false;
    other.id_.clear();
}

NoteHandle& NoteHandle::operator=(NoteHandle&& other) noexcept {
    id_ = std::move(other.id_);
    valid_ = other.valid_;
    other.valid_ = false;
    other.id_.clear();
    return *this;
}

NoteHandle WalletStore::deposit(StateVector note) {
    ensure_normalized(note);
    std::lock_guard<std::mutex> lock(mutex_);
    std::string id = "note-" + std::to_string(++counter_);
    notes_.emplace(id, std::move(note));
    return NoteHandle(id);
}

NoteHandle WalletStore::deposit_as(std::string id, StateVector note) {
    ensure_normalized(note);
    std::lock_guard<std::mutex> lock(mutex_);
    if (!notes_.emplace(id, std::move(note)).second)
        throw parameter_error("wallet: note id already present: " + id);
    return NoteHandle(std::move(id));
}

StateVector WalletStore::withdraw(NoteHandle& handle) {
    if (!handle.valid())
        throw parameter_error("wallet: handle is no longer valid");
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = notes_.find(handle.id());
    if (it == notes_.end())
        throw parameter_error("wallet: no note " + handle.id());
    StateVector out = std::move(it->second);
    notes_.erase(it);
    handle.valid_ = false;
    return out;
}

NoteHandle WalletStore::transfer(NoteHandle& handle, WalletStore& dst) {
    std::string id = handle.id();
    StateVector note = withdraw(handle);
    return dst.deposit_as(std::move(id), std::move(note));
}

void WalletStore::update(const std::string& id, const std::function<void(StateVector&)>& fn) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = notes_.find(id);
    if (it == notes_.end())
        throw parameter_error("wallet: no note " + id);
    fn(it->second);
    ensure_normalized(it->second);
}

StateVector WalletStore::snapshot(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = notes_.find(id);
    if (it == notes_.end())
        throw parameter_error("wallet: no note " + id);
    return it->second;
}

bool WalletStore::contains(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return notes_.count(id) != 0;
}

std::vector<std::string> WalletStore::ids() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, note] : notes_)
        out.push_back(id);
    return out;
}

BellPreparation prepare_bell_state(const ClassGroupTable& table) {
    const long level = table.params.level;
    const long h = static_cast<long>(table.class_number());
    MaximalOrder order = maximal_order(table.params);
    const long limit = box_limit(level);

    double z = 0.0;
    for (long d = 1; d <= limit; ++d)
        z += 1.0 / (static_cast<double>(d) * d);

    BellPreparation prep;
    std::vector<int> hits(table.class_number(), 0);
    double accepted = 0.0;
    for (long d = 1; d <= limit; ++d) {
        long box = limit / d;
        double cell = 1.0 / (static_cast<double>(d) * d * box * box * z);
        for (long a = 1; a <= box; ++a) {
            if (std::gcd(a, d) != 1)
                continue;
            for (long b = a; b <= box; ++b) {
                TripleCode code{d, a, b};
                if (code.modulus() % level == 0)
                    continue;
                LeftIdeal ideal = triple_decode(code, order);
                IdealClassRep rep = canonical_rep(ideal);
                if (rep.integral_form.lattice != ideal.lattice)
                    continue; // not in canonical form: rejected
                std::size_t idx = table.index_of(rep.canonical_lattice);
                hits[idx] += 1;
                accepted += cell;
                prep.survivors.emplace_back(code, idx);
            }
        }
    }
    for (std::size_t i = 0; i < hits.size(); ++i)
        if (hits[i] != 1)
            throw invariant_error("bell preparation: class " + std::to_string(i) + " hit " +
                                  std::to_string(hits[i]) + " times in the admissible box");
    if (accepted < acceptance_floor || accepted > 1.0)
        throw parameter_error("bell preparation: acceptance probability " +
                              std::to_string(accepted) + " outside [1e-3, 1]");
    prep.acceptance_probability = accepted;

    // after the coordinatewise copy the surviving state is the uniform
    // superposition of matched class pairs
    prep.state.level = level;
    prep.state.h = h;
    prep.state.amp = Eigen::VectorXcd::Zero(h * h);
    const double amp = 1.0 / std::sqrt(static_cast<double>(h));
    for (long i = 0; i < h; ++i)
        prep.state.amp(i * h + i) = amp;
    ensure_normalized(prep.state);
    return prep;
}

ProtocolContext make_protocol_context(const AlgebraParams& params, std::vector<long> primes) {
    ClassGroupTable table = enumerate_classes(params);
    std::vector<BrandtMatrix> brandt;
    for (long p : primes)
        brandt.push_back(brandt_matrix(table, p));
    return make_protocol_context(std::move(table), std::move(primes), std::move(brandt));
}

ProtocolContext make_protocol_context(ClassGroupTable table, std::vector<long> primes,
                                      std::vector<BrandtMatrix> brandt) {
    if (primes.empty())
        throw parameter_error("protocol context: at least one prime required");
    for (long p : primes) {
        if (!is_prime(p))
            throw parameter_error("protocol context: " + std::to_string(p) + " is not prime");
        if (p == table.params.level)
            throw parameter_error("protocol context: prime equal to the level");
    }
    if (std::set<long>(primes.begin(), primes.end()).size() != primes.size())
        throw parameter_error("protocol context: duplicate primes");
    if (brandt.size() != primes.size())
        throw parameter_error("protocol context: Brandt matrix count mismatch");

    const long h = static_cast<long>(table.class_number());
    for (std::size_t k = 0; k < primes.size(); ++k) {
        const BrandtMatrix& m = brandt[k];
        if (m.p != primes[k] || static_cast<long>(m.entries.size()) != h)
            throw invariant_error("protocol context: Brandt matrix shape mismatch");
        for (const auto& row : m.entries)
            if (std::accumulate(row.begin(), row.end(), 0L) != m.p + 1)
                throw invariant_error("protocol context: Brandt row sum violation");
        if (!weighted_symmetric(m, table.weights))
            throw invariant_error("protocol context: weighted symmetry violation");
    }

    ProtocolContext ctx{table.params,
                        maximal_order(table.params),
                        std::move(table),
                        std::move(primes),
                        std::move(brandt),
                        {},
                        {},
                        {},
                        {},
                        {},
                        0.0,
                        {},
                        {}};
    ctx.cusp = cusp_basis(ctx.table.weights);
    for (std::size_t k = 0; k < ctx.primes.size(); ++k)
        ctx.ops.push_back(restrict_and_symmetrize(ctx.brandt[k], ctx.table.weights, ctx.cusp));
    ctx.eig = joint_eigensystem(ctx.ops);
    ctx.ambient_basis = ctx.cusp * ctx.eig.basis;

    const long dim = h - 1;
    ctx.phases.resize(dim, static_cast<long>(ctx.primes.size()));
    for (long v = 0; v < dim; ++v)
        for (std::size_t k = 0; k < ctx.primes.size(); ++k)
            ctx.phases(v, static_cast<long>(k)) =
                ctx.ops[k].scale * ctx.eig.eigenvalues(v, static_cast<long>(k));

    double sep = std::numeric_limits<double>::max();
    for (long x = 0; x < dim; ++x)
        for (long y = x + 1; y < dim; ++y)
            sep = std::min(sep, (ctx.phases.row(x) - ctx.phases.row(y)).norm());
    ctx.phase_separation = sep;
    if (sep / 3.0 < 1e-6)
        throw parameter_error("protocol context: separation below serial precision, add primes");

    ctx.bell = prepare_bell_state(ctx.table);
    ctx.basis_version = basis_version_hash(ctx.table, ctx.primes);
    return ctx;
}

StateVector project_to_V(const StateVector& state, const ProtocolContext& ctx) {
    ensure_normalized(state);
    const long h = ctx.h();
    if (state.h != h || state.level != ctx.params.level)
        throw parameter_error("project_to_V: state does not match the context");
    Eigen::VectorXd u(h);
    for (long i = 0; i < h; ++i)
        u(i) = 1.0 / std::sqrt(static_cast<double>(ctx.table.weights[i]));
    u.normalize();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(h, h) - u * u.transpose();

    StateVector out = state;
    auto m = as_matrix(out);
    Eigen::MatrixXcd projected = proj * m * proj;
    double nrm = projected.norm();
    if (nrm < 1e-9)
        throw parameter_error("project_to_V: zero norm after projection");
    projected /= nrm;
    m = projected;
    ensure_normalized(out);
    return out;
}

std::int64_t phase_estimate(const ProtocolContext& ctx, std::size_t prime_index, Side side,
                            StateVector& state, Rng& rng) {
    if (prime_index >= ctx.primes.size())
        throw parameter_error("phase_estimate: prime index out of range");
    ensure_normalized(state);
    std::vector<PhaseCluster> clusters = phase_clusters(ctx, prime_index);

    auto m = as_matrix(state);
    Eigen::MatrixXcd psi = m;

    std::vector<double> weights(clusters.size(), 0.0);
    std::vector<Eigen::MatrixXcd> collapsed(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& members = clusters[c].members;
        Eigen::MatrixXd basis(ctx.h(), members.size());
        for (std::size_t t = 0; t < members.size(); ++t)
            basis.col(static_cast<long>(t)) = ctx.ambient_basis.col(members[t]);
        Eigen::MatrixXd proj = basis * basis.transpose();
        collapsed[c] = (side == Side::first) ? (proj * psi).eval() : (psi * proj).eval();
        weights[c] = collapsed[c].squaredNorm();
    }
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total < 1e-12)
        throw parameter_error("phase_estimate: state has no component in the cusp space");

    double draw = rng.uniform() * total;
    std::size_t chosen = clusters.size() - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        acc += weights[c];
        if (draw < acc) {
            chosen = c;
            break;
        }
    }

    Eigen::MatrixXcd post = collapsed[chosen] / std::sqrt(weights[chosen]);
    m = post;
    ensure_normalized(state);
    return clusters[chosen].micro;
}

MintResult mint(const ProtocolContext& ctx, const MintKeys& keys, WalletStore& wallet, Rng& rng,
                SerialPolicy policy) {
    StateVector state = project_to_V(ctx.bell.state, ctx);
    Serial serial;
    for (std::size_t k = 0; k < ctx.primes.size(); ++k)
        serial.micro.push_back(phase_estimate(ctx, k, Side::first, state, rng));

    if (policy == SerialPolicy::unique_rounding) {
        // the serial must be the canonical rounding of some eigenstate's
        // exact phase vector
        bool matched = false;
        for (long v = 0; v < ctx.dim_v() && !matched; ++v) {
            bool all = true;
            for (std::size_t k = 0; k < ctx.primes.size(); ++k)
                all = all && std::llround(ctx.phases(v, static_cast<long>(k)) * 1e6) ==
                                 serial.micro[k];
            matched = all;
        }
        if (!matched)
            throw invariant_error("mint: serial is not a canonical eigenphase rounding");
    }

    Bill bill;
    bill.note_id = fresh_note_id(rng);
    bill.level = ctx.params.level;
    bill.primes = ctx.primes;
    bill.serial = serial;
    bill.basis_version = ctx.basis_version;
    bill.signature =
        keyed_hash_scheme().sign(keys.signing_key, signing_message(bill.level, bill.primes, serial));

    NoteHandle handle = wallet.deposit_as(bill.note_id, std::move(state));
    return MintResult{std::move(bill), std::move(handle)};
}

VerifyResult verify(const ProtocolContext& ctx, const Bill& bill,
                    const std::vector<std::uint8_t>& verification_key, WalletStore& wallet,
                    Rng& rng) {
    if (bill.level != ctx.params.level || bill.primes != ctx.primes)
        throw parameter_error("verify: bill does not match the protocol context");
    if (!bill.basis_version.empty() && bill.basis_version != ctx.basis_version)
        throw parameter_error("verify: basis version mismatch");
    if (bill.serial.micro.size() != ctx.primes.size())
        throw parameter_error("verify: serial length mismatch");

    if (!keyed_hash_scheme().verify(verification_key,
                                    signing_message(bill.level, bill.primes, bill.serial),
                                    bill.signature))
        return VerifyResult{false};

    const double window = ctx.phase_separation / 2.0;
    bool ok = true;
    wallet.update(bill.note_id, [&](StateVector& note) {
        for (std::size_t k = 0; k < ctx.primes.size() && ok; ++k) {
            for (Side side : {Side::first, Side::second}) {
                std::int64_t measured = phase_estimate(ctx, k, side, note, rng);
                double dist =
                    std::abs(static_cast<double>(measured - bill.serial.micro[k])) * 1e-6;
                if (dist > window) {
                    ok = false;
                    break;
                }
            }
        }
    });
    return VerifyResult{ok};
}

StateVector haar_state_in_V(const ProtocolContext& ctx, Rng& rng) {
    const long dim = ctx.dim_v();
    Eigen::MatrixXcd g(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j)
            g(i, j) = std::complex<double>(rng.gauss(), rng.gauss());
    Eigen::MatrixXcd psi = ctx.ambient_basis * g * ctx.ambient_basis.transpose();
    psi /= psi.norm();

    StateVector out;
    out.level = ctx.params.level;
    out.h = ctx.h();
    out.amp = Eigen::VectorXcd::Zero(out.h * out.h);
    auto m = as_matrix(out);
    m = psi;
    ensure_normalized(out);
    return out;
}

} // namespace qmint
