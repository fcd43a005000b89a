#include <doctest.h>

#include <cmath>
#include <type_traits>

#include "qmint/attacks.hpp"
#include "qmint/errors.hpp"
#include "qmint/money.hpp"
#include "qmint/serialize.hpp"

using namespace qmint;

namespace {

const ProtocolContext& ctx11() {
    static ProtocolContext ctx = make_protocol_context(AlgebraParams(11), {2, 3});
    return ctx;
}

const ProtocolContext& ctx23() {
    static ProtocolContext ctx = make_protocol_context(AlgebraParams(23), {2, 3});
    return ctx;
}

StateVector direct_uniform_bell(const ProtocolContext& ctx) {
    StateVector s;
    s.level = ctx.params.level;
    s.h = ctx.h();
    s.amp = Eigen::VectorXcd::Zero(s.h * s.h);
    for (long i = 0; i < s.h; ++i)
        s.amp(i * s.h + i) = 1.0 / std::sqrt(double(s.h));
    return s;
}

// eigenstate pair |v>|v> in ambient coordinates
StateVector eigenstate_pair(const ProtocolContext& ctx, long v) {
    StateVector s;
    s.level = ctx.params.level;
    s.h = ctx.h();
    Eigen::VectorXd e = ctx.ambient_basis.col(v);
    Eigen::MatrixXd psi = e * e.transpose();
    s.amp = Eigen::VectorXcd::Zero(s.h * s.h);
    for (long i = 0; i < s.h; ++i)
        for (long j = 0; j < s.h; ++j)
            s.amp(i * s.h + j) = psi(i, j);
    return s;
}

Serial serial_of_row(const ProtocolContext& ctx, long v) {
    Serial s;
    for (long k = 0; k < ctx.phases.cols(); ++k)
        s.micro.push_back(std::llround(ctx.phases(v, k) * 1e6));
    return s;
}

} // namespace

TEST_SUITE("money") {

TEST_CASE("bell preparation equals the direct uniform construction") {
    for (const ProtocolContext* ctx : {&ctx11(), &ctx23()}) {
        StateVector direct = direct_uniform_bell(*ctx);
        REQUIRE(ctx->bell.state.amp.size() == direct.amp.size());
        for (long k = 0; k < direct.amp.size(); ++k)
            CHECK(std::abs(ctx->bell.state.amp(k) - direct.amp(k)) <= 1e-9);
        CHECK(ctx->bell.acceptance_probability >= 1e-3);
        CHECK(ctx->bell.acceptance_probability <= 1.0);
        // one surviving triple per class, all inside the box
        CHECK(ctx->bell.survivors.size() == ctx->table.class_number());
        long limit = box_limit(ctx->params.level);
        for (const auto& [code, idx] : ctx->bell.survivors) {
            CHECK(code.d * code.a <= limit);
            CHECK(code.d * code.b <= limit);
        }
    }
}

TEST_CASE("projection to the cusp pair space") {
    const ProtocolContext& ctx = ctx23();
    StateVector bell = ctx.bell.state;
    StateVector proj = project_to_V(bell, ctx);

    // maximally entangled on a 2-dimensional space: Schmidt values 1/sqrt(2)
    Eigen::MatrixXcd psi(3, 3);
    for (long i = 0; i < 3; ++i)
        for (long j = 0; j < 3; ++j)
            psi(i, j) = proj.amp(i * 3 + j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi);
    REQUIRE(svd.singularValues().size() == 3);
    CHECK(svd.singularValues()(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(svd.singularValues()(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(svd.singularValues()(2) == doctest::Approx(0.0).epsilon(1e-9));

    // idempotence on a state already inside the subspace
    StateVector again = project_to_V(proj, ctx);
    CHECK(fidelity(proj, again) == doctest::Approx(1.0).epsilon(1e-12));

    // the weighted all-ones pair state projects to zero
    StateVector ones;
    ones.level = ctx.params.level;
    ones.h = ctx.h();
    Eigen::VectorXd u(3);
    for (long i = 0; i < 3; ++i)
        u(i) = 1.0 / std::sqrt(double(ctx.table.weights[i]));
    u.normalize();
    Eigen::MatrixXd uu = u * u.transpose();
    ones.amp = Eigen::VectorXcd::Zero(9);
    for (long i = 0; i < 3; ++i)
        for (long j = 0; j < 3; ++j)
            ones.amp(i * 3 + j) = uu(i, j);
    CHECK_THROWS_AS(project_to_V(ones, ctx), parameter_error);
}

TEST_CASE("phase estimation at 11: deterministic value, state untouched") {
    const ProtocolContext& ctx = ctx11();
    Rng rng(5);
    StateVector state = project_to_V(ctx.bell.state, ctx);
    StateVector before = state;
    std::int64_t micro = phase_estimate(ctx, 0, Side::first, state, rng);
    CHECK(micro == -333333); // (1/6) * (-2) rounded at 6 decimals
    CHECK(fidelity(before, state) == doctest::Approx(1.0).epsilon(1e-12));
    std::int64_t micro3 = phase_estimate(ctx, 1, Side::first, state, rng);
    CHECK(micro3 == -166667); // (1/6) * (-1)
}

TEST_CASE("phase estimation is stable on eigenstates") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(17);
    for (long v = 0; v < 2; ++v) {
        StateVector state = eigenstate_pair(ctx, v);
        for (std::size_t k = 0; k < ctx.primes.size(); ++k) {
            StateVector before = state;
            std::int64_t micro = phase_estimate(ctx, k, Side::first, state, rng);
            CHECK(micro == std::llround(ctx.phases(v, static_cast<long>(k)) * 1e6));
            CHECK(fidelity(before, state) >= 1.0 - 1e-12);
            std::int64_t micro2 = phase_estimate(ctx, k, Side::second, state, rng);
            CHECK(micro2 == micro);
        }
    }
}

TEST_CASE("phase estimation on the Bell state is an unbiased coin at 23") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(99);
    int first = 0;
    const int trials = 1000;
    std::int64_t expect0 = std::llround(ctx.phases(0, 0) * 1e6);
    for (int t = 0; t < trials; ++t) {
        StateVector state = project_to_V(ctx.bell.state, ctx);
        std::int64_t micro = phase_estimate(ctx, 0, Side::first, state, rng);
        if (micro == expect0)
            ++first;
    }
    double freq = double(first) / trials;
    CHECK(freq > 0.45);
    CHECK(freq < 0.55);
}

TEST_CASE("mint then verify accepts and leaves the note intact") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(2024);
    MintKeys keys = make_mint_keys(rng);
    WalletStore wallet;
    MintResult res = mint(ctx, keys, wallet, rng);
    StateVector before = wallet.snapshot(res.bill.note_id);

    VerifyResult v = verify(ctx, res.bill, keys.verification_key, wallet, rng);
    CHECK(v.accepted);
    CHECK(fidelity(before, wallet.snapshot(res.bill.note_id)) >= 1.0 - 1e-9);

    // verification idempotence
    VerifyResult v2 = verify(ctx, res.bill, keys.verification_key, wallet, rng);
    CHECK(v2.accepted);
    CHECK(fidelity(before, wallet.snapshot(res.bill.note_id)) >= 1.0 - 1e-9);
}

TEST_CASE("minted serials at 11 are the unique eigenphase rounding") {
    const ProtocolContext& ctx = ctx11();
    Rng rng(31);
    MintKeys keys = make_mint_keys(rng);
    WalletStore wallet;
    for (int t = 0; t < 20; ++t) {
        MintResult res = mint(ctx, keys, wallet, rng, SerialPolicy::unique_rounding);
        CHECK(res.bill.serial == serial_of_row(ctx, 0));
    }
}

TEST_CASE("mint samples eigenstates uniformly at 23") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(404);
    MintKeys keys = make_mint_keys(rng);
    Serial s0 = serial_of_row(ctx, 0);
    Serial s1 = serial_of_row(ctx, 1);
    int count0 = 0, count1 = 0;
    for (int t = 0; t < 200; ++t) {
        WalletStore wallet;
        MintResult res = mint(ctx, keys, wallet, rng);
        if (res.bill.serial == s0)
            ++count0;
        else if (res.bill.serial == s1)
            ++count1;
    }
    CHECK(count0 + count1 == 200);
    CHECK(count0 >= 80); // 1/2 +- 0.1
    CHECK(count0 <= 120);
}

TEST_CASE("serials of distinct eigenstates stay far apart") {
    for (const ProtocolContext* ctx : {&ctx23()}) {
        long dim = ctx->dim_v();
        double eps = ctx->phase_separation;
        for (long x = 0; x < dim; ++x)
            for (long y = x + 1; y < dim; ++y) {
                Serial sx = serial_of_row(*ctx, x);
                Serial sy = serial_of_row(*ctx, y);
                double dist2 = 0;
                for (std::size_t k = 0; k < sx.micro.size(); ++k) {
                    double d = double(sx.micro[k] - sy.micro[k]) * 1e-6;
                    dist2 += d * d;
                }
                CHECK(std::sqrt(dist2) > eps / 2 + eps / 3);
            }
    }
}

TEST_CASE("tampered bills always reject") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(555);
    MintKeys keys = make_mint_keys(rng);
    WalletStore wallet;
    MintResult res = mint(ctx, keys, wallet, rng);

    // flipped signature byte
    Bill bad_sig = res.bill;
    bad_sig.signature[0] ^= 0x01;
    CHECK(!verify(ctx, bad_sig, keys.verification_key, wallet, rng).accepted);

    // perturbed serial without re-signing: the signature catches it
    Bill bad_serial = res.bill;
    bad_serial.serial.micro[0] += std::llround(ctx.phase_separation * 1e6);
    CHECK(!verify(ctx, bad_serial, keys.verification_key, wallet, rng).accepted);

    // perturbed serial re-signed by a corrupt mint: the phase window catches it
    Bill resigned = bad_serial;
    resigned.signature = keyed_hash_scheme().sign(
        keys.signing_key, signing_message(resigned.level, resigned.primes, resigned.serial));
    CHECK(!verify(ctx, resigned, keys.verification_key, wallet, rng).accepted);

    // the honest bill still verifies afterwards
    CHECK(verify(ctx, res.bill, keys.verification_key, wallet, rng).accepted);
}

TEST_CASE("a random note validates against a fixed serial at the projection rate") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(808);
    MintKeys keys = make_mint_keys(rng);
    Serial target = serial_of_row(ctx, 0);
    Bill bill;
    bill.level = ctx.params.level;
    bill.primes = ctx.primes;
    bill.serial = target;
    bill.basis_version = ctx.basis_version;
    bill.signature =
        keyed_hash_scheme().sign(keys.signing_key, signing_message(bill.level, bill.primes, target));

    const int trials = 1000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
        WalletStore wallet;
        StateVector random_note = haar_state_in_V(ctx, rng);
        NoteHandle h = wallet.deposit(random_note);
        bill.note_id = h.id();
        if (verify(ctx, bill, keys.verification_key, wallet, rng).accepted)
            ++accepted;
    }
    double rate = double(accepted) / trials;
    CHECK(rate > 0.25 - 0.1);
    CHECK(rate < 0.25 + 0.1);
}

TEST_CASE("signature scheme round trip and bit flips") {
    Rng rng(1);
    MintKeys keys = make_mint_keys(rng);
    const SignatureScheme& scheme = keyed_hash_scheme();
    std::string msg = "serial payload";
    auto sig = scheme.sign(keys.signing_key, msg);
    CHECK(scheme.verify(keys.verification_key, msg, sig));

    std::string flipped = msg;
    flipped[0] ^= 0x20;
    CHECK(!scheme.verify(keys.verification_key, flipped, sig));

    auto bad = sig;
    bad[5] ^= 0x80;
    CHECK(!scheme.verify(keys.verification_key, msg, bad));

    CHECK_THROWS_AS(scheme.sign({}, msg), parameter_error);
}

TEST_CASE("wallet enforces single ownership") {
    static_assert(!std::is_copy_constructible_v<NoteHandle>);
    static_assert(!std::is_copy_assignable_v<NoteHandle>);

    const ProtocolContext& ctx = ctx11();
    WalletStore wallet;
    NoteHandle h = wallet.deposit(direct_uniform_bell(ctx));
    CHECK(h.valid());

    WalletStore other;
    NoteHandle moved = wallet.transfer(h, other);
    CHECK(!h.valid());
    CHECK(moved.valid());
    CHECK(!wallet.contains(moved.id()));
    CHECK(other.contains(moved.id()));

    // withdrawing through a dead handle is an error
    CHECK_THROWS_AS(wallet.withdraw(h), parameter_error);

    StateVector note = other.withdraw(moved);
    CHECK(!moved.valid());
    CHECK_THROWS_AS(other.withdraw(moved), parameter_error);
    (void)note;
}

TEST_CASE("bill and wallet files round trip") {
    const ProtocolContext& ctx = ctx23();
    Rng rng(7777);
    MintKeys keys = make_mint_keys(rng);
    WalletStore wallet;
    MintResult res = mint(ctx, keys, wallet, rng);

    std::string text = bill_to_text(res.bill);
    Bill parsed = bill_from_text(text);
    CHECK(parsed.note_id == res.bill.note_id);
    CHECK(parsed.level == res.bill.level);
    CHECK(parsed.primes == res.bill.primes);
    CHECK(parsed.serial == res.bill.serial);
    CHECK(parsed.signature == res.bill.signature);
    CHECK(parsed.basis_version == res.bill.basis_version);

    std::string wtext = wallet_to_text(wallet, ctx.params.level, ctx.basis_version);
    WalletStore loaded;
    std::string basis = wallet_from_text(wtext, loaded, ctx.params.level);
    CHECK(basis == ctx.basis_version);
    CHECK(fidelity(wallet.snapshot(res.bill.note_id), loaded.snapshot(res.bill.note_id)) >=
          1.0 - 1e-12);

    CHECK_THROWS_AS(bill_from_text("not json"), parameter_error);
}

TEST_CASE("phase strings are exact six-decimal text") {
    CHECK(phase_string(-333333) == "-0.333333");
    CHECK(phase_string(0) == "0.000000");
    CHECK(phase_string(1000000) == "1.000000");
    CHECK(phase_string(42) == "0.000042");
    for (std::int64_t m : {-999999LL, -1LL, 0LL, 7LL, 123456LL, 999999LL, 1234567LL})
        CHECK(parse_phase(phase_string(m)) == m);
    CHECK_THROWS_AS(parse_phase("0.12"), parameter_error);
}

TEST_CASE("table cache round trips through text") {
    const ProtocolContext& ctx = ctx23();
    std::string text = table_cache_to_text(ctx.table, ctx.primes, ctx.brandt);
    TableCache cache = table_cache_from_text(text);
    CHECK(cache.table.class_number() == ctx.table.class_number());
    CHECK(cache.primes == ctx.primes);
    REQUIRE(cache.brandt.size() == ctx.brandt.size());
    for (std::size_t k = 0; k < cache.brandt.size(); ++k)
        CHECK(cache.brandt[k].entries == ctx.brandt[k].entries);
    for (std::size_t i = 0; i < cache.table.class_number(); ++i) {
        CHECK(cache.table.reps[i].canonical_lattice == ctx.table.reps[i].canonical_lattice);
        CHECK(cache.table.weights[i] == ctx.table.weights[i]);
        CHECK(cache.table.triples[i] == ctx.table.triples[i]);
    }
    // a context can be rebuilt from the cache alone
    ProtocolContext rebuilt =
        make_protocol_context(cache.table, cache.primes, cache.brandt);
    CHECK(rebuilt.basis_version == ctx.basis_version);

    CHECK_THROWS_AS(table_cache_from_text("qmint-cache 999\n"), parameter_error);
}

} // TEST_SUITE
