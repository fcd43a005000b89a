// qmint: inspect Brandt/Hecke data for a level, mint and verify simulated
// bills, run the birthday attack, and self-test against the oracles.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "qmint/attacks.hpp"
#include "qmint/errors.hpp"
#include "qmint/hecke.hpp"
#include "qmint/money.hpp"
#include "qmint/oracles.hpp"
#include "qmint/serialize.hpp"

namespace fs = std::filesystem;
using namespace qmint;

namespace {

std::vector<long> parse_primes(const std::string& csv) {
    std::vector<long> primes;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ','))
        primes.push_back(std::stol(tok));
    if (primes.empty())
        throw parameter_error("at least one prime required");
    return primes;
}

std::string cache_key(long level, const std::vector<long>& primes) {
    std::ostringstream os;
    os << "level" << level << "_primes";
    for (std::size_t i = 0; i < primes.size(); ++i)
        os << (i ? "-" : "") << primes[i];
    os << "_fmt" << cache_format_version << "_canon" << canonicalization_rule_version << ".txt";
    return os.str();
}

std::string default_cache_dir() {
    const char* env = std::getenv("QMINT_CACHE_DIR");
    return env ? std::string(env) : std::string{};
}

// Context build with optional text cache; cache state goes to stderr so that
// repeated runs produce identical stdout.
ProtocolContext build_context(long level, const std::vector<long>& primes,
                              const std::string& cache_dir) {
    AlgebraParams params(level);
    if (cache_dir.empty())
        return make_protocol_context(params, primes);

    fs::path path = fs::path(cache_dir) / cache_key(level, primes);
    if (fs::exists(path)) {
        TableCache cache = table_cache_from_text(read_file(path.string()));
        if (cache.table.params.level == level && cache.primes == primes) {
            std::cerr << "cache: hit (" << path.string() << ")\n";
            return make_protocol_context(std::move(cache.table), cache.primes,
                                         std::move(cache.brandt));
        }
        throw parameter_error("cache file does not match the requested level/primes");
    }
    ProtocolContext ctx = make_protocol_context(params, primes);
    fs::create_directories(path.parent_path());
    write_file(path.string(), table_cache_to_text(ctx.table, ctx.primes, ctx.brandt));
    std::cerr << "cache: miss, written (" << path.string() << ")\n";
    return ctx;
}

std::vector<std::uint8_t> demo_key(long level, const std::vector<long>& primes,
                                   const std::string& override_hex) {
    if (!override_hex.empty())
        return hex_decode(override_hex);
    std::ostringstream os;
    os << "qmint-demo-key " << level;
    for (long p : primes)
        os << ' ' << p;
    return hex_decode(sha256_hex(os.str()));
}

int cmd_inspect(long level, const std::string& primes_csv, const std::string& cache_dir) {
    std::vector<long> primes = parse_primes(primes_csv);
    ProtocolContext ctx = build_context(level, primes, cache_dir);

    auto [mass, target] = mass_identity(ctx.table);
    std::cout << "level " << level << "\n";
    std::cout << "class_number " << ctx.h() << "\n";
    std::cout << "dim_v " << ctx.dim_v() << "\n";
    std::cout << "weights";
    for (long w : ctx.table.weights)
        std::cout << ' ' << w;
    std::cout << "\n";
    std::cout << "mass " << rat_str(mass) << " expected " << rat_str(target)
              << (mass == target ? " ok" : " MISMATCH") << "\n";
    for (std::size_t k = 0; k < ctx.primes.size(); ++k) {
        std::cout << "brandt p=" << ctx.primes[k] << "\n";
        for (const auto& row : ctx.brandt[k].entries) {
            std::cout << " ";
            for (long e : row)
                std::cout << ' ' << e;
            std::cout << "\n";
        }
        std::cout << "  weighted_symmetric "
                  << (weighted_symmetric(ctx.brandt[k], ctx.table.weights) ? "yes" : "no")
                  << ", plain_symmetric "
                  << (unweighted_symmetric(ctx.brandt[k]) ? "yes" : "no") << "\n";
    }
    std::cout << "eigenvalue_vectors\n";
    for (long v = 0; v < ctx.dim_v(); ++v) {
        std::cout << " ";
        for (long k = 0; k < ctx.eig.eigenvalues.cols(); ++k)
            std::cout << ' ' << ctx.eig.eigenvalues(v, k);
        std::cout << "\n";
    }
    std::cout << "separation " << ctx.eig.separation << "\n";
    std::cout << "phase_separation " << ctx.phase_separation << "\n";
    std::cout << "bell_acceptance " << ctx.bell.acceptance_probability << "\n";
    std::cout << "basis_version " << ctx.basis_version << "\n";
    return 0;
}

int cmd_mint(long level, const std::string& primes_csv, const std::string& cache_dir,
             std::uint64_t seed, const std::string& wallet_path, const std::string& bill_path,
             const std::string& key_hex, bool unique_rounding) {
    std::vector<long> primes = parse_primes(primes_csv);
    ProtocolContext ctx = build_context(level, primes, cache_dir);
    MintKeys keys;
    keys.signing_key = keys.verification_key = demo_key(level, primes, key_hex);

    WalletStore wallet;
    if (fs::exists(wallet_path)) {
        std::string basis = wallet_from_text(read_file(wallet_path), wallet, level);
        if (basis != ctx.basis_version)
            throw parameter_error("wallet basis version does not match the protocol context");
    }

    Rng rng(seed);
    MintResult res = mint(ctx, keys, wallet, rng,
                          unique_rounding ? SerialPolicy::unique_rounding
                                          : SerialPolicy::approximation);
    write_file(bill_path, bill_to_text(res.bill));
    write_file(wallet_path, wallet_to_text(wallet, level, ctx.basis_version));

    std::cout << report_block({{"kind", "mint"},
                               {"level", std::to_string(level)},
                               {"note_id", res.bill.note_id},
                               {"serial", [&] {
                                    std::ostringstream os;
                                    for (std::size_t k = 0; k < res.bill.serial.micro.size(); ++k)
                                        os << (k ? "," : "")
                                           << phase_string(res.bill.serial.micro[k]);
                                    return os.str();
                                }()},
                               {"bill", bill_path},
                               {"wallet", wallet_path}});
    return 0;
}

int cmd_verify(const std::string& cache_dir, std::uint64_t seed, const std::string& wallet_path,
               const std::string& bill_path, const std::string& key_hex) {
    Bill bill = bill_from_text(read_file(bill_path));
    ProtocolContext ctx = build_context(bill.level, bill.primes, cache_dir);
    if (!bill.basis_version.empty() && bill.basis_version != ctx.basis_version)
        throw parameter_error("bill basis version does not match the protocol context");

    WalletStore wallet;
    std::string basis = wallet_from_text(read_file(wallet_path), wallet, bill.level);
    if (basis != ctx.basis_version)
        throw parameter_error("wallet basis version does not match the bill");
    if (!wallet.contains(bill.note_id))
        throw parameter_error("wallet does not hold note " + bill.note_id);

    MintKeys keys;
    keys.signing_key = keys.verification_key = demo_key(bill.level, bill.primes, key_hex);
    Rng rng(seed);
    VerifyResult res = verify(ctx, bill, keys.verification_key, wallet, rng);
    write_file(wallet_path, wallet_to_text(wallet, bill.level, ctx.basis_version));

    std::cout << report_block({{"kind", "verify"},
                               {"note_id", bill.note_id},
                               {"result", res.accepted ? "accept" : "reject"}});
    return res.accepted ? 0 : 1;
}

int cmd_attack(long level, const std::string& primes_csv, const std::string& cache_dir,
               long budget, long trials, std::uint64_t seed) {
    std::vector<long> primes = parse_primes(primes_csv);
    ProtocolContext ctx = build_context(level, primes, cache_dir);
    Rng rng(seed);
    MintKeys keys = make_mint_keys(rng);
    AttackReport report = birthday_attack(ctx, keys, budget, trials, seed);

    std::vector<std::pair<std::string, std::string>> fields{
        {"kind", "birthday-attack"},
        {"level", std::to_string(level)},
        {"budget", std::to_string(report.budget)},
        {"trials", std::to_string(report.trials)},
        {"successes", std::to_string(report.successes)},
        {"success_rate", std::to_string(report.success_rate())},
        {"seed", std::to_string(report.seed)},
        {"collisions", std::to_string(report.collisions.size())},
    };
    for (const CollisionRecord& c : report.collisions) {
        std::ostringstream os;
        os << "trial=" << c.trial << " i=" << c.first << " j=" << c.second
           << " dist=" << c.serial_distance << " fidelity=" << c.post_fidelity;
        fields.emplace_back("collision", os.str());
    }
    std::cout << report_block(fields);
    return report.successes > 0 ? 0 : 1;
}

int cmd_selftest(std::uint64_t seed) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "[pass] " : "[FAIL] ") << name << "\n";
        if (!ok)
            ++failures;
    };

    for (long p : {2L, 3L, 5L, 7L, 13L, 17L, 19L})
        check("oracle agreement p=" + std::to_string(p),
              eta_product_ap(p, 64) == ec_point_count_ap(p));

    ClassGroupTable t11 = enumerate_classes(AlgebraParams(11));
    check("level 11 class number", t11.class_number() == 2);
    Eigen::MatrixXd cusp11 = cusp_basis(t11.weights);
    for (long p : {2L, 3L, 5L, 7L, 13L}) {
        BrandtMatrix m = brandt_matrix(t11, p);
        long trace = 0;
        for (std::size_t i = 0; i < m.entries.size(); ++i)
            trace += m.entries[i][i];
        check("level 11 eigenvalue p=" + std::to_string(p),
              trace - (p + 1) == eta_product_ap(p, 32));
    }

    for (long n : {11L, 19L, 23L}) {
        ClassGroupTable table = enumerate_classes(AlgebraParams(n));
        auto [mass, target] = mass_identity(table);
        check("mass identity N=" + std::to_string(n), mass == target);
        BrandtMatrix m2 = brandt_matrix(table, 2);
        BrandtMatrix m3 = brandt_matrix(table, 3);
        bool rows = true;
        for (const auto& row : m2.entries) {
            long s = 0;
            for (long e : row)
                s += e;
            rows = rows && s == 3;
        }
        check("row sums N=" + std::to_string(n), rows);
        check("weighted symmetry N=" + std::to_string(n),
              weighted_symmetric(m2, table.weights) && weighted_symmetric(m3, table.weights));
    }

    ProtocolContext ctx = make_protocol_context(AlgebraParams(23), {2, 3});
    bool ramanujan = true;
    for (long v = 0; v < ctx.dim_v(); ++v)
        for (long k = 0; k < ctx.eig.eigenvalues.cols(); ++k)
            ramanujan = ramanujan && std::abs(ctx.eig.eigenvalues(v, k)) <=
                                         2.0 * std::sqrt(double(ctx.primes[k])) + 1e-6;
    check("Ramanujan bound N=23", ramanujan);
    check("bell acceptance N=23", ctx.bell.acceptance_probability >= 1e-3 &&
                                      ctx.bell.acceptance_probability <= 1.0);

    Rng rng(seed);
    MintKeys keys = make_mint_keys(rng);
    WalletStore wallet;
    MintResult res = mint(ctx, keys, wallet, rng);
    check("mint verifies", verify(ctx, res.bill, keys.verification_key, wallet, rng).accepted);
    Bill bad = res.bill;
    bad.signature[0] ^= 1;
    check("tampered signature rejects",
          !verify(ctx, bad, keys.verification_key, wallet, rng).accepted);

    TriorthResult tri = triorthogonality_experiment(4, 500, seed, TriorthMode::haar_state);
    check("triorthogonality bound dim=4", tri.mean <= 0.75 + 3.0 * tri.std_error);

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(failures) + " failures\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Brandt/Hecke toolkit with a simulated eigenstate money protocol"};
    app.require_subcommand(1);

    long level = 0;
    std::string primes_csv = "2,3";
    std::string cache_dir = default_cache_dir();
    std::string wallet_path = "wallet.json";
    std::string bill_path = "bill.json";
    std::string key_hex;
    std::uint64_t seed = 1;
    long budget = 2;
    long trials = 1;
    bool unique_rounding = false;

    CLI::App* inspect = app.add_subcommand("inspect", "print class/Hecke data for a level");
    inspect->add_option("--level", level, "prime level, 3 mod 4, >= 11")->required();
    inspect->add_option("--primes", primes_csv, "comma-separated Hecke primes");
    inspect->add_option("--cache", cache_dir, "cache directory");

    CLI::App* mint_cmd = app.add_subcommand("mint", "mint a bill into a wallet file");
    mint_cmd->add_option("--level", level)->required();
    mint_cmd->add_option("--primes", primes_csv);
    mint_cmd->add_option("--cache", cache_dir);
    mint_cmd->add_option("--seed", seed);
    mint_cmd->add_option("--wallet", wallet_path);
    mint_cmd->add_option("--bill", bill_path);
    mint_cmd->add_option("--mint-key", key_hex, "hex key material (default: demo key)");
    mint_cmd->add_flag("--unique-rounding", unique_rounding,
                       "enforce canonical eigenphase rounding of serials");

    CLI::App* verify_cmd = app.add_subcommand("verify", "verify a bill against a wallet note");
    verify_cmd->add_option("--cache", cache_dir);
    verify_cmd->add_option("--seed", seed);
    verify_cmd->add_option("--wallet", wallet_path);
    verify_cmd->add_option("--bill", bill_path);
    verify_cmd->add_option("--mint-key", key_hex);

    CLI::App* attack = app.add_subcommand("attack", "birthday attack on serial collisions");
    attack->add_option("--level", level)->required();
    attack->add_option("--primes", primes_csv);
    attack->add_option("--cache", cache_dir);
    attack->add_option("--budget", budget, "bills minted per trial");
    attack->add_option("--trials", trials);
    attack->add_option("--seed", seed);

    CLI::App* selftest = app.add_subcommand("selftest", "oracle and invariant suite");
    selftest->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (inspect->parsed())
            return cmd_inspect(level, primes_csv, cache_dir);
        if (mint_cmd->parsed())
            return cmd_mint(level, primes_csv, cache_dir, seed, wallet_path, bill_path, key_hex,
                            unique_rounding);
        if (verify_cmd->parsed())
            return cmd_verify(cache_dir, seed, wallet_path, bill_path, key_hex);
        if (attack->parsed())
            return cmd_attack(level, primes_csv, cache_dir, budget, trials, seed);
        if (selftest->parsed())
            return cmd_selftest(seed);
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const invariant_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
