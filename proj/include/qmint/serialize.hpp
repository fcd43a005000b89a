#ifndef QMINT_SERIALIZE_HPP
#define QMINT_SERIALIZE_HPP

#include <optional>
#include <string>
#include <vector>

#include "qmint/hecke.hpp"
#include "qmint/ideals.hpp"
#include "qmint/money.hpp"

namespace qmint {

// Format versions; bumping either invalidates caches and files.
inline constexpr int cache_format_version = 1;
inline constexpr int canonicalization_rule_version = 1;
inline constexpr int bill_format_version = 1;
inline constexpr int wallet_format_version = 1;

std::string hex_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> hex_decode(const std::string& hex);

std::string sha256_hex(const std::string& data);

// Canonical identity of a protocol deployment: format versions, level,
// primes, and the canonical class table text.
std::string basis_version_hash(const ClassGroupTable& table, const std::vector<long>& primes);

// Canonical signing text for (level, primes, serial): the bill's key-sorted
// serialization with note_id and signature omitted.
std::string signing_message(long level, const std::vector<long>& primes, const Serial& serial);

// Bill file: canonical key-sorted text with exact 6-decimal serial strings
// and a lowercase-hex signature.
std::string bill_to_text(const Bill& bill);
Bill bill_from_text(const std::string& text);

// Wallet store file: note_id -> amplitude list (17 significant digits),
// level, basis version hash.
std::string wallet_to_text(const WalletStore& wallet, long level, const std::string& basis_version);
// Loads notes into `wallet`; returns the stored basis version hash.
std::string wallet_from_text(const std::string& text, WalletStore& wallet, long expected_level);

// Class table + Brandt matrix cache, one class per line (m, triple, reduced
// basis as 16 rationals, weight), keyed by level/primes/format/rule versions.
std::string table_cache_to_text(const ClassGroupTable& table, const std::vector<long>& primes,
                                const std::vector<BrandtMatrix>& brandt);
struct TableCache {
    ClassGroupTable table;
    std::vector<long> primes;
    std::vector<BrandtMatrix> brandt;
};
TableCache table_cache_from_text(const std::string& text);

// Machine-readable key-value block used by CLI reports.
std::string report_block(const std::vector<std::pair<std::string, std::string>>& fields);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

} // namespace qmint

#endif
