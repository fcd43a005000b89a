#include "qmint/serialize.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qmint/errors.hpp"

namespace qmint {

using nlohmann::json;

std::string hex_encode(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * bytes.size());
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> hex_decode(const std::string& hex) {
    if (hex.size() % 2 != 0)
        throw parameter_error("hex string has odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        throw parameter_error("invalid hex digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    return hex_encode(std::vector<std::uint8_t>(digest, digest + len));
}

namespace {

std::string rat16_string(const ReducedBasis& rb) {
    std::ostringstream os;
    bool first = true;
    for (const Rat& r : rb.key()) {
        if (!first)
            os << ' ';
        os << rat_str(r);
        first = false;
    }
    return os.str();
}

std::string primes_string(const std::vector<long>& primes) {
    std::ostringstream os;
    for (std::size_t i = 0; i < primes.size(); ++i)
        os << (i ? "," : "") << primes[i];
    return os.str();
}

} // namespace

std::string basis_version_hash(const ClassGroupTable& table, const std::vector<long>& primes) {
    std::ostringstream os;
    os << "fmt " << cache_format_version << " canon " << canonicalization_rule_version
       << " level " << table.params.level << " primes " << primes_string(primes) << '\n';
    for (std::size_t i = 0; i < table.class_number(); ++i)
        os << table.reps[i].m << ' ' << table.weights[i] << ' ' << rat16_string(table.reps[i].canonical_lattice)
           << '\n';
    return sha256_hex(os.str()).substr(0, 16);
}

std::string signing_message(long level, const std::vector<long>& primes, const Serial& serial) {
    json j;
    j["level"] = level;
    j["primes"] = primes;
    std::vector<std::string> phases;
    for (std::int64_t m : serial.micro)
        phases.push_back(phase_string(m));
    j["serial"] = phases;
    j["version"] = bill_format_version;
    return j.dump();
}

std::string bill_to_text(const Bill& bill) {
    json j;
    j["basis_version"] = bill.basis_version;
    j["level"] = bill.level;
    j["note_id"] = bill.note_id;
    j["primes"] = bill.primes;
    std::vector<std::string> phases;
    for (std::int64_t m : bill.serial.micro)
        phases.push_back(phase_string(m));
    j["serial"] = phases;
    j["signature"] = hex_encode(bill.signature);
    j["version"] = bill_format_version;
    return j.dump(2) + "\n";
}

Bill bill_from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parameter_error(std::string("malformed bill file: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != bill_format_version)
        throw parameter_error("bill file version mismatch");
    Bill bill;
    try {
        bill.level = j.at("level").get<long>();
        bill.note_id = j.at("note_id").get<std::string>();
        bill.primes = j.at("primes").get<std::vector<long>>();
        for (const auto& s : j.at("serial"))
            bill.serial.micro.push_back(parse_phase(s.get<std::string>()));
        bill.signature = hex_decode(j.at("signature").get<std::string>());
        bill.basis_version = j.value("basis_version", std::string{});
    } catch (const json::exception& e) {
        throw parameter_error(std::string("malformed bill file: ") + e.what());
    }
    return bill;
}

std::string wallet_to_text(const WalletStore& wallet, long level,
                           const std::string& basis_version) {
    json notes = json::object();
    for (const std::string& id : wallet.ids()) {
        StateVector note = wallet.snapshot(id);
        json amps = json::array();
        for (long k = 0; k < note.amp.size(); ++k) {
            char re[64], im[64];
            std::snprintf(re, sizeof re, "%.17g", note.amp(k).real());
            std::snprintf(im, sizeof im, "%.17g", note.amp(k).imag());
            amps.push_back(json::array({std::string(re), std::string(im)}));
        }
        notes[id] = json{{"amplitudes", amps}, {"h", note.h}};
    }
    json j;
    j["basis_version"] = basis_version;
    j["level"] = level;
    j["notes"] = notes;
    j["version"] = wallet_format_version;
    return j.dump(2) + "\n";
}

std::string wallet_from_text(const std::string& text, WalletStore& wallet, long expected_level) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parameter_error(std::string("malformed wallet file: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != wallet_format_version)
        throw parameter_error("wallet file version mismatch");
    long level = j.at("level").get<long>();
    if (level != expected_level)
        throw parameter_error("wallet level mismatch");
    for (auto& [id, note_json] : j.at("notes").items()) {
        StateVector note;
        note.level = level;
        note.h = note_json.at("h").get<long>();
        const auto& amps = note_json.at("amplitudes");
        note.amp.resize(static_cast<long>(amps.size()));
        for (long k = 0; k < note.amp.size(); ++k)
            note.amp(k) = std::complex<double>(std::stod(amps[k][0].get<std::string>()),
                                               std::stod(amps[k][1].get<std::string>()));
        NoteHandle h = wallet.deposit_as(id, std::move(note));
        (void)h;
    }
    return j.value("basis_version", std::string{});
}

std::string table_cache_to_text(const ClassGroupTable& table, const std::vector<long>& primes,
                                const std::vector<BrandtMatrix>& brandt) {
    std::ostringstream os;
    os << "qmint-cache " << cache_format_version << '\n';
    os << "canon " << canonicalization_rule_version << '\n';
    os << "level " << table.params.level << '\n';
    os << "primes " << primes_string(primes) << '\n';
    os << "classes " << table.class_number() << '\n';
    for (std::size_t i = 0; i < table.class_number(); ++i) {
        const TripleCode& t = table.triples[i];
        os << "class m=" << table.reps[i].m << " d=" << t.d << " a=" << t.a << " b=" << t.b
           << " w=" << table.weights[i] << " basis " << rat16_string(table.reps[i].canonical_lattice)
           << '\n';
    }
    for (const BrandtMatrix& m : brandt) {
        os << "brandt p=" << m.p;
        for (const auto& row : m.entries)
            for (long e : row)
                os << ' ' << e;
        os << '\n';
    }
    return os.str();
}

TableCache table_cache_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    int fmt = -1, canon = -1;
    long level = 0;
    std::size_t classes = 0;

    auto expect = [&](const std::string& tag) {
        if (!(is >> word) || word != tag)
            throw parameter_error("cache parse error: expected '" + tag + "'");
    };
    expect("qmint-cache");
    is >> fmt;
    if (fmt != cache_format_version)
        throw parameter_error("cache format version mismatch");
    expect("canon");
    is >> canon;
    if (canon != canonicalization_rule_version)
        throw parameter_error("cache canonicalization version mismatch");
    expect("level");
    is >> level;
    expect("primes");
    std::string primes_csv;
    is >> primes_csv;
    expect("classes");
    is >> classes;
    if (!is)
        throw parameter_error("cache parse error in header");

    TableCache cache{{AlgebraParams(level), {}, {}, {}}, {}, {}};
    {
        std::istringstream ps(primes_csv);
        std::string tok;
        while (std::getline(ps, tok, ','))
            cache.primes.push_back(std::stol(tok));
    }

    MaximalOrder order = maximal_order(cache.table.params);
    for (std::size_t i = 0; i < classes; ++i) {
        expect("class");
        long m = 0, d = 0, a = 0, b = 0, w = 0;
        char eq;
        auto field = [&](const std::string& name, long& out) {
            if (!(is >> word))
                throw parameter_error("cache parse error in class line");
            if (word.rfind(name + "=", 0) != 0)
                throw parameter_error("cache parse error: expected " + name + "=");
            out = std::stol(word.substr(name.size() + 1));
        };
        (void)eq;
        field("m", m);
        field("d", d);
        field("a", a);
        field("b", b);
        field("w", w);
        expect("basis");
        Mat4q rows;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                if (!(is >> word))
                    throw parameter_error("cache parse error in basis");
                rows[r][c] = parse_rat(word);
            }
        std::array<Quat, 4> basis;
        for (int r = 0; r < 4; ++r)
            basis[r] = Quat(level, rows[r][0], rows[r][1], rows[r][2], rows[r][3]);
        ReducedBasis rb{level, basis};
        Lattice lat = lattice_of(rb);
        if (reduce(lat) != rb)
            throw parameter_error("cache corrupt: basis is not in reduced form");
        Lattice integral = scale_lattice(lat, Rat(m));
        cache.table.reps.push_back(
            IdealClassRep{rb, make_left_ideal(std::move(integral), order), m});
        cache.table.weights.push_back(w);
        cache.table.triples.push_back(TripleCode{d, a, b});
    }

    std::size_t h = cache.table.class_number();
    while (is >> word) {
        if (word != "brandt")
            throw parameter_error("cache parse error: expected 'brandt'");
        if (!(is >> word) || word.rfind("p=", 0) != 0)
            throw parameter_error("cache parse error: expected p=");
        BrandtMatrix m;
        m.p = std::stol(word.substr(2));
        m.entries.assign(h, std::vector<long>(h, 0));
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < h; ++c)
                if (!(is >> m.entries[r][c]))
                    throw parameter_error("cache parse error in Brandt entries");
        cache.brandt.push_back(std::move(m));
    }
    return cache;
}

std::string report_block(const std::vector<std::pair<std::string, std::string>>& fields) {
    std::ostringstream os;
    os << "qmint-report 1\n";
    for (const auto& [k, v] : fields)
        os << k << ' ' << v << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw parameter_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw parameter_error("cannot write file: " + path);
    out << data;
}

} // namespace qmint
