#include "mcforge/io.hpp"

#include <fstream>
#include <sstream>

#include "mcforge/errors.hpp"

namespace mcforge {

using nlohmann::json;

namespace {

void expect_format(const json& j, const char* fmt) {
    if (!j.is_object() || !j.contains("format") || j["format"] != fmt)
        throw IoError(std::string("missing or wrong format tag, expected ") + fmt);
}

template <class T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw IoError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw IoError(std::string("bad field '") + name + "': " + e.what());
    }
}

BitVector hex_field(const json& j, const char* name, std::size_t len) {
    try {
        return from_hex(field<std::string>(j, name), len);
    } catch (const UsageError& e) {
        throw IoError(std::string("field '") + name + "': " + e.what());
    }
}

std::string element_hex(Element e) {
    std::ostringstream os;
    os << std::hex << e;
    return os.str();
}

Element element_from_hex(const std::string& s) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(s, &used, 16);
    } catch (const std::exception&) {
        throw IoError("bad field element '" + s + "'");
    }
    if (used != s.size()) throw IoError("bad field element '" + s + "'");
    return static_cast<Element>(v);
}

json matrix_rows_hex(const BitMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(to_hex(m.row(r)));
    return rows;
}

BitMatrix matrix_from_hex_rows(const json& j, const char* name, std::size_t rows, std::size_t cols) {
    const auto list = field<std::vector<std::string>>(j, name);
    if (list.size() != rows) throw IoError(std::string("field '") + name + "' has the wrong number of rows");
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        try {
            m.set_row(r, from_hex(list[r], cols));
        } catch (const UsageError& e) {
            throw IoError(std::string("field '") + name + "': " + e.what());
        }
    }
    return m;
}

} // namespace

json to_json(const McElieceInstance& inst) {
    return json{{"format", instance_format},
                {"n", inst.n},
                {"k", inst.k},
                {"t", inst.t},
                {"m", inst.m},
                {"reduction_poly", inst.reduction_poly},
                {"g_prime", matrix_rows_hex(inst.G_prime)},
                {"q_prime", to_hex(inst.q_prime)},
                {"seed", inst.seed}};
}

McElieceInstance instance_from_json(const json& j) {
    expect_format(j, instance_format);
    McElieceInstance inst;
    inst.n = field<std::size_t>(j, "n");
    inst.k = field<std::size_t>(j, "k");
    inst.t = field<unsigned>(j, "t");
    inst.m = field<unsigned>(j, "m");
    inst.reduction_poly = field<std::uint32_t>(j, "reduction_poly");
    if (inst.n == 0 || inst.k == 0 || inst.k > inst.n) throw IoError("inconsistent dimensions n, k");
    inst.G_prime = matrix_from_hex_rows(j, "g_prime", inst.k, inst.n);
    inst.q_prime = hex_field(j, "q_prime", inst.n);
    inst.seed = j.contains("seed") ? field<std::string>(j, "seed") : std::string{};
    return inst;
}

json to_json(const Solution& sol) {
    return json{{"format", solution_format}, {"q", to_hex(sol.q)}, {"error", to_hex(sol.error)}};
}

Solution solution_from_json(const json& j, std::size_t n, std::size_t k) {
    expect_format(j, solution_format);
    return {hex_field(j, "q", k), hex_field(j, "error", n)};
}

json to_json(const PrivateKey& key) {
    const auto& code = key.code;
    json g = json::array(), support = json::array();
    for (auto c : code.g.coeffs) g.push_back(element_hex(c));
    for (auto a : code.support) support.push_back(element_hex(a));
    return json{{"format", key_format},
                {"m", code.field->m()},
                {"reduction_poly", code.field->reduction_poly()},
                {"g", g},
                {"support", support},
                {"s", matrix_rows_hex(key.S)},
                {"perm", key.perm}};
}

PrivateKey private_key_from_json(const json& j) {
    expect_format(j, key_format);
    try {
        auto field_ctx = std::make_shared<const FieldContext>(field<unsigned>(j, "m"), field<std::uint32_t>(j, "reduction_poly"));
        std::vector<Element> g, support;
        for (const auto& s : field<std::vector<std::string>>(j, "g")) g.push_back(element_from_hex(s));
        for (const auto& s : field<std::vector<std::string>>(j, "support")) support.push_back(element_from_hex(s));
        auto code = build_code(std::move(field_ctx), FieldPoly(std::move(g)), std::move(support));
        auto S = matrix_from_hex_rows(j, "s", code.k, code.k);
        auto perm = field<std::vector<std::size_t>>(j, "perm");
        std::vector<bool> seen(code.n, false);
        for (auto p : perm) {
            if (p >= code.n || seen[p]) throw IoError("'perm' is not a permutation of 0..N-1");
            seen[p] = true;
        }
        return assemble_keys(std::move(code), std::move(S), std::move(perm)).priv;
    } catch (const UsageError& e) {
        throw IoError(std::string("invalid private key: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

json read_json(const std::filesystem::path& p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw IoError("'" + p.string() + "': " + e.what());
    }
}

void write_json(const std::filesystem::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

McElieceInstance load_instance(const std::filesystem::path& p) { return instance_from_json(read_json(p)); }

} // namespace mcforge
