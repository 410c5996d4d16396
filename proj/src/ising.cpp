#include "mcforge/ising.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "mcforge/errors.hpp"
#include "mcforge/rng.hpp"

namespace mcforge {

unsigned PLocalInstance::locality() const {
    std::size_t p = 0;
    for (const auto& t : terms) p = std::max(p, t.vars.size());
    return static_cast<unsigned>(p);
}

bool PLocalInstance::unit_coefficients() const {
    return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.coeff == 1 || t.coeff == -1; });
}

namespace {

std::string instance_digest(const McElieceInstance& inst) {
    std::string blob;
    for (std::size_t r = 0; r < inst.G_prime.rows(); ++r) blob += to_hex(inst.G_prime.row(r)) + "/";
    blob += to_hex(inst.q_prime);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash_string(blob);
    return os.str();
}

bool parity(const std::vector<std::uint32_t>& vars, const BitVector& x) {
    bool p = false;
    for (auto v : vars) p ^= x.get(v);
    return p;
}

void check_size(const PLocalInstance& pl, const BitVector& x) {
    if (x.size() != pl.num_vars) throw UsageError("configuration length does not match the instance");
}

} // namespace

PLocalInstance map_to_ising(const McElieceInstance& inst) {
    PLocalInstance pl;
    pl.num_vars = inst.k;
    pl.offset = static_cast<std::int64_t>(inst.n);
    pl.meta.source = instance_digest(inst);
    pl.meta.original_vars = inst.k;
    pl.meta.target_t = inst.t;
    const BitMatrix cols = inst.G_prime.transpose();
    for (std::size_t i = 0; i < inst.n; ++i) {
        const bool flipped = inst.q_prime.get(i);
        const std::int64_t coeff = flipped ? 1 : -1;
        auto support = cols.row(i).support();
        if (support.empty()) {
            pl.offset += coeff;
            if (flipped) ++pl.meta.constant_unsat;
            continue;
        }
        pl.terms.push_back({coeff, std::vector<std::uint32_t>(support.begin(), support.end())});
    }
    return pl;
}

std::int64_t energy(const PLocalInstance& pl, const BitVector& x) {
    check_size(pl, x);
    std::int64_t e = 0;
    for (const auto& t : pl.terms) e += parity(t.vars, x) ? -t.coeff : t.coeff;
    return e;
}

std::size_t unsat_count(const PLocalInstance& pl, const BitVector& x) {
    check_size(pl, x);
    std::size_t u = pl.meta.constant_unsat;
    for (const auto& t : pl.terms) u += (parity(t.vars, x) ? -t.coeff : t.coeff) > 0;
    return u;
}

PLocalInstance canonicalize(PLocalInstance pl) {
    for (auto& t : pl.terms) std::sort(t.vars.begin(), t.vars.end());
    std::map<std::vector<std::uint32_t>, std::int64_t> merged;
    for (auto& t : pl.terms) merged[std::move(t.vars)] += t.coeff;
    pl.terms.clear();
    for (auto& [vars, c] : merged)
        if (c != 0) pl.terms.push_back({c, vars});
    std::stable_sort(pl.terms.begin(), pl.terms.end(), [](const Term& a, const Term& b) {
        if (a.vars.size() != b.vars.size()) return a.vars.size() < b.vars.size();
        return a.vars < b.vars;
    });
    return pl;
}

PLocalInstance reduce_to_3local(const PLocalInstance& pl) {
    if (pl.locality() <= 3) return pl;
    PLocalInstance out;
    out.num_vars = pl.num_vars;
    out.offset = pl.offset;
    out.meta = pl.meta;

    std::vector<Term> stack;
    for (auto it = pl.terms.rbegin(); it != pl.terms.rend(); ++it) stack.push_back(*it);
    while (!stack.empty()) {
        Term t = std::move(stack.back());
        stack.pop_back();
        const std::size_t p = t.vars.size();
        if (p <= 3) {
            out.terms.push_back(std::move(t));
            continue;
        }
        const std::size_t l = (p + 1) / 2;
        const auto w = static_cast<std::uint32_t>(out.num_vars++);
        const std::int64_t mag = std::abs(t.coeff);
        Term a{mag, std::vector<std::uint32_t>(t.vars.begin(), t.vars.begin() + static_cast<std::ptrdiff_t>(l))};
        Term b{-t.coeff, std::vector<std::uint32_t>(t.vars.begin() + static_cast<std::ptrdiff_t>(l), t.vars.end())};
        a.vars.push_back(w);
        b.vars.push_back(w);
        out.offset += mag;
        stack.push_back(std::move(b));
        stack.push_back(std::move(a));
    }
    return out;
}

PLocalInstance reduce_to_2local(const PLocalInstance& pl_in) {
    const unsigned loc = pl_in.locality();
    if (loc <= 2) return pl_in;
    if (loc > 3) throw UsageError("reduce_to_2local needs a <= 3-local instance");
    PLocalInstance out;
    out.num_vars = pl_in.num_vars;
    out.offset = pl_in.offset;
    out.meta = pl_in.meta;
    for (const auto& t : pl_in.terms) {
        if (t.vars.size() < 3) {
            out.terms.push_back(t);
            continue;
        }
        const auto w = static_cast<std::uint32_t>(out.num_vars++);
        const std::int64_t c = t.coeff, mag = std::abs(c);
        const auto& v = t.vars;
        out.terms.push_back({mag, {v[0], v[1]}});
        out.terms.push_back({mag, {v[0], v[2]}});
        out.terms.push_back({mag, {v[1], v[2]}});
        for (auto s : v) {
            out.terms.push_back({c, {s}});
            out.terms.push_back({2 * mag, {s, w}});
        }
        out.terms.push_back({2 * c, {w}});
        out.offset += 3 * mag;
    }
    return canonicalize(std::move(out));
}

PLocalInstance scramble_plocal(const PLocalInstance& pl, const BitMatrix& S) {
    if (!pl.unit_coefficients()) throw UsageError("scrambling requires unit coefficients");
    if (S.rows() != pl.num_vars || S.cols() != pl.num_vars) throw UsageError("S must be num_vars x num_vars");
    PLocalInstance out = pl;
    for (auto& t : out.terms) {
        BitVector col(pl.num_vars);
        for (auto v : t.vars) col.set(v);
        const auto support = matvec(S, col).support();
        t.vars.assign(support.begin(), support.end());
    }
    return out;
}

BitVector config_bits(std::uint64_t config, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n && i < 64; ++i)
        if ((config >> i) & 1) x.set(i);
    return x;
}

// --- exact minimisation over auxiliaries ---

AuxiliaryMinimizer::AuxiliaryMinimizer(const PLocalInstance& pl, std::size_t num_fixed)
    : num_fixed_(num_fixed), num_aux_(pl.num_vars - num_fixed) {
    if (num_fixed > pl.num_vars) throw UsageError("more fixed variables than the instance has");
    std::vector<std::set<std::uint32_t>> adj(num_aux_);
    for (const auto& t : pl.terms) {
        Factor f{t.coeff, {}, {}};
        for (auto v : t.vars) {
            if (v < num_fixed)
                f.fixed_vars.push_back(v);
            else
                f.aux.push_back(static_cast<std::uint32_t>(v - num_fixed));
        }
        for (auto a : f.aux)
            for (auto b : f.aux)
                if (a != b) adj[a].insert(b);
        factors_.push_back(std::move(f));
    }
    // Greedy min-degree order on the interaction graph, with fill-in.
    std::vector<bool> done(num_aux_, false);
    for (std::size_t step = 0; step < num_aux_; ++step) {
        std::uint32_t best = 0;
        std::size_t best_deg = std::numeric_limits<std::size_t>::max();
        for (std::uint32_t v = 0; v < num_aux_; ++v)
            if (!done[v] && adj[v].size() < best_deg) {
                best = v;
                best_deg = adj[v].size();
            }
        if (best_deg > 19) throw UsageError("auxiliary interaction graph too dense for exact elimination");
        done[best] = true;
        order_.push_back(best);
        const auto nb = adj[best];
        for (auto a : nb) {
            adj[a].erase(best);
            for (auto b : nb)
                if (a != b) adj[a].insert(b);
        }
        adj[best].clear();
    }
}

std::int64_t AuxiliaryMinimizer::minimum(const BitVector& fixed) const {
    if (fixed.size() != num_fixed_) throw UsageError("fixed configuration has the wrong length");
    struct Table {
        std::vector<std::uint32_t> scope;
        std::vector<std::int64_t> values;
        bool alive = true;
    };
    std::vector<Table> tables;
    std::vector<std::vector<std::size_t>> by_var(num_aux_);
    std::int64_t constant = 0;

    for (const auto& f : factors_) {
        const std::int64_t s = parity(f.fixed_vars, fixed) ? -f.coeff : f.coeff;
        if (f.aux.empty()) {
            constant += s;
            continue;
        }
        Table t;
        t.scope = f.aux;
        t.values.resize(std::size_t{1} << f.aux.size());
        for (std::size_t a = 0; a < t.values.size(); ++a) t.values[a] = (std::popcount(a) & 1) ? -s : s;
        for (auto v : t.scope) by_var[v].push_back(tables.size());
        tables.push_back(std::move(t));
    }

    for (auto v : order_) {
        std::vector<std::size_t> involved;
        for (auto i : by_var[v])
            if (tables[i].alive) involved.push_back(i);
        if (involved.empty()) continue; // unconstrained auxiliary
        std::vector<std::uint32_t> scope;
        for (auto i : involved)
            for (auto u : tables[i].scope)
                if (u != v && std::find(scope.begin(), scope.end(), u) == scope.end()) scope.push_back(u);
        // positions of each involved table's variables in (scope..., v)
        std::vector<std::vector<unsigned>> pos(involved.size());
        for (std::size_t f = 0; f < involved.size(); ++f)
            for (auto u : tables[involved[f]].scope) {
                const auto it = std::find(scope.begin(), scope.end(), u);
                pos[f].push_back(it == scope.end() ? static_cast<unsigned>(scope.size())
                                                   : static_cast<unsigned>(it - scope.begin()));
            }
        Table out;
        out.scope = scope;
        out.values.assign(std::size_t{1} << scope.size(), std::numeric_limits<std::int64_t>::max());
        for (std::size_t a = 0; a < out.values.size(); ++a) {
            for (std::size_t val = 0; val < 2; ++val) {
                const std::size_t full = a | (val << scope.size());
                std::int64_t sum = 0;
                for (std::size_t f = 0; f < involved.size(); ++f) {
                    std::size_t idx = 0;
                    for (std::size_t b = 0; b < pos[f].size(); ++b) idx |= ((full >> pos[f][b]) & 1U) << b;
                    sum += tables[involved[f]].values[idx];
                }
                out.values[a] = std::min(out.values[a], sum);
            }
        }
        for (auto i : involved) tables[i].alive = false;
        if (scope.empty()) {
            constant += out.values[0];
            continue;
        }
        for (auto u : scope) by_var[u].push_back(tables.size());
        tables.push_back(std::move(out));
    }
    return constant;
}

GroundStates exhaustive_ground_states(const PLocalInstance& pl, std::size_t num_free) {
    if (num_free > pl.num_vars) throw UsageError("num_free exceeds num_vars");
    if (num_free > 32) throw UsageError("exhaustive search limited to 32 free variables");
    GroundStates gs;
    const std::uint64_t count = std::uint64_t{1} << num_free;

    if (num_free < pl.num_vars) {
        AuxiliaryMinimizer am(pl, num_free);
        gs.min_energy = std::numeric_limits<std::int64_t>::max();
        for (std::uint64_t c = 0; c < count; ++c) {
            const auto e = am.minimum(config_bits(c, num_free));
            if (e < gs.min_energy) {
                gs.min_energy = e;
                gs.configs.clear();
            }
            if (e == gs.min_energy) gs.configs.push_back(c);
        }
        return gs;
    }

    // Gray-code walk: each step flips one variable and the terms containing it.
    std::vector<std::vector<std::size_t>> var_terms(pl.num_vars);
    std::vector<std::int64_t> contrib(pl.terms.size());
    std::int64_t e = 0;
    for (std::size_t i = 0; i < pl.terms.size(); ++i) {
        contrib[i] = pl.terms[i].coeff;
        e += contrib[i];
        for (auto v : pl.terms[i].vars) var_terms[v].push_back(i);
    }
    std::uint64_t cfg = 0;
    gs.min_energy = e;
    gs.configs.push_back(0);
    for (std::uint64_t step = 1; step < count; ++step) {
        const auto j = static_cast<std::size_t>(std::countr_zero(step));
        for (auto i : var_terms[j]) {
            e -= 2 * contrib[i];
            contrib[i] = -contrib[i];
        }
        cfg ^= std::uint64_t{1} << j;
        if (e < gs.min_energy) {
            gs.min_energy = e;
            gs.configs.clear();
        }
        if (e == gs.min_energy) gs.configs.push_back(cfg);
    }
    std::sort(gs.configs.begin(), gs.configs.end());
    return gs;
}

// --- text format ---

void write_plocal(std::ostream& out, const PLocalInstance& pl) {
    out << "plocal v1 " << pl.num_vars << ' ' << pl.terms.size() << ' ' << pl.offset << '\n';
    out << "# meta source=" << (pl.meta.source.empty() ? "-" : pl.meta.source)
        << " original_vars=" << pl.meta.original_vars << " target_t=" << pl.meta.target_t
        << " constant_unsat=" << pl.meta.constant_unsat << '\n';
    for (const auto& t : pl.terms) {
        out << t.coeff;
        for (auto v : t.vars) out << ' ' << v;
        out << '\n';
    }
}

std::string to_plocal_text(const PLocalInstance& pl) {
    std::ostringstream os;
    write_plocal(os, pl);
    return os.str();
}

PLocalInstance read_plocal(std::istream& in) {
    PLocalInstance pl;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) { throw IoError("plocal line " + std::to_string(lineno) + ": " + why); };

    std::size_t num_terms = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string word;
            ls >> word;
            if (word != "meta") continue;
            while (ls >> word) {
                const auto eq = word.find('=');
                if (eq == std::string::npos) fail("bad meta entry '" + word + "'");
                const auto key = word.substr(0, eq), val = word.substr(eq + 1);
                try {
                    if (key == "source")
                        pl.meta.source = val == "-" ? "" : val;
                    else if (key == "original_vars")
                        pl.meta.original_vars = std::stoull(val);
                    else if (key == "target_t")
                        pl.meta.target_t = std::stol(val);
                    else if (key == "constant_unsat")
                        pl.meta.constant_unsat = std::stoull(val);
                } catch (const std::exception&) {
                    fail("bad meta value '" + word + "'");
                }
            }
            continue;
        }
        std::istringstream ls(line);
        if (!have_header) {
            std::string magic, version;
            long long nv = -1, nt = -1;
            if (!(ls >> magic >> version >> nv >> nt >> pl.offset) || magic != "plocal" || version != "v1" || nv < 0 || nt < 0)
                fail("expected 'plocal v1 <num_vars> <num_terms> <offset>'");
            pl.num_vars = static_cast<std::size_t>(nv);
            num_terms = static_cast<std::size_t>(nt);
            have_header = true;
            continue;
        }
        Term t;
        if (!(ls >> t.coeff)) fail("expected a coefficient");
        long long v;
        while (ls >> v) {
            if (v < 0 || static_cast<std::size_t>(v) >= pl.num_vars) fail("variable index out of range");
            if (!t.vars.empty() && static_cast<std::uint32_t>(v) <= t.vars.back()) fail("variable indices must be strictly increasing");
            t.vars.push_back(static_cast<std::uint32_t>(v));
        }
        if (!ls.eof()) fail("unexpected token");
        pl.terms.push_back(std::move(t));
    }
    if (!have_header) throw IoError("plocal: missing header");
    if (pl.terms.size() != num_terms) throw IoError("plocal: term count does not match the header");
    return pl;
}

PLocalInstance plocal_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_plocal(is);
}

} // namespace mcforge
