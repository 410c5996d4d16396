#pragma once

// p-local Ising Hamiltonians built from McEliece instances.
//
// Spins are stored as bits, sigma_i = 1 - 2 x_i. A term contributes
// coeff * prod_{i in vars} sigma_i to the energy. For a mapped instance
//     energy(x) + offset == 2 * |q' - x G'|,
// so the objective W = (energy + offset) / 2 is the Hamming distance that the
// planted message minimises. Reductions keep that identity once the auxiliary
// variables are minimised out.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcforge/gf2.hpp"
#include "mcforge/mceliece.hpp"

namespace mcforge {

struct Term {
    std::int64_t coeff = 0;
    std::vector<std::uint32_t> vars; // sorted, distinct; empty = constant term
    bool operator==(const Term&) const = default;
};

struct PLocalMeta {
    std::string source;              // hash of the generating instance, hex
    std::size_t original_vars = 0;   // the first original_vars variables are the message bits
    long target_t = -1;              // planted distance, -1 if unknown
    std::size_t constant_unsat = 0;  // always-violated constant columns folded into offset
    bool operator==(const PLocalMeta&) const = default;
};

struct PLocalInstance {
    std::size_t num_vars = 0;
    std::vector<Term> terms;
    std::int64_t offset = 0;
    PLocalMeta meta;

    /// Largest term size.
    unsigned locality() const;
    bool unit_coefficients() const;
    bool operator==(const PLocalInstance&) const = default;
};

/// One term per column of G': coeff -(-1)^{q'_i} on the column support.
/// Columns with empty support are folded into the offset. Duplicate supports
/// are kept as separate terms.
PLocalInstance map_to_ising(const McElieceInstance& inst);

std::int64_t energy(const PLocalInstance& pl, const BitVector& x);
/// Terms with positive contribution, plus the folded constant violations.
/// Equals |q' - x G'| on a mapped instance.
std::size_t unsat_count(const PLocalInstance& pl, const BitVector& x);
/// energy + offset; twice the Hamming distance on mapped instances.
inline std::int64_t objective(const PLocalInstance& pl, const BitVector& x) { return energy(pl, x) + pl.offset; }

/// Splits every term of size p > 3 with one auxiliary spin w,
///   c A B = |c| min_w [A w - sign(c) w B] + |c|,
/// halving recursively (A takes ceil(p/2) variables). A term of size p costs
/// p - 3 auxiliaries. Auxiliaries are appended after the existing variables.
PLocalInstance reduce_to_3local(const PLocalInstance& pl);

/// Replaces each 3-local term c s1 s2 s3 by the 2-local gadget
///   |c| [ (s1 + s2 + s3 + sign(c) + 2a)^2 / 2 - 1 ],  a = 1 - 2w,
/// whose minimum over w is c s1 s2 s3. Constants go into the offset.
PLocalInstance reduce_to_2local(const PLocalInstance& pl);

/// Replaces the adjacency J (J_{a,i} = 1 iff variable a is in term i) by S J,
/// keeping each term's sign, so that H'(x) = H(x S). Requires unit coefficients.
PLocalInstance scramble_plocal(const PLocalInstance& pl, const BitMatrix& S);

/// Sorts variables and terms, merges equal supports, drops zero coefficients.
PLocalInstance canonicalize(PLocalInstance pl);

/// Exact minimum of the energy over all variables with index >= fixed.size(),
/// the first fixed.size() being clamped to `fixed`. Uses min-sum variable
/// elimination over the auxiliary interaction graph; throws UsageError if an
/// intermediate factor would exceed 20 variables.
class AuxiliaryMinimizer {
public:
    AuxiliaryMinimizer(const PLocalInstance& pl, std::size_t num_fixed);
    std::int64_t minimum(const BitVector& fixed) const;

private:
    struct Factor {
        std::int64_t coeff;
        std::vector<std::uint32_t> fixed_vars;
        std::vector<std::uint32_t> aux; // local aux ids
    };
    std::size_t num_fixed_;
    std::size_t num_aux_;
    std::vector<Factor> factors_;
    std::vector<std::uint32_t> order_;
};

struct GroundStates {
    std::int64_t min_energy = 0;
    std::vector<std::uint64_t> configs; // bit i of a config is x_i; ascending
};

/// Exhaustive search. With num_free < num_vars, configurations of the first
/// num_free variables are enumerated and the rest minimised exactly; the
/// reported configs are then projections onto the free variables.
GroundStates exhaustive_ground_states(const PLocalInstance& pl, std::size_t num_free);
inline GroundStates exhaustive_ground_states(const PLocalInstance& pl) {
    return exhaustive_ground_states(pl, pl.num_vars);
}

BitVector config_bits(std::uint64_t config, std::size_t n);

// Text format:
//   plocal v1 <num_vars> <num_terms> <offset>
//   # meta source=<hex> original_vars=<n> target_t=<t> constant_unsat=<c>
//   <coeff> <i1> ... <ip>
// Further '#' lines are comments.
void write_plocal(std::ostream& out, const PLocalInstance& pl);
std::string to_plocal_text(const PLocalInstance& pl);
PLocalInstance read_plocal(std::istream& in); // IoError on malformed input
PLocalInstance plocal_from_text(const std::string& text);

} // namespace mcforge
