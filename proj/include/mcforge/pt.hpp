#pragma once

// Parallel tempering directly on p-local instances: sequential Metropolis
// sweeps over every replica followed by one pass of adjacent replica
// exchanges, until some replica reaches the target objective.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcforge/ising.hpp"

namespace mcforge {

struct PtConfig {
    unsigned num_replicas = 16;
    double beta_min = 0.1;
    double beta_max = 1.0;
    std::uint64_t max_sweeps = 10'000'000;
    std::string seed = "0";
    unsigned repetitions = 10;
};

/// beta_i = beta_min (beta_max / beta_min)^(i / (N_T - 1)), ascending.
std::vector<double> temperature_ladder(const PtConfig& cfg);

struct Replica {
    BitVector x;
    std::int64_t energy = 0;
    std::vector<Word> unsat;         // unit-coefficient path: violated-term bitset
    std::vector<std::int8_t> signs;  // generic path: current product of each term
};

/// Precomputed variable -> term structure. Instances whose coefficients are
/// all +-1 use a bitset of violated terms, so a flip costs a few popcounts.
class PtModel {
public:
    explicit PtModel(const PLocalInstance& pl);

    std::size_t num_vars() const noexcept { return num_vars_; }
    bool unit_path() const noexcept { return unit_; }

    Replica make_replica(BitVector x) const;
    Replica random_replica(Rng& rng) const;
    std::int64_t delta(const Replica& r, std::size_t j) const;
    void flip(Replica& r, std::size_t j) const;
    std::int64_t recompute_energy(const Replica& r) const;

    /// Sequential Metropolis pass j = 0..n-1 at inverse temperature beta.
    /// Stops early, returning true, right after a flip that makes the energy
    /// equal to stop_energy. accepted (optional) counts accepted flips.
    bool sweep(Replica& r, double beta, Rng& rng, std::int64_t stop_energy, std::uint64_t* accepted = nullptr) const;

private:
    double accept_probability(double beta, std::int64_t de) const;

    std::size_t num_vars_;
    bool unit_;
    std::size_t words_ = 0;
    std::vector<Word> masks_;                       // unit path: per-variable term masks
    std::vector<std::int64_t> degree_;              // unit path: |T_j|
    std::int64_t num_terms_ = 0;
    std::vector<std::vector<std::uint32_t>> var_terms_; // generic path
    std::vector<std::int64_t> coeffs_;
    std::vector<std::vector<std::uint32_t>> term_vars_;
};

struct ExchangeStats {
    std::vector<std::uint64_t> attempts;
    std::vector<std::uint64_t> accepted;
};

/// One pass over adjacent pairs (i, i+1): swap configurations when
/// f = (beta_{i+1} - beta_i)(E_{i+1} - E_i) >= 0 or with probability e^f.
void replica_exchange(std::vector<Replica>& replicas, std::span<const double> betas, Rng& rng,
                      ExchangeStats* stats = nullptr);

struct PtResult {
    bool success = false;
    BitVector message;          // the first meta.original_vars bits of the solving replica
    std::uint64_t sweeps = 0;   // rounds in which every replica was swept once
    double wall_time_s = 0;
    double cpu_time_s = 0;
    std::int64_t best_objective = 0; // lowest energy + offset seen
    std::string seed;
    ExchangeStats exchange;
};

/// Runs until some replica reaches energy + offset == 2 target_t, i.e.
/// unsat_count == target_t on mapped instances.
PtResult pt_run(const PLocalInstance& pl, long target_t, const PtConfig& cfg);

} // namespace mcforge
