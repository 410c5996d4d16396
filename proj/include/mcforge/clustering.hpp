#pragma once

// Pair-census analysis of three energy models on N-bit strings:
//   HWM   - energy is the Hamming weight;
//   RPHWM - Hamming weights dealt to the strings by a random permutation;
//   LSHWM - energy of x is |S x| for a uniformly random N x N matrix S.
// N(x, eps) counts ordered pairs (diagonal included) of states that both
// have energy eps N and are at distance x N.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcforge/rng.hpp"

namespace mcforge {

enum class Model { HWM, RPHWM, LSHWM };
Model parse_model(const std::string& s); // UsageError
std::string model_name(Model m);

/// Natural-log binary entropy, S(0) = S(1) = 0. UsageError outside [0, 1].
double entropy(double p);

/// HWM exponent; nullopt where the pair census is identically zero
/// (x / 2 > min(eps, 1 - eps)).
std::optional<double> phi_hwm(double x, double eps);
/// Shared RPHWM / LSHWM exponent -ln 2 + S(x) + 2 S(eps).
double phi_scrambled(double x, double eps);
double phi(Model m, double x, double eps); // -inf for HWM hard zeros

/// Root eps* in (0, 1/2) of S(eps) = ln(2) / 2: below it forbidden distances appear.
double forbidden_onset_eps();

/// Roots x_min < 1/2 < x_max of S(x) = ln 2 - 2 S(eps); pairs at distances
/// outside [x_min, x_max] are forbidden. nullopt when nothing is forbidden.
std::optional<std::pair<double, double>> forbidden_interval(double eps);

/// P_eps = 2^{-2N} C(N, E)^2, the probability that two fixed, distinct,
/// nonzero strings both map to energy E under a random S.
double pair_probability_lshwm(unsigned n, unsigned energy);
/// Same, from a fractional energy; UsageError unless eps N is an integer.
double pair_probability_lshwm_eps(unsigned n, double eps);

/// P(alpha) for the corank of a large random square GF(2) matrix; the
/// infinite product is truncated at j = 64.
double rank_distribution(unsigned alpha);
struct KernelStatistics {
    double mean;     // <2^alpha>
    double variance; // Var[2^alpha]
};
KernelStatistics kernel_statistics();

/// Exact <N(X, E)> for integer distance X and energy E (LSHWM needs E > 0).
double expected_census(Model m, unsigned n, unsigned energy, unsigned distance);

struct PhaseGrid {
    Model model;
    std::vector<double> x_grid, eps_grid;
    std::vector<std::vector<double>> phi;        // [eps][x], -inf for hard zeros
    std::vector<std::vector<bool>> forbidden;    // phi < 0 or hard zero
};
PhaseGrid phase_grid(Model m, std::span<const double> x_grid, std::span<const double> eps_grid);
/// Columns x, eps, phi, forbidden.
void write_phase_csv(std::ostream& out, const PhaseGrid& g);

struct PairCensus {
    Model model;
    unsigned n = 0;
    std::size_t samples = 0;
    std::vector<unsigned> energies;
    std::vector<std::vector<double>> mean;          // [energy index][distance X], per sample
    std::vector<std::vector<double>> variance;      // sample variance across samples
    std::vector<std::vector<std::size_t>> nonzero;  // samples in which the cell was occupied
};

/// HWM is deterministic (one sample). RPHWM and LSHWM draw `samples`
/// disorder realisations. Small shells are counted pair by pair, large ones
/// through the XOR autocorrelation of the shell indicator (Walsh-Hadamard,
/// O(N 2^N)). Requires N <= 24.
PairCensus empirical_census(Model m, unsigned n, std::span<const unsigned> energies, std::size_t samples, Rng& rng);
/// Columns x, eps, count (mean per sample), samples.
void write_census_csv(std::ostream& out, const PairCensus& c);

/// Fraction of random S for which |S x| == |S y| == energy, for fixed
/// nonzero x != y given as N-bit masks.
double lshwm_pair_frequency(unsigned n, unsigned energy, std::uint32_t x, std::uint32_t y, std::size_t samples, Rng& rng);

} // namespace mcforge
