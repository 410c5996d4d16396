#pragma once

// Information set decoding: plain ISD and the "heavy" Stern variant (no
// collision lists, full weight check of every 2p-column combination), with
// closed-form per-iteration success probabilities and theoretical TTS.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "mcforge/gf2.hpp"
#include "mcforge/mceliece.hpp"

namespace mcforge {

struct PublicParityCheck {
    BitMatrix H; // (N-k) x N, H (x G')^T = 0 for all x
    BitVector z; // H q'
};

PublicParityCheck public_parity_check(const McElieceInstance& inst);

/// (H | z): N principal columns plus the syndrome.
inline BitMatrix augmented_system(const PublicParityCheck& pc) { return pc.H.augment(pc.z); }

struct PartitionOutcome {
    bool full_rank = false;
    std::optional<BitVector> error;
};

/// One Stern iteration on a fixed column order: order[0..N-k) is the
/// redundancy set R, the rest is I, split into I1 (first floor(k/2)) and I2.
/// Accepts when a p-from-I1 x p-from-I2 column sum with y' has weight t - 2p.
PartitionOutcome stern_partition(const BitMatrix& A, unsigned t, unsigned p, std::span<const std::size_t> order);

/// Plain ISD on a fixed order: succeeds when the reduced syndrome has weight <= t.
PartitionOutcome isd_partition(const BitMatrix& A, unsigned t, std::span<const std::size_t> order);

/// One full iteration: random partitions are redrawn until A restricted to R
/// has full rank (those redraws are not iterations). Empty on failure.
std::optional<BitVector> stern_iteration(const BitMatrix& A, unsigned t, unsigned p, Rng& rng);
std::optional<BitVector> isd_iteration(const BitMatrix& A, unsigned t, Rng& rng);

struct IsdConfig {
    unsigned p = 1;
    std::uint64_t max_iters = 100'000'000;
    std::string seed = "0";
    unsigned workers = 1;
};

struct SolverResult {
    bool success = false;
    BitVector error;
    BitVector message;
    std::uint64_t iterations = 0;
    double wall_time_s = 0;
    double cpu_time_s = 0;
    double per_iter_time_s = 0;
    std::string seed;
};

/// Runs iterations on cfg.workers threads (stream i split from the seed) until
/// one succeeds or max_iters iterations have been spent in total.
SolverResult stern_run(const McElieceInstance& inst, const IsdConfig& cfg);
SolverResult plain_isd_run(const McElieceInstance& inst, const IsdConfig& cfg);

struct IterationSample {
    std::uint64_t iterations = 0;
    std::uint64_t successes = 0;
    double cpu_time_s = 0;
};

/// Single-threaded inverse sampling: iterate until target_successes
/// successes or max_iters iterations.
IterationSample stern_sample(const BitMatrix& A, unsigned t, unsigned p, std::uint64_t target_successes,
                             std::uint64_t max_iters, Rng& rng);

/// Natural log of C(n, k); -inf when k < 0 or k > n.
long double log_binomial(long double n, long double k);

/// [C(t,2p) C(N-t,k-2p) / C(N,k)] * [C(floor(k/2),p) C(ceil(k/2),p) / C(k,2p)].
double stern_success_probability(std::size_t n, std::size_t k, unsigned t, unsigned p);
long double log_stern_success_probability(std::size_t n, std::size_t k, unsigned t, unsigned p);
/// C(N-t,k) / C(N,k).
double isd_success_probability(std::size_t n, std::size_t k, unsigned t);

/// Elementary-operation cost of one heavy Stern iteration:
/// (N-k)^3 + (N-k) C(floor(k/2),p) C(ceil(k/2),p).
long double stern_iteration_cost(std::size_t n, std::size_t k, unsigned p);

enum class TtsConvention {
    Confidence99, // tau ln(0.01) / ln(1 - P): cost to reach 99% success
    Expected,     // tau / P: expected cost to the first success
};

/// log2 of the theoretical time to solution in elementary operations.
double stern_theoretical_tts(std::size_t n, std::size_t k, unsigned t, unsigned p,
                             TtsConvention conv = TtsConvention::Confidence99);

struct TheoreticalTts {
    double log2_tts = 0;
    unsigned p = 1;
};
/// Minimum over p in {1, 2} (those that are valid for the parameters).
TheoreticalTts stern_theoretical_tts_best(std::size_t n, std::size_t k, unsigned t,
                                          TtsConvention conv = TtsConvention::Confidence99);

} // namespace mcforge
