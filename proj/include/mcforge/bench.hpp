#pragma once

// Time-to-solution statistics and benchmark campaigns over parameter grids.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcforge/pt.hpp"
#include "mcforge/rng.hpp"

namespace mcforge {

/// tau ln(0.01) / ln(1 - p): time to reach 99% success with per-attempt
/// success probability p. UsageError unless 0 < p < 1 and tau > 0.
double tts_from_success_prob(double tau, double p_succ);
/// Same at an arbitrary confidence level in (0, 1).
double tts_at_confidence(double tau, double p_succ, double confidence);

/// Linear-interpolation sample quantile (Hyndman-Fan type 7). +inf entries
/// rank above every finite value; the result is +inf when the interpolation
/// touches one. UsageError for an empty sample or q outside [0, 1].
double quantile(std::vector<double> xs, double q);

struct QuantileEstimate {
    double value = 0;
    double bootstrap_stderr = 0; // over finite resampled quantiles
    std::size_t resamples = 0;
    bool infinite = false;       // the quantile falls among censored runs
};

/// Quantile of run times with censored (unsolved) runs entered as +inf.
/// UsageError for an empty list or fewer than 1000 resamples.
QuantileEstimate tts_from_runtime_ranks(std::span<const double> runtimes, double q, Rng& rng,
                                        std::size_t resamples = 1000);

/// Least squares y = intercept + slope x, with percentile bootstrap 95%
/// intervals from resampling the points.
struct ScalingFit {
    std::vector<double> x, y;
    double slope = 0, intercept = 0;
    double slope_lo = 0, slope_hi = 0;
    double intercept_lo = 0, intercept_hi = 0;
    double r2 = 0;
    std::vector<double> residuals;
    std::size_t resamples = 0;
};
/// UsageError with fewer than two distinct x values.
ScalingFit fit_scaling(std::span<const double> x, std::span<const double> y, Rng& rng, std::size_t resamples = 1000);

enum class SolverKind { Stern, PT };
SolverKind parse_solver(const std::string& s); // UsageError
std::string solver_name(SolverKind s);

struct Combo {
    std::size_t n = 0;
    unsigned t = 0;
    unsigned m = 0;
    std::size_t k() const { return n - static_cast<std::size_t>(t) * m; }
};

struct SternCampaignConfig {
    unsigned p = 0;                     // 0 picks the theoretically best p
    std::uint64_t successes = 8;        // inverse-sampling target per instance
    std::uint64_t max_iters = 10'000'000;
};

struct CampaignManifest {
    std::string seed = "campaign";
    SolverKind solver = SolverKind::PT;
    std::vector<Combo> grid;
    std::size_t instances = 64;         // per combo
    PtConfig pt;                        // PT settings; pt.repetitions runs per instance
    SternCampaignConfig stern;
    std::size_t bootstrap = 1000;
    unsigned threads = 0;               // 0: hardware concurrency
    bool allow_singular_s = false;
    std::filesystem::path out_dir;      // empty: nothing written
};

/// Manifest JSON:
///   {"format": "mceliece-ising-campaign/v1", "solver": "pt" | "stern", "seed",
///    "instances_per_combo", "grid": {"m": [..], "t": [..], "k" | "n": [..]}
///    or "combos": [{"n", "t", "m"}], "pt": {"replicas", "beta_min",
///    "beta_max", "sweeps", "repetitions"}, "stern": {"p", "successes",
///    "max_iters"}, "bootstrap", "threads", "allow_singular_s", "out_dir"}
/// Everything except the solver and the grid has a default.
CampaignManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignManifest& m);

/// One solver run. PT: a repetition on one instance. Stern: inverse sampling
/// on one instance.
struct RunRecord {
    std::size_t combo = 0, instance = 0, repetition = 0;
    std::string instance_seed, solver_seed;
    bool success = false;
    std::string error;                  // generation or solver failure
    std::uint64_t work = 0;             // sweeps (PT) or iterations (Stern)
    std::uint64_t successes = 0;        // Stern only
    double cpu_time_s = 0, wall_time_s = 0;
    double p_hat = 0;                   // Stern: (s - 1) / (n - 1)
    double tau_s = 0;                   // Stern: CPU time per iteration
    double log2_tts = 0;                // Stern: per-instance log2 TTS(99%)
};
nlohmann::json to_json(const RunRecord& r);

struct TtsReport {
    Combo combo;
    SolverKind solver = SolverKind::PT;
    unsigned p = 0;                     // Stern p
    std::size_t instances = 0, runs = 0, failures = 0;
    // PT: quantiles of per-run CPU time, censored runs ranked last.
    // Stern: 2^(mean over instances of log2 TTS) at 99% and 50% confidence.
    double tts_99 = 0, tts_50 = 0;
    double tts_99_wall = 0;             // PT only
    double log2_tts_99 = 0;
    double log2_stderr = 0;             // bootstrap stderr of log2_tts_99
    bool infinite = false;
    double success_prob = 0;            // Stern: mean p_hat
    double theoretical_log2_tts = 0;    // Stern closed form, elementary operations
    std::uint64_t total_work = 0;
    double total_cpu_s = 0, total_wall_s = 0;
    std::size_t bootstrap_resamples = 0;
};

struct CampaignResult {
    std::vector<TtsReport> reports;
    std::vector<RunRecord> runs;        // ordered by (combo, instance, repetition)
    std::optional<ScalingFit> fit_k, fit_n, fit_theory;
};

/// Generates manifest.instances instances per combo with per-instance seeds,
/// runs the solver on a bounded worker pool and merges results by key.
/// Failures are recorded per run; the campaign always completes.
CampaignResult run_campaign(const CampaignManifest& m);

/// Builds a report from the run records of one combo.
TtsReport aggregate_combo(const Combo& c, SolverKind solver, unsigned p, std::span<const RunRecord> runs, Rng& rng,
                          std::size_t resamples);

/// Writes reports.csv, scaling.csv, runs.jsonl and fits.json into dir.
void write_campaign(const std::filesystem::path& dir, const CampaignManifest& m, const CampaignResult& r);

/// Stern measured TTS of one instance by inverse sampling.
RunRecord stern_measure(const McElieceInstance& inst, unsigned p, std::uint64_t successes, std::uint64_t max_iters,
                        const std::string& seed);

/// min(requested or hardware concurrency, FORGE_THREADS if set), at least 1.
unsigned worker_cap(unsigned requested);

} // namespace mcforge
