#include "mcforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "mcforge/errors.hpp"
#include "mcforge/io.hpp"
#include "mcforge/isd.hpp"
#include "mcforge/ising.hpp"
#include "mcforge/mceliece.hpp"
#include "mcforge/timing.hpp"

namespace mcforge {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr const char* manifest_format = "mceliece-ising-campaign/v1";

double stddev(std::span<const double> v) {
    if (v.size() < 2) return 0;
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double mean(std::span<const double> v) {
    return v.empty() ? 0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct LinearFit {
    double slope, intercept;
};

std::optional<LinearFit> least_squares(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) return std::nullopt;
    const double b = sxy / sxx;
    return LinearFit{b, my - b * mx};
}

// Runs job(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) job(i);
    };
    const auto n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (n <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("manifest field '") + key + "' has the wrong type");
    }
}

std::string instance_seed(const std::string& base, const Combo& c, std::size_t i) {
    return base + "/N" + std::to_string(c.n) + "/t" + std::to_string(c.t) + "/m" + std::to_string(c.m) + "/i" +
           std::to_string(i);
}

void validate_combo(const Combo& c) {
    if (c.m < 2 || c.m > 16) throw UsageError("campaign combo needs 2 <= m <= 16");
    if (c.t < 1) throw UsageError("campaign combo needs t >= 1");
    if (c.n <= static_cast<std::size_t>(c.t) * c.m || c.n > (std::size_t{1} << c.m))
        throw UsageError("campaign combo N=" + std::to_string(c.n) + " t=" + std::to_string(c.t) + " m=" +
                         std::to_string(c.m) + " needs t m < N <= 2^m");
}

nlohmann::json fit_json(const std::optional<ScalingFit>& f) {
    if (!f) return nullptr;
    return {{"x", f->x},
            {"y", f->y},
            {"slope", f->slope},
            {"intercept", f->intercept},
            {"slope_ci95", {f->slope_lo, f->slope_hi}},
            {"intercept_ci95", {f->intercept_lo, f->intercept_hi}},
            {"r2", f->r2},
            {"residuals", f->residuals},
            {"bootstrap_resamples", f->resamples}};
}

} // namespace

double tts_at_confidence(double tau, double p_succ, double confidence) {
    if (!(tau > 0)) throw UsageError("tau must be positive");
    if (!(p_succ > 0 && p_succ < 1)) throw UsageError("success probability must lie strictly between 0 and 1");
    if (!(confidence > 0 && confidence < 1)) throw UsageError("confidence must lie strictly between 0 and 1");
    return tau * std::log1p(-confidence) / std::log1p(-p_succ);
}

double tts_from_success_prob(double tau, double p_succ) { return tts_at_confidence(tau, p_succ, 0.99); }

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw UsageError("quantile of an empty sample");
    if (!(q >= 0 && q <= 1)) throw UsageError("quantile level must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double h = static_cast<double>(xs.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    const double w = h - static_cast<double>(lo);
    if (std::isinf(xs[lo]) || (w > 0 && std::isinf(xs[hi]))) return inf;
    if (w == 0) return xs[lo];
    return xs[lo] + w * (xs[hi] - xs[lo]);
}

QuantileEstimate tts_from_runtime_ranks(std::span<const double> runtimes, double q, Rng& rng, std::size_t resamples) {
    if (runtimes.empty()) throw UsageError("no runtimes to rank");
    if (resamples < 1000) throw UsageError("at least 1000 bootstrap resamples are required");
    std::vector<double> xs(runtimes.begin(), runtimes.end());
    for (double& x : xs)
        if (std::isnan(x)) x = inf;
    QuantileEstimate est;
    est.value = quantile(xs, q);
    est.infinite = std::isinf(est.value);
    est.resamples = resamples;
    std::vector<double> boot, sample(xs.size());
    boot.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& s : sample) s = xs[rng.below(xs.size())];
        const double v = quantile(sample, q);
        if (std::isfinite(v)) boot.push_back(v);
    }
    est.bootstrap_stderr = boot.empty() ? inf : stddev(boot);
    return est;
}

ScalingFit fit_scaling(std::span<const double> x, std::span<const double> y, Rng& rng, std::size_t resamples) {
    if (x.size() != y.size()) throw UsageError("fit_scaling: x and y differ in length");
    auto fit = least_squares(x, y);
    if (!fit) throw UsageError("fit_scaling needs at least two distinct x values");
    ScalingFit out;
    out.x.assign(x.begin(), x.end());
    out.y.assign(y.begin(), y.end());
    out.slope = fit->slope;
    out.intercept = fit->intercept;
    const double my = mean(y);
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit->intercept + fit->slope * x[i]);
        out.residuals.push_back(r);
        ss_res += r * r;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    out.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1;

    std::vector<double> slopes, intercepts, bx(x.size()), by(x.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto j = rng.below(x.size());
            bx[i] = x[j];
            by[i] = y[j];
        }
        if (auto f = least_squares(bx, by)) {
            slopes.push_back(f->slope);
            intercepts.push_back(f->intercept);
        }
    }
    out.resamples = slopes.size();
    if (slopes.empty()) {
        out.slope_lo = out.slope_hi = out.slope;
        out.intercept_lo = out.intercept_hi = out.intercept;
    } else {
        out.slope_lo = quantile(slopes, 0.025);
        out.slope_hi = quantile(slopes, 0.975);
        out.intercept_lo = quantile(intercepts, 0.025);
        out.intercept_hi = quantile(intercepts, 0.975);
    }
    return out;
}

SolverKind parse_solver(const std::string& s) {
    if (s == "stern") return SolverKind::Stern;
    if (s == "pt") return SolverKind::PT;
    throw UsageError("unknown solver '" + s + "' (expected stern or pt)");
}

std::string solver_name(SolverKind s) { return s == SolverKind::Stern ? "stern" : "pt"; }

CampaignManifest manifest_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("campaign manifest must be a JSON object");
    if (j.contains("format") && j.at("format") != manifest_format)
        throw UsageError(std::string("campaign manifest format must be ") + manifest_format);
    CampaignManifest m;
    if (!j.contains("solver")) throw UsageError("campaign manifest needs a solver");
    m.solver = parse_solver(get_or<std::string>(j, "solver", ""));
    m.seed = get_or<std::string>(j, "seed", m.seed);
    m.instances = get_or<std::size_t>(j, "instances_per_combo", m.instances);
    m.bootstrap = get_or<std::size_t>(j, "bootstrap", m.bootstrap);
    m.threads = get_or<unsigned>(j, "threads", m.threads);
    m.allow_singular_s = get_or<bool>(j, "allow_singular_s", m.allow_singular_s);
    m.out_dir = get_or<std::string>(j, "out_dir", "");

    if (j.contains("combos")) {
        for (const auto& c : j.at("combos"))
            m.grid.push_back({get_or<std::size_t>(c, "n", 0), get_or<unsigned>(c, "t", 0), get_or<unsigned>(c, "m", 0)});
    } else if (j.contains("grid")) {
        const auto& g = j.at("grid");
        const auto ms = get_or<std::vector<unsigned>>(g, "m", {});
        const auto ts = get_or<std::vector<unsigned>>(g, "t", {});
        const bool by_k = g.contains("k");
        if (by_k == g.contains("n")) throw UsageError("manifest grid needs exactly one of 'k' and 'n'");
        const auto sizes = get_or<std::vector<std::size_t>>(g, by_k ? "k" : "n", {});
        for (auto mm : ms)
            for (auto t : ts)
                for (auto s : sizes) m.grid.push_back({by_k ? s + static_cast<std::size_t>(t) * mm : s, t, mm});
    }
    if (m.grid.empty()) throw UsageError("campaign manifest has an empty grid");
    for (const auto& c : m.grid) validate_combo(c);
    if (m.instances < 1) throw UsageError("instances_per_combo must be at least 1");
    if (m.bootstrap < 1000) throw UsageError("bootstrap must be at least 1000");

    if (j.contains("pt")) {
        const auto& p = j.at("pt");
        m.pt.num_replicas = get_or<unsigned>(p, "replicas", m.pt.num_replicas);
        m.pt.beta_min = get_or<double>(p, "beta_min", m.pt.beta_min);
        m.pt.beta_max = get_or<double>(p, "beta_max", m.pt.beta_max);
        m.pt.max_sweeps = get_or<std::uint64_t>(p, "sweeps", m.pt.max_sweeps);
        m.pt.repetitions = get_or<unsigned>(p, "repetitions", m.pt.repetitions);
    }
    temperature_ladder(m.pt); // validates the ladder
    if (m.pt.repetitions < 1) throw UsageError("pt.repetitions must be at least 1");
    if (j.contains("stern")) {
        const auto& s = j.at("stern");
        m.stern.p = get_or<unsigned>(s, "p", m.stern.p);
        m.stern.successes = get_or<std::uint64_t>(s, "successes", m.stern.successes);
        m.stern.max_iters = get_or<std::uint64_t>(s, "max_iters", m.stern.max_iters);
    }
    if (m.stern.successes < 2) throw UsageError("stern.successes must be at least 2");
    return m;
}

nlohmann::json to_json(const CampaignManifest& m) {
    nlohmann::json combos = nlohmann::json::array();
    for (const auto& c : m.grid) combos.push_back({{"n", c.n}, {"t", c.t}, {"m", c.m}});
    return {{"format", manifest_format},
            {"solver", solver_name(m.solver)},
            {"seed", m.seed},
            {"instances_per_combo", m.instances},
            {"combos", combos},
            {"pt",
             {{"replicas", m.pt.num_replicas},
              {"beta_min", m.pt.beta_min},
              {"beta_max", m.pt.beta_max},
              {"sweeps", m.pt.max_sweeps},
              {"repetitions", m.pt.repetitions}}},
            {"stern", {{"p", m.stern.p}, {"successes", m.stern.successes}, {"max_iters", m.stern.max_iters}}},
            {"bootstrap", m.bootstrap},
            {"threads", m.threads},
            {"allow_singular_s", m.allow_singular_s},
            {"out_dir", m.out_dir.string()}};
}

nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j = {{"combo", r.combo},
                        {"instance", r.instance},
                        {"repetition", r.repetition},
                        {"instance_seed", r.instance_seed},
                        {"solver_seed", r.solver_seed},
                        {"success", r.success},
                        {"work", r.work},
                        {"cpu_time_s", r.cpu_time_s},
                        {"wall_time_s", r.wall_time_s}};
    if (!r.error.empty()) j["error"] = r.error;
    if (r.successes) {
        j["successes"] = r.successes;
        j["p_hat"] = r.p_hat;
        j["tau_s"] = r.tau_s;
        j["log2_tts"] = r.log2_tts;
    }
    return j;
}

unsigned worker_cap(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FORGE_THREADS"); env && *env) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (*end != '\0' || cap < 1) throw UsageError("FORGE_THREADS must be a positive integer");
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

RunRecord stern_measure(const McElieceInstance& inst, unsigned p, std::uint64_t successes, std::uint64_t max_iters,
                        const std::string& seed) {
    RunRecord r;
    r.solver_seed = seed;
    const WallTimer wall;
    const auto A = augmented_system(public_parity_check(inst));
    Rng rng(seed);
    const auto s = stern_sample(A, static_cast<unsigned>(inst.t), p, successes, max_iters, rng);
    r.wall_time_s = wall.seconds();
    r.work = s.iterations;
    r.successes = s.successes;
    r.cpu_time_s = s.cpu_time_s;
    if (s.successes < 2 || s.iterations < 2) {
        r.error = "fewer than two successes within " + std::to_string(max_iters) + " iterations";
        return r;
    }
    r.success = true;
    r.tau_s = s.cpu_time_s / static_cast<double>(s.iterations);
    // Inverse sampling: unbiased estimator of P from the stopping time.
    r.p_hat = static_cast<double>(s.successes - 1) / static_cast<double>(s.iterations - 1);
    // At least one iteration is always spent.
    const double tts = r.p_hat >= 0.99 ? r.tau_s : tts_from_success_prob(r.tau_s, r.p_hat);
    r.log2_tts = std::log2(tts);
    return r;
}

TtsReport aggregate_combo(const Combo& c, SolverKind solver, unsigned p, std::span<const RunRecord> runs, Rng& rng,
                          std::size_t resamples) {
    TtsReport rep;
    rep.combo = c;
    rep.solver = solver;
    rep.p = p;
    rep.runs = runs.size();
    rep.bootstrap_resamples = resamples;
    std::size_t max_instance = 0;
    for (const auto& r : runs) {
        max_instance = std::max(max_instance, r.instance + 1);
        rep.failures += !r.success;
        rep.total_work += r.work;
        rep.total_cpu_s += r.cpu_time_s;
        rep.total_wall_s += r.wall_time_s;
    }
    rep.instances = max_instance;
    if (runs.empty()) {
        rep.infinite = true;
        rep.tts_99 = rep.tts_50 = rep.log2_tts_99 = inf;
        return rep;
    }

    if (solver == SolverKind::PT) {
        std::vector<double> cpu, wall;
        for (const auto& r : runs) {
            cpu.push_back(r.success ? r.cpu_time_s : inf);
            wall.push_back(r.success ? r.wall_time_s : inf);
        }
        const auto q99 = tts_from_runtime_ranks(cpu, 0.99, rng, resamples);
        const auto q50 = tts_from_runtime_ranks(cpu, 0.50, rng, resamples);
        rep.tts_99 = q99.value;
        rep.tts_50 = q50.value;
        rep.tts_99_wall = quantile(wall, 0.99);
        rep.infinite = q99.infinite;
        rep.log2_tts_99 = std::log2(q99.value);
        rep.log2_stderr = q99.infinite ? inf : q99.bootstrap_stderr / (q99.value * std::numbers::ln2);
        return rep;
    }

    rep.theoretical_log2_tts = stern_theoretical_tts(c.n, c.k(), c.t, p, TtsConvention::Confidence99);
    std::vector<double> l99, l50, ph;
    for (const auto& r : runs) {
        if (!r.success) continue;
        l99.push_back(r.log2_tts);
        const double t50 = r.p_hat >= 0.5 ? r.tau_s : tts_at_confidence(r.tau_s, r.p_hat, 0.5);
        l50.push_back(std::log2(t50));
        ph.push_back(r.p_hat);
    }
    if (l99.empty()) {
        rep.infinite = true;
        rep.tts_99 = rep.tts_50 = rep.log2_tts_99 = inf;
        return rep;
    }
    rep.log2_tts_99 = mean(l99);
    rep.tts_99 = std::exp2(rep.log2_tts_99);
    rep.tts_50 = std::exp2(mean(l50));
    rep.success_prob = mean(ph);
    std::vector<double> boot, sample(l99.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& s : sample) s = l99[rng.below(l99.size())];
        boot.push_back(mean(sample));
    }
    rep.log2_stderr = stddev(boot);
    return rep;
}

CampaignResult run_campaign(const CampaignManifest& m) {
    for (const auto& c : m.grid) validate_combo(c);
    const unsigned threads = worker_cap(m.threads);
    const Rng master(m.seed);

    std::vector<unsigned> pvals;
    for (const auto& c : m.grid)
        pvals.push_back(m.stern.p ? m.stern.p : stern_theoretical_tts_best(c.n, c.k(), c.t).p);

    struct Prepared {
        std::string seed;
        std::optional<McElieceInstance> inst;
        std::optional<PLocalInstance> pl;
        std::string error;
    };
    const std::size_t per = m.instances;
    std::vector<Prepared> prepared(m.grid.size() * per);
    parallel_for(prepared.size(), threads, [&](std::size_t idx) {
        auto& pr = prepared[idx];
        const auto& c = m.grid[idx / per];
        pr.seed = instance_seed(m.seed, c, idx % per);
        try {
            auto g = generate_instance(c.n, c.t, c.m, pr.seed, m.allow_singular_s);
            if (m.solver == SolverKind::PT) pr.pl = map_to_ising(g.instance);
            pr.inst = std::move(g.instance);
        } catch (const std::exception& e) {
            pr.error = std::string("generation failed: ") + e.what();
        }
    });

    const std::size_t reps = m.solver == SolverKind::PT ? m.pt.repetitions : 1;
    std::vector<RunRecord> runs(prepared.size() * reps);
    parallel_for(runs.size(), threads, [&](std::size_t idx) {
        const std::size_t pi = idx / reps;
        const auto& pr = prepared[pi];
        RunRecord r;
        r.combo = pi / per;
        r.instance = pi % per;
        r.repetition = idx % reps;
        r.instance_seed = pr.seed;
        if (!pr.inst) {
            r.error = pr.error;
            runs[idx] = std::move(r);
            return;
        }
        try {
            if (m.solver == SolverKind::PT) {
                PtConfig cfg = m.pt;
                cfg.seed = pr.seed + "/rep" + std::to_string(r.repetition);
                const WallTimer wall;
                const auto res = pt_run(*pr.pl, static_cast<long>(pr.inst->t), cfg);
                r.solver_seed = cfg.seed;
                r.success = res.success;
                r.work = res.sweeps;
                r.cpu_time_s = res.cpu_time_s;
                r.wall_time_s = wall.seconds();
                if (!res.success) r.error = "sweep budget exhausted";
            } else {
                auto rec = stern_measure(*pr.inst, pvals[r.combo], m.stern.successes, m.stern.max_iters, pr.seed + "/stern");
                rec.combo = r.combo;
                rec.instance = r.instance;
                rec.repetition = 0;
                rec.instance_seed = pr.seed;
                r = std::move(rec);
            }
        } catch (const std::exception& e) {
            r.success = false;
            r.error = e.what();
        }
        runs[idx] = std::move(r);
    });

    CampaignResult out;
    const std::size_t block = per * reps;
    for (std::size_t ci = 0; ci < m.grid.size(); ++ci) {
        Rng rng = master.split("bootstrap").split(ci);
        out.reports.push_back(aggregate_combo(m.grid[ci], m.solver, m.solver == SolverKind::Stern ? pvals[ci] : 0,
                                              std::span(runs).subspan(ci * block, block), rng, m.bootstrap));
    }
    out.runs = std::move(runs);

    std::vector<double> ks, ns, th, ys;
    for (const auto& r : out.reports) {
        if (r.infinite) continue;
        ks.push_back(static_cast<double>(r.combo.k()));
        ns.push_back(static_cast<double>(r.combo.n));
        th.push_back(r.theoretical_log2_tts);
        ys.push_back(r.log2_tts_99);
    }
    auto try_fit = [&](const std::vector<double>& x, const char* label) -> std::optional<ScalingFit> {
        if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) return std::nullopt;
        Rng rng = master.split(label);
        return fit_scaling(x, ys, rng, m.bootstrap);
    };
    out.fit_k = try_fit(ks, "fit-k");
    out.fit_n = try_fit(ns, "fit-n");
    if (m.solver == SolverKind::Stern) out.fit_theory = try_fit(th, "fit-theory");
    return out;
}

void write_campaign(const std::filesystem::path& dir, const CampaignManifest& m, const CampaignResult& r) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::ostringstream rep;
    rep.precision(10);
    rep << "n,k,t,m,solver,p,instances,runs,failures,tts_99,tts_50,tts_99_wall,log2_tts_99,log2_stderr,infinite,"
           "success_prob,theoretical_log2_tts,total_work,total_cpu_s,total_wall_s,bootstrap_resamples\n";
    std::ostringstream sc;
    sc.precision(10);
    sc << "n,k,t,m,log2_tts_99,log2_tts_50,log2_stderr,theoretical_log2_tts\n";
    for (const auto& t : r.reports) {
        const auto& c = t.combo;
        rep << c.n << ',' << c.k() << ',' << c.t << ',' << c.m << ',' << solver_name(t.solver) << ',' << t.p << ','
            << t.instances << ',' << t.runs << ',' << t.failures << ',' << t.tts_99 << ',' << t.tts_50 << ','
            << t.tts_99_wall << ',' << t.log2_tts_99 << ',' << t.log2_stderr << ',' << (t.infinite ? 1 : 0) << ','
            << t.success_prob << ',' << t.theoretical_log2_tts << ',' << t.total_work << ',' << t.total_cpu_s << ','
            << t.total_wall_s << ',' << t.bootstrap_resamples << '\n';
        sc << c.n << ',' << c.k() << ',' << c.t << ',' << c.m << ',' << t.log2_tts_99 << ',' << std::log2(t.tts_50)
           << ',' << t.log2_stderr << ',' << t.theoretical_log2_tts << '\n';
    }
    write_file(dir / "reports.csv", rep.str());
    write_file(dir / "scaling.csv", sc.str());

    std::string lines;
    for (const auto& run : r.runs) lines += to_json(run).dump() + "\n";
    write_file(dir / "runs.jsonl", lines);

    write_json(dir / "fits.json", {{"manifest", to_json(m)},
                                   {"log2_tts_vs_k", fit_json(r.fit_k)},
                                   {"log2_tts_vs_n", fit_json(r.fit_n)},
                                   {"measured_vs_theoretical", fit_json(r.fit_theory)}});
}

} // namespace mcforge
