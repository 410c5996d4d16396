#include "mcforge/isd.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "mcforge/errors.hpp"
#include "mcforge/timing.hpp"

namespace mcforge {

PublicParityCheck public_parity_check(const McElieceInstance& inst) {
    auto rk = rank_and_kernel(inst.G_prime);
    if (rk.rank != inst.k) throw UsageError("G' does not have full row rank");
    if (rk.kernel.empty()) throw UsageError("code has no redundancy (k == N)");
    PublicParityCheck pc;
    pc.H = BitMatrix::from_rows(rk.kernel);
    pc.z = matvec(pc.H, inst.q_prime);
    return pc;
}

namespace {

// Column vectors of the reduced system packed contiguously, `stride` words each.
struct ColumnSet {
    std::size_t stride = 0;
    std::vector<Word> data;
    const Word* at(std::size_t i) const { return data.data() + i * stride; }
};

void extract_column(const BitMatrix& m, std::size_t c, Word* out) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        if (m.get(r, c)) out[r / word_bits] |= Word{1} << (r % word_bits);
}

// All XOR sums of p columns out of `cols` (plus `base` if given).
ColumnSet combination_sums(const BitMatrix& m, std::span<const std::size_t> cols, unsigned p, const Word* base,
                           std::vector<std::vector<std::size_t>>& members) {
    ColumnSet out;
    out.stride = words_for(m.rows());
    std::vector<Word> single(cols.size() * out.stride, 0);
    for (std::size_t i = 0; i < cols.size(); ++i) extract_column(m, cols[i], single.data() + i * out.stride);

    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (cols.size() < p) return out;
    while (true) {
        const std::size_t off = out.data.size();
        out.data.resize(off + out.stride, 0);
        Word* dst = out.data.data() + off;
        if (base)
            for (std::size_t w = 0; w < out.stride; ++w) dst[w] = base[w];
        for (auto i : idx)
            for (std::size_t w = 0; w < out.stride; ++w) dst[w] ^= single[i * out.stride + w];
        std::vector<std::size_t> chosen;
        for (auto i : idx) chosen.push_back(cols[i]);
        members.push_back(std::move(chosen));
        // next combination in lexicographic order
        std::size_t j = p;
        while (j > 0 && idx[j - 1] == cols.size() - p + (j - 1)) --j;
        if (j == 0) break;
        ++idx[j - 1];
        for (std::size_t l = j; l < p; ++l) idx[l] = idx[l - 1] + 1;
    }
    return out;
}

BitVector error_from(const BitMatrix& m, std::span<const std::size_t> order, const Word* rows_bits,
                     std::span<const std::size_t> extra) {
    const std::size_t n = m.cols() - 1;
    BitVector e(n);
    for (std::size_t r = 0; r < m.rows(); ++r)
        if ((rows_bits[r / word_bits] >> (r % word_bits)) & 1U) e.set(order[r]);
    for (auto c : extra) e.set(c);
    return e;
}

void check_order(const BitMatrix& A, std::span<const std::size_t> order) {
    if (A.cols() < 2 || order.size() != A.cols() - 1) throw UsageError("partition must order all N principal columns");
    if (A.rows() >= A.cols() - 1) throw UsageError("system has no information set (k == 0)");
}

} // namespace

PartitionOutcome stern_partition(const BitMatrix& A, unsigned t, unsigned p, std::span<const std::size_t> order) {
    check_order(A, order);
    const std::size_t n = A.cols() - 1, r = A.rows(), k = n - r;
    if (p < 1 || 2 * p > t || p > k / 2) throw UsageError("Stern parameter p must satisfy 1 <= p, 2p <= t, p <= k/2");
    BitMatrix m = A;
    PartitionOutcome out;
    out.full_rank = gauss_jordan_inplace(m, order.subspan(0, r));
    if (!out.full_rank) return out;

    const std::size_t stride = words_for(r);
    std::vector<Word> y(stride, 0);
    extract_column(m, n, y.data());
    const auto info = order.subspan(r);
    const auto i1 = info.subspan(0, k / 2), i2 = info.subspan(k / 2);

    std::vector<std::vector<std::size_t>> mem1, mem2;
    const auto s1 = combination_sums(m, i1, p, y.data(), mem1);
    const auto s2 = combination_sums(m, i2, p, nullptr, mem2);
    const std::size_t target = t - 2 * p;
    for (std::size_t a = 0; a < mem1.size(); ++a) {
        const Word* u = s1.at(a);
        for (std::size_t b = 0; b < mem2.size(); ++b) {
            const Word* v = s2.at(b);
            std::size_t w = 0;
            for (std::size_t i = 0; i < stride && w <= target; ++i) w += static_cast<std::size_t>(std::popcount(u[i] ^ v[i]));
            if (w != target) continue;
            std::vector<Word> bits(stride);
            for (std::size_t i = 0; i < stride; ++i) bits[i] = u[i] ^ v[i];
            std::vector<std::size_t> extra = mem1[a];
            extra.insert(extra.end(), mem2[b].begin(), mem2[b].end());
            out.error = error_from(m, order, bits.data(), extra);
            return out;
        }
    }
    return out;
}

PartitionOutcome isd_partition(const BitMatrix& A, unsigned t, std::span<const std::size_t> order) {
    check_order(A, order);
    const std::size_t n = A.cols() - 1, r = A.rows();
    BitMatrix m = A;
    PartitionOutcome out;
    out.full_rank = gauss_jordan_inplace(m, order.subspan(0, r));
    if (!out.full_rank) return out;
    std::vector<Word> y(words_for(r), 0);
    extract_column(m, n, y.data());
    std::size_t w = 0;
    for (auto x : y) w += static_cast<std::size_t>(std::popcount(x));
    if (w <= t) out.error = error_from(m, order, y.data(), {});
    return out;
}

namespace {

template <class F>
std::optional<BitVector> random_partition_iteration(const BitMatrix& A, Rng& rng, F&& attempt) {
    std::vector<std::size_t> order(A.cols() - 1);
    for (int tries = 0;; ++tries) {
        if (tries == 1'000'000) throw InternalError("no full-rank redundancy set found");
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order.begin(), order.end());
        auto o = attempt(order);
        if (o.full_rank) return std::move(o.error);
    }
}

} // namespace

std::optional<BitVector> stern_iteration(const BitMatrix& A, unsigned t, unsigned p, Rng& rng) {
    return random_partition_iteration(A, rng, [&](const auto& order) { return stern_partition(A, t, p, order); });
}

std::optional<BitVector> isd_iteration(const BitMatrix& A, unsigned t, Rng& rng) {
    return random_partition_iteration(A, rng, [&](const auto& order) { return isd_partition(A, t, order); });
}

namespace {

template <class Iter>
SolverResult parallel_run(const McElieceInstance& inst, const IsdConfig& cfg, Iter&& iteration) {
    if (cfg.workers < 1) throw UsageError("workers must be at least 1");
    const auto pc = public_parity_check(inst);
    const BitMatrix A = augmented_system(pc);
    const Rng master(cfg.seed);

    std::atomic<bool> stop{false};
    std::atomic<std::uint64_t> budget{0};
    std::mutex mu;
    SolverResult res;
    res.seed = cfg.seed;
    std::uint64_t total_iters = 0;
    double total_cpu = 0;

    WallTimer wall;
    auto worker = [&](unsigned id) {
        Rng rng = master.split(static_cast<std::uint64_t>(id));
        const double cpu0 = thread_cpu_seconds();
        std::uint64_t mine = 0;
        while (!stop.load(std::memory_order_relaxed)) {
            if (budget.fetch_add(1, std::memory_order_relaxed) >= cfg.max_iters) break;
            ++mine;
            auto e = iteration(A, rng);
            if (e) {
                std::lock_guard lk(mu);
                if (!res.success) {
                    res.success = true;
                    res.error = std::move(*e);
                }
                stop.store(true);
                break;
            }
        }
        const double cpu = thread_cpu_seconds() - cpu0;
        std::lock_guard lk(mu);
        total_iters += mine;
        total_cpu += cpu;
    };

    if (cfg.workers == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < cfg.workers; ++i) pool.emplace_back(worker, i);
    }
    res.wall_time_s = wall.seconds();
    res.iterations = total_iters;
    res.cpu_time_s = total_cpu;
    res.per_iter_time_s = total_iters ? total_cpu / static_cast<double>(total_iters) : 0.0;
    if (res.success) {
        auto q = solve_left(inst.G_prime, inst.q_prime ^ res.error);
        if (!q) throw InternalError("recovered error does not lead to a codeword");
        res.message = std::move(*q);
    }
    return res;
}

} // namespace

SolverResult stern_run(const McElieceInstance& inst, const IsdConfig& cfg) {
    return parallel_run(inst, cfg, [&](const BitMatrix& A, Rng& rng) { return stern_iteration(A, inst.t, cfg.p, rng); });
}

SolverResult plain_isd_run(const McElieceInstance& inst, const IsdConfig& cfg) {
    return parallel_run(inst, cfg, [&](const BitMatrix& A, Rng& rng) { return isd_iteration(A, inst.t, rng); });
}

IterationSample stern_sample(const BitMatrix& A, unsigned t, unsigned p, std::uint64_t target_successes,
                             std::uint64_t max_iters, Rng& rng) {
    IterationSample s;
    const double cpu0 = thread_cpu_seconds();
    while (s.successes < target_successes && s.iterations < max_iters) {
        ++s.iterations;
        if (stern_iteration(A, t, p, rng)) ++s.successes;
    }
    s.cpu_time_s = thread_cpu_seconds() - cpu0;
    return s;
}

long double log_binomial(long double n, long double k) {
    if (k < 0 || k > n) return -std::numeric_limits<long double>::infinity();
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

long double log_stern_success_probability(std::size_t n, std::size_t k, unsigned t, unsigned p) {
    if (k >= n || t > n) throw UsageError("need k < N and t <= N");
    if (p < 1 || 2 * p > t || p > k / 2) throw UsageError("Stern parameter p must satisfy 1 <= p, 2p <= t, p <= k/2");
    const long double N = n, K = k, T = t, P = p;
    const long double k1 = std::floor(K / 2), k2 = K - k1;
    return log_binomial(T, 2 * P) + log_binomial(N - T, K - 2 * P) - log_binomial(N, K) + log_binomial(k1, P) +
           log_binomial(k2, P) - log_binomial(K, 2 * P);
}

double stern_success_probability(std::size_t n, std::size_t k, unsigned t, unsigned p) {
    return static_cast<double>(std::exp(log_stern_success_probability(n, k, t, p)));
}

double isd_success_probability(std::size_t n, std::size_t k, unsigned t) {
    if (k > n || t > n) throw UsageError("need k <= N and t <= N");
    const long double N = n, K = k, T = t;
    return static_cast<double>(std::exp(log_binomial(N - T, K) - log_binomial(N, K)));
}

long double stern_iteration_cost(std::size_t n, std::size_t k, unsigned p) {
    const long double r = static_cast<long double>(n - k);
    const long double K = k, k1 = std::floor(K / 2), k2 = K - k1;
    return r * r * r + r * std::exp(log_binomial(k1, p) + log_binomial(k2, p));
}

double stern_theoretical_tts(std::size_t n, std::size_t k, unsigned t, unsigned p, TtsConvention conv) {
    const long double log_p = log_stern_success_probability(n, k, t, p);
    if (!std::isfinite(log_p)) return std::numeric_limits<double>::infinity();
    const long double log2_tau = std::log2(stern_iteration_cost(n, k, p));
    if (conv == TtsConvention::Expected) return static_cast<double>(log2_tau - log_p / std::log(2.0L));
    const long double P = std::exp(log_p);
    if (P >= 0.99L) return static_cast<double>(log2_tau);
    const long double iters = std::log(0.01L) / std::log1p(-P);
    return static_cast<double>(log2_tau + std::log2(iters));
}

TheoreticalTts stern_theoretical_tts_best(std::size_t n, std::size_t k, unsigned t, TtsConvention conv) {
    TheoreticalTts best{std::numeric_limits<double>::infinity(), 0};
    for (unsigned p : {1u, 2u}) {
        if (2 * p > t || p > k / 2) continue;
        const double v = stern_theoretical_tts(n, k, t, p, conv);
        if (v < best.log2_tts) best = {v, p};
    }
    if (best.p == 0) throw UsageError("no valid Stern parameter p for these dimensions");
    return best;
}

} // namespace mcforge
