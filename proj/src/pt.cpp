#include "mcforge/pt.hpp"

#include <bit>
#include <cmath>

#include "mcforge/errors.hpp"
#include "mcforge/timing.hpp"

namespace mcforge {

std::vector<double> temperature_ladder(const PtConfig& cfg) {
    if (cfg.num_replicas < 2) throw UsageError("parallel tempering needs at least 2 replicas");
    if (!(cfg.beta_min > 0 && cfg.beta_min < cfg.beta_max)) throw UsageError("need 0 < beta_min < beta_max");
    std::vector<double> b(cfg.num_replicas);
    const double ratio = cfg.beta_max / cfg.beta_min;
    for (unsigned i = 0; i < cfg.num_replicas; ++i)
        b[i] = cfg.beta_min * std::pow(ratio, double(i) / double(cfg.num_replicas - 1));
    b.back() = cfg.beta_max;
    return b;
}

PtModel::PtModel(const PLocalInstance& pl) : num_vars_(pl.num_vars), unit_(pl.unit_coefficients()) {
    num_terms_ = static_cast<std::int64_t>(pl.terms.size());
    var_terms_.resize(num_vars_);
    for (std::size_t i = 0; i < pl.terms.size(); ++i) {
        coeffs_.push_back(pl.terms[i].coeff);
        term_vars_.push_back(pl.terms[i].vars);
        for (auto v : pl.terms[i].vars) {
            if (v >= num_vars_) throw UsageError("term variable out of range");
            var_terms_[v].push_back(static_cast<std::uint32_t>(i));
        }
    }
    if (unit_) {
        words_ = words_for(pl.terms.size());
        masks_.assign(num_vars_ * words_, 0);
        degree_.assign(num_vars_, 0);
        for (std::size_t j = 0; j < num_vars_; ++j) {
            for (auto i : var_terms_[j]) masks_[j * words_ + i / word_bits] ^= Word{1} << (i % word_bits);
            std::int64_t d = 0;
            for (std::size_t w = 0; w < words_; ++w) d += std::popcount(masks_[j * words_ + w]);
            degree_[j] = d;
        }
    }
}

Replica PtModel::make_replica(BitVector x) const {
    if (x.size() != num_vars_) throw UsageError("configuration length does not match the instance");
    Replica r;
    r.x = std::move(x);
    if (unit_) r.unsat.assign(words_, 0);
    r.signs.resize(coeffs_.size());
    std::int64_t e = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        bool par = false;
        for (auto v : term_vars_[i]) par ^= r.x.get(v);
        r.signs[i] = par ? -1 : 1;
        const std::int64_t c = coeffs_[i] * r.signs[i];
        e += c;
        if (unit_ && c > 0) r.unsat[i / word_bits] |= Word{1} << (i % word_bits);
    }
    r.energy = e;
    if (unit_) r.signs.clear();
    return r;
}

Replica PtModel::random_replica(Rng& rng) const { return make_replica(BitVector::random(num_vars_, rng)); }

std::int64_t PtModel::delta(const Replica& r, std::size_t j) const {
    if (unit_) {
        const Word* m = masks_.data() + j * words_;
        std::int64_t hit = 0;
        for (std::size_t w = 0; w < words_; ++w) hit += std::popcount(r.unsat[w] & m[w]);
        return 2 * (degree_[j] - 2 * hit);
    }
    std::int64_t s = 0;
    for (auto i : var_terms_[j]) s += coeffs_[i] * r.signs[i];
    return -2 * s;
}

void PtModel::flip(Replica& r, std::size_t j) const {
    r.energy += delta(r, j);
    r.x.flip(j);
    if (unit_) {
        const Word* m = masks_.data() + j * words_;
        for (std::size_t w = 0; w < words_; ++w) r.unsat[w] ^= m[w];
    } else {
        for (auto i : var_terms_[j]) r.signs[i] = static_cast<std::int8_t>(-r.signs[i]);
    }
}

std::int64_t PtModel::recompute_energy(const Replica& r) const {
    std::int64_t e = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        bool par = false;
        for (auto v : term_vars_[i]) par ^= r.x.get(v);
        e += par ? -coeffs_[i] : coeffs_[i];
    }
    return e;
}

double PtModel::accept_probability(double beta, std::int64_t de) const { return std::exp(-beta * static_cast<double>(de)); }

bool PtModel::sweep(Replica& r, double beta, Rng& rng, std::int64_t stop_energy, std::uint64_t* accepted) const {
    for (std::size_t j = 0; j < num_vars_; ++j) {
        const std::int64_t de = delta(r, j);
        if (de > 0 && !(rng.uniform() < accept_probability(beta, de))) continue;
        if (unit_) {
            const Word* m = masks_.data() + j * words_;
            for (std::size_t w = 0; w < words_; ++w) r.unsat[w] ^= m[w];
        } else {
            for (auto i : var_terms_[j]) r.signs[i] = static_cast<std::int8_t>(-r.signs[i]);
        }
        r.x.flip(j);
        r.energy += de;
        if (accepted) ++*accepted;
        if (r.energy == stop_energy) return true;
    }
    return false;
}

void replica_exchange(std::vector<Replica>& replicas, std::span<const double> betas, Rng& rng, ExchangeStats* stats) {
    if (replicas.size() != betas.size()) throw UsageError("one inverse temperature per replica");
    if (stats && stats->attempts.size() + 1 != replicas.size()) {
        stats->attempts.assign(replicas.size() - 1, 0);
        stats->accepted.assign(replicas.size() - 1, 0);
    }
    for (std::size_t i = 0; i + 1 < replicas.size(); ++i) {
        const double f = (betas[i + 1] - betas[i]) * static_cast<double>(replicas[i + 1].energy - replicas[i].energy);
        const bool swap = f >= 0 || rng.uniform() < std::exp(f);
        if (stats) {
            ++stats->attempts[i];
            stats->accepted[i] += swap;
        }
        if (swap) std::swap(replicas[i], replicas[i + 1]);
    }
}

PtResult pt_run(const PLocalInstance& pl, long target_t, const PtConfig& cfg) {
    if (target_t < 0) throw UsageError("target distance t must be known (>= 0)");
    const auto betas = temperature_ladder(cfg);
    const PtModel model(pl);
    const std::int64_t stop = 2 * static_cast<std::int64_t>(target_t) - pl.offset;
    const std::size_t n_orig = pl.meta.original_vars ? pl.meta.original_vars : pl.num_vars;

    PtResult res;
    res.seed = cfg.seed;
    Rng rng(cfg.seed);
    WallTimer wall;
    const double cpu0 = thread_cpu_seconds();

    std::vector<Replica> reps;
    for (std::size_t i = 0; i < betas.size(); ++i) reps.push_back(model.random_replica(rng));
    res.best_objective = INT64_MAX;

    auto finish = [&](const Replica& r) {
        res.success = true;
        res.message = BitVector(n_orig);
        for (std::size_t i = 0; i < n_orig; ++i)
            if (r.x.get(i)) res.message.set(i);
    };

    for (const auto& r : reps) {
        res.best_objective = std::min(res.best_objective, r.energy + pl.offset);
        if (!res.success && r.energy == stop) finish(r);
    }
    while (!res.success && res.sweeps < cfg.max_sweeps) {
        ++res.sweeps;
        for (std::size_t i = 0; i < reps.size() && !res.success; ++i) {
            if (model.sweep(reps[i], betas[i], rng, stop)) finish(reps[i]);
            res.best_objective = std::min(res.best_objective, reps[i].energy + pl.offset);
        }
        if (!res.success) replica_exchange(reps, betas, rng, &res.exchange);
    }
    res.wall_time_s = wall.seconds();
    res.cpu_time_s = thread_cpu_seconds() - cpu0;
    return res;
}

} // namespace mcforge
