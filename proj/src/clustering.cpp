#include "mcforge/clustering.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "mcforge/errors.hpp"

namespace mcforge {

namespace {

constexpr double ln2 = std::numbers::ln2;

long double binom(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

double root_in(double lo, double hi, auto f) {
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return (a + b) / 2;
}

// Unnormalised in-place transform; applying it twice multiplies by 2^n.
void walsh_hadamard(std::vector<std::int64_t>& a) {
    for (std::size_t h = 1; h < a.size(); h <<= 1)
        for (std::size_t i = 0; i < a.size(); i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const auto u = a[j], v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
}

} // namespace

Model parse_model(const std::string& s) {
    if (s == "hwm") return Model::HWM;
    if (s == "rphwm") return Model::RPHWM;
    if (s == "lshwm") return Model::LSHWM;
    throw UsageError("unknown model '" + s + "' (expected hwm, rphwm or lshwm)");
}

std::string model_name(Model m) {
    switch (m) {
    case Model::HWM: return "hwm";
    case Model::RPHWM: return "rphwm";
    case Model::LSHWM: return "lshwm";
    }
    return "?";
}

double entropy(double p) {
    if (!(p >= 0 && p <= 1)) throw UsageError("entropy argument must lie in [0, 1]");
    if (p == 0 || p == 1) return 0;
    return -p * std::log(p) - (1 - p) * std::log1p(-p);
}

std::optional<double> phi_hwm(double x, double eps) {
    if (x / 2 > std::min(eps, 1 - eps)) return std::nullopt;
    double v = entropy(eps);
    if (eps > 0) v += eps * entropy(x / (2 * eps));
    if (eps < 1) v += (1 - eps) * entropy(x / (2 * (1 - eps)));
    return v;
}

double phi_scrambled(double x, double eps) { return -ln2 + entropy(x) + 2 * entropy(eps); }

double phi(Model m, double x, double eps) {
    if (m == Model::HWM) return phi_hwm(x, eps).value_or(-std::numeric_limits<double>::infinity());
    return phi_scrambled(x, eps);
}

double forbidden_onset_eps() {
    return root_in(1e-12, 0.5, [](double e) { return entropy(e) - ln2 / 2; });
}

std::optional<std::pair<double, double>> forbidden_interval(double eps) {
    const double level = ln2 - 2 * entropy(eps);
    if (level <= 0) return std::nullopt;
    const double xmin = root_in(0.0, 0.5, [&](double x) { return entropy(x) - level; });
    const double xmax = root_in(0.5, 1.0, [&](double x) { return entropy(x) - level; });
    return std::pair{xmin, xmax};
}

double pair_probability_lshwm(unsigned n, unsigned energy) {
    if (energy > n) throw UsageError("energy exceeds N");
    const long double lp = 2 * (std::log(binom(n, energy)) - n * std::log(2.0L));
    return static_cast<double>(std::exp(lp));
}

double pair_probability_lshwm_eps(unsigned n, double eps) {
    const double e = eps * n;
    if (std::abs(e - std::round(e)) > 1e-9 || e < 0) throw UsageError("eps N must be a non-negative integer");
    return pair_probability_lshwm(n, static_cast<unsigned>(std::lround(e)));
}

double rank_distribution(unsigned alpha) {
    double v = std::ldexp(1.0, -static_cast<int>(alpha * alpha));
    for (unsigned j = alpha + 1; j <= 64; ++j) v *= 1 - std::ldexp(1.0, -static_cast<int>(j));
    for (unsigned j = 1; j <= alpha; ++j) v /= 1 - std::ldexp(1.0, -static_cast<int>(j));
    return v;
}

KernelStatistics kernel_statistics() {
    double m1 = 0, m2 = 0;
    for (unsigned a = 0; a <= 40; ++a) {
        const double p = rank_distribution(a);
        m1 += std::ldexp(p, static_cast<int>(a));
        m2 += std::ldexp(p, static_cast<int>(2 * a));
    }
    return {m1, m2 - m1 * m1};
}

double expected_census(Model m, unsigned n, unsigned e, unsigned x) {
    if (e > n || x > n) throw UsageError("energy and distance must not exceed N");
    const long double states = std::ldexp(1.0L, static_cast<int>(n));
    const long double shell = binom(n, e);
    switch (m) {
    case Model::HWM:
        if (x % 2) return 0;
        return static_cast<double>(shell * binom(e, x / 2) * binom(n - e, x / 2));
    case Model::RPHWM:
        if (x == 0) return static_cast<double>(shell);
        return static_cast<double>(binom(n, x) * shell * (shell - 1) / (states - 1));
    case Model::LSHWM: {
        if (e == 0) throw UsageError("LSHWM census excludes the zero energy shell");
        const long double p1 = shell / states;
        if (x == 0) return static_cast<double>((states - 1) * p1);
        return static_cast<double>(binom(n, x) * (states - 2) * p1 * p1);
    }
    }
    return 0;
}

PhaseGrid phase_grid(Model m, std::span<const double> x_grid, std::span<const double> eps_grid) {
    PhaseGrid g{m, {x_grid.begin(), x_grid.end()}, {eps_grid.begin(), eps_grid.end()}, {}, {}};
    for (double e : eps_grid) {
        std::vector<double> row;
        std::vector<bool> forb;
        for (double x : x_grid) {
            const double v = phi(m, x, e);
            row.push_back(v);
            forb.push_back(v < 0);
        }
        g.phi.push_back(std::move(row));
        g.forbidden.push_back(std::move(forb));
    }
    return g;
}

void write_phase_csv(std::ostream& out, const PhaseGrid& g) {
    out << "x,eps,phi,forbidden\n";
    out.precision(10);
    for (std::size_t i = 0; i < g.eps_grid.size(); ++i)
        for (std::size_t j = 0; j < g.x_grid.size(); ++j)
            out << g.x_grid[j] << ',' << g.eps_grid[i] << ',' << g.phi[i][j] << ',' << (g.forbidden[i][j] ? 1 : 0) << '\n';
}

PairCensus empirical_census(Model m, unsigned n, std::span<const unsigned> energies, std::size_t samples, Rng& rng) {
    if (n < 1 || n > 24) throw UsageError("census enumeration needs 1 <= N <= 24");
    for (auto e : energies) {
        if (e > n) throw UsageError("energy exceeds N");
        if (m == Model::LSHWM && e == 0) throw UsageError("LSHWM census excludes the zero energy shell");
    }
    if (m == Model::HWM) samples = 1;
    if (samples < 1) throw UsageError("need at least one sample");

    PairCensus c;
    c.model = m;
    c.n = n;
    c.samples = samples;
    c.energies.assign(energies.begin(), energies.end());
    const std::size_t ne = energies.size();
    std::vector<std::vector<double>> sum(ne, std::vector<double>(n + 1, 0)), sum2 = sum;
    c.nonzero.assign(ne, std::vector<std::size_t>(n + 1, 0));

    const std::uint32_t states = std::uint32_t{1} << n;
    std::vector<std::uint32_t> perm;
    std::vector<std::vector<std::uint32_t>> shells(n + 1);
    std::vector<std::uint64_t> counts(n + 1);
    std::vector<std::int64_t> wht(states);

    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& sh : shells) sh.clear();
        if (m == Model::HWM) {
            for (std::uint32_t v = 0; v < states; ++v) shells[std::popcount(v)].push_back(v);
        } else if (m == Model::RPHWM) {
            // perm[i] is the state that receives the energy of string i
            if (perm.empty()) {
                perm.resize(states);
                for (std::uint32_t v = 0; v < states; ++v) perm[v] = v;
            }
            rng.shuffle(perm.begin(), perm.end());
            for (std::uint32_t v = 0; v < states; ++v) shells[std::popcount(v)].push_back(perm[v]);
        } else {
            std::vector<std::uint32_t> cols(n);
            for (auto& col : cols) col = static_cast<std::uint32_t>(rng.below(states));
            std::uint32_t img = 0, gray = 0;
            for (std::uint32_t i = 1; i < states; ++i) {
                const auto j = std::countr_zero(i);
                gray ^= std::uint32_t{1} << j;
                img ^= cols[j];
                shells[std::popcount(img)].push_back(gray);
            }
        }
        for (std::size_t ei = 0; ei < ne; ++ei) {
            const auto& sh = shells[energies[ei]];
            std::fill(counts.begin(), counts.end(), 0);
            if (static_cast<double>(sh.size()) * static_cast<double>(sh.size()) < 2.0 * n * states) {
                for (auto a : sh)
                    for (auto b : sh) ++counts[std::popcount(a ^ b)];
            } else {
                std::fill(wht.begin(), wht.end(), 0);
                for (auto a : sh) wht[a] = 1;
                walsh_hadamard(wht);
                for (auto& v : wht) v *= v;
                walsh_hadamard(wht);
                for (std::uint32_t z = 0; z < states; ++z) counts[std::popcount(z)] += static_cast<std::uint64_t>(wht[z] >> n);
            }
            for (unsigned x = 0; x <= n; ++x) {
                const double v = static_cast<double>(counts[x]);
                sum[ei][x] += v;
                sum2[ei][x] += v * v;
                c.nonzero[ei][x] += counts[x] > 0;
            }
        }
    }
    c.mean = sum;
    c.variance = sum;
    const double ns = static_cast<double>(samples);
    for (std::size_t ei = 0; ei < ne; ++ei)
        for (unsigned x = 0; x <= n; ++x) {
            const double mu = sum[ei][x] / ns;
            c.mean[ei][x] = mu;
            c.variance[ei][x] = samples > 1 ? std::max(0.0, (sum2[ei][x] - ns * mu * mu) / (ns - 1)) : 0.0;
        }
    return c;
}

void write_census_csv(std::ostream& out, const PairCensus& c) {
    out << "x,eps,count,samples\n";
    out.precision(12);
    for (std::size_t ei = 0; ei < c.energies.size(); ++ei)
        for (unsigned x = 0; x <= c.n; ++x)
            out << double(x) / c.n << ',' << double(c.energies[ei]) / c.n << ',' << c.mean[ei][x] << ',' << c.samples << '\n';
}

double lshwm_pair_frequency(unsigned n, unsigned energy, std::uint32_t x, std::uint32_t y, std::size_t samples, Rng& rng) {
    if (n < 1 || n > 32) throw UsageError("N must be in [1, 32]");
    const std::uint64_t states = std::uint64_t{1} << n;
    if (x == 0 || y == 0 || x == y || x >= states || y >= states) throw UsageError("x and y must be distinct nonzero N-bit strings");
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::uint32_t sx = 0, sy = 0;
        for (unsigned j = 0; j < n; ++j) {
            const auto col = static_cast<std::uint32_t>(rng.below(states));
            if ((x >> j) & 1) sx ^= col;
            if ((y >> j) & 1) sy ^= col;
        }
        hits += std::popcount(sx) == static_cast<int>(energy) && std::popcount(sy) == static_cast<int>(energy);
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

} // namespace mcforge
