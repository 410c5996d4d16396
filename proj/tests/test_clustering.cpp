#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcforge/clustering.hpp"
#include "mcforge/errors.hpp"

using namespace mcforge;

namespace {

const double ln2 = std::numbers::ln2;

// Direct count of ordered pairs with weight E at distance X, over all 2^N strings.
std::vector<std::uint64_t> brute_hwm(unsigned n, unsigned e) {
    std::vector<std::uint64_t> c(n + 1, 0);
    for (std::uint32_t a = 0; a < (1u << n); ++a) {
        if (std::popcount(a) != static_cast<int>(e)) continue;
        for (std::uint32_t b = 0; b < (1u << n); ++b)
            if (std::popcount(b) == static_cast<int>(e)) ++c[std::popcount(a ^ b)];
    }
    return c;
}

double choose(unsigned n, unsigned k) {
    double r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST_SUITE("clustering") {

TEST_CASE("binary entropy") {
    CHECK(entropy(0) == 0);
    CHECK(entropy(1) == 0);
    CHECK(entropy(0.5) == doctest::Approx(ln2));
    CHECK(entropy(0.3) == doctest::Approx(entropy(0.7)));
    CHECK(entropy(0.11) == doctest::Approx(ln2 / 2).epsilon(2e-3));
    CHECK_THROWS_AS(entropy(-0.1), UsageError);
    CHECK_THROWS_AS(entropy(1.5), UsageError);
}

TEST_CASE("exponents") {
    // x = 0 keeps only the diagonal: Phi = S(eps)
    CHECK(*phi_hwm(0, 0.3) == doctest::Approx(entropy(0.3)));
    CHECK_FALSE(phi_hwm(0.41, 0.2).has_value());
    CHECK(phi_hwm(0.4, 0.2).has_value());
    CHECK(std::isinf(phi(Model::HWM, 0.5, 0.2)));
    CHECK(phi_scrambled(0.5, 0.5) == doctest::Approx(2 * ln2));
    CHECK(phi(Model::RPHWM, 0.3, 0.2) == phi(Model::LSHWM, 0.3, 0.2));
    // large-N limit of the exact HWM count
    const unsigned n = 4000;
    const double logc =
        std::lgamma(n + 1.0) - 2 * std::lgamma(n / 2 + 1.0) + 2 * (std::lgamma(n / 2 + 1.0) - 2 * std::lgamma(n / 4 + 1.0));
    // eps = 1/2, x = 1/2: C(N, N/2) C(N/2, N/4)^2
    CHECK(logc / n == doctest::Approx(*phi_hwm(0.5, 0.5)).epsilon(2e-3));
}

TEST_CASE("model names") {
    CHECK(parse_model("hwm") == Model::HWM);
    CHECK(parse_model(model_name(Model::LSHWM)) == Model::LSHWM);
    CHECK_THROWS_AS(parse_model("ising"), UsageError);
}

TEST_CASE("forbidden region boundaries") {
    const double e = forbidden_onset_eps();
    CHECK(e == doctest::Approx(0.110).epsilon(0.01));
    CHECK(std::abs(entropy(e) - ln2 / 2) < 1e-12);
    CHECK_FALSE(forbidden_interval(0.2).has_value());
    auto iv = forbidden_interval(0.05);
    REQUIRE(iv.has_value());
    auto [lo, hi] = *iv;
    CHECK(lo > 0);
    CHECK(hi < 1);
    CHECK(lo < 0.5);
    CHECK(hi == doctest::Approx(1 - lo));
    CHECK(std::abs(phi_scrambled(lo, 0.05)) < 1e-10);
    CHECK(std::abs(phi_scrambled(hi, 0.05)) < 1e-10);
    CHECK(phi_scrambled(lo / 2, 0.05) < 0);
    CHECK(phi_scrambled(0.5, 0.05) > 0);
}

TEST_CASE("pair probability") {
    CHECK(pair_probability_lshwm(16, 2) == doctest::Approx(std::pow(120.0 / 65536.0, 2)));
    CHECK(pair_probability_lshwm(16, 16) == doctest::Approx(std::ldexp(1.0, -32)));
    CHECK(pair_probability_lshwm_eps(20, 0.1) == doctest::Approx(pair_probability_lshwm(20, 2)));
    CHECK_THROWS_AS(pair_probability_lshwm_eps(20, 0.12), UsageError);
    CHECK_THROWS_AS(pair_probability_lshwm(4, 5), UsageError);
}

TEST_CASE("corank distribution") {
    CHECK(rank_distribution(0) == doctest::Approx(0.288788).epsilon(1e-5));
    CHECK(rank_distribution(1) == doctest::Approx(0.577576).epsilon(1e-5));
    CHECK(rank_distribution(2) == doctest::Approx(0.12835).epsilon(1e-4));
    double sum = 0;
    for (unsigned a = 0; a <= 20; ++a) sum += rank_distribution(a);
    CHECK(std::abs(sum - 1) < 1e-12);
    auto ks = kernel_statistics();
    CHECK(ks.mean == doctest::Approx(2).epsilon(1e-9));
    CHECK(ks.variance == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("HWM census matches direct enumeration") {
    Rng rng(1);
    for (unsigned e : {0u, 3u, 6u, 9u, 12u}) {
        const auto brute = brute_hwm(12, e);
        const std::vector<unsigned> es{e};
        auto c = empirical_census(Model::HWM, 12, es, 5, rng);
        CHECK(c.samples == 1);
        for (unsigned x = 0; x <= 12; ++x) {
            CHECK(c.mean[0][x] == static_cast<double>(brute[x]));
            CHECK(expected_census(Model::HWM, 12, e, x) == static_cast<double>(brute[x]));
        }
    }
}

TEST_CASE("HWM census at N = 20") {
    Rng rng(2);
    const std::vector<unsigned> es{1, 3, 5, 10, 17};
    auto c = empirical_census(Model::HWM, 20, es, 1, rng);
    for (std::size_t i = 0; i < es.size(); ++i) {
        double total = 0;
        for (unsigned x = 0; x <= 20; ++x) {
            CHECK(c.mean[i][x] == expected_census(Model::HWM, 20, es[i], x));
            total += c.mean[i][x];
        }
        CHECK(total == choose(20, es[i]) * choose(20, es[i]));
    }
}

TEST_CASE("RPHWM census preserves shell sizes and matches the mean") {
    Rng rng(3);
    const std::vector<unsigned> es{2, 4};
    const std::size_t samples = 300;
    auto c = empirical_census(Model::RPHWM, 12, es, samples, rng);
    for (std::size_t i = 0; i < es.size(); ++i) {
        double total = 0;
        for (unsigned x = 0; x <= 12; ++x) total += c.mean[i][x];
        CHECK(total == doctest::Approx(choose(12, es[i]) * choose(12, es[i])));
        CHECK(c.mean[i][0] == choose(12, es[i]));
        for (unsigned x = 1; x <= 12; ++x) {
            const double mu = expected_census(Model::RPHWM, 12, es[i], x);
            const double se = std::sqrt(c.variance[i][x] / samples) + 1e-9;
            CHECK(std::abs(c.mean[i][x] - mu) / se < 4.5);
        }
    }
}

TEST_CASE("LSHWM census matches its mean") {
    Rng rng(4);
    const std::vector<unsigned> es{3, 6};
    const std::size_t samples = 400;
    auto c = empirical_census(Model::LSHWM, 12, es, samples, rng);
    for (std::size_t i = 0; i < es.size(); ++i)
        for (unsigned x = 0; x <= 12; ++x) {
            const double mu = expected_census(Model::LSHWM, 12, es[i], x);
            const double se = std::sqrt(c.variance[i][x] / samples) + 1e-9;
            CHECK(std::abs(c.mean[i][x] - mu) / se < 4.5);
        }
    const std::vector<unsigned> zero{0};
    CHECK_THROWS_AS(empirical_census(Model::LSHWM, 12, zero, 1, rng), UsageError);
}

TEST_CASE("LSHWM and RPHWM agree off the diagonal") {
    Rng rng(5);
    const std::vector<unsigned> es{3, 5};
    const std::size_t samples = 300;
    auto ls = empirical_census(Model::LSHWM, 14, es, samples, rng);
    auto rp = empirical_census(Model::RPHWM, 14, es, samples, rng);
    for (std::size_t i = 0; i < es.size(); ++i)
        for (unsigned x = 1; x <= 14; ++x) {
            const double se = std::sqrt((ls.variance[i][x] + rp.variance[i][x]) / samples);
            if (se == 0) {
                CHECK(ls.mean[i][x] == rp.mean[i][x]);
                continue;
            }
            CHECK(std::abs(ls.mean[i][x] - rp.mean[i][x]) / se < 4);
        }
}

TEST_CASE("forbidden cells stay empty") {
    Rng rng(6);
    const unsigned n = 20;
    const std::vector<unsigned> es{1, 2};
    const std::size_t samples = 200;
    auto c = empirical_census(Model::LSHWM, n, es, samples, rng);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < es.size(); ++i)
        for (unsigned x = 1; x <= n; ++x) {
            const double eps = double(es[i]) / n, xf = double(x) / n;
            if (phi_scrambled(xf, eps) >= 0 || expected_census(Model::LSHWM, n, es[i], x) > 0.01) continue;
            ++checked;
            CHECK(double(samples - c.nonzero[i][x]) / samples >= 0.95);
        }
    CHECK(checked >= 3);
}

TEST_CASE("LSHWM pair frequency") {
    Rng rng(7);
    const unsigned n = 8, e = 3;
    const std::size_t samples = 200000;
    const double p = pair_probability_lshwm(n, e);
    const double f = lshwm_pair_frequency(n, e, 0b101, 0b1100000, samples, rng);
    CHECK(std::abs(f - p) < 3 * std::sqrt(p * (1 - p) / samples) + 1e-12);
    CHECK_THROWS_AS(lshwm_pair_frequency(n, e, 0, 1, 10, rng), UsageError);
    CHECK_THROWS_AS(lshwm_pair_frequency(n, e, 3, 3, 10, rng), UsageError);
}

TEST_CASE("phase grid and CSV output") {
    const std::vector<double> xs{0.0, 0.05, 0.5}, es{0.05, 0.3};
    auto g = phase_grid(Model::LSHWM, xs, es);
    CHECK(g.forbidden[0][1]);
    CHECK_FALSE(g.forbidden[0][2]);
    CHECK_FALSE(g.forbidden[1][1]);
    std::ostringstream os;
    write_phase_csv(os, g);
    std::string line;
    std::istringstream is(os.str());
    std::getline(is, line);
    CHECK(line == "x,eps,phi,forbidden");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6);

    Rng rng(8);
    const std::vector<unsigned> en{2};
    auto c = empirical_census(Model::HWM, 6, en, 1, rng);
    std::ostringstream cs;
    write_census_csv(cs, c);
    CHECK(cs.str().rfind("x,eps,count,samples\n", 0) == 0);
}

TEST_CASE("census guards") {
    Rng rng(9);
    const std::vector<unsigned> es{10};
    CHECK_THROWS_AS(empirical_census(Model::HWM, 25, es, 1, rng), UsageError);
    const std::vector<unsigned> big{11};
    CHECK_THROWS_AS(empirical_census(Model::HWM, 10, big, 1, rng), UsageError);
    CHECK_THROWS_AS(empirical_census(Model::RPHWM, 10, es, 0, rng), UsageError);
}

}
