#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "mcforge/bench.hpp"
#include "mcforge/errors.hpp"
#include "mcforge/io.hpp"

using namespace mcforge;

namespace {

const double inf = std::numeric_limits<double>::infinity();

CampaignManifest tiny_manifest(SolverKind s) {
    CampaignManifest m;
    m.solver = s;
    m.seed = "tiny";
    m.grid = {{14, 2, 4}, {16, 2, 4}};
    m.instances = 3;
    m.pt.repetitions = 2;
    m.pt.max_sweeps = 100000;
    m.stern.successes = 4;
    m.threads = 1;
    return m;
}

} // namespace

TEST_SUITE("bench") {

TEST_CASE("TTS from success probability") {
    CHECK(tts_from_success_prob(2.5, 0.99) == doctest::Approx(2.5));
    CHECK(tts_from_success_prob(1, 0.01) == doctest::Approx(458.2).epsilon(1e-4));
    CHECK(tts_at_confidence(1, 0.5, 0.75) == doctest::Approx(2));
    double prev = inf;
    for (double p = 0.001; p < 1; p += 0.01) {
        const double v = tts_from_success_prob(1, p);
        CHECK(v < prev);
        CHECK(tts_from_success_prob(3, p) == doctest::Approx(3 * v));
        prev = v;
    }
    CHECK_THROWS_AS(tts_from_success_prob(1, 0), UsageError);
    CHECK_THROWS_AS(tts_from_success_prob(1, 1), UsageError);
    CHECK_THROWS_AS(tts_from_success_prob(0, 0.5), UsageError);
}

TEST_CASE("type 7 quantile") {
    CHECK(quantile({3.5}, 0.5) == 3.5);
    CHECK(quantile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({4, 1, 3, 2}, 1.0) == 4);
    CHECK(quantile({4, 1, 3, 2}, 0.0) == 1);
    CHECK(quantile({1, 2, inf}, 0.5) == 2);
    CHECK(std::isinf(quantile({1, 2, inf}, 0.75)));
    CHECK_THROWS_AS(quantile({}, 0.5), UsageError);
    CHECK_THROWS_AS(quantile({1}, 1.5), UsageError);
}

TEST_CASE("runtime ranks") {
    Rng rng(11);
    const double one = 0.7;
    auto single = tts_from_runtime_ranks(std::span(&one, 1), 0.5, rng);
    CHECK(single.value == 0.7);
    CHECK(single.bootstrap_stderr < 1e-12);
    CHECK(single.resamples == 1000);

    std::vector<double> u(100);
    for (auto& x : u) x = rng.uniform();
    auto est = tts_from_runtime_ranks(u, 0.99, rng);
    CHECK_FALSE(est.infinite);
    CHECK(std::abs(est.value - 0.99) < 3 * est.bootstrap_stderr + 0.01);

    std::vector<double> censored(10, inf);
    auto c = tts_from_runtime_ranks(censored, 0.5, rng);
    CHECK(c.infinite);
    CHECK(std::isinf(c.bootstrap_stderr));
    CHECK_THROWS_AS(tts_from_runtime_ranks(std::span<const double>(), 0.5, rng), UsageError);
    CHECK_THROWS_AS(tts_from_runtime_ranks(u, 0.5, rng, 10), UsageError);
}

TEST_CASE("bootstrap stderr shrinks like one over root n") {
    Rng rng(12);
    auto se = [&](std::size_t n) {
        double total = 0;
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<double> x(n);
            for (auto& v : x) v = -std::log(1 - rng.uniform());
            total += tts_from_runtime_ranks(x, 0.5, rng).bootstrap_stderr;
        }
        return total / 8;
    };
    const double ratio = se(1600) / se(100);
    CHECK(ratio == doctest::Approx(0.25).epsilon(0.3));
}

TEST_CASE("scaling fit") {
    Rng rng(13);
    std::vector<double> x{16, 18, 20, 22}, y;
    for (double v : x) y.push_back(1.5 + 0.75 * v);
    auto f = fit_scaling(x, y, rng);
    CHECK(f.slope == doctest::Approx(0.75));
    CHECK(f.intercept == doctest::Approx(1.5));
    CHECK(f.r2 == doctest::Approx(1));
    for (double r : f.residuals) CHECK(std::abs(r) < 1e-9);
    CHECK(f.slope_lo == doctest::Approx(0.75));
    CHECK(f.slope_hi == doctest::Approx(0.75));

    std::vector<double> xn, yn;
    for (int i = 0; i < 60; ++i) {
        xn.push_back(i % 12);
        yn.push_back(2 + 1.0 * (i % 12) + (rng.uniform() - 0.5));
    }
    auto g = fit_scaling(xn, yn, rng);
    CHECK(g.slope_lo < 1.0);
    CHECK(g.slope_hi > 1.0);
    CHECK(g.slope_lo <= g.slope);
    CHECK(g.slope <= g.slope_hi);
    CHECK(g.resamples > 990);

    std::vector<double> same{3, 3};
    CHECK_THROWS_AS(fit_scaling(same, same, rng), UsageError);
}

TEST_CASE("manifest parsing") {
    auto j = nlohmann::json::parse(R"({"solver": "pt", "seed": "s", "instances_per_combo": 4,
        "grid": {"m": [8], "t": [3, 4], "k": [16, 20]}, "pt": {"repetitions": 3, "sweeps": 1000}})");
    auto m = manifest_from_json(j);
    CHECK(m.solver == SolverKind::PT);
    REQUIRE(m.grid.size() == 4);
    CHECK(m.grid[0].n == 40);
    CHECK(m.grid[0].k() == 16);
    CHECK(m.grid[3].n == 52);
    CHECK(m.pt.repetitions == 3);
    CHECK(m.pt.max_sweeps == 1000);
    CHECK(m.pt.num_replicas == 16);
    auto back = manifest_from_json(to_json(m));
    CHECK(back.grid.size() == 4);
    CHECK(back.grid[3].n == 52);
    CHECK(back.seed == "s");

    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(R"({"grid": {"m": [8], "t": [3], "k": [16]}})")),
                    UsageError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(R"({"solver": "pt"})")), UsageError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(R"({"solver": "annealing", "combos": [{"n": 40, "t": 3, "m": 8}]})")),
                    UsageError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(R"({"solver": "pt", "combos": [{"n": 20, "t": 3, "m": 8}]})")),
                    UsageError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(R"({"solver": "pt", "combos": [{"n": "x", "t": 3, "m": 8}]})")),
                    UsageError);
    CHECK_THROWS_AS(
        manifest_from_json(nlohmann::json::parse(R"({"solver": "pt", "grid": {"m": [8], "t": [3], "k": [16], "n": [40]}})")),
        UsageError);
}

TEST_CASE("PT campaign is deterministic and merged by key") {
    auto m = tiny_manifest(SolverKind::PT);
    auto a = run_campaign(m);
    REQUIRE(a.runs.size() == 2 * 3 * 2);
    REQUIRE(a.reports.size() == 2);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].combo == i / 6);
        CHECK(a.runs[i].instance == (i / 2) % 3);
        CHECK(a.runs[i].repetition == i % 2);
        CHECK(a.runs[i].success);
    }
    for (const auto& r : a.reports) {
        CHECK(r.tts_99 >= r.tts_50);
        CHECK(r.failures == 0);
        CHECK(r.runs == 6);
        CHECK(r.instances == 3);
        CHECK(r.bootstrap_resamples == 1000);
    }
    CHECK(a.fit_k.has_value());
    CHECK_FALSE(a.fit_theory.has_value());

    m.threads = 3;
    auto b = run_campaign(m);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].work == b.runs[i].work);
        CHECK(a.runs[i].solver_seed == b.runs[i].solver_seed);
    }
}

TEST_CASE("censored PT runs flag the quantile") {
    auto m = tiny_manifest(SolverKind::PT);
    m.grid = {{64, 5, 6}};
    m.pt.max_sweeps = 1;
    m.pt.num_replicas = 2;
    auto r = run_campaign(m);
    CHECK(r.reports[0].failures > 0);
    CHECK(r.reports[0].infinite);
    CHECK_FALSE(r.fit_k.has_value());
}

TEST_CASE("Stern campaign and outputs") {
    auto m = tiny_manifest(SolverKind::Stern);
    m.grid = {{40, 3, 6}, {48, 3, 6}, {56, 4, 6}};
    auto r = run_campaign(m);
    REQUIRE(r.runs.size() == 9);
    for (const auto& run : r.runs) {
        CHECK(run.success);
        CHECK(run.successes == 4);
        CHECK(run.p_hat > 0);
        CHECK(run.p_hat <= 1);
    }
    for (const auto& rep : r.reports) {
        CHECK(rep.p == 1);
        CHECK(rep.theoretical_log2_tts > 0);
        CHECK(rep.tts_99 >= rep.tts_50);
        CHECK(std::isfinite(rep.log2_stderr));
    }
    REQUIRE(r.fit_theory.has_value());
    CHECK(r.fit_n.has_value());

    const auto dir = std::filesystem::temp_directory_path() / "mcforge_bench_test";
    std::filesystem::remove_all(dir);
    write_campaign(dir, m, r);
    for (const char* f : {"reports.csv", "scaling.csv", "runs.jsonl", "fits.json"}) CHECK(std::filesystem::exists(dir / f));
    auto fits = read_json(dir / "fits.json");
    CHECK(fits.at("measured_vs_theoretical").at("slope").get<double>() == doctest::Approx(r.fit_theory->slope));
    CHECK(fits.at("log2_tts_vs_k").is_object());
    std::ifstream runs(dir / "runs.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(runs, line)) {
        CHECK(nlohmann::json::parse(line).at("success").get<bool>());
        ++lines;
    }
    CHECK(lines == 9);
    std::filesystem::remove_all(dir);
}

TEST_CASE("worker cap honours FORGE_THREADS") {
    ::setenv("FORGE_THREADS", "2", 1);
    CHECK(worker_cap(8) == 2);
    CHECK(worker_cap(1) == 1);
    ::setenv("FORGE_THREADS", "zero", 1);
    CHECK_THROWS_AS(worker_cap(4), UsageError);
    ::unsetenv("FORGE_THREADS");
    CHECK(worker_cap(5) == 5);
    CHECK(worker_cap(0) >= 1);
}

}
