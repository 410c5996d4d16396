#include <doctest.h>

#include <cmath>

#include "mcforge/errors.hpp"
#include "mcforge/pt.hpp"

using namespace mcforge;

TEST_SUITE("pt") {

TEST_CASE("geometric ladder") {
    PtConfig cfg;
    auto b = temperature_ladder(cfg);
    REQUIRE(b.size() == 16);
    CHECK(b.front() == doctest::Approx(0.1));
    CHECK(b.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i + 1 < b.size(); ++i) CHECK(b[i + 1] / b[i] == doctest::Approx(b[1] / b[0]).epsilon(1e-12));
    cfg.num_replicas = 1;
    CHECK_THROWS_AS(temperature_ladder(cfg), UsageError);
    cfg.num_replicas = 4;
    cfg.beta_min = 2;
    CHECK_THROWS_AS(temperature_ladder(cfg), UsageError);
}

TEST_CASE("greedy limit solves a 1-local instance in one sweep") {
    PLocalInstance pl;
    pl.num_vars = 20;
    for (std::uint32_t i = 0; i < 20; ++i) pl.terms.push_back({-1, {i}});
    pl.offset = 20;
    PtModel model(pl);
    Rng rng(1);
    auto r = model.make_replica(BitVector::from_string("11111111111111111111"));
    CHECK_FALSE(model.sweep(r, 1e3, rng, -1000));
    CHECK(r.energy == -20);
    CHECK(unsat_count(pl, r.x) == 0);
}

TEST_CASE("infinite temperature accepts every flip") {
    auto g = generate_instance(40, 3, 6, "beta0");
    auto pl = map_to_ising(g.instance);
    PtModel model(pl);
    Rng rng(2);
    auto r = model.random_replica(rng);
    std::uint64_t acc = 0;
    model.sweep(r, 0.0, rng, INT64_MIN, &acc);
    CHECK(acc == pl.num_vars);
}

TEST_CASE("incremental energy matches recomputation") {
    Rng rng(3);
    auto g = generate_instance(40, 3, 6, "delta");
    auto mapped = map_to_ising(g.instance);
    auto reduced = reduce_to_2local(reduce_to_3local(mapped));
    for (const auto* pl : {&mapped, &reduced}) {
        PtModel model(*pl);
        CHECK(model.unit_path() == (pl == &mapped));
        auto r = model.random_replica(rng);
        for (int i = 0; i < 10000; ++i) {
            const auto j = rng.below(pl->num_vars);
            const auto before = energy(*pl, r.x);
            const auto d = model.delta(r, j);
            model.flip(r, j);
            REQUIRE(energy(*pl, r.x) - before == d);
        }
        CHECK(r.energy == model.recompute_energy(r));
        CHECK(r.energy == energy(*pl, r.x));
    }
}

TEST_CASE("replica exchange criterion") {
    PLocalInstance pl;
    pl.num_vars = 2;
    pl.terms = {{-1, {0}}, {-1, {1}}};
    PtModel model(pl);
    Rng rng(4);
    std::vector<double> betas{0.5, 1.0};

    // equal energies always swap
    std::vector<Replica> reps{model.make_replica(BitVector::from_string("10")), model.make_replica(BitVector::from_string("01"))};
    replica_exchange(reps, betas, rng);
    CHECK(reps[0].x == BitVector::from_string("01"));

    // hotter replica with the lower energy: f >= 0, always swap
    reps = {model.make_replica(BitVector::from_string("00")), model.make_replica(BitVector::from_string("11"))};
    replica_exchange(reps, betas, rng);
    CHECK(reps[0].energy == 2);
    CHECK(reps[1].energy == -2);

    // colder replica already lower: swap with probability e^f, f = 0.5 * (-4)
    int swaps = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        reps = {model.make_replica(BitVector::from_string("11")), model.make_replica(BitVector::from_string("00"))};
        replica_exchange(reps, betas, rng);
        swaps += reps[0].energy == -2;
    }
    const double p = std::exp(-2.0);
    CHECK(std::abs(double(swaps) / n - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("single-temperature sweeps sample the Boltzmann distribution") {
    PLocalInstance pl;
    pl.num_vars = 2;
    pl.terms = {{-1, {0, 1}}, {1, {0}}};
    PtModel model(pl);
    Rng rng(5);
    const double beta = 0.4;
    auto r = model.random_replica(rng);
    std::array<double, 4> boltz{};
    double z = 0;
    for (std::uint64_t c = 0; c < 4; ++c) {
        boltz[c] = std::exp(-beta * double(energy(pl, config_bits(c, 2))));
        z += boltz[c];
    }
    std::array<int, 4> hist{};
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        for (int k = 0; k < 10; ++k) model.sweep(r, beta, rng, INT64_MIN);
        ++hist[(r.x.get(0) ? 1 : 0) | (r.x.get(1) ? 2 : 0)];
    }
    for (int c = 0; c < 4; ++c) {
        const double p = boltz[c] / z;
        CHECK(std::abs(double(hist[c]) / samples - p) < 3 * std::sqrt(p * (1 - p) / samples) + 1e-3);
    }
}

TEST_CASE("pt_run solves small mapped instances") {
    for (int s = 0; s < 3; ++s) {
        auto g = generate_instance(40, 4, 6, "pt-" + std::to_string(s));
        auto pl = map_to_ising(g.instance);
        PtConfig cfg;
        cfg.seed = "r" + std::to_string(s);
        cfg.max_sweeps = 200000;
        auto res = pt_run(pl, g.instance.t, cfg);
        REQUIRE(res.success);
        CHECK(res.message == g.solution.q);
        CHECK(unsat_count(pl, res.message) == g.instance.t);
        CHECK(res.best_objective == 2 * 4);
        for (std::size_t i = 0; i < res.exchange.attempts.size(); ++i)
            if (res.exchange.attempts[i] > 100) CHECK(res.exchange.accepted[i] > 0);
        auto again = pt_run(pl, g.instance.t, cfg);
        CHECK(again.sweeps == res.sweeps);
    }
}

TEST_CASE("pt_run on a noise-free instance finds the codeword") {
    auto g = generate_instance(40, 3, 6, "pt-clean");
    auto inst = g.instance;
    inst.q_prime = vecmat(g.solution.q, inst.G_prime);
    inst.t = 0;
    auto pl = map_to_ising(inst);
    PtConfig cfg;
    cfg.max_sweeps = 200000;
    auto res = pt_run(pl, 0, cfg);
    REQUIRE(res.success);
    CHECK(res.message == g.solution.q);
}

TEST_CASE("pt_run works on reduced instances") {
    auto g = generate_instance(20, 2, 5, "pt-red");
    auto pl = reduce_to_2local(reduce_to_3local(map_to_ising(g.instance)));
    PtConfig cfg;
    cfg.max_sweeps = 2000000;
    cfg.beta_max = 3.0;
    auto res = pt_run(pl, g.instance.t, cfg);
    REQUIRE(res.success);
    CHECK(res.message == g.solution.q);
}

TEST_CASE("budget exhaustion") {
    auto g = generate_instance(60, 3, 6, "pt-budget");
    auto pl = map_to_ising(g.instance);
    PtConfig cfg;
    cfg.max_sweeps = 1;
    auto res = pt_run(pl, g.instance.t, cfg);
    CHECK(res.sweeps <= 1);
    CHECK_THROWS_AS(pt_run(pl, -1, cfg), UsageError);
}

}
