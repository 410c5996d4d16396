// mcforge command-line entry point. Exit codes: 0 success, 1 solver failure,
// 2 usage, 3 I/O, 4 internal. Diagnostics are one JSON line on stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcforge/bench.hpp"
#include "mcforge/clustering.hpp"
#include "mcforge/errors.hpp"
#include "mcforge/gf2.hpp"
#include "mcforge/io.hpp"
#include "mcforge/isd.hpp"
#include "mcforge/ising.hpp"
#include "mcforge/mceliece.hpp"
#include "mcforge/pt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcforge;

namespace {

int report_error(ErrorKind kind, const std::string& msg) {
    std::cerr << json{{"error", kind_name(kind)}, {"message", msg}}.dump() << '\n';
    return static_cast<int>(kind);
}

void print(const json& j) { std::cout << j.dump() << '\n'; }

PLocalInstance load_plocal_or_map(const fs::path& p) {
    const std::string text = read_file(p);
    if (text.rfind("plocal", 0) == 0) return plocal_from_text(text);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError("'" + p.string() + "' is neither a p-local file nor an instance: " + e.what());
    }
    return map_to_ising(instance_from_json(j));
}

void write_text_or_stdout(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"McEliece instances as Ising problems: generation, mapping, solving and benchmarking", "mcforge"};
    app.require_subcommand(1);
    int code = 0;

    // gen
    std::size_t gen_n = 0, gen_count = 1;
    unsigned gen_t = 0, gen_m = 0;
    std::string gen_seed = "0", gen_dir = ".";
    bool gen_singular = false;
    auto* gen = app.add_subcommand("gen", "Generate planted instances with solution and key sidecars");
    gen->add_option("--n", gen_n, "Code length N")->required();
    gen->add_option("--t", gen_t, "Goppa polynomial degree / error weight")->required();
    gen->add_option("--m", gen_m, "Field degree")->required();
    gen->add_option("--seed", gen_seed, "Seed string");
    gen->add_option("--count", gen_count, "Number of instances")->check(CLI::PositiveNumber);
    gen->add_option("--out-dir", gen_dir, "Output directory");
    gen->add_flag("--allow-singular-s", gen_singular, "Draw S without rejecting singular matrices");
    gen->callback([&] {
        std::error_code ec;
        fs::create_directories(gen_dir, ec);
        if (ec) throw IoError("cannot create '" + gen_dir + "': " + ec.message());
        for (std::size_t i = 0; i < gen_count; ++i) {
            const std::string seed = gen_count == 1 ? gen_seed : gen_seed + "/" + std::to_string(i);
            auto g = generate_instance(gen_n, gen_t, gen_m, seed, gen_singular);
            char tag[32];
            std::snprintf(tag, sizeof tag, "%03zu", i);
            const fs::path dir(gen_dir);
            write_json(dir / ("instance_" + std::string(tag) + ".json"), to_json(g.instance));
            write_json(dir / ("solution_" + std::string(tag) + ".json"), to_json(g.solution));
            write_json(dir / ("key_" + std::string(tag) + ".json"), to_json(g.key));
            print({{"instance", (dir / ("instance_" + std::string(tag) + ".json")).string()},
                   {"n", g.instance.n},
                   {"k", g.instance.k},
                   {"t", g.instance.t},
                   {"m", g.instance.m},
                   {"seed", seed}});
        }
    });

    // map
    std::string map_in, map_out;
    auto* map = app.add_subcommand("map", "Map an instance to its p-local Ising form");
    map->add_option("--in", map_in, "Instance JSON")->required();
    map->add_option("--out", map_out, "p-local output file (default stdout)");
    map->callback([&] { write_text_or_stdout(map_out, to_plocal_text(map_to_ising(load_instance(map_in)))); });

    // reduce
    std::string red_in, red_out;
    int red_loc = 2;
    auto* reduce = app.add_subcommand("reduce", "Reduce a p-local instance to 3- or 2-local form");
    reduce->add_option("--in", red_in, "p-local input file")->required();
    reduce->add_option("--out", red_out, "p-local output file (default stdout)");
    reduce->add_option("--locality", red_loc, "Target locality")->check(CLI::IsMember({2, 3}));
    reduce->callback([&] {
        const auto pl = plocal_from_text(read_file(red_in));
        write_text_or_stdout(red_out, to_plocal_text(red_loc == 3 ? reduce_to_3local(pl) : reduce_to_2local(reduce_to_3local(pl))));
    });

    // solve
    auto* solve = app.add_subcommand("solve", "Run a solver");
    solve->require_subcommand(1);

    std::string st_in, st_seed = "0", st_out;
    IsdConfig st_cfg;
    auto* stern = solve->add_subcommand("stern", "Stern information set decoding on an instance");
    stern->add_option("--in", st_in, "Instance JSON")->required();
    stern->add_option("--p", st_cfg.p, "Columns per half in the Stern split")->check(CLI::PositiveNumber);
    stern->add_option("--max-iters", st_cfg.max_iters, "Iteration budget");
    stern->add_option("--workers", st_cfg.workers, "Worker threads (capped by FORGE_THREADS)");
    stern->add_option("--seed", st_seed, "Seed string");
    stern->add_option("--out", st_out, "Write the recovered solution JSON here");
    stern->callback([&] {
        const auto inst = load_instance(st_in);
        st_cfg.seed = st_seed;
        st_cfg.workers = worker_cap(st_cfg.workers);
        const auto r = stern_run(inst, st_cfg);
        json j = {{"solver", "stern"},     {"success", r.success},     {"iterations", r.iterations},
                  {"wall_time_s", r.wall_time_s}, {"cpu_time_s", r.cpu_time_s}, {"per_iter_time_s", r.per_iter_time_s},
                  {"seed", r.seed}};
        if (r.success) {
            j["q"] = to_hex(r.message);
            j["error_vector"] = to_hex(r.error);
            if (!st_out.empty()) write_json(st_out, to_json(Solution{r.message, r.error}));
        }
        print(j);
        if (!r.success) code = report_error(ErrorKind::solver_failure, "no solution within " + std::to_string(st_cfg.max_iters) + " iterations");
    });

    std::string pt_in, pt_out;
    long pt_target = -1;
    PtConfig pt_cfg;
    pt_cfg.repetitions = 1;
    auto* pt = solve->add_subcommand("pt", "Parallel tempering on a p-local file or an instance JSON");
    pt->add_option("--in", pt_in, "p-local file or instance JSON")->required();
    pt->add_option("--target-t", pt_target, "Stop at this unsat count (default: the instance's t)");
    pt->add_option("--replicas", pt_cfg.num_replicas, "Number of replicas");
    pt->add_option("--beta-min", pt_cfg.beta_min, "Smallest inverse temperature");
    pt->add_option("--beta-max", pt_cfg.beta_max, "Largest inverse temperature");
    pt->add_option("--sweeps", pt_cfg.max_sweeps, "Sweep budget per repetition");
    pt->add_option("--reps", pt_cfg.repetitions, "Independent repetitions")->check(CLI::PositiveNumber);
    pt->add_option("--seed", pt_cfg.seed, "Seed string");
    pt->add_option("--out", pt_out, "Write the first recovered message as JSON here");
    pt->callback([&] {
        const auto pl = load_plocal_or_map(pt_in);
        long target = pt_target >= 0 ? pt_target : pl.meta.target_t;
        if (target < 0) throw UsageError("--target-t is required when the input carries no target");
        json runs = json::array();
        std::optional<BitVector> found;
        const std::string base = pt_cfg.seed;
        for (unsigned r = 0; r < pt_cfg.repetitions; ++r) {
            PtConfig cfg = pt_cfg;
            cfg.seed = pt_cfg.repetitions == 1 ? base : base + "/rep" + std::to_string(r);
            const auto res = pt_run(pl, target, cfg);
            json rates = json::array();
            for (std::size_t i = 0; i < res.exchange.attempts.size(); ++i)
                rates.push_back(res.exchange.attempts[i] ? double(res.exchange.accepted[i]) / double(res.exchange.attempts[i]) : 0.0);
            json j = {{"success", res.success},
                      {"sweeps", res.sweeps},
                      {"wall_time_s", res.wall_time_s},
                      {"cpu_time_s", res.cpu_time_s},
                      {"best_objective", res.best_objective},
                      {"seed", res.seed},
                      {"exchange_acceptance", rates}};
            if (res.success) {
                j["q"] = to_hex(res.message);
                if (!found) found = res.message;
            }
            runs.push_back(j);
        }
        if (found && !pt_out.empty()) write_json(pt_out, {{"format", "mceliece-ising-message/v1"}, {"q", to_hex(*found)}});
        print({{"solver", "pt"}, {"success", found.has_value()}, {"target_t", target}, {"runs", runs}});
        if (!found) code = report_error(ErrorKind::solver_failure, "no repetition reached the target within the sweep budget");
    });

    // decode
    std::string dec_in, dec_key, dec_out;
    auto* dec = app.add_subcommand("decode", "Decrypt an instance with its private key");
    dec->add_option("--in", dec_in, "Instance JSON")->required();
    dec->add_option("--private-key", dec_key, "Key JSON")->required();
    dec->add_option("--out", dec_out, "Write the solution JSON here");
    dec->callback([&] {
        const auto inst = load_instance(dec_in);
        const auto key = private_key_from_json(read_json(dec_key));
        if (key.code.n != inst.n || key.code.k != inst.k) throw UsageError("key and instance dimensions differ");
        const auto q = decrypt(inst.q_prime, key);
        const Solution sol{q, vecmat(q, inst.G_prime) ^ inst.q_prime};
        if (!dec_out.empty()) write_json(dec_out, to_json(sol));
        print({{"q", to_hex(sol.q)}, {"error", to_hex(sol.error)}, {"valid", verify_solution(inst, sol)}});
    });

    // verify
    std::string ver_in, ver_sol;
    auto* ver = app.add_subcommand("verify", "Check a solution against an instance");
    ver->add_option("--in", ver_in, "Instance JSON")->required();
    ver->add_option("--solution", ver_sol, "Solution JSON")->required();
    ver->callback([&] {
        const auto inst = load_instance(ver_in);
        const auto sol = solution_from_json(read_json(ver_sol), inst.n, inst.k);
        const bool ok = verify_solution(inst, sol);
        print({{"valid", ok}, {"error_weight", sol.error.weight()}, {"t", inst.t}});
        if (!ok) code = report_error(ErrorKind::solver_failure, "solution does not verify");
    });

    // bench campaign
    auto* bench = app.add_subcommand("bench", "Benchmark campaigns");
    bench->require_subcommand(1);
    std::string camp_manifest, camp_out;
    auto* campaign = bench->add_subcommand("campaign", "Run a campaign manifest");
    campaign->add_option("--manifest", camp_manifest, "Campaign manifest JSON")->required();
    campaign->add_option("--out-dir", camp_out, "Override the manifest's output directory");
    campaign->callback([&] {
        auto m = manifest_from_json(read_json(camp_manifest));
        if (!camp_out.empty()) m.out_dir = camp_out;
        if (m.out_dir.empty()) m.out_dir = "campaign_out";
        const auto r = run_campaign(m);
        write_campaign(m.out_dir, m, r);
        json reports = json::array();
        for (const auto& t : r.reports)
            reports.push_back({{"n", t.combo.n},
                               {"k", t.combo.k()},
                               {"t", t.combo.t},
                               {"log2_tts_99", t.infinite ? json(nullptr) : json(t.log2_tts_99)},
                               {"failures", t.failures}});
        json summary = {{"out_dir", m.out_dir.string()}, {"reports", reports}};
        if (r.fit_k) summary["slope_vs_k"] = r.fit_k->slope;
        if (r.fit_theory) summary["slope_vs_theory"] = r.fit_theory->slope;
        print(summary);
    });

    // phase
    std::string ph_model, ph_out;
    std::size_t ph_grid = 101;
    auto* phase = app.add_subcommand("phase", "Emit the pair-census exponent on an (x, eps) grid");
    phase->add_option("--model", ph_model, "hwm, rphwm or lshwm")->required();
    phase->add_option("--grid", ph_grid, "Points per axis over [0, 1]")->check(CLI::Range(2, 100001));
    phase->add_option("--out", ph_out, "CSV output (default stdout)");
    phase->callback([&] {
        const auto xs = linspace(0, 1, ph_grid);
        std::ostringstream os;
        write_phase_csv(os, phase_grid(parse_model(ph_model), xs, xs));
        write_text_or_stdout(ph_out, os.str());
    });

    // census
    std::string ce_model, ce_out, ce_seed = "0";
    unsigned ce_n = 0;
    std::size_t ce_samples = 1;
    std::vector<unsigned> ce_energies;
    auto* census = app.add_subcommand("census", "Empirical pair census per energy shell");
    census->add_option("--model", ce_model, "hwm, rphwm or lshwm")->required();
    census->add_option("--n", ce_n, "Number of bits (at most 24)")->required();
    census->add_option("--samples", ce_samples, "Disorder samples")->check(CLI::PositiveNumber);
    census->add_option("--energies", ce_energies, "Energy shells (default: all; LSHWM skips 0)");
    census->add_option("--seed", ce_seed, "Seed string");
    census->add_option("--out", ce_out, "CSV output (default stdout)");
    census->callback([&] {
        const auto model = parse_model(ce_model);
        if (ce_energies.empty())
            for (unsigned e = model == Model::LSHWM ? 1 : 0; e <= ce_n; ++e) ce_energies.push_back(e);
        Rng rng(ce_seed);
        std::ostringstream os;
        write_census_csv(os, empirical_census(model, ce_n, ce_energies, ce_samples, rng));
        write_text_or_stdout(ce_out, os.str());
    });

    // rankdist
    unsigned rd_alpha = 5, rd_size = 64;
    std::size_t rd_samples = 0;
    std::string rd_out, rd_seed = "0";
    auto* rankdist = app.add_subcommand("rankdist", "Corank distribution of random square GF(2) matrices");
    rankdist->add_option("--alpha-max", rd_alpha, "Largest corank listed");
    rankdist->add_option("--samples", rd_samples, "Also sample this many random matrices");
    rankdist->add_option("--size", rd_size, "Matrix size for sampling")->check(CLI::PositiveNumber);
    rankdist->add_option("--seed", rd_seed, "Seed string");
    rankdist->add_option("--out", rd_out, "CSV output (default stdout)");
    rankdist->callback([&] {
        std::vector<std::size_t> hist(rd_alpha + 1, 0);
        Rng rng(rd_seed);
        for (std::size_t s = 0; s < rd_samples; ++s) {
            const auto corank = rd_size - rank(sample_matrix(rd_size, rd_size, rng));
            if (corank <= rd_alpha) ++hist[corank];
        }
        std::ostringstream os;
        os.precision(12);
        os << "alpha,p_theory" << (rd_samples ? ",p_empirical,count" : "") << '\n';
        for (unsigned a = 0; a <= rd_alpha; ++a) {
            os << a << ',' << rank_distribution(a);
            if (rd_samples) os << ',' << double(hist[a]) / double(rd_samples) << ',' << hist[a];
            os << '\n';
        }
        write_text_or_stdout(rd_out, os.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(ErrorKind::usage, e.what());
    } catch (const Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error(ErrorKind::internal, e.what());
    }
    return code;
}
