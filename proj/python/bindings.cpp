#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcforge/bench.hpp"
#include "mcforge/clustering.hpp"
#include "mcforge/errors.hpp"
#include "mcforge/io.hpp"
#include "mcforge/isd.hpp"
#include "mcforge/ising.hpp"
#include "mcforge/mceliece.hpp"
#include "mcforge/pt.hpp"

namespace py = pybind11;
using namespace mcforge;

namespace {

std::vector<int> bits(const BitVector& v) {
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.get(i);
    return out;
}

BitVector from_bits(const std::vector<int>& b) {
    BitVector v(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] != 0 && b[i] != 1) throw UsageError("bit lists may only contain 0 and 1");
        v.set(i, b[i] == 1);
    }
    return v;
}

Model model_of(const std::string& s) { return parse_model(s); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "McEliece instances as Ising problems: generation, mapping, solvers and statistics";

    // handles live for the lifetime of the interpreter
    static py::handle usage_exc = py::exception<UsageError>(m, "UsageError", PyExc_ValueError).release();
    static py::handle io_exc = py::exception<IoError>(m, "IoError", PyExc_OSError).release();
    static py::handle solver_exc = py::exception<DecodeFailure>(m, "SolverFailure", PyExc_RuntimeError).release();
    static py::handle internal_exc = py::exception<InternalError>(m, "InternalError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
            case ErrorKind::usage: py::set_error(usage_exc, e.what()); return;
            case ErrorKind::io: py::set_error(io_exc, e.what()); return;
            case ErrorKind::solver_failure: py::set_error(solver_exc, e.what()); return;
            case ErrorKind::internal: py::set_error(internal_exc, e.what()); return;
            }
        }
    });

    // instances
    py::class_<McElieceInstance>(m, "Instance")
        .def_readonly("n", &McElieceInstance::n)
        .def_readonly("k", &McElieceInstance::k)
        .def_readonly("t", &McElieceInstance::t)
        .def_readonly("m", &McElieceInstance::m)
        .def_readonly("seed", &McElieceInstance::seed)
        .def_property_readonly("q_prime", [](const McElieceInstance& i) { return bits(i.q_prime); })
        .def_property_readonly("g_prime",
                               [](const McElieceInstance& i) {
                                   std::vector<std::vector<int>> rows;
                                   for (std::size_t r = 0; r < i.G_prime.rows(); ++r) rows.push_back(bits(i.G_prime.row(r)));
                                   return rows;
                               })
        .def("to_json", [](const McElieceInstance& i) { return to_json(i).dump(2); })
        .def_static("from_json", [](const std::string& s) {
            try {
                return instance_from_json(nlohmann::json::parse(s));
            } catch (const nlohmann::json::parse_error& e) {
                throw IoError(e.what());
            }
        });

    m.def(
        "generate",
        [](std::size_t n, unsigned t, unsigned m_, const std::string& seed, bool allow_singular_s) {
            auto g = generate_instance(n, t, m_, seed, allow_singular_s);
            return py::make_tuple(g.instance, bits(g.solution.q), bits(g.solution.error));
        },
        py::arg("n"), py::arg("t"), py::arg("m"), py::arg("seed") = "0", py::arg("allow_singular_s") = false,
        "Planted instance; returns (instance, q, error).");
    m.def(
        "verify",
        [](const McElieceInstance& inst, const std::vector<int>& q, const std::vector<int>& e) {
            if (q.size() != inst.k || e.size() != inst.n) throw UsageError("q must have k bits and error N bits");
            return verify_solution(inst, {from_bits(q), from_bits(e)});
        },
        py::arg("instance"), py::arg("q"), py::arg("error"));

    // p-local instances
    py::class_<PLocalInstance>(m, "PLocal")
        .def_readonly("num_vars", &PLocalInstance::num_vars)
        .def_readonly("offset", &PLocalInstance::offset)
        .def_property_readonly("terms",
                               [](const PLocalInstance& p) {
                                   std::vector<std::pair<std::int64_t, std::vector<std::uint32_t>>> out;
                                   for (const auto& t : p.terms) out.emplace_back(t.coeff, t.vars);
                                   return out;
                               })
        .def_property_readonly("original_vars", [](const PLocalInstance& p) { return p.meta.original_vars; })
        .def_property_readonly("target_t", [](const PLocalInstance& p) { return p.meta.target_t; })
        .def("locality", &PLocalInstance::locality)
        .def("energy", [](const PLocalInstance& p, const std::vector<int>& x) { return energy(p, from_bits(x)); })
        .def("objective", [](const PLocalInstance& p, const std::vector<int>& x) { return objective(p, from_bits(x)); })
        .def("unsat_count", [](const PLocalInstance& p, const std::vector<int>& x) { return unsat_count(p, from_bits(x)); })
        .def("to_text", [](const PLocalInstance& p) { return to_plocal_text(p); })
        .def_static("from_text", &plocal_from_text);
    m.def("map_to_ising", &map_to_ising, py::arg("instance"));
    m.def("reduce_to_3local", &reduce_to_3local, py::arg("plocal"));
    m.def("reduce_to_2local", [](const PLocalInstance& p) { return reduce_to_2local(reduce_to_3local(p)); },
          py::arg("plocal"));
    m.def(
        "ground_states",
        [](const PLocalInstance& p, std::size_t num_free) {
            auto gs = exhaustive_ground_states(p, num_free ? num_free : p.num_vars);
            return py::make_tuple(gs.min_energy, gs.configs);
        },
        py::arg("plocal"), py::arg("num_free") = 0,
        "Exact minimum energy and minimizing configurations (bit i = variable i).");

    // solvers
    m.def(
        "solve_stern",
        [](const McElieceInstance& inst, unsigned p, std::uint64_t max_iters, const std::string& seed, unsigned workers) {
            IsdConfig cfg{p, max_iters, seed, worker_cap(workers)};
            SolverResult r;
            {
                py::gil_scoped_release release;
                r = stern_run(inst, cfg);
            }
            py::dict d;
            d["success"] = r.success;
            d["q"] = bits(r.message);
            d["error"] = bits(r.error);
            d["iterations"] = r.iterations;
            d["cpu_time_s"] = r.cpu_time_s;
            d["wall_time_s"] = r.wall_time_s;
            return d;
        },
        py::arg("instance"), py::arg("p") = 1, py::arg("max_iters") = 100'000'000, py::arg("seed") = "0",
        py::arg("workers") = 1);
    m.def(
        "solve_pt",
        [](const PLocalInstance& pl, long target_t, unsigned replicas, double beta_min, double beta_max,
           std::uint64_t sweeps, const std::string& seed) {
            PtConfig cfg;
            cfg.num_replicas = replicas;
            cfg.beta_min = beta_min;
            cfg.beta_max = beta_max;
            cfg.max_sweeps = sweeps;
            cfg.seed = seed;
            if (target_t < 0) target_t = pl.meta.target_t;
            PtResult r;
            {
                py::gil_scoped_release release;
                r = pt_run(pl, target_t, cfg);
            }
            py::dict d;
            d["success"] = r.success;
            d["q"] = bits(r.message);
            d["sweeps"] = r.sweeps;
            d["cpu_time_s"] = r.cpu_time_s;
            d["wall_time_s"] = r.wall_time_s;
            d["best_objective"] = r.best_objective;
            return d;
        },
        py::arg("plocal"), py::arg("target_t") = -1, py::arg("replicas") = 16, py::arg("beta_min") = 0.1,
        py::arg("beta_max") = 1.0, py::arg("sweeps") = 10'000'000, py::arg("seed") = "0");

    // closed forms and statistics
    m.def("stern_success_probability", &stern_success_probability, py::arg("n"), py::arg("k"), py::arg("t"),
          py::arg("p") = 1);
    m.def(
        "stern_theoretical_tts",
        [](std::size_t n, std::size_t k, unsigned t, unsigned p, const std::string& conv) {
            if (conv != "99" && conv != "expected") throw UsageError("convention must be '99' or 'expected'");
            return stern_theoretical_tts(n, k, t, p, conv == "99" ? TtsConvention::Confidence99 : TtsConvention::Expected);
        },
        py::arg("n"), py::arg("k"), py::arg("t"), py::arg("p") = 1, py::arg("convention") = "99",
        "log2 of the theoretical time to solution in elementary operations.");
    m.def("tts_from_success_prob", &tts_from_success_prob, py::arg("tau"), py::arg("p_succ"));
    m.def("quantile", &quantile, py::arg("values"), py::arg("q"));
    m.def(
        "tts_from_runtime_ranks",
        [](const std::vector<double>& runtimes, double q, const std::string& seed, std::size_t resamples) {
            Rng rng(seed);
            auto e = tts_from_runtime_ranks(runtimes, q, rng, resamples);
            return py::make_tuple(e.value, e.bootstrap_stderr, e.infinite);
        },
        py::arg("runtimes"), py::arg("q"), py::arg("seed") = "0", py::arg("resamples") = 1000,
        "Returns (quantile, bootstrap stderr, infinite flag); use float('inf') for censored runs.");
    m.def(
        "fit_scaling",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::string& seed) {
            Rng rng(seed);
            auto f = fit_scaling(x, y, rng);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["slope_ci95"] = py::make_tuple(f.slope_lo, f.slope_hi);
            d["intercept_ci95"] = py::make_tuple(f.intercept_lo, f.intercept_hi);
            d["r2"] = f.r2;
            d["residuals"] = f.residuals;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("seed") = "0");

    // clustering
    m.def("entropy", &entropy, py::arg("p"));
    m.def("phi", [](const std::string& model, double x, double eps) { return phi(model_of(model), x, eps); },
          py::arg("model"), py::arg("x"), py::arg("eps"));
    m.def("forbidden_onset_eps", &forbidden_onset_eps);
    m.def("forbidden_interval", &forbidden_interval, py::arg("eps"));
    m.def("pair_probability_lshwm", &pair_probability_lshwm, py::arg("n"), py::arg("energy"));
    m.def("rank_distribution", &rank_distribution, py::arg("alpha"));
    m.def(
        "expected_census",
        [](const std::string& model, unsigned n, unsigned e, unsigned x) { return expected_census(model_of(model), n, e, x); },
        py::arg("model"), py::arg("n"), py::arg("energy"), py::arg("distance"));
}
