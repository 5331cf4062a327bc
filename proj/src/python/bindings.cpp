#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geovi/examples.hpp"
#include "geovi/experiment.hpp"
#include "geovi/griddens.hpp"
#include "geovi/hmc.hpp"
#include "geovi/inference.hpp"
#include "geovi/model.hpp"
#include "geovi/rng.hpp"

namespace py = pybind11;
using namespace geovi;

namespace {

// DenseMatrix <-> list of rows for the few dense crossings (covariances).
std::vector<Vec> rows_of(const DenseMatrix& a) {
    std::vector<Vec> rows(a.rows(), Vec(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) rows[i][j] = a(i, j);
    return rows;
}

DenseMatrix matrix_of(const std::vector<Vec>& rows) {
    DenseMatrix a(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != a.cols()) throw DimensionMismatch("ragged covariance rows");
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
    }
    return a;
}

ExperimentConfig config_of(const py::dict& options) {
    ExperimentConfig cfg;
    for (auto item : options) {
        const std::string key = py::cast<std::string>(py::str(item.first));
        std::string value;
        if (py::isinstance<py::bool_>(item.second))
            value = py::cast<bool>(item.second) ? "true" : "false";
        else
            value = py::cast<std::string>(py::str(item.second));
        set_config_key(cfg, key, value);
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_geovi, m) {
    m.doc() = "Geometric variational inference toolkit (python bindings)";
    m.def("version", []() { return std::string("0.1.0"); });

    // ---- maps and models ----
    py::class_<DiffMap>(m, "Map")
        .def_readonly("dim_in", &DiffMap::dim_in)
        .def_readonly("dim_out", &DiffMap::dim_out)
        .def_readonly("name", &DiffMap::name)
        .def("forward", &DiffMap::forward, py::arg("x"))
        .def("jvp", &DiffMap::jvp, py::arg("x"), py::arg("v"))
        .def("vjp", &DiffMap::vjp, py::arg("x"), py::arg("u"));

    py::class_<Model>(m, "Model")
        .def_readonly("dim", &Model::dim)
        .def_readonly("forward", &Model::forward)
        .def("hamiltonian", &Model::hamiltonian, py::arg("xi"))
        .def("full_hamiltonian", &Model::full_hamiltonian, py::arg("xi"))
        .def("grad_hamiltonian", &Model::grad_hamiltonian, py::arg("xi"));

    py::class_<ExampleBundle>(m, "ExampleBundle")
        .def_readonly("name", &ExampleBundle::name)
        .def_readonly("model", &ExampleBundle::model)
        .def_readonly("seed", &ExampleBundle::seed)
        .def_readonly("synthesized", &ExampleBundle::synthesized)
        .def_readonly("truth_latent", &ExampleBundle::truth_latent)
        .def_readonly("data", &ExampleBundle::data)
        .def_readonly("oracle_lo", &ExampleBundle::oracle_lo)
        .def_readonly("oracle_hi", &ExampleBundle::oracle_hi)
        .def_readonly("observed", &ExampleBundle::observed)
        .def_property_readonly("derived_names",
                               [](const ExampleBundle& b) {
                                   std::vector<std::string> names;
                                   for (const auto& [n, _] : b.derived) names.push_back(n);
                                   return names;
                               })
        .def("derived", [](const ExampleBundle& b, const std::string& name) {
            for (const auto& [n, map] : b.derived)
                if (n == name) return map;
            throw UnknownExample(b.name + " has no derived map '" + name + "'");
        });

    m.def("example_names", []() { return example_names(); });
    m.def("make_example", &make_example, py::arg("name"), py::arg("size") = 0,
          py::arg("seed") = 1);

    // ---- inference drivers ----
    py::class_<GeoViConfig>(m, "GeoViConfig")
        .def(py::init<>())
        .def_readwrite("outer_max", &GeoViConfig::outer_max)
        .def_readwrite("pairs", &GeoViConfig::pairs)
        .def_readwrite("final_samples", &GeoViConfig::final_samples)
        .def_readwrite("antithetic", &GeoViConfig::antithetic)
        .def_readwrite("kl_rel_tol", &GeoViConfig::kl_rel_tol)
        .def_readwrite("shift_tol", &GeoViConfig::shift_tol)
        .def_readwrite("threads", &GeoViConfig::threads);

    py::class_<ApproximationState>(m, "ApproximationState")
        .def_readonly("xi_bar", &ApproximationState::xi_bar)
        .def_readonly("kl_trace", &ApproximationState::kl_trace)
        .def_readonly("converged", &ApproximationState::converged)
        .def_readonly("outer_iterations", &ApproximationState::outer_iterations)
        .def("samples", &ApproximationState::samples);

    m.def(
        "run_geovi",
        [](const Model& model, const GeoViConfig& cfg, std::uint64_t seed) {
            return run_geovi(model, cfg, Rng(seed));
        },
        py::arg("model"), py::arg("cfg") = GeoViConfig{}, py::arg("seed") = 1);
    m.def(
        "run_mgvi",
        [](const Model& model, const GeoViConfig& cfg, std::uint64_t seed) {
            return run_mgvi(model, cfg, Rng(seed));
        },
        py::arg("model"), py::arg("cfg") = GeoViConfig{}, py::arg("seed") = 1);
    m.def(
        "sample_at",
        [](const Model& model, const Vec& xi_bar, const GeoViConfig& cfg, std::uint64_t seed,
           bool mgvi) { return sample_at(model, xi_bar, cfg, Rng(seed), mgvi); },
        py::arg("model"), py::arg("xi_bar"), py::arg("cfg") = GeoViConfig{},
        py::arg("seed") = 1, py::arg("mgvi") = false);
    m.def(
        "run_direct_lowdim",
        [](const Model& model) {
            const NewtonResult r = run_direct_lowdim(model);
            return py::make_tuple(r.x, r.value, r.converged, r.iterations);
        },
        py::arg("model"), "Returns (x, value, converged, iterations).");
    m.def(
        "elbo",
        [](const Model& model, const ApproximationState& state) {
            const ElboEstimate e = elbo(model, state);
            return py::make_tuple(e.value, e.std_error, e.logdet_metric, e.n, e.dropped);
        },
        py::arg("model"), py::arg("state"),
        "Returns (value, std_error, logdet_metric, n, dropped).");
    m.def("metric_logdet", &metric_logdet, py::arg("model"), py::arg("xi_bar"));

    // ---- reference sampler ----
    py::class_<HmcConfig>(m, "HmcConfig")
        .def(py::init<>())
        .def_readwrite("n_samples", &HmcConfig::n_samples)
        .def_readwrite("burn_in", &HmcConfig::burn_in)
        .def_readwrite("thin", &HmcConfig::thin)
        .def_readwrite("step_size", &HmcConfig::step_size)
        .def_readwrite("leapfrog_steps", &HmcConfig::leapfrog_steps)
        .def_readwrite("adapt", &HmcConfig::adapt)
        .def_readwrite("target_accept", &HmcConfig::target_accept);

    py::class_<HmcResult>(m, "HmcResult")
        .def_readonly("samples", &HmcResult::samples)
        .def_readonly("acceptance_rate", &HmcResult::acceptance_rate)
        .def_readonly("final_step_size", &HmcResult::final_step_size)
        .def_readonly("mean_abs_energy_error", &HmcResult::mean_abs_energy_error)
        .def_readonly("low_acceptance", &HmcResult::low_acceptance);

    m.def(
        "hmc_reference",
        [](const Model& model, const Vec& xi0, const HmcConfig& cfg, std::uint64_t seed) {
            Rng rng(seed);
            return hmc_reference(model, xi0, cfg, rng);
        },
        py::arg("model"), py::arg("xi0"), py::arg("cfg") = HmcConfig{}, py::arg("seed") = 1);

    // ---- grid oracles ----
    py::class_<GridDensity>(m, "GridDensity")
        .def_readonly("lo", &GridDensity::lo)
        .def_readonly("hi", &GridDensity::hi)
        .def_readonly("shape", &GridDensity::shape)
        .def_readonly("log_density", &GridDensity::log_density);

    m.def("make_grid_1d", &make_grid_1d, py::arg("lo"), py::arg("hi"), py::arg("n"));
    m.def("make_grid_2d", &make_grid_2d, py::arg("lo"), py::arg("hi"), py::arg("n"));
    m.def("fill_posterior_density", &fill_posterior_density, py::arg("model"), py::arg("grid"),
          py::arg("threads") = 1);
    m.def("fill_transformed_density", &fill_transformed_density, py::arg("model"),
          py::arg("xi_bar"), py::arg("m"), py::arg("grid"), py::arg("threads") = 1);
    m.def(
        "fill_gaussian_density",
        [](const Vec& mean, const std::vector<Vec>& cov, GridDensity& g) {
            fill_gaussian_density(mean, matrix_of(cov), g);
        },
        py::arg("mean"), py::arg("cov"), py::arg("grid"));
    m.def("normalize_density", &normalize_density, py::arg("grid"));
    m.def("grid_log_evidence", &grid_log_evidence, py::arg("grid"));
    m.def(
        "grid_kl",
        [](const GridDensity& p, const GridDensity& q) {
            const KlPair kl = grid_kl(p, q);
            return py::make_tuple(kl.pq, kl.qp);
        },
        py::arg("p"), py::arg("q"), "Returns (KL(P;Q), KL(Q;P)) in nats.");
    m.def(
        "grid_moments",
        [](const GridDensity& g) {
            const GridMoments mom = grid_moments(g);
            return py::make_tuple(mom.mean, rows_of(mom.cov));
        },
        py::arg("grid"), "Returns (mean, covariance rows).");
    m.def("grid_marginal", &grid_marginal, py::arg("grid"), py::arg("axis"));
    m.def("histogram_masses", &histogram_masses, py::arg("proto_1d"), py::arg("values"));
    m.def("total_variation", &total_variation, py::arg("w1"), py::arg("w2"));

    // ---- experiment runner ----
    m.def(
        "run_experiment", [](const py::dict& options) { return run_experiment(config_of(options)); },
        py::arg("options"),
        "Options are config keys as in the CLI (example, method, seed, out, vi.*, ...); "
        "returns the artifact file names relative to the output directory.");

    py::register_exception<UnknownExample>(m, "UnknownExample", PyExc_KeyError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
