#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphspec/closedform.hpp"
#include "graphspec/empirical.hpp"
#include "graphspec/generator.hpp"
#include "graphspec/model.hpp"
#include "graphspec/outliers.hpp"
#include "graphspec/resolvent.hpp"
#include "graphspec/version.hpp"

namespace py = pybind11;
using namespace graphspec;

namespace {

ModelSpec model_from_atoms(const std::vector<std::pair<Eigen::VectorXd, double>>& atoms,
                           std::int64_t n) {
  std::vector<ParamAtom> converted;
  converted.reserve(atoms.size());
  for (const auto& [k, w] : atoms) converted.push_back({k, w});
  return build_model(std::move(converted), n);
}

py::dict outlier_report_dict(const OutlierReport& report) {
  py::list entries;
  for (const auto& e : report.entries) {
    py::dict d;
    d["r"] = e.r;
    d["alpha"] = e.alpha;
    d["z"] = e.z ? py::object(py::float_(*e.z)) : py::object(py::none());
    d["visible"] = e.visible;
    d["marginal"] = e.marginal;
    d["degenerate"] = e.degenerate;
    entries.append(d);
  }
  py::dict out;
  out["g_max"] = report.g_max;
  out["band_edge"] = report.band_edge;
  out["outliers"] = entries;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adjacency spectra of random graphs with community structure and "
            "arbitrary expected degrees: theory band, outliers, thresholds, "
            "samplers, and empirical eigensolvers.";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "GraphspecError");

  py::class_<ParamAtom>(m, "ParamAtom")
      .def(py::init([](Eigen::VectorXd k, double weight) {
             return ParamAtom{std::move(k), weight};
           }),
           py::arg("k"), py::arg("weight"))
      .def_readonly("k", &ParamAtom::k)
      .def_readonly("weight", &ParamAtom::weight);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("n", &ModelSpec::n)
      .def_readonly("q", &ModelSpec::q)
      .def_readonly("two_m", &ModelSpec::two_m)
      .def_readonly("c", &ModelSpec::c)
      .def_property_readonly("atoms",
                             [](const ModelSpec& model) {
                               std::vector<std::pair<Eigen::VectorXd, double>> out;
                               for (const auto& a : model.atoms) out.emplace_back(a.k, a.weight);
                               return out;
                             })
      .def("atom_counts", &ModelSpec::atom_counts)
      .def("mean_vector", &ModelSpec::mean_vector)
      .def("with_n",
           [](const ModelSpec& model, std::int64_t n) {
             ModelSpec out = model;
             out.n = n;
             out.two_m = out.c * static_cast<double>(n);
             return out;
           },
           py::arg("n"), "Copy of the model with a different vertex count.")
      .def("__repr__", [](const ModelSpec& model) {
        return "<ModelSpec n=" + std::to_string(model.n) + " q=" + std::to_string(model.q) +
               " atoms=" + std::to_string(model.atoms.size()) +
               " c=" + std::to_string(model.c) + ">";
      });

  m.def("build_model", &model_from_atoms, py::arg("atoms"), py::arg("n"),
        "Model from [(k_vector, weight), ...].");
  m.def("build_two_community_model", &build_two_community_model, py::arg("kappa_atoms"),
        py::arg("theta"), py::arg("n"));
  m.def("build_simplex_model", &build_simplex_model, py::arg("q"), py::arg("phi"),
        py::arg("magnitude_atoms"), py::arg("n"));
  m.def("simplex_directions", &simplex_directions, py::arg("q"), py::arg("phi"));

  m.def(
      "rank_structure",
      [](const ModelSpec& model) {
        const RankQStructure rank = rank_structure(model);
        return py::make_tuple(rank.alphas, rank.gram);
      },
      py::arg("model"), "Returns (alphas, gram).");

  py::class_<SampledGraph>(m, "SampledGraph")
      .def_readonly("n", &SampledGraph::n)
      .def_readonly("seed", &SampledGraph::seed)
      .def_readonly("labels", &SampledGraph::labels)
      .def_property_readonly("edges",
                             [](const SampledGraph& graph) {
                               Eigen::MatrixX<std::int64_t> out(graph.edges.size(), 3);
                               for (std::size_t e = 0; e < graph.edges.size(); ++e) {
                                 out(e, 0) = graph.edges[e].i;
                                 out(e, 1) = graph.edges[e].j;
                                 out(e, 2) = graph.edges[e].multiplicity;
                               }
                               return out;
                             })
      .def("degrees", &SampledGraph::degrees)
      .def("total_multiplicity", &SampledGraph::total_multiplicity)
      .def("__repr__", [](const SampledGraph& graph) {
        return "<SampledGraph n=" + std::to_string(graph.n) +
               " edges=" + std::to_string(graph.edges.size()) + ">";
      });

  m.def("sample_graph", &sample_graph, py::arg("model"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "degree_stats",
      [](const SampledGraph& graph) {
        py::list out;
        for (const auto& s : degree_stats(graph)) {
          py::dict d;
          d["label"] = s.label;
          d["count"] = s.count;
          d["mean"] = s.mean;
          d["variance"] = s.variance;
          out.append(d);
        }
        return out;
      },
      py::arg("graph"));

  m.def(
      "solve_h",
      [](std::complex<double> z, const ModelSpec& model, double tol, int max_iter) {
        SolveOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        const HSolution sol = solve_h(z, model, nullptr, opts);
        return py::make_tuple(sol.h, sol.residual, sol.iterations);
      },
      py::arg("z"), py::arg("model"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100000,
      "Returns (h, residual, iterations).");
  m.def(
      "stieltjes_g",
      [](std::complex<double> z, const ModelSpec& model) {
        const HSolution sol = solve_h(z, model);
        return stieltjes_g(sol, model);
      },
      py::arg("z"), py::arg("model"));
  m.def("density_at",
        [](double x, const ModelSpec& model, double epsilon) {
          return density_at(x, model, epsilon);
        },
        py::arg("x"), py::arg("model"), py::arg("epsilon") = 1e-4);
  m.def(
      "density_curve",
      [](const ModelSpec& model, double lo, double hi, int points, double epsilon, int threads) {
        // Plain C++ return type: the tuple conversion must run with the GIL
        // re-acquired, after the call guard is gone.
        const DensityCurve curve = density_curve(model, {lo, hi, points}, epsilon, threads);
        return std::make_pair(curve.xs, curve.rho);
      },
      py::arg("model"), py::arg("lo"), py::arg("hi"), py::arg("points") = 1001,
      py::arg("epsilon") = 1e-3, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>(), "Returns (xs, rho).");
  m.def(
      "find_band_edges",
      [](const ModelSpec& model) { return find_band_edges(model).intervals; },
      py::arg("model"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "outlier_eigenvalues",
      [](const ModelSpec& model) {
        const Band band = find_band_edges(model);
        return outlier_report_dict(outlier_eigenvalues(model, band));
      },
      py::arg("model"));
  m.def("detectability_threshold",
        [](const std::vector<std::pair<double, double>>& kappa_atoms) {
          return detectability_threshold(kappa_atoms);
        },
        py::arg("kappa_atoms"));

  m.def("threshold_constants", []() {
    const ThresholdConstants tc = threshold_constants();
    py::dict d;
    d["x"] = tc.x;
    d["y"] = tc.y;
    d["coefficient"] = tc.coefficient;
    return d;
  });
  m.def("semicircle_density", &semicircle_density, py::arg("x"), py::arg("c"));
  m.def("quadratic_h", &quadratic_h, py::arg("z"), py::arg("c"));
  m.def("cubic_h_physical", &cubic_h_physical, py::arg("z"), py::arg("kappa1"),
        py::arg("kappa2"));
  m.def("two_value_density", &two_value_density, py::arg("x"), py::arg("kappa1"),
        py::arg("kappa2"));
  m.def("band_edge_two_value", &band_edge_two_value, py::arg("kappa"));
  m.def("threshold_two_value", &threshold_two_value, py::arg("kappa"));

  m.def(
      "eigenvalues",
      [](const SampledGraph& graph, int top_k) {
        const EmpiricalSpectrum spectrum =
            top_k > 0 ? eigen_spectrum_topk(graph, top_k) : eigen_spectrum_full(graph);
        return spectrum.eigenvalues;
      },
      py::arg("graph"), py::arg("top_k") = 0, py::call_guard<py::gil_scoped_release>(),
      "Full spectrum (top_k = 0) or Lanczos top-k, descending.");
  m.def(
      "spectral_histogram",
      [](const std::vector<double>& eigenvalues, int bins, int exclude_top) {
        const Histogram hist = spectral_histogram(eigenvalues, bins, exclude_top);
        return py::make_tuple(hist.edges, hist.density);
      },
      py::arg("eigenvalues_desc"), py::arg("bins"), py::arg("exclude_top") = 0);
  m.def(
      "detect_communities",
      [](const SampledGraph& graph, int q) {
        const RecoveryResult result =
            detect_communities(graph, q, planted_communities(graph, q));
        py::dict d;
        d["accuracy"] = result.accuracy;
        d["assignment"] = result.assignment;
        return d;
      },
      py::arg("graph"), py::arg("q") = 2);
  m.def("interlacing_check", &interlacing_check, py::arg("n_small"), py::arg("model"),
        py::arg("alpha"), py::arg("seed"));
}
