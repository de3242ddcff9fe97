#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "graphspec/closedform.hpp"
#include "graphspec/empirical.hpp"
#include "graphspec/generator.hpp"
#include "graphspec/io.hpp"
#include "graphspec/model.hpp"
#include "graphspec/outliers.hpp"
#include "graphspec/resolvent.hpp"
#include "graphspec/version.hpp"

namespace gs = graphspec;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::uint64_t seed = 12345;
  int threads = 0;
  std::string format = "csv";
  std::string out;
};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

gs::OutputMeta make_meta(const json& config, std::uint64_t seed) {
  return {gs::config_hash(config), seed, gs::kVersion};
}

void emit_json(const json& payload, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << payload.dump(2) << "\n";
  } else {
    gs::write_text_file(out, payload.dump(2) + "\n");
  }
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    gs::write_text_file(out, text);
  }
}

json outlier_report_json(const gs::OutlierReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json entry{{"r", e.r},       {"alpha", e.alpha},       {"visible", e.visible},
               {"marginal", e.marginal}, {"degenerate", e.degenerate}};
    entry["z"] = e.z ? json(*e.z) : json(nullptr);
    entries.push_back(entry);
  }
  return json{{"g_max", report.g_max}, {"band_edge", report.band_edge}, {"outliers", entries}};
}

struct CompareResult {
  json payload;
  std::string hist_csv;
  gs::DensityCurve theory_curve;
  gs::EmpiricalSpectrum spectrum;
  gs::OutlierReport outliers;
  gs::Band band;
  bool pass = false;
};

/// Shared pipeline behind `compare` and `reproduce-figure`: theory band +
/// outliers vs one sampled graph's spectrum.
CompareResult run_compare(const gs::ModelSpec& model, std::uint64_t seed, int bins, int threads) {
  CompareResult result;
  result.band = gs::find_band_edges(model);
  result.outliers = gs::outlier_eigenvalues(model, result.band);

  const gs::SampledGraph graph = gs::sample_graph(model, seed);
  result.spectrum = gs::eigen_spectrum_full(graph);

  int visible = 0;
  for (const auto& e : result.outliers.entries) {
    if (e.visible) ++visible;
  }

  const gs::Histogram hist = gs::spectral_histogram(result.spectrum.eigenvalues, bins, visible);

  // Bin-averaged theory density (Simpson per bin) so the L1 distance is not
  // dominated by in-bin curvature.
  const double width = result.band.width();
  const double epsilon = 1e-4 * width;
  std::vector<double> theory_avg(hist.density.size(), 0.0);
  gs::SolveOptions opts;
  for (std::size_t b = 0; b < hist.density.size(); ++b) {
    const double lo = hist.edges[b], hi = hist.edges[b + 1];
    const double mid = 0.5 * (lo + hi);
    theory_avg[b] = (gs::density_at(lo, model, epsilon) +
                     4.0 * gs::density_at(mid, model, epsilon) +
                     gs::density_at(hi, model, epsilon)) /
                    6.0;
  }

  double l1 = 0.0;
  for (std::size_t b = 0; b < hist.density.size(); ++b) {
    l1 += std::abs(hist.density[b] - theory_avg[b]) * (hist.edges[b + 1] - hist.edges[b]);
  }

  json outlier_errors = json::array();
  bool outliers_ok = true;
  int idx = 0;
  for (const auto& e : result.outliers.entries) {
    if (!e.visible) continue;
    const double empirical = result.spectrum.eigenvalues[idx];
    const double err = std::abs(empirical - *e.z) / std::abs(*e.z);
    outlier_errors.push_back(
        json{{"r", e.r}, {"theory", *e.z}, {"empirical", empirical}, {"relative_error", err}});
    if (err > 0.03) outliers_ok = false;
    ++idx;
  }

  const double band_margin = result.band.upper_edge() * 1.02;
  int above = 0;
  for (double lambda : result.spectrum.eigenvalues) {
    if (lambda > band_margin) ++above;
  }

  result.pass = l1 <= 0.05 && outliers_ok && above == visible;
  result.payload = json{{"l1_distance", l1},
                        {"outlier_errors", outlier_errors},
                        {"counts", json{{"empirical_above_band", above},
                                        {"theory_visible", visible},
                                        {"band_margin", band_margin}}},
                        {"band", json{{"lo", result.band.lower_edge()},
                                      {"hi", result.band.upper_edge()}}},
                        {"pass", result.pass}};

  std::ostringstream csv;
  csv << "bin_lo,bin_hi,hist_density,theory_density\n";
  for (std::size_t b = 0; b < hist.density.size(); ++b) {
    csv << fmt(hist.edges[b]) << ',' << fmt(hist.edges[b + 1]) << ',' << fmt(hist.density[b])
        << ',' << fmt(theory_avg[b]) << '\n';
  }
  result.hist_csv = csv.str();

  const double pad = 0.1 * width;
  result.theory_curve = gs::density_curve(
      model, {result.band.lower_edge() - pad, result.band.upper_edge() + pad, 801}, epsilon,
      threads);
  return result;
}

std::string eigenvalues_csv(const gs::EmpiricalSpectrum& spectrum, const gs::OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_header();
  if (spectrum.residuals.empty()) {
    out << "eigenvalue\n";
    for (double v : spectrum.eigenvalues) out << fmt(v) << '\n';
  } else {
    out << "eigenvalue,residual\n";
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
      out << fmt(spectrum.eigenvalues[i]) << ',' << fmt(spectrum.residuals[i]) << '\n';
    }
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of random graphs with communities and arbitrary expected degrees"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Seed for sampling subcommands")->capture_default_str();
  app.add_option("--threads", flags.threads, "Worker threads (0 = auto)")->capture_default_str();
  app.add_option("--format", flags.format, "Preferred scalar output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", flags.out, "Output path (default stdout)");

  // ---- model ----
  auto* model_cmd = app.add_subcommand("model", "Model validation and description");
  std::string model_file;
  auto* describe = model_cmd->add_subcommand("describe", "Print n, q, c, two_m, alphas");
  describe->add_option("file", model_file, "Model config JSON")->required();

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand("sample", "Sample a graph from a model");
  std::string sample_model, sample_out = "graph.csv";
  sample_cmd->add_option("file", sample_model, "Model config JSON")->required();
  sample_cmd->add_option("--out", sample_out, "Graph CSV path")->capture_default_str();

  // ---- theory ----
  auto* theory = app.add_subcommand("theory", "Spectral band, outliers, thresholds");
  std::string theory_model;
  auto* density = theory->add_subcommand("density", "Band density curve");
  double density_lo = 0.0, density_hi = 0.0, density_eps = 0.0;
  int density_points = 1001;
  bool density_has_range = false;
  density->add_option("file", theory_model, "Model config JSON")->required();
  auto* lo_opt = density->add_option("--lo", density_lo, "Grid lower end");
  density->add_option("--hi", density_hi, "Grid upper end")->needs(lo_opt);
  density->add_option("--points", density_points, "Grid points")->capture_default_str();
  density->add_option("--epsilon", density_eps, "Broadening (default 1e-4 * range)");

  auto* band_cmd = theory->add_subcommand("band", "Band intervals as JSON");
  band_cmd->add_option("file", theory_model, "Model config JSON")->required();

  auto* outliers_cmd = theory->add_subcommand("outliers", "Outlying eigenvalues and g_max");
  outliers_cmd->add_option("file", theory_model, "Model config JSON")->required();

  auto* threshold_cmd =
      theory->add_subcommand("threshold", "Detectability threshold for two-community models");
  std::string sweep_spec;
  threshold_cmd->add_option("file", theory_model, "Model config JSON")->required();
  threshold_cmd->add_option("--sweep", sweep_spec, "theta sweep lo:hi:steps -> CSV");

  // ---- oracle ----
  auto* oracle = app.add_subcommand("oracle", "Closed-form reference values");
  oracle->add_subcommand("constants", "Constants of the kappa,2kappa family");
  auto* oracle_density = oracle->add_subcommand("density", "Closed-form density curve");
  std::string oracle_kind = "semicircle";
  double oracle_c = 100.0, oracle_k1 = 60.0, oracle_k2 = 120.0;
  double oracle_lo = 0.0, oracle_hi = 0.0;
  int oracle_points = 1001;
  oracle_density->add_option("--kind", oracle_kind, "semicircle or two-value")
      ->check(CLI::IsMember({"semicircle", "two-value"}))
      ->capture_default_str();
  oracle_density->add_option("--c", oracle_c, "Average degree (semicircle)")
      ->capture_default_str();
  oracle_density->add_option("--kappa1", oracle_k1, "First kappa (two-value)")
      ->capture_default_str();
  oracle_density->add_option("--kappa2", oracle_k2, "Second kappa (two-value)")
      ->capture_default_str();
  oracle_density->add_option("--lo", oracle_lo, "Grid lower end (default -1.1 edge)");
  oracle_density->add_option("--hi", oracle_hi, "Grid upper end");
  oracle_density->add_option("--points", oracle_points, "Grid points")->capture_default_str();

  // ---- empirical ----
  auto* empirical = app.add_subcommand("empirical", "Eigenvalues of sampled graphs");
  auto* eig = empirical->add_subcommand("eig", "Eigenvalues of a stored graph");
  std::string graph_file, eig_mode = "full";
  eig->add_option("file", graph_file, "Graph CSV (with .json sidecar)")->required();
  eig->add_option("--mode", eig_mode, "full or topk:K")->capture_default_str();
  auto* detect = empirical->add_subcommand("detect", "Spectral community recovery");
  int detect_q = 2;
  detect->add_option("file", graph_file, "Graph CSV (with .json sidecar)")->required();
  detect->add_option("--q", detect_q, "Community count")->capture_default_str();

  // ---- compare ----
  auto* compare_cmd =
      app.add_subcommand("compare", "Theory vs one sampled spectrum: L1, outliers, counts");
  std::string compare_model;
  std::int64_t compare_n = 4000;
  int compare_bins = 40;
  std::string hist_out;
  compare_cmd->add_option("file", compare_model, "Model config JSON")->required();
  compare_cmd->add_option("--n", compare_n, "Vertex count override")->capture_default_str();
  compare_cmd->add_option("--bins", compare_bins, "Histogram bins")->capture_default_str();
  compare_cmd->add_option("--hist-out", hist_out, "Histogram-vs-theory CSV path");

  // ---- reproduce-figure ----
  auto* figure_cmd = app.add_subcommand(
      "reproduce-figure", "Full pipeline: density, outliers, sample, histogram, comparison");
  std::string figure_model, figure_dir = "figure-out";
  std::int64_t figure_n = 4000;
  int figure_bins = 40;
  figure_cmd->add_option("file", figure_model, "Model config JSON")->required();
  figure_cmd->add_option("--n", figure_n, "Vertex count override")->capture_default_str();
  figure_cmd->add_option("--bins", figure_bins, "Histogram bins")->capture_default_str();
  figure_cmd->add_option("--out-dir", figure_dir, "Artifact directory")->capture_default_str();

  // Let global flags appear after subcommand names.
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
    cmd->fallthrough();
    for (CLI::App* sub : cmd->get_subcommands({})) enable_fallthrough(sub);
  };
  for (CLI::App* sub : app.get_subcommands({})) enable_fallthrough(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (describe->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(model_file);
      json config{{"command", "model describe"}, {"model", gs::model_to_json(model)}};
      json payload = gs::describe_model(model);
      payload["meta"] = make_meta(config, flags.seed).to_json();
      emit_json(payload, flags.out);
      return 0;
    }

    if (sample_cmd->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(sample_model);
      json config{{"command", "sample"},
                  {"model", gs::model_to_json(model)},
                  {"seed", flags.seed}};
      const gs::SampledGraph graph = gs::sample_graph(model, flags.seed);
      gs::write_graph_csv(graph, sample_out, make_meta(config, flags.seed));
      std::cout << "wrote " << sample_out << " (" << graph.edges.size() << " unique edges)\n";
      return 0;
    }

    if (density->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(theory_model);
      density_has_range = lo_opt->count() > 0;
      if (!density_has_range) {
        const gs::Band band = gs::find_band_edges(model);
        const double pad = 0.1 * band.width();
        density_lo = band.lower_edge() - pad;
        density_hi = band.upper_edge() + pad;
      }
      if (density_eps <= 0.0) density_eps = 1e-4 * (density_hi - density_lo);
      json config{{"command", "theory density"},   {"model", gs::model_to_json(model)},
                  {"lo", density_lo},              {"hi", density_hi},
                  {"points", density_points},      {"epsilon", density_eps}};
      const gs::DensityCurve curve =
          gs::density_curve(model, {density_lo, density_hi, density_points}, density_eps,
                            flags.threads);
      const std::string path = flags.out.empty() ? "density.csv" : flags.out;
      gs::write_density_csv(curve, path, make_meta(config, flags.seed));
      std::cout << "wrote " << path << "\n";
      return 0;
    }

    if (band_cmd->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(theory_model);
      json config{{"command", "theory band"}, {"model", gs::model_to_json(model)}};
      const gs::Band band = gs::find_band_edges(model);
      json intervals = json::array();
      for (const auto& [lo, hi] : band.intervals) intervals.push_back(json::array({lo, hi}));
      json payload{{"intervals", intervals}, {"meta", make_meta(config, flags.seed).to_json()}};
      emit_json(payload, flags.out);
      return 0;
    }

    if (outliers_cmd->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(theory_model);
      json config{{"command", "theory outliers"}, {"model", gs::model_to_json(model)}};
      const gs::Band band = gs::find_band_edges(model);
      json payload = outlier_report_json(gs::outlier_eigenvalues(model, band));
      payload["meta"] = make_meta(config, flags.seed).to_json();
      emit_json(payload, flags.out);
      return 0;
    }

    if (threshold_cmd->parsed()) {
      const gs::ModelSpec model = gs::load_model_file(theory_model);
      if (!model.two_community) {
        gs::raise(gs::ErrorKind::BadConfig,
                  "threshold requires the two_community model form");
      }
      json config{{"command", "theory threshold"},
                  {"model", gs::model_to_json(model)},
                  {"sweep", sweep_spec}};
      const double theta_star = gs::detectability_threshold(model.two_community->kappa_atoms);
      if (sweep_spec.empty()) {
        json payload{{"theta_star", theta_star},
                     {"c", model.c},
                     {"meta", make_meta(config, flags.seed).to_json()}};
        emit_json(payload, flags.out);
        return 0;
      }
      double lo = 0.0, hi = 0.0;
      int steps = 0;
      if (std::sscanf(sweep_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 2) {
        gs::raise(gs::ErrorKind::BadInput, "--sweep expects lo:hi:steps");
      }
      std::ostringstream csv;
      csv << make_meta(config, flags.seed).csv_header();
      csv << "theta,alpha2,visible\n";
      for (int i = 0; i < steps; ++i) {
        const double theta = lo + (hi - lo) * i / (steps - 1);
        const double alpha2 = theta * theta / model.c;
        csv << fmt(theta) << ',' << fmt(alpha2) << ',' << (theta > theta_star ? 1 : 0) << '\n';
      }
      emit_text(csv.str(), flags.out);
      return 0;
    }

    if (oracle->get_subcommand("constants")->parsed()) {
      const gs::ThresholdConstants constants = gs::threshold_constants();
      json config{{"command", "oracle constants"}};
      json payload{{"x", constants.x},
                   {"y", constants.y},
                   {"coefficient", constants.coefficient},
                   {"meta", make_meta(config, flags.seed).to_json()}};
      emit_json(payload, flags.out);
      return 0;
    }

    if (oracle_density->parsed()) {
      const bool semicircle = oracle_kind == "semicircle";
      const double edge = semicircle ? 2.0 * std::sqrt(oracle_c)
                                     : gs::band_edge_two_value(std::min(oracle_k1, oracle_k2));
      if (oracle_lo == 0.0 && oracle_hi == 0.0) {
        oracle_lo = -1.1 * edge;
        oracle_hi = 1.1 * edge;
      }
      json config{{"command", "oracle density"}, {"kind", oracle_kind},
                  {"c", oracle_c},               {"kappa1", oracle_k1},
                  {"kappa2", oracle_k2},         {"lo", oracle_lo},
                  {"hi", oracle_hi},             {"points", oracle_points}};
      std::ostringstream csv;
      csv << make_meta(config, flags.seed).csv_header();
      csv << "x,rho\n";
      for (int i = 0; i < oracle_points; ++i) {
        const double x = oracle_lo + (oracle_hi - oracle_lo) * i / (oracle_points - 1);
        const double rho = semicircle ? gs::semicircle_density(x, oracle_c)
                                      : gs::two_value_density(x, oracle_k1, oracle_k2);
        csv << fmt(x) << ',' << fmt(rho) << '\n';
      }
      emit_text(csv.str(), flags.out);
      return 0;
    }

    if (eig->parsed()) {
      const gs::SampledGraph graph = gs::read_graph_csv(graph_file);
      json config{{"command", "empirical eig"}, {"graph", graph_file}, {"mode", eig_mode}};
      gs::EmpiricalSpectrum spectrum;
      if (eig_mode == "full") {
        spectrum = gs::eigen_spectrum_full(graph);
      } else if (eig_mode.rfind("topk:", 0) == 0) {
        spectrum = gs::eigen_spectrum_topk(graph, std::stoi(eig_mode.substr(5)));
      } else {
        gs::raise(gs::ErrorKind::BadInput, "--mode must be full or topk:K");
      }
      const std::string path = flags.out.empty() ? "eigs.csv" : flags.out;
      gs::write_text_file(path, eigenvalues_csv(spectrum, make_meta(config, graph.seed)));
      std::cout << "wrote " << path << "\n";
      return 0;
    }

    if (detect->parsed()) {
      const gs::SampledGraph graph = gs::read_graph_csv(graph_file);
      json config{{"command", "empirical detect"}, {"graph", graph_file}, {"q", detect_q}};
      const auto planted = gs::planted_communities(graph, detect_q);
      const gs::RecoveryResult recovery = gs::detect_communities(graph, detect_q, planted);
      json payload{{"accuracy", recovery.accuracy},
                   {"meta", make_meta(config, graph.seed).to_json()}};
      emit_json(payload, flags.out);
      return 0;
    }

    if (compare_cmd->parsed()) {
      gs::ModelSpec model = gs::load_model_file(compare_model);
      model.n = compare_n;
      model.two_m = model.c * static_cast<double>(compare_n);
      json config{{"command", "compare"},
                  {"model", gs::model_to_json(model)},
                  {"n", compare_n},
                  {"seed", flags.seed},
                  {"bins", compare_bins}};
      CompareResult result = run_compare(model, flags.seed, compare_bins, flags.threads);
      result.payload["meta"] = make_meta(config, flags.seed).to_json();
      emit_json(result.payload, flags.out);
      if (!hist_out.empty()) {
        gs::write_text_file(hist_out,
                            make_meta(config, flags.seed).csv_header() + result.hist_csv);
      }
      return result.pass ? 0 : 1;
    }

    if (figure_cmd->parsed()) {
      gs::ModelSpec model = gs::load_model_file(figure_model);
      model.n = figure_n;
      model.two_m = model.c * static_cast<double>(figure_n);
      json config{{"command", "reproduce-figure"},
                  {"model", gs::model_to_json(model)},
                  {"n", figure_n},
                  {"seed", flags.seed},
                  {"bins", figure_bins}};
      const gs::OutputMeta meta = make_meta(config, flags.seed);
      std::filesystem::create_directories(figure_dir);
      CompareResult result = run_compare(model, flags.seed, figure_bins, flags.threads);

      gs::write_density_csv(result.theory_curve, figure_dir + "/theory_density.csv", meta);
      json outliers_payload = outlier_report_json(result.outliers);
      outliers_payload["meta"] = meta.to_json();
      gs::write_text_file(figure_dir + "/outliers.json", outliers_payload.dump(2) + "\n");
      gs::write_text_file(figure_dir + "/eigenvalues.csv",
                          eigenvalues_csv(result.spectrum, meta));
      gs::write_text_file(figure_dir + "/histogram.csv", meta.csv_header() + result.hist_csv);
      result.payload["meta"] = meta.to_json();
      gs::write_text_file(figure_dir + "/compare.json", result.payload.dump(2) + "\n");

      std::cout << (result.pass ? "PASS" : "FAIL") << " l1=" << result.payload["l1_distance"]
                << " artifacts in " << figure_dir << "\n";
      return result.pass ? 0 : 1;
    }
  } catch (const gs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case gs::ErrorKind::InvalidAtom:
      case gs::ErrorKind::NegativeProduct:
      case gs::ErrorKind::WeightSum:
      case gs::ErrorKind::ZeroDegree:
      case gs::ErrorKind::ThetaTooLarge:
      case gs::ErrorKind::BadAngle:
      case gs::ErrorKind::BadInput:
      case gs::ErrorKind::BadConfig:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cerr << "error: no subcommand executed\n";
  return 2;
}
