#include "graphspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphspec/sha256.hpp"
#include "graphspec/version.hpp"

namespace graphspec {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

std::vector<std::pair<double, double>> parse_weighted_list(const json& entries,
                                                           const char* value_key) {
  std::vector<std::pair<double, double>> out;
  for (const auto& entry : entries) {
    out.emplace_back(entry.at(value_key).get<double>(), entry.at("weight").get<double>());
  }
  return out;
}

}  // namespace

json OutputMeta::to_json() const {
  return json{{"config_hash", config_hash}, {"seed", seed}, {"version", version}};
}

std::string OutputMeta::csv_header() const {
  std::ostringstream out;
  out << "# config_hash=" << config_hash << "\n";
  out << "# seed=" << seed << "\n";
  out << "# version=" << version << "\n";
  return out.str();
}

std::string config_hash(const json& config) {
  // nlohmann keeps object keys sorted, so dump() is canonical.
  return sha256_hex(config.dump());
}

ModelSpec model_from_json(const json& config) {
  if (!config.is_object()) raise(ErrorKind::BadConfig, "model config must be a JSON object");
  if (!config.contains("n")) raise(ErrorKind::BadConfig, "model config needs field 'n'");
  const auto n = config.at("n").get<std::int64_t>();

  const int forms = config.contains("atoms") + config.contains("two_community") +
                    config.contains("simplex");
  if (forms != 1) {
    raise(ErrorKind::BadConfig,
          "model config needs exactly one of 'atoms', 'two_community', 'simplex'");
  }

  if (config.contains("atoms")) {
    std::vector<ParamAtom> atoms;
    for (const auto& entry : config.at("atoms")) {
      const auto values = entry.at("k").get<std::vector<double>>();
      ParamAtom atom;
      atom.k = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
      atom.weight = entry.at("weight").get<double>();
      atoms.push_back(std::move(atom));
    }
    return build_model(std::move(atoms), n);
  }
  if (config.contains("two_community")) {
    const auto& tc = config.at("two_community");
    return build_two_community_model(parse_weighted_list(tc.at("kappas"), "kappa"),
                                     tc.at("theta").get<double>(), n);
  }
  const auto& sx = config.at("simplex");
  return build_simplex_model(sx.at("q").get<int>(), sx.at("phi").get<double>(),
                             parse_weighted_list(sx.at("magnitudes"), "k"), n);
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::BadConfig, "cannot open model file " + path);
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    raise(ErrorKind::BadConfig, "invalid JSON in " + path + ": " + e.what());
  }
  return model_from_json(config);
}

json model_to_json(const ModelSpec& model) {
  json atoms = json::array();
  for (const auto& atom : model.atoms) {
    std::vector<double> k(atom.k.data(), atom.k.data() + atom.k.size());
    atoms.push_back(json{{"k", k}, {"weight", atom.weight}});
  }
  return json{{"n", model.n}, {"atoms", atoms}};
}

json describe_model(const ModelSpec& model) {
  const RankQStructure rank = rank_structure(model);
  std::vector<double> alphas(rank.alphas.data(), rank.alphas.data() + rank.alphas.size());
  return json{{"n", model.n},
              {"q", model.q},
              {"c", model.c},
              {"two_m", model.two_m},
              {"alphas", alphas}};
}

void write_graph_csv(const SampledGraph& graph, const std::string& path, const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_header();
  out << "i,j,multiplicity\n";
  for (const auto& e : graph.edges) {
    out << e.i << ',' << e.j << ',' << e.multiplicity << '\n';
  }
  write_text_file(path, out.str());

  json sidecar{{"n", graph.n},
               {"seed", graph.seed},
               {"labels", graph.labels},
               {"meta", meta.to_json()}};
  write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

SampledGraph read_graph_csv(const std::string& path) {
  json sidecar;
  {
    std::ifstream side(path + ".json");
    if (!side) raise(ErrorKind::BadInput, "missing graph sidecar " + path + ".json");
    side >> sidecar;
  }
  SampledGraph graph;
  graph.n = sidecar.at("n").get<std::int64_t>();
  graph.seed = sidecar.at("seed").get<std::uint64_t>();
  graph.labels = sidecar.at("labels").get<std::vector<int>>();

  std::ifstream in(path);
  if (!in) raise(ErrorKind::BadInput, "cannot open graph file " + path);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    long long i = 0, j = 0, multiplicity = 0;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lld", &i, &j, &multiplicity) != 3) {
      raise(ErrorKind::BadInput, "malformed graph row: " + line);
    }
    graph.edges.push_back({i, j, multiplicity});
  }
  return graph;
}

void write_density_csv(const DensityCurve& curve, const std::string& path,
                       const OutputMeta& meta) {
  std::ostringstream out;
  out << meta.csv_header();
  out << "x,rho\n";
  for (std::size_t i = 0; i < curve.xs.size(); ++i) {
    out << format_double(curve.xs[i]) << ',' << format_double(curve.rho[i]) << '\n';
  }
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::BadInput, "cannot write file " + path);
  out << contents;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::BadInput, "cannot read file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace graphspec
