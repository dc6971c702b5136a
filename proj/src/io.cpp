#include "nkgroup/io.hpp"

#include <cstdio>
#include <ostream>

#include "nkgroup/error.hpp"

namespace nkgroup {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParameterError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const Landscape& landscape) {
  json deps = json::array();
  json tables = json::array();
  for (int j = 0; j < landscape.n(); ++j) {
    deps.push_back(landscape.deps(j));
    const auto t = landscape.table(j);
    tables.push_back(std::vector<double>(t.begin(), t.end()));
  }
  return {{"N", landscape.n()},
          {"K", landscape.k()},
          {"seed", landscape.seed()},
          {"deps", std::move(deps)},
          {"tables", std::move(tables)}};
}

Landscape landscape_from_json(const json& j) {
  return Landscape(field<int>(j, "N"), field<int>(j, "K"), field<std::uint64_t>(j, "seed"),
                   field<std::vector<std::vector<int>>>(j, "deps"),
                   field<std::vector<std::vector<double>>>(j, "tables"));
}

json to_json(const CompetenceMatrix& competence) {
  json rows = json::array();
  for (int k = 0; k < competence.m(); ++k) {
    const auto r = competence.row(k);
    rows.push_back(std::vector<int>(r.begin(), r.end()));
  }
  return {{"M", competence.m()},
          {"N", competence.n()},
          {"p", competence.p()},
          {"seed", competence.seed()},
          {"D", std::move(rows)}};
}

CompetenceMatrix competence_from_json(const json& j) {
  const int m = field<int>(j, "M");
  const int n = field<int>(j, "N");
  const auto rows = field<std::vector<std::vector<int>>>(j, "D");
  require(static_cast<int>(rows.size()) == m, "D must have M rows");
  std::vector<std::uint8_t> entries;
  entries.reserve(static_cast<std::size_t>(m) * n);
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == n, "each row of D must have N entries");
    for (int e : row) {
      require(e == 0 || e == 1, "competence entries must be 0 or 1");
      entries.push_back(static_cast<std::uint8_t>(e));
    }
  }
  return CompetenceMatrix(m, n, field<double>(j, "p"), field<std::uint64_t>(j, "seed"),
                          std::move(entries));
}

json to_json(const Multiplex& network) {
  json layers = json::array();
  for (int j = 0; j < network.layers(); ++j) {
    json edges = json::array();
    for (auto [a, b] : network.edges(j)) edges.push_back({a, b});
    layers.push_back(std::move(edges));
  }
  return {{"M", network.members()}, {"layers", std::move(layers)}};
}

Multiplex multiplex_from_json(const json& j) {
  const auto raw = field<std::vector<std::vector<std::vector<int>>>>(j, "layers");
  std::vector<EdgeList> layers;
  layers.reserve(raw.size());
  for (const auto& layer : raw) {
    EdgeList edges;
    for (const auto& e : layer) {
      require(e.size() == 2, "an edge is a pair of member indices");
      edges.emplace_back(e[0], e[1]);
    }
    layers.push_back(std::move(edges));
  }
  return Multiplex(field<int>(j, "M"), std::move(layers));
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_curves_csv(std::ostream& out, const EnsembleCurves& curves) {
  out << "t,mean_fitness_norm,stderr_fitness,mean_consensus,stderr_consensus,n_realizations\n";
  const auto& f = curves.fitness;
  const auto& c = curves.consensus;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    out << format_real(f.grid[i]) << ',' << format_real(f.mean[i]) << ','
        << format_real(f.std_error[i]) << ',' << format_real(c.mean[i]) << ','
        << format_real(c.std_error[i]) << ',' << f.count << '\n';
  }
}

void write_trajectory_csv_header(std::ostream& out) {
  out << "time,fitness,consensus,realization_id\n";
}

void write_trajectory_csv_rows(std::ostream& out, const TrajectoryRecord& record,
                               int realization_id) {
  for (std::size_t i = 0; i < record.grid.size(); ++i) {
    out << format_real(record.grid[i]) << ',' << format_real(record.fitness[i]) << ','
        << format_real(record.consensus[i]) << ',' << realization_id << '\n';
  }
}

void write_stationary_csv(std::ostream& out, std::span<const double> pi) {
  out << "state,probability\n";
  for (std::size_t s = 0; s < pi.size(); ++s) out << s << ',' << format_real(pi[s]) << '\n';
}

}  // namespace nkgroup
