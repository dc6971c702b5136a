#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/landscape.hpp"
#include "nkgroup/metrics.hpp"
#include "nkgroup/multiplex.hpp"

namespace nkgroup {

// JSON schemas
//
// Landscape:   {"N": int, "K": int, "seed": uint64,
//               "deps": [[int; K]; N], "tables": [[double; 2^(K+1)]; N]}
// Competence:  {"M": int, "N": int, "p": double, "seed": uint64,
//               "D": [[0|1; N]; M]}
// Multiplex:   {"M": int, "layers": [[[a, b], ...]; N]}  (zero-based members)
//
// Indices are zero-based. Parsing validates every invariant and throws
// ParameterError on malformed input.

nlohmann::json to_json(const Landscape& landscape);
Landscape landscape_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CompetenceMatrix& competence);
CompetenceMatrix competence_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Multiplex& network);
Multiplex multiplex_from_json(const nlohmann::json& j);

/// Formats with 9 significant digits.
std::string format_real(double value);

/// Header and rows: t,mean_fitness_norm,stderr_fitness,mean_consensus,
/// stderr_consensus,n_realizations
void write_curves_csv(std::ostream& out, const EnsembleCurves& curves);

/// Header: time,fitness,consensus,realization_id
void write_trajectory_csv_header(std::ostream& out);
void write_trajectory_csv_rows(std::ostream& out, const TrajectoryRecord& record,
                               int realization_id);

/// Header and rows: state,probability. `state` is the GroupState encoding.
void write_stationary_csv(std::ostream& out, std::span<const double> pi);

}  // namespace nkgroup
