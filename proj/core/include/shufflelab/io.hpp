#pragma once

#include <string>
#include <vector>

#include "shufflelab/distribution.hpp"
#include "shufflelab/geometry.hpp"
#include "shufflelab/scenario.hpp"
#include "shufflelab/transcripts.hpp"

namespace shufflelab {

// Scenario documents are JSON objects with fields
//   alphabet (array of symbol strings),
//   D0, D1 (arrays of symbols),
//   p0, p1 (objects: symbol -> conditional weight on the matching set),
//   alpha0, alpha1 (objects: symbol -> rare intensity; missing means 0),
//   dominant_correction (optional object {"0": {...}, "1": {...}}),
//   pi (number in [0,1]),
//   composition ({"rule":"proportional"} | {"rule":"fixed","k":int}
//                | {"rule":"custom","pairs":[[n,k],...]}).
// Unknown fields are rejected so that typos surface as errors.
RandomizerScenario parse_scenario_json(const std::string& text);
RandomizerScenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const RandomizerScenario& scenario);

// Geometry report: components and rare classes as symbol lists, vectors as
// arrays, matrices row-major.
std::string geometry_to_json(const QuotientGeometry& geometry,
                             const AlphabetSpec& alphabet);

// One row per atom: the named key columns, then embed_0.. columns when the
// law carries an embedding, then mass and the (global) deficit column.
std::string law_to_csv(const DiscreteDistribution& law,
                       const std::vector<std::string>& key_headers);

// Key columns named by alphabet symbols.
std::string transcript_law_to_csv(const TranscriptLaw& law,
                                  const AlphabetSpec& alphabet);

// Shortest-round-trip decimal formatting used in every CSV cell.
std::string format_double(double x);

}  // namespace shufflelab
