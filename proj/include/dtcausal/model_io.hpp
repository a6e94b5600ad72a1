#pragma once

// JSON documents for multi-regime models.
//
//   {"mode": "itt" | "raw",
//    "variables": [{"name": "T*", "states": ["0", "1"], "latent": true}, ...],
//    "regimes": [{"name": "F_T", "target": "T", "itt": "T*"}, ...],
//    "cpts": [{"child": "Y", "parents": ["T"], "rows": [[0.8, 0.2], ...]}, ...],
//    "raw_regimes": [{"assignment": {"F_T": "~"}, "probs": [...]}, ...]}
//
// A regime with an "itt" entry makes its target deterministic with the
// ITT node as second parent. Itt documents carry "cpts", raw documents
// "raw_regimes" (joint tables row-major over "variables", first slowest).

#include <string>

#include "json.hpp"

#include "dtcausal/oracle.hpp"

namespace dtc {

using Json = nlohmann::ordered_json;

/// Throws ModelError on schema violations.
MultiRegimeModel model_from_json(const Json& doc);
Json model_to_json(const MultiRegimeModel& model);

MultiRegimeModel load_model(const std::string& path);

/// Reads a whole file; throws Error if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace dtc
