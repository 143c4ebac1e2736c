#pragma once

#include <string>

#include "reuse_assort/model.hpp"

namespace reuse_assort {

// Instance JSON:
//   {"n": 2, "T": 3, "c": [1, 2],
//    "types": [{"id": "a", "alpha0": 1.0, "alpha": [1.0, 0.5],
//               "fees": [3.0, 1.0],
//               "durations": [[[2, 0.5], ["inf", 0.5]], [["inf", 1.0]]]}],
//    "arrival": [[1.0], [1.0], [1.0]],
//    "family": "all" | {"max_cardinality": k}}
//
// Products in "S" lists are 0-based. A type may give "table":
// [{"S": [0, 1], "probs": [0.3, 0.2]}, ...] instead of alpha0/alpha.
std::string instance_to_json(const Instance& inst, int indent = 1);
// Throws ModelError with line context on parse or schema errors. With
// validate = false the model invariants are not enforced (see
// Instance::check()).
Instance instance_from_json(const std::string& text, bool validate = true);

Instance load_instance(const std::string& path, bool validate = true);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace reuse_assort
