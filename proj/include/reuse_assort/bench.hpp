#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "reuse_assort/model.hpp"

namespace reuse_assort {

enum class Scenario { kNoRental, kRental };

std::string to_string(Scenario s);
// Accepts "NO_RENTAL" / "RENTAL" (case-insensitive).
Scenario parse_scenario(const std::string& name);

struct Ec8Options {
  int horizon = 300;
  // Defaults to 30 units per product without rentals and 20 with rentals.
  std::optional<int> inventory;
};

// Six products, six types; type j (1-based) considers products 1..j. Fees
// grow with kappa for the low-index types, and arrivals drift from type 6
// to type 1 over the horizon when kappa > 0.
Instance gen_ec8(double kappa, Scenario scenario, std::uint64_t instance_seed,
                 const Ec8Options& options = {});

// Two periods, one unit. A sure fee-1 customer arrives first; with probability
// eps a fee-1/eps customer follows.
Instance gen_footnote9(double eps);

// One unit rented every period; each rental returns after one period with
// probability 1/2 and is lost otherwise.
Instance gen_ec21(int horizon);

}  // namespace reuse_assort
