#pragma once

// Scenario JSON loading/saving and the built-in reference scenario.
//
// File schema (top level):
//   "players":   [{"alpha": a, "beta": b} | {"utility": {...}, "beta": b}, ...]
//   "influence": optional N x N array, default identity
//   "objective": {"kind": "welfare"} | {"kind": "linear_global", "gamma": [...]}
//   "budget":    positive real
//   "success_threshold": optional real
//   "initial":   optional {"x": scalar|array, "p": scalar|array}
//   "iteration": optional overrides for IterationConfig fields
//   "ode":       optional overrides for OdeConfig fields
// The "alpha" player shorthand means a Log utility; tagged utilities are
// {"family": "log", "alpha": a}, {"family": "power", "alpha": a, "rho": r},
// {"family": "quadratic", "a": slope, "b": curvature}.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "riskmech/dynamics.hpp"
#include "riskmech/iterative.hpp"
#include "riskmech/model.hpp"

namespace riskmech {

struct ScenarioBundle {
  Scenario scenario;
  std::optional<IterationConfig> iteration;
  std::optional<OdeConfig> ode;
};

// Parse without semantic validation (structural problems still raise
// LoadError: malformed JSON, missing keys, unknown families, bad shapes).
ScenarioBundle parse_scenario(const nlohmann::json& doc, const std::string& id);

// Parse and validate; any failed validation check raises LoadError naming it.
ScenarioBundle load_scenario_bundle(const std::filesystem::path& file);
Scenario load_scenario(const std::filesystem::path& file);

// Canonical JSON serialization; load_scenario of the output reproduces the
// scenario exactly.
nlohmann::json scenario_to_json(const Scenario& s);
std::string save_scenario(const Scenario& s);

// The built-in six-player reference scenario (identity influence, linear
// global objective, budget 3) with its standard starting point.
Scenario paper_scenario();

}  // namespace riskmech
