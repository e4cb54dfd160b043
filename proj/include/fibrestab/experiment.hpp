#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fibrestab/bundlesim.hpp"
#include "fibrestab/json_io.hpp"

namespace fibrestab::bundlesim {

/// A simulation run described in JSON:
///
///   {"name", "atlas": {"fibre", "signs", "patch"},
///    "plant": {"name", "params"}, "controller": {"name", "params"},
///    "controller_B" (optional, overrides chart B), "target", "target_fibre",
///    "mode", "grid" (optional), "eps", "dwell", "step", "duration",
///    "switch_margin", "threads", "compatibility": {"samples_per_component",
///    "tol"}, "trajectories": [[angle, fibre], ...], "record_stride"}
///
/// Everything except the atlas, plant, controller and target has a default.
struct Experiment {
  std::string name;
  /// Not yet certified.
  FeedbackSystem system;
  std::optional<GridSpec> grid;
  BasinOptions basin;
  std::size_t compatibility_samples = 5000;
  double compatibility_tol = 1e-9;
  std::vector<BundlePoint> trajectory_starts;
  std::size_t record_stride = 10;
};

/// Throws ParseError for structural problems and UnknownName for unknown laws.
Experiment experiment_from_json(const io::Json& j);

struct ExperimentResult {
  CompatibilityReport compatibility;
  /// Empty when compatibility failed or no grid was given.
  std::optional<BasinReport> basin;
  std::vector<TrajectoryRecord> trajectories;
  std::string narrative;
};

/// Certifies the system, then runs the basin and the listed trajectories.
/// When compatibility fails nothing is integrated.
ExperimentResult run_experiment(const Experiment& experiment);

io::Json compatibility_to_json(const CompatibilityReport& r);
io::Json basin_to_json(const BasinReport& r);
io::Json result_to_json(const Experiment& experiment, const ExperimentResult& result);

}  // namespace fibrestab::bundlesim
