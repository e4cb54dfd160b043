#include "fibrestab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "fibrestab/errors.hpp"

namespace fibrestab::bundlesim {

using io::Json;

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("experiment: missing key '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw ParseError(std::string("experiment: '") + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) throw ParseError(std::string("experiment: '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::shared_ptr<const Law> law_from_json(const Json& j, bool plant) {
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
    throw ParseError("experiment: a law needs a string 'name'");
  Parameters params;
  if (j.contains("params")) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw ParseError("experiment: 'params' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (!value.is_number()) throw ParseError("experiment: parameter '" + key + "' must be a number");
      params[key] = value.get<double>();
    }
  }
  const std::string name = j.at("name").get<std::string>();
  return plant ? make_plant(name, params) : make_controller(name, params);
}

Json law_to_json(const Law& law) {
  Json params = Json::object();
  for (const auto& [key, value] : law.parameters()) params[key] = value;
  return Json{{"name", law.name()}, {"params", params}};
}

ChartAtlas atlas_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment: 'atlas' must be an object");
  const Json& fibre = require(j, "fibre");
  if (!fibre.is_string()) throw ParseError("experiment: 'atlas.fibre' must be a string");
  ChartAtlas atlas;
  atlas.fibre = parse_fibre_model(fibre.get<std::string>());
  if (j.contains("signs")) {
    const Json& s = j.at("signs");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ParseError("experiment: 'atlas.signs' must be two integers");
    atlas.signs = {s[0].get<int>(), s[1].get<int>()};
    for (int v : atlas.signs)
      if (v != 1 && v != -1) throw ParseError("experiment: transition signs must be +1 or -1");
  }
  if (j.contains("patch")) {
    if (!j.at("patch").is_boolean()) throw ParseError("experiment: 'atlas.patch' must be a boolean");
    atlas.patch = j.at("patch").get<bool>();
  }
  return atlas;
}

GridSpec grid_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment: 'grid' must be an object");
  GridSpec g;
  g.angle_cells = count(j, "angle_cells", g.angle_cells);
  g.fibre_cells = count(j, "fibre_cells", g.fibre_cells);
  g.angle_first = number(j, "angle_first", g.angle_first);
  g.angle_span = number(j, "angle_span", g.angle_span);
  g.fibre_min = number(j, "fibre_min", g.fibre_min);
  g.fibre_max = number(j, "fibre_max", g.fibre_max);
  if (g.angle_cells == 0 || g.fibre_cells == 0) throw ParseError("experiment: grid cell counts must be positive");
  if (!(g.fibre_max > g.fibre_min)) throw ParseError("experiment: grid needs fibre_min < fibre_max");
  return g;
}

Json grid_to_json(const GridSpec& g) {
  return Json{{"angle_cells", g.angle_cells}, {"fibre_cells", g.fibre_cells}, {"angle_first", g.angle_first},
              {"angle_span", g.angle_span},   {"fibre_min", g.fibre_min},     {"fibre_max", g.fibre_max}};
}

Json point_to_json(const BundlePoint& p) {
  return Json{{"chart", to_string(p.chart)}, {"angle", p.angle}, {"fibre", p.fibre}};
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

/// Describes where the nonconvergent cells sit, column by column.
std::string describe_basin(const FeedbackSystem& sys, const BasinReport& b) {
  std::string out = "Converged in " + to_string(b.target_mode) + " mode from " + std::to_string(b.converged_cells) +
                    " of " + std::to_string(b.total_cells) + " grid cells (" +
                    fixed(100.0 * b.converged_fraction, 2) + "%).";
  if (b.nonconvergent.empty()) return out + " No grid cell failed to converge.";

  std::map<std::size_t, std::size_t> columns;
  for (const BasinCell& c : b.nonconvergent) ++columns[c.angle_index];
  std::size_t complete = 0;
  std::string listed;
  for (const auto& [index, cells] : columns) {
    if (cells != b.grid.fibre_cells) continue;
    ++complete;
    const double angle = b.grid.angle_centre(index);
    if (!listed.empty()) listed += ", ";
    listed += fixed(angle, 4);
    if (angular_distance(angle, sys.target + std::numbers::pi) < 1e-9) listed += " (the antipode of the target)";
  }
  out += " " + std::to_string(b.nonconvergent.size()) + " cells do not converge, spread over " +
         std::to_string(columns.size()) + " angle column(s).";
  if (complete > 0)
    out += " Every cell of the column(s) at angle " + listed +
           " is stuck, so the nonconvergent set contains a whole fibre. A base circle is not contractible, and no "
           "continuous feedback on a bundle over it can attract everything to a single fibre.";
  if (!sys.atlas.patch && !sys.atlas.is_trivial())
    out += " The bundle is twisted (transition signs " + std::to_string(sys.atlas.signs[0]) + ", " +
           std::to_string(sys.atlas.signs[1]) +
           "). The stuck set sits over the same base angle as on the trivial bundle; the twist only changes how "
           "fibre coordinates are glued.";
  return out;
}

}  // namespace

Experiment experiment_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment: top level must be an object");
  Experiment e;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ParseError("experiment: 'name' must be a string");
    e.name = j.at("name").get<std::string>();
  }
  const ChartAtlas atlas = atlas_from_json(require(j, "atlas"));
  auto plant = law_from_json(require(j, "plant"), true);
  auto controller = law_from_json(require(j, "controller"), false);
  const Json& target = require(j, "target");
  if (!target.is_number()) throw ParseError("experiment: 'target' must be a number");
  e.system = make_system(e.name, atlas, std::move(plant), controller, target.get<double>(),
                         number(j, "target_fibre", 0.0));
  if (j.contains("controller_B")) e.system.controller_b = law_from_json(j.at("controller_B"), false);

  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) throw ParseError("experiment: 'mode' must be a string");
    e.basin.mode = parse_target_mode(j.at("mode").get<std::string>());
  }
  if (j.contains("grid")) e.grid = grid_from_json(j.at("grid"));
  e.basin.criteria.eps = number(j, "eps", e.basin.criteria.eps);
  e.basin.criteria.dwell = number(j, "dwell", e.basin.criteria.dwell);
  e.basin.step = number(j, "step", e.basin.step);
  e.basin.duration = number(j, "duration", e.basin.duration);
  e.basin.switch_margin = number(j, "switch_margin", e.basin.switch_margin);
  e.basin.threads = static_cast<unsigned>(count(j, "threads", 0));
  if (!(e.basin.criteria.eps > 0.0) || !(e.basin.criteria.dwell > 0.0) || !(e.basin.step > 0.0) ||
      !(e.basin.duration >= 0.0))
    throw ParseError("experiment: eps, dwell and step must be positive and duration non-negative");
  if (j.contains("compatibility")) {
    const Json& c = j.at("compatibility");
    if (!c.is_object()) throw ParseError("experiment: 'compatibility' must be an object");
    e.compatibility_samples = count(c, "samples_per_component", e.compatibility_samples);
    e.compatibility_tol = number(c, "tol", e.compatibility_tol);
    if (!(e.compatibility_tol > 0.0)) throw ParseError("experiment: compatibility tol must be positive");
  }
  if (j.contains("trajectories")) {
    const Json& t = j.at("trajectories");
    if (!t.is_array()) throw ParseError("experiment: 'trajectories' must be an array");
    for (const Json& p : t) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError("experiment: each trajectory start is [angle, fibre]");
      e.trajectory_starts.push_back(point_at(atlas, p[0].get<double>(), p[1].get<double>()));
    }
  }
  e.record_stride = std::max<std::size_t>(count(j, "record_stride", e.record_stride), 1);
  return e;
}

ExperimentResult run_experiment(const Experiment& experiment) {
  ExperimentResult r;
  FeedbackSystem sys = experiment.system;
  r.compatibility = certify(sys, experiment.compatibility_samples, experiment.compatibility_tol);
  if (!r.compatibility.pass) {
    r.narrative = "The chart laws disagree on the overlaps (max residuals f: " +
                  std::to_string(r.compatibility.max_residual_f) + ", g: " +
                  std::to_string(r.compatibility.max_residual_g) +
                  "), so they do not define a vector field on the bundle. Nothing was integrated.";
    return r;
  }
  if (experiment.grid) {
    r.basin = basin(sys, *experiment.grid, experiment.basin);
    r.narrative = describe_basin(sys, *r.basin);
  }
  IntegrationSettings settings;
  settings.switch_margin = experiment.basin.switch_margin;
  settings.record_stride = experiment.record_stride;
  settings.criteria = experiment.basin.criteria;
  for (const BundlePoint& start : experiment.trajectory_starts) {
    try {
      TrajectoryRecord rec = integrate(sys, start, experiment.basin.duration, experiment.basin.step, settings);
      r.trajectories.push_back(std::move(rec));
    } catch (const NonFiniteState&) {
      TrajectoryRecord rec;
      rec.samples.push_back({0.0, start.chart, start.angle, start.fibre});
      rec.terminal_status = TerminalStatus::kDiverged;
      r.trajectories.push_back(std::move(rec));
    }
  }
  if (r.narrative.empty())
    r.narrative = "Compatibility verified; " + std::to_string(r.trajectories.size()) + " trajectories integrated.";
  return r;
}

Json compatibility_to_json(const CompatibilityReport& r) {
  return Json{{"samples", r.samples},
              {"tolerance", r.tolerance},
              {"max_residual_f", r.max_residual_f},
              {"max_residual_g", r.max_residual_g},
              {"pass", r.pass}};
}

Json basin_to_json(const BasinReport& r) {
  Json counts = Json::object();
  for (const auto& [status, n] : r.status_counts) counts[to_string(status)] = n;
  Json points = Json::array();
  for (const BasinCell& c : r.nonconvergent) {
    Json p = point_to_json(c.start);
    p["angle_index"] = c.angle_index;
    p["fibre_index"] = c.fibre_index;
    p["status"] = to_string(c.status);
    points.push_back(std::move(p));
  }
  return Json{{"grid", grid_to_json(r.grid)},
              {"target_mode", to_string(r.target_mode)},
              {"total_cells", r.total_cells},
              {"converged_cells", r.converged_cells},
              {"converged_fraction", r.converged_fraction},
              {"status_counts", counts},
              {"nonconvergent_points", points}};
}

Json result_to_json(const Experiment& experiment, const ExperimentResult& result) {
  const FeedbackSystem& sys = experiment.system;
  Json system{{"atlas",
               {{"fibre", to_string(sys.atlas.fibre)},
                {"signs", {sys.atlas.signs[0], sys.atlas.signs[1]}},
                {"patch", sys.atlas.patch}}},
              {"plant", law_to_json(*sys.plant)},
              {"controller_A", law_to_json(*sys.controller_a)},
              {"controller_B", law_to_json(*sys.controller_b)},
              {"target", sys.target},
              {"target_fibre", sys.target_fibre}};
  Json settings{{"mode", to_string(experiment.basin.mode)},
                {"eps", experiment.basin.criteria.eps},
                {"dwell", experiment.basin.criteria.dwell},
                {"step", experiment.basin.step},
                {"duration", experiment.basin.duration},
                {"switch_margin", experiment.basin.switch_margin}};
  Json trajectories = Json::array();
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const TrajectoryRecord& t = result.trajectories[i];
    const Sample& last = t.samples.back();
    trajectories.push_back(Json{{"start", point_to_json(experiment.trajectory_starts[i])},
                                {"end", point_to_json(last.point())},
                                {"terminal_status", to_string(t.terminal_status)},
                                {"chart_switches", t.chart_switches},
                                {"samples", t.samples.size()}});
  }
  Json out{{"experiment", experiment.name},
           {"system", system},
           {"settings", settings},
           {"compatibility", compatibility_to_json(result.compatibility)}};
  out["basin"] = result.basin ? basin_to_json(*result.basin) : Json(nullptr);
  out["trajectories"] = trajectories;
  out["narrative"] = result.narrative;
  return out;
}

}  // namespace fibrestab::bundlesim
