#include "fibrestab/bundlesim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fibrestab/errors.hpp"

namespace fibrestab::bundlesim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wraps into [−π, π].
double wrap(double x) {
  if (x >= -kPi && x <= kPi) return x;
  return std::remainder(x, kTwoPi);
}

double wrap_fibre(const ChartAtlas& atlas, double u) {
  return atlas.fibre == FibreModel::kCircle ? wrap(u) : u;
}

/// exp(−1/sin θ) for sin θ > 0, else 0: smooth and supported in (0, π).
double bump(double angle) {
  const double s = std::sin(angle);
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double take(Parameters& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const Parameters& params, const std::string& law) {
  if (params.empty()) return;
  throw ParseError("unknown parameter '" + params.begin()->first + "' for law '" + law + "'");
}

enum class LawKind {
  kZero,
  kVelocity,
  kGatedVelocity,
  kBumpDrift,
  kLinearDecay,
  kConstant,
  kDecay,
  kDampedSine,
  kBumpDamping,
  kLinearPd,
};

class BuiltinLaw final : public Law {
 public:
  BuiltinLaw(std::string name, LawKind kind, Parameters params)
      : name_(std::move(name)), kind_(kind), params_(std::move(params)) {
    auto get = [&](const char* key) {
      auto it = params_.find(key);
      return it == params_.end() ? 0.0 : it->second;
    };
    switch (kind_) {
      case LawKind::kGatedVelocity:
      case LawKind::kBumpDrift:
      case LawKind::kLinearDecay: a_ = get("gain"); break;
      case LawKind::kConstant: a_ = get("value"); break;
      case LawKind::kDecay: a_ = get("rate"); break;
      case LawKind::kDampedSine:
      case LawKind::kLinearPd: a_ = get("damping"); break;
      case LawKind::kBumpDamping:
        a_ = get("gamma");
        b_ = get("beta");
        break;
      default: break;
    }
  }

  double operator()(const Phase& p, double u) const override {
    switch (kind_) {
      case LawKind::kZero: return 0.0;
      case LawKind::kVelocity: return u;
      case LawKind::kGatedVelocity: return -a_ * p.sine + 0.5 * (1.0 + p.cosine) * u;
      case LawKind::kBumpDrift: return -a_ * p.sine + bump(p.angle) * u;
      case LawKind::kLinearDecay: return -a_ * p.raw_offset;
      case LawKind::kConstant: return a_;
      case LawKind::kDecay: return -a_ * u;
      case LawKind::kDampedSine: return -p.sine - a_ * u;
      case LawKind::kBumpDamping: return -a_ * u - b_ * bump(p.angle) * p.sine;
      case LawKind::kLinearPd: return -p.raw_offset - a_ * u;
    }
    return 0.0;
  }

  std::string name() const override { return name_; }
  Parameters parameters() const override { return params_; }

 private:
  std::string name_;
  LawKind kind_;
  Parameters params_;
  double a_ = 0.0;
  double b_ = 0.0;
};

struct LawEntry {
  const char* name;
  LawKind kind;
  std::vector<std::pair<const char*, double>> defaults;
};

const std::vector<LawEntry>& plant_table() {
  static const std::vector<LawEntry> t = {
      {"zero", LawKind::kZero, {}},
      {"velocity", LawKind::kVelocity, {}},
      {"gated_velocity", LawKind::kGatedVelocity, {{"gain", 1.0}}},
      {"bump_drift", LawKind::kBumpDrift, {{"gain", 1.0}}},
      {"linear_decay", LawKind::kLinearDecay, {{"gain", 1.0}}},
  };
  return t;
}

const std::vector<LawEntry>& controller_table() {
  static const std::vector<LawEntry> t = {
      {"zero", LawKind::kZero, {}},
      {"constant", LawKind::kConstant, {{"value", 1.0}}},
      {"decay", LawKind::kDecay, {{"rate", 1.0}}},
      {"damped_sine", LawKind::kDampedSine, {{"damping", 1.0}}},
      {"bump_damping", LawKind::kBumpDamping, {{"gamma", 1.0}, {"beta", 1.0}}},
      {"linear_pd", LawKind::kLinearPd, {{"damping", 1.0}}},
  };
  return t;
}

std::shared_ptr<const Law> make_law(const std::vector<LawEntry>& table, const char* what, const std::string& name,
                                    const Parameters& params) {
  for (const LawEntry& e : table) {
    if (name != e.name) continue;
    Parameters rest = params;
    Parameters resolved;
    for (const auto& [key, fallback] : e.defaults) resolved[key] = take(rest, key, fallback);
    reject_leftovers(rest, name);
    return std::make_shared<BuiltinLaw>(name, e.kind, std::move(resolved));
  }
  throw UnknownName(std::string("unknown ") + what + " '" + name + "'");
}

std::vector<std::string> names_of(const std::vector<LawEntry>& table) {
  std::vector<std::string> out;
  for (const LawEntry& e : table) out.emplace_back(e.name);
  return out;
}

/// Which overlap component a chart coordinate falls in, as an index into
/// the sign array, or -1 outside both.
int component_of(ChartId chart, double angle) {
  if (chart == ChartId::kA) {
    if (angle > 0.0 && angle < kPi) return 0;
    if (angle > kPi && angle < kTwoPi) return 1;
  } else {
    if (angle > 0.0 && angle < kPi) return 0;
    if (angle > -kPi && angle < 0.0) return 1;
  }
  return -1;
}

}  // namespace

std::string to_string(ChartId c) { return c == ChartId::kA ? "A" : "B"; }

std::string to_string(FibreModel f) {
  switch (f) {
    case FibreModel::kInterval: return "interval";
    case FibreModel::kLine: return "line";
    case FibreModel::kCircle: return "circle";
  }
  return "line";
}

FibreModel parse_fibre_model(const std::string& text) {
  if (text == "interval") return FibreModel::kInterval;
  if (text == "line") return FibreModel::kLine;
  if (text == "circle") return FibreModel::kCircle;
  throw ParseError("fibre must be 'interval', 'line' or 'circle', got '" + text + "'");
}

ChartAtlas ChartAtlas::trivial(FibreModel fibre) { return ChartAtlas{fibre, {1, 1}, false}; }
ChartAtlas ChartAtlas::mobius(FibreModel fibre) { return ChartAtlas{fibre, {1, -1}, false}; }
ChartAtlas ChartAtlas::chart_patch(FibreModel fibre) { return ChartAtlas{fibre, {1, 1}, true}; }

void ChartAtlas::validate() const {
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("transition signs must be +1 or -1");
}

std::pair<double, double> ChartAtlas::fibre_range(double line_extent) const {
  switch (fibre) {
    case FibreModel::kInterval: return {-1.0, 1.0};
    case FibreModel::kLine: return {-line_extent, line_extent};
    case FibreModel::kCircle: return {-kPi, kPi};
  }
  return {-line_extent, line_extent};
}

bool in_chart(const ChartAtlas& atlas, ChartId chart, double angle) {
  if (chart == ChartId::kB) return angle > -kPi && angle < kPi;
  return !atlas.patch && angle > 0.0 && angle < kTwoPi;
}

std::optional<BundlePoint> to_chart(const ChartAtlas& atlas, const BundlePoint& p, ChartId chart) {
  if (p.chart == chart) return p;
  if (atlas.patch) return std::nullopt;
  const int c = component_of(p.chart, p.angle);
  if (c < 0) return std::nullopt;
  double angle = p.angle;
  if (c == 1) angle += p.chart == ChartId::kA ? -kTwoPi : kTwoPi;
  return BundlePoint{chart, angle, wrap_fibre(atlas, atlas.signs[static_cast<std::size_t>(c)] * p.fibre)};
}

BundlePoint point_at(const ChartAtlas& atlas, double angle, double fibre) {
  const double w = wrap(angle);
  if (atlas.patch || std::fabs(w) < kHalfPi) return {ChartId::kB, atlas.patch ? angle : w, fibre};
  return {ChartId::kA, w < 0.0 ? w + kTwoPi : w, fibre};
}

double angular_distance(double a, double b) { return std::fabs(wrap(a - b)); }

double bundle_distance(const ChartAtlas& atlas, const BundlePoint& p, const BundlePoint& q) {
  std::optional<BundlePoint> a = to_chart(atlas, q, p.chart);
  BundlePoint first = p;
  if (!a) {
    a = to_chart(atlas, p, q.chart);
    if (!a) return kInf;
    first = q;
  }
  const double angle = atlas.patch ? std::fabs(first.angle - a->angle) : angular_distance(first.angle, a->angle);
  double fibre = first.fibre - a->fibre;
  if (atlas.fibre == FibreModel::kCircle) fibre = wrap(fibre);
  return std::max(angle, std::fabs(fibre));
}

std::shared_ptr<const Law> make_plant(const std::string& name, const Parameters& params) {
  return make_law(plant_table(), "plant", name, params);
}

std::shared_ptr<const Law> make_controller(const std::string& name, const Parameters& params) {
  return make_law(controller_table(), "controller", name, params);
}

std::vector<std::string> plant_names() { return names_of(plant_table()); }
std::vector<std::string> controller_names() { return names_of(controller_table()); }

ChartId FeedbackSystem::target_chart() const {
  return point_at(atlas, target, target_fibre).chart;
}

BundlePoint FeedbackSystem::target_point() const { return point_at(atlas, target, target_fibre); }

Phase FeedbackSystem::phase(double angle) const {
  Phase p;
  p.angle = angle;
  p.raw_offset = angle - target;
  p.offset = wrap(p.raw_offset);
  // Near the antipode the sine is taken of the exact distance to it, so the
  // antipodal fibre is an exact invariant set of the discretized flow.
  const double a = std::fabs(p.offset);
  if (a <= kHalfPi) {
    p.sine = std::sin(p.offset);
    p.cosine = std::cos(p.offset);
  } else {
    const double r = kPi - a;
    p.sine = std::copysign(std::sin(r), p.offset);
    p.cosine = -std::cos(r);
  }
  return p;
}

std::pair<double, double> FeedbackSystem::field(ChartId chart, double angle, double u) const {
  const Phase p = phase(angle);
  const Law& g = chart == ChartId::kA ? *controller_a : *controller_b;
  return {(*plant)(p, u), g(p, u)};
}

FeedbackSystem make_system(std::string name, ChartAtlas atlas, std::shared_ptr<const Law> plant,
                           std::shared_ptr<const Law> controller, double target, double target_fibre) {
  atlas.validate();
  FeedbackSystem sys;
  sys.name = std::move(name);
  sys.atlas = atlas;
  sys.plant = std::move(plant);
  sys.controller_a = controller;
  sys.controller_b = std::move(controller);
  sys.target = target;
  sys.target_fibre = target_fibre;
  return sys;
}

FeedbackSystem pendulum_system(double target, double damping) {
  return make_system("pendulum", ChartAtlas::trivial(FibreModel::kLine), make_plant("velocity"),
                     make_controller("damped_sine", {{"damping", damping}}), target);
}

FeedbackSystem gated_pendulum_system(double target, double gain) {
  return make_system("gated_pendulum", ChartAtlas::trivial(FibreModel::kLine),
                     make_plant("gated_velocity", {{"gain", gain}}), make_controller("damped_sine"), target);
}

FeedbackSystem mobius_system(double target, double gain, double gamma, double beta) {
  if (!(beta < gamma * std::numbers::e))
    throw std::invalid_argument("mobius_system: beta must be below gamma * e to keep |u| < 1");
  return make_system("mobius", ChartAtlas::mobius(FibreModel::kInterval), make_plant("bump_drift", {{"gain", gain}}),
                     make_controller("bump_damping", {{"gamma", gamma}, {"beta", beta}}), target);
}

FeedbackSystem incompatible_system(double target) {
  return make_system("incompatible", ChartAtlas::mobius(FibreModel::kLine), make_plant("velocity"),
                     make_controller("damped_sine"), target);
}

FeedbackSystem linear_patch_system(double target) {
  return make_system("linear_patch", ChartAtlas::chart_patch(FibreModel::kLine), make_plant("velocity"),
                     make_controller("linear_pd"), target);
}

FeedbackSystem decay_patch_system(double target) {
  return make_system("decay_patch", ChartAtlas::chart_patch(FibreModel::kLine), make_plant("linear_decay"),
                     make_controller("decay"), target);
}

CompatibilityReport check_compatibility(const FeedbackSystem& sys, std::size_t samples_per_component, double tol,
                                        double line_extent) {
  if (!(tol > 0.0)) throw std::invalid_argument("check_compatibility: tol must be positive");
  sys.atlas.validate();
  CompatibilityReport r;
  r.tolerance = tol;
  if (sys.atlas.patch) {
    r.pass = true;
    return r;
  }
  const auto [u_lo, u_hi] = sys.atlas.fibre_range(line_extent);
  // Angles are evenly spaced midpoints; fibre values follow the golden-ratio
  // sequence so the samples fill the rectangle without a second loop.
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const double n = static_cast<double>(samples_per_component);
  for (int c = 0; c < 2; ++c) {
    const double tau = sys.atlas.signs[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < samples_per_component; ++i) {
      const double frac = (static_cast<double>(i) + 0.5) / n;
      const double angle_a = (c == 0 ? 0.0 : kPi) + kPi * frac;
      const double angle_b = c == 0 ? angle_a : angle_a - kTwoPi;
      double pos = (static_cast<double>(i) + 0.5) * golden;
      pos -= std::floor(pos);
      const double u = u_lo + (u_hi - u_lo) * pos;
      const double ub = wrap_fibre(sys.atlas, tau * u);
      const auto [fa, ga] = sys.field(ChartId::kA, angle_a, u);
      const auto [fb, gb] = sys.field(ChartId::kB, angle_b, ub);
      r.max_residual_f = std::max(r.max_residual_f, std::fabs(fb - fa));
      r.max_residual_g = std::max(r.max_residual_g, std::fabs(gb - tau * ga));
      ++r.samples;
    }
  }
  r.pass = r.max_residual_f < tol && r.max_residual_g < tol;
  return r;
}

const CompatibilityReport& certify(FeedbackSystem& sys, std::size_t samples_per_component, double tol) {
  sys.compatibility = check_compatibility(sys, samples_per_component, tol);
  return *sys.compatibility;
}

std::string to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::kConvergedPoint: return "CONVERGED_POINT";
    case TerminalStatus::kConvergedFibre: return "CONVERGED_FIBRE";
    case TerminalStatus::kDiverged: return "DIVERGED";
    case TerminalStatus::kTimeout: return "TIMEOUT";
  }
  return "TIMEOUT";
}

std::string to_string(TargetMode m) { return m == TargetMode::kStrong ? "strong" : "weak"; }

TargetMode parse_target_mode(const std::string& text) {
  if (text == "strong") return TargetMode::kStrong;
  if (text == "weak") return TargetMode::kWeak;
  throw ParseError("mode must be 'strong' or 'weak', got '" + text + "'");
}

bool is_converged(TerminalStatus s, TargetMode mode) {
  if (s == TerminalStatus::kConvergedPoint) return true;
  return mode == TargetMode::kWeak && s == TerminalStatus::kConvergedFibre;
}

ConvergenceTarget ConvergenceTarget::strong(const BundlePoint& z) {
  ConvergenceTarget t;
  t.mode = TargetMode::kStrong;
  t.point = z;
  t.angle = z.angle;
  return t;
}

ConvergenceTarget ConvergenceTarget::weak(double x) {
  ConvergenceTarget t;
  t.mode = TargetMode::kWeak;
  t.angle = x;
  return t;
}

ConvergenceTarget ConvergenceTarget::of(const FeedbackSystem& sys, TargetMode mode) {
  return mode == TargetMode::kStrong ? strong(sys.target_point()) : weak(sys.target);
}

namespace {

/// Streaming form of classify_convergence: remembers the last time each
/// distance was at or above eps.
class ConvergenceTracker {
 public:
  ConvergenceTracker(const ConvergenceTarget& target, const ChartAtlas& atlas, double eps)
      : target_(target), atlas_(atlas), eps_(eps) {}

  void observe(double t, const BundlePoint& p) {
    const double angle =
        atlas_.patch ? std::fabs(p.angle - target_.angle) : angular_distance(p.angle, target_.angle);
    if (!(angle < eps_)) last_bad_angle_ = t;
    if (target_.mode == TargetMode::kStrong && !(bundle_distance(atlas_, p, target_.point) < eps_))
      last_bad_point_ = t;
    last_time_ = t;
    seen_ = true;
  }

  TerminalStatus result(double dwell) const {
    if (!seen_ || last_time_ < dwell) return TerminalStatus::kTimeout;
    const double window = last_time_ - dwell;
    if (target_.mode == TargetMode::kStrong && last_bad_point_ < window) return TerminalStatus::kConvergedPoint;
    if (last_bad_angle_ < window) return TerminalStatus::kConvergedFibre;
    return TerminalStatus::kTimeout;
  }

 private:
  ConvergenceTarget target_;
  const ChartAtlas& atlas_;
  double eps_;
  double last_bad_angle_ = -kInf;
  double last_bad_point_ = -kInf;
  double last_time_ = 0.0;
  bool seen_ = false;
};

/// Fixed-step RK4 with chart switching, shared by integrate, basin and
/// flow_retraction.
class Stepper {
 public:
  Stepper(const FeedbackSystem& sys, double margin, double blowup) : sys_(sys), margin_(margin), blowup_(blowup) {}

  void step(BundlePoint& z, double h) const {
    const ChartId c = z.chart;
    const auto [a1, b1] = sys_.field(c, z.angle, z.fibre);
    const auto [a2, b2] = sys_.field(c, z.angle + 0.5 * h * a1, z.fibre + 0.5 * h * b1);
    const auto [a3, b3] = sys_.field(c, z.angle + 0.5 * h * a2, z.fibre + 0.5 * h * b2);
    const auto [a4, b4] = sys_.field(c, z.angle + h * a3, z.fibre + h * b3);
    z.angle += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    z.fibre = wrap_fibre(sys_.atlas, z.fibre + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4));
    check(z);
  }

  /// Moves to the other chart once the angle is within the margin of the
  /// current chart's edge. Returns whether a switch happened.
  bool maybe_switch(BundlePoint& z) const {
    if (sys_.atlas.patch) return false;
    int component = -1;
    double shift = 0.0;
    if (z.chart == ChartId::kA) {
      if (z.angle < margin_) {
        component = 0;
      } else if (z.angle > kTwoPi - margin_) {
        component = 1;
        shift = -kTwoPi;
      }
    } else {
      if (z.angle > kPi - margin_) {
        component = 0;
      } else if (z.angle < -kPi + margin_) {
        component = 1;
        shift = kTwoPi;
      }
    }
    if (component < 0) return false;
    z.chart = z.chart == ChartId::kA ? ChartId::kB : ChartId::kA;
    z.angle += shift;
    z.fibre = wrap_fibre(sys_.atlas, sys_.atlas.signs[static_cast<std::size_t>(component)] * z.fibre);
    return true;
  }

  void check(const BundlePoint& z) const {
    if (!std::isfinite(z.angle) || !std::isfinite(z.fibre))
      throw NonFiniteState("state became non-finite");
    if (sys_.atlas.fibre == FibreModel::kInterval && !(std::fabs(z.fibre) < 1.0))
      throw NonFiniteState("fibre coordinate reached the interval boundary (u = " + std::to_string(z.fibre) + ")");
    if (sys_.atlas.fibre == FibreModel::kLine && std::fabs(z.fibre) > blowup_)
      throw NonFiniteState("fibre coordinate blew up (|u| > " + std::to_string(blowup_) + ")");
    if (sys_.atlas.patch && !(std::fabs(z.angle) < kPi))
      throw NonFiniteState("trajectory left the chart patch");
    if (!sys_.atlas.patch && std::fabs(z.angle) > 4.0 * kPi)
      throw NonFiniteState("angle left every chart");
  }

 private:
  const FeedbackSystem& sys_;
  double margin_;
  double blowup_;
};

void require_certified(const FeedbackSystem& sys) {
  if (!sys.compatibility || !sys.compatibility->pass)
    throw CompatibilityNotVerified("system '" + sys.name + "' has no passing compatibility check");
  if (!sys.plant || !sys.controller_a || !sys.controller_b)
    throw std::invalid_argument("system '" + sys.name + "' is missing a plant or controller");
}

void require_step(double duration, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
}

bool same_state(const BundlePoint& a, const BundlePoint& b) {
  return a.chart == b.chart && a.angle == b.angle && a.fibre == b.fibre;
}

/// Runs the fixed-step flow for `steps` steps of size h starting at time t0.
/// `visit(t, z, switched_from)` sees every state; `switched_from` is set
/// when the step ended with a chart switch. Once a step leaves the state
/// bitwise unchanged the discrete flow is stationary, and the remaining
/// steps are reported in one call with `stalled` set.
template <typename Visit>
std::size_t run_steps(const Stepper& stepper, BundlePoint& z, double t0, double h, std::size_t steps, Visit&& visit) {
  std::size_t switches = 0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const BundlePoint before = z;
    stepper.step(z, h);
    const double t = t0 + static_cast<double>(n) * h;
    std::optional<BundlePoint> old;
    const BundlePoint stepped = z;
    if (stepper.maybe_switch(z)) {
      old = stepped;
      ++switches;
    }
    if (!old && same_state(before, z)) {
      visit(t0 + static_cast<double>(steps) * h, z, std::optional<BundlePoint>{}, true);
      return switches;
    }
    visit(t, z, old, false);
  }
  return switches;
}

}  // namespace

TrajectoryRecord integrate(const FeedbackSystem& sys, const BundlePoint& start, double duration, double step,
                           const IntegrationSettings& settings) {
  require_certified(sys);
  require_step(duration, step);
  const Stepper stepper(sys, settings.switch_margin, settings.blowup);
  BundlePoint z = start;
  stepper.check(z);
  ConvergenceTracker tracker(ConvergenceTarget::of(sys, TargetMode::kStrong), sys.atlas, settings.criteria.eps);
  TrajectoryRecord rec;
  rec.samples.push_back({0.0, z.chart, z.angle, z.fibre});
  tracker.observe(0.0, z);

  const auto steps = static_cast<std::size_t>(std::llround(duration / step));
  const std::size_t stride = std::max<std::size_t>(settings.record_stride, 1);
  std::size_t n = 0;
  rec.chart_switches = run_steps(
      stepper, z, 0.0, step, steps,
      [&](double t, const BundlePoint& p, const std::optional<BundlePoint>& before_switch, bool stalled) {
        ++n;
        if (stalled) {
          // Stationary from here on: the last sample stands for all of them.
          tracker.observe(t, p);
          rec.samples.push_back({t, p.chart, p.angle, p.fibre});
          return;
        }
        tracker.observe(t, p);
        if (before_switch) rec.samples.push_back({t, before_switch->chart, before_switch->angle, before_switch->fibre});
        if (before_switch || n % stride == 0 || n == steps) rec.samples.push_back({t, p.chart, p.angle, p.fibre});
      });
  rec.terminal_status = tracker.result(settings.criteria.dwell);
  return rec;
}

TerminalStatus classify_convergence(const TrajectoryRecord& traj, const ConvergenceTarget& target,
                                    const ChartAtlas& atlas, double eps, double dwell) {
  if (!(eps > 0.0) || !(dwell > 0.0)) throw std::invalid_argument("classify_convergence: eps and dwell must be positive");
  if (traj.terminal_status == TerminalStatus::kDiverged) return TerminalStatus::kDiverged;
  ConvergenceTracker tracker(target, atlas, eps);
  for (const Sample& s : traj.samples) tracker.observe(s.time, s.point());
  return tracker.result(dwell);
}

double GridSpec::angle_centre(std::size_t i) const {
  return angle_first + static_cast<double>(i) * angle_span / static_cast<double>(angle_cells);
}

double GridSpec::fibre_centre(std::size_t j) const {
  return fibre_min + (static_cast<double>(j) + 0.5) * (fibre_max - fibre_min) / static_cast<double>(fibre_cells);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("FIBRESTAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BasinReport basin(const FeedbackSystem& sys, const GridSpec& grid, const BasinOptions& options) {
  require_certified(sys);
  require_step(options.duration, options.step);
  if (grid.angle_cells == 0 || grid.fibre_cells == 0) throw std::invalid_argument("basin: empty grid");
  if (!(options.criteria.eps > 0.0) || !(options.criteria.dwell > 0.0))
    throw std::invalid_argument("basin: eps and dwell must be positive");

  const std::size_t total = grid.angle_cells * grid.fibre_cells;
  std::vector<BasinCell> cells(total);
  const Stepper stepper(sys, options.switch_margin, IntegrationSettings{}.blowup);
  const ConvergenceTarget target = ConvergenceTarget::of(sys, options.mode);
  const auto steps = static_cast<std::size_t>(std::llround(options.duration / options.step));

  auto run_cell = [&](std::size_t index) {
    BasinCell& cell = cells[index];
    cell.angle_index = index / grid.fibre_cells;
    cell.fibre_index = index % grid.fibre_cells;
    cell.start = point_at(sys.atlas, grid.angle_centre(cell.angle_index), grid.fibre_centre(cell.fibre_index));
    try {
      stepper.check(cell.start);
      BundlePoint z = cell.start;
      ConvergenceTracker tracker(target, sys.atlas, options.criteria.eps);
      tracker.observe(0.0, z);
      run_steps(stepper, z, 0.0, options.step, steps,
                [&](double t, const BundlePoint& p, const std::optional<BundlePoint>&, bool) { tracker.observe(t, p); });
      cell.status = tracker.result(options.criteria.dwell);
    } catch (const NonFiniteState&) {
      cell.status = TerminalStatus::kDiverged;
    }
  };

  const unsigned workers = std::min<std::size_t>(options.threads ? options.threads : default_thread_count(), total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run_cell(i);
      });
    for (std::thread& t : pool) t.join();
  }

  BasinReport report;
  report.grid = grid;
  report.target_mode = options.mode;
  report.total_cells = total;
  for (const BasinCell& cell : cells) {
    ++report.status_counts[cell.status];
    if (is_converged(cell.status, options.mode)) {
      ++report.converged_cells;
    } else {
      report.nonconvergent.push_back(cell);
    }
  }
  report.converged_fraction = static_cast<double>(report.converged_cells) / static_cast<double>(total);
  return report;
}

namespace {

double distance_to_target(const FeedbackSystem& sys, const BundlePoint& p, TargetMode mode) {
  if (mode == TargetMode::kStrong) return bundle_distance(sys.atlas, p, sys.target_point());
  return sys.atlas.patch ? std::fabs(p.angle - sys.target) : angular_distance(p.angle, sys.target);
}

/// Flows z through the increasing times in `times`, hitting each exactly
/// with a final shortened step, and returns the states there. The tracker
/// sees every state.
std::vector<BundlePoint> flow_through(const Stepper& stepper, BundlePoint z, const std::vector<double>& times,
                                      double h, ConvergenceTracker* tracker) {
  std::vector<BundlePoint> out;
  double t = 0.0;
  bool stalled = false;
  if (tracker) tracker->observe(0.0, z);
  auto visit = [&](double time, const BundlePoint& p, const std::optional<BundlePoint>&, bool stop) {
    if (tracker) tracker->observe(time, p);
    if (stop) stalled = true;
  };
  for (double target : times) {
    if (target > t && !stalled) {
      const auto full = static_cast<std::size_t>(std::floor((target - t) / h));
      run_steps(stepper, z, t, h, full, visit);
      const double reached = t + static_cast<double>(full) * h;
      const double rest = target - reached;
      if (!stalled && rest > 0.0) {
        stepper.step(z, rest);
        stepper.maybe_switch(z);
        if (tracker) tracker->observe(target, z);
      } else if (stalled && tracker) {
        tracker->observe(target, z);
      }
      t = target;
    } else if (stalled && tracker) {
      tracker->observe(target, z);
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace

RetractionReport flow_retraction(const FeedbackSystem& sys, const std::vector<BundlePoint>& samples,
                                 const std::vector<double>& s_grid, const RetractionOptions& options,
                                 double fixed_tolerance) {
  require_certified(sys);
  require_step(options.t_max, options.step);
  for (double s : s_grid)
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("flow_retraction: s values must lie in [0, 1]");

  RetractionReport report;
  report.samples = samples.size();
  report.s_grid = s_grid;
  std::sort(report.s_grid.begin(), report.s_grid.end());
  report.s_grid.erase(std::unique(report.s_grid.begin(), report.s_grid.end()), report.s_grid.end());

  // r(s, ·) is the flow at t = s/(1 − s), capped at t_max; r(1, ·) is the
  // state at t_max.
  std::vector<double> times;
  for (double s : report.s_grid) times.push_back(s >= 1.0 ? options.t_max : std::min(s / (1.0 - s), options.t_max));
  times.push_back(options.t_max);

  const Stepper stepper(sys, options.switch_margin, IntegrationSettings{}.blowup);
  const ConvergenceTarget target = ConvergenceTarget::of(sys, options.mode);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const BundlePoint& z = samples[i];
    ConvergenceTracker tracker(target, sys.atlas, options.criteria.eps);
    std::vector<BundlePoint> states;
    try {
      stepper.check(z);
      states = flow_through(stepper, z, times, options.step, &tracker);
    } catch (const NonFiniteState& e) {
      throw NonConvergentSample("sample " + std::to_string(i) + " diverged: " + e.what());
    }
    if (!is_converged(tracker.result(options.criteria.dwell), options.mode))
      throw NonConvergentSample("sample " + std::to_string(i) + " does not converge to the target within t_max");
    for (std::size_t k = 0; k < report.s_grid.size(); ++k)
      if (report.s_grid[k] == 0.0)
        report.identity_defect = std::max(report.identity_defect, bundle_distance(sys.atlas, states[k], z));
    report.endpoint_defect = std::max(report.endpoint_defect, distance_to_target(sys, states.back(), options.mode));
  }

  // Points of the target set must not move under any r(s, ·).
  std::vector<BundlePoint> fixed;
  if (options.mode == TargetMode::kStrong) {
    fixed.push_back(sys.target_point());
  } else {
    for (const BundlePoint& z : samples) fixed.push_back(point_at(sys.atlas, sys.target, z.fibre));
  }
  for (const BundlePoint& z : fixed) {
    const std::vector<BundlePoint> states = flow_through(stepper, z, times, options.step, nullptr);
    for (const BundlePoint& p : states)
      report.fixed_defect = std::max(report.fixed_defect, bundle_distance(sys.atlas, p, z));
  }

  report.identity_at_zero = report.identity_defect == 0.0;
  report.endpoint_in_target = report.endpoint_defect < options.criteria.eps;
  report.fixed_on_target = report.fixed_defect < fixed_tolerance;
  return report;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& trajectories) {
  out << "trajectory,time,chart,angle,fibre\n";
  char line[160];
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (const Sample& s : trajectories[i].samples) {
      std::snprintf(line, sizeof line, "%zu,%.17g,%s,%.17g,%.17g\n", i, s.time, to_string(s.chart).c_str(), s.angle,
                    s.fibre);
      out << line;
    }
  }
}

}  // namespace fibrestab::bundlesim
