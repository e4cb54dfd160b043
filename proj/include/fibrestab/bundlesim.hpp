#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fibrestab::bundlesim {

/// The two charts covering S¹. A uses angles in (0, 2π), B uses (−π, π).
/// They overlap in O1 = (0, π), where both coordinates agree, and in
/// O2 = (π, 2π) in A, which is (−π, 0) in B.
enum class ChartId { kA, kB };
enum class FibreModel { kInterval, kLine, kCircle };

std::string to_string(ChartId c);
std::string to_string(FibreModel f);
/// "interval", "line" or "circle"; throws ParseError otherwise.
FibreModel parse_fibre_model(const std::string& text);

struct ChartAtlas {
  FibreModel fibre = FibreModel::kLine;
  /// Transition signs on O1 and O2. Fibre coordinates satisfy u_B = τ u_A.
  std::array<int, 2> signs{1, 1};
  /// Restricts everything to chart B alone, a contractible patch without
  /// overlaps. Integration then fails instead of switching charts.
  bool patch = false;

  static ChartAtlas trivial(FibreModel fibre);
  static ChartAtlas mobius(FibreModel fibre);
  static ChartAtlas chart_patch(FibreModel fibre);

  /// Validates the signs; throws std::invalid_argument.
  void validate() const;
  bool is_trivial() const { return signs[0] == signs[1]; }
  /// The sample range used for fibre coordinates: (−1, 1), a symmetric box
  /// for the line, and (−π, π] for the circle.
  std::pair<double, double> fibre_range(double line_extent) const;
};

/// A point of E in the coordinates of one chart.
struct BundlePoint {
  ChartId chart = ChartId::kB;
  double angle = 0.0;
  double fibre = 0.0;
};

/// Whether the angle lies inside the open domain of the chart.
bool in_chart(const ChartAtlas& atlas, ChartId chart, double angle);
/// The same bundle point in another chart, or nothing when the base angle is
/// outside that chart.
std::optional<BundlePoint> to_chart(const ChartAtlas& atlas, const BundlePoint& p, ChartId chart);
/// Picks B when the angle is within π/2 of 0 and A otherwise, so that the
/// point starts well inside its chart.
BundlePoint point_at(const ChartAtlas& atlas, double angle, double fibre);
/// Max of the angular distance on S¹ and the fibre distance read in a shared
/// chart. Infinite when no chart contains both base points.
double bundle_distance(const ChartAtlas& atlas, const BundlePoint& p, const BundlePoint& q);
/// |θ − x| on S¹, in [0, π].
double angular_distance(double a, double b);

/// Quantities shared by the built-in laws, computed once per evaluation.
struct Phase {
  /// The chart coordinate.
  double angle = 0.0;
  /// angle − x* without wrapping; only meaningful on a patch.
  double raw_offset = 0.0;
  /// angle − x* wrapped to [−π, π].
  double offset = 0.0;
  /// sin(offset), exactly zero when offset is 0 or ±π.
  double sine = 0.0;
  /// cos(offset), exactly −1 at the antipode.
  double cosine = 1.0;
};

using Parameters = std::map<std::string, double>;

/// A scalar law of the form (phase, fibre coordinate) -> velocity.
class Law {
 public:
  virtual ~Law() = default;
  virtual double operator()(const Phase& phase, double u) const = 0;
  virtual std::string name() const = 0;
  virtual Parameters parameters() const = 0;
};

/// Plants: "zero", "velocity" (u), "gated_velocity" (−k sin(θ−x*) +
/// w(θ) u with w = (1 + cos(θ−x*))/2), "bump_drift" (−k sin(θ−x*) + b(θ) u
/// with b = exp(−1/sin θ) on (0, π) and 0 elsewhere), "linear_decay"
/// (−k (θ − x*), patch only). Throws UnknownName, or ParseError for an
/// unknown parameter.
std::shared_ptr<const Law> make_plant(const std::string& name, const Parameters& params = {});
/// Controllers: "zero", "constant" (value), "decay" (−rate u), "damped_sine"
/// (−sin(θ−x*) − damping u), "bump_damping" (−gamma u − beta b(θ)
/// sin(θ−x*)), "linear_pd" (−(θ − x*) − damping u, patch only).
std::shared_ptr<const Law> make_controller(const std::string& name, const Parameters& params = {});
std::vector<std::string> plant_names();
std::vector<std::string> controller_names();

struct CompatibilityReport {
  std::size_t samples = 0;
  double tolerance = 0.0;
  double max_residual_f = 0.0;
  double max_residual_g = 0.0;
  bool pass = false;
};

/// Closed loop ẋ = f(x, u), u̇ = g_chart(x, u) written in both charts.
struct FeedbackSystem {
  std::string name;
  ChartAtlas atlas;
  std::shared_ptr<const Law> plant;
  std::shared_ptr<const Law> controller_a;
  std::shared_ptr<const Law> controller_b;
  /// The angle x* to stabilize.
  double target = 0.0;
  /// Fibre coordinate of z*, read in target_chart().
  double target_fibre = 0.0;
  /// Filled by certify(); integration refuses to run without a passing one.
  std::optional<CompatibilityReport> compatibility;

  ChartId target_chart() const;
  BundlePoint target_point() const;
  Phase phase(double angle) const;
  /// (θ̇, u̇) in the given chart.
  std::pair<double, double> field(ChartId chart, double angle, double u) const;
};

/// Both charts share `controller`.
FeedbackSystem make_system(std::string name, ChartAtlas atlas, std::shared_ptr<const Law> plant,
                           std::shared_ptr<const Law> controller, double target, double target_fibre = 0.0);

/// Shipped systems.
/// Trivial S¹ × line with f = u and g = −sin(θ − x*) − damping·u.
FeedbackSystem pendulum_system(double target = 0.0, double damping = 1.0);
/// Trivial S¹ × line with the gated plant and the damped-sine controller.
/// Every point of the antipodal fibre stays on it.
FeedbackSystem gated_pendulum_system(double target = 0.0, double gain = 1.0);
/// Möbius band (interval fibre) with the bump plant and bump damping.
/// Needs beta < gamma·e so that u̇ points inward at u = ±1.
FeedbackSystem mobius_system(double target = 1.5707963267948966, double gain = 1.0, double gamma = 1.0,
                             double beta = 1.0);
/// The pendulum loop on a Möbius atlas with the same controller in both
/// charts; compatibility fails on O2.
FeedbackSystem incompatible_system(double target = 1.5707963267948966);
/// Linear loop f = u, g = −(θ − x*) − u on a chart patch.
FeedbackSystem linear_patch_system(double target = 0.0);
/// Independent decay f = −(θ − x*), g = −u on a chart patch.
FeedbackSystem decay_patch_system(double target = 0.0);

/// Samples `samples_per_component` points of each overlap component and
/// measures |f(x, τu) − f(x, u)| and |g_B(x, τu) − τ g_A(x, u)|. A patch has
/// no overlaps and passes trivially.
CompatibilityReport check_compatibility(const FeedbackSystem& sys, std::size_t samples_per_component,
                                        double tol, double line_extent = 4.0);
/// Runs check_compatibility and stores the report in the system.
const CompatibilityReport& certify(FeedbackSystem& sys, std::size_t samples_per_component = 5000,
                                   double tol = 1e-9);

enum class TerminalStatus { kConvergedPoint, kConvergedFibre, kDiverged, kTimeout };
enum class TargetMode { kStrong, kWeak };

std::string to_string(TerminalStatus s);
std::string to_string(TargetMode m);
TargetMode parse_target_mode(const std::string& text);
bool is_converged(TerminalStatus s, TargetMode mode);

struct Sample {
  double time = 0.0;
  ChartId chart = ChartId::kB;
  double angle = 0.0;
  double fibre = 0.0;

  BundlePoint point() const { return {chart, angle, fibre}; }
};

struct TrajectoryRecord {
  std::vector<Sample> samples;
  TerminalStatus terminal_status = TerminalStatus::kTimeout;
  std::size_t chart_switches = 0;
};

struct ConvergenceCriteria {
  double eps = 1e-3;
  double dwell = 1.0;
};

struct IntegrationSettings {
  /// Switch when the angle comes this close to the edge of the chart.
  double switch_margin = 0.2;
  /// Keep every n-th step. The first and last states and both sides of
  /// every chart switch are always kept.
  std::size_t record_stride = 1;
  /// |u| beyond this counts as blow-up on the line fibre.
  double blowup = 1e8;
  /// Used for terminal_status, measured against z* at every step.
  ConvergenceCriteria criteria;
};

/// Fixed-step RK4 in the active chart. Throws CompatibilityNotVerified,
/// NonFiniteState on blow-up or boundary contact, and std::invalid_argument
/// for a non-positive step or negative duration.
TrajectoryRecord integrate(const FeedbackSystem& sys, const BundlePoint& start, double duration, double step,
                           const IntegrationSettings& settings = {});

struct ConvergenceTarget {
  TargetMode mode = TargetMode::kStrong;
  /// x*, used in weak mode and as the base of z*.
  double angle = 0.0;
  /// z*, used in strong mode.
  BundlePoint point;

  static ConvergenceTarget strong(const BundlePoint& z);
  static ConvergenceTarget weak(double x);
  static ConvergenceTarget of(const FeedbackSystem& sys, TargetMode mode);
};

/// Strong: CONVERGED_POINT when the distance to z* stays below eps over the
/// trailing dwell window, otherwise CONVERGED_FIBRE when the angular
/// distance does, otherwise TIMEOUT. Weak: CONVERGED_FIBRE or TIMEOUT. A
/// record already marked DIVERGED stays DIVERGED. Throws
/// std::invalid_argument unless eps > 0 and dwell > 0.
TerminalStatus classify_convergence(const TrajectoryRecord& traj, const ConvergenceTarget& target,
                                    const ChartAtlas& atlas, double eps, double dwell);

/// Cells of a grid over E. Angle centres are angle_first + i·angle_span/angle_cells,
/// so a column can sit exactly on a chosen angle; fibre centres are cell
/// midpoints of [fibre_min, fibre_max].
struct GridSpec {
  std::size_t angle_cells = 100;
  std::size_t fibre_cells = 50;
  double angle_first = -3.141592653589793;
  double angle_span = 6.283185307179586;
  double fibre_min = -2.0;
  double fibre_max = 2.0;

  double angle_centre(std::size_t i) const;
  double fibre_centre(std::size_t j) const;
};

struct BasinOptions {
  TargetMode mode = TargetMode::kWeak;
  ConvergenceCriteria criteria;
  double duration = 50.0;
  double step = 1e-3;
  double switch_margin = 0.2;
  /// 0 means FIBRESTAB_THREADS, else the hardware concurrency.
  unsigned threads = 0;
};

struct BasinCell {
  std::size_t angle_index = 0;
  std::size_t fibre_index = 0;
  BundlePoint start;
  TerminalStatus status = TerminalStatus::kTimeout;
};

struct BasinReport {
  GridSpec grid;
  TargetMode target_mode = TargetMode::kWeak;
  std::size_t total_cells = 0;
  std::size_t converged_cells = 0;
  double converged_fraction = 0.0;
  /// Non-converged cells in grid order (angle index major).
  std::vector<BasinCell> nonconvergent;
  std::map<TerminalStatus, std::size_t> status_counts;
};

/// Integrates every cell centre. Results are merged by grid index, so the
/// report does not depend on the number of workers.
BasinReport basin(const FeedbackSystem& sys, const GridSpec& grid, const BasinOptions& options = {});

/// Worker count for parallel runs: FIBRESTAB_THREADS when set to a positive
/// integer, else the hardware concurrency (at least 1).
unsigned default_thread_count();

struct RetractionOptions {
  TargetMode mode = TargetMode::kStrong;
  double step = 1e-3;
  /// Stand-in for the limit at s = 1.
  double t_max = 1e3;
  ConvergenceCriteria criteria;
  double switch_margin = 0.2;
};

struct RetractionReport {
  std::size_t samples = 0;
  std::vector<double> s_grid;
  /// max over samples of d(r(0, z), z).
  double identity_defect = 0.0;
  /// max over samples of the distance from r(1, z) to the target set.
  double endpoint_defect = 0.0;
  /// max over s of d(r(s, z), z) for z in the target set (z* in strong
  /// mode, fibre points of the samples in weak mode).
  double fixed_defect = 0.0;
  bool identity_at_zero = false;
  bool endpoint_in_target = false;
  bool fixed_on_target = false;
};

/// r(s, z) is the flow at time s/(1 − s); r(1, z) is the state at t_max.
/// Every sample must converge to the target over [0, t_max], else
/// NonConvergentSample. `s_grid` values must lie in [0, 1].
RetractionReport flow_retraction(const FeedbackSystem& sys, const std::vector<BundlePoint>& samples,
                                 const std::vector<double>& s_grid, const RetractionOptions& options = {},
                                 double fixed_tolerance = 1e-9);

/// One row per sample: trajectory,time,chart,angle,fibre with %.17g numbers.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& trajectories);

}  // namespace fibrestab::bundlesim
