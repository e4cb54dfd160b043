#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "fibrestab/bundlesim.hpp"
#include "fibrestab/errors.hpp"
#include "fibrestab/experiment.hpp"
#include "test_support.hpp"

using namespace fibrestab::bundlesim;
using Catch::Matchers::WithinAbs;
constexpr double kPi = std::numbers::pi;

namespace {

FeedbackSystem certified(FeedbackSystem sys) {
  certify(sys);
  return sys;
}

TrajectoryRecord constant_record(const BundlePoint& p, double t_end, double dt) {
  TrajectoryRecord r;
  for (double t = 0; t <= t_end + 1e-12; t += dt) r.samples.push_back({t, p.chart, p.angle, p.fibre});
  return r;
}

}  // namespace

TEST_CASE("Chart transitions") {
  const auto mob = ChartAtlas::mobius(FibreModel::kLine);
  const BundlePoint a{ChartId::kA, 0.5, 0.3};
  const auto b = to_chart(mob, a, ChartId::kB);
  REQUIRE(b);
  CHECK(b->angle == 0.5);
  CHECK(b->fibre == 0.3);

  const BundlePoint c{ChartId::kA, 4.0, 0.3};
  const auto d = to_chart(mob, c, ChartId::kB);
  REQUIRE(d);
  CHECK_THAT(d->angle, WithinAbs(4.0 - 2 * kPi, 1e-15));
  CHECK(d->fibre == -0.3);

  CHECK_FALSE(to_chart(mob, BundlePoint{ChartId::kA, kPi, 0.0}, ChartId::kB));
  CHECK_FALSE(to_chart(mob, BundlePoint{ChartId::kB, 0.0, 0.0}, ChartId::kA));
  CHECK_FALSE(to_chart(ChartAtlas::chart_patch(FibreModel::kLine), BundlePoint{ChartId::kB, 0.5, 0.0}, ChartId::kA));

  CHECK(point_at(mob, 0.3, 0.0).chart == ChartId::kB);
  CHECK(point_at(mob, 3.0, 0.0).chart == ChartId::kA);
  CHECK(point_at(mob, -3.0, 0.0).chart == ChartId::kA);
  CHECK_THAT(angular_distance(0.1, 2 * kPi - 0.1), WithinAbs(0.2, 1e-12));
}

TEST_CASE("Transitions are involutions on both overlaps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.01, 2 * kPi - 0.01), fibre(-3, 3);
  for (const auto& atlas : {ChartAtlas::trivial(FibreModel::kLine), ChartAtlas::mobius(FibreModel::kLine)}) {
    for (int i = 0; i < 200; ++i) {
      const BundlePoint p{ChartId::kA, angle(rng), fibre(rng)};
      if (std::abs(p.angle - kPi) < 1e-9) continue;
      const auto q = to_chart(atlas, p, ChartId::kB);
      REQUIRE(q);
      const auto back = to_chart(atlas, *q, ChartId::kA);
      REQUIRE(back);
      REQUIRE_THAT(back->angle, WithinAbs(p.angle, 1e-12));
      REQUIRE(back->fibre == p.fibre);
      REQUIRE(bundle_distance(atlas, p, *q) < 1e-12);
    }
  }
}

TEST_CASE("Atlas validation") {
  ChartAtlas bad;
  bad.signs = {1, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(ChartAtlas::trivial(FibreModel::kInterval).is_trivial());
  CHECK_FALSE(ChartAtlas::mobius(FibreModel::kInterval).is_trivial());
  CHECK(parse_fibre_model("circle") == FibreModel::kCircle);
  CHECK_THROWS_AS(parse_fibre_model("plane"), fibrestab::ParseError);
}

TEST_CASE("Compatibility of the shipped feedback laws") {
  const auto good = check_compatibility(mobius_system(), 5000, 1e-9);
  CHECK(good.samples == 10000);
  CHECK(good.pass);
  CHECK(good.max_residual_f < 1e-9);
  CHECK(good.max_residual_g < 1e-9);

  const auto bad = check_compatibility(incompatible_system(), 5000, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK(std::max(bad.max_residual_f, bad.max_residual_g) > 0.1);

  CHECK(check_compatibility(pendulum_system(), 1000, 1e-9).pass);
  CHECK(check_compatibility(gated_pendulum_system(), 1000, 1e-9).pass);
  CHECK(check_compatibility(linear_patch_system(), 1000, 1e-9).pass);
}

TEST_CASE("Chart fields are related by the transition") {
  // θ̇ is chart independent and u̇ transforms like u, so a step in either
  // chart projects to the same base motion.
  const auto sys = mobius_system();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.05, 2 * kPi - 0.05), fibre(-0.95, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double th = angle(rng), u = fibre(rng);
    if (std::abs(th - kPi) < 1e-3) continue;
    const auto q = to_chart(sys.atlas, {ChartId::kA, th, u}, ChartId::kB);
    REQUIRE(q);
    const double tau = q->fibre == u ? 1.0 : -1.0;
    const auto [fa, ga] = sys.field(ChartId::kA, th, u);
    const auto [fb, gb] = sys.field(ChartId::kB, q->angle, q->fibre);
    REQUIRE_THAT(fa, WithinAbs(fb, 1e-12));
    REQUIRE_THAT(tau * ga, WithinAbs(gb, 1e-12));

    // Finite differences of the projection agree with θ̇.
    const double h = 1e-6;
    const double ahead = th + h * fa;
    const auto pa = to_chart(sys.atlas, {ChartId::kA, ahead, u + h * ga}, ChartId::kB);
    REQUIRE(pa);
    REQUIRE_THAT((pa->angle - q->angle) / h, WithinAbs(fb, 1e-6));
  }
}

TEST_CASE("Integration refuses uncertified or failing systems") {
  const BundlePoint start{ChartId::kB, 0.5, 0.0};
  CHECK_THROWS_AS(integrate(pendulum_system(), start, 1.0, 1e-2), fibrestab::CompatibilityNotVerified);
  auto bad = incompatible_system();
  certify(bad);
  CHECK_THROWS_AS(integrate(bad, start, 1.0, 1e-2), fibrestab::CompatibilityNotVerified);

  const auto sys = certified(pendulum_system());
  CHECK_THROWS_AS(integrate(sys, start, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, start, -1.0, 1e-2), std::invalid_argument);
}

TEST_CASE("Blow-up and boundary contact raise NonFiniteState") {
  auto runaway = make_system("runaway", ChartAtlas::trivial(FibreModel::kLine), make_plant("zero"),
                             make_controller("constant", {{"value", 1e10}}), 0.0);
  certify(runaway);
  CHECK_THROWS_AS(integrate(runaway, {ChartId::kB, 0.0, 0.0}, 1.0, 1e-2), fibrestab::NonFiniteState);

  auto escape = make_system("escape", ChartAtlas::trivial(FibreModel::kInterval), make_plant("zero"),
                            make_controller("constant", {{"value", 1.0}}), 0.0);
  certify(escape);
  CHECK_THROWS_AS(integrate(escape, {ChartId::kB, 0.0, 0.0}, 5.0, 1e-2), fibrestab::NonFiniteState);
}

TEST_CASE("Law construction") {
  CHECK_THROWS_AS(make_plant("warp"), fibrestab::UnknownName);
  CHECK_THROWS_AS(make_controller("decay", {{"speed", 1.0}}), fibrestab::ParseError);
  const auto c = make_controller("decay", {{"rate", 2.0}});
  CHECK(c->name() == "decay");
  CHECK(c->parameters().at("rate") == 2.0);
  Phase ph;
  CHECK((*c)(ph, 3.0) == -6.0);
  CHECK_FALSE(plant_names().empty());
  CHECK_FALSE(controller_names().empty());
}

TEST_CASE("Antipodal phase is exact") {
  const auto sys = pendulum_system(0.0);
  const auto ph = sys.phase(kPi);
  CHECK(ph.sine == 0.0);
  CHECK(ph.cosine == -1.0);
  const auto ph2 = sys.phase(-kPi);
  CHECK(ph2.sine == 0.0);
}

TEST_CASE("Convergence classification") {
  const auto atlas = ChartAtlas::trivial(FibreModel::kLine);
  const BundlePoint z{ChartId::kB, 0.0, 0.0};
  const auto at_target = constant_record(z, 2.0, 0.1);
  CHECK(classify_convergence(at_target, ConvergenceTarget::strong(z), atlas, 1e-3, 1.0) ==
        TerminalStatus::kConvergedPoint);
  CHECK(classify_convergence(at_target, ConvergenceTarget::weak(0.0), atlas, 1e-3, 1.0) ==
        TerminalStatus::kConvergedFibre);

  const auto on_fibre = constant_record({ChartId::kB, 0.0, 0.7}, 2.0, 0.1);
  CHECK(classify_convergence(on_fibre, ConvergenceTarget::strong(z), atlas, 1e-3, 1.0) ==
        TerminalStatus::kConvergedFibre);

  const auto far = constant_record({ChartId::kA, 3.0, 0.0}, 2.0, 0.1);
  CHECK(classify_convergence(far, ConvergenceTarget::weak(0.0), atlas, 1e-3, 1.0) == TerminalStatus::kTimeout);

  // Too short to cover the dwell window.
  const auto brief = constant_record(z, 0.5, 0.1);
  CHECK(classify_convergence(brief, ConvergenceTarget::strong(z), atlas, 1e-3, 1.0) == TerminalStatus::kTimeout);

  auto diverged = at_target;
  diverged.terminal_status = TerminalStatus::kDiverged;
  CHECK(classify_convergence(diverged, ConvergenceTarget::strong(z), atlas, 1e-3, 1.0) == TerminalStatus::kDiverged);

  CHECK_THROWS_AS(classify_convergence(at_target, ConvergenceTarget::strong(z), atlas, 0.0, 1.0),
                  std::invalid_argument);
  CHECK(is_converged(TerminalStatus::kConvergedFibre, TargetMode::kWeak));
  CHECK_FALSE(is_converged(TerminalStatus::kConvergedFibre, TargetMode::kStrong));
}

TEST_CASE("Pendulum trajectories converge and record chart switches") {
  const auto sys = certified(pendulum_system());
  const auto r = integrate(sys, {ChartId::kA, 2.5, 1.5}, 30.0, 1e-3);
  CHECK(r.terminal_status == TerminalStatus::kConvergedPoint);
  CHECK(r.chart_switches >= 1);
  CHECK(r.samples.front().time == 0.0);
  CHECK_THAT(r.samples.back().time, WithinAbs(30.0, 1e-9));
  CHECK(classify_convergence(r, ConvergenceTarget::of(sys, TargetMode::kStrong), sys.atlas, 1e-3, 1.0) ==
        TerminalStatus::kConvergedPoint);
}

TEST_CASE("Trajectories do not depend on the starting chart") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> angle(0.3, 2 * kPi - 0.3), fibre(-1.5, 1.5), mob_fibre(-0.9, 0.9);
  const auto gated = certified(gated_pendulum_system());
  const auto mobius = certified(mobius_system());
  IntegrationSettings settings;
  settings.record_stride = 1000;
  int compared = 0;
  for (int i = 0; i < 50; ++i) {
    const FeedbackSystem& sys = i % 2 == 0 ? gated : mobius;
    const double th = angle(rng);
    const double u = i % 2 == 0 ? fibre(rng) : mob_fibre(rng);
    if (std::abs(th - kPi) < 0.3) continue;
    const BundlePoint pa{ChartId::kA, th, u};
    const auto pb = to_chart(sys.atlas, pa, ChartId::kB);
    REQUIRE(pb);
    const auto ra = integrate(sys, pa, 10.0, 1e-3, settings);
    const auto rb = integrate(sys, *pb, 10.0, 1e-3, settings);
    INFO(sys.name << " start " << th << ", " << u);
    REQUIRE(bundle_distance(sys.atlas, ra.samples.back().point(), rb.samples.back().point()) < 1e-6);
    ++compared;
  }
  CHECK(compared >= 30);
}

TEST_CASE("Basin of the gated pendulum on a coarse grid") {
  const auto sys = certified(gated_pendulum_system());
  GridSpec grid;
  grid.angle_cells = 10;
  grid.fibre_cells = 5;
  grid.angle_first = kPi;
  BasinOptions opts;
  opts.duration = 30.0;
  opts.step = 2e-3;
  opts.threads = 1;
  const auto r = basin(sys, grid, opts);
  CHECK(r.total_cells == 50);
  CHECK(r.converged_cells == 45);
  REQUIRE(r.nonconvergent.size() == 5);
  for (const auto& c : r.nonconvergent) CHECK(c.angle_index == 0);

  opts.threads = 3;
  const auto r3 = basin(sys, grid, opts);
  CHECK(r3.converged_cells == r.converged_cells);
  REQUIRE(r3.nonconvergent.size() == r.nonconvergent.size());
  for (std::size_t i = 0; i < r.nonconvergent.size(); ++i) CHECK(r3.nonconvergent[i].fibre_index == r.nonconvergent[i].fibre_index);
}

TEST_CASE("Grid centres") {
  GridSpec g;
  g.angle_cells = 4;
  g.fibre_cells = 2;
  g.angle_first = 0;
  g.angle_span = 2 * kPi;
  CHECK(g.angle_centre(0) == 0.0);
  CHECK_THAT(g.angle_centre(2), WithinAbs(kPi, 1e-15));
  CHECK(g.fibre_centre(0) == -1.0);
  CHECK(g.fibre_centre(1) == 1.0);
}

TEST_CASE("Flow retraction on a contractible patch") {
  const auto sys = certified(decay_patch_system());
  const std::vector<BundlePoint> samples{{ChartId::kB, 1.0, 2.0}, {ChartId::kB, -2.0, -1.0}, {ChartId::kB, 0.0, 0.0}};
  const std::vector<double> s{0.0, 0.25, 0.5, 0.9, 1.0};
  RetractionOptions opts;
  opts.t_max = 100.0;
  const auto r = flow_retraction(sys, samples, s, opts);
  CHECK(r.samples == 3);
  CHECK(r.identity_defect == 0.0);
  CHECK(r.identity_at_zero);
  CHECK(r.fixed_defect < 1e-9);
  CHECK(r.endpoint_defect < 1e-3);
  CHECK(r.endpoint_in_target);

  CHECK_THROWS_AS(flow_retraction(sys, samples, {0.0, 1.5}, opts), std::invalid_argument);
}

TEST_CASE("Flow retraction rejects non-convergent samples") {
  const auto sys = certified(gated_pendulum_system());
  RetractionOptions opts;
  opts.t_max = 20.0;
  CHECK_THROWS_AS(flow_retraction(sys, {{ChartId::kA, kPi, 0.5}}, {0.0, 1.0}, opts), fibrestab::NonConvergentSample);
}

TEST_CASE("Trajectory CSV") {
  const auto sys = certified(pendulum_system());
  IntegrationSettings s;
  s.record_stride = 100;
  const auto r = integrate(sys, {ChartId::kB, 0.5, 0.0}, 1.0, 1e-2, s);
  std::ostringstream out;
  write_trajectory_csv(out, {r, r});
  const std::string text = out.str();
  CHECK(text.rfind("trajectory,time,chart,angle,fibre\n", 0) == 0);
  CHECK(text.find("\n1,") != std::string::npos);
}

TEST_CASE("Experiment files") {
  const auto e = experiment_from_json(fibrestab::io::read_file(fibrestab::testing::data_path("experiments/linear_patch.json")));
  CHECK(e.system.atlas.patch);
  CHECK(e.grid.has_value());

  auto j = fibrestab::io::read_file(fibrestab::testing::data_path("experiments/linear_patch.json"));
  j["plant"]["name"] = "warp";
  CHECK_THROWS_AS(experiment_from_json(j), fibrestab::UnknownName);
  j.erase("plant");
  CHECK_THROWS_AS(experiment_from_json(j), fibrestab::ParseError);

  auto inc = experiment_from_json(fibrestab::io::read_file(fibrestab::testing::data_path("experiments/incompatible.json")));
  const auto res = run_experiment(inc);
  CHECK_FALSE(res.compatibility.pass);
  CHECK_FALSE(res.basin);
  CHECK(res.trajectories.empty());
}

TEST_CASE("Damped loop started near its target settles on it") {
  const auto sys = certified(pendulum_system(0.7));
  const auto r = integrate(sys, point_at(sys.atlas, 0.9, 0.1), 50.0, 1e-3);
  CHECK(r.terminal_status == TerminalStatus::kConvergedPoint);
  CHECK(bundle_distance(sys.atlas, r.samples.back().point(), sys.target_point()) < 1e-6);
}

TEST_CASE("Flow retraction of the linear loop on a patch") {
  const auto sys = certified(linear_patch_system());
  std::vector<BundlePoint> samples;
  for (double a : {-1.5, -0.4, 0.0, 0.8, 1.6})
    for (double u : {-1.0, 0.0, 0.9}) samples.push_back({ChartId::kB, a, u});
  RetractionOptions opts;
  opts.t_max = 200.0;
  const auto r = flow_retraction(sys, samples, {0.0, 0.2, 0.5, 0.8, 0.95, 1.0}, opts);
  CHECK(r.identity_defect < 1e-4);
  CHECK(r.fixed_defect < 1e-4);
  CHECK(r.endpoint_defect < 1e-4);
  CHECK(r.identity_at_zero);
  CHECK(r.fixed_on_target);
  CHECK(r.endpoint_in_target);
}
