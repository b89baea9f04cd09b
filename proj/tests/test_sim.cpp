#include <random>

#include <gtest/gtest.h>

#include "meshvf/control_loop.hpp"
#include "meshvf/oracle.hpp"
#include "meshvf/shapes.hpp"
#include "meshvf/sim.hpp"

using namespace meshvf;

namespace {

// Occupancy of the voxel containing x: parity of +z crossings from the voxel
// centre, found by 2D point-in-triangle tests on the xy projection.
bool voxel_occupied(const TriangleMesh& m, const Vector3d& x, double h) {
  const Vector3d c = ((x / h).array().floor() + 0.5).matrix() * h;
  int crossings = 0;
  for (TriangleId t = 0; t < m.triangle_count(); ++t) {
    const Vector3d& a = m.corner(t, 0);
    const Vector3d& b = m.corner(t, 1);
    const Vector3d& d = m.corner(t, 2);
    const auto edge = [&](const Vector3d& p, const Vector3d& q) {
      return (q.x() - p.x()) * (c.y() - p.y()) - (q.y() - p.y()) * (c.x() - p.x());
    };
    const double w0 = edge(b, d);
    const double w1 = edge(d, a);
    const double w2 = edge(a, b);
    const bool pos = w0 > 0 && w1 > 0 && w2 > 0;
    const bool neg = w0 < 0 && w1 < 0 && w2 < 0;
    if (!pos && !neg) continue;
    const double z = (w0 * a.z() + w1 * b.z() + w2 * d.z()) / (w0 + w1 + w2);
    if (z > c.z()) ++crossings;
  }
  return crossings % 2 == 1;
}

ScriptedScenario scenario(GeneratorKind g, const Vector3d& start, std::size_t ticks, double step) {
  ScriptedScenario sc;
  sc.generator = g;
  sc.start = start;
  sc.ticks = ticks;
  sc.step_bound = step;
  return sc;
}

}  // namespace

TEST(Oracle, UnitCubeExamples) {
  const TriangleMesh cube = shapes::cube(1.0);
  EXPECT_NEAR(signed_distance_oracle(cube, {0, 0, 0}), -0.5, 1e-12);
  EXPECT_NEAR(signed_distance_oracle(cube, {0, 0, 2}), 1.5, 1e-12);
  EXPECT_NEAR(signed_distance_oracle(cube, {0.1, 0.2, 0.5 + 1e-3}), 1e-3, 1e-12);
}

TEST(Oracle, OpenMeshHasNoSign) {
  const TriangleMesh sheet = shapes::plane_sheet();
  const DistanceOracle oracle(sheet);
  EXPECT_NEAR(oracle.unsigned_distance({0, 0, 3}), 3.0, 1e-12);
  EXPECT_THROW(oracle.inside({0, 0, 3}), OpenMeshSignUndefined);
  EXPECT_THROW(oracle.signed_distance({0, 0, 3}), OpenMeshSignUndefined);
}

TEST(Oracle, AgreesWithVoxelOccupancy) {
  for (const char* name : {"torus", "gear", "lblock", "blob"}) {
    const TriangleMesh m = shapes::make(name);
    const DistanceOracle oracle(m);
    const double h = 1e-3;  // mm
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vector3d lo = m.bounds().min() - 0.1 * m.bounds().sizes();
    const Vector3d span = 1.2 * m.bounds().sizes();
    int agree = 0;
    for (int k = 0; k < 1000; ++k) {
      const Vector3d x = lo + span.cwiseProduct(Vector3d(u(rng), u(rng), u(rng)));
      const bool in = oracle.signed_distance(x) < 0;
      if (in == voxel_occupied(m, x, h)) {
        ++agree;
      } else {
        EXPECT_LT(oracle.unsigned_distance(x), h * std::sqrt(3.0)) << name;
      }
    }
    EXPECT_GE(agree, 999) << name;
  }
}

TEST(ControlLoop, StartInsideIsRejected) {
  const auto model = make_model("cube", shapes::cube(20.0));
  EXPECT_THROW(ControlLoop(model, Vector3d::Zero(), 1.0), StartInsideMeshError);
  EXPECT_NO_THROW(ControlLoop(model, Vector3d(0, 0, 2 * model->mesh.bbox_diagonal()), 1.0));
  EXPECT_THROW(ControlLoop(model, Vector3d(0, 0, 30), 0.0), Error);
}

TEST(ControlLoop, ClampAndNonFinite) {
  EXPECT_EQ(clamp_increment({3, 4, 0}, 10), Vector3d(3, 4, 0));
  EXPECT_LE((clamp_increment({3, 4, 0}, 1) - Vector3d(0.6, 0.8, 0)).norm(), 1e-15);
  const auto model = make_model("cube", shapes::cube(20.0));
  ControlLoop loop(model, {0, 0, 15}, 1.0);
  EXPECT_THROW(loop.step({0, 0, std::nan("")}), Error);
  const auto r = loop.step({0, 0, 15});
  EXPECT_EQ(r.constrained, Vector3d(0, 0, 15));
  EXPECT_EQ(r.feedback, Vector3d::Zero());
}

TEST(ControlLoop, StepsNeverExceedRadiusAndResetRestores) {
  const auto model = make_model("torus", shapes::torus());
  ControlLoop loop(model, {0, 0, 12}, 0.8);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 5.0);
  Vector3d prev = loop.constrained();
  for (int k = 0; k < 2000; ++k) {
    const auto r = loop.step(prev + Vector3d(g(rng), g(rng), g(rng)));
    ASSERT_LE((r.constrained - prev).norm(), 0.8 + 1e-12);
    ASSERT_LE(r.desired_increment.norm(), 0.8 + 1e-12);
    ASSERT_EQ(r.feedback, r.proxy - r.constrained);
    prev = r.constrained;
  }
  loop.reset();
  EXPECT_EQ(loop.constrained(), Vector3d(0, 0, 12));
  EXPECT_EQ(loop.proxy(), Vector3d(0, 0, 12));
  EXPECT_EQ(loop.tick(), 0);
}

TEST(RunScenario, PushIntoFlatWall) {
  const auto model = make_model("wall", shapes::plane_sheet(200, 4));
  auto sc = scenario(GeneratorKind::PushNormal, {3, -2, 5}, 1000, 0.5);
  sc.direction = Vector3d(0, 0, -1);
  const double r = 1.0;
  const auto log = run_scenario(model, sc, r);
  ASSERT_EQ(log.samples.size(), 1001u);
  for (const auto& s : log.samples) ASSERT_GE(s.constrained.z(), -1e-9);
  const auto& last = log.samples.back();
  EXPECT_LE(last.constrained.z(), r);
  EXPECT_NEAR(last.constrained.z(), 0.0, 1e-9);
  EXPECT_NEAR(last.proxy.z(), 5.0 - 1000 * 0.5, 1e-9);
}

TEST(RunScenario, ProxyGapGrowsWhilePushingAndResetsOnRetract) {
  const auto model = make_model("cube", shapes::cube(20.0));
  auto sc = scenario(GeneratorKind::PushNormal, {0, 0, 14}, 400, 0.5);
  sc.direction = Vector3d(0, 0, -1);
  sc.retract_after = 300;
  const auto log = run_scenario(model, sc, 1.0);
  double gap = 0.0;
  for (std::size_t k = 1; k <= 300; ++k) {
    const double g = (log.samples[k].proxy - log.samples[k].constrained).norm();
    ASSERT_GE(g, gap - 1e-12) << k;
    gap = g;
  }
  EXPECT_GT(gap, 100.0);
  for (std::size_t k = 301; k <= 400; ++k) ASSERT_LE((log.samples[k].proxy - log.samples[k].constrained).norm(), 1e-12);
  EXPECT_NEAR(log.samples.back().constrained.z(), 10.0 + 100 * 0.5, 1e-9);
}

TEST(RunScenario, SlideAlongSphereHoldsClearance) {
  const auto model = make_model("sphere", shapes::icosphere(4, 10.0));
  const DistanceOracle oracle(model->mesh);
  const Vector3d far(0.3, 0.2, 20.0);
  const auto cp = oracle.closest(far);
  auto sc = scenario(GeneratorKind::SlideTangent, cp.point + 0.5 * (far - cp.point).normalized(), 3000, 0.1);
  sc.clearance = 0.5;
  sc.axis = Vector3d::UnitX();
  const auto log = run_scenario(model, sc, 0.4);
  double travelled = 0.0;
  for (std::size_t k = 0; k < log.samples.size(); ++k) {
    const double d = oracle.signed_distance(log.samples[k].constrained);
    ASSERT_GE(d, 0.5 - 1e-9) << k;
    ASSERT_LE(d, 0.5 + sc.step_bound) << k;
    if (k > 0) travelled += (log.samples[k].constrained - log.samples[k - 1].constrained).norm();
  }
  EXPECT_GT(travelled, 0.9 * 3000 * 0.1);
}

TEST(RunScenario, RandomWalkOnCubeIsSafeAndReplayable) {
  const auto model = make_model("cube", shapes::cube(20.0));
  const double r = default_radius(model->mesh);
  auto sc = standard_scenario(*model, GeneratorKind::RandomWalk, 1, 10000, r / 2);
  const auto a = run_scenario(model, sc, r);
  const auto b = run_scenario(model, sc, r);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) ASSERT_TRUE(a.samples[k] == b.samples[k]) << k;
  const DistanceOracle oracle(model->mesh);
  for (std::size_t k = 0; k < a.samples.size(); k += 97)
    ASSERT_GE(oracle.signed_distance(a.samples[k].constrained), -1e-6 * model->mesh.bbox_diagonal());
}

TEST(RunScenario, EveryGeneratorOnEveryShapeShort) {
  for (const std::string& name : shapes::names()) {
    const auto model = make_model(name, shapes::make(name));
    const double r = default_radius(model->mesh);
    for (GeneratorKind g : all_generators()) {
      const auto sc = standard_scenario(*model, g, 3, 500, r / 2);
      std::size_t active = 0;
      const auto log = run_scenario(model, sc, r);
      for (const auto& s : log.samples) active += s.active;
      if (g != GeneratorKind::Waypoints) {
        EXPECT_GT(active, 0u) << name << " " << to_string(g);
      }
    }
  }
}

TEST(RunScenario, RejectsStepBoundAboveRadius) {
  const auto model = make_model("cube", shapes::cube(20.0));
  EXPECT_THROW(run_scenario(model, scenario(GeneratorKind::RandomWalk, {0, 0, 15}, 10, 2.0), 1.0), Error);
}

TEST(PenetrationMonitor, DetectsInsidePoint) {
  const TriangleMesh cube = shapes::cube(20.0);
  PenetrationMonitor monitor(cube, 1e-6);
  monitor.check(0, {0, 0, 15});
  monitor.check(1, {0, 0, 14});
  EXPECT_EQ(monitor.ray_tests(), 1u);
  try {
    monitor.check(2, {0, 0, 9});
    FAIL() << "expected PenetrationDetected";
  } catch (const PenetrationDetected& e) {
    EXPECT_EQ(e.tick(), 2);
    EXPECT_NEAR(e.distance(), -1.0, 1e-12);
  }
}

TEST(Generators, NamesRoundTrip) {
  for (GeneratorKind g : all_generators()) EXPECT_EQ(generator_from_string(to_string(g)), g);
  EXPECT_THROW(generator_from_string("Teleport"), Error);
}
