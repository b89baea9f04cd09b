#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "meshvf/control_loop.hpp"
#include "meshvf/oracle.hpp"

namespace meshvf {

enum class GeneratorKind { PushNormal, SlideTangent, OrbitEdge, RandomWalk, Waypoints };

std::string_view to_string(GeneratorKind g);
GeneratorKind generator_from_string(std::string_view s);
std::vector<GeneratorKind> all_generators();

struct ScriptedScenario {
  std::string mesh_id;
  Vector3d start = Vector3d::Zero();
  GeneratorKind generator = GeneratorKind::PushNormal;
  std::uint64_t seed = 0;
  std::vector<Vector3d> waypoints;
  std::size_t ticks = 0;
  double step_bound = 0.0;  // mm per tick, at most the motion radius

  // PushNormal: fixed push direction; toward the nearest surface when empty.
  std::optional<Vector3d> direction;
  // PushNormal: reverse the push after this many ticks; never when zero.
  std::size_t retract_after = 0;
  // SlideTangent / OrbitEdge: motion is axis x outward; auto-chosen when zero.
  Vector3d axis = Vector3d::Zero();
  // SlideTangent / OrbitEdge: distance to the surface the generator steers toward.
  double clearance = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  Vector3d desired = Vector3d::Zero();
  Vector3d proxy = Vector3d::Zero();
  Vector3d constrained = Vector3d::Zero();
  std::size_t active = 0;
  SolveStatus status = SolveStatus::Optimal;

  bool operator==(const TrajectorySample&) const = default;
};

/// Sample 0 is the start state at t = 0; sample k follows tick k.
struct TrajectoryLog {
  std::vector<TrajectorySample> samples;
  double tick_rate = 1000.0;

  std::vector<Vector3d> constrained() const;
  std::vector<Vector3d> desired() const;
};

class PenetrationDetected : public Error {
 public:
  PenetrationDetected(std::int64_t tick, double distance);
  std::int64_t tick() const { return tick_; }
  double distance() const { return distance_; }

 private:
  std::int64_t tick_;
  double distance_;
};

/// Per-tick non-penetration check against a DistanceOracle.
///
/// A point farther from the surface than it moved since a point known to be
/// outside is outside as well, so ray tests run only when that certificate
/// fails and the distance exceeds the tolerance.
class PenetrationMonitor {
 public:
  PenetrationMonitor(const TriangleMesh& mesh, double tolerance);
  PenetrationMonitor(TriangleMesh&&, double) = delete;

  /// Signed distance lower bound for `x`; throws PenetrationDetected if the
  /// point is inside by more than the tolerance.
  void check(std::int64_t tick, const Vector3d& x);

  double tolerance() const { return tolerance_; }
  std::size_t ray_tests() const { return ray_tests_; }
  const DistanceOracle& oracle() const { return oracle_; }

 private:
  DistanceOracle oracle_;
  double tolerance_;
  bool known_outside_ = false;
  Vector3d last_ = Vector3d::Zero();
  bool has_last_ = false;
  std::size_t ray_tests_ = 0;
};

/// Produces the next target point for a scripted scenario.
class DesiredGenerator {
 public:
  DesiredGenerator(const ScriptedScenario& scenario, const MeshModel& model);

  /// Target point for the next tick, given the loop's current state.
  Vector3d next(ControlLoop& loop);

 private:
  struct Surface {
    Vector3d point;
    Vector3d outward;
    double distance;
  };
  Surface nearest(ControlLoop& loop) const;
  Vector3d tangent_step(const Surface& s, const Vector3d& axis) const;

  ScriptedScenario scenario_;
  const MeshModel* model_;
  std::mt19937_64 rng_;
  std::size_t tick_ = 0;
  std::optional<Vector3d> push_;
  std::vector<Vector3d> waypoints_;
};

struct RunOptions {
  double tick_rate = 1000.0;
  bool verify = true;
  /// Penetration tolerance; 1e-6 x bbox diagonal when negative.
  double penetration_tolerance = -1.0;
  std::function<void(const TickResult&)> on_tick;
};

/// Runs a scenario through a fresh ControlLoop. Deterministic for a given
/// scenario. Throws PenetrationDetected, StartInsideMeshError, or Error when
/// step_bound exceeds the radius.
TrajectoryLog run_scenario(std::shared_ptr<const MeshModel> model, const ScriptedScenario& scenario, double radius,
                           const RunOptions& options = {});

/// Motion radius used by the harness for a mesh: 0.04 x bbox diagonal.
double default_radius(const TriangleMesh& mesh);

/// A reproducible scenario on `model`: start just off a seeded surface point
/// (verified outside), generator parameters chosen to press on the surface.
ScriptedScenario standard_scenario(const MeshModel& model, GeneratorKind generator, std::uint64_t seed,
                                   std::size_t ticks, double step_bound);

}  // namespace meshvf
