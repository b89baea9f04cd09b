#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "meshvf/constraints.hpp"
#include "meshvf/mesh.hpp"
#include "meshvf/motion_solver.hpp"
#include "meshvf/pd_tree.hpp"

namespace meshvf {

class StartInsideMeshError : public Error {
 public:
  using Error::Error;
};

/// A mesh with its tree, shared read-only between sessions.
struct MeshModel {
  std::string id;
  TriangleMesh mesh;
  PDTree tree;
};

std::shared_ptr<const MeshModel> make_model(std::string id, TriangleMesh mesh);

struct TickTiming {
  std::int64_t query_ns = 0;
  std::int64_t generate_ns = 0;
  std::int64_t solve_ns = 0;
  std::int64_t total_ns = 0;
};

struct TickResult {
  std::int64_t tick = 0;
  Vector3d desired = Vector3d::Zero();           // target point as requested
  Vector3d desired_increment = Vector3d::Zero();  // after clamping to the radius
  Vector3d constrained = Vector3d::Zero();
  Vector3d proxy = Vector3d::Zero();
  Vector3d feedback = Vector3d::Zero();  // proxy - constrained
  ActiveConstraintSet constraints;
  MotionSolution solution;
  TickTiming timing;
};

/// Delta clamped to Euclidean length `radius`.
Vector3d clamp_increment(const Vector3d& delta, double radius);

/// One tool's tick loop: query, generate constraints, solve, integrate.
///
/// The constrained point moves by the solved increment; the proxy integrates
/// the clamped desired increments without constraints, and snaps back onto
/// the constrained point on any tick whose increment opposes proxy - constrained.
class ControlLoop {
 public:
  /// Throws StartInsideMeshError when `start` is inside a closed mesh by more
  /// than 1e-6 x diagonal, Error when the radius is not positive.
  ControlLoop(std::shared_ptr<const MeshModel> model, const Vector3d& start, double radius);

  /// Triangles within the radius of the current constrained position. Cached
  /// until the next step.
  const std::vector<ClosestPointResult>& hits();

  /// Advances one tick toward `target`. Throws Error for non-finite input.
  TickResult step(const Vector3d& target);

  /// Back to the start position, tick 0, cold solver.
  void reset();

  const MeshModel& model() const { return *model_; }
  const std::shared_ptr<const MeshModel>& shared_model() const { return model_; }
  const Vector3d& constrained() const { return constrained_; }
  const Vector3d& proxy() const { return proxy_; }
  const Vector3d& start() const { return start_; }
  double radius() const { return radius_; }
  std::int64_t tick() const { return tick_; }

 private:
  std::shared_ptr<const MeshModel> model_;
  Vector3d start_;
  double radius_;
  Vector3d constrained_;
  Vector3d proxy_;
  std::int64_t tick_ = 0;
  MotionSolver solver_;
  std::vector<ClosestPointResult> hits_;
  bool hits_valid_ = false;
  std::int64_t hits_ns_ = 0;
};

}  // namespace meshvf
