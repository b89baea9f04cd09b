#include "meshvf/control_loop.hpp"

#include <chrono>

#include "meshvf/oracle.hpp"

namespace meshvf {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

}  // namespace

std::shared_ptr<const MeshModel> make_model(std::string id, TriangleMesh mesh) {
  auto model = std::make_shared<MeshModel>();
  model->id = std::move(id);
  model->mesh = std::move(mesh);
  model->tree = build_pdtree(model->mesh);
  return model;
}

Vector3d clamp_increment(const Vector3d& delta, double radius) {
  const double len = delta.norm();
  if (len <= radius) return delta;
  return delta * (radius / len);
}

ControlLoop::ControlLoop(std::shared_ptr<const MeshModel> model, const Vector3d& start, double radius)
    : model_(std::move(model)), start_(start), radius_(radius), constrained_(start), proxy_(start) {
  if (!model_) throw Error("control loop needs a mesh model");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("motion sphere radius must be positive and finite");
  if (!start.allFinite()) throw Error("start position must be finite");
  if (model_->mesh.is_closed()) {
    const double tolerance = 1e-6 * model_->mesh.bbox_diagonal();
    if (DistanceOracle(model_->mesh).signed_distance(start) < -tolerance)
      throw StartInsideMeshError("start position is inside the mesh");
  }
}

const std::vector<ClosestPointResult>& ControlLoop::hits() {
  if (!hits_valid_) {
    const auto t0 = Clock::now();
    model_->tree.query({constrained_, radius_}, hits_);
    hits_ns_ = since(t0);
    hits_valid_ = true;
  }
  return hits_;
}

TickResult ControlLoop::step(const Vector3d& target) {
  if (!target.allFinite()) throw Error("desired position must be finite");
  const auto t0 = Clock::now();
  TickResult out;
  out.desired = target;
  out.desired_increment = clamp_increment(target - constrained_, radius_);

  const bool cached = hits_valid_;
  hits();
  out.timing.query_ns = cached ? hits_ns_ : since(t0);

  ++tick_;
  auto t1 = Clock::now();
  out.constraints = generate_constraints(model_->mesh, hits_, constrained_, tick_);
  out.timing.generate_ns = since(t1);

  t1 = Clock::now();
  MotionProblem problem;
  problem.desired = out.desired_increment;
  problem.rows = constraint_rows(out.constraints);
  out.solution = solver_.solve(problem);
  out.timing.solve_ns = since(t1);

  // The gap points into the surface; a desired motion against it releases
  // the proxy back onto the constrained point.
  const Vector3d gap = proxy_ - constrained_;
  constrained_ += out.solution.cartesian_increment;
  if (out.desired_increment.dot(gap) < 0.0)
    proxy_ = constrained_;
  else
    proxy_ += out.desired_increment;
  hits_valid_ = false;

  out.tick = tick_;
  out.constrained = constrained_;
  out.proxy = proxy_;
  out.feedback = proxy_ - constrained_;
  out.timing.total_ns = since(t0) + (cached ? hits_ns_ : 0);
  return out;
}

void ControlLoop::reset() {
  constrained_ = start_;
  proxy_ = start_;
  tick_ = 0;
  solver_.reset();
  hits_valid_ = false;
}

}  // namespace meshvf
