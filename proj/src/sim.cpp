#include "meshvf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace meshvf {

std::string_view to_string(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::PushNormal:
      return "PushNormal";
    case GeneratorKind::SlideTangent:
      return "SlideTangent";
    case GeneratorKind::OrbitEdge:
      return "OrbitEdge";
    case GeneratorKind::RandomWalk:
      return "RandomWalk";
    case GeneratorKind::Waypoints:
      return "Waypoints";
  }
  return "?";
}

GeneratorKind generator_from_string(std::string_view s) {
  for (GeneratorKind g : all_generators())
    if (s == to_string(g)) return g;
  throw Error("unknown scenario generator '" + std::string(s) + "'");
}

std::vector<GeneratorKind> all_generators() {
  return {GeneratorKind::PushNormal, GeneratorKind::SlideTangent, GeneratorKind::OrbitEdge, GeneratorKind::RandomWalk,
          GeneratorKind::Waypoints};
}

std::vector<Vector3d> TrajectoryLog::constrained() const {
  std::vector<Vector3d> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.constrained);
  return out;
}

std::vector<Vector3d> TrajectoryLog::desired() const {
  std::vector<Vector3d> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.desired);
  return out;
}

PenetrationDetected::PenetrationDetected(std::int64_t tick, double distance)
    : Error("tool inside mesh at tick " + std::to_string(tick) + " (signed distance " + std::to_string(distance) + ")"),
      tick_(tick),
      distance_(distance) {}

PenetrationMonitor::PenetrationMonitor(const TriangleMesh& mesh, double tolerance)
    : oracle_(mesh), tolerance_(tolerance) {}

void PenetrationMonitor::check(std::int64_t tick, const Vector3d& x) {
  const double d = oracle_.unsigned_distance(x);
  if (d <= tolerance_) {
    known_outside_ = false;
  } else if (known_outside_ && has_last_ && d > (x - last_).norm()) {
    // The segment from the previous point cannot have crossed the surface.
  } else {
    ++ray_tests_;
    if (oracle_.inside(x)) throw PenetrationDetected(tick, -d);
    known_outside_ = true;
  }
  last_ = x;
  has_last_ = true;
}

DesiredGenerator::DesiredGenerator(const ScriptedScenario& scenario, const MeshModel& model)
    : scenario_(scenario), model_(&model), rng_(scenario.seed) {
  if (scenario_.axis.isZero()) {
    std::normal_distribution<double> g;
    scenario_.axis = Vector3d(g(rng_), g(rng_), g(rng_)).normalized();
  } else {
    scenario_.axis.normalize();
  }
  if (scenario_.direction) push_ = scenario_.direction->normalized();
  waypoints_ = scenario_.waypoints;
  if (scenario_.generator == GeneratorKind::Waypoints && waypoints_.empty()) {
    const auto& box = model.mesh.bounds();
    const Vector3d lo = box.min() - 0.25 * box.sizes();
    const Vector3d span = 1.5 * box.sizes();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) waypoints_.push_back(lo + span.cwiseProduct(Vector3d(u(rng_), u(rng_), u(rng_))));
  }
}

DesiredGenerator::Surface DesiredGenerator::nearest(ControlLoop& loop) const {
  const Vector3d& x = loop.constrained();
  const ClosestPointResult* best = nullptr;
  std::vector<ClosestPointResult> wider;
  for (const ClosestPointResult& h : loop.hits())
    if (!best || h.distance < best->distance) best = &h;
  for (double r = 2.0 * loop.radius(); !best; r *= 2.0) {
    model_->tree.query({x, r}, wider);
    for (const ClosestPointResult& h : wider)
      if (!best || h.distance < best->distance) best = &h;
  }
  Surface s{best->point, Vector3d::Zero(), best->distance};
  if (best->distance > 1e-12) {
    s.outward = (x - best->point) / best->distance;
  } else {
    s.outward = model_->mesh.face_normal(best->triangle);
  }
  return s;
}

Vector3d DesiredGenerator::tangent_step(const Surface& s, const Vector3d& axis) const {
  const double bound = scenario_.step_bound;
  Vector3d tangent = axis.cross(s.outward);
  if (tangent.norm() < 1e-6) tangent = s.outward.unitOrthogonal();
  tangent.normalize();
  const double radial = std::clamp(scenario_.clearance - s.distance, -bound, bound);
  return clamp_increment(bound * tangent + radial * s.outward, bound);
}

Vector3d DesiredGenerator::next(ControlLoop& loop) {
  const Vector3d& x = loop.constrained();
  const double bound = scenario_.step_bound;
  const std::size_t k = tick_++;
  Vector3d delta = Vector3d::Zero();
  switch (scenario_.generator) {
    case GeneratorKind::PushNormal: {
      if (!push_) push_ = -nearest(loop).outward;
      const bool retract = scenario_.retract_after > 0 && k >= scenario_.retract_after;
      delta = bound * (retract ? -*push_ : *push_);
      break;
    }
    case GeneratorKind::SlideTangent:
    case GeneratorKind::OrbitEdge:
      delta = tangent_step(nearest(loop), scenario_.axis);
      break;
    case GeneratorKind::RandomWalk: {
      std::normal_distribution<double> g;
      const Vector3d noise(g(rng_), g(rng_), g(rng_));
      Vector3d dir = noise - nearest(loop).outward;
      if (dir.norm() < 1e-12) dir = noise;
      delta = bound * dir.normalized();
      break;
    }
    case GeneratorKind::Waypoints: {
      const std::size_t hold = std::max<std::size_t>(1, scenario_.ticks / std::max<std::size_t>(1, waypoints_.size()));
      const Vector3d& goal = waypoints_[(k / hold) % waypoints_.size()];
      delta = clamp_increment(goal - x, bound);
      break;
    }
  }
  return x + delta;
}

TrajectoryLog run_scenario(std::shared_ptr<const MeshModel> model, const ScriptedScenario& scenario, double radius,
                           const RunOptions& options) {
  if (!(scenario.step_bound > 0.0) || scenario.step_bound > radius)
    throw Error("step bound must be positive and at most the motion radius");

  ControlLoop loop(model, scenario.start, radius);
  std::optional<PenetrationMonitor> monitor;
  if (options.verify && model->mesh.is_closed()) {
    const double tol =
        options.penetration_tolerance >= 0.0 ? options.penetration_tolerance : 1e-6 * model->mesh.bbox_diagonal();
    monitor.emplace(model->mesh, tol);
    monitor->check(0, scenario.start);
  }

  TrajectoryLog log;
  log.tick_rate = options.tick_rate;
  log.samples.reserve(scenario.ticks + 1);
  log.samples.push_back({0.0, scenario.start, scenario.start, scenario.start, 0, SolveStatus::Optimal});

  DesiredGenerator generator(scenario, *model);
  for (std::size_t k = 1; k <= scenario.ticks; ++k) {
    const Vector3d target = generator.next(loop);
    const TickResult r = loop.step(target);
    if (monitor) monitor->check(r.tick, r.constrained);
    log.samples.push_back({static_cast<double>(k) / options.tick_rate, target, r.proxy, r.constrained,
                           r.constraints.constraints.size(), r.solution.status});
    if (options.on_tick) options.on_tick(r);
  }
  return log;
}

double default_radius(const TriangleMesh& mesh) { return 0.04 * mesh.bbox_diagonal(); }

ScriptedScenario standard_scenario(const MeshModel& model, GeneratorKind generator, std::uint64_t seed,
                                   std::size_t ticks, double step_bound) {
  const TriangleMesh& mesh = model.mesh;
  ScriptedScenario sc;
  sc.mesh_id = model.id;
  sc.generator = generator;
  sc.seed = seed;
  sc.ticks = ticks;
  sc.step_bound = step_bound;

  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(generator) + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DistanceOracle oracle(mesh);
  const double offset = 2.0 * step_bound;

  // Convex edges, for orbiting.
  std::vector<std::pair<TriangleId, int>> convex;
  if (generator == GeneratorKind::OrbitEdge) {
    for (TriangleId t = 0; t < mesh.triangle_count(); ++t) {
      for (int e = 0; e < 3; ++e) {
        const TriangleId nb = mesh.neighbor(t, e);
        if (nb == kNoTriangle || nb < t) continue;
        const Triangle& tri = mesh.triangle(t);
        if (edge_convexity(mesh, t, nb, {tri[e], tri[(e + 1) % 3]}) == Convexity::Convex) convex.emplace_back(t, e);
      }
    }
  }

  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector3d p;
    Vector3d n;
    if (!convex.empty()) {
      const auto [t, e] = convex[static_cast<std::size_t>(u(rng) * static_cast<double>(convex.size())) % convex.size()];
      const Vector3d a = mesh.corner(t, e);
      const Vector3d b = mesh.corner(t, (e + 1) % 3);
      p = 0.5 * (a + b);
      n = (mesh.face_normal(t) + mesh.face_normal(mesh.neighbor(t, e))).normalized();
      sc.axis = (b - a).normalized();
    } else {
      const auto t = static_cast<TriangleId>(static_cast<std::size_t>(u(rng) * static_cast<double>(mesh.triangle_count())) %
                                             mesh.triangle_count());
      double b1 = u(rng);
      double b2 = u(rng);
      if (b1 + b2 > 1.0) {
        b1 = 1.0 - b1;
        b2 = 1.0 - b2;
      }
      p = mesh.corner(t, 0) + b1 * (mesh.corner(t, 1) - mesh.corner(t, 0)) + b2 * (mesh.corner(t, 2) - mesh.corner(t, 0));
      n = mesh.face_normal(t);
    }
    const Vector3d start = p + offset * n;
    if (oracle.signed_distance(start) > 0.5 * offset) {
      sc.start = start;
      break;
    }
    if (attempt == 999) throw Error("no outside start position found for mesh '" + model.id + "'");
  }

  switch (generator) {
    case GeneratorKind::PushNormal:
      sc.retract_after = ticks * 3 / 4;
      break;
    case GeneratorKind::SlideTangent:
      sc.clearance = -step_bound;  // keep pressing into the surface while sliding
      break;
    case GeneratorKind::OrbitEdge:
      sc.clearance = 0.0;
      break;
    case GeneratorKind::RandomWalk:
    case GeneratorKind::Waypoints:
      break;
  }
  return sc;
}

}  // namespace meshvf
