#include "meshvf/pd_tree.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace meshvf {

namespace {

thread_local std::size_t g_visited = 0;

// Flip so the largest-magnitude component is positive (first index wins ties).
Vector3d canonical_sign(Vector3d v) {
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(v[k]) > std::abs(v[best]) + 1e-12) best = k;
  return v[best] < 0 ? Vector3d(-v) : v;
}

Matrix3d frame_from_covariance(const Matrix3d& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> solver(cov);
  // Eigen returns ascending eigenvalues; the node x-axis is the largest.
  Vector3d e0 = canonical_sign(solver.eigenvectors().col(2));
  Vector3d e1 = solver.eigenvectors().col(1);
  e1 = canonical_sign((e1 - e1.dot(e0) * e0).normalized());
  Matrix3d frame;
  frame.row(0) = e0.transpose();
  frame.row(1) = e1.transpose();
  frame.row(2) = e0.cross(e1).normalized().transpose();
  return frame;
}

}  // namespace

Matrix3d principal_frame(const std::vector<Vector3d>& points) {
  Vector3d mean = Vector3d::Zero();
  for (const Vector3d& p : points) mean += p;
  mean /= static_cast<double>(std::max<std::size_t>(points.size(), 1));
  Matrix3d cov = Matrix3d::Zero();
  for (const Vector3d& p : points) cov += (p - mean) * (p - mean).transpose();
  return frame_from_covariance(cov);
}

PDTree PDTree::build(const TriangleMesh& mesh, std::size_t leaf_capacity) {
  if (leaf_capacity < 1) throw Error("leaf capacity must be at least 1");
  PDTree tree;
  tree.leaf_capacity_ = leaf_capacity;
  const std::size_t n = mesh.triangle_count();
  tree.order_.resize(n);
  std::iota(tree.order_.begin(), tree.order_.end(), TriangleId{0});

  std::vector<Vector3d> centroid(n);
  for (TriangleId t = 0; t < n; ++t) centroid[t] = (mesh.corner(t, 0) + mesh.corner(t, 1) + mesh.corner(t, 2)) / 3.0;

  std::vector<double> key(n);
  struct Pending {
    std::uint32_t node;
    std::uint32_t begin;
    std::uint32_t end;
  };
  tree.nodes_.reserve(2 * (n / leaf_capacity + 1));
  tree.nodes_.emplace_back();
  std::vector<Pending> stack{{0, 0, static_cast<std::uint32_t>(n)}};

  while (!stack.empty()) {
    const Pending job = stack.back();
    stack.pop_back();
    const auto first = tree.order_.begin() + job.begin;
    const auto last = tree.order_.begin() + job.end;
    const double count = static_cast<double>(job.end - job.begin);

    Vector3d mean = Vector3d::Zero();
    for (auto it = first; it != last; ++it) mean += centroid[*it];
    mean /= count;
    Matrix3d cov = Matrix3d::Zero();
    for (auto it = first; it != last; ++it) {
      const Vector3d d = centroid[*it] - mean;
      cov.noalias() += d * d.transpose();
    }
    const Matrix3d frame = frame_from_covariance(cov / count);

    Vector3d lower = Vector3d::Constant(std::numeric_limits<double>::infinity());
    Vector3d upper = -lower;
    for (auto it = first; it != last; ++it) {
      for (int c = 0; c < 3; ++c) {
        const Vector3d local = frame * mesh.corner(*it, c);
        lower = lower.cwiseMin(local);
        upper = upper.cwiseMax(local);
      }
    }
    {
      Node& node = tree.nodes_[job.node];
      node.frame = frame;
      node.lower = lower;
      node.upper = upper;
      node.begin = job.begin;
      node.end = job.end;
    }

    if (job.end - job.begin <= leaf_capacity) continue;

    const Vector3d axis = frame.row(0).transpose();
    for (auto it = first; it != last; ++it) key[*it] = axis.dot(centroid[*it]);
    const std::uint32_t mid = job.begin + (job.end - job.begin) / 2;
    std::nth_element(first, tree.order_.begin() + mid, last, [&](TriangleId a, TriangleId b) {
      return key[a] < key[b] || (key[a] == key[b] && a < b);
    });

    const auto left = static_cast<std::uint32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    tree.nodes_[job.node].left = left;
    tree.nodes_[job.node].right = left + 1;
    stack.push_back({left + 1, mid, job.end});
    stack.push_back({left, job.begin, mid});
  }

  tree.packed_.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) tree.packed_[3 * i + c] = mesh.corner(tree.order_[i], c);
  return tree;
}

std::vector<ClosestPointResult> PDTree::query(const MotionSphere& sphere) const {
  std::vector<ClosestPointResult> out;
  query(sphere, out);
  return out;
}

void PDTree::query(const MotionSphere& sphere, std::vector<ClosestPointResult>& out) const {
  out.clear();
  g_visited = 0;
  if (nodes_.empty()) return;
  const double r = sphere.radius;
  const double r2 = r * r;
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    ++g_visited;
    const Vector3d local = node.frame * sphere.center;
    const Vector3d excess = (node.lower - local).cwiseMax(local - node.upper).cwiseMax(0.0);
    if (excess.squaredNorm() > r2) continue;
    if (!node.is_leaf()) {
      stack[top++] = node.right;
      stack[top++] = node.left;
      continue;
    }
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      ClosestPointResult cp =
          closest_point_on_triangle<double>(sphere.center, packed_[3 * i], packed_[3 * i + 1], packed_[3 * i + 2]);
      if (cp.distance <= r) {
        cp.triangle = order_[i];
        out.push_back(cp);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ClosestPointResult& a, const ClosestPointResult& b) { return a.triangle < b.triangle; });
}

std::size_t PDTree::last_visited_nodes() { return g_visited; }

PDTree build_pdtree(const TriangleMesh& mesh, std::size_t leaf_capacity) { return PDTree::build(mesh, leaf_capacity); }

std::vector<ClosestPointResult> query_sphere(const PDTree& tree, const TriangleMesh& mesh, const MotionSphere& sphere) {
  if (tree.triangle_count() != mesh.triangle_count()) throw Error("PD-tree was built from a different mesh");
  return tree.query(sphere);
}

}  // namespace meshvf
