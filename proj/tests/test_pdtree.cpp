#include <random>
#include <set>

#include <gtest/gtest.h>

#include "meshvf/mesh.hpp"
#include "meshvf/pd_tree.hpp"
#include "meshvf/shapes.hpp"

using namespace meshvf;

namespace {

std::vector<ClosestPointResult> brute_force(const TriangleMesh& m, const MotionSphere& s) {
  std::vector<ClosestPointResult> out;
  for (TriangleId t = 0; t < m.triangle_count(); ++t) {
    auto r = closest_point(m, t, s.center);
    if (r.distance <= s.radius) out.push_back(r);
  }
  return out;
}

// Dominant eigenvector of the centroid covariance by power iteration.
Vector3d dominant_axis(const TriangleMesh& m) {
  Vector3d mean = Vector3d::Zero();
  std::vector<Vector3d> c;
  for (TriangleId t = 0; t < m.triangle_count(); ++t) {
    c.push_back((m.corner(t, 0) + m.corner(t, 1) + m.corner(t, 2)) / 3.0);
    mean += c.back();
  }
  mean /= static_cast<double>(c.size());
  Matrix3d cov = Matrix3d::Zero();
  for (const Vector3d& p : c) cov += (p - mean) * (p - mean).transpose();
  Vector3d v(1, 1, 1);
  for (int i = 0; i < 200; ++i) v = (cov * v).normalized();
  return v;
}

void expect_partition(const PDTree& tree, std::size_t count) {
  std::multiset<TriangleId> seen;
  for (const auto& node : tree.nodes()) {
    if (!node.is_leaf()) continue;
    EXPECT_LE(node.end - node.begin, tree.leaf_capacity());
    for (auto i = node.begin; i < node.end; ++i) seen.insert(tree.triangle_order()[i]);
  }
  ASSERT_EQ(seen.size(), count);
  TriangleId expect = 0;
  for (TriangleId t : seen) EXPECT_EQ(t, expect++);
}

}  // namespace

TEST(PDTree, CubeLeafCapacityFourPartitions) {
  const TriangleMesh m = shapes::cube(2.0);
  const PDTree tree = build_pdtree(m, 4);
  expect_partition(tree, 12);
}

TEST(PDTree, SingleTriangleIsSingleLeaf) {
  const TriangleMesh m = TriangleMesh::from_indexed({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  const PDTree tree = build_pdtree(m);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_TRUE(tree.nodes()[0].is_leaf());
  EXPECT_EQ(query_sphere(tree, m, {{0.2, 0.2, 0.5}, 1.0}).size(), 1u);
}

TEST(PDTree, PartitionAndBoxContainmentOnAllShapes) {
  for (const std::string& name : shapes::names()) {
    const TriangleMesh m = shapes::make(name);
    const PDTree tree = build_pdtree(m);
    expect_partition(tree, m.triangle_count());
    for (const auto& node : tree.nodes()) {
      EXPECT_NEAR((node.frame * node.frame.transpose() - Matrix3d::Identity()).norm(), 0.0, 1e-9);
      for (auto i = node.begin; i < node.end; ++i)
        for (int k = 0; k < 3; ++k) {
          const Vector3d local = node.frame * m.corner(tree.triangle_order()[i], k);
          ASSERT_TRUE(((local - node.lower).array() >= -1e-9).all()) << name;
          ASSERT_TRUE(((node.upper - local).array() >= -1e-9).all()) << name;
        }
    }
  }
}

TEST(PDTree, ElongatedCylinderRootAxis) {
  const TriangleMesh m = shapes::cylinder(24, 3.0, 60.0);
  const PDTree tree = build_pdtree(m);
  const Vector3d root_axis = tree.nodes()[0].frame.row(0).transpose();
  const Vector3d oracle = dominant_axis(m);
  const double angle = std::acos(std::min(1.0, std::abs(root_axis.dot(Vector3d::UnitZ()))));
  EXPECT_LT(angle, 5.0 * M_PI / 180.0);
  EXPECT_GT(std::abs(root_axis.dot(oracle)), std::cos(5.0 * M_PI / 180.0));
}

TEST(PDTree, BuildIsDeterministic) {
  const TriangleMesh m = shapes::blob();
  const PDTree a = build_pdtree(m);
  const PDTree b = build_pdtree(m);
  EXPECT_EQ(a.triangle_order(), b.triangle_order());
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    EXPECT_EQ(a.nodes()[i].frame, b.nodes()[i].frame);
    EXPECT_EQ(a.nodes()[i].lower, b.nodes()[i].lower);
  }
}

TEST(QuerySphere, CubeTopFace) {
  const TriangleMesh m = shapes::cube(2.0);
  const PDTree tree = build_pdtree(m, 4);
  const MotionSphere s{{0, 0, 1.5}, 0.6};
  const auto hits = query_sphere(tree, m, s);
  const auto oracle = brute_force(m, s);
  ASSERT_EQ(hits.size(), 2u);
  ASSERT_EQ(oracle.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(hits[i].triangle, oracle[i].triangle);
    EXPECT_NEAR(m.face_normal(hits[i].triangle).z(), 1.0, 1e-12);
    EXPECT_LE((hits[i].point - Vector3d(0, 0, 1)).norm(), 1e-12);
  }
}

TEST(QuerySphere, LargeRadiusReturnsAllAndFarReturnsNone) {
  const TriangleMesh m = shapes::torus();
  const PDTree tree = build_pdtree(m);
  const double diam = m.bbox_diagonal();
  EXPECT_EQ(query_sphere(tree, m, {m.bounds().center(), diam}).size(), m.triangle_count());
  EXPECT_TRUE(query_sphere(tree, m, {m.bounds().center() + Vector3d(10 * diam, 0, 0), 0.01 * diam}).empty());
}

TEST(QuerySphere, MatchesBruteForceOnEveryShape) {
  std::mt19937_64 rng(11);
  for (const std::string& name : shapes::names()) {
    const TriangleMesh m = shapes::make(name);
    const PDTree tree = build_pdtree(m);
    const double diag = m.bbox_diagonal();
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    std::uniform_real_distribution<double> rad(0.001, 0.2);
    for (int k = 0; k < 200; ++k) {
      const MotionSphere s{m.bounds().center() + diag * Vector3d(u(rng), u(rng), u(rng)), diag * rad(rng)};
      const auto got = query_sphere(tree, m, s);
      const auto want = brute_force(m, s);
      ASSERT_EQ(got.size(), want.size()) << name;
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_EQ(got[i].triangle, want[i].triangle) << name;
        ASSERT_LE((got[i].point - want[i].point).norm(), 1e-9) << name;
      }
      // Same query again: identical output.
      const auto again = query_sphere(tree, m, s);
      ASSERT_EQ(again.size(), got.size());
      for (std::size_t i = 0; i < got.size(); ++i) ASSERT_EQ(again[i].point, got[i].point);
    }
  }
}

TEST(PrincipalFrame, OrthonormalRightHanded) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector3d> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(5 * g(rng), 2 * g(rng), 0.5 * g(rng));
  const Matrix3d f = principal_frame(pts);
  EXPECT_NEAR((f * f.transpose() - Matrix3d::Identity()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(f.determinant(), 1.0, 1e-12);
  EXPECT_GT(std::abs(f(0, 0)), 0.95);
  EXPECT_GT(std::abs(f(1, 1)), 0.95);
}
