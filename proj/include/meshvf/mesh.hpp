#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "meshvf/types.hpp"

namespace meshvf {

/// Triangles with area below this (mm^2) are dropped at load.
inline constexpr double kDegenerateArea = 1e-12;

/// Soup vertices closer than this fraction of the bounding-box diagonal are welded.
inline constexpr double kWeldRelativeTolerance = 1e-6;

/// Indexed triangle surface with per-face normals and edge adjacency.
///
/// Immutable after construction. Local edge `e` of triangle `t` runs from
/// `triangle(t)[e]` to `triangle(t)[(e + 1) % 3]`.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  /// Builds a mesh from indexed data. Degenerate faces (area < kDegenerateArea or
  /// repeated indices) are dropped and counted; unreferenced vertices are removed.
  /// Throws DegenerateMeshError if nothing survives, NonManifoldError on an edge
  /// shared by three or more faces.
  static TriangleMesh from_indexed(std::vector<Vector3d> vertices, std::vector<Triangle> triangles);

  /// Builds a mesh from a triangle soup (three consecutive corners per face),
  /// welding coincident corners first.
  static TriangleMesh from_soup(std::span<const Vector3d> corners);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  const std::vector<Vector3d>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vector3d>& face_normals() const { return normals_; }

  const Vector3d& vertex(VertexId v) const { return vertices_[v]; }
  const Triangle& triangle(TriangleId t) const { return triangles_[t]; }
  const Vector3d& face_normal(TriangleId t) const { return normals_[t]; }

  /// Corner `k` of triangle `t`.
  const Vector3d& corner(TriangleId t, int k) const { return vertices_[triangles_[t][k]]; }

  /// Triangle across local edge `edge` of `t`, or kNoTriangle on a boundary edge.
  TriangleId neighbor(TriangleId t, int edge) const { return neighbors_[3 * t + edge]; }

  /// Local edge index of `neighbor(t, edge)` that coincides with that edge.
  int neighbor_edge(TriangleId t, int edge) const;

  std::span<const TriangleId> incident_triangles(VertexId v) const {
    return {incidence_.data() + incidence_offsets_[v], incidence_.data() + incidence_offsets_[v + 1]};
  }

  std::size_t edge_count() const { return edge_count_; }
  std::size_t boundary_edge_count() const { return boundary_edges_; }
  bool is_closed() const { return boundary_edges_ == 0; }

  /// Faces removed as degenerate during construction.
  std::size_t dropped_degenerate() const { return dropped_degenerate_; }

  const Eigen::AlignedBox3d& bounds() const { return bounds_; }
  double bbox_diagonal() const { return bounds_.isEmpty() ? 0.0 : bounds_.diagonal().norm(); }

  /// Angle-weighted pseudonormal at a vertex.
  Vector3d vertex_normal(VertexId v) const;

 private:
  void build();

  std::vector<Vector3d> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vector3d> normals_;
  std::vector<TriangleId> neighbors_;
  std::vector<TriangleId> incidence_;
  std::vector<std::size_t> incidence_offsets_;
  std::size_t edge_count_ = 0;
  std::size_t boundary_edges_ = 0;
  std::size_t dropped_degenerate_ = 0;
  Eigen::AlignedBox3d bounds_;
};

/// The triangle sharing local edge `edge` of `tri` (zero or one entries).
std::vector<TriangleId> adjacent_triangles(const TriangleMesh& mesh, TriangleId tri, int edge);

struct ValidationReport {
  std::size_t boundary = 0;
  std::size_t non_manifold = 0;
  std::size_t flipped = 0;

  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate(const TriangleMesh& mesh);

/// Validates raw indexed data without building a mesh; reports non-manifold
/// edges instead of throwing.
ValidationReport validate(std::span<const Triangle> triangles);

enum class MeshFormat { BinaryStl, AsciiObj, AsciiPly };

/// Picks the format from the file extension (.stl, .obj, .ply). Throws ParseError otherwise.
MeshFormat format_from_extension(const std::filesystem::path& path);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

TriangleMesh parse_binary_stl(std::string_view bytes);
TriangleMesh parse_obj(std::string_view text);
TriangleMesh parse_ply(std::string_view text);

std::string to_binary_stl(const TriangleMesh& mesh);
std::string to_obj(const TriangleMesh& mesh);
std::string to_ply(const TriangleMesh& mesh);

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace meshvf
