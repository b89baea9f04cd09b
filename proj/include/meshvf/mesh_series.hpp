#pragma once

#include <cstddef>
#include <vector>

#include "meshvf/mesh.hpp"

namespace meshvf {

class DecimationFailure : public Error {
 public:
  using Error::Error;
};

/// Shortest-edge-first edge collapse to at most `target_triangles` faces.
///
/// Collapses go to the edge midpoint and are skipped when they would break
/// the link condition (keeping the mesh manifold) or flip a surviving face.
/// Throws DecimationFailure when no legal collapse remains above the target.
TriangleMesh decimate(const TriangleMesh& mesh, std::size_t target_triangles);

enum class SeriesMode { Subdivide, Decimate };

/// `levels` meshes starting at `base`: each subdivision level has four times
/// the faces of the previous one, each decimation level half.
std::vector<TriangleMesh> generate_mesh_series(const TriangleMesh& base, std::size_t levels, SeriesMode mode);

}  // namespace meshvf
