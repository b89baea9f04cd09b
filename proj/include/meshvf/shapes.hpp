#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "meshvf/mesh.hpp"

namespace meshvf::shapes {

/// Axis-aligned cube, 8 vertices and 12 triangles.
TriangleMesh cube(double side = 20.0, const Vector3d& center = Vector3d::Zero());

/// Subdivided icosahedron projected onto a sphere; 20 * 4^levels triangles.
TriangleMesh icosphere(int levels = 2, double radius = 15.0);

/// Closed cylinder along z with fan-triangulated caps.
TriangleMesh cylinder(int segments = 32, double radius = 8.0, double height = 40.0);

TriangleMesh torus(int major_segments = 32, int minor_segments = 16, double major_radius = 15.0,
                   double minor_radius = 5.0);

/// Extruded gear profile: alternating root and tip arcs, star-shaped about the axis.
TriangleMesh gear(int teeth = 12, double root_radius = 14.0, double tip_radius = 18.0, double thickness = 8.0);

/// Extrusion along z of a counterclockwise simple polygon that is star-shaped
/// with respect to `kernel`; caps are fans from the kernel point.
TriangleMesh extrude(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& kernel, double height);

/// L-shaped prism (concave edges along the inner corner).
TriangleMesh l_block(double size = 20.0, double height = 10.0);

/// Plus-sign prism.
TriangleMesh cross_prism(double arm = 8.0, double width = 6.0, double height = 8.0);

/// Icosphere with smooth radial bumps: mixed convex and concave regions.
TriangleMesh blob(int levels = 3, double radius = 15.0, double amplitude = 0.15, std::uint64_t seed = 7);

/// Scanned-organ stand-in: 5,120 faces at a 40 mm radius.
TriangleMesh scan();

/// Flat open sheet in the z = 0 plane, normal +z, n x n quads split in two.
TriangleMesh plane_sheet(double size = 20.0, int n = 4);

/// Midpoint subdivision: every triangle becomes four.
TriangleMesh subdivide(const TriangleMesh& mesh);

/// Names accepted by make(): cube, icosphere, cylinder, torus, gear, lblock, cross, blob, scan.
std::vector<std::string> names();

/// Builds a named default shape. Throws Error for unknown names.
TriangleMesh make(const std::string& name);

}  // namespace meshvf::shapes
