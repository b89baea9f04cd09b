#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace meshvf {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using Vector3d = Vector3<double>;
using Matrix3d = Matrix3<double>;

using VertexId = std::uint32_t;
using TriangleId = std::uint32_t;

/// Vertex-index triple, counterclockwise when viewed from outside.
using Triangle = std::array<VertexId, 3>;

inline constexpr TriangleId kNoTriangle = static_cast<TriangleId>(-1);

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DegenerateMeshError : public Error {
 public:
  using Error::Error;
};

class DegenerateTriangleError : public Error {
 public:
  using Error::Error;
};

class NonManifoldError : public Error {
 public:
  NonManifoldError(VertexId a, VertexId b, std::size_t incident)
      : Error("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) + ") with " +
              std::to_string(incident) + " incident triangles"),
        edge_{a, b} {}

  std::array<VertexId, 2> edge() const { return edge_; }

 private:
  std::array<VertexId, 2> edge_;
};

class NotAdjacentError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshvf
