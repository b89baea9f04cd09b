#pragma once

// Two-triangle wedges for the local-case enumeration, with an expected-output
// classifier computed from 2D cross-section geometry alone.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "meshvf/constraints.hpp"
#include "meshvf/mesh.hpp"

namespace wedge {

using meshvf::ConstraintCondition;
using meshvf::Vector3d;

enum class Kind { Convex, Concave };

// Ridge (convex) or valley (concave) edge along y through the origin; the far
// vertices sit at len * u_i in the xz-plane, so a tool at y = 0 sees the
// cross-section of the figures.
struct Wedge {
  Kind kind;
  double angle;  // material angle (convex) or free angle (concave), radians
  double len;
  meshvf::TriangleMesh mesh;
  Vector3d u[2];  // in-plane direction of each face away from the edge
  Vector3d n[2];  // outward face normals
};

inline Wedge make(Kind kind, double angle, double len, double half_length = 20.0) {
  const double h = angle / 2.0;
  Wedge w{kind, angle, len, {}, {}, {}};
  if (kind == Kind::Convex) {
    w.u[0] = {-std::sin(h), 0, -std::cos(h)};
    w.u[1] = {std::sin(h), 0, -std::cos(h)};
    w.n[0] = {-std::cos(h), 0, std::sin(h)};
    w.n[1] = {std::cos(h), 0, std::sin(h)};
  } else {
    w.u[0] = {-std::sin(h), 0, std::cos(h)};
    w.u[1] = {std::sin(h), 0, std::cos(h)};
    w.n[0] = {std::cos(h), 0, std::sin(h)};
    w.n[1] = {-std::cos(h), 0, std::sin(h)};
  }
  std::vector<Vector3d> v = {{0, -half_length, 0}, {0, half_length, 0}, len * w.u[0], len * w.u[1]};
  std::vector<meshvf::Triangle> t = {{0, 1, 2}, {0, 1, 3}};
  for (int i = 0; i < 2; ++i) {
    auto& tri = t[static_cast<std::size_t>(i)];
    const Vector3d normal = (v[tri[1]] - v[tri[0]]).cross(v[tri[2]] - v[tri[0]]);
    if (normal.dot(w.n[i]) < 0) std::swap(tri[0], tri[1]);
  }
  w.mesh = meshvf::TriangleMesh::from_indexed(std::move(v), std::move(t));
  return w;
}

struct Expected {
  ConstraintCondition condition;
  Vector3d normal;
  Vector3d point;
  int triangle;
};

struct Case {
  std::string label;  // e.g. "convex-b", "concave-c"; empty when unclassified
  std::vector<Expected> constraints;
  bool undecided[2] = {false, false};  // triangle may add only a Boundary constraint
};

// Tool x in the y = 0 plane. Returns nullopt when x lies within `margin` of a
// region boundary or inside the material.
inline std::optional<Case> classify(const Wedge& w, const Vector3d& x, double margin = 1e-6) {
  double s[2], side[2];
  for (int i = 0; i < 2; ++i) {
    s[i] = w.u[i].dot(x);
    side[i] = w.n[i].dot(x);
    if (std::abs(s[i]) < margin || std::abs(side[i]) < margin || std::abs(s[i] - w.len) < margin) return std::nullopt;
  }
  const auto face = [&](int i, ConstraintCondition c) {
    return Expected{c, w.n[i], x - side[i] * w.n[i], i};
  };
  Case out;
  if (w.kind == Kind::Convex) {
    if (side[0] < 0 && side[1] < 0) return std::nullopt;  // inside the material
    if (s[0] >= w.len || s[1] >= w.len) return std::nullopt;
    if (s[0] < 0 && s[1] < 0) {
      out.label = "convex-c";
      out.constraints.push_back({ConstraintCondition::C2, x.normalized(), Vector3d::Zero(), 0});
      return out;
    }
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      if (s[i] > 0 && side[i] > 0) {
        if (s[j] < 0) {
          out.label = "convex-b";
        } else if (side[j] < 0) {
          out.label = "convex-a";
        } else {
          return out;  // unclassified: no figure covers it
        }
        out.constraints.push_back(face(i, ConstraintCondition::C1));
        return out;
      }
    }
    return out;
  }

  if (side[0] < 0 || side[1] < 0) return std::nullopt;  // inside the material
  enum State { Edge, In, Beyond };
  State st[2];
  for (int i = 0; i < 2; ++i) st[i] = s[i] < 0 ? Edge : (s[i] < w.len ? In : Beyond);
  const auto count = [&](State v) { return int(st[0] == v) + int(st[1] == v); };
  if (count(In) == 2) {
    out.label = "concave-a";
  } else if (count(In) == 1 && count(Edge) == 1) {
    out.label = "concave-b";
  } else if (count(Edge) == 1 && count(Beyond) == 1) {
    out.label = "concave-c";
  } else if (count(In) == 1 && count(Beyond) == 1) {
    out.label = "concave-d";
  } else if (count(Beyond) == 2) {
    out.label = "concave-e";
  } else {
    return out;
  }
  for (int i = 0; i < 2; ++i) {
    if (st[i] == In) out.constraints.push_back(face(i, ConstraintCondition::C1));
    if (st[i] == Edge) out.constraints.push_back({ConstraintCondition::C3, w.n[i], Vector3d::Zero(), i});
    if (st[i] == Beyond) out.undecided[i] = true;
  }
  return out;
}

// True when `got` holds exactly the expected constraints, plus at most
// Boundary-tagged face planes from undecided triangles.
inline bool matches(const Wedge& w, const Case& c, const meshvf::ActiveConstraintSet& got, std::string* why = nullptr,
                    double tol = 1e-9) {
  const auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const auto same = [&](const Expected& e, const meshvf::PlaneConstraint& p) {
    return e.condition == p.condition && static_cast<int>(p.source) == e.triangle &&
           (e.normal - p.normal).norm() <= tol && (e.point - p.point).norm() <= tol;
  };
  for (const Expected& e : c.constraints) {
    bool found = false;
    for (const auto& p : got.constraints) found = found || same(e, p);
    if (!found) return fail("missing " + std::string(meshvf::to_string(e.condition)) + " on T" + std::to_string(e.triangle + 1));
  }
  for (const auto& p : got.constraints) {
    bool expected = false;
    for (const Expected& e : c.constraints) expected = expected || same(e, p);
    if (expected) continue;
    const int t = static_cast<int>(p.source);
    if (p.condition == ConstraintCondition::Boundary && t >= 0 && t < 2 && c.undecided[t] &&
        (p.normal - w.n[t]).norm() <= tol)
      continue;
    return fail("unexpected " + std::string(meshvf::to_string(p.condition)) + " on T" + std::to_string(t + 1));
  }
  return true;
}

}  // namespace wedge
