#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "meshvf/constraints.hpp"

namespace meshvf {

/// KKT residual bound (mm) certified by every Optimal solution.
inline constexpr double kKktTolerance = 1e-8;

/// Regularisation added to active-set normal matrices.
inline constexpr double kActiveSetRegularization = 1e-12;

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class MaxIterationsError : public Error {
 public:
  using Error::Error;
};

/// One row of A dx >= b.
struct ConstraintRow {
  Vector3d a = Vector3d::Zero();
  double b = 0.0;
};

/// min ||J dq - desired|| subject to A J dq >= b.
struct MotionProblem {
  Vector3d desired = Vector3d::Zero();
  Eigen::MatrixXd jacobian;  // 3 x n; empty means the 3x3 identity
  std::vector<ConstraintRow> rows;
};

enum class SolveStatus { Optimal, FallbackZero };

std::string_view to_string(SolveStatus s);

struct MotionSolution {
  Eigen::VectorXd joint_increment;
  Vector3d cartesian_increment = Vector3d::Zero();
  std::vector<std::size_t> active_rows;  // ascending
  std::vector<double> multipliers;       // aligned with active_rows
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
};

/// Rows a = n, b = -n . (x - p) for every constraint, at the set's tool position.
std::vector<ConstraintRow> constraint_rows(const ActiveConstraintSet& set);

/// Largest violation among stationarity, primal feasibility, dual feasibility
/// and complementary slackness for `solution` of `problem` (Cartesian space).
double kkt_residual(const MotionProblem& problem, const MotionSolution& solution);

/// Dense dual active-set solver for the per-tick projection problem.
///
/// Holds warm-start state (the previous tick's active normals), so one instance
/// belongs to one control session.
class MotionSolver {
 public:
  MotionSolution solve(const MotionProblem& problem);

  /// Forgets the warm-start state.
  void reset() { warm_normals_.clear(); }

  /// Whether the last solve was finished by the warm-start guess alone.
  bool last_solve_warm() const { return last_warm_; }

 private:
  std::vector<Vector3d> warm_normals_;
  bool last_warm_ = false;
};

/// Cold solve with a fresh solver.
MotionSolution solve_motion(const MotionProblem& problem);

}  // namespace meshvf
