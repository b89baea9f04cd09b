#include "meshvf/motion_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace meshvf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kViolationTolerance = 1e-12;

struct CartesianResult {
  Vector3d x = Vector3d::Zero();
  std::vector<std::size_t> active;
  std::vector<double> multipliers;
  std::size_t iterations = 0;
  bool capped = false;
};

Eigen::MatrixXd active_matrix(const std::vector<ConstraintRow>& rows, const std::vector<std::size_t>& active) {
  Eigen::MatrixXd n(3, static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) n.col(static_cast<Eigen::Index>(j)) = rows[active[j]].a;
  return n;
}

Eigen::VectorXd solve_gram(const Eigen::MatrixXd& n, const Eigen::VectorXd& rhs) {
  Eigen::MatrixXd gram = n.transpose() * n;
  gram.diagonal().array() += kActiveSetRegularization;
  return gram.ldlt().solve(rhs);
}

double violation(const ConstraintRow& row, const Vector3d& x) { return row.a.dot(x) - row.b; }

// Unregularised projection onto the equality set of `active`: minimum-norm
// correction by complete orthogonal decomposition, multipliers by QR.
void exact_projection(const Vector3d& d, const std::vector<ConstraintRow>& rows, const std::vector<std::size_t>& active,
                      Vector3d& x, Eigen::VectorXd& u) {
  const Eigen::MatrixXd n = active_matrix(rows, active);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j)
    rhs[static_cast<Eigen::Index>(j)] = rows[active[j]].b - rows[active[j]].a.dot(d);
  const Eigen::MatrixXd nt = n.transpose();
  const Vector3d dx = nt.completeOrthogonalDecomposition().solve(rhs);
  x = d + dx;
  u = n.colPivHouseholderQr().solve(dx);
}

// Equality-constrained projection onto the rows in `active`; accepted only if
// it satisfies every KKT condition of the full problem.
bool try_working_set(const Vector3d& d, const std::vector<ConstraintRow>& rows, const std::vector<std::size_t>& active,
                     CartesianResult& out) {
  Vector3d x = d;
  Eigen::VectorXd u;
  if (!active.empty()) {
    exact_projection(d, rows, active, x, u);
    if ((u.array() < -kViolationTolerance).any()) return false;
    u = u.cwiseMax(0.0);
  }
  for (const ConstraintRow& row : rows)
    if (violation(row, x) < -kViolationTolerance) return false;
  out.x = x;
  out.active = active;
  out.multipliers.assign(u.data(), u.data() + u.size());
  out.iterations = 1;
  return true;
}

// Goldfarb-Idnani dual active-set method with identity Hessian: starts at the
// unconstrained minimiser and repeatedly adds the most violated row, dropping
// rows whose multipliers would turn negative.
CartesianResult goldfarb_idnani(const Vector3d& d, const std::vector<ConstraintRow>& rows) {
  CartesianResult res;
  res.x = d;
  std::vector<std::size_t>& active = res.active;
  std::vector<double>& u = res.multipliers;
  const std::size_t cap = std::max<std::size_t>(10 * rows.size(), 1);
  std::vector<bool> in_active(rows.size(), false);

  while (true) {
    std::size_t p = rows.size();
    double worst = -kViolationTolerance;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (in_active[i]) continue;
      const double norm = rows[i].a.norm();
      if (norm == 0.0) continue;
      const double s = violation(rows[i], res.x) / norm;
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p == rows.size()) return res;

    double up = 0.0;
    while (true) {
      if (++res.iterations > cap) {
        res.capped = true;
        return res;
      }
      const ConstraintRow& row = rows[p];
      Vector3d z = row.a;
      Eigen::VectorXd r;
      if (!active.empty()) {
        const Eigen::MatrixXd n = active_matrix(rows, active);
        r = solve_gram(n, n.transpose() * row.a);
        z = row.a - n * r;
      }
      const double zz = z.squaredNorm();
      const double t2 = zz > 1e-20 * row.a.squaredNorm() ? (row.b - row.a.dot(res.x)) / z.dot(row.a) : kInf;
      double t1 = kInf;
      std::size_t drop = active.size();
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        if (r[j] > 0.0) {
          const double ratio = u[static_cast<std::size_t>(j)] / r[j];
          if (ratio < t1) {
            t1 = ratio;
            drop = static_cast<std::size_t>(j);
          }
        }
      }
      const double t = std::min(t1, t2);
      if (t == kInf) throw InfeasibleError("constraint rows admit no feasible motion");

      for (Eigen::Index j = 0; j < r.size(); ++j) u[static_cast<std::size_t>(j)] -= t * r[j];
      up += t;
      if (t2 < kInf) res.x += t * z;

      if (t2 <= t1) {
        active.push_back(p);
        u.push_back(up);
        in_active[p] = true;
        break;
      }
      in_active[active[drop]] = false;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      u.erase(u.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
}

}  // namespace

std::string_view to_string(SolveStatus s) { return s == SolveStatus::Optimal ? "Optimal" : "FallbackZero"; }

std::vector<ConstraintRow> constraint_rows(const ActiveConstraintSet& set) {
  std::vector<ConstraintRow> rows;
  rows.reserve(set.constraints.size());
  for (const PlaneConstraint& c : set.constraints)
    rows.push_back({c.normal, -c.normal.dot(set.tool_position - c.point)});
  return rows;
}

double kkt_residual(const MotionProblem& problem, const MotionSolution& solution) {
  const Vector3d& x = solution.cartesian_increment;
  Vector3d stationarity = x - problem.desired;
  double worst = 0.0;
  for (std::size_t j = 0; j < solution.active_rows.size(); ++j) {
    const ConstraintRow& row = problem.rows[solution.active_rows[j]];
    const double u = solution.multipliers[j];
    stationarity -= u * row.a;
    worst = std::max(worst, -u);
    worst = std::max(worst, std::abs(u * violation(row, x)));
  }
  worst = std::max(worst, stationarity.norm());
  for (const ConstraintRow& row : problem.rows) worst = std::max(worst, -violation(row, x));
  return worst;
}

MotionSolution MotionSolver::solve(const MotionProblem& problem) {
  const Eigen::Index n = problem.jacobian.size() == 0 ? 3 : problem.jacobian.cols();
  Eigen::MatrixXd jjt;
  if (problem.jacobian.size() != 0) {
    if (problem.jacobian.rows() != 3 || problem.jacobian.cols() < 3) throw Error("jacobian must be 3 x n with n >= 3");
    jjt = problem.jacobian * problem.jacobian.transpose();
    if (Eigen::FullPivLU<Eigen::MatrixXd>(jjt).rank() < 3) throw Error("jacobian must have full row rank 3");
  }
  for (const ConstraintRow& row : problem.rows)
    if (!row.a.allFinite() || !std::isfinite(row.b)) throw Error("constraint rows must be finite");
  if (!problem.desired.allFinite()) throw Error("desired increment must be finite");

  // Warm start: reuse rows whose normals match the previous active set.
  CartesianResult res;
  last_warm_ = false;
  std::vector<std::size_t> guess;
  for (const Vector3d& w : warm_normals_) {
    for (std::size_t i = 0; i < problem.rows.size(); ++i) {
      if (std::find(guess.begin(), guess.end(), i) != guess.end()) continue;
      if ((problem.rows[i].a - w).norm() < 1e-9) {
        guess.push_back(i);
        break;
      }
    }
  }
  if (!guess.empty()) {
    std::sort(guess.begin(), guess.end());
    const Eigen::MatrixXd g = active_matrix(problem.rows, guess);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(g).rank() < static_cast<Eigen::Index>(guess.size())) guess.clear();
  }
  if (!guess.empty() && try_working_set(problem.desired, problem.rows, guess, res)) {
    last_warm_ = true;
  } else {
    res = goldfarb_idnani(problem.desired, problem.rows);
    // The dual updates accumulate rounding; re-derive the point from the final
    // active set and keep it when it still certifies.
    if (!res.capped && !res.active.empty()) {
      Vector3d x;
      Eigen::VectorXd u;
      exact_projection(problem.desired, problem.rows, res.active, x, u);
      const bool feasible = std::all_of(problem.rows.begin(), problem.rows.end(), [&](const ConstraintRow& r) {
        return violation(r, x) >= -kViolationTolerance;
      });
      if (feasible && (u.array() >= -kViolationTolerance).all()) {
        res.x = x;
        u = u.cwiseMax(0.0);
        res.multipliers.assign(u.data(), u.data() + u.size());
      }
    }
  }

  MotionSolution sol;
  if (res.capped) {
    const bool zero_safe = std::all_of(problem.rows.begin(), problem.rows.end(),
                                       [](const ConstraintRow& r) { return r.b <= kKktTolerance; });
    if (!zero_safe) throw MaxIterationsError("active-set iteration cap reached and zero motion is not feasible");
    warm_normals_.clear();
    sol.joint_increment = Eigen::VectorXd::Zero(n);
    sol.cartesian_increment.setZero();
    sol.iterations = res.iterations;
    sol.status = SolveStatus::FallbackZero;
    return sol;
  }

  // Report the active set in ascending row order.
  std::vector<std::size_t> perm(res.active.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return res.active[a] < res.active[b]; });
  for (std::size_t k : perm) {
    sol.active_rows.push_back(res.active[k]);
    sol.multipliers.push_back(res.multipliers[k]);
  }
  sol.cartesian_increment = res.x;
  sol.iterations = res.iterations;
  sol.status = SolveStatus::Optimal;

  for (const ConstraintRow& row : problem.rows)
    if (violation(row, res.x) < -kKktTolerance) throw InfeasibleError("solution violates a constraint row");

  if (problem.jacobian.size() == 0) {
    sol.joint_increment = res.x;
  } else {
    // Minimum-norm joint increment reaching the Cartesian optimum.
    sol.joint_increment = problem.jacobian.transpose() * jjt.ldlt().solve(res.x);
  }

  warm_normals_.clear();
  for (std::size_t i : sol.active_rows) warm_normals_.push_back(problem.rows[i].a);
  return sol;
}

MotionSolution solve_motion(const MotionProblem& problem) {
  MotionSolver solver;
  return solver.solve(problem);
}

}  // namespace meshvf
