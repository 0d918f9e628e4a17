#pragma once

#include <Eigen/Dense>

namespace wpcn {

/// minimize c^T x  subject to  A_ineq x <= b_ineq,  A_eq x = b_eq,  x >= 0.
///
/// Rows of the wrong sense can be expressed by negation; `add_ge` does that.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq;
  Eigen::VectorXd eq_rhs;

  explicit LpProblem(Eigen::Index num_vars = 0)
      : objective(Eigen::VectorXd::Zero(num_vars)),
        ineq(0, num_vars),
        ineq_rhs(0),
        eq(0, num_vars),
        eq_rhs(0) {}

  Eigen::Index num_vars() const { return objective.size(); }

  void add_le(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
  void add_ge(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) { add_le(-row, -rhs); }
  void add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;  // a basic feasible point when optimal
  double objective = 0.0;
  int pivots = 0;
};

/// Two-phase dense tableau simplex: Dantzig pricing with a fallback to
/// Bland's anti-cycling rule on runs of degenerate pivots.
/// Intended for small dense problems (a handful of rows).
LpSolution solve_lp(const LpProblem& problem);

}  // namespace wpcn
