#include "wpcn/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "wpcn/errors.hpp"

namespace wpcn {

void LpProblem::add_le(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
  if (row.size() != num_vars()) throw DomainError("LpProblem: row has the wrong length");
  ineq.conservativeResize(ineq.rows() + 1, num_vars());
  ineq.row(ineq.rows() - 1) = row;
  ineq_rhs.conservativeResize(ineq_rhs.size() + 1);
  ineq_rhs(ineq_rhs.size() - 1) = rhs;
}

void LpProblem::add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
  if (row.size() != num_vars()) throw DomainError("LpProblem: row has the wrong length");
  eq.conservativeResize(eq.rows() + 1, num_vars());
  eq.row(eq.rows() - 1) = row;
  eq_rhs.conservativeResize(eq_rhs.size() + 1);
  eq_rhs(eq_rhs.size() - 1) = rhs;
}

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr int kDegenerateLimit = 10;

class Tableau {
 public:
  // rows x (cols + 1); the last column holds the right-hand side
  Eigen::MatrixXd t;
  std::vector<Eigen::Index> basis;
  int pivots = 0;

  Eigen::Index rows() const { return t.rows(); }
  Eigen::Index cols() const { return t.cols() - 1; }
  double rhs(Eigen::Index i) const { return t(i, t.cols() - 1); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    t(r, c) = 1.0;
    basis[static_cast<std::size_t>(r)] = c;
    ++pivots;
  }

  // Reduced costs of all columns for the given cost vector.
  Eigen::RowVectorXd reduced_costs(const Eigen::VectorXd& cost) const {
    Eigen::RowVectorXd rc = cost.transpose();
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = cost(basis[static_cast<std::size_t>(i)]);
      if (cb != 0.0) rc -= cb * t.row(i).head(cols());
    }
    return rc;
  }

  // Primal simplex iterations. Pricing is Dantzig's rule; after a run of
  // degenerate pivots it switches to Bland's rule until the objective moves
  // again, which rules out cycling. Columns with allowed[j] == false never
  // enter. Returns false when unbounded.
  bool optimize(const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
    const int max_pivots = 50000 + 50 * static_cast<int>(rows() * cols());
    Eigen::RowVectorXd rc = reduced_costs(cost);
    int degenerate_run = 0;
    for (int it = 0; it < max_pivots; ++it) {
      const bool bland = degenerate_run >= kDegenerateLimit;
      Eigen::Index enter = -1;
      double most_negative = -kCostTol;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (!allowed[static_cast<std::size_t>(j)] || rc(j) >= most_negative) continue;
        enter = j;
        if (bland) break;
        most_negative = rc(j);
      }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        const double a = t(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        const bool tie =
            leave >= 0 && std::abs(ratio - best_ratio) <= 1e-14 * std::max(1.0, best_ratio);
        if (ratio < best_ratio && !tie) {
          best_ratio = ratio;
          leave = i;
        } else if (tie && basis[static_cast<std::size_t>(i)] <
                              basis[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate_run = best_ratio * std::abs(rc(enter)) <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      const double f = rc(enter);
      rc -= f * t.row(leave).head(cols());
      rc(enter) = 0.0;
    }
    throw ConvergenceError("solve_lp: pivot limit exceeded");
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m_le = p.ineq.rows();
  const Eigen::Index m_eq = p.eq.rows();
  const Eigen::Index m = m_le + m_eq;
  if (p.ineq_rhs.size() != m_le || p.eq_rhs.size() != m_eq || p.ineq.cols() != n ||
      p.eq.cols() != n)
    throw DomainError("solve_lp: inconsistent problem dimensions");
  if (!p.objective.allFinite() || !p.ineq.allFinite() || !p.eq.allFinite() ||
      !p.ineq_rhs.allFinite() || !p.eq_rhs.allFinite())
    throw DomainError("solve_lp: non-finite coefficients");

  // Column layout: [structural | slack/surplus (one per inequality) | artificials]
  std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
  Eigen::Index num_art = 0;
  for (Eigen::Index i = 0; i < m_le; ++i)
    if (p.ineq_rhs(i) < 0) needs_art[static_cast<std::size_t>(i)] = true;
  for (Eigen::Index i = 0; i < m_eq; ++i) needs_art[static_cast<std::size_t>(m_le + i)] = true;
  for (bool b : needs_art) num_art += b ? 1 : 0;

  const Eigen::Index cols = n + m_le + num_art;
  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m, cols + 1);
  tab.basis.assign(static_cast<std::size_t>(m), -1);

  Eigen::Index art = n + m_le;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool is_le = i < m_le;
    double sign = 1.0;
    double b = is_le ? p.ineq_rhs(i) : p.eq_rhs(i - m_le);
    if (b < 0) sign = -1.0;
    tab.t.row(i).head(n) = sign * (is_le ? p.ineq.row(i) : p.eq.row(i - m_le));
    if (is_le) tab.t(i, n + i) = sign;
    tab.t(i, cols) = sign * b;
    if (needs_art[static_cast<std::size_t>(i)]) {
      tab.t(i, art) = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = art++;
    } else {
      tab.basis[static_cast<std::size_t>(i)] = n + i;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);

  if (num_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(num_art).setOnes();
    if (!tab.optimize(phase1, allowed)) throw ConvergenceError("solve_lp: phase 1 reported unbounded");
    double infeas = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (tab.basis[static_cast<std::size_t>(i)] >= n + m_le) infeas += std::max(tab.rhs(i), 0.0);
    if (infeas > kFeasTol) {
      sol.status = LpStatus::infeasible;
      sol.pivots = tab.pivots;
      return sol;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] < n + m_le) continue;
      for (Eigen::Index j = 0; j < n + m_le; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (Eigen::Index j = n + m_le; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(n) = p.objective;
  if (!tab.optimize(cost, allowed)) {
    sol.status = LpStatus::unbounded;
    sol.pivots = tab.pivots;
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis[static_cast<std::size_t>(i)];
    if (b < n) sol.x(b) = std::max(tab.rhs(i), 0.0);
  }
  sol.objective = p.objective.dot(sol.x);
  sol.pivots = tab.pivots;
  return sol;
}

}  // namespace wpcn
