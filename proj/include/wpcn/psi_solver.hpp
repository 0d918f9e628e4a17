#pragma once

// psi(rho): the minimum instantaneous transmit power ||x||^2 such that every
// user k receives at least rho_k of input power, |h_k x|^2 >= rho_k.
//
// The value is computed through the K-dimensional dual
//
//   max_{lambda >= 0} rho^T lambda   s.t.   ||B diag(lambda) B||_2 <= 1,
//   B = (H H^H)^{1/2},
//
// by a cutting-plane method: for every unit u the constraint implies the
// linear cut sum_k lambda_k |(B u)_k|^2 <= 1, and the top eigenvector of
// B diag(lambda) B at a master iterate yields the most violated one. Each
// master iterate gives an upper bound; scaling it back onto the feasible set
// gives a lower bound. Primal beams recovered from the iterates are polished
// and supply both tighter upper bounds and dual multipliers, so the loop
// usually terminates after a few cuts with a certified gap.

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wpcn {

struct PsiOptions {
  double tol = 1e-8;    // relative gap between certified bounds
  int max_cuts = 500;   // cutting-plane iterations
  bool polish = true;   // primal refinement of recovered beams
};

struct DualSolution {
  Eigen::VectorXd lambda;               // feasible multipliers, lambda >= 0
  double objective = 0.0;               // rho^T lambda, a lower bound on psi
  double upper_bound = 0.0;             // best certified upper bound on psi
  double gap_certificate = 0.0;         // (upper_bound - objective) / objective
  std::vector<Eigen::VectorXcd> cuts;   // unit vectors u of every cut, seeds first
  std::vector<double> master_bounds;    // master LP value of every iterate
  Eigen::VectorXcd primal;              // best feasible beam met while solving, empty if none
  int iterations = 0;
};

struct BeamVector {
  Eigen::VectorXcd w;
  double power = 0.0;  // ||w||^2

  static BeamVector from(Eigen::VectorXcd v) {
    const double p = v.squaredNorm();
    return {std::move(v), p};
  }
};

/// Solves the dual problem for a fixed channel; holds the channel square root
/// so repeated evaluations on a harvest grid share it.
class PsiSolver {
 public:
  explicit PsiSolver(const Eigen::MatrixXcd& channel, PsiOptions options = {});

  /// (psi value, dual certificate). The value is the certified lower bound.
  std::pair<double, DualSolution> solve(const Eigen::VectorXd& rho) const;

  const Eigen::MatrixXcd& channel() const { return channel_; }
  /// (H H^H)^{1/2}
  Eigen::MatrixXcd channel_sqrt() const;
  const PsiOptions& options() const { return options_; }

 private:
  Eigen::MatrixXcd channel_;
  double h_scale_;             // mean squared row norm
  Eigen::MatrixXcd hn_;        // channel / sqrt(h_scale)
  Eigen::MatrixXcd gram_n_;    // hn hn^H
  Eigen::MatrixXcd b_n_;       // (hn hn^H)^{1/2}
  PsiOptions options_;
};

std::pair<double, DualSolution> compute_psi(const Eigen::MatrixXcd& channel,
                                            const Eigen::VectorXd& rho, double tol = 1e-8);

/// ||B diag(lambda) B||_2 with B = (H H^H)^{1/2}; <= 1 for dual feasibility.
double dual_constraint_norm(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& lambda);

/// sum_k lambda_k h_k^H h_k
Eigen::MatrixXcd kkt_matrix(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& lambda);

/// Rank-1 minimizer of the trace problem from the dual optimum: the dominant
/// eigenvector of the KKT matrix, scaled onto the tightest constraint.
BeamVector recover_beamformer(const Eigen::MatrixXcd& channel, const DualSolution& dual,
                              const Eigen::VectorXd& rho);

/// compute_psi followed by recover_beamformer: the minimum-norm beam with
/// |h_k w|^2 >= b_k for every k.
BeamVector min_trace_beamforming(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& b,
                                 const PsiOptions& options = {});

/// Best rank-1 beam found when the relaxation has no certified rank-1
/// optimum (possible for K >= 4): polished starts from the dominant
/// eigenspace of the KKT matrix, the solver's own best beam and `hint`.
/// The result is feasible; its power is not certified minimal.
BeamVector rank_one_approximation(const Eigen::MatrixXcd& channel, const DualSolution& dual,
                                  const Eigen::VectorXd& rho, const Eigen::VectorXcd& hint = {});

/// min_trace_beamforming when a rank-1 optimum is certified, otherwise
/// rank_one_approximation.
BeamVector min_power_beam(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& b,
                          const Eigen::VectorXcd& hint = {}, const PsiOptions& options = {});

/// Fixed-phase refinement of a beam: alternately freezes the phases of
/// h_k w and solves the resulting convex QP exactly. Never increases the
/// power; the result satisfies every constraint. `multipliers` receives the
/// Lagrange multipliers of the received-power constraints when non-null.
BeamVector refine_beam(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                       const Eigen::VectorXcd& start, Eigen::VectorXd* multipliers = nullptr);

/// Scales w so that the tightest constraint |h_k w|^2 >= rho_k is active.
Eigen::VectorXcd scale_onto_constraints(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                                   Eigen::VectorXcd w);

}  // namespace wpcn
