#pragma once

// Independent checks: a brute-force psi, plan feasibility recomputed from the
// raw plan, and duality-gap certificates.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wpcn/planner.hpp"
#include "wpcn/psi_solver.hpp"
#include "wpcn/system_model.hpp"

namespace wpcn {

/// Grid search over beam directions in the row space of H followed by a
/// pattern-search refinement. Every evaluated point is feasible, so the
/// result is an upper bound on psi. Intended for K <= 3.
double brute_force_psi(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho, int resolution);

struct VerifyTolerances {
  double rate = 1e-9;      // bits per channel use
  double energy = 1e-12;   // J
  double duration = 1e-9;  // fraction of the frame
};

struct VerificationReport {
  Eigen::VectorXd rate_margin;    // achieved - required
  Eigen::VectorXd energy_margin;  // harvested + stored - consumed, J
  double duration_residual = 0.0; // sum of slot durations - tau_bar
  double worst_violation = 0.0;   // largest tolerance-relative shortfall, 0 if none
  bool pass = false;
  std::vector<std::string> violations;
};

VerificationReport verify_plan(const SystemInstance& inst, const EnergySignalPlan& plan,
                               const VerifyTolerances& tol = {});

struct DualityCertificate {
  double gap = 0.0;                   // |‖w‖^2 - rho^T lambda| / max(rho^T lambda, eps)
  bool complementary_slackness = false;
  double worst_slackness = 0.0;       // max over lambda_k > 1e-6 of (|h_k w|^2 - rho_k) / rho_k
};

DualityCertificate certify_duality(const Eigen::MatrixXcd& channel, const Eigen::VectorXd& rho,
                                   const DualSolution& dual, const BeamVector& beam);

}  // namespace wpcn
