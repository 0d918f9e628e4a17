#pragma once

// End-to-end frame designs. A plan splits the frame into a downlink share
// tau_bar, itself divided into slots with fixed energy beams, and an uplink
// share in which every user transmits at its minimum rate-achieving power.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wpcn/psi_solver.hpp"
#include "wpcn/system_model.hpp"

namespace wpcn {

enum class Scheme { single_user, optimal, massive_miso, mrt, sdr };

/// CLI names: single, optimal, massive, mrt, sdr.
std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct PlanSlot {
  double duration = 0.0;  // fraction of the frame
  BeamVector beam;
};

struct EnergySignalPlan {
  double tau_bar = 0.0;
  std::vector<PlanSlot> slots;
  Eigen::VectorXd uplink_powers;  // W
  double cost_dl = 0.0;           // W
  Scheme scheme = Scheme::optimal;
};

/// Harvest targets mu_j on the uniform per-user grid together with psi at
/// their input-power preimages. Depends only on the channel and EH models,
/// so it can be shared between instances that differ in requirements.
struct HarvestGrid {
  int levels = 0;
  std::vector<Eigen::VectorXd> targets;  // mu_j, W
  Eigen::VectorXd psi;                   // W
  Eigen::MatrixXd fractions;             // K x J, mu_{j,k} / phi_k(A_k^2)
};

struct AllocationResult {
  double tau_bar = 0.0;
  double cost = 0.0;                     // sum of durations x psi, W
  std::vector<int> grid_indices;
  std::vector<Eigen::VectorXd> targets;  // mu_n of every retained slot
  std::vector<double> durations;
  std::vector<double> psi_values;
  int lp_support = 0;                    // nonzero LP durations before trimming
};

/// Downlink fractions tried by the MRT-based schemes: 0, eps, ..., 1 - eps.
std::vector<double> mrt_tau_grid(double step);

/// Closed-form design for one user.
EnergySignalPlan solve_single_user(const SystemInstance& inst);

HarvestGrid build_harvest_grid(const SystemInstance& inst, const PsiOptions& options = {});

/// Grid search over tau_bar with an LP over time shares of the harvest grid.
/// `grid` must have been built for the same channel and EH models.
AllocationResult allocate_resources_grid(const SystemInstance& inst,
                                         const HarvestGrid* grid = nullptr);

/// Beams for the allocated harvest targets and the matching uplink powers.
EnergySignalPlan plan_from_allocation(const SystemInstance& inst, const AllocationResult& alloc);
EnergySignalPlan solve_optimal(const SystemInstance& inst, const HarvestGrid* grid = nullptr);

/// Saturation-service time t_k = max{0, xi_k / phi_k(A_k^2)} per user.
Eigen::VectorXd saturation_times(const SystemInstance& inst, double tau_bar);

/// Slots of the MRT construction at one tau_bar; `feasible` is false when
/// some user cannot be served within tau_bar.
struct MrtConstruction {
  bool feasible = false;
  std::vector<PlanSlot> slots;           // zero-duration slots removed
  std::vector<double> weights;           // omega_n per slot, 1 for the slack slot
  std::vector<std::vector<int>> served;  // users driven into saturation per slot
};

/// Massive-MISO slots at tau_bar; with `weighted` the beams are scaled by
/// omega_n = max_{k in K(n)} A_k / |h_k w_n|.
MrtConstruction mrt_construction(const SystemInstance& inst, double tau_bar, bool weighted = true);

EnergySignalPlan solve_massive_miso(const SystemInstance& inst);
EnergySignalPlan solve_mrt_suboptimal(const SystemInstance& inst);
EnergySignalPlan solve_sdr_suboptimal(const SystemInstance& inst, const PsiOptions& options = {});

EnergySignalPlan solve(const SystemInstance& inst, Scheme scheme);

/// sum_n duration_n ||w_n||^2
double plan_cost(const EnergySignalPlan& plan);

}  // namespace wpcn
