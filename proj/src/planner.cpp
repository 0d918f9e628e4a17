#include "wpcn/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wpcn/errors.hpp"
#include "wpcn/lp.hpp"
#include "wpcn/numerics.hpp"

namespace wpcn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

EnergySignalPlan finish_plan(const SystemInstance& inst, Scheme scheme, double tau_bar,
                             std::vector<PlanSlot> slots) {
  EnergySignalPlan plan;
  plan.scheme = scheme;
  plan.tau_bar = tau_bar;
  plan.slots = std::move(slots);
  plan.uplink_powers.resize(inst.num_users());
  for (int k = 0; k < inst.num_users(); ++k) plan.uplink_powers(k) = min_uplink_power(inst, k, tau_bar);
  plan.cost_dl = plan_cost(plan);
  return plan;
}

Eigen::VectorXd saturation_levels(const SystemInstance& inst) {
  Eigen::VectorXd sat(inst.num_users());
  for (int k = 0; k < inst.num_users(); ++k) sat(k) = inst.eh(k).saturation_output();
  return sat;
}

Eigen::VectorXd input_preimage(const SystemInstance& inst, const Eigen::VectorXd& mu) {
  Eigen::VectorXd b(mu.size());
  for (int k = 0; k < inst.num_users(); ++k) b(k) = inst.eh(k).inverse_harvested_power(mu(k));
  return b;
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::single_user: return "single";
    case Scheme::optimal: return "optimal";
    case Scheme::massive_miso: return "massive";
    case Scheme::mrt: return "mrt";
    case Scheme::sdr: return "sdr";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::single_user, Scheme::optimal, Scheme::massive_miso, Scheme::mrt, Scheme::sdr})
    if (scheme_name(s) == name) return s;
  throw ConfigError("unknown scheme '" + name + "'");
}

double plan_cost(const EnergySignalPlan& plan) {
  double cost = 0.0;
  for (const auto& s : plan.slots) cost += s.duration * s.beam.w.squaredNorm();
  return cost;
}

std::vector<double> mrt_tau_grid(double step) {
  const auto n = static_cast<int>(std::lround((1.0 - step) / step));
  std::vector<double> grid;
  for (int i = 0; i <= n; ++i) grid.push_back(i * step);
  return grid;
}

EnergySignalPlan solve_single_user(const SystemInstance& inst) {
  if (inst.num_users() != 1) throw ConfigError("single-user scheme requires K = 1");
  const EhModel& eh = inst.eh(0);
  const double sat = eh.saturation_output();
  auto f = [&](double tau) { return tau * sat - required_harvest(inst, 0, tau); };

  double tau_star;
  try {
    tau_star = find_min_root<double>(f, 0.0, 1.0, 0.0);
  } catch (const NoRootError&) {
    throw InfeasibleError("single user: requirements exceed what saturation can deliver");
  }
  std::vector<PlanSlot> slots;
  if (tau_star > 0.0) {
    const Eigen::VectorXcd h = inst.channel.row(0).adjoint();
    const double amp = std::sqrt(eh.sat_input());
    slots.push_back({tau_star, BeamVector::from(h * (amp / h.squaredNorm()))});
  }
  return finish_plan(inst, Scheme::single_user, tau_star, std::move(slots));
}

HarvestGrid build_harvest_grid(const SystemInstance& inst, const PsiOptions& options) {
  const int k_users = inst.num_users();
  const int levels = inst.config.grid_mu;
  double total = 1.0;
  for (int k = 0; k < k_users; ++k) total *= levels;
  if (total > 2e6) throw ConfigError("harvest grid too large (grid_mu^K > 2e6)");
  const auto count = static_cast<Eigen::Index>(total);

  const Eigen::VectorXd sat = saturation_levels(inst);
  // level values and their preimages, per user
  Eigen::MatrixXd level_mu(k_users, levels), level_b(k_users, levels);
  for (int k = 0; k < k_users; ++k)
    for (int i = 0; i < levels; ++i) {
      level_mu(k, i) = i == levels - 1 ? sat(k) : sat(k) * i / (levels - 1);
      level_b(k, i) = inst.eh(k).inverse_harvested_power(level_mu(k, i));
    }

  HarvestGrid grid;
  grid.levels = levels;
  grid.psi.resize(count);
  grid.fractions.resize(k_users, count);
  grid.targets.reserve(static_cast<std::size_t>(count));
  const PsiSolver solver(inst.channel, options);
  Eigen::VectorXd mu(k_users), b(k_users);
  for (Eigen::Index j = 0; j < count; ++j) {
    Eigen::Index rest = j;
    for (int k = 0; k < k_users; ++k) {
      const auto digit = static_cast<int>(rest % levels);
      rest /= levels;
      mu(k) = level_mu(k, digit);
      b(k) = level_b(k, digit);
      grid.fractions(k, j) = static_cast<double>(digit) / (levels - 1);
    }
    grid.targets.push_back(mu);
    grid.psi(j) = solver.solve(b).first;
  }
  return grid;
}

AllocationResult allocate_resources_grid(const SystemInstance& inst, const HarvestGrid* grid) {
  HarvestGrid local;
  if (!grid) {
    local = build_harvest_grid(inst);
    grid = &local;
  }
  const int k_users = inst.num_users();
  const Eigen::Index count = grid->psi.size();
  if (grid->fractions.rows() != k_users) throw ConfigError("harvest grid does not match instance");
  const Eigen::VectorXd sat = saturation_levels(inst);
  const double psi_scale = std::max(grid->psi.maxCoeff(), std::numeric_limits<double>::min());
  const int points = inst.config.grid_tau;

  AllocationResult best;
  best.cost = kInf;
  Eigen::VectorXd best_x;
  for (int p = 0; p < points; ++p) {
    const double tau_bar = static_cast<double>(p) / (points - 1);
    Eigen::VectorXd need(k_users);
    bool possible = true;
    for (int k = 0; k < k_users; ++k) {
      const double xi = required_harvest(inst, k, tau_bar);
      need(k) = std::max(0.0, xi) / sat(k);
      if (!(need(k) <= tau_bar)) possible = false;
    }
    if (!possible) continue;

    Eigen::VectorXd x;
    if (need.maxCoeff() == 0.0) {
      // harvest constraints are vacuous: idle downlink
      x = Eigen::VectorXd::Zero(count);
      x(0) = tau_bar;
    } else {
      LpProblem lp(count);
      lp.objective = grid->psi / psi_scale;
      for (int k = 0; k < k_users; ++k) lp.add_ge(grid->fractions.row(k), need(k));
      lp.add_eq(Eigen::RowVectorXd::Ones(count), tau_bar);
      const LpSolution sol = solve_lp(lp);
      if (sol.status != LpStatus::optimal) continue;
      x = sol.x.cwiseMax(0.0);
    }
    const double cost = grid->psi.dot(x);
    if (cost < best.cost) {
      best.cost = cost;
      best.tau_bar = tau_bar;
      best_x = x;
    }
  }
  if (!std::isfinite(best.cost))
    throw InfeasibleError("optimal scheme: no downlink fraction on the grid is feasible");

  std::vector<int> support;
  for (Eigen::Index j = 0; j < count; ++j)
    if (best_x(j) > 0.0) support.push_back(static_cast<int>(j));
  best.lp_support = static_cast<int>(support.size());

  if (support.size() > static_cast<std::size_t>(k_users + 1)) {
    std::vector<int> kept = support;
    std::stable_sort(kept.begin(), kept.end(), [&](int a, int b) { return best_x(a) > best_x(b); });
    kept.resize(static_cast<std::size_t>(k_users + 1));
    Eigen::VectorXd trimmed = Eigen::VectorXd::Zero(count);
    for (int j : kept) trimmed(j) = best_x(j);
    bool ok = std::abs(trimmed.sum() - best.tau_bar) <= 1e-12;
    for (int k = 0; k < k_users && ok; ++k) {
      const double xi = std::max(0.0, required_harvest(inst, k, best.tau_bar)) / sat(k);
      ok = grid->fractions.row(k).dot(trimmed) >= xi - 1e-12;
    }
    if (ok) {
      std::sort(kept.begin(), kept.end());
      support = kept;
      best_x = trimmed;
      best.cost = grid->psi.dot(best_x);
    }
  }

  for (int j : support) {
    best.grid_indices.push_back(j);
    best.targets.push_back(grid->targets[static_cast<std::size_t>(j)]);
    best.durations.push_back(best_x(j));
    best.psi_values.push_back(grid->psi(j));
  }
  // remove simplex round-off so the shares sum to tau_bar
  const double sum = std::accumulate(best.durations.begin(), best.durations.end(), 0.0);
  if (sum > 0.0 && std::abs(sum - best.tau_bar) > 0.0) {
    const std::size_t longest = static_cast<std::size_t>(
        std::max_element(best.durations.begin(), best.durations.end()) - best.durations.begin());
    best.durations[longest] += best.tau_bar - sum;
  }
  return best;
}

EnergySignalPlan plan_from_allocation(const SystemInstance& inst, const AllocationResult& alloc) {
  std::vector<PlanSlot> slots;
  for (std::size_t n = 0; n < alloc.durations.size(); ++n) {
    const Eigen::VectorXd b = input_preimage(inst, alloc.targets[n]);
    BeamVector beam = b.maxCoeff() > 0.0 ? min_power_beam(inst.channel, b)
                                         : BeamVector::from(Eigen::VectorXcd::Zero(inst.num_antennas()));
    slots.push_back({alloc.durations[n], std::move(beam)});
  }
  return finish_plan(inst, Scheme::optimal, alloc.tau_bar, std::move(slots));
}

EnergySignalPlan solve_optimal(const SystemInstance& inst, const HarvestGrid* grid) {
  return plan_from_allocation(inst, allocate_resources_grid(inst, grid));
}

Eigen::VectorXd saturation_times(const SystemInstance& inst, double tau_bar) {
  Eigen::VectorXd t(inst.num_users());
  for (int k = 0; k < inst.num_users(); ++k)
    t(k) = std::max(0.0, required_harvest(inst, k, tau_bar)) / inst.eh(k).saturation_output();
  return t;
}

MrtConstruction mrt_construction(const SystemInstance& inst, double tau_bar, bool weighted) {
  const int k_users = inst.num_users();
  MrtConstruction out;
  const Eigen::VectorXd t = saturation_times(inst, tau_bar);
  if (!(t.maxCoeff() <= tau_bar)) return out;

  std::vector<int> order(static_cast<std::size_t>(k_users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return t(a) < t(b); });

  double prev = 0.0;
  for (int n = 0; n < k_users; ++n) {
    const double duration = t(order[static_cast<std::size_t>(n)]) - prev;
    prev = t(order[static_cast<std::size_t>(n)]);
    if (!(duration > 0.0)) continue;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(inst.num_antennas());
    std::vector<int> served(order.begin() + n, order.end());
    for (int k : served) {
      const Eigen::VectorXcd h = inst.channel.row(k).adjoint();
      w += h * (std::sqrt(inst.eh(k).sat_input()) / h.squaredNorm());
    }
    double omega = 1.0;
    if (weighted) {
      omega = 0.0;
      for (int k : served) {
        const double amp = std::abs(inst.channel.row(k).dot(w.conjugate()));
        if (!(amp > 0.0)) return out;
        omega = std::max(omega, std::sqrt(inst.eh(k).sat_input()) / amp);
      }
      w *= omega;
    }
    out.slots.push_back({duration, BeamVector::from(std::move(w))});
    out.weights.push_back(omega);
    out.served.push_back(std::move(served));
  }
  const double slack = tau_bar - prev;
  if (slack > 0.0) {
    out.slots.push_back({slack, BeamVector::from(Eigen::VectorXcd::Zero(inst.num_antennas()))});
    out.weights.push_back(1.0);
    out.served.emplace_back();
  }
  out.feasible = true;
  return out;
}

namespace {

EnergySignalPlan best_over_tau(const SystemInstance& inst, Scheme scheme, bool weighted) {
  double best_cost = kInf;
  double best_tau = 0.0;
  std::vector<PlanSlot> best_slots;
  for (double tau_bar : mrt_tau_grid(inst.config.mrt_step)) {
    MrtConstruction c = mrt_construction(inst, tau_bar, weighted);
    if (!c.feasible) continue;
    double cost = 0.0;
    for (const auto& s : c.slots) cost += s.duration * s.beam.power;
    if (cost < best_cost) {
      best_cost = cost;
      best_tau = tau_bar;
      best_slots = std::move(c.slots);
    }
  }
  if (!std::isfinite(best_cost))
    throw InfeasibleError(scheme_name(scheme) + " scheme: no downlink fraction on the grid is feasible");
  return finish_plan(inst, scheme, best_tau, std::move(best_slots));
}

}  // namespace

EnergySignalPlan solve_massive_miso(const SystemInstance& inst) {
  return best_over_tau(inst, Scheme::massive_miso, false);
}

EnergySignalPlan solve_mrt_suboptimal(const SystemInstance& inst) {
  return best_over_tau(inst, Scheme::mrt, true);
}

EnergySignalPlan solve_sdr_suboptimal(const SystemInstance& inst, const PsiOptions& options) {
  EnergySignalPlan plan = solve_mrt_suboptimal(inst);
  for (auto& slot : plan.slots) {
    if (slot.beam.power == 0.0) continue;
    Eigen::VectorXd mu(inst.num_users());
    for (int k = 0; k < inst.num_users(); ++k)
      mu(k) = inst.eh(k).harvested_power(std::norm(inst.channel.row(k).dot(slot.beam.w.conjugate())));
    const Eigen::VectorXd b = input_preimage(inst, mu);
    BeamVector beam = min_power_beam(inst.channel, b, slot.beam.w, options);
    if (beam.power < slot.beam.power) slot.beam = std::move(beam);
  }
  plan.scheme = Scheme::sdr;
  plan.cost_dl = plan_cost(plan);
  return plan;
}

EnergySignalPlan solve(const SystemInstance& inst, Scheme scheme) {
  switch (scheme) {
    case Scheme::single_user: return solve_single_user(inst);
    case Scheme::optimal: return solve_optimal(inst);
    case Scheme::massive_miso: return solve_massive_miso(inst);
    case Scheme::mrt: return solve_mrt_suboptimal(inst);
    case Scheme::sdr: return solve_sdr_suboptimal(inst);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace wpcn
