#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wpcn/errors.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/psi_solver.hpp"
#include "wpcn/scenario.hpp"
#include "wpcn/sweep.hpp"

namespace {

using namespace wpcn;

// Schemes whose slot beams are minimum-power beams for what they deliver.
bool claims_min_power(Scheme s) {
  return s == Scheme::single_user || s == Scheme::optimal || s == Scheme::sdr;
}

void print_plan(const SystemInstance& inst, const EnergySignalPlan& plan) {
  std::printf("scheme      %s\n", scheme_name(plan.scheme).c_str());
  std::printf("tau_bar     %.10g\n", plan.tau_bar);
  std::printf("cost_dl_w   %.10g\n", plan.cost_dl);
  std::printf("slots       %zu\n", plan.slots.size());
  for (std::size_t n = 0; n < plan.slots.size(); ++n) {
    const auto& s = plan.slots[n];
    std::printf("  slot %zu  duration %.10g  |w|^2 %.10g W\n", n, s.duration, s.beam.power);
    for (int k = 0; k < inst.num_users(); ++k) {
      const double input = std::norm(inst.channel.row(k).dot(s.beam.w.conjugate()));
      std::printf("    user %d  |h w|^2 %.6e W  harvested %.6e W\n", k, input,
                  inst.eh(k).harvested_power(input));
    }
  }
  for (int k = 0; k < inst.num_users(); ++k)
    std::printf("uplink user %d  p_u %.6e W\n", k, plan.uplink_powers(k));
}

void print_report(const VerificationReport& rep) {
  for (Eigen::Index k = 0; k < rep.rate_margin.size(); ++k)
    std::printf("  user %ld  rate margin %.3e bits/use  energy margin %.3e J\n", static_cast<long>(k),
                rep.rate_margin(k), rep.energy_margin(k));
  std::printf("  duration residual %.3e\n", rep.duration_residual);
  for (const auto& v : rep.violations) std::printf("  violation: %s\n", v.c_str());
  std::printf("verification %s\n", rep.pass ? "PASS" : "FAIL");
}

// Duality certificates of every nonzero slot beam against the input powers
// it delivers (clamped at saturation). Returns false if a gap exceeds 1e-6
// with K <= 3; for K >= 4 a rank-1 optimum is not guaranteed and the gaps
// are reported only.
bool certify_slots(const SystemInstance& inst, const EnergySignalPlan& plan) {
  bool ok = true;
  const bool binding = inst.num_users() <= 3;
  if (!binding) std::printf("  K >= 4: duality gaps are informational\n");
  for (std::size_t n = 0; n < plan.slots.size(); ++n) {
    const auto& s = plan.slots[n];
    if (s.beam.power == 0.0) continue;
    Eigen::VectorXd rho(inst.num_users());
    for (int k = 0; k < inst.num_users(); ++k)
      rho(k) = std::min(std::norm(inst.channel.row(k).dot(s.beam.w.conjugate())), inst.eh(k).sat_input());
    const auto [value, dual] = compute_psi(inst.channel, rho);
    const DualityCertificate cert = certify_duality(inst.channel, rho, dual, s.beam);
    std::printf("  slot %zu  duality gap %.3e\n", n, cert.gap);
    if (binding && cert.gap > 1e-6) ok = false;
  }
  return ok;
}

int cmd_run(const std::string& scenario_path, const std::string& scheme_name_arg, std::uint64_t seed,
            const std::string& json_path) {
  const Scenario sc = load_scenario(scenario_path);
  const Scheme scheme = parse_scheme(scheme_name_arg);
  const SystemInstance inst = build_instance(sc, seed);
  const EnergySignalPlan plan = solve(inst, scheme);
  print_plan(inst, plan);
  const VerificationReport rep = verify_plan(inst, plan);
  print_report(rep);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw ConfigError("cannot write '" + json_path + "'");
    out << plan_to_json(plan, seed, inst.channel).dump(2) << '\n';
  }
  return rep.pass ? 0 : 2;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path) {
  const SweepSpec spec = load_sweep_spec(spec_path);
  const auto rows = run_sweep(spec);
  if (out_path.empty() || out_path == "-") {
    write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'");
    write_sweep_csv(out, rows);
  }
  return 0;
}

int cmd_verify(const std::string& scenario_path, const std::string& plan_path) {
  const Scenario sc = load_scenario(scenario_path);
  std::ifstream in(plan_path);
  if (!in) throw ConfigError("cannot open plan file '" + plan_path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("plan file '" + plan_path + "': " + e.what());
  }
  const PlanRecord rec = plan_from_json(j);
  const SystemInstance inst = build_instance(sc, rec.seed);
  if (rec.channel && (rec.channel->rows() != inst.channel.rows() || rec.channel->cols() != inst.channel.cols() ||
                      (*rec.channel - inst.channel).norm() > 1e-12 * inst.channel.norm())) {
    std::printf("plan channel does not match the scenario and seed\nverification FAIL\n");
    return 2;
  }
  const VerificationReport rep = verify_plan(inst, rec.plan);
  print_report(rep);
  bool ok = rep.pass;
  if (rep.pass && claims_min_power(rec.plan.scheme)) {
    const bool cert = certify_slots(inst, rec.plan);
    std::printf("duality certificates %s\n", cert ? "PASS" : "FAIL");
    ok = ok && cert;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downlink energy beamforming and time allocation for wireless powered networks"};
  app.require_subcommand(1);

  std::string scenario, scheme, json_out, spec, csv_out, plan;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Design one frame for a scenario");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--scheme", scheme, "single | optimal | massive | mrt | sdr")
      ->required()
      ->check(CLI::IsMember({"single", "optimal", "massive", "mrt", "sdr"}));
  run->add_option("--seed", seed, "Channel seed");
  run->add_option("--json", json_out, "Write the plan as JSON");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep to CSV");
  sweep->add_option("--spec", spec, "Sweep spec JSON file")->required();
  sweep->add_option("--out", csv_out, "CSV output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check a dumped plan against its scenario");
  verify->add_option("--scenario", scenario, "Scenario JSON file")->required();
  verify->add_option("--plan", plan, "Plan JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, scheme, seed, json_out);
    if (*sweep) return cmd_sweep(spec, csv_out);
    if (*verify) return cmd_verify(scenario, plan);
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
