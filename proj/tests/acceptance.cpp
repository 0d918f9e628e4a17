// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "test_helpers.hpp"
#include "wpcn/eh_model.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/numerics.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/psi_solver.hpp"
#include "wpcn/rng.hpp"
#include "wpcn/system_model.hpp"

using namespace wpcn;
using testing_helpers::random_channel;

namespace {

constexpr std::uint64_t kSeed = 20240601;

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Shared across criteria: verification of every produced plan, and the
// largest retained LP support relative to K + 1.
struct Ledger {
  int plans = 0;
  int failed = 0;
  std::string first_failure;
  int allocator_runs = 0;
  int support_violations = 0;
  int worst_support_excess = -1000;

  void verify(const SystemInstance& inst, const EnergySignalPlan& plan, const std::string& where) {
    ++plans;
    const VerificationReport rep = verify_plan(inst, plan);
    if (!rep.pass) {
      if (failed++ == 0) first_failure = where + ": " + rep.violations.front();
    }
  }

  void support(const SystemInstance& inst, const AllocationResult& alloc) {
    ++allocator_runs;
    const int retained = static_cast<int>(alloc.durations.size());
    const int excess = retained - (inst.num_users() + 1);
    worst_support_excess = std::max(worst_support_excess, excess);
    if (excess > 0) ++support_violations;
  }
};

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, double seconds, double limit_s) {
  const bool in_time = seconds <= limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %s  %s: %s; %.1f s (limit %.0f s)%s\n", id, pass ? "PASS" : "FAIL", title.c_str(),
              o.detail.c_str(), seconds, limit_s, in_time ? "" : " TIME LIMIT EXCEEDED");
  std::fflush(stdout);
}

std::vector<UserSpec> users_at(const std::vector<double>& d, double rate, double preq) {
  return testing_helpers::users(d, rate, preq);
}

// ---------------------------------------------------------------- criterion 1
Outcome single_user_agreement(Ledger& ledger) {
  Outcome o;
  double worst_cost = 0.0, worst_beam = 0.0;
  const int nts[] = {2, 4, 8};
  for (int i = 0; i < 100; ++i) {
    SystemConfig config;
    config.num_antennas = nts[i % 3];
    config.grid_tau = 1001;
    config.grid_mu = 10;
    CounterRng rng(kSeed + 1, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> dist(3.0, 10.0);
    const std::vector<UserSpec> users = users_at({dist(rng)}, 1.0, 20e-6);
    const SystemInstance inst = sample_instance(config, users, rng);
    const std::string where = "c1 instance " + std::to_string(i);

    const EnergySignalPlan single = solve_single_user(inst);
    const AllocationResult alloc = allocate_resources_grid(inst);
    ledger.support(inst, alloc);
    const EnergySignalPlan optimal = plan_from_allocation(inst, alloc);
    worst_cost = std::max(worst_cost, rel_diff(optimal.cost_dl, single.cost_dl));
    for (const auto& s : single.slots) {
      if (s.beam.power == 0.0) continue;
      const double input = std::norm(inst.channel.row(0).dot(s.beam.w.conjugate()));
      worst_beam = std::max(worst_beam, std::abs(input - inst.eh(0).sat_input()) / inst.eh(0).sat_input());
    }
    ledger.verify(inst, single, where + " single");
    ledger.verify(inst, optimal, where + " optimal");
    for (Scheme s : {Scheme::massive_miso, Scheme::mrt, Scheme::sdr})
      ledger.verify(inst, solve(inst, s), where + " " + scheme_name(s));
  }
  o.pass = worst_cost <= 5e-3 && worst_beam <= 1e-8;
  o.detail = "worst optimal/single rel diff " + fmt("%.2e", worst_cost) + " (<= 5e-3), worst |h w|^2 vs A^2 " +
             fmt("%.2e", worst_beam) + " (<= 1e-8)";
  return o;
}

// ------------------------------------------------------------ criteria 2 + 4
struct DualityStats {
  int cases = 0;
  double worst_gap = 0.0;
  int cs_failures = 0;
  int rank_failures = 0;
  double worst_power_excess = 0.0;
};

DualityStats duality_cases() {
  DualityStats st;
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  // every (K, N_t) pair with N_t >= K
  const int pairs[][2] = {{1, 2}, {1, 4}, {1, 8}, {2, 2}, {2, 4}, {2, 8}, {3, 4}, {3, 8}};
  for (int i = 0; i < 200; ++i) {
    const int k = pairs[i % 8][0];
    const int nt = pairs[i % 8][1];
    // alternate unit-scale gains with free-space gains around 1e-5
    const double scale = i % 2 == 0 ? 1.0 : 1e-5;
    const Eigen::MatrixXcd h = random_channel(k, nt, rng, scale);
    Eigen::VectorXd rho(k);
    for (int j = 0; j < k; ++j) rho(j) = u(rng) * (i % 2 == 0 ? 1.0 : 4e-4);
    const auto [value, dual] = compute_psi(h, rho);
    const BeamVector w = recover_beamformer(h, dual, rho);
    const DualityCertificate cert = certify_duality(h, rho, dual, w);
    ++st.cases;
    st.worst_gap = std::max(st.worst_gap, cert.gap);
    if (!cert.complementary_slackness) ++st.cs_failures;

    const Eigen::VectorXd eig = hermitian_eig<double>(kkt_matrix(h, dual.lambda)).values;
    if ((eig.array() > 1.0 - 1e-6).count() != 1) ++st.rank_failures;
    st.worst_power_excess = std::max(st.worst_power_excess, w.power / dual.objective - 1.0);
  }
  return st;
}

// ---------------------------------------------------------------- criterion 3
Outcome oracle_sandwich() {
  Outcome o;
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double worst = 0.0;
  int below = 0;
  for (int i = 0; i < 50; ++i) {
    const int nt = i % 2 == 0 ? 2 : 4;
    const Eigen::MatrixXcd h = random_channel(2, nt, rng);
    Eigen::VectorXd rho(2);
    rho << u(rng), u(rng);
    const double psi = compute_psi(h, rho).first;
    const double bf = brute_force_psi(h, rho, 200);
    worst = std::max(worst, rel_diff(bf, psi));
    // both values carry floating-point rounding of order 1e-13
    if (bf < psi * (1.0 - 1e-12)) ++below;
  }
  o.pass = worst <= 1e-3 && below == 0;
  o.detail = "worst rel diff " + fmt("%.2e", worst) + " (<= 1e-3), brute force below dual in " +
             std::to_string(below) + "/50";
  return o;
}

// ---------------------------------------------------------------- criterion 6
Outcome orthogonal_collapse(Ledger& ledger) {
  Outcome o;
  std::mt19937_64 rng(kSeed + 6);
  double worst_pair = 0.0, worst_closed = 0.0, worst_omega = 0.0;
  int fixtures = 0;
  for (int k : {2, 3}) {
    for (int t = 0; t < 20; ++t) {
      SystemConfig config;
      config.num_antennas = 6;
      const std::vector<double> d = k == 2 ? std::vector<double>{3.0, 6.0} : std::vector<double>{3.0, 5.0, 7.0};
      const std::vector<UserSpec> users = users_at(d, 1.0 + t % 3, 20e-6 * (t % 4));
      Eigen::MatrixXcd h = testing_helpers::orthogonal_channel(k, 6, rng);
      for (int r = 0; r < k; ++r) h.row(r) *= std::sqrt(path_loss_gain(d[static_cast<std::size_t>(r)], config.carrier_freq));
      const SystemInstance inst = make_instance(config, users, h);
      const std::string where = "c6 fixture K=" + std::to_string(k) + " #" + std::to_string(t);

      const EnergySignalPlan massive = solve_massive_miso(inst);
      const EnergySignalPlan mrt = solve_mrt_suboptimal(inst);
      const EnergySignalPlan sdr = solve_sdr_suboptimal(inst);
      ledger.verify(inst, massive, where + " massive");
      ledger.verify(inst, mrt, where + " mrt");
      ledger.verify(inst, sdr, where + " sdr");
      worst_pair = std::max({worst_pair, rel_diff(massive.cost_dl, mrt.cost_dl), rel_diff(massive.cost_dl, sdr.cost_dl),
                             rel_diff(mrt.cost_dl, sdr.cost_dl)});

      double closed = 0.0;
      for (int j = 0; j < k; ++j) {
        const double xi = std::max(0.0, required_harvest(inst, j, massive.tau_bar));
        closed += xi * inst.eh(j).sat_input() / (inst.eh(j).saturation_output() * h.row(j).squaredNorm());
      }
      worst_closed = std::max(worst_closed, rel_diff(closed, massive.cost_dl));
      for (double w : mrt_construction(inst, mrt.tau_bar, true).weights)
        worst_omega = std::max(worst_omega, std::abs(w - 1.0));
      ++fixtures;
    }
  }
  o.pass = worst_pair <= 1e-9 && worst_closed <= 1e-9 && worst_omega <= 1e-12;
  o.detail = std::to_string(fixtures) + " fixtures, worst pairwise " + fmt("%.2e", worst_pair) +
             ", worst vs closed form " + fmt("%.2e", worst_closed) + " (<= 1e-9), worst |omega - 1| " +
             fmt("%.1e", worst_omega);
  return o;
}

// ---------------------------------------------------------------- criterion 7
Outcome dominance_and_trends(Ledger& ledger) {
  Outcome o;
  const int trials = 200;
  struct Point {
    double rate, preq;
  };
  const std::vector<Point> power_sweep = {{0, 0}, {0, 20e-6}, {0, 40e-6}, {0, 60e-6}};
  const std::vector<Point> rate_sweep = {{1, 0}, {2, 0}, {3, 0}};
  std::vector<Point> points = power_sweep;
  points.insert(points.end(), rate_sweep.begin(), rate_sweep.end());
  const std::vector<double> d = {3.0, 5.0, 7.0};

  const std::size_t np = points.size();
  std::vector<double> sum_opt(np, 0.0), sum_sdr(np, 0.0), sum_mrt(np, 0.0);
  int infeasible = 0;
  std::string first_error;
  for (int t = 0; t < trials; ++t) {
    SystemConfig config;
    config.num_antennas = 5;
    CounterRng rng(kSeed + 7, static_cast<std::uint64_t>(t));
    const Eigen::MatrixXcd h = sample_channel(config, users_at(d, 0, 0), rng);
    const HarvestGrid grid = build_harvest_grid(make_instance(config, users_at(d, 0, 0), h));
    for (std::size_t p = 0; p < np; ++p) {
      const SystemInstance inst = make_instance(config, users_at(d, points[p].rate, points[p].preq), h);
      const std::string where = "c7 trial " + std::to_string(t) + " point " + std::to_string(p);
      try {
        const AllocationResult alloc = allocate_resources_grid(inst, &grid);
        ledger.support(inst, alloc);
        const EnergySignalPlan opt = plan_from_allocation(inst, alloc);
        const EnergySignalPlan sdr = solve_sdr_suboptimal(inst);
        const EnergySignalPlan mrt = solve_mrt_suboptimal(inst);
        ledger.verify(inst, opt, where + " optimal");
        ledger.verify(inst, sdr, where + " sdr");
        ledger.verify(inst, mrt, where + " mrt");
        sum_opt[p] += opt.cost_dl;
        sum_sdr[p] += sdr.cost_dl;
        sum_mrt[p] += mrt.cost_dl;
      } catch (const std::exception& e) {
        if (infeasible++ == 0) first_error = where + ": " + e.what();
      }
    }
  }

  bool dominance = true, trends = true;
  double worst_opt_ratio = 0.0;
  std::string table;
  for (std::size_t p = 0; p < np; ++p) {
    const double mo = sum_opt[p] / trials, ms = sum_sdr[p] / trials, mm = sum_mrt[p] / trials;
    if (!(ms <= mm)) dominance = false;
    if (!(mo <= ms * 1.02)) dominance = false;
    if (ms > 0) worst_opt_ratio = std::max(worst_opt_ratio, mo / ms);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s[R=%g p=%guW opt %.4g sdr %.4g mrt %.4g W]", p ? " " : "", points[p].rate,
                  points[p].preq * 1e6, mo, ms, mm);
    table += buf;
  }
  auto nondecreasing = [&](std::size_t from, std::size_t to) {
    for (std::size_t p = from + 1; p < to; ++p)
      for (const auto* s : {&sum_opt, &sum_sdr, &sum_mrt})
        if ((*s)[p] < (*s)[p - 1]) return false;
    return true;
  };
  trends = nondecreasing(0, power_sweep.size()) && nondecreasing(power_sweep.size(), np);
  o.pass = dominance && trends && infeasible == 0;
  o.detail = std::string("sdr <= mrt and opt <= 1.02 sdr: ") + (dominance ? "yes" : "NO") +
             ", nondecreasing sweeps: " + (trends ? "yes" : "NO") + ", max opt/sdr " +
             fmt("%.4f", worst_opt_ratio) + ", failed solves " + std::to_string(infeasible) +
             (first_error.empty() ? "" : " (" + first_error + ")") + "; means " + table;
  return o;
}

// ---------------------------------------------------------------- criterion 8
Outcome massive_convergence(Ledger& ledger) {
  Outcome o;
  const int trials = 100;
  const std::vector<int> nts = {8, 16, 32, 64};
  std::vector<double> gap(nts.size(), 0.0), mrt_mean(nts.size(), 0.0), sdr_mean(nts.size(), 0.0);
  int errors = 0;
  std::string first_error;
  for (std::size_t a = 0; a < nts.size(); ++a) {
    for (int t = 0; t < trials; ++t) {
      SystemConfig config;
      config.num_antennas = nts[a];
      CounterRng rng(kSeed + 8, static_cast<std::uint64_t>(t));
      std::uniform_real_distribution<double> dist(3.0, 10.0);
      std::vector<double> d(5);
      for (auto& x : d) x = dist(rng);
      const SystemInstance inst = sample_instance(config, users_at(d, 3.0, 0.0), rng);
      const std::string where = "c8 N_t=" + std::to_string(nts[a]) + " trial " + std::to_string(t);
      try {
        const EnergySignalPlan mrt = solve_mrt_suboptimal(inst);
        const EnergySignalPlan sdr = solve_sdr_suboptimal(inst);
        ledger.verify(inst, mrt, where + " mrt");
        ledger.verify(inst, sdr, where + " sdr");
        gap[a] += (mrt.cost_dl - sdr.cost_dl) / sdr.cost_dl / trials;
        mrt_mean[a] += mrt.cost_dl / trials;
        sdr_mean[a] += sdr.cost_dl / trials;
      } catch (const std::exception& e) {
        if (errors++ == 0) first_error = where + ": " + e.what();
      }
    }
  }
  bool gap_decreasing = true, cost_nonincreasing = true;
  std::string table;
  for (std::size_t a = 0; a < nts.size(); ++a) {
    if (a > 0 && !(gap[a] < gap[a - 1])) gap_decreasing = false;
    if (a > 0 && (mrt_mean[a] > mrt_mean[a - 1] || sdr_mean[a] > sdr_mean[a - 1])) cost_nonincreasing = false;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s[N_t=%d gap %.3f%% mrt %.4g sdr %.4g W]", a ? " " : "", nts[a], 100 * gap[a],
                  mrt_mean[a], sdr_mean[a]);
    table += buf;
  }
  o.pass = gap_decreasing && gap.back() < 0.05 && cost_nonincreasing && errors == 0;
  o.detail = std::string("gap decreasing: ") + (gap_decreasing ? "yes" : "NO") + ", gap at 64 " +
             fmt("%.3f%%", 100 * gap.back()) + " (< 5%), cost nonincreasing: " + (cost_nonincreasing ? "yes" : "NO") +
             ", failed solves " + std::to_string(errors) + (first_error.empty() ? "" : " (" + first_error + ")") +
             "; " + table;
  return o;
}

// --------------------------------------------------------------- criterion 10
Outcome eh_numerics() {
  Outcome o;
  int bad = 0;
  for (int i = 0; i <= 400; ++i) {
    const double x = std::pow(10.0, -8.0 + i * 0.05);
    const double w = lambert_w0(x);
    if (!(std::abs(w * std::exp(w) - x) <= 1e-10 * std::max(1.0, x))) ++bad;
  }
  for (int i = 0; i <= 1000; ++i) {
    const double x = i * 0.1;
    if (!(std::abs(bessel_i0(x) - std::cyl_bessel_i(0.0, x)) <= 1e-10 * std::cyl_bessel_i(0.0, x))) ++bad;
  }
  for (const EhModelPtr& m : {default_rectifier_model(), EhModelPtr(std::make_shared<LinearSaturatedEhModel>(0.5, 4e-4))}) {
    const double a2 = m->sat_input();
    for (double p : {a2, 2 * a2, 1.0})
      if (m->harvested_power(p) != m->saturation_output()) ++bad;
    const int n = 4000;
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = m->harvested_power(a2 * i / n);
    if (v[0] != 0.0) ++bad;
    for (int i = 1; i <= n; ++i)
      if (!(v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(i - 1)])) ++bad;
    for (int i = 1; i < n; ++i)
      if (v[static_cast<std::size_t>(i - 1)] - 2 * v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i + 1)] <
          -1e-12)
        ++bad;
    for (int i = 1; i <= 200; ++i) {
      const double p = a2 * i / 200;
      if (!(std::abs(m->inverse_harvested_power(m->harvested_power(p)) - p) <= 1e-10 * p)) ++bad;
    }
  }
  o.pass = bad == 0;
  o.detail = "Lambert-W, Bessel, clamp, monotonicity, convexity and inverse checks: " + std::to_string(bad) +
             " violations";
  return o;
}

}  // namespace

int main() {
  Ledger ledger;
  std::printf("acceptance run, seed %llu\n", static_cast<unsigned long long>(kSeed));

  {
    Timer t;
    const Outcome o = eh_numerics();
    report(10, "EH-model numerics", o, t.seconds(), 5);
  }
  {
    Timer t;
    const Outcome o = single_user_agreement(ledger);
    report(1, "single-user closed-form agreement", o, t.seconds(), 10);
  }
  {
    Timer t;
    const DualityStats st = duality_cases();
    const double secs = t.seconds();
    Outcome c2;
    c2.pass = st.worst_gap <= 1e-6 && st.cs_failures == 0;
    c2.detail = std::to_string(st.cases) + " cases, worst gap " + fmt("%.2e", st.worst_gap) +
                " (<= 1e-6), complementary slackness failures " + std::to_string(st.cs_failures);
    report(2, "duality-gap certification", c2, secs, 30);
    Outcome c4;
    c4.pass = st.rank_failures == 0 && st.worst_power_excess <= 1e-6;
    c4.detail = "instances without exactly one eigenvalue above 1-1e-6: " + std::to_string(st.rank_failures) +
                ", worst ||w||^2 / dual - 1 " + fmt("%.2e", st.worst_power_excess) + " (<= 1e-6)";
    report(4, "rank-1 structure", c4, secs, 30);
  }
  {
    Timer t;
    const Outcome o = oracle_sandwich();
    report(3, "oracle sandwich", o, t.seconds(), 300);
  }
  {
    Timer t;
    const Outcome o = orthogonal_collapse(ledger);
    report(6, "orthogonal-channel collapse", o, t.seconds(), 60);
  }
  {
    Timer t;
    const Outcome o = dominance_and_trends(ledger);
    report(7, "scheme dominance and trends", o, t.seconds(), 1800);
  }
  {
    Outcome o;
    o.pass = ledger.support_violations == 0 && ledger.allocator_runs > 0;
    o.detail = std::to_string(ledger.allocator_runs) + " allocator runs, retained support above K+1 in " +
               std::to_string(ledger.support_violations) + ", max support - (K+1) = " +
               std::to_string(ledger.worst_support_excess);
    report(5, "slot-count bound", o, 0.0, 1);
  }
  {
    Timer t;
    const Outcome o = massive_convergence(ledger);
    report(8, "massive-MISO convergence", o, t.seconds(), 1200);
  }
  {
    Outcome o;
    o.pass = ledger.failed == 0 && ledger.plans > 0;
    o.detail = std::to_string(ledger.plans - ledger.failed) + "/" + std::to_string(ledger.plans) +
               " plans verified" + (ledger.first_failure.empty() ? "" : ", first failure " + ledger.first_failure);
    report(9, "feasibility regression", o, 0.0, 1);
  }

  std::printf("acceptance %s (%d failing)\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
