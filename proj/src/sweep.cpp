#include "wpcn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <thread>

#include "wpcn/errors.hpp"
#include "wpcn/oracle.hpp"

namespace wpcn {

using nlohmann::json;

namespace {

SweepParameter parse_parameter(const std::string& name) {
  if (name == "power_req") return SweepParameter::power_req;
  if (name == "rate_req") return SweepParameter::rate_req;
  if (name == "num_users") return SweepParameter::num_users;
  if (name == "num_antennas") return SweepParameter::num_antennas;
  throw ConfigError("sweep: unknown parameter '" + name + "'");
}

bool keeps_channel(SweepParameter p) {
  return p == SweepParameter::power_req || p == SweepParameter::rate_req;
}

int as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(std::string("sweep: ") + what + " values must be positive integers");
  return static_cast<int>(v);
}

TrialOutcome run_scheme(const SystemInstance& inst, Scheme scheme, const HarvestGrid* grid,
                        double extra_wall_s) {
  TrialOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const EnergySignalPlan plan = scheme == Scheme::optimal ? solve_optimal(inst, grid) : solve(inst, scheme);
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() + extra_wall_s;
    const VerificationReport rep = verify_plan(inst, plan);
    if (rep.pass) {
      out.feasible = true;
      out.cost = plan.cost_dl;
    } else {
      out.error = "verification failed: " + rep.violations.front();
    }
  } catch (const InfeasibleError&) {
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() + extra_wall_s;
  } catch (const std::exception& e) {
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() + extra_wall_s;
    out.error = e.what();
  }
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (values.empty()) throw ConfigError("sweep: values must not be empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw ConfigError("sweep: values must be strictly increasing");
  if (schemes.empty()) throw ConfigError("sweep: at least one scheme is required");
  if (distance_range && !(distance_range->first > 0 && distance_range->second >= distance_range->first))
    throw ConfigError("sweep: distance_range_m must satisfy 0 < lo <= hi");
  for (double v : values) {
    if (parameter == SweepParameter::num_users) as_count(v, "num_users");
    if (parameter == SweepParameter::num_antennas) as_count(v, "num_antennas");
    if (!(v >= 0.0)) throw ConfigError("sweep: values must be non-negative");
  }
}

SweepSpec sweep_spec_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("sweep spec: expected an object");
  for (const auto& [key, value] : j.items())
    if (key != "scenario" && key != "scenario_file" && key != "parameter" && key != "values" &&
        key != "trials" && key != "schemes" && key != "seed" && key != "distance_range_m" && key != "threads")
      throw ConfigError("sweep spec: unknown key '" + key + "'");
  SweepSpec s;
  try {
    if (j.contains("scenario"))
      s.base = scenario_from_json(j.at("scenario"));
    else if (j.contains("scenario_file")) {
      std::filesystem::path p = j.at("scenario_file").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      s.base = load_scenario(p.string());
    } else {
      throw ConfigError("sweep spec: 'scenario' or 'scenario_file' is required");
    }
    s.parameter = parse_parameter(j.at("parameter").get<std::string>());
    s.values = j.at("values").get<std::vector<double>>();
    s.trials = j.value("trials", 1);
    for (const auto& name : j.at("schemes")) s.schemes.push_back(parse_scheme(name.get<std::string>()));
    s.seed = j.value("seed", std::uint64_t{1});
    s.threads = j.value("threads", 0);
    if (j.contains("distance_range_m")) {
      const auto r = j.at("distance_range_m").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("sweep spec: distance_range_m must be [lo, hi]");
      s.distance_range = std::make_pair(r[0], r[1]);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
  s.validate();
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("sweep spec '" + path + "': " + e.what());
  }
  return sweep_spec_from_json(j, std::filesystem::path(path).parent_path().string());
}

SystemInstance sweep_instance(const SweepSpec& spec, std::size_t point, int trial) {
  SystemConfig config = spec.base.config;
  std::vector<UserSpec> users = spec.base.users;
  const double v = spec.values.at(point);
  switch (spec.parameter) {
    case SweepParameter::power_req:
      for (auto& u : users) u.power_req = v;
      break;
    case SweepParameter::rate_req:
      for (auto& u : users) u.rate_req = v;
      break;
    case SweepParameter::num_users: {
      const int k = as_count(v, "num_users");
      std::vector<UserSpec> cycled;
      for (int i = 0; i < k; ++i) cycled.push_back(users[static_cast<std::size_t>(i) % users.size()]);
      users = std::move(cycled);
      break;
    }
    case SweepParameter::num_antennas:
      config.num_antennas = as_count(v, "num_antennas");
      break;
  }

  CounterRng rng = trial_rng(spec.seed, static_cast<std::uint64_t>(trial));
  if (spec.distance_range) {
    std::uniform_real_distribution<double> dist(spec.distance_range->first, spec.distance_range->second);
    for (auto& u : users) u.distance = dist(rng);
  }
  if (spec.base.channel) return make_instance(config, std::move(users), *spec.base.channel);
  return sample_instance(config, std::move(users), rng);
}

SweepOutcomes run_sweep_trials(const SweepSpec& spec) {
  spec.validate();
  const std::size_t points = spec.values.size();
  const std::size_t schemes = spec.schemes.size();
  SweepOutcomes out(points, std::vector<std::vector<TrialOutcome>>(
                                schemes, std::vector<TrialOutcome>(static_cast<std::size_t>(spec.trials))));
  const bool wants_grid =
      std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::optimal) != spec.schemes.end();

  auto work = [&](int trial) {
    std::optional<HarvestGrid> grid;
    Eigen::MatrixXcd grid_channel;
    double grid_wall_s = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
      std::optional<SystemInstance> inst;
      std::string setup_error;
      try {
        inst = sweep_instance(spec, p, trial);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (std::size_t s = 0; s < schemes; ++s) {
        TrialOutcome& o = out[p][s][static_cast<std::size_t>(trial)];
        if (!inst) {
          o.error = setup_error;
          continue;
        }
        const HarvestGrid* g = nullptr;
        if (spec.schemes[s] == Scheme::optimal && wants_grid) {
          // the harvest grid depends only on the channel, so reuse it while
          // the swept parameter leaves the channel unchanged
          const bool reuse = grid && keeps_channel(spec.parameter) && grid_channel.rows() == inst->channel.rows() &&
                             grid_channel.cols() == inst->channel.cols() && grid_channel == inst->channel;
          if (!reuse) {
            const auto start = std::chrono::steady_clock::now();
            try {
              grid = build_harvest_grid(*inst);
              grid_channel = inst->channel;
            } catch (const std::exception& e) {
              grid.reset();
              o.error = e.what();
              continue;
            }
            grid_wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          }
          g = &*grid;
        }
        o = run_scheme(*inst, spec.schemes[s], g, g ? grid_wall_s : 0.0);
      }
    }
  };

  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, spec.trials);
  if (threads == 1) {
    for (int t = 0; t < spec.trials; ++t) work(t);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i)
    pool.emplace_back([&] {
      for (int t = next++; t < spec.trials; t = next++) work(t);
    });
  for (auto& th : pool) th.join();
  return out;
}

std::vector<SweepRow> summarize_sweep(const SweepSpec& spec, const SweepOutcomes& outcomes) {
  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      SweepRow row;
      row.swept_value = spec.values[p];
      row.scheme = spec.schemes[s];
      row.seed = spec.seed;
      double cost = 0.0, wall = 0.0;
      int feasible = 0, errors = 0;
      std::string first_error;
      for (const auto& o : outcomes[p][s]) {
        wall += o.wall_s;
        if (o.feasible) {
          ++feasible;
          cost += o.cost;
        }
        if (!o.error.empty()) {
          if (errors++ == 0) first_error = o.error;
        }
      }
      const auto n = static_cast<double>(outcomes[p][s].size());
      row.mean_p_dl_w = feasible > 0 ? cost / feasible : std::numeric_limits<double>::quiet_NaN();
      row.feasible_frac = feasible / n;
      row.mean_wall_s = wall / n;
      if (errors > 0) {
        row.status = "errors=" + std::to_string(errors) + " first: " + first_error;
        std::replace(row.status.begin(), row.status.end(), ',', ';');
        std::replace(row.status.begin(), row.status.end(), '\n', ' ');
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  return summarize_sweep(spec, run_sweep_trials(spec));
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "swept_value,scheme,mean_p_dl_w,feasible_frac,mean_wall_s,seed,status\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.swept_value << ',' << scheme_name(r.scheme) << ',' << r.mean_p_dl_w << ','
        << r.feasible_frac << ',' << r.mean_wall_s << ',' << r.seed << ',' << r.status << '\n';
}

}  // namespace wpcn
