#include "wpcn/scenario.hpp"

#include <fstream>
#include <set>

#include "wpcn/errors.hpp"

namespace wpcn {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

EhModelPtr eh_model_from_json(const json& j) {
  const std::string kind = get_or<std::string>(j, "kind", "rectifier");
  if (kind == "rectifier") {
    reject_unknown(j, {"kind", "mu", "nu", "lambda", "sat_input_w"}, "eh_model");
    return std::make_shared<RectifierEhModel>(get_or(j, "mu", 0.03), get_or(j, "nu", 2.4e3),
                                              get_or(j, "lambda", 1e-10),
                                              get_or(j, "sat_input_w", 0.4e-3));
  }
  if (kind == "linear") {
    reject_unknown(j, {"kind", "efficiency", "sat_input_w"}, "eh_model");
    return std::make_shared<LinearSaturatedEhModel>(get_or(j, "efficiency", 0.5),
                                                    get_or(j, "sat_input_w", 0.4e-3));
  }
  throw ConfigError("eh_model: unknown kind '" + kind + "'");
}

json eh_model_to_json(const EhModel& m) {
  if (const auto* r = dynamic_cast<const RectifierEhModel*>(&m))
    return {{"kind", "rectifier"}, {"mu", r->mu()}, {"nu", r->nu()},
            {"lambda", r->lambda_scale()}, {"sat_input_w", r->sat_input()}};
  if (const auto* l = dynamic_cast<const LinearSaturatedEhModel*>(&m))
    return {{"kind", "linear"}, {"efficiency", l->efficiency()}, {"sat_input_w", l->sat_input()}};
  throw ConfigError("eh_model: cannot serialize model kind " + m.kind());
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("matrix: expected [[[re, im], ...], ...]");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError("matrix: entries must be [re, im]");
      m(r, c) = {e[0].get<double>(), e[1].get<double>()};
    }
  }
  return m;
}

Scenario scenario_from_json(const json& j) {
  reject_unknown(j,
                 {"num_antennas", "carrier_freq_hz", "frame_length_s", "noise_variance_w", "grid_mu",
                  "grid_tau", "mrt_step", "eh_model", "users", "channel"},
                 "scenario");
  Scenario s;
  SystemConfig& c = s.config;
  c.num_antennas = get_or(j, "num_antennas", c.num_antennas);
  c.carrier_freq = get_or(j, "carrier_freq_hz", c.carrier_freq);
  c.frame_length = get_or(j, "frame_length_s", c.frame_length);
  c.noise_variance = get_or(j, "noise_variance_w", c.noise_variance);
  c.grid_mu = get_or(j, "grid_mu", c.grid_mu);
  c.grid_tau = get_or(j, "grid_tau", c.grid_tau);
  c.mrt_step = get_or(j, "mrt_step", c.mrt_step);

  const EhModelPtr shared = j.contains("eh_model") ? eh_model_from_json(j.at("eh_model"))
                                                   : default_rectifier_model();
  if (!j.contains("users") || !j.at("users").is_array() || j.at("users").empty())
    throw ConfigError("scenario: 'users' must be a non-empty list");
  for (const auto& u : j.at("users")) {
    reject_unknown(u, {"distance_m", "rate_req", "power_req_w", "initial_energy_j", "eh_model"}, "user");
    UserSpec spec;
    spec.distance = get_or(u, "distance_m", spec.distance);
    spec.rate_req = get_or(u, "rate_req", spec.rate_req);
    spec.power_req = get_or(u, "power_req_w", spec.power_req);
    spec.initial_energy = get_or(u, "initial_energy_j", spec.initial_energy);
    spec.eh = u.contains("eh_model") ? eh_model_from_json(u.at("eh_model")) : shared;
    spec.validate();
    s.users.push_back(std::move(spec));
  }
  if (j.contains("channel")) s.channel = matrix_from_json(j.at("channel"));
  c.validate(static_cast<int>(s.users.size()));
  return s;
}

json scenario_to_json(const Scenario& s) {
  const SystemConfig& c = s.config;
  json j = {{"num_antennas", c.num_antennas},   {"carrier_freq_hz", c.carrier_freq},
            {"frame_length_s", c.frame_length}, {"noise_variance_w", c.noise_variance},
            {"grid_mu", c.grid_mu},             {"grid_tau", c.grid_tau},
            {"mrt_step", c.mrt_step}};
  json users = json::array();
  for (const auto& u : s.users)
    users.push_back({{"distance_m", u.distance},
                     {"rate_req", u.rate_req},
                     {"power_req_w", u.power_req},
                     {"initial_energy_j", u.initial_energy},
                     {"eh_model", eh_model_to_json(*u.eh)}});
  j["users"] = std::move(users);
  if (s.channel) j["channel"] = matrix_to_json(*s.channel);
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

CounterRng trial_rng(std::uint64_t seed, std::uint64_t trial) { return CounterRng(seed, trial); }

SystemInstance build_instance(const Scenario& s, std::uint64_t seed) {
  if (s.channel) return make_instance(s.config, s.users, *s.channel);
  CounterRng rng = trial_rng(seed, 0);
  return sample_instance(s.config, s.users, rng);
}

json plan_to_json(const EnergySignalPlan& plan, std::uint64_t seed, const Eigen::MatrixXcd& channel) {
  json slots = json::array();
  for (const auto& s : plan.slots) {
    Eigen::MatrixXcd w = s.beam.w.transpose();
    slots.push_back({{"duration", s.duration}, {"beam", matrix_to_json(w)[0]}});
  }
  json up = json::array();
  for (Eigen::Index k = 0; k < plan.uplink_powers.size(); ++k) up.push_back(plan.uplink_powers(k));
  return {{"scheme", scheme_name(plan.scheme)},
          {"seed", seed},
          {"tau_bar", plan.tau_bar},
          {"cost_dl_w", plan.cost_dl},
          {"slots", std::move(slots)},
          {"uplink_powers_w", std::move(up)},
          {"channel", matrix_to_json(channel)}};
}

PlanRecord plan_from_json(const json& j) {
  reject_unknown(j, {"scheme", "seed", "tau_bar", "cost_dl_w", "slots", "uplink_powers_w", "channel"}, "plan");
  PlanRecord rec;
  try {
    rec.plan.scheme = parse_scheme(j.at("scheme").get<std::string>());
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.plan.tau_bar = j.at("tau_bar").get<double>();
    const auto& up = j.at("uplink_powers_w");
    rec.plan.uplink_powers.resize(static_cast<Eigen::Index>(up.size()));
    for (std::size_t k = 0; k < up.size(); ++k) rec.plan.uplink_powers(static_cast<Eigen::Index>(k)) = up[k].get<double>();
    for (const auto& s : j.at("slots")) {
      reject_unknown(s, {"duration", "beam"}, "plan slot");
      const Eigen::MatrixXcd w = matrix_from_json(json::array({s.at("beam")}));
      rec.plan.slots.push_back({s.at("duration").get<double>(), BeamVector::from(w.row(0).transpose())});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  if (j.contains("channel")) rec.channel = matrix_from_json(j.at("channel"));
  rec.plan.cost_dl = plan_cost(rec.plan);
  return rec;
}

json report_to_json(const VerificationReport& r) {
  json rate = json::array(), energy = json::array();
  for (Eigen::Index k = 0; k < r.rate_margin.size(); ++k) {
    rate.push_back(r.rate_margin(k));
    energy.push_back(r.energy_margin(k));
  }
  return {{"pass", r.pass},
          {"rate_margin", std::move(rate)},
          {"energy_margin_j", std::move(energy)},
          {"duration_residual", r.duration_residual},
          {"worst_violation", r.worst_violation},
          {"violations", r.violations}};
}

}  // namespace wpcn
