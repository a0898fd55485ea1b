#include "fbcap/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbcap/errors.hpp"
#include "fbcap/version.hpp"

namespace fbcap {

namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(what + ": invalid JSON: " + err.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array())
    throw ConfigError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number())
      throw ConfigError("field '" + field + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double number_field(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw ConfigError("missing field '" + field + "'");
  if (!j.at(field).is_number())
    throw ConfigError("field '" + field + "' must be a number");
  return j.at(field).get<double>();
}

PolicyStage stage_from_json(const json& j, const std::string& where) {
  if (!j.is_object())
    throw ConfigError(where + " must be an object with 'd' and 'e'");
  if (!j.contains("d")) throw ConfigError(where + ": missing field 'd'");
  PolicyStage stage;
  const auto d = number_array(j.at("d"), where + ".d");
  stage.d = Eigen::Map<const Vector>(d.data(), static_cast<long>(d.size()));
  stage.e = number_field(j, "e");
  if (stage.e < 0.0) throw ConfigError(where + ".e must be >= 0");
  return stage;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json config_echo(const ChannelModel& model) {
  json cfg;
  cfg["a"] = vector_to_json(model.a);
  cfg["c"] = vector_to_json(model.c);
  cfg["sigma_w2"] = model.sigma_w2;
  return cfg;
}

std::string finalize(json doc) {
  doc["version"] = kVersion;
  return doc.dump(2);
}

}  // namespace

ChannelModel load_channel_config(const std::string& json_text) {
  const json j = parse_or_throw(json_text, "channel config");
  if (!j.is_object())
    throw ConfigError("channel config: top level must be an object");
  for (const auto& field : {"a", "c", "sigma_w2"})
    if (!j.contains(field))
      throw ConfigError(std::string("channel config: missing field '") +
                        field + "'");
  const auto a = number_array(j.at("a"), "a");
  const auto c = number_array(j.at("c"), "c");
  const double sigma_w2 = number_field(j, "sigma_w2");
  return build_model(a, c, sigma_w2);
}

ChannelModel load_channel_config_file(const std::string& path) {
  return load_channel_config(read_file(path));
}

PolicySpec load_policy(const std::string& json_text) {
  const json j = parse_or_throw(json_text, "policy");
  if (!j.is_object())
    throw ConfigError("policy: top level must be an object");
  PolicySpec spec;
  if (j.contains("stationary")) {
    spec.stationary = true;
    spec.stages.push_back(stage_from_json(j.at("stationary"), "stationary"));
  } else if (j.contains("stages")) {
    if (!j.at("stages").is_array() || j.at("stages").empty())
      throw ConfigError("policy: 'stages' must be a nonempty array");
    int idx = 0;
    for (const auto& s : j.at("stages")) {
      spec.stages.push_back(
          stage_from_json(s, "stages[" + std::to_string(idx) + "]"));
      ++idx;
    }
  } else {
    throw ConfigError("policy: need either 'stationary' or 'stages'");
  }
  return spec;
}

PolicySpec load_policy_file(const std::string& path) {
  return load_policy(read_file(path));
}

std::string channel_config_json(const ChannelModel& model) {
  return config_echo(model).dump(2);
}

std::string stationary_result_json(const StationaryResult& r,
                                   const ChannelModel& model) {
  json doc;
  doc["config"] = config_echo(model);
  doc["P"] = r.P;
  doc["d"] = vector_to_json(r.d);
  doc["e"] = r.e;
  doc["K"] = matrix_to_json(r.K);
  doc["I_max_nats"] = r.I_max_nats;
  doc["I_max_bits"] = r.I_max_bits;
  doc["riccati_residual"] = r.riccati_residual;
  doc["power_residual"] = r.power_residual;
  return finalize(std::move(doc));
}

std::string first_order_result_json(const FirstOrderResult& r, double a,
                                    double c, double sigma_w2, double P) {
  json doc;
  doc["config"] = {{"a", a}, {"c", c}, {"sigma_w2", sigma_w2}, {"P", P}};
  doc["eta"] = r.eta;
  doc["d"] = r.d;
  doc["e"] = r.e;
  doc["K"] = r.K;
  doc["I_max_bits"] = r.I_max_bits;
  doc["quartic_residual"] = r.quartic_residual;
  doc["awgn_branch"] = r.awgn_branch;
  return finalize(std::move(doc));
}

std::string butman_result_json(const ButmanResult& r, double c,
                               double sigma_w2, double P) {
  json doc;
  doc["config"] = {{"c", c}, {"sigma_w2", sigma_w2}, {"P", P}};
  doc["chi"] = r.chi;
  doc["I_max_bits"] = r.I_max_bits;
  return finalize(std::move(doc));
}

std::string nblock_result_json(const NBlockResult& r,
                               const ChannelModel& model) {
  json doc;
  doc["config"] = config_echo(model);
  doc["n"] = r.n;
  doc["gamma"] = r.gamma;
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"d", vector_to_json(s.d)}, {"e", s.e}});
  doc["stages"] = std::move(stages);
  json ktraj = json::array();
  for (const auto& K : r.K_traj) ktraj.push_back(matrix_to_json(K));
  doc["K_traj"] = std::move(ktraj);
  doc["power"] = r.power;
  doc["capacity_nats"] = r.capacity_nats;
  doc["capacity_bits"] = r.capacity_bits;
  doc["optimizer_stalled"] = r.optimizer_stalled;
  return finalize(std::move(doc));
}

std::string waterfill_result_json(const WaterfillResult& r,
                                  const ChannelModel& model, double P) {
  json doc;
  doc["config"] = config_echo(model);
  doc["P"] = P;
  doc["n"] = r.n;
  doc["eigenvalues"] = r.eigenvalues;
  doc["k"] = r.k;
  doc["capacity_bits"] = r.capacity_bits;
  return finalize(std::move(doc));
}

std::string sim_report_json(const SimReport& r, const ChannelModel& model) {
  json doc;
  doc["config"] = config_echo(model);
  doc["steps"] = r.steps;
  doc["seed"] = r.seed;
  doc["rng"] = r.rng;
  doc["init"] = r.init;
  doc["empirical_power"] = r.empirical_power;
  doc["empirical_power_stderr"] = r.empirical_power_stderr;
  doc["empirical_rate_bits"] = r.empirical_rate_bits;
  doc["empirical_rate_stderr_bits"] = r.empirical_rate_stderr_bits;
  doc["innovation_variance"] = r.innovation_variance;
  doc["innovation_lag1_autocorr"] = r.innovation_lag1_autocorr;
  doc["state_error_cov"] = matrix_to_json(r.state_error_cov);
  doc["k_traj_mismatch"] = r.k_traj_mismatch;
  doc["k_converged"] = r.k_converged;
  return finalize(std::move(doc));
}

}  // namespace fbcap
