// Command-line front end: channel configs in, capacity numbers and sweep
// curves (JSON/CSV) out. All rates are reported in bits per channel use.
// Exit codes: 0 success, 2 config error, 3 solver failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbcap/errors.hpp"
#include "fbcap/json_io.hpp"
#include "fbcap/version.hpp"

namespace {

using nlohmann::json;
using namespace fbcap;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write output file: " + out_path);
    out << text << "\n";
  }
}

NBlockSolver pick_solver(const std::string& method, const ChannelModel& model) {
  if (method == "value-iteration") {
    if (model.order != 1)
      throw ConfigError("nblock: value-iteration requires a first-order "
                        "channel (L = 1)");
    return NBlockSolver::kValueIteration;
  }
  if (method == "trajectory") return NBlockSolver::kTrajectory;
  if (method == "auto")
    return model.order == 1 ? NBlockSolver::kValueIteration
                            : NBlockSolver::kTrajectory;
  throw ConfigError("nblock: unknown method '" + method + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SolverSpec {
  std::string name;   // stationary | first_order | butman | nblock |
                      // waterfill | simulate
  std::string label;  // as written in the sweep file, e.g. "nblock(n=20)"
  int n = 0;
  long long steps = 100000;
  std::uint64_t seed = 1;
};

SolverSpec parse_solver_spec(const std::string& text) {
  SolverSpec spec;
  spec.label = text;
  const auto open = text.find('(');
  spec.name = text.substr(0, open);
  if (open != std::string::npos) {
    const auto close = text.rfind(')');
    if (close == std::string::npos || close < open)
      throw ConfigError("sweep: malformed solver spec '" + text + "'");
    std::string args = text.substr(open + 1, close - open - 1);
    std::istringstream in(args);
    std::string kv;
    while (std::getline(in, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("sweep: malformed solver argument '" + kv +
                          "' in '" + text + "'");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      try {
        if (key == "n")
          spec.n = std::stoi(value);
        else if (key == "steps")
          spec.steps = std::stoll(value);
        else if (key == "seed")
          spec.seed = std::stoull(value);
        else
          throw ConfigError("sweep: unknown solver argument '" + key +
                            "' in '" + text + "'");
      } catch (const std::invalid_argument&) {
        throw ConfigError("sweep: non-numeric value for '" + key + "' in '" +
                          text + "'");
      }
    }
  }
  const bool known = spec.name == "stationary" || spec.name == "first_order" ||
                     spec.name == "butman" || spec.name == "nblock" ||
                     spec.name == "waterfill" || spec.name == "simulate";
  if (!known) throw ConfigError("sweep: unknown solver '" + spec.name + "'");
  if ((spec.name == "nblock" || spec.name == "waterfill") && spec.n < 1)
    throw ConfigError("sweep: solver '" + spec.name + "' needs n >= 1");
  return spec;
}

struct SweepRow {
  double P;
  double snr_db;
  std::string solver;
  double rate_bits;
  double power_achieved;
  std::optional<double> gamma;
  std::optional<double> residual;
};

// One solver at one power point. `stationary_cache` avoids re-solving the
// stationary program when `simulate` validates its policy at the same P.
SweepRow run_sweep_point(const ChannelModel& model, double P,
                         const SolverSpec& spec,
                         std::optional<StationaryResult>& stationary_cache) {
  SweepRow row;
  row.P = P;
  row.snr_db = 10.0 * std::log10(P / model.sigma_w2);
  row.solver = spec.label;

  auto stationary_at = [&]() -> const StationaryResult& {
    if (!stationary_cache || stationary_cache->P != P)
      stationary_cache = solve_stationary(model, P);
    return *stationary_cache;
  };

  if (spec.name == "stationary") {
    const StationaryResult& r = stationary_at();
    row.rate_bits = r.I_max_bits;
    row.power_achieved = P + r.power_residual;
    row.residual = r.riccati_residual;
  } else if (spec.name == "first_order") {
    if (model.order != 1)
      throw ConfigError("sweep: first_order requires a first-order channel");
    const auto r = first_order_rate(model.a(0), model.c(0), model.sigma_w2, P);
    row.rate_bits = r.I_max_bits;
    row.power_achieved = P;
    row.residual = r.quartic_residual;
  } else if (spec.name == "butman") {
    if (model.order != 1 || model.a(0) != 0.0)
      throw ConfigError("sweep: butman requires a first-order AR channel "
                        "(a = 0)");
    const auto r = butman_ar1_rate(model.c(0), model.sigma_w2, P);
    row.rate_bits = r.I_max_bits;
    row.power_achieved = P;
    const double g = (r.chi + std::abs(model.c(0))) / r.chi;
    row.residual = std::abs(r.chi * r.chi - 1.0 -
                            (P / model.sigma_w2) * g * g);
  } else if (spec.name == "nblock") {
    const auto solver = model.order == 1 ? NBlockSolver::kValueIteration
                                         : NBlockSolver::kTrajectory;
    const auto [gamma, r] = calibrate_gamma(model, spec.n, P, solver);
    row.rate_bits = r.capacity_bits;
    row.power_achieved = r.power;
    row.gamma = gamma;
    row.residual = std::abs(r.power - P) / P;
  } else if (spec.name == "waterfill") {
    const auto r = feedforward_capacity(model, spec.n, P);
    row.rate_bits = r.capacity_bits;
    row.power_achieved = P;
  } else {  // simulate
    const StationaryResult& s = stationary_at();
    PolicyStage stage{s.d, s.e};
    const SimReport rep = simulate(model, stage, spec.steps, spec.seed);
    row.rate_bits = rep.empirical_rate_bits;
    row.power_achieved = rep.empirical_power;
    row.residual = rep.k_traj_mismatch;
  }
  return row;
}

int run_sweep(const std::string& spec_path) {
  std::ifstream in(spec_path);
  if (!in) throw ConfigError("cannot open sweep spec: " + spec_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json spec;
  try {
    spec = json::parse(buf.str());
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("sweep spec: invalid JSON: ") + err.what());
  }
  if (!spec.is_object()) throw ConfigError("sweep spec: must be an object");
  if (!spec.contains("channel"))
    throw ConfigError("sweep spec: missing field 'channel'");
  const ChannelModel model = load_channel_config(spec.at("channel").dump());

  std::vector<double> powers;
  if (spec.contains("powers")) {
    for (const auto& p : spec.at("powers")) {
      if (!p.is_number() || p.get<double>() <= 0.0)
        throw ConfigError("sweep spec: 'powers' must be positive numbers");
      powers.push_back(p.get<double>());
    }
  } else if (spec.contains("snr_db")) {
    for (const auto& s : spec.at("snr_db")) {
      if (!s.is_number())
        throw ConfigError("sweep spec: 'snr_db' must be numbers");
      powers.push_back(model.sigma_w2 *
                       std::pow(10.0, s.get<double>() / 10.0));
    }
  } else {
    throw ConfigError("sweep spec: need 'powers' or 'snr_db'");
  }
  if (powers.empty()) throw ConfigError("sweep spec: empty power grid");

  if (!spec.contains("solvers") || !spec.at("solvers").is_array() ||
      spec.at("solvers").empty())
    throw ConfigError("sweep spec: 'solvers' must be a nonempty array");
  std::vector<SolverSpec> solvers;
  for (const auto& s : spec.at("solvers")) {
    if (!s.is_string())
      throw ConfigError("sweep spec: solver entries must be strings");
    solvers.push_back(parse_solver_spec(s.get<std::string>()));
  }
  const std::string out_path = spec.value("output", std::string{});

  std::vector<SweepRow> rows;
  for (double P : powers) {
    std::optional<StationaryResult> cache;
    for (const auto& solver : solvers)
      rows.push_back(run_sweep_point(model, P, solver, cache));
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    if (x.P != y.P) return x.P < y.P;
    return x.solver < y.solver;
  });

  std::ostringstream csv;
  csv << "P,snr_db,solver,rate_bits,power_achieved,gamma,residual";
  for (const auto& r : rows) {
    csv << "\n"
        << format_double(r.P) << ',' << format_double(r.snr_db) << ','
        << r.solver << ',' << format_double(r.rate_bits) << ','
        << format_double(r.power_achieved) << ','
        << (r.gamma ? format_double(*r.gamma) : std::string{}) << ','
        << (r.residual ? format_double(*r.residual) : std::string{});
  }
  emit(csv.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback information rates and capacities of power-"
               "constrained Gaussian noise channels with rational (ARMA) "
               "spectra"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, policy_path, spec_path, out_path, method = "auto";
  double a = 0.0, c = 0.0, sigma_w2 = 1.0, power = 0.0, gamma = 0.0;
  int n = 0;
  long long steps = 0;
  std::uint64_t seed = 1;

  auto* cmd_stationary =
      app.add_subcommand("stationary", "Maximal stationary-source rate");
  cmd_stationary->add_option("--config", config_path)->required();
  cmd_stationary->add_option("--power", power)->required();
  cmd_stationary->add_option("--out", out_path);

  auto* cmd_first =
      app.add_subcommand("first-order", "Closed-form first-order rate");
  cmd_first->add_option("--a", a)->required();
  cmd_first->add_option("--c", c)->required();
  cmd_first->add_option("--sigma-w2", sigma_w2)->required();
  cmd_first->add_option("--power", power)->required();
  cmd_first->add_option("--out", out_path);

  auto* cmd_butman =
      app.add_subcommand("butman", "First-order AR feedback-code rate");
  cmd_butman->add_option("--c", c)->required();
  cmd_butman->add_option("--sigma-w2", sigma_w2)->required();
  cmd_butman->add_option("--power", power)->required();
  cmd_butman->add_option("--out", out_path);

  auto* cmd_nblock =
      app.add_subcommand("nblock", "n-block feedback capacity");
  cmd_nblock->add_option("--config", config_path)->required();
  cmd_nblock->add_option("--n", n)->required();
  auto* opt_gamma = cmd_nblock->add_option("--gamma", gamma);
  auto* opt_power = cmd_nblock->add_option("--power", power);
  cmd_nblock->add_option("--method", method)
      ->check(CLI::IsMember({"auto", "value-iteration", "trajectory"}));
  cmd_nblock->add_option("--out", out_path);
  opt_gamma->excludes(opt_power);

  auto* cmd_waterfill =
      app.add_subcommand("waterfill", "Feed-forward capacity baseline");
  cmd_waterfill->add_option("--config", config_path)->required();
  cmd_waterfill->add_option("--n", n)->required();
  cmd_waterfill->add_option("--power", power)->required();
  cmd_waterfill->add_option("--out", out_path);

  auto* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo validation");
  cmd_sim->add_option("--config", config_path)->required();
  cmd_sim->add_option("--policy", policy_path)->required();
  cmd_sim->add_option("--steps", steps)->required();
  cmd_sim->add_option("--seed", seed)->required();
  cmd_sim->add_option("--out", out_path);

  auto* cmd_sweep = app.add_subcommand("sweep", "Power/SNR sweep to CSV");
  cmd_sweep->add_option("--spec", spec_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_stationary->parsed()) {
      const ChannelModel model = load_channel_config_file(config_path);
      const StationaryResult r = solve_stationary(model, power);
      emit(stationary_result_json(r, model), out_path);
    } else if (cmd_first->parsed()) {
      const FirstOrderResult r = first_order_rate(a, c, sigma_w2, power);
      emit(first_order_result_json(r, a, c, sigma_w2, power), out_path);
    } else if (cmd_butman->parsed()) {
      const ButmanResult r = butman_ar1_rate(c, sigma_w2, power);
      emit(butman_result_json(r, c, sigma_w2, power), out_path);
    } else if (cmd_nblock->parsed()) {
      const ChannelModel model = load_channel_config_file(config_path);
      const NBlockSolver solver = pick_solver(method, model);
      NBlockResult r;
      if (opt_power->count() > 0) {
        r = calibrate_gamma(model, n, power, solver).second;
      } else if (opt_gamma->count() > 0) {
        const ShadowPrice price(gamma);
        r = (solver == NBlockSolver::kValueIteration)
                ? value_iteration_nblock(model, price, n)
                : trajectory_optimize(model, price, n);
      } else {
        throw ConfigError("nblock: need either --gamma or --power");
      }
      emit(nblock_result_json(r, model), out_path);
    } else if (cmd_waterfill->parsed()) {
      const ChannelModel model = load_channel_config_file(config_path);
      const WaterfillResult r = feedforward_capacity(model, n, power);
      emit(waterfill_result_json(r, model, power), out_path);
    } else if (cmd_sim->parsed()) {
      const ChannelModel model = load_channel_config_file(config_path);
      const PolicySpec policy = load_policy_file(policy_path);
      const SimReport r =
          policy.stationary
              ? simulate(model, policy.stages.front(), steps, seed)
              : simulate(model, policy.stages, steps, seed);
      emit(sim_report_json(r, model), out_path);
    } else if (cmd_sweep->parsed()) {
      return run_sweep(spec_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what()
              << " (residual " << e.residual() << ")\n";
    return kExitSolver;
  }
  return 0;
}
