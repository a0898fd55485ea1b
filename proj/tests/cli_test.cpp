// End-to-end checks of the installed command-line tool. Each case shells out
// to the real binary (path injected by the build) with files under a scratch
// directory, then inspects exit codes and parsed output.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fbcap_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string(FBCAP_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.stdout_text = buf.str();
  return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("cli: first-order emits the closed-form rate as JSON") {
  const RunResult r =
      run_cli("first-order --a 0 --c 0.95 --sigma-w2 1 --power 1");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc.at("I_max_bits").get<double>() - 0.8646) < 1e-3);
  CHECK(doc.contains("version"));
  CHECK(doc.at("config").at("c").get<double>() == 0.95);
}

TEST_CASE("cli: butman agrees with first-order on AR(1)") {
  const RunResult r = run_cli("butman --c 0.95 --sigma-w2 1 --power 1");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc.at("chi").get<double>() - 1.8209) < 1e-3);
}

TEST_CASE("cli: waterfill on white noise") {
  const fs::path cfg =
      write_file("white.json", R"({"a":[],"c":[],"sigma_w2":1.0})");
  const RunResult r =
      run_cli("waterfill --config " + cfg.string() + " --n 8 --power 1");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc.at("capacity_bits").get<double>() - 0.5) < 1e-9);
  CHECK(doc.at("k").get<int>() == 8);
}

TEST_CASE("cli: nblock with explicit gamma") {
  const fs::path cfg =
      write_file("awgn.json", R"({"a":[0],"c":[0],"sigma_w2":1.0})");
  const RunResult r = run_cli("nblock --config " + cfg.string() +
                              " --n 2 --gamma 0.25");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc.at("power").get<double>() - 1.0) < 1e-4);
  CHECK(std::abs(doc.at("capacity_bits").get<double>() - 0.5) < 1e-4);
  CHECK(doc.at("stages").size() == 2);
}

TEST_CASE("cli: simulate with a stationary policy file") {
  const fs::path cfg =
      write_file("ar1.json", R"({"a":[0],"c":[0.95],"sigma_w2":1.0})");
  const fs::path policy = write_file(
      "policy.json", R"({"stationary":{"d":[1.8208900383850641],"e":0.0}})");
  const RunResult r =
      run_cli("simulate --config " + cfg.string() + " --policy " +
              policy.string() + " --steps 20000 --seed 7");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.stdout_text);
  CHECK(doc.at("rng").get<std::string>() == "mt19937_64+box-muller");
  CHECK(std::abs(doc.at("empirical_rate_bits").get<double>() - 0.8646) < 0.05);
}

TEST_CASE("cli: malformed input exits 2 and names the problem") {
  const fs::path bad = write_file("bad.json", R"({"a":[0],"c":[0]})");
  const RunResult r =
      run_cli("stationary --config " + bad.string() + " --power 1");
  CHECK(r.exit_code == 2);

  const fs::path unstable =
      write_file("unstable.json", R"({"a":[0],"c":[1.5],"sigma_w2":1.0})");
  const RunResult r2 =
      run_cli("stationary --config " + unstable.string() + " --power 1");
  CHECK(r2.exit_code == 2);

  const RunResult r3 = run_cli("butman --c 0 --sigma-w2 1 --power 1");
  CHECK(r3.exit_code == 2);
}

TEST_CASE("cli: unreachable power target exits 3") {
  const fs::path cfg =
      write_file("awgn2.json", R"({"a":[0],"c":[0],"sigma_w2":1.0})");
  const RunResult r = run_cli("nblock --config " + cfg.string() +
                              " --n 1 --power 1e9 --method trajectory");
  CHECK(r.exit_code == 3);
}

TEST_CASE("cli: sweep produces a deterministic CSV") {
  const fs::path out1 = scratch_dir() / "sweep1.csv";
  const fs::path out2 = scratch_dir() / "sweep2.csv";
  const std::string spec_body = R"json({
    "channel": {"a": [0], "c": [0.95], "sigma_w2": 1.0},
    "powers": [0.5, 1.0],
    "solvers": ["first_order", "butman", "waterfill(n=8)", "nblock(n=2)"],
    "output": ")json";
  const fs::path spec1 =
      write_file("sweep1.json", spec_body + out1.string() + "\"}");
  const fs::path spec2 =
      write_file("sweep2.json", spec_body + out2.string() + "\"}");

  REQUIRE(run_cli("sweep --spec " + spec1.string()).exit_code == 0);
  REQUIRE(run_cli("sweep --spec " + spec2.string()).exit_code == 0);

  std::ifstream f1(out1), f2(out2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  REQUIRE(!s1.str().empty());
  CHECK(s1.str() == s2.str());  // byte-stable

  std::istringstream lines(s1.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "P,snr_db,solver,rate_bits,power_achieved,gamma,residual");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);  // 2 powers x 4 solvers

  // Rate columns for first_order and butman agree at each power.
  std::istringstream again(s1.str());
  std::getline(again, header);
  double fo_rate = -1.0, bu_rate = -2.0;
  while (std::getline(again, line)) {
    std::istringstream cells(line);
    std::string p, snr, solver, rate;
    std::getline(cells, p, ',');
    std::getline(cells, snr, ',');
    std::getline(cells, solver, ',');
    std::getline(cells, rate, ',');
    if (p == "1" && solver == "first_order") fo_rate = std::stod(rate);
    if (p == "1" && solver == "butman") bu_rate = std::stod(rate);
  }
  CHECK(std::abs(fo_rate - bu_rate) < 1e-9);
}

TEST_CASE("cli: sweep rejects malformed solver specs") {
  const fs::path spec = write_file("bad_sweep.json", R"({
    "channel": {"a": [0], "c": [0.95], "sigma_w2": 1.0},
    "powers": [1.0],
    "solvers": ["nblock"]
  })");
  CHECK(run_cli("sweep --spec " + spec.string()).exit_code == 2);

  const fs::path spec2 = write_file("bad_sweep2.json", R"json({
    "channel": {"a": [0], "c": [0.95], "sigma_w2": 1.0},
    "powers": [1.0],
    "solvers": ["frobnicate(n=2)"]
  })json");
  CHECK(run_cli("sweep --spec " + spec2.string()).exit_code == 2);
}
