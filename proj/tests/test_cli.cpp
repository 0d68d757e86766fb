#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("coboson_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string command = env + " " + COBOSON_CLI + " " + args + " > " + out.string() +
                              " 2> " + err.string();
  const int status = std::system(command.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("preset fig3a to a file") {
  const fs::path target = scratch() / "fig3a.csv";
  const auto r = cli("preset fig3a --out " + target.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const std::string csv = slurp(target);
  CHECK(csv.rfind("delta1,delta2,omega0,v,f2_closed,f2_time,f2_spectral\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 626);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("precondition violations exit 3 naming the constraint") {
  auto r = cli("tunnel --gamma1 -1");
  CHECK(r.code == 3);
  CHECK(r.err.rfind("validation_error: ", 0) == 0);
  CHECK(r.err.find("gamma1 >= 0") != std::string::npos);
  CHECK(r.out.empty());

  r = cli("branching --delta2 0");
  CHECK(r.code == 3);
  CHECK(r.err.find("delta2 > 0") != std::string::npos);

  r = cli("qdot --n-max 500 --r 0.07");
  CHECK(r.code == 3);
  CHECK(r.err.find("n_max <= 103") != std::string::npos);

  r = cli("coboson --weights 0.5,0.5 --n-max 3");
  CHECK(r.code == 3);
}

TEST_CASE("usage and parse errors exit 2") {
  auto r = cli("frobnicate");
  CHECK(r.code == 2);
  CHECK(r.err.rfind("usage_error: ", 0) == 0);
  r = cli("tunnel --v");
  CHECK(r.code == 2);
  r = cli("preset fig3a --format xml");
  CHECK(r.code == 2);

  const fs::path broken = scratch() / "broken.json";
  write_file(broken, "{\n  \"version\": 1,\n  \"kind\": \"tunnel\",\n}\n");
  r = cli("run " + broken.string());
  CHECK(r.code == 2);
  CHECK(r.err.rfind("parse_error: line 4", 0) == 0);

  r = cli("run /nonexistent/scenario.json");
  CHECK(r.code == 2);
  CHECK(r.err.rfind("io_error: ", 0) == 0);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("accuracy errors exit 4") {
  const fs::path doc = scratch() / "short.json";
  write_file(doc, R"({"version":1,"kind":"network","params":{"energies":[0,0.5],"decays":[0.1,0.1],
    "couplings":[[0,1],[1,0]],"horizon":1.0}})");
  const auto r = cli("network " + doc.string());
  CHECK(r.code == 4);
  CHECK(r.err.rfind("accuracy_error: ", 0) == 0);
}

TEST_CASE("subcommands produce their tables") {
  auto r = cli("tunnel --v 1 --gamma1 0.1 --gamma2 0.1 --t-max 1 --dt 0.5");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,p11,p12,delta_p,norm\n0.00000000000e+00,1.00000000000e+00,0.00000000000e+00,", 0) == 0);

  r = cli("tunnel --t-max 1 --dt 0.5 --sweep v=0.5,1");
  CHECK(r.out.rfind("v,t,p11,p12,delta_p,norm\n", 0) == 0);

  r = cli("ep-scan --v-grid 0.25 --gamma-diff-grid 0.5");
  CHECK(r.code == 0);
  CHECK(r.out.find(",exceptional,1.00000000000e+00") != std::string::npos);

  r = cli("branching --omega0 0.5 --v 1 --delta1 0.1 --delta2 0.1");
  CHECK(r.code == 0);
  CHECK(r.out.find(",4.69483568075e-01,") != std::string::npos);

  r = cli("qdot --n-max 2 --r 0.01");
  CHECK(r.out == "n,r,g2,delta\n2,1.00000000000e-02,4.99900000000e-01,5.00100000000e-01\n");

  const fs::path spectrum = scratch() / "spectrum.txt";
  write_file(spectrum, "# weights\n5\n3\n2\n");
  r = cli("coboson --spectrum " + spectrum.string() + " --n-max 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("n,chi_ratio,lower,upper,fragment_norm\n1,6.20000000000e-01,", 0) == 0);

  r = cli("preset fig1 --format json");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"metadata\"") != std::string::npos);
}

TEST_CASE("network output split") {
  const fs::path traj = scratch() / "traj.csv";
  const fs::path br = scratch() / "branching.csv";
  const auto r = cli("preset fmo_demo --out " + traj.string() + " --branching-out " + br.string());
  CHECK(r.code == 0);
  CHECK(slurp(traj).rfind("t,p_1,p_2,p_3,p_4,p_5,p_6,norm\n", 0) == 0);
  const std::string b = slurp(br);
  CHECK(b.rfind("site,fraction\n1,", 0) == 0);
  CHECK(b.find("\nsurvival,") != std::string::npos);

  const auto combined = cli("preset fmo_demo");
  CHECK(combined.out == slurp(traj) + "\n" + b);
}

TEST_CASE("scenario output section and thread override") {
  const fs::path target = scratch() / "from_scenario.csv";
  const fs::path doc = scratch() / "scenario.json";
  write_file(doc, R"({"version":1,"kind":"branching_sweep","sweep":{"delta2":[0.1,0.2,0.3]},
    "output":{"path":")" + target.string() + R"(","format":"csv"}})");
  auto r = cli("run " + doc.string(), "COBOSON_THREADS=3");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(target).rfind("delta1,", 0) == 0);

  r = cli("run " + doc.string(), "COBOSON_THREADS=zero");
  CHECK(r.code == 3);
}

TEST_CASE("selftest") {
  const auto r = cli("selftest --seed 11");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}
