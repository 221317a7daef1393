#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run mfdsim(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path log = dir / "console.txt";
  const std::string cmd = std::string(MFDSIM_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream s;
  s << in.rdbuf();
  r.output = s.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mfdsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli: abstract run writes the MNA tables") {
  const fs::path dir = scratch("abstract");
  const auto start = std::chrono::steady_clock::now();
  const Run r = mfdsim("simulate " NETWORKS_DIR "/net_cross.json --mode abstract --out " +
                           (dir / "out").string(),
                       dir);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.code == 0);
  CHECK(seconds < 1.0);
  CHECK(slurp(dir / "out" / "mna_pressures.csv").rfind("node,pressure_pa\n", 0) == 0);
  CHECK(slurp(dir / "out" / "mna_pressures.csv").find("n4,750\n") != std::string::npos);
  CHECK(slurp(dir / "out" / "mna_flows.csv").rfind("edge,flow_m2_per_s\n", 0) == 0);
  CHECK(slurp(dir / "out" / "summary.json").find("\"exit_code\": 0") != std::string::npos);
}

TEST_CASE("cli: missing network file") {
  const fs::path dir = scratch("missing");
  const Run r = mfdsim("simulate /nonexistent/net.json --out " + (dir / "out").string(), dir);
  CHECK(r.code == 3);
  CHECK(r.output.find("/nonexistent/net.json") != std::string::npos);
  CHECK(slurp(dir / "out" / "summary.json").find("\"status\": \"error\"") != std::string::npos);
}

TEST_CASE("cli: usage errors") {
  const fs::path dir = scratch("usage");
  CHECK(mfdsim("simulate " NETWORKS_DIR "/net_cross.json --mode quantum", dir).code == 2);
  CHECK(mfdsim("simulate " NETWORKS_DIR "/net_cross.json --alpha 1.5", dir).code == 2);
  CHECK(mfdsim("", dir).code == 2);
}

TEST_CASE("cli: compare identical runs") {
  const fs::path dir = scratch("compare");
  fs::create_directories(dir);
  std::ofstream(dir / "summary.json")
      << R"({"solver_seconds": 2.0, "probes": [)"
         R"({"label": "junction", "x": 0.0, "y": 0.0, "pressure_pa": 800.0, "speed_m_per_s": 0.28}]})";
  const Run r = mfdsim("compare " + (dir / "summary.json").string() + " " +
                           (dir / "summary.json").string() + " --out " + (dir / "table.csv").string(),
                       dir);
  CHECK(r.code == 0);
  const std::string table = slurp(dir / "table.csv");
  CHECK(table.find("junction,800,800,0,0.28,0.28,0\n") != std::string::npos);
  CHECK(table.find("speedup=1\n") != std::string::npos);

  std::ofstream(dir / "other.json")
      << R"({"solver_seconds": 2.0, "probes": [)"
         R"({"label": "outlet", "x": 0.0, "y": 0.0, "pressure_pa": 800.0, "speed_m_per_s": 0.28}]})";
  CHECK(mfdsim("compare " + (dir / "summary.json").string() + " " + (dir / "other.json").string(), dir)
            .code == 4);
}
