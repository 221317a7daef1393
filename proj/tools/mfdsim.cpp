// mfdsim: hybrid MNA/LBM simulation of planar microfluidic channel networks.

#include "mfd/coupling.hpp"
#include "mfd/lbm/io.hpp"
#include "mfd/mna.hpp"
#include "mfd/netmodel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mfd;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kInvalid = 4,
  kInfeasible = 5,
  kDiverged = 6,
  kCapped = 7,
  kOther = 8,
};

struct RunSpec {
  std::string network_path;
  std::string mode = "hybrid";
  coupling::HybridConfig config;
  std::string probes_path;
  std::string output_dir = "mfdsim_out";
};

std::vector<coupling::Probe> read_probes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open probe file: " + path);
  std::vector<coupling::Probe> probes;
  std::set<std::string> labels;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (row == 1 && line.rfind("label", 0) == 0) continue;
    std::stringstream s(line);
    std::string label, x, y;
    if (!std::getline(s, label, ',') || !std::getline(s, x, ',') || !std::getline(s, y))
      throw ParseError(path + ":" + std::to_string(row) + ": expected label,x,y");
    coupling::Probe p;
    p.label = label;
    try {
      p.position = Vec2(std::stod(x), std::stod(y));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(row) + ": coordinates must be numbers");
    }
    if (!labels.insert(label).second) throw ValidationError("duplicate probe label: " + label);
    probes.push_back(p);
  }
  return probes;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_probe_table(const fs::path& path, const json& probes) {
  auto out = open_out(path);
  out << "label,x,y,pressure_pa,speed_m_per_s\n" << std::setprecision(6);
  for (const auto& p : probes)
    out << p["label"].get<std::string>() << ',' << p["x"].get<double>() << ','
        << p["y"].get<double>() << ',' << p["pressure_pa"].get<double>() << ','
        << p["speed_m_per_s"].get<double>() << '\n';
}

template <typename Result>
json sample_probes(const Result& result, const std::vector<coupling::Probe>& probes) {
  json rows = json::array();
  for (const auto& p : probes) {
    const auto v = coupling::sample(result, p.position);
    rows.push_back({{"label", p.label},
                    {"x", p.position.x()},
                    {"y", p.position.y()},
                    {"pressure_pa", v.pressure},
                    {"speed_m_per_s", v.speed}});
  }
  return rows;
}

void write_mna(const fs::path& dir, const mna::AbstractProblem& problem,
               const mna::NodalSolution& solution) {
  auto p = open_out(dir / "mna_pressures.csv");
  mna::write_pressures_csv(p, problem, solution);
  auto q = open_out(dir / "mna_flows.csv");
  mna::write_flows_csv(q, problem, solution);
}

void write_fields(const fs::path& dir, const std::string& stem, const lbm::Macroscopics& fields) {
  auto csv = open_out(dir / (stem + ".csv"));
  lbm::write_fields_csv(csv, fields);
  auto vtk = open_out(dir / (stem + ".vtk"));
  lbm::write_fields_vtk(vtk, fields, stem);
}

int exit_for(coupling::Status status) {
  switch (status) {
    case coupling::Status::converged: return kOk;
    case coupling::Status::diverged: return kDiverged;
    case coupling::Status::capped: return kCapped;
    case coupling::Status::running: return kOther;
  }
  return kOther;
}

int simulate(const RunSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  json summary = {{"network", spec.network_path}, {"mode", spec.mode}, {"status", "error"}};
  summary["config"] = {{"alpha", spec.config.alpha},
                       {"theta", spec.config.theta},
                       {"epsilon", spec.config.epsilon},
                       {"resolution", spec.config.resolution},
                       {"interface_distance_widths", spec.config.interface_distance_widths},
                       {"max_exchanges", spec.config.max_exchanges}};
  const fs::path dir(spec.output_dir);
  int code = kOther;

  auto write_summary = [&] {
    summary["exit_code"] = code;
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "summary.json");
    if (!out) {
      std::cerr << "error: cannot write " << (dir / "summary.json").string() << '\n';
      return false;
    }
    out << summary.dump(2) << '\n';
    return true;
  };

  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    const Network network = load_network(spec.network_path);
    if (const auto report = validate(network); !report.empty())
      throw ValidationError(describe(report));
    const auto probes =
        spec.probes_path.empty() ? std::vector<coupling::Probe>{} : read_probes(spec.probes_path);

    if (spec.mode == "abstract") {
      const auto problem = mna::network_problem(network);
      const auto solution = mna::solve(problem);
      write_mna(dir, problem, solution);
      summary["status"] = "converged";
      code = kOk;
    } else if (spec.mode == "hybrid") {
      std::ofstream log = open_out(dir / "run.log");
      const auto result = coupling::run_hybrid(
          network, spec.config, [&](int n, double r, coupling::Status s) {
            std::ostringstream line;
            line << "exchange=" << n << " residual=" << std::setprecision(6) << r
                 << " status=" << coupling::to_string(s) << '\n';
            log << line.str();
            std::cout << line.str();
          });
      write_mna(dir, result.problem, result.solution);
      for (const auto& region : result.regions)
        write_fields(dir, "region_" + std::to_string(region.region) + "_fields", region.fields);
      summary["status"] = coupling::to_string(result.state.status);
      summary["message"] = result.state.message;
      summary["exchanges"] = result.state.exchange_count;
      summary["final_residual"] =
          result.state.residual_history.empty() ? 0.0 : result.state.residual_history.back();
      summary["lbm_steps"] = result.lbm_steps;
      summary["tau"] = result.tau;
      summary["dt_s"] = result.dt;
      summary["solver_seconds"] = result.seconds;
      summary["regions"] = result.regions.size();
      summary["probes"] = sample_probes(result, probes);
      code = exit_for(result.state.status);
      if (code != kOk) std::cerr << "error: " << result.state.message << '\n';
    } else {
      coupling::MonolithicConfig config;
      config.resolution = spec.config.resolution;
      std::ofstream log = open_out(dir / "run.log");
      const auto result = coupling::run_monolithic(network, config, [&](long n, double change) {
        log << "step=" << n << " change=" << std::setprecision(6) << change << '\n';
      });
      write_fields(dir, "fields", result.fields);
      summary["status"] = coupling::to_string(result.status);
      summary["message"] = result.message;
      summary["lbm_steps"] = result.lbm_steps;
      summary["tau"] = result.tau;
      summary["dt_s"] = result.dt;
      summary["solver_seconds"] = result.seconds;
      summary["probes"] = sample_probes(result, probes);
      code = exit_for(result.status);
      if (code != kOk) std::cerr << "error: " << result.message << '\n';
    }
    if (summary.contains("probes")) write_probe_table(dir / "probes.csv", summary["probes"]);
  } catch (const IoError& e) {
    code = kIo;
    summary["message"] = e.what();
  } catch (const ParseError& e) {
    code = kInvalid;
    summary["message"] = e.what();
  } catch (const ValidationError& e) {
    code = kInvalid;
    summary["message"] = e.what();
  } catch (const PreconditionError& e) {
    code = kInvalid;
    summary["message"] = e.what();
  } catch (const InfeasibleDecomposition& e) {
    code = kInfeasible;
    summary["message"] = e.what();
  } catch (const MachViolation& e) {
    code = kDiverged;
    summary["message"] = e.what();
  } catch (const DivergenceError& e) {
    code = kDiverged;
    summary["message"] = e.what();
  } catch (const std::exception& e) {
    code = kOther;
    summary["message"] = e.what();
  }
  if (code != kOk && summary["status"] == "error")
    std::cerr << "error: " << summary["message"].get<std::string>() << '\n';
  summary["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!write_summary() && code == kOk) code = kIo;
  return code;
}

json load_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open summary file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

double seconds_of(const json& summary) {
  return summary.contains("solver_seconds") ? summary["solver_seconds"].get<double>()
                                            : summary.value("wall_seconds", 0.0);
}

int compare_runs(const std::string& hybrid_path, const std::string& cfd_path,
                 const std::string& out_path) {
  try {
    const json hybrid = load_summary(hybrid_path);
    const json cfd = load_summary(cfd_path);
    const json& hp = hybrid.at("probes");
    const json& cp = cfd.at("probes");
    if (hp.size() != cp.size()) throw ValidationError("probe sets differ in size");

    std::ostringstream table;
    table << "probe,cfd_pressure_pa,hybrid_pressure_pa,pressure_dev_pct,cfd_speed_m_per_s,"
             "hybrid_speed_m_per_s,speed_dev_pct\n"
          << std::setprecision(6);
    for (std::size_t k = 0; k < hp.size(); ++k) {
      const auto& h = hp[k];
      const auto& c = cp[k];
      if (h.at("label") != c.at("label") || h.at("x") != c.at("x") || h.at("y") != c.at("y"))
        throw ValidationError("probe mismatch at row " + std::to_string(k + 1) + ": " +
                              h.at("label").get<std::string>() + " vs " +
                              c.at("label").get<std::string>());
      const double cp_ = c.at("pressure_pa"), hp_ = h.at("pressure_pa");
      const double cs = c.at("speed_m_per_s"), hs = h.at("speed_m_per_s");
      table << h.at("label").get<std::string>() << ',' << cp_ << ',' << hp_ << ','
            << 100.0 * coupling::relative_deviation(cp_, hp_) << ',' << cs << ',' << hs << ','
            << 100.0 * coupling::relative_deviation(cs, hs) << '\n';
    }
    const double tc = seconds_of(cfd), th = seconds_of(hybrid);
    table << "# runtime_s cfd=" << tc << " hybrid=" << th
          << " speedup=" << (th > 0.0 ? tc / th : 0.0) << '\n';

    std::cout << table.str();
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw IoError("cannot write " + out_path);
      out << table.str();
    }
    return kOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid MNA/LBM simulation of microfluidic channel networks"};
  app.require_subcommand(1);

  RunSpec spec;
  auto* sim = app.add_subcommand("simulate", "Run one network");
  sim->add_option("network", spec.network_path, "Network JSON file")->required();
  sim->add_option("--mode", spec.mode, "abstract, hybrid or cfd")
      ->check(CLI::IsMember({"abstract", "hybrid", "cfd"}));
  sim->add_option("--alpha", spec.config.alpha, "Relaxation factor in (0, 1]");
  sim->add_option("--theta", spec.config.theta, "Lattice steps between exchanges");
  sim->add_option("--epsilon", spec.config.epsilon, "Convergence tolerance");
  sim->add_option("--resolution", spec.config.resolution, "Lattice cells per narrowest width");
  sim->add_option("--interface-distance-widths", spec.config.interface_distance_widths,
                  "Interface distance from a junction, in channel widths");
  sim->add_option("--max-exchanges", spec.config.max_exchanges, "Exchange cap");
  sim->add_option("--threads", spec.config.threads, "Worker threads (0: automatic)");
  sim->add_option("--probes", spec.probes_path, "Probe CSV with label,x,y in metres");
  sim->add_option("--out", spec.output_dir, "Output directory");

  std::string hybrid_summary, cfd_summary, report;
  auto* cmp = app.add_subcommand("compare", "Tabulate a hybrid run against a CFD run");
  cmp->add_option("hybrid", hybrid_summary, "summary.json of the hybrid run")->required();
  cmp->add_option("cfd", cfd_summary, "summary.json of the cfd run")->required();
  cmp->add_option("--out", report, "Report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*sim) {
    try {
      coupling::validate(spec.config);
    } catch (const PreconditionError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    }
    return simulate(spec);
  }
  return compare_runs(hybrid_summary, cfd_summary, report);
}
