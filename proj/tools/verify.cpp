#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "pqk/pqk.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of immersed-submanifold identities"};

  std::string scenario_path;
  std::string report_path;
  double fd_step = -1.0;
  double tol_scale = 1.0;
  std::int64_t seed = -1;
  bool list_suites = false;

  app.add_option("--scenario", scenario_path, "scenario JSON file");
  app.add_option("--report", report_path, "write the report JSON here");
  app.add_option("--fd-step", fd_step, "override the finite-difference step");
  app.add_option("--tol-scale", tol_scale, "multiply every suite tolerance by this factor");
  app.add_option("--seed", seed, "override the sample-point seed");
  app.add_flag("--list-suites", list_suites, "print the registered suite names and exit");

  CLI11_PARSE(app, argc, argv);

  if (list_suites) {
    for (const auto& [name, fn] : pqk::suite_registry()) std::cout << name << "\n";
    return 0;
  }
  if (scenario_path.empty()) {
    std::cerr << "error: --scenario is required (or use --list-suites)\n";
    return 2;
  }

  try {
    pqk::Scenario sc = pqk::load_scenario(scenario_path);
    if (fd_step > 0.0) sc.fd_step = fd_step;
    if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    if (tol_scale != 1.0)
      for (auto& [name, tol] : sc.suites) tol *= tol_scale;

    pqk::Report rep = pqk::run_scenario(sc);
    if (!report_path.empty()) pqk::write_report(rep, report_path);

    for (const auto& row : rep.doc["suites"]) {
      std::cout << (row["pass"].get<bool>() ? "PASS " : "FAIL ")
                << row["name"].get<std::string>()
                << "  residual=" << row["residual"].get<double>()
                << "  tol=" << row["tolerance"].get<double>();
      if (row.contains("not_applicable")) std::cout << "  (not applicable)";
      std::cout << "\n";
    }
    std::cout << (rep.pass ? "OK" : "RESIDUAL FAILURE") << "\n";
    return rep.pass ? 0 : 1;
  } catch (const pqk::ChartValidationError& e) {
    std::cerr << "chart validation failure: " << e.what() << "\n";
    return 3;
  } catch (const pqk::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const pqk::DegenerateMetricError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
