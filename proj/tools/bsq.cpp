// bsq: simulate, sweep, verify and calibrate from the command line.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsq/experiment.hpp"

namespace {

std::vector<double> parse_eps(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad eps value `" + item + "`");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral experiments for the 2D inviscid Boussinesq system"};
  app.require_subcommand(1);

  std::string config_path;
  std::string eps_text;
  std::optional<double> C;
  std::string suite = "all";

  auto* simulate = app.add_subcommand("simulate", "Run one simulation");
  simulate->add_option("-c,--config", config_path, "Run configuration")->required();

  auto* sweep = app.add_subcommand("sweep", "Scale theta_0 by each eps and record lifespans");
  sweep->add_option("-c,--config", config_path, "Run configuration")->required();
  sweep->add_option("--eps", eps_text, "Comma-separated decreasing eps list")->required();
  sweep->add_option("--C", C, "Constant for the lifespan bound (default: calibrate on the first row)");

  auto* verify = app.add_subcommand("verify", "Run the property suites");
  verify->add_option("--suite", suite, "lp | bony | solver | diagnostics | all");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the transport constant");
  calibrate->add_option("-c,--config", config_path, "Run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      bsq::VerifyOutcome outcome;
      try {
        outcome = bsq::cmd_verify(suite);
      } catch (const std::invalid_argument& e) {
        std::cerr << "bsq verify: " << e.what() << '\n';
        return 2;
      }
      std::cout << outcome.report.dump(2) << '\n';
      return outcome.passed ? 0 : 1;
    }

    const bsq::RunConfig cfg = bsq::load_run_config(config_path);
    if (*simulate) {
      const bsq::Trajectory traj = bsq::cmd_simulate(cfg);
      std::cout << "final_t " << traj.stop_t << " trigger " << bsq::to_string(traj.reason) << " steps "
                << traj.steps << '\n';
    } else if (*sweep) {
      std::vector<double> eps;
      try {
        eps = parse_eps(eps_text);
      } catch (const std::exception& e) {
        std::cerr << "bsq sweep: " << e.what() << '\n';
        return 2;
      }
      const bsq::SweepResult result = bsq::cmd_sweep(cfg, eps, C, bsq::worker_threads());
      std::cout << "C " << result.C << '\n';
      for (const auto& row : result.rows) {
        std::cout << "eps " << row.eps << " T_num " << row.T_num << " trigger "
                  << bsq::to_string(row.trigger) << '\n';
      }
    } else if (*calibrate) {
      const bsq::CalibrationResult result = bsq::cmd_calibrate(cfg);
      std::cout << "C " << result.C << " records " << result.records << '\n';
    }
  } catch (const bsq::ConfigError& e) {
    std::cerr << "bsq: config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bsq: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
