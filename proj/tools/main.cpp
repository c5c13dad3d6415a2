// Copyright 2026 The tvobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "tvobs/csv.hpp"
#include "tvobs/errors.hpp"
#include "tvobs/observer.hpp"
#include "tvobs/scenario.hpp"

namespace {

struct Overrides {
  std::optional<double> dt, horizon, noise;
  std::optional<int> decimate;
  std::optional<std::string> mode;
};

void add_overrides(CLI::App* sub, Overrides& ov) {
  sub->add_option("--dt", ov.dt, "integration step override");
  sub->add_option("--horizon", ov.horizon, "simulation horizon override");
  sub->add_option("--noise", ov.noise, "measurement noise amplitude override");
  sub->add_option("--decimate", ov.decimate, "export decimation override");
  sub->add_option("--mode", ov.mode,
                  "estimator staging override: replay or cascade");
}

// Overridden values go through the same validation as file values.
void apply(tvobs::ScenarioConfig& cfg, const Overrides& ov) {
  if (ov.dt) cfg.dt = *ov.dt;
  if (ov.horizon) cfg.horizon = *ov.horizon;
  if (ov.noise) cfg.noise = *ov.noise;
  if (ov.decimate) cfg.decimate = *ov.decimate;
  if (ov.mode) cfg.mode = *ov.mode;
  tvobs::validate_config(cfg);
}

int run_into(tvobs::ScenarioConfig cfg, const Overrides& ov,
             const std::string& out_dir) {
  apply(cfg, ov);
  const tvobs::ScenarioResult res = tvobs::run_scenario(cfg, out_dir);
  std::cout << tvobs::format_report(res.report);
  std::cout << "outputs written to " << out_dir << "\n";
  return 0;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const tvobs::ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const std::string& issue : e.issues()) {
      std::cerr << "  " << issue << "\n";
    }
    return 2;
  } catch (const tvobs::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tvobs::SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tvobs::EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tvobs::StructError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and identification toolkit for linear time-varying "
      "systems with sinusoidal coefficients."};
  app.require_subcommand(1);

  std::string verify_path;
  double tol = 1e-9;
  CLI::App* sc_verify = app.add_subcommand(
      "verify", "check the observer gain conditions of a scenario");
  sc_verify->add_option("scenario", verify_path, "scenario file")->required();
  sc_verify->add_option("--tol", tol, "largest acceptable residual");

  std::string run_path, run_out = "out";
  Overrides run_ov;
  CLI::App* sc_run = app.add_subcommand(
      "run", "simulate, observe and identify a scenario");
  sc_run->add_option("scenario", run_path, "scenario file")->required();
  sc_run->add_option("--out", run_out, "output directory");
  add_overrides(sc_run, run_ov);

  std::string repro_out = "reference-out";
  Overrides repro_ov;
  CLI::App* sc_repro = app.add_subcommand(
      "reproduce-paper", "regenerate the bundled reference study outputs");
  sc_repro->add_option("--out", repro_out, "output directory");
  add_overrides(sc_repro, repro_ov);

  std::string batch_dir, batch_out = "batch-out";
  Overrides batch_ov;
  CLI::App* sc_batch = app.add_subcommand(
      "batch", "run every .scenario file in a directory");
  sc_batch->add_option("dir", batch_dir, "directory of scenario files")
      ->required();
  sc_batch->add_option("--out", batch_out, "output directory");
  add_overrides(sc_batch, batch_ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  return guarded([&]() -> int {
    if (app.got_subcommand(sc_verify)) {
      const tvobs::ScenarioConfig cfg = tvobs::load_config(verify_path);
      const tvobs::LtvSystem sys = tvobs::make_system(cfg);
      const tvobs::ObserverGains gains = tvobs::make_gains(cfg);
      tvobs::validate_system(sys);
      const tvobs::ConditionReport rep =
          tvobs::verify_conditions(sys, gains, cfg.t0, cfg.t0 + 10.0, 0.01);
      std::cout << "conditions over [" << tvobs::format_sig9(rep.grid_t0)
                << ", " << tvobs::format_sig9(rep.grid_t1) << "] step "
                << tvobs::format_sig9(rep.grid_step) << "\n";
      std::cout << "r1 = " << tvobs::format_sig9(rep.r1) << "\n";
      std::cout << "r2 = " << tvobs::format_sig9(rep.r2) << "\n";
      std::cout << "r3 = " << tvobs::format_sig9(rep.r3) << "\n";
      std::cout << "max = " << tvobs::format_sig9(rep.max_residual())
                << " (tol " << tvobs::format_sig9(tol) << ")\n";
      if (rep.max_residual() > tol) {
        std::cout << "verification failed\n";
        return 4;
      }
      std::cout << "verification passed\n";
      return 0;
    }
    if (app.got_subcommand(sc_run)) {
      return run_into(tvobs::load_config(run_path), run_ov, run_out);
    }
    if (app.got_subcommand(sc_repro)) {
      return run_into(tvobs::parse_config(tvobs::kReferenceScenario), repro_ov,
                      repro_out);
    }
    const int count = tvobs::run_batch(batch_dir, batch_out);
    std::cout << "ran " << count << " scenario"
              << (count == 1 ? "" : "s") << " into " << batch_out << "\n";
    return 0;
  });
}
