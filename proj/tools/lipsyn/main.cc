#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.h"

namespace {

// LIPSYN_LOG in {error, info, debug}; anything else falls back to info.
void configure_logging() {
  auto logger = spdlog::stderr_color_mt("lipsyn");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LIPSYN_LOG")) {
    const std::string level = env;
    if (level == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (level == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else if (level != "info") {
      spdlog::warn("unknown LIPSYN_LOG value '{}', using info", level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  using namespace lipsyn::cli;

  CLI::App app{"State-feedback synthesis and simulation for Lipschitz nonlinear systems"};
  app.require_subcommand(1);

  SynthesizeOptions syn;
  auto* synth = app.add_subcommand("synthesize", "Compute a certified stabilizing gain");
  synth->add_option("--system", syn.system_path, "System JSON file")->required();
  synth->add_option("--config", syn.config_path, "Synthesis config JSON file");
  synth->add_option("--out", syn.out_path, "Gain file to write")->required();

  SimulateOptions sim;
  std::string x0_text;
  auto* simulate = app.add_subcommand("simulate", "Roll out the closed loop u = -K x");
  simulate->add_option("--system", sim.system_path, "System JSON file")->required();
  simulate->add_option("--gain", sim.gain_path, "Gain JSON file")->required();
  simulate->add_option("--x0", x0_text, "Initial state, comma-separated")->required();
  simulate->add_option("--steps", sim.steps, "Number of steps")->required();
  simulate->add_option("--out", sim.out_path, "Trajectory CSV to write")->required();
  simulate->add_flag("--tracking", sim.tracking, "Require the system's tracking block");

  DemoOptions demo;
  int demo_steps = 0;
  auto* demo_cmd = app.add_subcommand("demo", "Synthesize and simulate a built-in example");
  demo_cmd->add_option("examples", demo.examples, "example1 and/or example2")->required();
  demo_cmd->add_flag("--tracking", demo.tracking, "Integrator-augmented tracking variant");
  demo_cmd->add_option("--out", demo.out_dir, "Output directory")->capture_default_str();
  auto* steps_opt = demo_cmd->add_option("--steps", demo_steps, "Override the horizon");
  demo_cmd->add_option("--jobs", demo.jobs, "Examples run in parallel")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*synth) return cmd_synthesize(syn, std::cout, std::cerr);
  if (*simulate) {
    try {
      sim.x0 = parse_vector(x0_text);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: --x0: " << e.what() << "\n";
      return kInputError;
    }
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*steps_opt) demo.steps = demo_steps;
  return cmd_demo(demo, std::cout, std::cerr);
}
