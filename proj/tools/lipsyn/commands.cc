#include "commands.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lipsyn/errors.h"
#include "lipsyn/numeric_format.h"
#include "lipsyn/reference_cases.h"
#include "lipsyn/simulation/analysis.h"
#include "lipsyn/simulation/simulate.h"
#include "lipsyn/simulation/trajectory_csv.h"
#include "lipsyn/synthesis/sca.h"
#include "lipsyn/synthesis/synthesis_io.h"
#include "lipsyn/system/system_io.h"
#include "manifest.h"
#include "svg_plot.h"

namespace lipsyn::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string fmt_num(double v) { return format_significant(v, 6); }

}  // namespace

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("'" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("'" + item + "' is not a number");
    }
    v.push_back(d);
  }
  if (v.empty()) throw std::invalid_argument("empty vector");
  return v;
}

std::string manifest_path_for(const std::string& output) {
  fs::path p(output);
  return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

int cmd_synthesize(const SynthesizeOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  RunManifest manifest;
  manifest.command = "synthesize";
  manifest.inputs.push_back(opt.system_path);
  if (!opt.config_path.empty()) manifest.inputs.push_back(opt.config_path);

  auto finish = [&](int code) {
    manifest.exit_code = code;
    manifest.duration_s = seconds_since(start);
    try {
      manifest.write(manifest_path_for(opt.out_path));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return code == kOk ? int(kInputError) : code;
    }
    return code;
  };

  std::optional<system::SystemFile> sf;
  synthesis::SynthesisConfig cfg;
  try {
    const std::string text = read_text(opt.system_path);
    sf.emplace(system::parse_system(text));
    if (!opt.config_path.empty()) cfg = synthesis::load_config_file(opt.config_path);
    manifest.config_hash =
        hex64(fnv1a(synthesis::config_to_json(cfg), fnv1a(text)));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish(kInputError);
  }

  const system::LipschitzSystem plant =
      sf->tracking
          ? system::augment_for_tracking(sf->system, sf->tracking->E, sf->tracking->r).system()
          : sf->system;
  spdlog::info("synthesizing for n={} m={}{}", plant.n(), plant.m(),
               sf->tracking ? " (integrator-augmented)" : "");

  synthesis::ScaResult res;
  try {
    res = synthesis::run_sca(plant, cfg);
  } catch (const InfeasibleInitialization& e) {
    err << "infeasible: " << e.what() << "\n";
    return finish(kInfeasible);
  }

  const synthesis::GainFile gain = synthesis::gain_from_result(res);
  manifest.has_history = true;
  manifest.history = {static_cast<int>(res.history.size()) - 1, res.history.front().iterate.t,
                      res.history.back().iterate.t, res.converged, res.warning};
  try {
    write_text(opt.out_path, synthesis::gain_to_json(gain));
    manifest.outputs.push_back(opt.out_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish(kInputError);
  }

  out << "gain written to " << opt.out_path << "\n";
  out << "K = [";
  for (int i = 0; i < res.K.rows(); ++i) {
    for (int j = 0; j < res.K.cols(); ++j) out << (j || i ? (j ? ", " : "; ") : "") << fmt_num(res.K(i, j));
  }
  out << "]  alpha = " << fmt_num(gain.alpha) << "  kappa = " << fmt_num(gain.kappa)
      << "  iterations = " << manifest.history.iterations << "\n";
  out << "certificate: " << res.certificate.summary() << "\n";
  if (res.warning) err << "warning: " << res.warning_message << "\n";
  if (!res.certificate.valid()) {
    err << "infeasible: final gain failed the stability certificate\n";
    return finish(kInfeasible);
  }
  return finish(kOk);
}

namespace {

struct SimulationOutcome {
  simulation::Trajectory traj;
  Eigen::VectorXd x_eq;
  bool settled = false;
  double final_error = 0.0;
  simulation::DecayFit fit;
  std::optional<double> tracking_error;
};

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.inputs = {opt.system_path, opt.gain_path};

  auto finish = [&](int code) {
    manifest.exit_code = code;
    manifest.duration_s = seconds_since(start);
    try {
      manifest.write(manifest_path_for(opt.out_path));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return code == kOk ? int(kInputError) : code;
    }
    return code;
  };

  if (opt.steps < 1) {
    err << "error: --steps must be at least 1\n";
    return finish(kInputError);
  }

  std::optional<system::SystemFile> sf;
  synthesis::GainFile gain;
  try {
    const std::string text = read_text(opt.system_path);
    sf.emplace(system::parse_system(text));
    gain = synthesis::load_gain_file(opt.gain_path);
    std::string key = text + "|x0=";
    for (double v : opt.x0) key += format_significant(v) + ",";
    key += "|steps=" + std::to_string(opt.steps);
    manifest.config_hash = hex64(fnv1a(key, fnv1a(read_text(opt.gain_path))));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish(kInputError);
  }
  if (opt.tracking && !sf->tracking) {
    err << "error: --tracking needs a system file with a tracking block\n";
    return finish(kInputError);
  }

  SimulationOutcome sim;
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(opt.x0.data(), opt.x0.size());
  std::optional<system::AugmentedSystem> aug;
  try {
    if (sf->tracking) {
      aug.emplace(system::augment_for_tracking(sf->system, sf->tracking->E, sf->tracking->r));
      sim.traj = simulation::simulate_tracking(*aug, gain.K, x0, opt.steps);
    } else {
      sim.traj = simulation::simulate_closed_loop(sf->system, gain.K, x0, opt.steps);
    }
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << "\n";
    return finish(kDiverged);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return finish(kInputError);
  }

  const system::LipschitzSystem& model = aug ? aug->system() : sf->system;
  try {
    sim.x_eq = simulation::estimate_equilibrium(model, sim.traj).x_eq;
    sim.settled = true;
  } catch (const NotConvergedError& e) {
    spdlog::warn("{}; errors are measured from the origin", e.what());
    sim.x_eq = Eigen::VectorXd::Zero(model.n());
  }
  sim.final_error = (sim.traj.final_state() - sim.x_eq).norm();
  try {
    sim.fit = simulation::fit_exponential_decay(sim.traj, sim.x_eq);
  } catch (const std::invalid_argument&) {
    sim.fit.degenerate = true;
  }
  if (aug) {
    const Eigen::VectorXd y = sim.traj.outputs.row(sim.traj.steps()).transpose();
    sim.tracking_error = (y - sim.traj.reference).norm();
  }

  try {
    simulation::write_trajectory_csv(sim.traj, opt.out_path);
    manifest.outputs.push_back(opt.out_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish(kInputError);
  }

  out << "trajectory written to " << opt.out_path << " (" << opt.steps << " steps)\n";
  out << "final error norm " << fmt_num(sim.final_error)
      << (sim.settled ? " (from the settled equilibrium)" : " (from the origin; not settled)")
      << ", fitted decay rate "
      << (sim.fit.degenerate ? std::string("n/a") : fmt_num(sim.fit.rate));
  if (sim.tracking_error) out << ", |y[N] - r| " << fmt_num(*sim.tracking_error);
  out << "\n";
  return finish(kOk);
}

namespace {

int combine(int a, int b) {
  auto rank = [](int c) { return c == kInputError ? 3 : c == kInfeasible ? 2 : c == kDiverged ? 1 : 0; };
  return rank(b) > rank(a) ? b : a;
}

struct CaseOutput {
  int code = kOk;
  std::string out, err;
  std::vector<std::string> files;
};

CaseOutput run_demo_case(const std::string& id, const DemoOptions& opt) {
  CaseOutput res;
  std::ostringstream out, err;
  std::optional<ReferenceCase> found;
  try {
    found.emplace(reference_case(id, opt.tracking));
  } catch (const std::out_of_range& e) {
    res.code = kInputError;
    res.err = std::string("error: ") + e.what() + "\n";
    return res;
  }
  const ReferenceCase& rc = *found;
  const fs::path dir = fs::path(opt.out_dir) / rc.id;
  const std::string system_path = (dir / "system.json").string();
  const std::string config_path = (dir / "config.json").string();
  const std::string gain_path = (dir / "gain.json").string();
  const std::string csv_path = (dir / "trajectory.csv").string();
  try {
    fs::create_directories(dir);
    write_text(system_path, system::system_to_json(rc.plant, rc.tracking));
    write_text(config_path, synthesis::config_to_json(rc.config));
  } catch (const std::exception& e) {
    res.code = kInputError;
    res.err = std::string("error: ") + e.what() + "\n";
    return res;
  }
  res.files = {system_path, config_path};
  out << "== " << rc.id << " ==\n";

  res.code = cmd_synthesize({system_path, config_path, gain_path}, out, err);
  res.files.push_back(manifest_path_for(gain_path));
  if (res.code == kOk) {
    res.files.push_back(gain_path);
    SimulateOptions sim;
    sim.system_path = system_path;
    sim.gain_path = gain_path;
    sim.x0.assign(rc.x0.data(), rc.x0.data() + rc.x0.size());
    sim.steps = opt.steps.value_or(rc.steps);
    sim.out_path = csv_path;
    sim.tracking = rc.tracking.has_value();
    res.code = cmd_simulate(sim, out, err);
    res.files.push_back(manifest_path_for(csv_path));
  }
  if (res.code == kOk) {
    res.files.push_back(csv_path);
    try {
      // Same rollout as simulate, rebuilt from the files it read.
      const synthesis::GainFile gain = synthesis::load_gain_file(gain_path);
      const system::SystemFile sf = system::parse_system(read_text(system_path));
      const Eigen::VectorXd x0 = rc.x0;
      simulation::Trajectory traj;
      if (sf.tracking) {
        traj = simulation::simulate_tracking(
            system::augment_for_tracking(sf.system, sf.tracking->E, sf.tracking->r), gain.K, x0,
            opt.steps.value_or(rc.steps));
      } else {
        traj = simulation::simulate_closed_loop(sf.system, gain.K, x0, opt.steps.value_or(rc.steps));
      }
      for (Eigen::Index i = 0; i < traj.states.cols(); ++i) {
        LinePlot plot;
        const bool integrator = i >= rc.plant.n();
        plot.y_label = integrator ? fmt::format("z{}", i - rc.plant.n() + 1) : fmt::format("x{}", i + 1);
        plot.title = fmt::format("{}: {} vs k", rc.id, plot.y_label);
        plot.values = traj.states.col(i);
        if (rc.tracking && i == rc.tracked_state) plot.reference = rc.tracking->r(0);
        const std::string path = (dir / (plot.y_label + ".svg")).string();
        write_svg(plot, path);
        res.files.push_back(path);
      }
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      res.code = kInputError;
    }
  }
  res.out = out.str();
  res.err = err.str();
  return res;
}

}  // namespace

int cmd_demo(const DemoOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  if (opt.examples.empty()) {
    err << "error: no example given\n";
    return kInputError;
  }
  if (opt.steps && *opt.steps < 1) {
    err << "error: --steps must be at least 1\n";
    return kInputError;
  }
  const int jobs = std::max(1, opt.jobs);
  std::vector<CaseOutput> results(opt.examples.size());
  for (std::size_t first = 0; first < opt.examples.size(); first += jobs) {
    std::vector<std::future<CaseOutput>> batch;
    for (std::size_t i = first; i < std::min(opt.examples.size(), first + jobs); ++i) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 run_demo_case, opt.examples[i], std::cref(opt)));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) results[first + i] = batch[i].get();
  }

  RunManifest manifest;
  manifest.command = "demo";
  int code = kOk;
  std::string key = opt.tracking ? "tracking" : "plain";
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << results[i].out;
    err << results[i].err;
    code = combine(code, results[i].code);
    manifest.inputs.push_back("builtin:" + opt.examples[i]);
    key += "|" + opt.examples[i];
    for (const auto& f : results[i].files) manifest.outputs.push_back(f);
  }
  if (opt.steps) key += "|steps=" + std::to_string(*opt.steps);
  manifest.config_hash = hex64(fnv1a(key));
  manifest.exit_code = code;
  manifest.duration_s = seconds_since(start);
  try {
    fs::create_directories(opt.out_dir);
    manifest.write((fs::path(opt.out_dir) / "demo.manifest.json").string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = combine(code, kInputError);
  }
  return code;
}

}  // namespace lipsyn::cli
