// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lipsyn/errors.h"
#include "lipsyn/lmi/linalg.h"
#include "lipsyn/reference_cases.h"
#include "lipsyn/simulation/analysis.h"
#include "lipsyn/simulation/simulate.h"
#include "lipsyn/synthesis/sca.h"
#include "properties.h"

using namespace lipsyn;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct Synthesized {
  ReferenceCase rc;
  std::optional<synthesis::ScaResult> result;
  std::string error;
  double seconds = 0.0;
  std::optional<system::AugmentedSystem> aug;

  const system::LipschitzSystem& model() const { return aug ? aug->system() : rc.plant; }
};

Synthesized synthesize(const std::string& id, bool tracking) {
  Synthesized s{reference_case(id, tracking)};
  if (s.rc.tracking) {
    s.aug.emplace(system::augment_for_tracking(s.rc.plant, s.rc.tracking->E, s.rc.tracking->r));
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    s.result = synthesis::run_sca(s.model(), s.rc.config);
  } catch (const InfeasibleInitialization& e) {
    s.error = e.what();
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

simulation::Trajectory rollout(const Synthesized& s, const Eigen::MatrixXd& K) {
  return s.aug ? simulation::simulate_tracking(*s.aug, K, s.rc.x0, s.rc.steps)
               : simulation::simulate_closed_loop(s.rc.plant, K, s.rc.x0, s.rc.steps);
}

struct Verdict {
  bool ok = false;
  std::string detail;
};

// ||x[k] - x_eq|| <= 1e-3 for k >= 0.8 N, with x_eq's residual <= 1e-6.
Verdict first_stabilization(const Synthesized& s, const Eigen::MatrixXd& K) {
  try {
    const auto tr = rollout(s, K);
    const auto eq = simulation::estimate_equilibrium(s.rc.plant, tr);
    const Eigen::VectorXd e = simulation::error_norms(tr, eq.x_eq);
    const int from = static_cast<int>(std::ceil(0.8 * s.rc.steps));
    const double tail = e.tail(e.size() - from).maxCoeff();
    return {tail <= 1e-3 && eq.residual <= 1e-6,
            fmt::format("max tail error {:.3g} (<= 1e-3), residual {:.3g} (<= 1e-6)", tail, eq.residual)};
  } catch (const std::exception& ex) {
    return {false, ex.what()};
  }
}

// |y[N] - r| <= 0.05 on the tracked channel.
Verdict tracking_error(const Synthesized& s, const Eigen::MatrixXd& K) {
  try {
    const auto tr = rollout(s, K);
    const double err = std::abs(tr.states(s.rc.steps, s.rc.tracked_state) - s.rc.tracking->r(0));
    return {err <= 0.05, fmt::format("|x{}[N] - r| = {:.3g} (<= 0.05)", s.rc.tracked_state + 1, err)};
  } catch (const DivergenceError& ex) {
    return {false, fmt::format("rollout diverged at step {}", ex.step())};
  }
}

// ||x[N]|| <= 1e-2 and each channel's peaks shrink after the first tenth.
Verdict second_stabilization(const Synthesized& s, const Eigen::MatrixXd& K) {
  try {
    const auto tr = rollout(s, K);
    const double final_norm = tr.final_state().norm();
    int enveloped = 0;
    for (int i = 0; i < tr.states.cols(); ++i)
      if (simulation::peaks_nonincreasing(tr.states.col(i), s.rc.steps / 10)) ++enveloped;
    return {final_norm <= 1e-2 && enveloped == tr.states.cols(),
            fmt::format("||x[N]|| = {:.3g} (<= 1e-2), {}/{} channels enveloped", final_norm,
                        enveloped, tr.states.cols())};
  } catch (const DivergenceError& ex) {
    return {false, fmt::format("rollout diverged at step {}", ex.step())};
  }
}

std::string no_gain(const Synthesized& s) {
  return "no certified gain: " + s.error.substr(0, 60) + (s.error.size() > 60 ? "..." : "");
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);

  const Synthesized ex1 = synthesize("example1", false);
  const Synthesized ex1t = synthesize("example1", true);
  const Synthesized ex2 = synthesize("example2", false);
  const Synthesized ex2t = synthesize("example2", true);

  // 1
  if (ex1.result && ex1.result->certificate.valid()) {
    const auto v = first_stabilization(ex1, ex1.result->K);
    report("example1 stabilization", v.ok && ex1.seconds < 60,
           fmt::format("{}, synthesis {:.2f} s (< 60)", v.detail, ex1.seconds));
  } else {
    report("example1 stabilization", false, ex1.result ? "certificate invalid" : no_gain(ex1));
  }

  // 2
  if (ex1t.result && ex1t.result->certificate.valid()) {
    const auto v = tracking_error(ex1t, ex1t.result->K);
    report("example1 tracking", v.ok, v.detail);
  } else {
    report("example1 tracking", false, ex1t.result ? "certificate invalid" : no_gain(ex1t));
  }

  // 3
  if (ex2.result && ex2.result->certificate.valid()) {
    const auto v = second_stabilization(ex2, ex2.result->K);
    report("example2 stabilization", v.ok, v.detail);
  } else {
    report("example2 stabilization", false, ex2.result ? "certificate invalid" : no_gain(ex2));
  }

  // 4
  if (ex2t.result && ex2t.result->certificate.valid()) {
    const auto v = tracking_error(ex2t, ex2t.result->K);
    report("example2 tracking", v.ok, v.detail);
  } else {
    report("example2 tracking", false, ex2t.result ? "certificate invalid" : no_gain(ex2t));
  }

  // 5
  {
    const Verdict v[4] = {first_stabilization(ex1, ex1.rc.published_gain),
                          tracking_error(ex1t, ex1t.rc.published_gain),
                          second_stabilization(ex2, ex2.rc.published_gain),
                          tracking_error(ex2t, ex2t.rc.published_gain)};
    const char* names[4] = {"ex1", "ex1 tracking", "ex2", "ex2 tracking"};
    bool all = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
      all = all && v[i].ok;
      detail += fmt::format("{}{}: {} ({})", i ? "; " : "", names[i], v[i].ok ? "ok" : "FAIL", v[i].detail);
    }
    report("published-gain oracle", all, detail);
  }

  // 6
  {
    testing::Rng rng(2024);
    bool ok = true;
    int runs = 0;
    double worst = -1e300;
    std::string detail;
    for (const Synthesized* s : {&ex1, &ex1t, &ex2, &ex2t}) {
      if (!s->result || !s->result->certificate.valid()) continue;
      const auto& it = s->result->final_iterate;
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x0 = testing::random_matrix(rng, s->model().n(), 1, 2.0);
        try {
          const auto tr = simulation::simulate_closed_loop(s->model(), s->result->K, x0, s->rc.steps);
          const auto eq = simulation::estimate_equilibrium(s->model(), tr);
          const auto V = simulation::lyapunov_sequence(tr, it.Q, eq.x_eq);
          for (std::size_t k = 0; k + 1 < V.size(); ++k)
            worst = std::max(worst, V[k + 1] - (1 - it.alpha) * V[k] - 1e-8 * (1 + V[k]));
        } catch (const std::exception& e) {
          ok = false;
          detail = fmt::format("{}: {}", s->rc.id, e.what());
        }
        ++runs;
      }
    }
    ok = ok && runs > 0 && worst <= 0.0;
    report("Lyapunov decrease", ok,
           detail.empty() ? fmt::format("{} trajectories over {} certified gains, worst excess {:.3g} (<= 0)",
                                        runs, runs / 20, worst)
                          : detail);
  }

  // 7
  {
    bool ok = true;
    std::string detail;
    for (const Synthesized* s : {&ex1, &ex2}) {
      if (!s->result) {
        ok = false;
        detail += fmt::format("{}: no history; ", s->rc.id);
        continue;
      }
      const auto& h = s->result->history;
      double rise = -1e300;
      for (std::size_t k = 1; k < h.size(); ++k) rise = std::max(rise, h[k].iterate.t - h[k - 1].iterate.t);
      const int iters = static_cast<int>(h.size()) - 1;
      ok = ok && rise <= 1e-6 && iters <= 50;
      detail += fmt::format("{}: {} iterations (<= 50), max t rise {:.3g} (<= 1e-6); ", s->rc.id, iters, rise);
    }
    report("SCA monotonicity", ok, detail.substr(0, detail.size() - 2));
  }

  // 8
  {
    const testing::PropertyReport reports[4] = {
        testing::check_h_dominance(100, 101), testing::check_f_dominance(100, 102),
        testing::check_inverse_bound(100, 103), testing::check_surrogate_conservative(100, 104)};
    bool ok = true;
    std::string detail;
    const char* names[4] = {"H~", "F~", "inverse bound", "surrogate"};
    for (int i = 0; i < 4; ++i) {
      ok = ok && reports[i].passed() && reports[i].trials == 100;
      detail += fmt::format("{}{} {}/{}", i ? ", " : "", names[i], reports[i].trials - reports[i].violations,
                            reports[i].trials);
    }
    report("over-approximation suite", ok, detail + " clean");
  }

  // 9
  {
    const auto r = testing::check_schur_equivalence(200, 105);
    report("Schur equivalence", r.passed() && r.trials == 200,
           fmt::format("{} draws, {} disagreements, {} skipped at |lambda| < 1e-10 ({})", r.trials,
                       r.violations, r.skipped, r.detail));
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
