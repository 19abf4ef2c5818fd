// lzsm: command-line front end for the two-level crossing toolkit.
//
// Subcommands:
//   simulate     integrate (or closed-form propagate) a drive program
//   solve-phase  closed-form preparation-phase solvers
//   window       reachable-probability window for one (alpha^2, delta)
//   sweep        window/feasibility table over a parameter grid
//   plan         one- or two-passage pulse program for a population target
//   validate     closed-form model vs numerical integration on a grid
//
// Exit codes: 0 success, 1 infeasible target or tolerance failure,
// 2 usage/runtime errors raised here; option-parsing errors keep the
// parser's own (>= 100) codes.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lzsm/core.hpp"
#include "lzsm/io.hpp"
#include "lzsm/ode.hpp"
#include "lzsm/phase_control.hpp"
#include "lzsm/sequencer.hpp"
#include "lzsm/transfer.hpp"

using namespace lzsm;

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;

int usage_error(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return kExitUsage;
}

void emit(const std::string& output_path, const std::string& content) {
  if (output_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_file_atomic(output_path, content);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size())
      throw std::invalid_argument("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// System selection shared by the subcommands: either --delta (with optional
// --velocity, default 2) or --gap plus --velocity.
struct SystemOpts {
  double delta = 0.0;
  double gap = 0.0;
  double velocity = 2.0;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* gap_opt = nullptr;

  void attach(CLI::App* cmd) {
    delta_opt = cmd->add_option("--delta", delta, "Adiabaticity parameter");
    gap_opt = cmd->add_option("--gap", gap, "Level-splitting gap (with --velocity)");
    cmd->add_option("--velocity", velocity, "Sweep rate of the bias (default 2)");
  }

  bool provided() const { return delta_opt->count() > 0 || gap_opt->count() > 0; }

  SystemParams resolve() const {
    if (delta_opt->count() > 0 && gap_opt->count() > 0)
      throw std::invalid_argument("pass either --delta or --gap, not both");
    if (gap_opt->count() > 0) {
      SystemParams p{gap, velocity};
      p.validate();
      return p;
    }
    if (delta_opt->count() == 0)
      throw std::invalid_argument("one of --delta or --gap is required");
    return SystemParams::from_adiabaticity(delta, velocity);
  }
};

ZetaMode parse_zeta_mode(const std::string& name) {
  if (name == "exact") return ZetaMode::Exact;
  if (name == "asymptotic") return ZetaMode::Asymptotic;
  throw std::invalid_argument("--zeta must be 'exact' or 'asymptotic'");
}

std::string json_dump(const Json& j) { return j.dump(2) + "\n"; }

Json system_json(const SystemParams& p) {
  return Json{{"gap", p.gap}, {"velocity", p.velocity}, {"delta", p.adiabaticity()}};
}

// ---------------------------------------------------------------------------
// Closed-form staircase view of a drive program: populations jump at each
// sweep's zero crossing (and at the end of an exactly integrated wait) and
// are flat elsewhere. Time bookkeeping mirrors the integrator: the global
// clock starts at the first sweep's own start time (zero otherwise) and then
// accumulates segment durations.
// ---------------------------------------------------------------------------

struct StaircaseRow {
  double t, tau, epsilon, p0;
};

struct Staircase {
  double p_initial = 1.0;
  std::vector<std::pair<double, double>> jumps;  // (global time, p after)
  std::vector<StaircaseRow> rows;

  double p_at(double t) const {
    double p = p_initial;
    for (const auto& [tj, pj] : jumps) {
      if (tj <= t + 1e-12) p = pj;
      else break;
    }
    return p;
  }
};

Staircase build_staircase(const PulseSequence& seq, const SequenceResult& result,
                          double initial_p0) {
  Staircase st;
  st.p_initial = initial_p0;

  double v_ref = 1.0;
  double t = 0.0;
  if (!seq.segments.empty()) {
    if (const auto* sweep = std::get_if<LinearSweep>(&seq.segments.front())) {
      v_ref = std::abs(sweep->velocity);
      t = sweep->t_start;
    }
  }
  const double scale = std::sqrt(v_ref / 2.0);

  auto eps_of = [](const DriveSegment& seg, bool at_end) {
    if (const auto* sweep = std::get_if<LinearSweep>(&seg))
      return sweep->velocity * (at_end ? sweep->t_end : sweep->t_start);
    return std::get<ConstantWait>(seg).epsilon0;
  };

  double p = initial_p0;
  const double eps0 = seq.segments.empty() ? 0.0 : eps_of(seq.segments.front(), false);
  st.rows.push_back({t, scale * t, eps0, p});

  for (std::size_t k = 0; k < seq.segments.size(); ++k) {
    const DriveSegment& seg = seq.segments[k];
    const double dur = segment_duration(seg);
    const double p_after = result.records[k].p0_after;
    if (const auto* sweep = std::get_if<LinearSweep>(&seg)) {
      const double t_cross = t + (0.0 - sweep->t_start);
      st.jumps.emplace_back(t_cross, p_after);
      st.rows.push_back({t_cross, scale * t_cross, 0.0, p});
      st.rows.push_back({t_cross, scale * t_cross, 0.0, p_after});
    } else {
      st.jumps.emplace_back(t + dur, p_after);
    }
    t += dur;
    st.rows.push_back({t, scale * t, eps_of(seg, true), p_after});
    p = p_after;
  }
  return st;
}

std::string staircase_to_csv(const Staircase& st) {
  std::string out = "# lzsm-aim-staircase v1\nt,tau,epsilon,p0\n";
  for (const auto& r : st.rows) {
    out += format_double(r.t);
    out += ',';
    out += format_double(r.tau);
    out += ',';
    out += format_double(r.epsilon);
    out += ',';
    out += format_double(r.p0);
    out += '\n';
  }
  return out;
}

std::string comparison_csv(const Trajectory& traj, const Staircase& st) {
  std::string out = "# lzsm-trajectory-compare v1\nt,tau,epsilon,p0_ode,p0_aim\n";
  for (const auto& s : traj.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.tau);
    out += ',';
    out += format_double(s.epsilon);
    out += ',';
    out += format_double(s.state.p0());
    out += ',';
    out += format_double(st.p_at(s.t));
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  SystemOpts system;
  std::string engine = "ode";
  double alpha2 = 1.0;
  double phi = 0.0;
  double tau_a = 20.0;
  bool descending = false;
  std::string program_path;
  std::string zeta = "exact";
  IntegratorConfig integ;
  std::string format = "csv";
  std::string output;
};

int run_simulate(const SimulateOpts& opt) {
  if (opt.engine != "ode" && opt.engine != "aim" && opt.engine != "both")
    return usage_error("--engine must be one of: ode, aim, both");
  if (opt.format != "csv" && opt.format != "json")
    return usage_error("--format must be 'csv' or 'json'");
  if (opt.format == "json" && opt.engine != "ode")
    return usage_error("--format json is only available with --engine ode");
  if (opt.alpha2 < 0.0 || opt.alpha2 > 1.0)
    return usage_error("--alpha2 must lie in [0, 1]");

  const SystemParams params = opt.system.resolve();
  const ZetaMode zmode = parse_zeta_mode(opt.zeta);

  PulseSequence seq;
  if (!opt.program_path.empty()) {
    std::ifstream in(opt.program_path);
    if (!in) return usage_error("cannot open program file " + opt.program_path);
    Json j = Json::parse(in);
    seq = pulse_sequence_from_json(j);
  } else {
    if (opt.tau_a <= 0.0) return usage_error("--tau-a must be positive");
    auto program = single_sweep_program(-opt.tau_a, opt.tau_a, params.velocity);
    if (opt.descending) {
      auto& sweep = std::get<LinearSweep>(program.front());
      sweep.velocity = -sweep.velocity;
    }
    seq.segments = std::move(program);
  }

  const Spinor s0 = Spinor::from_occupation(opt.alpha2, opt.phi);

  std::optional<EvolveResult> ode;
  if (opt.engine == "ode" || opt.engine == "both")
    ode = evolve(s0, seq.segments, params.gap, opt.integ);

  std::optional<SequenceResult> aim;
  if (opt.engine == "aim" || opt.engine == "both") {
    SequencerOptions so;
    so.zeta_mode = zmode;
    aim = simulate_sequence_aim(s0, seq, params.gap, so);
    for (const auto& w : aim->warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }

  if (opt.engine == "ode") {
    emit(opt.output, opt.format == "csv" ? trajectory_to_csv(ode->trajectory)
                                         : json_dump(trajectory_to_json(ode->trajectory)));
  } else if (opt.engine == "aim") {
    const Staircase st = build_staircase(seq, *aim, s0.p0());
    emit(opt.output, staircase_to_csv(st));
  } else {
    const Staircase st = build_staircase(seq, *aim, s0.p0());
    emit(opt.output, comparison_csv(ode->trajectory, st));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// solve-phase
// ---------------------------------------------------------------------------

struct SolvePhaseOpts {
  SystemOpts system;
  std::string mode;
  double alpha2 = -1.0;
  CLI::Option* alpha2_opt = nullptr;
  double tau_i = -20.0;
  double target = -1.0;
  CLI::Option* target_opt = nullptr;
  std::string zeta = "exact";
  std::string output;
};

int run_solve_phase(const SolvePhaseOpts& opt) {
  const ZetaMode zmode = parse_zeta_mode(opt.zeta);
  if (opt.tau_i >= 0.0) return usage_error("--tau-i must be negative (before the crossing)");

  const bool needs_alpha = opt.mode == "returning" || opt.mode == "returning-adiabatic" ||
                           opt.mode == "target" || opt.mode == "dcl" || opt.mode == "ccl";
  if (needs_alpha && opt.alpha2_opt->count() == 0)
    return usage_error("mode '" + opt.mode + "' requires --alpha2");
  if (opt.alpha2_opt->count() > 0 && (opt.alpha2 < 0.0 || opt.alpha2 > 1.0))
    return usage_error("--alpha2 must lie in [0, 1]");
  const double alpha = opt.alpha2 >= 0.0 ? std::sqrt(opt.alpha2) : 0.0;

  const bool solves_delta = opt.mode == "dcl" || opt.mode == "ccl";
  if (solves_delta && opt.system.provided())
    return usage_error("mode '" + opt.mode + "' computes the adiabaticity itself; drop --delta/--gap");

  std::optional<SystemParams> params;
  double delta = 0.0;
  if (!solves_delta) {
    params = opt.system.resolve();
    delta = params->adiabaticity();
  }

  PhaseSolution sol;
  if (opt.mode == "zero-interference") {
    sol = phi_zero_interference(delta, opt.tau_i, zmode);
  } else if (opt.mode == "destructive") {
    sol = phi_destructive(delta, opt.tau_i, zmode);
  } else if (opt.mode == "constructive") {
    sol = phi_constructive(delta, opt.tau_i, zmode);
  } else if (opt.mode == "returning") {
    sol = transitionless_phase(alpha, delta, opt.tau_i, zmode);
  } else if (opt.mode == "returning-adiabatic") {
    sol = transitionless_phase_adiabatic(alpha, delta, std::abs(opt.tau_i), zmode);
  } else if (opt.mode == "target") {
    if (opt.target_opt->count() == 0) return usage_error("mode 'target' requires --target");
    if (opt.target < 0.0 || opt.target > 1.0)
      return usage_error("--target must lie in [0, 1]");
    sol = solve_phase_for_target(alpha, delta, opt.tau_i, opt.target, zmode);
  } else if (opt.mode == "dcl") {
    sol = delta_complete_localization(alpha, opt.tau_i, Localization::Destructive, zmode);
  } else if (opt.mode == "ccl") {
    sol = delta_complete_localization(alpha, opt.tau_i, Localization::Constructive, zmode);
  } else {
    return usage_error("unknown mode '" + opt.mode +
                       "' (expected zero-interference, destructive, constructive, returning, "
                       "returning-adiabatic, target, dcl, ccl)");
  }

  Json solution = phase_solution_to_json(sol);
  // The amplitude-independent solvers cannot predict a probability on their
  // own; with --alpha2 supplied we can attach the prediction and the window.
  const bool amplitude_free = opt.mode == "zero-interference" || opt.mode == "destructive" ||
                              opt.mode == "constructive";
  if (amplitude_free && opt.alpha2_opt->count() > 0 && sol.feasible) {
    solution["predicted_probability"] =
        final_probability_diabatic(alpha, sol.phi_i, delta, opt.tau_i, zmode);
    solution["window"] = window_to_json(interference_window(alpha, delta));
  }

  if (solves_delta && sol.delta_value) {
    params = SystemParams::from_adiabaticity(*sol.delta_value, opt.system.velocity);
  }

  Json out{{"schema", "lzsm-phase-solution"},
           {"schema_version", 1},
           {"mode", opt.mode},
           {"tau_i", opt.tau_i},
           {"solution", std::move(solution)}};
  if (params) out["system"] = system_json(*params);
  if (opt.alpha2_opt->count() > 0) out["alpha2"] = opt.alpha2;
  emit(opt.output, json_dump(out));
  return sol.feasible ? 0 : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// window
// ---------------------------------------------------------------------------

struct WindowOpts {
  SystemOpts system;
  double alpha2 = -1.0;
  std::string output;
};

int run_window(const WindowOpts& opt) {
  if (opt.alpha2 < 0.0 || opt.alpha2 > 1.0)
    return usage_error("--alpha2 is required and must lie in [0, 1]");
  const SystemParams params = opt.system.resolve();
  const double delta = params.adiabaticity();
  const InterferenceWindow w = interference_window(std::sqrt(opt.alpha2), delta);
  Json out{{"schema", "lzsm-window"},
           {"schema_version", 1},
           {"system", system_json(params)},
           {"alpha2", opt.alpha2},
           {"p_min", w.p_min},
           {"p_max", w.p_max},
           {"width", w.width()},
           {"width_max_over_alpha", width_max_over_alpha(delta)}};
  emit(opt.output, json_dump(out));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
  std::string alphas2;
  std::string deltas;
  std::string phis;  // optional third axis; empty = window table only
  double tau_i = -20.0;
  std::string output;
};

int sweep_threads() {
  const char* env = std::getenv("LZSM_THREADS");
  if (env == nullptr) return 1;
  const long n = std::strtol(env, nullptr, 10);
  if (n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 64));
}

std::string sweep_cell(double alpha2, double delta, double tau_i, const double* phi) {
  const double alpha = std::sqrt(alpha2);
  const InterferenceWindow w = interference_window(alpha, delta);
  const double bound = delta_feasibility_bound(alpha);
  const bool returning_ok = delta <= bound;
  double d_empty = std::numeric_limits<double>::quiet_NaN();
  double d_fill = std::numeric_limits<double>::quiet_NaN();
  if (alpha2 > 0.0 && alpha2 < 1.0) {
    d_empty = *delta_complete_localization(alpha, tau_i, Localization::Destructive).delta_value;
    d_fill = *delta_complete_localization(alpha, tau_i, Localization::Constructive).delta_value;
  }
  std::string row;
  row += format_double(alpha2);
  row += ',';
  row += format_double(delta);
  row += ',';
  row += format_double(w.p_min);
  row += ',';
  row += format_double(w.p_max);
  row += ',';
  row += format_double(w.width());
  row += ',';
  row += returning_ok ? '1' : '0';
  row += ',';
  row += format_double(bound);
  row += ',';
  row += format_double(d_empty);
  row += ',';
  row += format_double(d_fill);
  if (phi != nullptr) {
    row += ',';
    row += format_double(*phi);
    row += ',';
    row += format_double(final_probability_diabatic(alpha, *phi, delta, tau_i));
  }
  row += '\n';
  return row;
}

int run_sweep(const SweepOpts& opt) {
  const std::vector<double> alphas2 = parse_list(opt.alphas2);
  const std::vector<double> deltas = parse_list(opt.deltas);
  const std::vector<double> phis = parse_list(opt.phis);
  if (alphas2.empty() || deltas.empty())
    return usage_error("sweep needs a non-empty grid: pass --alphas2 and --deltas");
  for (double a : alphas2)
    if (a < 0.0 || a > 1.0) return usage_error("--alphas2 entries must lie in [0, 1]");
  for (double d : deltas)
    if (d < 0.0) return usage_error("--deltas entries must be non-negative");

  // With a phase axis every (alpha2, delta, phi) triple gets a row; without
  // one the table is the per-(alpha2, delta) window summary.
  const bool with_phi = !phis.empty();
  const std::size_t per_cell = with_phi ? phis.size() : 1;
  const std::size_t n = alphas2.size() * deltas.size() * per_cell;
  std::vector<std::string> rows(n);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double a2 = alphas2[i / (deltas.size() * per_cell)];
      const double d = deltas[(i / per_cell) % deltas.size()];
      const double* phi = with_phi ? &phis[i % per_cell] : nullptr;
      rows[i] = sweep_cell(a2, d, opt.tau_i, phi);
    }
  };

  const int threads = sweep_threads();
  if (threads <= 1 || n < 2) {
    fill(0, n);
  } else {
    // Work is partitioned by row index and reassembled in index order, so the
    // output is identical regardless of scheduling.
    std::vector<std::future<void>> futures;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      const std::size_t end = std::min(begin + chunk, n);
      futures.push_back(std::async(std::launch::async, fill, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  std::string out =
      "# lzsm-sweep v1\n"
      "alpha2,delta,p_min,p_max,width,returning_feasible,returning_delta_bound,"
      "delta_empty,delta_fill";
  if (with_phi) out += ",phi,p_final";
  out += '\n';
  for (const auto& r : rows) out += r;
  emit(opt.output, out);
  return 0;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanOpts {
  SystemOpts system;
  double p_initial = -1.0;
  double p_target = -1.0;
  double tau_a = 20.0;
  double wait_ratio = 20.0;
  bool extra_period = false;
  bool ode_check = false;
  double rtol = 1e-9;
  double atol = 1e-12;
  std::string output;
};

int run_plan(const PlanOpts& opt) {
  if (opt.p_initial < 0.0 || opt.p_initial > 1.0)
    return usage_error("--p-initial is required and must lie in [0, 1]");
  if (opt.p_target < 0.0 || opt.p_target > 1.0)
    return usage_error("--p-target is required and must lie in [0, 1]");
  const SystemParams params = opt.system.resolve();

  PlanGeometry geometry;
  geometry.tau_a = opt.tau_a;
  geometry.velocity = params.velocity;
  geometry.wait_eps_over_gap = opt.wait_ratio;
  geometry.extra_period = opt.extra_period;

  const PlanResult plan =
      plan_two_passage(opt.p_initial, opt.p_target, params.adiabaticity(), geometry);
  Json out = plan_result_to_json(plan);
  out["schema"] = "lzsm-plan";
  out["schema_version"] = 1;

  if (opt.ode_check && plan.feasible) {
    IntegratorConfig cfg;
    cfg.rtol = opt.rtol;
    cfg.atol = opt.atol;
    cfg.sample_stride = 0;
    out["ode_check"] = comparison_to_json(plan_ode_check(plan, cfg));
  }

  emit(opt.output, json_dump(out));
  return plan.feasible ? 0 : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateOpts {
  double tau_a = 20.0;
  std::string deltas = "0,0.05,0.110318,0.25,0.5";
  std::string alphas2 = "0,0.25,0.5,0.75,1";
  int phis = 8;
  double tolerance = 1e-2;
  double rtol = 1e-9;
  double atol = 1e-12;
  std::string zeta = "exact";
  std::string output;
};

int run_validate(const ValidateOpts& opt) {
  if (opt.tau_a <= 0.0) return usage_error("--tau-a must be positive");
  if (opt.phis < 1) return usage_error("--phis must be at least 1");
  const std::vector<double> deltas = parse_list(opt.deltas);
  const std::vector<double> alphas2 = parse_list(opt.alphas2);
  if (deltas.empty() || alphas2.empty())
    return usage_error("validate needs non-empty --deltas and --alphas2 lists");
  const ZetaMode zmode = parse_zeta_mode(opt.zeta);

  IntegratorConfig cfg;
  cfg.rtol = opt.rtol;
  cfg.atol = opt.atol;
  cfg.sample_stride = 0;

  std::string out =
      "# lzsm-validate v1\nalpha2,delta,phi,p_model,p_ode,abs_error,tolerance,ok\n";
  bool all_ok = true;
  double worst = -1.0;
  double worst_a2 = 0.0, worst_delta = 0.0, worst_phi = 0.0;
  double total_seconds = 0.0;

  for (double delta : deltas) {
    // In the decoupled limit the closed form is exact, so only integrator
    // error remains and the bar tightens accordingly.
    const double tol = delta == 0.0 ? 1e-6 : opt.tolerance;
    for (double a2 : alphas2) {
      for (int k = 0; k < opt.phis; ++k) {
        const double phi = -kPi + kTwoPi * (k + 0.5) / opt.phis;
        const AimOdeComparison cmp =
            compare_aim_vs_ode(std::sqrt(a2), phi, delta, opt.tau_a, cfg, zmode);
        total_seconds += cmp.ode_seconds;
        const bool ok = cmp.abs_error <= tol;
        all_ok = all_ok && ok;
        if (cmp.abs_error > worst) {
          worst = cmp.abs_error;
          worst_a2 = a2;
          worst_delta = delta;
          worst_phi = phi;
        }
        out += format_double(a2);
        out += ',';
        out += format_double(delta);
        out += ',';
        out += format_double(phi);
        out += ',';
        out += format_double(cmp.p_aim);
        out += ',';
        out += format_double(cmp.p_ode);
        out += ',';
        out += format_double(cmp.abs_error);
        out += ',';
        out += format_double(tol);
        out += ',';
        out += ok ? '1' : '0';
        out += '\n';
      }
    }
  }

  out += "# worst: alpha2=" + format_double(worst_a2) + " delta=" + format_double(worst_delta) +
         " phi=" + format_double(worst_phi) + " abs_error=" + format_double(worst) + "\n";
  out += std::string("# result: ") + (all_ok ? "PASS" : "FAIL") +
         " (tau_a=" + format_double(opt.tau_a) + ", tolerance=" + format_double(opt.tolerance) +
         ", ode_seconds=" + format_double(total_seconds) + ")\n";
  emit(opt.output, out);
  return all_ok ? 0 : kExitInfeasible;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{
      "Two-level avoided-crossing toolkit: closed-form transfer matrices, "
      "interference-phase control, pulse planning, and a numerical integrator"};
  app.set_version_flag("--version", "lzsm 1.0.0");
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Integrate or propagate a drive program");
  sim.system.attach(simulate);
  simulate->add_option("--engine", sim.engine, "ode | aim | both (default ode)");
  simulate->add_option("--alpha2", sim.alpha2, "Initial occupation of component 0 (default 1)");
  simulate->add_option("--phi", sim.phi, "Initial relative phase (default 0)");
  simulate->add_option("--tau-a,--tau", sim.tau_a,
                       "Dimensionless half-extent of the single sweep (default 20)");
  simulate->add_flag("--descending", sim.descending, "Sweep the bias downward instead");
  simulate->add_option("--program", sim.program_path,
                       "JSON pulse program (overrides the single-sweep geometry)");
  simulate->add_option("--zeta", sim.zeta, "exact | asymptotic phase integral (default exact)");
  simulate->add_option("--rtol", sim.integ.rtol, "Relative tolerance (default 1e-13)");
  simulate->add_option("--atol", sim.integ.atol, "Absolute tolerance (default 1e-15)");
  simulate->add_option("--max-step", sim.integ.max_step, "Maximum step size (default 0.25)");
  simulate->add_option("--fixed-step", sim.integ.fixed_step,
                       "Use the classical fixed-step integrator with this step");
  simulate->add_option("--stride", sim.integ.sample_stride,
                       "Sample every Nth step; 0 keeps segment endpoints only (default 1)");
  simulate->add_option("--format", sim.format, "csv | json (json for --engine ode)");
  simulate->add_option("--output,-o", sim.output, "Write to a file instead of stdout");

  SolvePhaseOpts sp;
  CLI::App* solve = app.add_subcommand("solve-phase", "Closed-form preparation-phase solvers");
  sp.system.attach(solve);
  solve->add_option("--mode", sp.mode,
                    "zero-interference | destructive | constructive | returning | "
                    "returning-adiabatic | target | dcl | ccl")
      ->required();
  sp.alpha2_opt = solve->add_option("--alpha2", sp.alpha2, "Initial occupation of component 0");
  solve->add_option("--tau-i", sp.tau_i, "Dimensionless start of the passage (default -20)");
  sp.target_opt = solve->add_option("--target", sp.target, "Target probability (mode target)");
  solve->add_option("--zeta", sp.zeta, "exact | asymptotic phase integral (default exact)");
  solve->add_option("--output,-o", sp.output, "Write to a file instead of stdout");

  WindowOpts win;
  CLI::App* window = app.add_subcommand("window", "Reachable-probability window");
  win.system.attach(window);
  window->add_option("--alpha2", win.alpha2, "Initial occupation of component 0")->required();
  window->add_option("--output,-o", win.output, "Write to a file instead of stdout");

  SweepOpts sw;
  CLI::App* sweep = app.add_subcommand("sweep", "Window/feasibility table over a grid");
  sweep->add_option("--alphas2", sw.alphas2, "Comma-separated occupations, e.g. 0.1,0.5,0.9");
  sweep->add_option("--deltas", sw.deltas, "Comma-separated adiabaticities");
  sweep->add_option("--phis", sw.phis,
                    "Comma-separated preparation phases (optional third axis; adds "
                    "phi,p_final columns)");
  sweep->add_option("--tau-i", sw.tau_i,
                    "Dimensionless passage start for phase-dependent columns (default -20)");
  sweep->add_option("--output,-o", sw.output, "Write to a file instead of stdout");

  PlanOpts pl;
  CLI::App* plan = app.add_subcommand("plan", "Pulse program for a population target");
  pl.system.attach(plan);
  plan->add_option("--p-initial", pl.p_initial, "Initial occupation of component 0")->required();
  plan->add_option("--p-target", pl.p_target, "Target occupation after the program")->required();
  plan->add_option("--tau-a", pl.tau_a, "Dimensionless half-extent per sweep (default 20)");
  plan->add_option("--wait-ratio", pl.wait_ratio,
                   "Wait bias in units of the gap (default 20)");
  plan->add_flag("--extra-period", pl.extra_period, "Lengthen the wait by one full period");
  plan->add_flag("--ode-check", pl.ode_check, "Cross-check the plan with the integrator");
  plan->add_option("--rtol", pl.rtol, "Integrator relative tolerance for the check");
  plan->add_option("--atol", pl.atol, "Integrator absolute tolerance for the check");
  plan->add_option("--output,-o", pl.output, "Write to a file instead of stdout");

  ValidateOpts val;
  CLI::App* validate =
      app.add_subcommand("validate", "Closed-form model vs integrator on a grid");
  validate->add_option("--tau-a,--tau", val.tau_a, "Dimensionless half-extent (default 20)");
  validate->add_option("--deltas", val.deltas, "Comma-separated adiabaticities");
  validate->add_option("--alphas2", val.alphas2, "Comma-separated occupations");
  validate->add_option("--phis", val.phis, "Number of evenly spaced phases (default 8)");
  validate->add_option("--tolerance", val.tolerance, "Per-cell tolerance (default 1e-2)");
  validate->add_option("--rtol", val.rtol, "Integrator relative tolerance (default 1e-9)");
  validate->add_option("--atol", val.atol, "Integrator absolute tolerance (default 1e-12)");
  validate->add_option("--zeta", val.zeta, "exact | asymptotic phase integral (default exact)");
  validate->add_option("--output,-o", val.output, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(simulate)) return run_simulate(sim);
    if (app.got_subcommand(solve)) return run_solve_phase(sp);
    if (app.got_subcommand(window)) return run_window(win);
    if (app.got_subcommand(sweep)) return run_sweep(sw);
    if (app.got_subcommand(plan)) return run_plan(pl);
    if (app.got_subcommand(validate)) return run_validate(val);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  return usage_error("no subcommand selected");
}
