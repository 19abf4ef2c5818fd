#include "lzsm/phase_control.hpp"

#include <cmath>
#include <limits>

namespace lzsm {

namespace {

constexpr double kInterferenceEps = 1e-15;  // below this the phase has no lever

void require_alpha(double alpha, const char* where) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error(std::string(where) + ": alpha must lie in [0, 1]");
}

/// Interference amplitude C = 2 alpha beta e^{-pi delta} sqrt(1 - e^{-2 pi delta}).
double interference_amplitude(double alpha, double delta) {
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  return 2.0 * alpha * beta * std::exp(-kPi * delta) * std::sqrt(-std::expm1(-kTwoPi * delta));
}

double baseline(double alpha, double delta) {
  const double p = lz_probability(delta);
  return alpha * alpha * p + (1.0 - alpha * alpha) * (1.0 - p);
}

struct BranchPair {
  double primary = 0.0;
  std::optional<double> alt{};
};

/// Both solutions of cos(offset + phi) = c in (-pi, pi], primary = smaller |phi|.
BranchPair branches_for_cos(double c, double offset) {
  const double th = std::acos(std::clamp(c, -1.0, 1.0));
  const double a = principal_phase(th - offset);
  const double b = principal_phase(-th - offset);
  if (std::abs(principal_phase(a - b)) < 1e-12) return BranchPair{a, {}};
  if (std::abs(a) <= std::abs(b)) return BranchPair{a, b};
  return BranchPair{b, a};
}

}  // namespace

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

InterferenceWindow interference_window(double alpha, double delta) {
  require_alpha(alpha, "interference_window");
  const double em = std::exp(-kPi * delta);           // sqrt(P), to avoid re-rooting
  const double s = std::sqrt(-std::expm1(-kTwoPi * delta));  // sqrt(1 - P)
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  const double lo = alpha * em - beta * s;
  const double hi = alpha * em + beta * s;
  return InterferenceWindow{lo * lo, std::min(1.0, hi * hi)};
}

double width_max_over_alpha(double delta) {
  if (!(delta >= 0.0)) throw std::domain_error("width_max_over_alpha: delta must be non-negative");
  return 2.0 * std::exp(-kPi * delta) * std::sqrt(-std::expm1(-kTwoPi * delta));
}

// ---------------------------------------------------------------------------
// Amplitude-independent phases
// ---------------------------------------------------------------------------

namespace {

PhaseSolution phase_only_solution(ControlObjective objective, double target_cos, double delta,
                                  double tau_i, ZetaMode mode, const char* description) {
  if (tau_i == 0.0) throw std::domain_error("phase solver: tau_i must be nonzero");
  const double offset = theta_offset(delta, std::abs(tau_i), mode);
  const BranchPair b = branches_for_cos(target_cos, offset);
  PhaseSolution sol;
  sol.objective = objective;
  sol.feasible = true;
  sol.phi_i = b.primary;
  sol.phi_alt = b.alt;
  sol.note = description;
  return sol;
}

}  // namespace

PhaseSolution phi_zero_interference(double delta, double tau_i, ZetaMode mode) {
  return phase_only_solution(ControlObjective::ZeroInterference, 0.0, delta, tau_i, mode,
                             "interference term cancelled; population equals the "
                             "phase-insensitive baseline for any initial amplitude");
}

PhaseSolution phi_constructive(double delta, double tau_i, ZetaMode mode) {
  return phase_only_solution(ControlObjective::Constructive, 1.0, delta, tau_i, mode,
                             "maximal final |0>-population (window upper edge)");
}

PhaseSolution phi_destructive(double delta, double tau_i, ZetaMode mode) {
  return phase_only_solution(ControlObjective::Destructive, -1.0, delta, tau_i, mode,
                             "minimal final |0>-population (window lower edge)");
}

// ---------------------------------------------------------------------------
// Target solvers
// ---------------------------------------------------------------------------

PhaseSolution solve_phase_for_target(double alpha, double delta, double tau_i, double p_target,
                                     ZetaMode mode) {
  require_alpha(alpha, "solve_phase_for_target");
  if (!(p_target >= 0.0 && p_target <= 1.0))
    throw std::domain_error("solve_phase_for_target: p_target must lie in [0, 1]");
  if (tau_i == 0.0) throw std::domain_error("solve_phase_for_target: tau_i must be nonzero");
  if (!(delta >= 0.0)) throw std::domain_error("solve_phase_for_target: delta must be non-negative");

  PhaseSolution sol;
  sol.objective = ControlObjective::TargetProbability;
  sol.window = interference_window(alpha, delta);

  const double base = baseline(alpha, delta);
  const double amp = interference_amplitude(alpha, delta);

  if (amp < kInterferenceEps) {
    // No interference lever: either the target is already the baseline
    // (any phase) or nothing reaches it.
    sol.feasible = std::abs(p_target - base) <= 1e-12;
    sol.phi_i = 0.0;
    sol.predicted_probability = base;
    sol.note = sol.feasible
                   ? "interference amplitude vanishes; every phase gives the baseline already"
                   : "interference amplitude vanishes (alpha in {0,1} or delta = 0); "
                     "target differs from the baseline and cannot be reached";
    return sol;
  }

  const double c_req = (p_target - base) / amp;
  if (std::abs(c_req) > 1.0 + 1e-12) {
    sol.feasible = false;
    sol.note = "target lies outside the reachable window";
    return sol;
  }

  const double offset = theta_offset(delta, std::abs(tau_i), mode);
  const BranchPair b = branches_for_cos(c_req, offset);
  sol.feasible = true;
  sol.phi_i = b.primary;
  sol.phi_alt = b.alt;
  sol.predicted_probability =
      final_probability_diabatic(alpha, sol.phi_i, delta, std::abs(tau_i), mode);
  return sol;
}

PhaseSolution transitionless_phase(double alpha, double delta, double tau_i, ZetaMode mode) {
  require_alpha(alpha, "transitionless_phase");
  PhaseSolution sol = solve_phase_for_target(alpha, delta, tau_i, alpha * alpha, mode);
  sol.objective = ControlObjective::Transitionless;
  sol.delta_bound = delta_feasibility_bound(alpha);
  if (!sol.feasible)
    sol.note = "no transitionless phase: requires delta <= " + std::to_string(*sol.delta_bound);
  return sol;
}

double delta_feasibility_bound(double alpha) {
  require_alpha(alpha, "delta_feasibility_bound");
  const double m = std::abs(2.0 * alpha * alpha - 1.0);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(m) / kPi;
}

PhaseSolution transitionless_phase_adiabatic(double b1, double delta, double tau_a,
                                             ZetaMode mode) {
  if (!(b1 > 0.0 && b1 < 1.0))
    throw std::domain_error(
        "transitionless_phase_adiabatic: b1 must lie strictly inside (0, 1)");
  if (!(tau_a > 0.0))
    throw std::domain_error("transitionless_phase_adiabatic: tau_a must be positive");
  if (!(delta >= 0.0))
    throw std::domain_error("transitionless_phase_adiabatic: delta must be non-negative");

  const double b2 = std::sqrt(1.0 - b1 * b1);
  const double p = lz_probability(delta);
  const double four_b = 4.0 * b1 * b1 * b2 * b2;

  PhaseSolution sol;
  sol.objective = ControlObjective::TransitionlessAdiabatic;
  sol.delta_bound = -std::log(four_b) / kTwoPi;  // -ln(4 b1^2 b2^2) / (2 pi)

  const double denom = 2.0 * b1 * b2 * std::sqrt(-std::expm1(-kTwoPi * delta));
  if (denom < kInterferenceEps) {
    // delta = 0: the passage swaps the adiabatic levels entirely.
    sol.feasible = std::abs(b1 * b1 - b2 * b2) <= 1e-12;
    sol.phi_i = 0.0;
    sol.predicted_probability = b2 * b2;
    sol.note = sol.feasible ? "delta = 0 swaps the levels; b1^2 = 1/2 is self-restoring"
                            : "delta = 0 swaps the adiabatic populations; no phase can restore them";
    return sol;
  }

  // Require (1-P) b1^2 + P b2^2 - 2 sqrt(P(1-P)) b1 b2 cos(theta) = b1^2,
  // i.e. cos(theta) = -(2 b1^2 - 1) sqrt(P) / (2 b1 b2 sqrt(1-P)).
  const double c_req = -(2.0 * b1 * b1 - 1.0) * std::sqrt(p) / denom;
  if (std::abs(c_req) > 1.0 + 1e-12) {
    sol.feasible = false;
    sol.note = "no adiabatic transitionless phase: requires delta >= " +
               std::to_string(*sol.delta_bound);
    return sol;
  }
  const double offset = theta_offset(delta, tau_a, mode);
  const BranchPair b = branches_for_cos(c_req, offset);
  sol.feasible = true;
  sol.phi_i = b.primary;
  sol.phi_alt = b.alt;
  sol.predicted_probability = final_probability_adiabatic(b1, sol.phi_i, delta, tau_a, mode);
  return sol;
}

// ---------------------------------------------------------------------------
// Complete localization
// ---------------------------------------------------------------------------

PhaseSolution delta_complete_localization(double alpha, double tau_i, Localization kind,
                                          ZetaMode mode) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error(
        "delta_complete_localization: alpha must lie strictly inside (0, 1)");
  if (tau_i == 0.0) throw std::domain_error("delta_complete_localization: tau_i must be nonzero");

  PhaseSolution sol;
  if (kind == Localization::Destructive) {
    // p_min = 0 <=> e^{-2 pi delta} = 1 - alpha^2.
    const double delta = -std::log1p(-alpha * alpha) / kTwoPi;
    const PhaseSolution ext = phi_destructive(delta, tau_i, mode);
    sol = ext;
    sol.objective = ControlObjective::Destructive;
    sol.delta_value = delta;
    sol.predicted_probability = 0.0;
    sol.window = interference_window(alpha, delta);
    sol.note = "delta tuned so destructive interference empties |0> completely";
  } else {
    // p_max = 1 <=> e^{-pi delta} = alpha.
    const double delta = -std::log(alpha) / kPi;
    const PhaseSolution ext = phi_constructive(delta, tau_i, mode);
    sol = ext;
    sol.objective = ControlObjective::Constructive;
    sol.delta_value = delta;
    sol.predicted_probability = 1.0;
    sol.window = interference_window(alpha, delta);
    sol.note = "delta tuned so constructive interference fills |0> completely";
  }
  sol.feasible = true;
  return sol;
}

}  // namespace lzsm
