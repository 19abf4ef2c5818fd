#pragma once
// Closed-form phase-control solvers: choose the initial relative phase phi_i
// of a superposition so that a single passage through the avoided crossing
// steers the final population to a prescribed objective.
//
// Everything here inverts the one formula
//   P0 = alpha^2 P + (1-alpha^2)(1-P) + C(alpha, delta) cos(theta0 + phi_i),
//   C = 2 alpha sqrt(1-alpha^2) e^{-pi delta} sqrt(1 - e^{-2 pi delta}),
// where theta0 = theta_offset(delta, tau_a) collects the phase accumulated by
// the sweep itself. cos = 0 recovers the phase-insensitive baseline, cos = +-1
// the constructive/destructive extremes, and intermediate targets have two
// phase branches +-arccos shifted by -theta0.

#include <optional>
#include <string>

#include "lzsm/core.hpp"
#include "lzsm/transfer.hpp"

namespace lzsm {

/// What a phase solution was asked to achieve.
enum class ControlObjective {
  ZeroInterference,    ///< cos(theta) = 0: baseline population, no interference
  Constructive,        ///< cos(theta) = +1: maximum final |0>-population
  Destructive,         ///< cos(theta) = -1: minimum final |0>-population
  TargetProbability,   ///< arbitrary target inside the reachable window
  Transitionless,      ///< final population equals the initial one (diabatic)
  TransitionlessAdiabatic  ///< same, for adiabatic component 0 (the +Omega/2 level)
};

/// Reachable band of final populations over all initial phases.
struct InterferenceWindow {
  double p_min = 0.0;
  double p_max = 1.0;

  double width() const { return p_max - p_min; }
  bool contains(double p, double slack = 0.0) const {
    return p >= p_min - slack && p <= p_max + slack;
  }
};

/// [p_min, p_max] for initial amplitude alpha (population alpha^2):
///   p_max/min = (alpha e^{-pi delta} +- sqrt(1-alpha^2) sqrt(1-e^{-2 pi delta}))^2.
InterferenceWindow interference_window(double alpha, double delta);

/// Window width maximized over alpha (attained at alpha^2 = 1/2):
/// 2 e^{-pi delta} sqrt(1 - e^{-2 pi delta}); its global maximum 1 sits at
/// delta = ln 2 / (2 pi), where the window spans the whole interval [0, 1].
double width_max_over_alpha(double delta);

/// Outcome of a phase solve. Phases are reported in (-pi, pi]; adding any
/// multiple of 2 pi (field `period`) gives an equivalent control. Fields that
/// need the initial amplitude (prediction, window) stay empty for the
/// amplitude-independent solvers.
struct PhaseSolution {
  ControlObjective objective = ControlObjective::ZeroInterference;
  bool feasible = false;
  double phi_i = 0.0;                              ///< primary solution (smallest |phi|)
  std::optional<double> phi_alt{};                 ///< second arccos branch when distinct
  double period = kTwoPi;
  std::optional<double> predicted_probability{};   ///< closed-form P0 at phi_i
  std::optional<InterferenceWindow> window{};      ///< reachable band at (alpha, delta)
  std::optional<double> delta_bound{};             ///< feasibility threshold on delta, if any
  std::optional<double> delta_value{};             ///< solved delta (localization solvers)
  std::string note;                                ///< context / infeasibility reason
};

/// Phase that kills the interference term: phi_i0 = pi/2 - theta0 (mod 2 pi).
PhaseSolution phi_zero_interference(double delta, double tau_i, ZetaMode mode = ZetaMode::Exact);

/// Extremal phases phi_i0 -+ pi/2: cos(theta) = +1 (constructive, P0 = p_max)
/// and cos(theta) = -1 (destructive, P0 = p_min).
PhaseSolution phi_constructive(double delta, double tau_i, ZetaMode mode = ZetaMode::Exact);
PhaseSolution phi_destructive(double delta, double tau_i, ZetaMode mode = ZetaMode::Exact);

/// Solve cos(theta0 + phi_i) = (p_target - baseline)/C for phi_i. Returns
/// both branches; infeasible when p_target lies outside the window. With a
/// vanishing interference amplitude (alpha in {0,1} or delta = 0) any phase
/// is either a solution (target equals baseline) or none is.
PhaseSolution solve_phase_for_target(double alpha, double delta, double tau_i, double p_target,
                                     ZetaMode mode = ZetaMode::Exact);

/// Phase making the passage transitionless in the diabatic sense:
/// P0(final) = alpha^2. Feasible iff alpha^2 lies inside the window, which
/// works out to delta <= delta_feasibility_bound(alpha): slow sweeps swap the
/// populations wholesale and no phase can undo that.
PhaseSolution transitionless_phase(double alpha, double delta, double tau_i,
                                   ZetaMode mode = ZetaMode::Exact);

/// Largest delta at which a transitionless phase exists for initial amplitude
/// alpha: delta* = -(1/pi) ln |2 alpha^2 - 1|. +infinity when alpha^2 = 1/2
/// (every delta works); 0 for alpha in {0, 1} (only the trivial delta = 0).
double delta_feasibility_bound(double alpha);

/// Adiabatic-basis analogue: start in (b1, sqrt(1-b1^2) e^{i phi_i}) of the
/// instantaneous eigenbasis and require component 0's population to return
/// to b1^2. Needs 0 < b1 < 1 strictly and tau_a > 0. Feasible iff
/// exp(-2 pi delta) <= 4 b1^2 (1 - b1^2).
PhaseSolution transitionless_phase_adiabatic(double b1, double delta, double tau_a,
                                             ZetaMode mode = ZetaMode::Exact);

/// Which end of the window should pin the whole population.
enum class Localization {
  Destructive,   ///< p_min = 0: complete destructive localization (empties |0>)
  Constructive,  ///< p_max = 1: complete constructive localization (fills |0>)
};

/// delta at which the window edge reaches exactly 0 or 1 for amplitude alpha:
///   destructive: p_min = 0 at delta = -ln(1 - alpha^2) / (2 pi)
///   constructive: p_max = 1 at delta = -ln(alpha) / pi.
/// Requires 0 < alpha < 1 strictly (the edge cases degenerate).
PhaseSolution delta_complete_localization(double alpha, double tau_i, Localization kind,
                                          ZetaMode mode = ZetaMode::Exact);

}  // namespace lzsm
