#pragma once
// Multi-passage sequencing: stitch single-passage transfer matrices and
// constant-bias waits into full pulse programs, and plan two-passage
// sequences that steer an initial population to a target through
// Stueckelberg interference.
//
// A wait at bias eps0 with Omega = sqrt(Delta^2 + eps0^2) advances the
// relative phase by -sgn(eps0) Omega t (pure-phase picture, exact as
// |eps0|/Delta -> infinity); the exact constant-drive propagator is available
// as the reference and is what the planner solves against.

#include <map>
#include <string>
#include <vector>

#include "lzsm/core.hpp"
#include "lzsm/ode.hpp"
#include "lzsm/phase_control.hpp"
#include "lzsm/transfer.hpp"

namespace lzsm {

// ---------------------------------------------------------------------------
// Pulse programs
// ---------------------------------------------------------------------------

struct PulseSequence {
  std::vector<DriveSegment> segments;
  std::map<std::string, std::string> annotations;  ///< free-form labels, serialized with the program

  /// Validates every segment (sweeps must cross zero, waits non-negative).
  void validate() const;
  double total_duration() const;
};

/// Relative-phase increment of a pure-phase wait: -sgn(eps0) Omega t_wait,
/// NOT reduced to the principal interval (windings matter for planning).
/// Throws std::domain_error for eps0 = 0 (no preferred axis) or t_wait < 0.
double wait_phase(double epsilon0, double delta_gap, double t_wait);

// ---------------------------------------------------------------------------
// Closed-form sequence simulation
// ---------------------------------------------------------------------------

/// How waits are modelled when simulating a sequence in closed form.
enum class WaitMode {
  Auto,       ///< pure phase when |eps0| >= ratio * gap, exact otherwise (warned)
  PurePhase,  ///< always diag(e^{-i phi/2}, e^{+i phi/2}); falls back + warns at eps0 = 0
  Exact       ///< always the closed-form constant-drive propagator
};

struct SequencerOptions {
  WaitMode wait_mode = WaitMode::Auto;
  ZetaMode zeta_mode = ZetaMode::Exact;
  double pure_phase_min_ratio = 10.0;  ///< |eps0|/gap threshold for Auto
};

/// Bookkeeping after each segment of a closed-form simulation.
struct SegmentRecord {
  std::size_t index = 0;
  std::string kind;              ///< "sweep" or "wait"
  Spinor state_after{};
  double p0_after = 0.0;
  double phase_increment = 0.0;  ///< relative-phase change across the segment; for
                                 ///< pure-phase waits the unreduced analytic value
  double delta = 0.0;            ///< per-sweep adiabaticity (0 for waits)
  std::vector<std::string> warnings;
};

struct SequenceResult {
  Spinor final_state{};
  double p0 = 0.0;
  std::vector<SegmentRecord> records;
  std::vector<std::string> warnings;  ///< union of all segment warnings
};

/// Drive-program evolution in the adiabatic-impulse picture: each sweep
/// becomes its single-passage matrix (the sweep's own |velocity| sets its
/// dimensionless clock and adiabaticity), each wait a phase/exact propagator
/// per `options`. The initial state must be diabatic and normalized.
SequenceResult simulate_sequence_aim(const Spinor& initial, const PulseSequence& sequence,
                                     double delta_gap, const SequencerOptions& options = {});

// ---------------------------------------------------------------------------
// Two-passage planning
// ---------------------------------------------------------------------------

/// Geometry shared by planned sequences: symmetric sweeps tau in
/// [-tau_a, tau_a], a wait parked at wait_eps_over_gap * gap on the side the
/// first sweep ends, and a return sweep at -velocity.
struct PlanGeometry {
  double tau_a = 20.0;
  double velocity = 2.0;
  double wait_eps_over_gap = 20.0;
  bool extra_period = false;  ///< add one full 2 pi / Omega to the solved wait

  void validate() const;
};

struct PlanResult {
  bool feasible = false;
  SystemParams params{};
  PulseSequence sequence{};
  Spinor initial_state{};
  std::vector<PhaseSolution> phases;            ///< per-passage phase requirements
  std::vector<double> passage_probabilities;    ///< |0>-population after each segment
  double wait_bias = 0.0;
  double wait_duration = 0.0;
  double wait_phase_applied = 0.0;              ///< realized relative-phase change (principal)
  double predicted_final = 0.0;                 ///< closed-form final |0>-population
  InterferenceWindow first_passage_window{};
  InterferenceWindow reachable{};               ///< two-passage reachable band (diagnostic)
  std::string note;
};

/// Plan a sequence taking |0>-population p_initial to p_target at a given
/// adiabaticity. Uses a single sweep when the first-passage window already
/// covers the target; otherwise picks the intermediate population (exact
/// endpoint values for targets 0/1, max-margin otherwise), solves the first
/// passage's phase in closed form, and solves the wait duration EXACTLY
/// against the full constant-drive propagator -- the population after the
/// return sweep is an exact sinusoid in the wait time, so the smallest
/// non-negative root is available analytically.
PlanResult plan_two_passage(double p_initial, double p_target, double delta,
                            const PlanGeometry& geometry = {});

/// Drive the planned program through the numerical integrator and compare
/// with the plan's closed-form prediction.
AimOdeComparison plan_ode_check(const PlanResult& plan, const IntegratorConfig& config = {});

}  // namespace lzsm
