#pragma once
// Numerical time-dependent Schroedinger solver for the driven two-level
// system -- the independent oracle against which every closed-form result is
// checked. In the diabatic basis (hbar = 1):
//
//   i d/dt (a0, a1) = -(1/2) [[eps(t), Delta], [Delta, -eps(t)]] (a0, a1)
//
// i.e. da0/dt = (i/2)(eps a0 + Delta a1), da1/dt = (i/2)(Delta a0 - eps a1).
//
// Drives are piecewise programs of linear sweeps and constant-bias waits.
// The solver is an adaptive embedded Runge-Kutta 5(4) pair with dense
// trajectory capture, plus a fixed-step classical RK4 mode for golden runs.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lzsm/core.hpp"
#include "lzsm/transfer.hpp"

namespace lzsm {

// ---------------------------------------------------------------------------
// Drive programs
// ---------------------------------------------------------------------------

/// Bias swept linearly through zero on the segment's own clock:
/// eps(s) = velocity * s for local time s in [t_start, t_end], so the
/// crossing sits at local time 0. velocity may be negative (downward sweep).
struct LinearSweep {
  double velocity = 2.0;
  double t_start = -20.0;
  double t_end = 20.0;

  double duration() const { return t_end - t_start; }
  /// Throws std::domain_error unless velocity != 0, t_start < 0 < t_end.
  void validate() const;
};

/// Bias parked at a constant value for a fixed time.
struct ConstantWait {
  double epsilon0 = 0.0;
  double duration = 0.0;

  /// Throws std::domain_error for negative duration.
  void validate() const;
};

using DriveSegment = std::variant<LinearSweep, ConstantWait>;

double segment_duration(const DriveSegment& seg);
void validate_segment(const DriveSegment& seg);

/// One ascending sweep covering dimensionless times [tau_i, tau_f].
std::vector<DriveSegment> single_sweep_program(double tau_i, double tau_f,
                                               double velocity = 2.0);

/// Program that realizes the time-reversed drive: segments in reverse order,
/// each sweep with negated velocity and mirrored local clock. Evolving
/// conj(psi_final) through it returns conj(psi_initial) (the Hamiltonian is
/// real symmetric), which is how the integrator is cross-checked.
std::vector<DriveSegment> reversed_program(std::span<const DriveSegment> program);

// ---------------------------------------------------------------------------
// Integrator configuration and outputs
// ---------------------------------------------------------------------------

struct IntegratorConfig {
  double rtol = 1e-13;
  double atol = 1e-15;
  double max_step = 0.25;
  double initial_step = 1e-4;
  /// 0 = adaptive RK5(4); > 0 = classical RK4 with this fixed step (golden mode).
  double fixed_step = 0.0;
  /// Record every k-th accepted step; 0 = segment endpoints only.
  std::size_t sample_stride = 1;
  std::size_t max_steps = 20'000'000;  ///< per segment, guards runaway step collapse

  void validate() const;
};

/// One recorded point along the integration.
struct TrajectorySample {
  double t = 0.0;        ///< global time (segments concatenated)
  double tau = 0.0;      ///< t * sqrt(v_ref / 2), v_ref = first sweep's |velocity|
  double epsilon = 0.0;  ///< instantaneous bias
  Spinor state{};        ///< diabatic basis
  BlochVector bloch{};
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double norm_drift = 0.0;  ///< max |norm - 1| observed before any renormalization
  std::vector<std::string> renormalizations;  ///< one entry per boundary renorm
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

struct EvolveResult {
  Spinor final_state{};
  Trajectory trajectory{};
};

/// Raised when the adaptive integrator cannot proceed (step underflow or
/// step budget exhausted); carries the failure location for diagnosis.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double step, std::size_t steps);
  double t() const { return t_; }
  double step_size() const { return step_; }
  std::size_t steps_taken() const { return steps_; }

 private:
  double t_;
  double step_;
  std::size_t steps_;
};

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/// Integrate a drive program. The initial spinor must be normalized and in
/// the diabatic basis. The norm is monitored throughout; the state is
/// renormalized only at segment boundaries, each occurrence logged in the
/// trajectory. Global time starts at the first segment's local start.
EvolveResult evolve(const Spinor& initial, std::span<const DriveSegment> program,
                    double delta_gap, const IntegratorConfig& config = {});

/// Exact propagator for a constant Hamiltonian (bias eps0, gap Delta) over
/// time t, via the closed-form matrix exponential: with
/// Omega = sqrt(Delta^2 + eps0^2), c = eps0/Omega, s = Delta/Omega,
///   U = [[cos(Omega t/2) + i c sin(Omega t/2),  i s sin(Omega t/2)],
///        [i s sin(Omega t/2),                   cos(Omega t/2) - i c sin(Omega t/2)]].
/// Omega = 0 gives the identity. Diabatic-basis tag attached.
TransferMatrix constant_drive_propagator(double epsilon0, double delta_gap, double t);

/// Convenience: apply the exact constant-drive propagator to a state.
Spinor evolve_constant(const Spinor& s, double epsilon0, double delta_gap, double t);

// ---------------------------------------------------------------------------
// Closed form vs ODE comparison
// ---------------------------------------------------------------------------

struct AimOdeComparison {
  double p_aim = 0.0;
  double p_ode = 0.0;
  double abs_error = 0.0;
  double ode_seconds = 0.0;
};

/// Run one ascending sweep tau in [-tau_a, tau_a] (velocity 2, so t = tau)
/// from (alpha, sqrt(1-alpha^2) e^{i phi_i}) both ways: closed form vs full
/// integration. alpha is an amplitude (population alpha^2).
AimOdeComparison compare_aim_vs_ode(double alpha, double phi_i, double delta, double tau_a,
                                    const IntegratorConfig& config = {},
                                    ZetaMode mode = ZetaMode::Exact);

}  // namespace lzsm
