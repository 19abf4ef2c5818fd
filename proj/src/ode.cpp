#include "lzsm/ode.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace lzsm {

// ---------------------------------------------------------------------------
// Drive programs
// ---------------------------------------------------------------------------

void LinearSweep::validate() const {
  if (velocity == 0.0 || !std::isfinite(velocity))
    throw std::domain_error("LinearSweep: velocity must be nonzero");
  if (!(t_start < 0.0) || !(t_end > 0.0))
    throw std::domain_error("LinearSweep: need t_start < 0 < t_end so the sweep crosses eps = 0");
}

void ConstantWait::validate() const {
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw std::domain_error("ConstantWait: duration must be non-negative");
  if (!std::isfinite(epsilon0)) throw std::domain_error("ConstantWait: non-finite bias");
}

double segment_duration(const DriveSegment& seg) {
  return std::visit([](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LinearSweep>)
      return s.duration();
    else
      return s.duration;
  }, seg);
}

void validate_segment(const DriveSegment& seg) {
  std::visit([](const auto& s) { s.validate(); }, seg);
}

std::vector<DriveSegment> single_sweep_program(double tau_i, double tau_f, double velocity) {
  if (!(velocity > 0.0)) throw std::domain_error("single_sweep_program: velocity must be positive");
  const double scale = std::sqrt(2.0 / velocity);  // t = tau * sqrt(2/v)
  std::vector<DriveSegment> program;
  program.push_back(LinearSweep{velocity, tau_i * scale, tau_f * scale});
  validate_segment(program.front());
  return program;
}

std::vector<DriveSegment> reversed_program(std::span<const DriveSegment> program) {
  std::vector<DriveSegment> out;
  out.reserve(program.size());
  for (auto it = program.rbegin(); it != program.rend(); ++it) {
    if (const auto* sweep = std::get_if<LinearSweep>(&*it)) {
      out.push_back(LinearSweep{-sweep->velocity, -sweep->t_end, -sweep->t_start});
    } else {
      out.push_back(*it);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrator plumbing
// ---------------------------------------------------------------------------

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::domain_error("IntegratorConfig: tolerances must be positive");
  if (!(max_step > 0.0) || !(initial_step > 0.0))
    throw std::domain_error("IntegratorConfig: step sizes must be positive");
  if (fixed_step < 0.0) throw std::domain_error("IntegratorConfig: fixed_step must be >= 0");
  if (max_steps == 0) throw std::domain_error("IntegratorConfig: max_steps must be >= 1");
}

IntegrationError::IntegrationError(const std::string& what, double t, double step,
                                   std::size_t steps)
    : std::runtime_error(what + " (t = " + std::to_string(t) + ", step = " +
                         std::to_string(step) + ", steps taken = " + std::to_string(steps) + ")"),
      t_(t), step_(step), steps_(steps) {}

namespace {

using State = std::array<Complex, 2>;

State axpy(const State& y, double h, const State& d) {
  return State{y[0] + h * d[0], y[1] + h * d[1]};
}

double state_norm(const State& y) { return std::sqrt(std::norm(y[0]) + std::norm(y[1])); }

// Schroedinger right-hand side at bias eps: dy/dt = (i/2)(eps y0 + D y1,
// D y0 - eps y1).
State rhs(const State& y, double eps, double gap) {
  const Complex ihalf{0.0, 0.5};
  return State{ihalf * (eps * y[0] + gap * y[1]), ihalf * (gap * y[0] - eps * y[1])};
}

// Dormand-Prince 5(4) coefficients (FSAL: stage 7 doubles as stage 1 of the
// next step).
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0,
                 kA75 = -2187.0 / 6784.0, kA76 = 11.0 / 84.0;
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
// 5th-order minus 4th-order weights (error estimator).
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct SegmentContext {
  double (*eps_of)(double, const void*) = nullptr;
  const void* payload = nullptr;
  double gap = 0.0;

  double eps(double s) const { return eps_of(s, payload); }
  State f(double s, const State& y) const { return rhs(y, eps(s), gap); }
};

struct StepOutcome {
  State y{};
  State k_last{};  // derivative at the step end (FSAL reuse)
  State err{};     // embedded 5th-minus-4th-order error estimate
};

StepOutcome dp54_step(const SegmentContext& ctx, double s, double h, const State& y,
                      const State& k1) {
  const State k2 = ctx.f(s + kC2 * h, axpy(y, h, State{kA21 * k1[0], kA21 * k1[1]}));
  const State k3 = ctx.f(s + kC3 * h, State{y[0] + h * (kA31 * k1[0] + kA32 * k2[0]),
                                            y[1] + h * (kA31 * k1[1] + kA32 * k2[1])});
  const State k4 = ctx.f(
      s + kC4 * h, State{y[0] + h * (kA41 * k1[0] + kA42 * k2[0] + kA43 * k3[0]),
                         y[1] + h * (kA41 * k1[1] + kA42 * k2[1] + kA43 * k3[1])});
  const State k5 = ctx.f(
      s + kC5 * h,
      State{y[0] + h * (kA51 * k1[0] + kA52 * k2[0] + kA53 * k3[0] + kA54 * k4[0]),
            y[1] + h * (kA51 * k1[1] + kA52 * k2[1] + kA53 * k3[1] + kA54 * k4[1])});
  const State k6 = ctx.f(
      s + h, State{y[0] + h * (kA61 * k1[0] + kA62 * k2[0] + kA63 * k3[0] + kA64 * k4[0] +
                               kA65 * k5[0]),
                   y[1] + h * (kA61 * k1[1] + kA62 * k2[1] + kA63 * k3[1] + kA64 * k4[1] +
                               kA65 * k5[1])});
  StepOutcome out;
  out.y = State{
      y[0] + h * (kA71 * k1[0] + kA73 * k3[0] + kA74 * k4[0] + kA75 * k5[0] + kA76 * k6[0]),
      y[1] + h * (kA71 * k1[1] + kA73 * k3[1] + kA74 * k4[1] + kA75 * k5[1] + kA76 * k6[1])};
  out.k_last = ctx.f(s + h, out.y);
  const State& k7 = out.k_last;
  out.err = State{
      h * (kE1 * k1[0] + kE3 * k3[0] + kE4 * k4[0] + kE5 * k5[0] + kE6 * k6[0] + kE7 * k7[0]),
      h * (kE1 * k1[1] + kE3 * k3[1] + kE4 * k4[1] + kE5 * k5[1] + kE6 * k6[1] + kE7 * k7[1])};
  return out;
}

double error_ratio(const State& err, const State& y, const State& ynew,
                   const IntegratorConfig& cfg) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

State rk4_step(const SegmentContext& ctx, double s, double h, const State& y) {
  const State k1 = ctx.f(s, y);
  const State k2 = ctx.f(s + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = ctx.f(s + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = ctx.f(s + h, axpy(y, h, k3));
  return State{y[0] + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
               y[1] + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

double sweep_eps(double s, const void* payload) {
  return static_cast<const LinearSweep*>(payload)->velocity * s;
}

double wait_eps(double, const void* payload) {
  return static_cast<const ConstantWait*>(payload)->epsilon0;
}

}  // namespace

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

EvolveResult evolve(const Spinor& initial, std::span<const DriveSegment> program,
                    double delta_gap, const IntegratorConfig& config) {
  config.validate();
  if (!(delta_gap >= 0.0) || !std::isfinite(delta_gap))
    throw std::domain_error("evolve: gap must be non-negative");
  if (initial.basis != Basis::Diabatic)
    throw std::invalid_argument("evolve: initial state must be given in the diabatic basis");
  if (!initial.is_normalized(1e-9))
    throw std::invalid_argument("evolve: initial state must be normalized");
  for (const auto& seg : program) validate_segment(seg);

  // Reference velocity fixes the tau axis of the whole trajectory.
  double v_ref = 1.0;
  for (const auto& seg : program)
    if (const auto* sweep = std::get_if<LinearSweep>(&seg)) {
      v_ref = std::abs(sweep->velocity);
      break;
    }
  const double tau_scale = std::sqrt(v_ref / 2.0);

  // Global time starts at the first segment's local start so a lone sweep
  // plots on its natural [t_start, t_end] axis.
  double global_base = 0.0;
  if (!program.empty()) {
    if (const auto* sweep = std::get_if<LinearSweep>(&program.front()))
      global_base = sweep->t_start;
  }

  EvolveResult result;
  Trajectory& traj = result.trajectory;
  State y{initial.a0, initial.a1};

  auto record = [&](double global_t, double eps) {
    const Complex cross = std::conj(y[0]) * y[1];
    const double n2 = std::norm(y[0]) + std::norm(y[1]);
    TrajectorySample s;
    s.t = global_t;
    s.tau = global_t * tau_scale;
    s.epsilon = eps;
    s.state = Spinor{y[0], y[1], Basis::Diabatic};
    s.bloch = BlochVector{2.0 * cross.real() / n2, 2.0 * cross.imag() / n2,
                          (std::norm(y[0]) - std::norm(y[1])) / n2};
    traj.samples.push_back(s);
  };

  double global_t = global_base;
  bool recorded_initial = false;

  for (std::size_t seg_index = 0; seg_index < program.size(); ++seg_index) {
    const DriveSegment& seg = program[seg_index];
    SegmentContext ctx;
    ctx.gap = delta_gap;
    double s0, s1;
    if (const auto* sweep = std::get_if<LinearSweep>(&seg)) {
      ctx.eps_of = sweep_eps;
      ctx.payload = sweep;
      s0 = sweep->t_start;
      s1 = sweep->t_end;
    } else {
      const auto* wait = std::get_if<ConstantWait>(&seg);
      ctx.eps_of = wait_eps;
      ctx.payload = wait;
      s0 = 0.0;
      s1 = wait->duration;
    }

    if (!recorded_initial) {
      record(global_t, ctx.eps(s0));
      recorded_initial = true;
    }

    const double duration = s1 - s0;
    if (duration > 0.0) {
      double s = s0;
      std::size_t steps = 0;

      if (config.fixed_step > 0.0) {
        // Golden mode: classical RK4, uniform grid landing exactly on s1.
        const auto n = static_cast<std::size_t>(std::ceil(duration / config.fixed_step));
        const double h = duration / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          y = rk4_step(ctx, s, h, y);
          s = (i + 1 == n) ? s1 : s0 + h * static_cast<double>(i + 1);
          ++steps;
          traj.norm_drift = std::max(traj.norm_drift, std::abs(state_norm(y) - 1.0));
          if (config.sample_stride != 0 && steps % config.sample_stride == 0 && s < s1)
            record(global_t + (s - s0), ctx.eps(s));
        }
        traj.steps_accepted += n;
      } else {
        double h = std::min({config.initial_step, config.max_step, duration});
        State k1 = ctx.f(s, y);
        std::size_t attempts = 0;
        while (s < s1) {
          if (attempts >= config.max_steps)
            throw IntegrationError("evolve: step budget exhausted", global_t + (s - s0), h, attempts);
          if (!(h > (std::abs(s) + 1.0) * 1e-16))
            throw IntegrationError("evolve: step size underflow", global_t + (s - s0), h, attempts);
          const bool clipped = s + h >= s1;
          const double h_try = clipped ? s1 - s : h;
          const StepOutcome step = dp54_step(ctx, s, h_try, y, k1);
          const double err = error_ratio(step.err, y, step.y, config);
          ++attempts;
          if (err <= 1.0) {
            y = step.y;
            k1 = step.k_last;
            s = clipped ? s1 : s + h_try;
            ++steps;
            ++traj.steps_accepted;
            traj.norm_drift = std::max(traj.norm_drift, std::abs(state_norm(y) - 1.0));
            if (config.sample_stride != 0 && steps % config.sample_stride == 0 && s < s1)
              record(global_t + (s - s0), ctx.eps(s));
            const double grow =
                err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(config.max_step, h_try * grow);
          } else {
            ++traj.steps_rejected;
            h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
          }
        }
      }
    }

    // Segment boundary: renormalize (logged) so drift never compounds across
    // long programs; the recorded norm_drift above is the pre-renorm figure.
    const double n = state_norm(y);
    if (std::abs(n - 1.0) > 1e-15) {
      y[0] /= n;
      y[1] /= n;
      traj.renormalizations.push_back("segment " + std::to_string(seg_index) +
                                      ": renormalized, |norm - 1| = " +
                                      std::to_string(std::abs(n - 1.0)));
    }

    global_t += duration;
    record(global_t, ctx.eps(s1));
  }

  if (!recorded_initial) record(global_t, 0.0);  // empty program

  result.final_state = Spinor{y[0], y[1], Basis::Diabatic};
  return result;
}

// ---------------------------------------------------------------------------
// Constant-drive propagator
// ---------------------------------------------------------------------------

TransferMatrix constant_drive_propagator(double epsilon0, double delta_gap, double t) {
  if (!std::isfinite(epsilon0) || !std::isfinite(delta_gap) || !std::isfinite(t))
    throw std::domain_error("constant_drive_propagator: non-finite input");
  const double omega = std::hypot(epsilon0, delta_gap);
  if (omega == 0.0) return TransferMatrix::identity(Basis::Diabatic);
  const double half = 0.5 * omega * t;
  const double c = std::cos(half);
  const double sn = std::sin(half);
  const double cos_mix = epsilon0 / omega;
  const double sin_mix = delta_gap / omega;
  const Complex diag{c, cos_mix * sn};
  const Complex off{0.0, sin_mix * sn};
  return TransferMatrix{diag, off, off, std::conj(diag), Basis::Diabatic};
}

Spinor evolve_constant(const Spinor& s, double epsilon0, double delta_gap, double t) {
  if (s.basis != Basis::Diabatic)
    throw std::invalid_argument("evolve_constant: state must be in the diabatic basis");
  return propagate(s, constant_drive_propagator(epsilon0, delta_gap, t));
}

// ---------------------------------------------------------------------------
// Closed form vs ODE
// ---------------------------------------------------------------------------

AimOdeComparison compare_aim_vs_ode(double alpha, double phi_i, double delta, double tau_a,
                                    const IntegratorConfig& config, ZetaMode mode) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("compare_aim_vs_ode: alpha must lie in [0, 1]");
  if (!(tau_a > 0.0)) throw std::domain_error("compare_aim_vs_ode: tau_a must be positive");
  const SystemParams params = SystemParams::from_adiabaticity(delta, 2.0);
  const Spinor psi0 = Spinor::from_occupation(alpha * alpha, phi_i);

  AimOdeComparison cmp;
  cmp.p_aim = final_probability_diabatic(alpha, phi_i, delta, -tau_a, mode);

  IntegratorConfig quiet = config;
  quiet.sample_stride = 0;  // endpoints only; this is a probe, not a plot
  const auto program = single_sweep_program(-tau_a, tau_a, params.velocity);
  const auto start = std::chrono::steady_clock::now();
  const EvolveResult run = evolve(psi0, program, params.gap, quiet);
  const auto stop = std::chrono::steady_clock::now();
  cmp.ode_seconds = std::chrono::duration<double>(stop - start).count();
  cmp.p_ode = run.final_state.p0();
  cmp.abs_error = std::abs(cmp.p_aim - cmp.p_ode);
  return cmp;
}

}  // namespace lzsm
