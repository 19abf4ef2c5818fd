#pragma once
// Core types and special functions for a linearly driven two-level system
// (qubit) swept through an avoided crossing.
//
// Conventions used throughout the library:
//   * hbar = 1 everywhere; energies and rates share units.
//   * Hamiltonian  H(t) = -(Delta/2) sigma_x - (eps(t)/2) sigma_z  in the
//     diabatic basis {|0>, |1>}, with bias eps(t) = v t on a linear sweep.
//   * Dimensionless sweep time  tau = sqrt(v/2) * t.
//   * Adiabaticity parameter  delta = Delta^2 / (4 v); the probability of
//     staying in the same diabatic state across one crossing is exp(-2 pi delta).

#include <complex>
#include <numbers>
#include <stdexcept>

namespace lzsm {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to the principal interval (-pi, pi].
double principal_phase(double phi);

// ---------------------------------------------------------------------------
// Parameters and time scaling
// ---------------------------------------------------------------------------

/// Static parameters of the driven two-level system: the diabatic coupling
/// (minimum level splitting) and the linear sweep rate of the bias.
struct SystemParams {
  double gap = 1.0;       ///< Delta >= 0, avoided-crossing gap
  double velocity = 2.0;  ///< v > 0, bias sweep rate eps(t) = v t

  /// delta = Delta^2 / (4 v), computed on demand so it is always consistent.
  double adiabaticity() const;

  /// Build params with a prescribed delta. The default velocity 2 makes the
  /// dimensionless and physical time axes coincide (tau = t).
  static SystemParams from_adiabaticity(double delta, double velocity = 2.0);

  /// Throws std::domain_error unless velocity > 0 and gap >= 0.
  void validate() const;
};

/// Dimensionless sweep time tau = sqrt(v/2) t. Kept as a distinct type so
/// unit mix-ups surface at the interface rather than in results.
struct DimensionlessTime {
  double tau = 0.0;

  double to_physical(double velocity) const;
  static DimensionlessTime from_physical(double t, double velocity);
};

/// delta = Delta^2/(4 v). Throws std::domain_error for non-positive velocity.
double adiabaticity(double delta_gap, double velocity);

/// Probability exp(-2 pi delta) of remaining in the same diabatic state
/// across a single crossing. Throws std::domain_error for negative delta.
double lz_probability(double delta);

// ---------------------------------------------------------------------------
// Special functions entering the transition amplitudes
// ---------------------------------------------------------------------------

/// Principal-branch complex log-gamma (Lanczos approximation, reflection for
/// Re z < 0.5). The imaginary part is continuous along the lines 1 +- i y
/// used below, which is what the Stokes phase requires.
Complex log_gamma(Complex z);

/// Arg Gamma(1 - i delta) on the branch continuous from Arg Gamma(1) = 0.
/// Note this is NOT the principal argument once |delta| grows beyond ~4.97;
/// the continuous branch decreases roughly like -delta ln(delta). Odd in
/// delta, so negative arguments are accepted and return the mirror value.
double arg_gamma_one_minus_i_delta(double delta);

/// Stokes phase phi_S = pi/4 + Arg Gamma(1 - i delta) + delta (ln delta - 1).
/// Continuous limit pi/4 at delta = 0; decays to 0 as delta -> infinity.
/// Throws std::domain_error for negative delta.
double stokes_phase(double delta);

// ---------------------------------------------------------------------------
// Spinor states
// ---------------------------------------------------------------------------

/// Which basis a spinor's components refer to. Diabatic = sigma_z eigenbasis
/// (levels cross); Adiabatic = instantaneous energy eigenbasis (levels avoid).
enum class Basis { Diabatic, Adiabatic };

/// Two-component complex state with a basis tag.
struct Spinor {
  Complex a0{1.0, 0.0};
  Complex a1{0.0, 0.0};
  Basis basis = Basis::Diabatic;

  double norm() const;
  double p0() const { return std::norm(a0); }
  double p1() const { return std::norm(a1); }

  /// arg(a1) - arg(a0) reduced to (-pi, pi]; the "initial phase" phi_i of the
  /// interference formulas. Zero when either component vanishes.
  double relative_phase() const;

  bool is_normalized(double tol = 1e-12) const;

  /// Rescaled copy with unit norm. Throws std::domain_error on the zero vector.
  Spinor normalized() const;

  /// The (sqrt(p0), sqrt(1-p0) e^{i phi}) convention used by the closed-form
  /// probability expressions: |0>-amplitude real and non-negative.
  static Spinor from_occupation(double p0, double phi, Basis basis = Basis::Diabatic);
};

/// Pauli expectation values (x, y, z) of a normalized spinor.
struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// Bloch vector of a normalized spinor: x = 2 Re(a0* a1), y = 2 Im(a0* a1),
/// z = |a0|^2 - |a1|^2. Throws std::invalid_argument if visibly unnormalized.
BlochVector bloch(const Spinor& s);

// ---------------------------------------------------------------------------
// Diabatic <-> adiabatic basis change
// ---------------------------------------------------------------------------

/// Mixing amplitudes gamma_pm of the instantaneous eigenbasis at bias eps:
/// gamma_pm^2 = (1 +- eps/sqrt(Delta^2 + eps^2)) / 2.
struct GammaPair {
  double plus = 0.0;
  double minus = 0.0;
};

/// Compute the mixing pair. The small branch is evaluated from
/// Delta^2 / (2 r (r + |eps|)) to avoid the cancellation that the textbook
/// form suffers for |eps| >> Delta (needed to reach ~1e-12 basis purity).
/// Throws std::domain_error at the degenerate point Delta = eps = 0.
GammaPair gamma_pm(double epsilon, double delta_gap);

enum class BasisChange { DiabaticToAdiabatic, AdiabaticToDiabatic };

/// Apply the (real orthogonal) eigenbasis rotation
///   M = [[gamma_-, -gamma_+], [gamma_+, gamma_-]]
/// or its transpose for the reverse direction. Norm preserved; basis tag
/// flipped. Throws std::invalid_argument when the spinor's tag does not match
/// the direction's source basis.
Spinor basis_transform(const Spinor& s, double epsilon, double delta_gap, BasisChange direction);

}  // namespace lzsm
