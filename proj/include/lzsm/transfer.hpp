#pragma once
// Closed-form transfer matrices for single passages through the avoided
// crossing, in the adiabatic-impulse picture: the evolution is split into
// adiabatic phase accumulation away from the crossing and an instantaneous
// unitary "impulse" at the crossing itself.
//
// Phase bookkeeping (all dimensionless, tau = sqrt(v/2) t):
//   zeta(tau)  = integral_0^tau sqrt(2 delta + s^2) ds   (half the dynamical
//                phase accumulated between the crossing and tau)
//   phi_S      = Stokes phase (see core.hpp)
//   theta      = 2 zeta(tau_a) + phi_S + phi_i, the Stueckelberg interference
//                phase controlling the final population after one passage
//                starting from a superposition with relative phase phi_i.

#include <optional>
#include <string>
#include <vector>

#include "lzsm/core.hpp"

namespace lzsm {

// ---------------------------------------------------------------------------
// 2x2 unitary with an optional basis tag
// ---------------------------------------------------------------------------

struct TransferMatrix {
  Complex m00{1.0, 0.0}, m01{0.0, 0.0};
  Complex m10{0.0, 0.0}, m11{1.0, 0.0};
  /// Basis the matrix acts in; empty = generic (no compatibility checking).
  std::optional<Basis> basis{};

  static TransferMatrix identity(std::optional<Basis> basis = {});

  TransferMatrix adjoint() const;

  /// Composition: (a * b) applies b first, then a.
  TransferMatrix operator*(const TransferMatrix& rhs) const;

  /// Max-abs entry of M^dagger M - I; 0 for exactly unitary matrices.
  double unitarity_defect() const;
  bool is_unitary(double tol = 1e-10) const;
};

/// Apply a transfer matrix to a spinor. Throws std::invalid_argument when
/// both carry basis tags and they disagree. Unitary matrices preserve the
/// norm; no renormalization is performed here.
Spinor propagate(const Spinor& s, const TransferMatrix& m);

// ---------------------------------------------------------------------------
// Accumulated adiabatic phase zeta
// ---------------------------------------------------------------------------

/// Exact phase integral zeta(tau) = [tau sqrt(2 delta + tau^2)
///   + 2 delta ln((tau + sqrt(2 delta + tau^2)) / sqrt(2 delta))] / 2,
/// an odd function of tau (evaluated at |tau| internally so the log form
/// never cancels). delta = 0 reduces to tau |tau| / 2.
/// Throws std::domain_error for delta < 0.
double zeta_exact(double tau, double delta);

/// Large-|tau| expansion zeta ~ tau_a^2/2 + delta/2 - (delta/2) ln delta
///   + delta ln(sqrt(2) tau_a), accurate to delta^2/(4 tau_a^2).
/// Requires tau_a > 0 (it approximates zeta(|tau|)); delta = 0 gives
/// tau_a^2 / 2 exactly.
double zeta_asymptotic(double tau_a, double delta);

/// Which form of zeta the closed-form matrices use. Exact is the default
/// everywhere; Asymptotic reproduces the textbook large-time expressions.
enum class ZetaMode { Exact, Asymptotic };

double zeta(double tau, double delta, ZetaMode mode);

// ---------------------------------------------------------------------------
// Interference phase theta
// ---------------------------------------------------------------------------

/// theta in its large-time component form:
///   theta = pi/4 + ArgGamma(1 - i delta) + tau_a^2 + 2 delta ln(sqrt(2) tau_a)
///           + phi_i.
struct Theta {
  double quarter_pi = 0.0;
  double arg_gamma = 0.0;
  double tau_squared = 0.0;
  double log_term = 0.0;
  double phi_i = 0.0;

  double value() const { return quarter_pi + arg_gamma + tau_squared + log_term + phi_i; }
};

/// Component breakdown of theta at tau_a = |tau_i| (asymptotic form).
/// Throws std::domain_error if tau_i == 0 or delta < 0.
Theta theta(double delta, double tau_i, double phi_i);

/// theta as a single number: 2 zeta(|tau_i|) + phi_S + phi_i in Exact mode,
/// the Theta component sum in Asymptotic mode. The two agree to
/// O(delta^2 / tau_a^2).
double theta_value(double delta, double tau_i, double phi_i, ZetaMode mode = ZetaMode::Exact);

/// theta with phi_i = 0; solving cos(theta_offset + phi_i) = c for phi_i is
/// how every phase-control routine works.
double theta_offset(double delta, double tau_a, ZetaMode mode = ZetaMode::Exact);

// ---------------------------------------------------------------------------
// Single-passage matrices (diabatic basis)
// ---------------------------------------------------------------------------

/// The crossing unitary alone (phases referenced to the crossing instant):
///   N = [[sqrt(P),                 sqrt(1-P) e^{i phi_S}],
///        [-sqrt(1-P) e^{-i phi_S}, sqrt(P)]]
/// with P = exp(-2 pi delta). As delta -> infinity the diagonal vanishes:
/// in the diabatic basis a fully adiabatic passage SWAPS the levels (the
/// identity-like limit appears in the adiabatic basis instead).
TransferMatrix lzsm_transfer_matrix(double delta);

/// One linear sweep from tau_i < 0 to tau_f > 0.
struct PassageConfig {
  SystemParams params{};
  double tau_i = -20.0;
  double tau_f = 20.0;

  /// Throws std::domain_error unless tau_i < 0 < tau_f and params validate.
  void validate() const;
};

/// Non-fatal quality warnings: the closed form assumes both ends are far
/// from the crossing, so |tau| < 5 on either side is flagged.
std::vector<std::string> asymptotic_regime_warnings(const PassageConfig& cfg);

enum class SweepDirection { Ascending, Descending };

/// Full single-passage matrix in the diabatic basis, including the adiabatic
/// phases from tau_i to tau_f:
///   n00 = sqrt(P) e^{i (zf - zi)}          n01 = sqrt(1-P) e^{i (zf + zi + phi_S)}
///   n10 = -conj(n01)                        n11 = conj(n00)
/// with zi = zeta(|tau_i|), zf = zeta(tau_f). A Descending passage (bias
/// swept downward, velocity -v) is the sigma_x conjugate of the Ascending one.
TransferMatrix single_passage_matrix(double delta, double tau_i, double tau_f,
                                     SweepDirection direction = SweepDirection::Ascending,
                                     ZetaMode mode = ZetaMode::Exact);
TransferMatrix single_passage_matrix(const PassageConfig& cfg, ZetaMode mode = ZetaMode::Exact);

/// Final |0>-population after one ascending passage starting from
/// (alpha, sqrt(1-alpha^2) e^{i phi_i}) at tau_i < 0:
///   P0 = alpha^2 P + (1-alpha^2)(1-P)
///        + 2 alpha sqrt(1-alpha^2) e^{-pi delta} sqrt(1 - e^{-2 pi delta})
///          cos(theta).
/// Independent of tau_f (populations freeze after the crossing).
double final_probability_diabatic(double alpha, double phi_i, double delta, double tau_i,
                                  ZetaMode mode = ZetaMode::Exact);

/// Same passage expressed in the adiabatic basis (symmetric window
/// tau in [-tau_a, tau_a]):
///   [[sqrt(1-P) e^{-i (2 zeta + phi_S)},  -sqrt(P)],
///    [sqrt(P),                             sqrt(1-P) e^{i (2 zeta + phi_S)}]].
TransferMatrix adiabatic_transfer_matrix(double delta, double tau_a,
                                         ZetaMode mode = ZetaMode::Exact);

/// Population of adiabatic component 0 (the level at +Omega/2) after one
/// passage starting from (b1, sqrt(1-b1^2) e^{i phi_i}) in that basis:
///   P = (1-P) b1^2 + P (1-b1^2)
///       - 2 sqrt(P(1-P)) b1 sqrt(1-b1^2) cos(theta).
/// (The sign of the interference term follows from the matrix above.)
double final_probability_adiabatic(double b1, double phi_i, double delta, double tau_a,
                                   ZetaMode mode = ZetaMode::Exact);

// ---------------------------------------------------------------------------
// Generalized composition
// ---------------------------------------------------------------------------

/// Result of sandwiching a crossing unitary between two adiabatic intervals.
struct CompositionResult {
  Spinor state{};
  double p0 = 0.0;  ///< |0>-population, also available in closed form
};

/// psi_final = U_after(zeta2) * n * U_before(zeta1) * psi with
///   U_before = diag(e^{-i zeta1}, e^{+i zeta1}),
///   U_after  = diag(e^{+i zeta2}, e^{-i zeta2}).
/// p0 is evaluated from the closed form
///   |n00|^2 a^2 + |n01|^2 (1-a^2)
///   + 2 a sqrt(1-a^2) |n00||n01| cos(2 zeta1 + phi_i + arg n01 - arg n00)
/// and must agree with |psi_final[0]|^2 (cross-checked in tests).
/// Throws std::invalid_argument when n is not unitary (defect > 1e-8) or the
/// input spinor is not normalized.
CompositionResult generalized_composition(const TransferMatrix& n, double zeta1, double zeta2,
                                          const Spinor& psi);

}  // namespace lzsm
