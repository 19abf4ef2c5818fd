#include "lzsm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lzsm {

namespace {

void require_delta(double delta, const char* where) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::domain_error(std::string(where) + ": delta must be non-negative");
}

/// sqrt(1 - exp(-2 pi delta)) without cancellation for small delta.
double sqrt_one_minus_p(double delta) { return std::sqrt(-std::expm1(-kTwoPi * delta)); }

}  // namespace

// ---------------------------------------------------------------------------
// TransferMatrix
// ---------------------------------------------------------------------------

TransferMatrix TransferMatrix::identity(std::optional<Basis> basis) {
  return TransferMatrix{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, basis};
}

TransferMatrix TransferMatrix::adjoint() const {
  return TransferMatrix{std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11), basis};
}

TransferMatrix TransferMatrix::operator*(const TransferMatrix& rhs) const {
  std::optional<Basis> tag{};
  if (basis && rhs.basis && *basis == *rhs.basis) tag = basis;
  return TransferMatrix{m00 * rhs.m00 + m01 * rhs.m10, m00 * rhs.m01 + m01 * rhs.m11,
                        m10 * rhs.m00 + m11 * rhs.m10, m10 * rhs.m01 + m11 * rhs.m11, tag};
}

double TransferMatrix::unitarity_defect() const {
  // M^dagger M - I, max-abs entry.
  const Complex d00 = std::conj(m00) * m00 + std::conj(m10) * m10 - 1.0;
  const Complex d01 = std::conj(m00) * m01 + std::conj(m10) * m11;
  const Complex d10 = std::conj(m01) * m00 + std::conj(m11) * m10;
  const Complex d11 = std::conj(m01) * m01 + std::conj(m11) * m11 - 1.0;
  return std::max({std::abs(d00), std::abs(d01), std::abs(d10), std::abs(d11)});
}

bool TransferMatrix::is_unitary(double tol) const { return unitarity_defect() <= tol; }

Spinor propagate(const Spinor& s, const TransferMatrix& m) {
  if (m.basis && *m.basis != s.basis)
    throw std::invalid_argument("propagate: matrix and spinor basis tags disagree");
  if (!s.is_normalized(1e-9))
    throw std::invalid_argument("propagate: spinor is not normalized");
  return Spinor{m.m00 * s.a0 + m.m01 * s.a1, m.m10 * s.a0 + m.m11 * s.a1, s.basis};
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

double zeta_exact(double tau, double delta) {
  require_delta(delta, "zeta_exact");
  const double a = std::abs(tau);
  double value;
  if (delta == 0.0) {
    value = 0.5 * a * a;
  } else {
    const double root = std::sqrt(2.0 * delta + a * a);
    // ln((a + root)/sqrt(2 delta)) = asinh(a / sqrt(2 delta)): stable for all a.
    value = 0.5 * (a * root + 2.0 * delta * std::asinh(a / std::sqrt(2.0 * delta)));
  }
  return tau < 0.0 ? -value : value;  // odd extension
}

double zeta_asymptotic(double tau_a, double delta) {
  require_delta(delta, "zeta_asymptotic");
  if (!(tau_a > 0.0))
    throw std::domain_error("zeta_asymptotic: expansion point tau_a must be positive");
  if (delta == 0.0) return 0.5 * tau_a * tau_a;
  return 0.5 * tau_a * tau_a + 0.5 * delta * (1.0 - std::log(delta)) +
         delta * std::log(std::sqrt(2.0) * tau_a);
}

double zeta(double tau, double delta, ZetaMode mode) {
  if (mode == ZetaMode::Exact) return zeta_exact(tau, delta);
  if (tau == 0.0) throw std::domain_error("zeta: asymptotic form undefined at tau = 0");
  const double value = zeta_asymptotic(std::abs(tau), delta);
  return tau < 0.0 ? -value : value;
}

// ---------------------------------------------------------------------------
// theta
// ---------------------------------------------------------------------------

Theta theta(double delta, double tau_i, double phi_i) {
  require_delta(delta, "theta");
  if (tau_i == 0.0) throw std::domain_error("theta: tau_i must be nonzero");
  const double tau_a = std::abs(tau_i);
  Theta t;
  t.quarter_pi = kPi / 4.0;
  t.arg_gamma = arg_gamma_one_minus_i_delta(delta);
  t.tau_squared = tau_a * tau_a;
  t.log_term = 2.0 * delta * std::log(std::sqrt(2.0) * tau_a);
  t.phi_i = phi_i;
  return t;
}

double theta_value(double delta, double tau_i, double phi_i, ZetaMode mode) {
  if (mode == ZetaMode::Asymptotic) return theta(delta, tau_i, phi_i).value();
  require_delta(delta, "theta_value");
  if (tau_i == 0.0) throw std::domain_error("theta_value: tau_i must be nonzero");
  return 2.0 * zeta_exact(std::abs(tau_i), delta) + stokes_phase(delta) + phi_i;
}

double theta_offset(double delta, double tau_a, ZetaMode mode) {
  return theta_value(delta, tau_a, 0.0, mode);
}

// ---------------------------------------------------------------------------
// Single-passage matrices
// ---------------------------------------------------------------------------

TransferMatrix lzsm_transfer_matrix(double delta) {
  require_delta(delta, "lzsm_transfer_matrix");
  const double sp = std::sqrt(lz_probability(delta));
  const double sq = sqrt_one_minus_p(delta);
  const Complex off = sq * std::polar(1.0, stokes_phase(delta));
  return TransferMatrix{Complex{sp, 0.0}, off, -std::conj(off), Complex{sp, 0.0},
                        Basis::Diabatic};
}

void PassageConfig::validate() const {
  params.validate();
  if (!(tau_i < 0.0) || !(tau_f > 0.0))
    throw std::domain_error("PassageConfig: need tau_i < 0 < tau_f (sweep must cross the avoided crossing)");
}

std::vector<std::string> asymptotic_regime_warnings(const PassageConfig& cfg) {
  std::vector<std::string> w;
  const double need = 5.0;
  if (std::abs(cfg.tau_i) < need)
    w.push_back("entry point |tau_i| = " + std::to_string(std::abs(cfg.tau_i)) +
                " is inside the crossing region (< 5); closed form degrades");
  if (cfg.tau_f < need)
    w.push_back("exit point tau_f = " + std::to_string(cfg.tau_f) +
                " is inside the crossing region (< 5); closed form degrades");
  return w;
}

TransferMatrix single_passage_matrix(double delta, double tau_i, double tau_f,
                                     SweepDirection direction, ZetaMode mode) {
  require_delta(delta, "single_passage_matrix");
  if (!(tau_i < 0.0) || !(tau_f > 0.0))
    throw std::domain_error("single_passage_matrix: need tau_i < 0 < tau_f");
  const double zi = zeta(std::abs(tau_i), delta, mode);
  const double zf = zeta(tau_f, delta, mode);
  const double sp = std::sqrt(lz_probability(delta));
  const double sq = sqrt_one_minus_p(delta);
  const Complex diag = sp * std::polar(1.0, zf - zi);
  const Complex off = sq * std::polar(1.0, zf + zi + stokes_phase(delta));
  if (direction == SweepDirection::Ascending)
    return TransferMatrix{diag, off, -std::conj(off), std::conj(diag), Basis::Diabatic};
  // Descending sweep: conjugate by sigma_x (relabels which diabatic level
  // rises and which falls), i.e. swap both row and column indices.
  return TransferMatrix{std::conj(diag), -std::conj(off), off, diag, Basis::Diabatic};
}

TransferMatrix single_passage_matrix(const PassageConfig& cfg, ZetaMode mode) {
  cfg.validate();
  return single_passage_matrix(cfg.params.adiabaticity(), cfg.tau_i, cfg.tau_f,
                               SweepDirection::Ascending, mode);
}

double final_probability_diabatic(double alpha, double phi_i, double delta, double tau_i,
                                  ZetaMode mode) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("final_probability_diabatic: alpha must lie in [0, 1]");
  require_delta(delta, "final_probability_diabatic");
  if (tau_i == 0.0) throw std::domain_error("final_probability_diabatic: tau_i must be nonzero");
  const double p = lz_probability(delta);
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  const double base = alpha * alpha * p + beta * beta * (1.0 - p);
  const double amp = 2.0 * alpha * beta * std::exp(-kPi * delta) * sqrt_one_minus_p(delta);
  const double value = base + amp * std::cos(theta_value(delta, std::abs(tau_i), phi_i, mode));
  return std::clamp(value, 0.0, 1.0);
}

TransferMatrix adiabatic_transfer_matrix(double delta, double tau_a, ZetaMode mode) {
  require_delta(delta, "adiabatic_transfer_matrix");
  if (!(tau_a > 0.0)) throw std::domain_error("adiabatic_transfer_matrix: tau_a must be positive");
  const double ph = 2.0 * zeta(tau_a, delta, mode) + stokes_phase(delta);
  const double sp = std::sqrt(lz_probability(delta));
  const Complex stay = sqrt_one_minus_p(delta) * std::polar(1.0, -ph);
  return TransferMatrix{stay, Complex{-sp, 0.0}, Complex{sp, 0.0}, std::conj(stay),
                        Basis::Adiabatic};
}

double final_probability_adiabatic(double b1, double phi_i, double delta, double tau_a,
                                   ZetaMode mode) {
  if (!(b1 >= 0.0 && b1 <= 1.0))
    throw std::domain_error("final_probability_adiabatic: b1 must lie in [0, 1]");
  require_delta(delta, "final_probability_adiabatic");
  if (!(tau_a > 0.0)) throw std::domain_error("final_probability_adiabatic: tau_a must be positive");
  const double p = lz_probability(delta);
  const double b2 = std::sqrt(std::max(0.0, 1.0 - b1 * b1));
  const double base = (1.0 - p) * b1 * b1 + p * b2 * b2;
  const double amp = 2.0 * std::exp(-kPi * delta) * sqrt_one_minus_p(delta) * b1 * b2;
  const double value = base - amp * std::cos(theta_value(delta, tau_a, phi_i, mode));
  return std::clamp(value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Generalized composition
// ---------------------------------------------------------------------------

CompositionResult generalized_composition(const TransferMatrix& n, double zeta1, double zeta2,
                                          const Spinor& psi) {
  if (n.unitarity_defect() > 1e-8)
    throw std::invalid_argument("generalized_composition: crossing matrix is not unitary");
  if (!psi.is_normalized(1e-9))
    throw std::invalid_argument("generalized_composition: input spinor is not normalized");

  const Complex e1 = std::polar(1.0, zeta1);
  const Complex e2 = std::polar(1.0, zeta2);
  // U_before = diag(1/e1, e1), U_after = diag(e2, 1/e2).
  const Spinor before{psi.a0 / e1, psi.a1 * e1, psi.basis};
  const Spinor crossed = propagate(before, TransferMatrix{n.m00, n.m01, n.m10, n.m11, {}});
  Spinor out{crossed.a0 * e2, crossed.a1 / e2, psi.basis};

  // Closed-form |0>-population for cross-checking the matrix product.
  const double a = std::abs(psi.a0);
  const double b = std::abs(psi.a1);
  const double phi_i = psi.relative_phase();
  const double m0 = std::abs(n.m00);
  const double m1 = std::abs(n.m01);
  double p0 = m0 * m0 * a * a + m1 * m1 * b * b;
  if (m0 > 0.0 && m1 > 0.0 && a > 0.0 && b > 0.0)
    p0 += 2.0 * a * b * m0 * m1 *
          std::cos(2.0 * zeta1 + phi_i + std::arg(n.m01) - std::arg(n.m00));
  return CompositionResult{out, std::clamp(p0, 0.0, 1.0)};
}

}  // namespace lzsm
