#include "lzsm/core.hpp"

#include <cmath>
#include <string>

namespace lzsm {

double principal_phase(double phi) {
  if (!std::isfinite(phi)) throw std::domain_error("principal_phase: non-finite angle");
  double r = std::remainder(phi, kTwoPi);  // lands in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;              // fold the closed end onto +pi
  return r;
}

// ---------------------------------------------------------------------------
// Parameters and time scaling
// ---------------------------------------------------------------------------

void SystemParams::validate() const {
  if (!(velocity > 0.0) || !std::isfinite(velocity))
    throw std::domain_error("SystemParams: sweep velocity must be positive, got " + std::to_string(velocity));
  if (!(gap >= 0.0) || !std::isfinite(gap))
    throw std::domain_error("SystemParams: gap must be non-negative, got " + std::to_string(gap));
}

double SystemParams::adiabaticity() const {
  validate();
  return gap * gap / (4.0 * velocity);
}

SystemParams SystemParams::from_adiabaticity(double delta, double velocity) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::domain_error("from_adiabaticity: delta must be non-negative");
  if (!(velocity > 0.0) || !std::isfinite(velocity))
    throw std::domain_error("from_adiabaticity: velocity must be positive");
  return SystemParams{2.0 * std::sqrt(velocity * delta), velocity};
}

double DimensionlessTime::to_physical(double velocity) const {
  if (!(velocity > 0.0)) throw std::domain_error("DimensionlessTime: velocity must be positive");
  return tau * std::sqrt(2.0 / velocity);
}

DimensionlessTime DimensionlessTime::from_physical(double t, double velocity) {
  if (!(velocity > 0.0)) throw std::domain_error("DimensionlessTime: velocity must be positive");
  return DimensionlessTime{t * std::sqrt(velocity / 2.0)};
}

double adiabaticity(double delta_gap, double velocity) {
  return SystemParams{delta_gap, velocity}.adiabaticity();
}

double lz_probability(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::domain_error("lz_probability: delta must be non-negative");
  return std::exp(-kTwoPi * delta);
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace {

// Lanczos approximation, g = 7, 9 coefficients; relative error below 1e-13 in
// the right half-plane, which the reflection formula extends to the rest.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

Complex log_gamma_right_half(Complex z) {
  // Valid for Re z >= 0.5. Shift so the series is indexed from z-1.
  const Complex zm1 = z - 1.0;
  Complex x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
  const Complex t = zm1 + kLanczosG + 0.5;
  return 0.5 * std::log(kTwoPi) + (zm1 + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

Complex log_gamma(Complex z) {
  if (z.real() < 0.5) {
    // Reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z).
    const Complex s = std::sin(kPi * z);
    if (s == Complex{0.0, 0.0}) throw std::domain_error("log_gamma: pole at non-positive integer");
    return std::log(kPi / s) - log_gamma_right_half(1.0 - z);
  }
  return log_gamma_right_half(z);
}

double arg_gamma_one_minus_i_delta(double delta) {
  if (!std::isfinite(delta)) throw std::domain_error("arg_gamma_one_minus_i_delta: non-finite argument");
  if (delta == 0.0) return 0.0;
  if (delta < 0.0) return -arg_gamma_one_minus_i_delta(-delta);
  // Along 1 - i y the Lanczos sum never crosses a log branch cut (the shifted
  // argument 7.5 - i y stays in the right half-plane and the rational factor
  // keeps a small positive real part), so Im log_gamma is already the
  // continuous branch -- no unwrapping needed even though the principal
  // argument of Gamma itself wraps near delta ~ 5.
  return log_gamma(Complex{1.0, -delta}).imag();
}

double stokes_phase(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::domain_error("stokes_phase: delta must be non-negative");
  if (delta == 0.0) return kPi / 4.0;  // continuous limit: delta(ln delta - 1) -> 0
  return kPi / 4.0 + arg_gamma_one_minus_i_delta(delta) + delta * (std::log(delta) - 1.0);
}

// ---------------------------------------------------------------------------
// Spinor states
// ---------------------------------------------------------------------------

double Spinor::norm() const { return std::sqrt(std::norm(a0) + std::norm(a1)); }

double Spinor::relative_phase() const {
  const Complex cross = a1 * std::conj(a0);
  if (cross == Complex{0.0, 0.0}) return 0.0;
  return std::arg(cross);
}

bool Spinor::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Spinor Spinor::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("Spinor::normalized: zero vector");
  return Spinor{a0 / n, a1 / n, basis};
}

Spinor Spinor::from_occupation(double p0, double phi, Basis basis) {
  if (!(p0 >= 0.0 && p0 <= 1.0))
    throw std::domain_error("Spinor::from_occupation: p0 must lie in [0, 1]");
  const double a = std::sqrt(p0);
  const double b = std::sqrt(1.0 - p0);
  return Spinor{Complex{a, 0.0}, b * std::polar(1.0, phi), basis};
}

BlochVector bloch(const Spinor& s) {
  if (!s.is_normalized(1e-9))
    throw std::invalid_argument("bloch: spinor is not normalized");
  const Complex cross = std::conj(s.a0) * s.a1;
  return BlochVector{2.0 * cross.real(), 2.0 * cross.imag(), s.p0() - s.p1()};
}

// ---------------------------------------------------------------------------
// Basis change
// ---------------------------------------------------------------------------

GammaPair gamma_pm(double epsilon, double delta_gap) {
  const double gap = std::abs(delta_gap);
  const double r = std::hypot(epsilon, gap);
  if (r == 0.0)
    throw std::domain_error("gamma_pm: basis undefined at the degenerate point gap = eps = 0");
  const double ae = std::abs(epsilon);
  const double big = std::sqrt(0.5 * (1.0 + ae / r));
  // (1 - |eps|/r)/2 = gap^2 / (2 r (r + |eps|)): exact algebra, no cancellation.
  const double small = (gap == 0.0) ? 0.0 : gap / std::sqrt(2.0 * r * (r + ae));
  if (epsilon >= 0.0) return GammaPair{big, small};
  return GammaPair{small, big};
}

Spinor basis_transform(const Spinor& s, double epsilon, double delta_gap, BasisChange direction) {
  const Basis source =
      direction == BasisChange::DiabaticToAdiabatic ? Basis::Diabatic : Basis::Adiabatic;
  if (s.basis != source)
    throw std::invalid_argument("basis_transform: spinor basis tag does not match transform source");
  const GammaPair g = gamma_pm(epsilon, delta_gap);
  if (direction == BasisChange::DiabaticToAdiabatic) {
    // b = M a with M = [[g-, -g+], [g+, g-]].
    return Spinor{g.minus * s.a0 - g.plus * s.a1, g.plus * s.a0 + g.minus * s.a1,
                  Basis::Adiabatic};
  }
  // a = M^T b.
  return Spinor{g.minus * s.a0 + g.plus * s.a1, -g.plus * s.a0 + g.minus * s.a1, Basis::Diabatic};
}

}  // namespace lzsm
