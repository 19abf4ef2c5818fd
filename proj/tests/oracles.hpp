#pragma once
// Independent numerical oracles for the unit and acceptance suites.
//
// Everything in this header is deliberately computed by a DIFFERENT route
// than the library uses: special functions are summed from their defining
// series, phase integrals come from adaptive quadrature, and matrix algebra
// runs on plain arrays. When the library and these oracles agree, each
// closed-form implementation has been cross-checked end to end.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

// Absolute-tolerance comparison used throughout the test files.
#define CHECK_ABS(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

namespace oracle {

using Complex = std::complex<double>;
using State2 = std::array<Complex, 2>;
using Mat2 = std::array<Complex, 4>;  // row-major {m00, m01, m10, m11}

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// ---------------------------------------------------------------------------
// Arg Gamma(1 - i y) from the Weierstrass product (series route)
// ---------------------------------------------------------------------------
// log Gamma(1+z) = -gamma z + sum_{k>=1} [ z/k - log(1 + z/k) ]; with z = -iy
// the imaginary part gives
//   Arg Gamma(1 - i y) = gamma y + sum_{k>=1} [ atan(y/k) - y/k ].
// The sum is taken smallest-terms-first with Kahan compensation over K = 1e5
// terms; the remainder is replaced by the midpoint-rule integral
//   int_{K+1/2}^inf (atan(y/x) - y/x) dx
//     = y - K' atan(y/K') - (y/2) log(K'^2 + y^2) + y log K',   K' = K + 1/2,
// whose Euler-Maclaurin error ~ y^3/(24 K'^4) is < 1e-16 for y <= 20.
inline double arg_gamma_series(double y) {
  if (y == 0.0) return 0.0;
  const double sign = y < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(y);
  constexpr int kTerms = 100000;
  const double kp = kTerms + 0.5;

  double sum = 0.0, comp = 0.0;
  for (int k = kTerms; k >= 1; --k) {
    const double term = std::atan(a / static_cast<double>(k)) - a / static_cast<double>(k);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  sum += comp;

  const double tail =
      a - kp * std::atan(a / kp) - 0.5 * a * std::log(kp * kp + a * a) + a * std::log(kp);
  return sign * (kEulerGamma * a + sum + tail);
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature (quadrature route for the phase integral)
// ---------------------------------------------------------------------------
namespace detail {
template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double corr = left + right - whole;
  if (depth <= 0 || std::abs(corr) <= 15.0 * tol) return left + right + corr / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 45) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// zeta(tau) = int_0^tau sqrt(2 delta + s^2) ds, odd in tau.
inline double zeta_quadrature(double tau, double delta) {
  if (tau < 0.0) return -zeta_quadrature(-tau, delta);
  return integrate([delta](double s) { return std::sqrt(2.0 * delta + s * s); }, 0.0, tau,
                   3e-13);
}

// ---------------------------------------------------------------------------
// Plain 2x2 complex algebra (independent of the library's matrix type)
// ---------------------------------------------------------------------------
inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline State2 apply(const Mat2& m, const State2& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

inline Mat2 dagger(const Mat2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

inline double norm2(const State2& v) { return std::norm(v[0]) + std::norm(v[1]); }

/// Max-abs entry of M^dagger M - I.
inline double unitary_defect(const Mat2& m) {
  const Mat2 p = mul(dagger(m), m);
  double d = 0.0;
  d = std::max(d, std::abs(p[0] - 1.0));
  d = std::max(d, std::abs(p[1]));
  d = std::max(d, std::abs(p[2]));
  d = std::max(d, std::abs(p[3] - 1.0));
  return d;
}

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }

  /// Haar-uniform normalized 2-spinor.
  State2 state() {
    while (true) {
      const Complex g0(normal(), normal()), g1(normal(), normal());
      const double n = std::sqrt(std::norm(g0) + std::norm(g1));
      if (n > 1e-6) return {g0 / n, g1 / n};
    }
  }

  /// Random unitary: Haar SU(2) column pair times a relative phase.
  Mat2 unitary() {
    const State2 c = state();
    const Complex e = std::polar(1.0, uniform(-3.141592653589793, 3.141592653589793));
    return {c[0], -std::conj(c[1]) * e, c[1], std::conj(c[0]) * e};
  }
};

// ---------------------------------------------------------------------------
// Grid extremum with one parabolic polish
// ---------------------------------------------------------------------------
// Refines a grid argmax/argmin through the vertex of the parabola fitted to
// the three surrounding samples, then returns the better of the grid value
// and the value at the vertex. Uses only evaluations of f, so it remains a
// purely numerical extremization; for a smooth f the value error drops from
// O(h^2) (raw grid) to O(h^4)-ish, which is what pushes a 720-point phase
// grid below 1e-6.
template <class F>
double polish_extremum(F&& f, double x0, double h, bool maximize) {
  const double fm = f(x0 - h), f0 = f(x0), fp = f(x0 + h);
  const double denom = fm - 2.0 * f0 + fp;
  const double sign = maximize ? 1.0 : -1.0;
  if (sign * denom >= 0.0) return f0;  // degenerate fit: keep the grid value
  double shift = 0.5 * h * (fm - fp) / denom;
  if (shift > h) shift = h;
  if (shift < -h) shift = -h;
  const double cand = f(x0 + shift);
  return maximize ? std::max(f0, cand) : std::min(f0, cand);
}

}  // namespace oracle
