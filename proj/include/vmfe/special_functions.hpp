#pragma once

namespace vmfe::special {

/// Natural log of the modified Bessel function of the first kind, ln I_nu(x).
///
/// Uses a log-scaled power series for moderate arguments and the Hankel
/// large-argument expansion once x dominates nu^2, so the result never
/// overflows even where I_nu(x) itself would. Returns -inf for x = 0, nu > 0.
/// Throws DomainError for negative or non-finite arguments.
double log_bessel_i(double nu, double x);

/// Mean resultant length of a vMF on S^{m-1}: I_{m/2}(tau) / I_{m/2-1}(tau).
///
/// Evaluated as a continued fraction (or the ratio of Hankel expansions for
/// very large tau); never forms the two Bessel values separately.
double bessel_ratio(int m, double tau);

/// bessel_ratio(m, tau) / tau, with its limit 1/m at tau = 0.
double bessel_ratio_over_tau(int m, double tau);

/// d/dtau of bessel_ratio, via 1 - rho^2 - (m-1) rho / tau. Requires tau > 0.
double bessel_ratio_derivative(int m, double tau);

/// Solves bessel_ratio(m, tau) = r for tau >= 0.
///
/// Safeguarded Newton seeded with r (m - r^2) / (1 - r^2). Rejects
/// r >= 1 - 1e-12, which corresponds to fully concentrated directions.
double inverse_bessel_ratio(int m, double r);

/// Largest resultant length accepted by inverse_bessel_ratio.
inline constexpr double kMaxResultantLength = 1.0 - 1e-12;

/// ln of the surface area of S^{m-1}: ln(2 pi^{m/2} / Gamma(m/2)).
double log_sphere_area(int m);

double log_gamma(double x);

}  // namespace vmfe::special
