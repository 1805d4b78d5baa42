#include "vmfe/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vmfe/errors.hpp"

namespace vmfe::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_order_and_argument(double nu, double x) {
    if (!std::isfinite(nu) || nu < 0.0) {
        throw DomainError("bessel order must be finite and non-negative, got " + std::to_string(nu));
    }
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("bessel argument must be finite and non-negative, got " + std::to_string(x));
    }
}

void require_dimension(int m) {
    if (m < 2) {
        throw DomainError("sphere dimension m must be >= 2, got " + std::to_string(m));
    }
}

// Beyond this argument the Hankel expansion is accurate to machine precision:
// the k-th term is bounded by (nu^2 / 2x)^k / k! until k ~ nu, and the
// divergent tail only starts after k ~ 2x.
double hankel_threshold(double nu) { return 30.0 + nu * nu; }

// Sum_k (-1)^k a_k(nu) / x^k of the large-argument expansion
// I_nu(x) ~ e^x / sqrt(2 pi x) * P. Terminates exactly for half-integer nu.
double hankel_sum(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 500; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        const double magnitude = std::abs(term);
        if (magnitude == 0.0) break;
        if (magnitude > previous) break;  // asymptotic series started diverging
        sum += term;
        if (magnitude < 1e-17 * std::abs(sum)) break;
        previous = magnitude;
    }
    return sum;
}

// ln I_nu(x) from the ascending series, rescaled to stay in range. The terms
// after the first are summed separately so tiny x keeps full relative accuracy.
double log_bessel_series(double nu, double x) {
    const double quarter_x2 = 0.25 * x * x;
    double log_scale = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    double head = 1.0;
    double term = 1.0;
    double tail = 0.0;
    for (int k = 1; k < 1000000; ++k) {
        term *= quarter_x2 / (k * (k + nu));
        tail += term;
        if (term < kEps * 1e-2 * (head + tail) && k > 0.5 * x) break;
        if (tail > 1e280) {
            head *= 1e-280;
            tail *= 1e-280;
            term *= 1e-280;
            log_scale += 280.0 * std::numbers::ln10;
        }
    }
    if (head == 1.0) return log_scale + std::log1p(tail);
    return log_scale + std::log(head + tail);
}

// I_{nu}/I_{nu-1} with nu = m/2 as the continued fraction
// tau / (2nu + tau^2 / (2(nu+1) + tau^2 / (2(nu+2) + ...))), modified Lentz.
double bessel_ratio_continued_fraction(double nu, double tau) {
    constexpr double tiny = 1e-300;
    const double a = tau * tau;
    double f = 2.0 * nu;
    double c = f;
    double d = 0.0;
    for (int j = 1; j < 1000000; ++j) {
        const double b = 2.0 * (nu + j);
        d = b + a * d;
        if (d == 0.0) d = tiny;
        c = b + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 0.5 * kEps) break;
    }
    return tau / f;
}

}  // namespace

double log_gamma(double x) { return std::lgamma(x); }

double log_sphere_area(int m) {
    require_dimension(m);
    const double half_m = 0.5 * m;
    return std::numbers::ln2 + half_m * std::log(std::numbers::pi) - std::lgamma(half_m);
}

double log_bessel_i(double nu, double x) {
    require_order_and_argument(nu, x);
    if (x == 0.0) {
        return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    if (x >= hankel_threshold(nu)) {
        return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(hankel_sum(nu, x));
    }
    return log_bessel_series(nu, x);
}

double bessel_ratio(int m, double tau) {
    require_dimension(m);
    if (!std::isfinite(tau) || tau < 0.0) {
        throw DomainError("concentration must be finite and non-negative, got " + std::to_string(tau));
    }
    if (tau == 0.0) return 0.0;
    const double nu = 0.5 * m;
    if (tau >= hankel_threshold(nu)) {
        return hankel_sum(nu, tau) / hankel_sum(nu - 1.0, tau);
    }
    return bessel_ratio_continued_fraction(nu, tau);
}

double bessel_ratio_over_tau(int m, double tau) {
    if (tau == 0.0) {
        require_dimension(m);
        return 1.0 / m;
    }
    return bessel_ratio(m, tau) / tau;
}

double bessel_ratio_derivative(int m, double tau) {
    if (!(tau > 0.0)) {
        throw DomainError("bessel_ratio_derivative requires tau > 0, got " + std::to_string(tau));
    }
    const double rho = bessel_ratio(m, tau);
    return 1.0 - rho * rho - (m - 1.0) * rho / tau;
}

double inverse_bessel_ratio(int m, double r) {
    require_dimension(m);
    if (!std::isfinite(r) || r < 0.0 || r >= kMaxResultantLength) {
        throw DomainError("mean resultant length must lie in [0, 1 - 1e-12), got " + std::to_string(r));
    }
    if (r == 0.0) return 0.0;

    // Bracket [lo, hi] with rho(lo) <= r <= rho(hi).
    double tau = r * (m - r * r) / (1.0 - r * r);
    double lo = 0.0;
    double hi = tau;
    while (bessel_ratio(m, hi) < r) {
        lo = hi;
        hi *= 2.0;
    }

    for (int iter = 0; iter < 100; ++iter) {
        const double residual = bessel_ratio(m, tau) - r;
        if (residual == 0.0) return tau;
        if (residual < 0.0) {
            lo = std::max(lo, tau);
        } else {
            hi = std::min(hi, tau);
        }
        double next = tau - residual / bessel_ratio_derivative(m, tau);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - tau);
        tau = next;
        if (step <= 4.0 * kEps * tau) break;
    }

    if (std::abs(bessel_ratio(m, tau) - r) <= 1e-10) return tau;

    // Newton did not settle: plain bisection on the bracket.
    for (int iter = 0; iter < 200 && hi - lo > 4.0 * kEps * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (bessel_ratio(m, mid) < r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace vmfe::special
