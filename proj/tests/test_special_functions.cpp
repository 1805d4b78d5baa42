#include <cmath>
#include <limits>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vmfe/errors.hpp"
#include "vmfe/special_functions.hpp"

using namespace vmfe::special;

namespace {

// Reference ln I_nu(x), extended precision, from Boost.
double boost_log_bessel(double nu, double x) {
    return static_cast<double>(std::log(boost::math::cyl_bessel_i(static_cast<long double>(nu),
                                                                  static_cast<long double>(x))));
}

// I_{1/2}(x) = sqrt(2 / (pi x)) sinh x, checked against a 50-term power series.
double half_order_series(double x) {
    double term = std::pow(0.5 * x, 0.5) / std::tgamma(1.5);
    double sum = term;
    for (int k = 1; k < 50; ++k) {
        term *= 0.25 * x * x / (k * (k + 0.5));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST(LogBesselI, HalfOrderClosedForm) {
    const double closed = std::log(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0));
    EXPECT_NEAR(closed, std::log(half_order_series(1.0)), 1e-14);
    EXPECT_NEAR(log_bessel_i(0.5, 1.0), closed, 1e-13);
    EXPECT_NEAR(log_bessel_i(0.5, 1.0), -0.064351991073531798753, 1e-13);
}

TEST(LogBesselI, ZeroArgument) {
    EXPECT_EQ(log_bessel_i(1.0, 0.0), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(log_bessel_i(0.0, 0.0), 0.0);
}

TEST(LogBesselI, RejectsNegativeArguments) {
    EXPECT_THROW(log_bessel_i(-0.5, 1.0), vmfe::DomainError);
    EXPECT_THROW(log_bessel_i(0.5, -1.0), vmfe::DomainError);
    EXPECT_THROW(log_bessel_i(0.5, std::nan("")), vmfe::DomainError);
}

TEST(LogBesselI, FrozenHighPrecisionValues) {
    // 40-digit reference values.
    struct Case {
        double nu, x, expected;
    };
    const Case cases[] = {
        {0.0, 0.5, 0.061549719185481303941},   {1.0, 3.0, 1.3745684347236995742},
        {0.0, 10.0, 7.9429720831186955545},    {0.0, 30.0, 27.38470143317193585},
        {0.0, 31.0, 28.36816746236641353},     {15.0, 40.0, 34.425213435354811403},
        {31.0, 500.0, 495.01235391808477851},  {31.0, 1000.0, 995.14660696382869769},
        {0.0, 700.0, 695.80569999844344908},   {15.5, 1000.0, 995.50712617426036052},
        {2.0, 100.0, 96.759632275903027104},   {0.5, 500.0, 495.97375741758423139},
        {7.0, 0.001, -61.731478546609990739},  {3.0, 25.5, 22.786865990854890388},
        {31.0, 990.0, 985.14677615632328796},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(log_bessel_i(c.nu, c.x), c.expected, 1e-10 * std::max(1.0, std::abs(c.expected)))
            << "nu=" << c.nu << " x=" << c.x;
    }
    EXPECT_NEAR(log_bessel_i(0.0, 1e-8), 2.5e-17, 1e-25);
}

TEST(LogBesselI, MatchesBoostAcrossOrdersAndArguments) {
    for (int twice_nu = 0; twice_nu <= 62; twice_nu += 3) {
        const double nu = 0.5 * twice_nu;
        for (double x : {1e-8, 1e-3, 0.1, 1.0, 5.0, 9.9, 10.1, 29.0, 60.0, 150.0, 400.0, 500.0}) {
            const double ref = boost_log_bessel(nu, x);
            EXPECT_NEAR(log_bessel_i(nu, x), ref, 1e-10 * std::max(1.0, std::abs(ref))) << nu << " " << x;
        }
    }
}

TEST(BesselRatio, ThreeDimensionalClosedForm) {
    EXPECT_NEAR(bessel_ratio(3, 1.0), 1.0 / std::tanh(1.0) - 1.0, 1e-12);
    EXPECT_NEAR(bessel_ratio(3, 1.0), 0.31303528549933130364, 1e-12);
    for (double tau : {1e-3, 0.1, 0.7, 2.0, 5.0, 20.0, 75.0, 200.0}) {
        EXPECT_NEAR(bessel_ratio(3, tau), 1.0 / std::tanh(tau) - 1.0 / tau, 1e-12) << tau;
    }
}

TEST(BesselRatio, ZeroAndSmallTau) {
    for (int m : {2, 3, 5, 16, 64}) EXPECT_EQ(bessel_ratio(m, 0.0), 0.0);
    EXPECT_NEAR(bessel_ratio(2, 1e-6), 5e-7, 1e-15);
    for (int m : {2, 3, 4, 8, 17, 32, 64}) {
        EXPECT_NEAR(bessel_ratio(m, 1e-6) / 1e-6, 1.0 / m, 1e-6) << m;
    }
}

TEST(BesselRatio, FrozenValues) {
    EXPECT_NEAR(bessel_ratio(2, 8.0 * std::sqrt(2.0)), 0.95472812878973609365, 1e-13);
    EXPECT_NEAR(bessel_ratio(64, 200.0), 0.85449718437446322349, 1e-13);
    EXPECT_NEAR(bessel_ratio(10, 5000.0), 0.99910031506296925536, 1e-13);
}

TEST(BesselRatio, RejectsBadDimension) {
    EXPECT_THROW(bessel_ratio(1, 1.0), vmfe::DomainError);
    EXPECT_THROW(bessel_ratio(3, -1.0), vmfe::DomainError);
}

TEST(BesselRatio, RangeAndMonotonicity) {
    for (int m = 2; m <= 64; m += 3) {
        double previous = 0.0;
        for (double tau = 1e-4; tau < 5e4; tau *= 1.07) {
            const double rho = bessel_ratio(m, tau);
            ASSERT_GE(rho, 0.0);
            ASSERT_LT(rho, 1.0);
            ASSERT_GT(rho, previous) << "m=" << m << " tau=" << tau;
            previous = rho;
        }
    }
}

TEST(BesselRatio, HugeConcentration) {
    // rho ~ 1 - (m - 1) / (2 tau) for tau -> infinity.
    for (int m : {2, 3, 10}) {
        const double tau = 1e9;
        EXPECT_NEAR(1.0 - bessel_ratio(m, tau), (m - 1.0) / (2.0 * tau), 1e-15);
    }
}

TEST(BesselRatioDerivative, ClosedFormAndFiniteDifference) {
    // d/dtau (coth tau - 1/tau) = 1 - coth^2 tau + 1/tau^2.
    const double coth1 = 1.0 / std::tanh(1.0);
    EXPECT_NEAR(bessel_ratio_derivative(3, 1.0), 2.0 - coth1 * coth1, 1e-12);
    EXPECT_NEAR(bessel_ratio_derivative(3, 1.0), 0.27593833903368953359, 1e-12);
    auto rho3 = [](double t) { return bessel_ratio(3, t); };
    EXPECT_NEAR(bessel_ratio_derivative(3, 1.0), vmfe::oracle::central_difference(rho3, 1.0, 1e-6), 1e-8);
    EXPECT_NEAR(bessel_ratio_derivative(3, 10.0), vmfe::oracle::central_difference(rho3, 10.0, 1e-6), 1e-8);
    EXPECT_NEAR(bessel_ratio_derivative(2, 1e-7), 0.5, 1e-6);
}

TEST(BesselRatioDerivative, ConsistentWithCentralDifferences) {
    for (int m : {2, 3, 4, 7, 16, 33, 64}) {
        auto rho = [m](double t) { return bessel_ratio(m, t); };
        for (double tau = 0.01; tau <= 100.0; tau *= 1.5) {
            const double analytic = bessel_ratio_derivative(m, tau);
            const double numeric = vmfe::oracle::five_point_difference(rho, tau, 1e-3 * tau);
            ASSERT_GT(analytic, 0.0);
            EXPECT_NEAR(analytic, numeric, 1e-6 * analytic) << "m=" << m << " tau=" << tau;
        }
    }
}

TEST(BesselRatioDerivative, RejectsNonPositiveTau) {
    EXPECT_THROW(bessel_ratio_derivative(3, 0.0), vmfe::DomainError);
    EXPECT_THROW(bessel_ratio_derivative(3, -1.0), vmfe::DomainError);
}

TEST(InverseBesselRatio, Basics) {
    EXPECT_NEAR(inverse_bessel_ratio(3, bessel_ratio(3, 2.0)), 2.0, 1e-10);
    for (int m : {2, 3, 9, 64}) EXPECT_EQ(inverse_bessel_ratio(m, 0.0), 0.0);
}

TEST(InverseBesselRatio, MatchesBisectionOracle) {
    // Bisection on the Boost ratio over [0, 100].
    auto rho4 = [](double t) {
        return static_cast<double>(boost::math::cyl_bessel_i(2.0L, static_cast<long double>(t)) /
                                   boost::math::cyl_bessel_i(1.0L, static_cast<long double>(t)));
    };
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rho4(mid) < 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(inverse_bessel_ratio(4, 0.5), 0.5 * (lo + hi), 1e-9);
    EXPECT_NEAR(inverse_bessel_ratio(4, 0.5), 2.4469183112890461309, 1e-10);
}

TEST(InverseBesselRatio, DomainErrors) {
    EXPECT_THROW(inverse_bessel_ratio(3, 1.0), vmfe::DomainError);
    EXPECT_THROW(inverse_bessel_ratio(3, 1.5), vmfe::DomainError);
    EXPECT_THROW(inverse_bessel_ratio(3, -0.1), vmfe::DomainError);
    EXPECT_THROW(inverse_bessel_ratio(3, 1.0 - 1e-13), vmfe::DomainError);
    EXPECT_NO_THROW(inverse_bessel_ratio(3, 1.0 - 1e-9));
}

TEST(InverseBesselRatio, RoundTripProperty) {
    for (int m = 2; m <= 64; ++m) {
        for (double tau = 1e-4; tau <= 200.0; tau *= 1.19) {
            const double back = inverse_bessel_ratio(m, bessel_ratio(m, tau));
            ASSERT_LE(std::abs(back - tau) / std::max(tau, 1.0), 1e-8) << "m=" << m << " tau=" << tau;
            EXPECT_LE(std::abs(bessel_ratio(m, back) - bessel_ratio(m, tau)), 1e-10);
        }
    }
}

TEST(LogSphereArea, KnownValues) {
    EXPECT_NEAR(log_sphere_area(2), std::log(2.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(log_sphere_area(3), std::log(4.0 * std::numbers::pi), 1e-14);
}
