#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rectlat/lattice_theta.hpp"
#include "rectlat/theta.hpp"

using std::numbers::pi;

namespace {

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

} // namespace

TEST(Theta3, LargeArgumentTendsToOne)
{
    EXPECT_NEAR(rectlat::theta3(100.0), 1.0 + 2.0 * std::exp(-100.0), 1e-15);
    // 1 + 2e^{-100} rounds to 1; the excess itself stays positive.
    EXPECT_GE(rectlat::theta3(100.0), 1.0);
    EXPECT_GT(rectlat::detail::theta_tail_direct(100.0), 0.0);
}

TEST(Theta3, ValueAtPiMatchesDirectSum)
{
    const double ref = static_cast<double>(oracle::theta_sum(pi, 0));
    EXPECT_NEAR(ref, 1.086434811213308, 1e-15);
    EXPECT_NEAR(rectlat::theta3(pi), ref, 1e-15);
}

TEST(Theta3, ModularIdentityAtSmallArgument)
{
    const double t = 0.1;
    EXPECT_NEAR(rectlat::theta3(t), std::sqrt(pi / t) * rectlat::theta3(pi * pi / t), 1e-14);
}

TEST(Theta3, MatchesBruteForceAcrossRange)
{
    for (double t : log_grid(1e-3, 50.0, 40)) {
        const double ref = static_cast<double>(oracle::theta_sum(t, 0));
        EXPECT_NEAR(rectlat::theta3(t), ref, 1e-14 * ref) << "t=" << t;
        if (t < 30.0) EXPECT_GT(rectlat::theta3(t), 1.0);
    }
}

TEST(Theta3, RejectsNonPositiveArgument)
{
    EXPECT_THROW(rectlat::theta3(0.0), rectlat::DomainError);
    EXPECT_THROW(rectlat::theta3(-1.0), rectlat::DomainError);
    EXPECT_THROW(rectlat::theta3(std::nan("")), rectlat::DomainError);
}

TEST(Theta3Deriv, ZerothDerivativeIsTheta)
{
    for (double t : {0.01, 1.0, pi, 7.0}) EXPECT_EQ(rectlat::theta3_deriv(t, 0), rectlat::theta3(t));
}

TEST(Theta3Deriv, FirstDerivativeAtOne)
{
    const double ref = static_cast<double>(oracle::theta_sum(1.0L, 1));
    EXPECT_NEAR(ref, -0.884509, 1e-6);
    EXPECT_NEAR(rectlat::theta3_deriv(1.0, 1), ref, 1e-14);
}

TEST(Theta3Deriv, MatchesBruteForceAllOrders)
{
    for (int n = 1; n <= 4; ++n) {
        for (double t : log_grid(1e-2, 40.0, 25)) {
            const double ref = static_cast<double>(oracle::theta_sum(t, n));
            EXPECT_NEAR(rectlat::theta3_deriv(t, n), ref, 1e-12 * std::abs(ref) + 1e-15)
                << "n=" << n << " t=" << t;
        }
    }
}

TEST(Theta3Deriv, SignsOfFirstAndSecond)
{
    for (double t : log_grid(1e-3, 50.0, 50)) {
        EXPECT_LT(rectlat::theta3_deriv(t, 1), 0.0);
        EXPECT_GT(rectlat::theta3_deriv(t, 2), 0.0);
    }
}

TEST(Theta3Deriv, MatchesCentralDifferences)
{
    for (double t : log_grid(1e-3, 50.0, 50)) {
        const double h = 1e-4 * t;
        const double d1 = (rectlat::theta3(t + h) - rectlat::theta3(t - h)) / (2.0 * h);
        const double d2 = oracle::second_difference([](double x) { return rectlat::theta3(x); }, t, h);
        const double a1 = rectlat::theta3_deriv(t, 1);
        const double a2 = rectlat::theta3_deriv(t, 2);
        // The difference quotient loses ~eps*theta/h to rounding; near t = 50 the
        // derivatives are tiny compared with theta itself.
        const double noise1 = 1e-16 * rectlat::theta3(t) / h;
        const double noise2 = 1e-16 * rectlat::theta3(t) / (h * h);
        EXPECT_NEAR(d1, a1, 1e-6 * std::abs(a1) + 10 * noise1) << "t=" << t;
        EXPECT_NEAR(d2, a2, 1e-6 * std::abs(a2) + 10 * noise2) << "t=" << t;
    }
}

TEST(Theta3Deriv, BranchesAgreeAtSwitchPoint)
{
    const auto direct = rectlat::detail::theta_direct<4>(pi);
    const auto below = rectlat::theta3_derivs(std::nextafter(pi, 0.0));
    for (int n = 0; n <= 4; ++n) {
        EXPECT_NEAR(below[n], direct[n], 1e-13 * std::abs(direct[n])) << "n=" << n;
    }
}

TEST(Theta3Deriv, RejectsBadOrder)
{
    EXPECT_THROW(rectlat::theta3_deriv(1.0, 5), rectlat::DomainError);
    EXPECT_THROW(rectlat::theta3_deriv(1.0, -1), rectlat::DomainError);
    EXPECT_THROW(rectlat::theta3_deriv(0.0, 1), rectlat::DomainError);
    EXPECT_THROW(rectlat::evaluate_theta(1.0, 7), rectlat::DomainError);
}

TEST(EvaluateTheta, FillsRequestedOrdersOnly)
{
    const rectlat::ThetaEval e = rectlat::evaluate_theta(0.5, 2);
    EXPECT_EQ(e.order, 2);
    EXPECT_NEAR(e.values[0], rectlat::theta3(0.5), 1e-15);
    EXPECT_EQ(e.values[2], rectlat::theta3_deriv(0.5, 2));
    EXPECT_EQ(e.values[3], 0.0);
    EXPECT_EQ(e.values[4], 0.0);
}

TEST(FaulhuberSteinerberger, PositiveFromThetaValues)
{
    // Formed naively the bracket cancels to rounding level below t ~ 1.
    for (double t : log_grid(1.0, 50.0, 60)) {
        const double th = rectlat::theta3(t);
        const double d1 = rectlat::theta3_deriv(t, 1);
        const double d2 = rectlat::theta3_deriv(t, 2);
        EXPECT_GT(t * th * d1 + t * t * th * d2 - t * t * d1 * d1, 0.0) << "t=" << t;
    }
}

TEST(FaulhuberSteinerberger, PositiveOnFullRangeViaReflection)
{
    // Below t ~ 0.01 the bracket (~ e^{-pi^2/t}) underflows; it must never turn negative.
    for (double t : log_grid(1e-3, 50.0, 80)) {
        EXPECT_GE(rectlat::bracket_e2(t), 0.0) << "t=" << t;
        if (t > 0.02) {
            EXPECT_GT(rectlat::faulhuber_steinerberger(t), 0.0) << "t=" << t;
            EXPECT_GT(rectlat::bracket_e2(t), 0.0) << "t=" << t;
        }
    }
}

TEST(LatticeTheta, ProductReflectionIdentity)
{
    // theta(t e^-eps) theta(t e^eps) = (pi/t) theta((pi^2/t) e^-eps) theta((pi^2/t) e^eps)
    for (double t : {0.2, 1.0, 2.5}) {
        for (double eps : {0.0, 0.1, 0.6}) {
            const double lhs = rectlat::theta3(t * std::exp(-eps)) * rectlat::theta3(t * std::exp(eps));
            const double s = pi * pi / t;
            const double rhs = pi / t * rectlat::theta3(s * std::exp(-eps)) * rectlat::theta3(s * std::exp(eps));
            EXPECT_NEAR(lhs, rhs, 1e-13 * lhs);
            EXPECT_NEAR(rectlat::product_minus_one(t, eps), lhs - 1.0, 1e-13 * lhs);
        }
    }
}

TEST(LatticeTheta, ProductChangeAvoidsCancellation)
{
    // For small eps the change is quadratic: P(t, eps) - P(t, 0) ~ eps^2 * bracket_e2(t).
    for (double t : {0.05, 0.7, 4.0, 12.0}) {
        const double eps = 1e-6;
        const double change = rectlat::product_change(t, eps);
        EXPECT_NEAR(change / (eps * eps), rectlat::bracket_e2(t), 1e-5 * rectlat::bracket_e2(t))
            << "t=" << t;
    }
}
