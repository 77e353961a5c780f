#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rectlat/energy.hpp"
#include "rectlat/lattice_theta.hpp"

using rectlat::LatticeState;
using rectlat::PotentialSpec;

namespace {

struct RandomStates {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> area{0.8, 6.0};
    std::uniform_real_distribution<double> log_delta{-0.9, 0.9};
    explicit RandomStates(unsigned seed) : rng(seed) {}
    LatticeState next() { return {area(rng), log_delta(rng)}; }
};

} // namespace

TEST(LatticeState, ValidationAndMirroring)
{
    EXPECT_THROW(LatticeState::from_delta(2.0, -1.0), rectlat::DomainError);
    EXPECT_THROW(LatticeState::from_delta(2.0, 0.0), rectlat::DomainError);
    EXPECT_THROW((LatticeState{0.0, 0.1}.validate()), rectlat::DomainError);
    EXPECT_THROW((LatticeState{-1.0, 0.1}.validate()), rectlat::DomainError);
    const LatticeState s = LatticeState::from_delta(3.0, 1.0 / 1.3);
    EXPECT_LT(s.eps, 0.0);
    EXPECT_NEAR(s.canonical().delta(), 1.3, 1e-15);
}

TEST(QuadratureConfig, RejectsInvalidSettings)
{
    const PotentialSpec p = rectlat::yukawa(1.0);
    rectlat::QuadratureConfig q;
    q.rel_tol = 0.0;
    EXPECT_THROW(rectlat::lattice_energy(p, {1.0, 0.0}, q), rectlat::DomainError);
    q = {};
    q.max_refinements = 0;
    EXPECT_THROW(rectlat::lattice_energy(p, {1.0, 0.0}, q), rectlat::DomainError);
    q = {};
    q.split_point = -1.0;
    EXPECT_THROW(rectlat::lattice_energy(p, {1.0, 0.0}, q), rectlat::DomainError);
}

TEST(LatticeEnergy, ReciprocalAspectSymmetry)
{
    const PotentialSpec p = rectlat::derive_double_yukawa(9.8, 2.0);
    const double e1 = rectlat::lattice_energy(p, LatticeState::from_delta(3.0, 1.3));
    const double e2 = rectlat::lattice_energy(p, LatticeState::from_delta(3.0, 1.0 / 1.3));
    EXPECT_NEAR(e1, e2, 1e-12 * std::abs(e1));
}

TEST(LatticeEnergy, ReciprocalAspectSymmetryRandomStates)
{
    const PotentialSpec fams[] = {rectlat::derive_double_yukawa(9.8, 2.0), rectlat::derive_yukawa_coulomb(2.0365),
                                  rectlat::yukawa(1.3), rectlat::riesz(3.0)};
    RandomStates rs(7);
    for (const auto& p : fams) {
        for (int i = 0; i < 20; ++i) {
            const LatticeState s = rs.next();
            const double a = rectlat::lattice_energy(p, s);
            const double b = rectlat::lattice_energy(p, {s.area, -s.eps});
            EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
        }
    }
}

TEST(LatticeEnergy, MatchesDirectSumForDoubleYukawa)
{
    const PotentialSpec p = rectlat::derive_double_yukawa(9.8, 2.0);
    {
        const LatticeState s{2.6, 0.0};
        const double direct = rectlat::direct_lattice_sum(p, s);
        EXPECT_NEAR(rectlat::lattice_energy(p, s), direct, 1e-10 * std::abs(direct));
    }
    RandomStates rs(99);
    for (int i = 0; i < 10; ++i) {
        const LatticeState s = rs.next();
        const double direct = rectlat::direct_lattice_sum(p, s);
        EXPECT_NEAR(rectlat::lattice_energy(p, s), direct, 1e-10 * std::abs(direct))
            << "A=" << s.area << " eps=" << s.eps;
    }
}

TEST(DirectSum, YukawaNearestShellDominates)
{
    const PotentialSpec p = rectlat::yukawa(5.0);
    const double direct = rectlat::direct_lattice_sum(p, {4.0, 0.0});
    const auto f = [](long double r) { return std::exp(-5.0L * r) / r; };
    const long double ref = oracle::naive_lattice_sum(f, 4.0L, 1.0L, 12);
    EXPECT_NEAR(direct, static_cast<double>(ref), 1e-16);  // the cutoff is an absolute tail bound
    // Four neighbours at r = 2 carry all but ~e^{-4} of the sum.
    const double nearest = 0.5 * 4.0 * std::exp(-10.0) / 2.0;
    EXPECT_NEAR(direct / nearest, 1.0, 0.02);
    EXPECT_NEAR(rectlat::lattice_energy(p, {4.0, 0.0}), direct, 1e-10 * direct);
}

TEST(DirectSum, MatchesBruteForceAndIsSymmetric)
{
    const PotentialSpec p = rectlat::derive_double_yukawa(9.8, 2.0);
    const double k1 = p.kappa1(), k2 = p.kappa2(), v1 = p.v1(), v2 = p.v2();
    const auto f = [=](long double r) {
        return (v1 * std::exp(-k1 * r) - v2 * std::exp(-k2 * r)) / r;
    };
    for (auto [a, d] : {std::pair{2.6, 1.0}, std::pair{1.5, 1.7}, std::pair{4.0, 0.6}}) {
        const double direct = rectlat::direct_lattice_sum(p, LatticeState::from_delta(a, d));
        const double ref = static_cast<double>(oracle::naive_lattice_sum(f, a, d, 90));
        EXPECT_NEAR(direct, ref, 1e-12 * std::abs(ref));
        const double mirrored = rectlat::direct_lattice_sum(p, LatticeState::from_delta(a, 1.0 / d));
        EXPECT_NEAR(direct, mirrored, 1e-13 * std::abs(direct));
    }
}

TEST(DirectSum, ConditionallyConvergentFamiliesUnsupported)
{
    EXPECT_THROW(rectlat::direct_lattice_sum(rectlat::derive_yukawa_coulomb(2.0), {2.0, 0.0}),
                 rectlat::UnsupportedOracle);
    EXPECT_THROW(rectlat::direct_lattice_sum(rectlat::riesz(2.0), {2.0, 0.0}), rectlat::UnsupportedOracle);
    EXPECT_THROW(rectlat::direct_lattice_sum(rectlat::riesz(1.0), {2.0, 0.0}), rectlat::UnsupportedOracle);
}

TEST(LatticeEnergy, RieszMatchesEpsteinZeta)
{
    // Unit square lattice: E = (1/2) zeta_{Z^2}(s/2) = 2 zeta(s/2) beta(s/2).
    for (double s : {3.0, 5.0}) {
        const double ref = 2.0 * oracle::riemann_zeta(0.5 * s) * oracle::dirichlet_beta(0.5 * s);
        EXPECT_NEAR(rectlat::lattice_energy(rectlat::riesz(s), {1.0, 0.0}), ref, 1e-11 * ref) << "s=" << s;
    }
    // Density scaling: E(A) = A^{-s/2} E(1).
    const double e1 = rectlat::lattice_energy(rectlat::riesz(3.0), {1.0, 0.2});
    EXPECT_NEAR(rectlat::lattice_energy(rectlat::riesz(3.0), {2.5, 0.2}), std::pow(2.5, -1.5) * e1, 1e-11 * e1);
}

TEST(LatticeEnergy, CoulombBackgroundMatchesEpsteinZeta)
{
    const double ref = oracle::square_coulomb_energy();
    EXPECT_NEAR(ref, -1.9501324, 1e-6);
    EXPECT_NEAR(rectlat::lattice_energy(rectlat::riesz(1.0), {1.0, 0.0}), ref, 1e-11 * std::abs(ref));
}

TEST(LatticeEnergy, CoulombBracketTendsToMinusOne)
{
    for (double eps : {0.0, 0.3}) {
        const double t = 1e-6;
        // P(t) - pi/t: P is ~pi/t up to terms e^{-pi^2/t}, so the bracket minus one is -1.
        EXPECT_NEAR(rectlat::product_minus_one(t, eps) - std::numbers::pi / t, -1.0, 1e-8);
    }
}

TEST(LatticeEnergy, SquareIsOptimalForCompletelyMonotone)
{
    const PotentialSpec fams[] = {rectlat::yukawa(0.7), rectlat::yukawa(4.0), rectlat::riesz(3.0)};
    for (const auto& p : fams) {
        for (double a : {0.5, 1.0, 3.0}) {
            const double e0 = rectlat::lattice_energy(p, {a, 0.0});
            for (double d = 1.01; d <= 3.0; d += 0.11) {
                EXPECT_GT(rectlat::lattice_energy(p, LatticeState::from_delta(a, d)), e0);
                EXPECT_GT(rectlat::energy_difference(p, a, std::log(d)), 0.0);
            }
        }
    }
}

TEST(LatticeEnergy, IndependentOfSplitPoint)
{
    const PotentialSpec fams[] = {rectlat::derive_double_yukawa(9.8, 2.0), rectlat::derive_yukawa_coulomb(2.0)};
    for (const auto& p : fams) {
        rectlat::QuadratureConfig q;
        const double ref = rectlat::lattice_energy(p, {2.7, 0.15}, q);
        for (double split : {1.0, 2.0, 5.0}) {
            q.split_point = split;
            EXPECT_NEAR(rectlat::lattice_energy(p, {2.7, 0.15}, q), ref, 1e-12 * std::abs(ref));
        }
    }
}

TEST(EnergyDifference, AgreesWithEnergyDifferenceOfTotals)
{
    const PotentialSpec p = rectlat::derive_double_yukawa(9.8, 2.0);
    for (double eps : {0.05, 0.3, -0.3}) {
        const double a = 2.7;
        const double ref = rectlat::lattice_energy(p, {a, eps}) - rectlat::lattice_energy(p, {a, 0.0});
        EXPECT_NEAR(rectlat::energy_difference(p, a, eps), ref, 1e-11);
    }
    EXPECT_EQ(rectlat::energy_difference(p, 2.7, 0.0), 0.0);
}

TEST(EnergyDifference, ResolvesTinyAspectChanges)
{
    // At eps = 1e-6 the change is ~e2 eps^2 ~ 1e-13, far below the energy's rounding level.
    const PotentialSpec p = rectlat::yukawa(1.0);
    const double a = 1.5;
    const double d1 = rectlat::energy_difference(p, a, 1e-6);
    const double d2 = rectlat::energy_difference(p, a, 2e-6);
    EXPECT_GT(d1, 0.0);
    EXPECT_NEAR(d2 / d1, 4.0, 1e-5);
}

TEST(EnergySlope, MatchesFiniteDifferences)
{
    const PotentialSpec p = rectlat::derive_yukawa_coulomb(2.0365);
    for (double eps : {0.01, 0.2, -0.2}) {
        const double h = 1e-5;
        const double fd = (rectlat::energy_difference(p, 2.8, eps + h) - rectlat::energy_difference(p, 2.8, eps - h)) /
                          (2 * h);
        EXPECT_NEAR(rectlat::energy_slope(p, 2.8, eps), fd, 1e-7 * std::max(1e-3, std::abs(fd)));
    }
    EXPECT_EQ(rectlat::energy_slope(p, 2.8, 0.0), 0.0);
}
