// Tricritical point of the Yukawa-Coulomb model and the first-order transition just
// below it in kappa1.

#include <cmath>
#include <cstdio>

#include "rectlat/rectlat.hpp"

int main()
{
    const rectlat::TricriticalPoint tc = rectlat::find_tricritical(rectlat::yukawa_coulomb_family());
    std::printf("tricritical: A = %.12f, kappa1 = %.12f (|E2| = %.1e, |E4| = %.1e)\n", tc.a_t,
                tc.param_t, std::abs(tc.e2_residual), std::abs(tc.e4_residual));

    const rectlat::PotentialSpec spec = rectlat::derive_yukawa_coulomb(2.0365);
    const rectlat::FirstOrderTransition fo = rectlat::find_first_order(spec);
    std::printf("kappa1 = 2.0365: E2 root A* = %.12f, first-order A = %.12f, Delta jumps to %.6f\n",
                fo.a_star, fo.a_trans, std::exp(fo.eps_jump));

    const rectlat::FitResult fit = rectlat::fit_exponent(
        rectlat::derive_yukawa_coulomb(tc.param_t), tc.a_t,
        rectlat::default_fit_deltas(tc.a_t, rectlat::CriticalKind::Tricritical));
    std::printf("tricritical exponent beta = %.4f (r^2 = %.6f)\n", fit.beta, fit.r_squared);
    return 0;
}
