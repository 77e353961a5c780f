#pragma once

// Independent reference computations for the test suite. None of these reuse the
// library's theta, quadrature or lattice code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// sum_{j in Z} (-j^2)^n e^{-j^2 t} by brute force in long double, out to j^2 t = 200.
inline long double theta_sum(long double t, int n)
{
    long double s = n == 0 ? 1.0L : 0.0L;
    const long double jmax = std::sqrt(200.0L / t) + 2.0L;
    for (long double j = 1; j <= jmax; j += 1) {
        const long double j2 = j * j;
        s += 2.0L * std::pow(-j2, n) * std::exp(-j2 * t);
    }
    return s;
}

/// Taylor coefficients of exp(c x^2): (c^k / k!) at even index 2k, zero elsewhere.
inline std::vector<double> exp_quadratic_coefficients(double c, std::size_t order)
{
    std::vector<double> out(order + 1, 0.0);
    double term = 1.0;
    for (std::size_t k = 0; 2 * k <= order; ++k) {
        out[2 * k] = term;
        term *= c / static_cast<double>(k + 1);
    }
    return out;
}

/// (1/2) sum' f(sqrt(A (j^2/D + k^2 D))) over |j|, |k| <= R, long double accumulation.
inline long double naive_lattice_sum(const std::function<long double(long double)>& f, long double area,
                                     long double delta, int radius)
{
    long double s = 0.0L;
    for (int j = -radius; j <= radius; ++j) {
        for (int k = -radius; k <= radius; ++k) {
            if (j == 0 && k == 0) continue;
            const long double r2 = area * (static_cast<long double>(j) * j / delta +
                                           static_cast<long double>(k) * k * delta);
            s += f(std::sqrt(r2));
        }
    }
    return 0.5L * s;
}

/// int_0^inf g(t) dt by double-exponential (exp-sinh) quadrature.
inline double half_line(const std::function<double(double)>& g, double tol = 1e-14)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(g, tol);
}

/// int_a^b g(t) dt by tanh-sinh quadrature.
inline double interval(const std::function<double(double)>& g, double a, double b, double tol = 1e-14)
{
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(g, a, b, tol);
}

/// Alternating series sum_{k>=0} (-1)^k a(k) by the Cohen-Rodriguez Villegas-Zagier
/// acceleration with n terms.
inline double alternating_sum(const std::function<double(int)>& a, int n = 40)
{
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b = (k + static_cast<double>(n)) * (k - static_cast<double>(n)) * b /
            ((k + 0.5) * (k + 1.0));
    }
    return s / d;
}

/// Riemann zeta at 0 < s < 1 through the alternating eta series.
inline double riemann_zeta(double s)
{
    const double eta = alternating_sum([s](int k) { return std::pow(k + 1.0, -s); });
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

/// Dirichlet beta function sum (-1)^k (2k+1)^{-s}.
inline double dirichlet_beta(double s)
{
    return alternating_sum([s](int k) { return std::pow(2.0 * k + 1.0, -s); });
}

/// Regularized energy per particle of the unit square lattice for 1/r:
/// (1/2) zeta_{Z^2}(1/2), with zeta_{Z^2}(s) = 4 zeta(s) beta(s).
inline double square_coulomb_energy()
{
    return 0.5 * 4.0 * riemann_zeta(0.5) * dirichlet_beta(0.5);
}

/// Central second difference of g at x with step h.
inline double second_difference(const std::function<double(double)>& g, double x, double h)
{
    return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
}

} // namespace oracle
