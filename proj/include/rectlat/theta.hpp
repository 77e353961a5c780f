#pragma once

// Jacobi theta function theta_3(q) at q = e^{-t} and its t-derivatives,
//   theta3^{(n)}(t) = d^n/dt^n theta_3(e^{-t}) = sum_j (-j^2)^n e^{-j^2 t}.
// For t below the modular switch point the transformed series
//   theta_3(e^{-t}) = sqrt(pi/t) theta_3(e^{-pi^2/t})
// is used, differentiated analytically.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rectlat/errors.hpp"

namespace rectlat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kModularSwitch = kPi;
/// Series terms below this fraction of the running sum are dropped.
inline constexpr double kThetaTermCutoff = 1e-18;
inline constexpr int kMaxThetaOrder = 4;

namespace detail {

/// sum_{j in Z} (-j^2)^n e^{-j^2 x} for n = 0..N by direct summation.
/// Accurate for any x > 0 but only cheap for x of order one or larger.
template <int N>
std::array<double, N + 1> theta_direct(double x)
{
    std::array<double, N + 1> s{};
    s[0] = 1.0;
    for (int j = 1;; ++j) {
        const double j2 = static_cast<double>(j) * j;
        double p = 2.0 * std::exp(-j2 * x);
        bool negligible = j2 * x > N;  // past the peak of j^{2N} e^{-j^2 x}
        for (int n = 0; n <= N; ++n) {
            s[n] += p;
            if (std::abs(p) > kThetaTermCutoff * std::abs(s[n])) negligible = false;
            p *= -j2;
        }
        if (negligible || p == 0.0) break;
    }
    return s;
}

/// sum_{j>=1} e^{-j^2 x} (i.e. (theta_3(e^{-x}) - 1)/2) without the leading 1.
inline double theta_tail_direct(double x)
{
    double s = 0.0;
    for (int j = 1;; ++j) {
        const double term = std::exp(-static_cast<double>(j) * j * x);
        s += term;
        if (term <= kThetaTermCutoff * s) break;
    }
    return s;
}

inline void require_positive_t(double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("theta3: argument t must be positive and finite, got " +
                          std::to_string(t));
    }
}

} // namespace detail

/// theta_3(e^{-t}) for t > 0.
inline double theta3(double t)
{
    detail::require_positive_t(t);
    if (t >= kModularSwitch) return detail::theta_direct<0>(t)[0];
    return std::sqrt(kPi / t) * detail::theta_direct<0>(kPi * kPi / t)[0];
}

/// theta3^{(n)}(t) for n = 0..4, all returned at once.
inline std::array<double, kMaxThetaOrder + 1> theta3_derivs(double t)
{
    detail::require_positive_t(t);
    if (t >= kModularSwitch) return detail::theta_direct<kMaxThetaOrder>(t);

    // theta(t) = a(t) b(t), a = sqrt(pi) t^{-1/2}, b = g(u(t)), u = pi^2/t, g = theta_direct.
    const double u = kPi * kPi / t;
    const auto g = detail::theta_direct<kMaxThetaOrder>(u);

    std::array<double, 5> a{};
    double c = 1.0;
    for (int k = 0; k <= 4; ++k) {
        a[k] = std::sqrt(kPi) * c * std::pow(t, -0.5 - k);
        c *= -0.5 - k;
    }
    // u^{(m)} = pi^2 (-1)^m m! t^{-1-m}
    const double pi2 = kPi * kPi;
    const double u1 = -pi2 / (t * t);
    const double u2 = 2.0 * pi2 / (t * t * t);
    const double u3 = -6.0 * pi2 / (t * t * t * t);
    const double u4 = 24.0 * pi2 / (t * t * t * t * t);

    // Faa di Bruno up to fourth order.
    std::array<double, 5> b{};
    b[0] = g[0];
    b[1] = g[1] * u1;
    b[2] = g[2] * u1 * u1 + g[1] * u2;
    b[3] = g[3] * u1 * u1 * u1 + 3.0 * g[2] * u1 * u2 + g[1] * u3;
    b[4] = g[4] * u1 * u1 * u1 * u1 + 6.0 * g[3] * u1 * u1 * u2 + 3.0 * g[2] * u2 * u2 +
           4.0 * g[2] * u1 * u3 + g[1] * u4;

    static constexpr int binom[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    std::array<double, 5> out{};
    for (int n = 0; n <= 4; ++n) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) acc += binom[n][k] * a[k] * b[n - k];
        out[n] = acc;
    }
    return out;
}

inline double theta3_deriv(double t, int n)
{
    if (n < 0 || n > kMaxThetaOrder) {
        throw DomainError("theta3_deriv: order must be in 0..4, got " + std::to_string(n));
    }
    if (n == 0) return theta3(t);
    return theta3_derivs(t)[n];
}

struct ThetaEval {
    double t = 0.0;
    int order = 0;
    std::array<double, kMaxThetaOrder + 1> values{};  ///< entries above `order` are zero
};

inline ThetaEval evaluate_theta(double t, int order)
{
    if (order < 0 || order > kMaxThetaOrder) {
        throw DomainError("evaluate_theta: order must be in 0..4, got " + std::to_string(order));
    }
    ThetaEval e;
    e.t = t;
    e.order = order;
    if (order == 0) {
        e.values[0] = theta3(t);
        return e;
    }
    const auto all = theta3_derivs(t);
    for (int n = 0; n <= order; ++n) e.values[n] = all[n];
    return e;
}

} // namespace rectlat
