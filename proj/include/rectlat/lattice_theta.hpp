#pragma once

// The rectangular-lattice theta product
//   P(t, eps) = theta_3(e^{-t e^{-eps}}) theta_3(e^{-t e^{eps}}),
// its eps-Taylor brackets and cancellation-free differences in eps.
//
// Every quantity F built from eps-derivatives or eps-differences of P obeys the
// reflection F(t) = (pi/t) F(pi^2/t), inherited from the modular identity
// P(t, eps) = (pi/t) P(pi^2/t, eps). Arguments below the modular switch point are
// mapped through it, so the direct series always runs at t >= pi.

#include <algorithm>
#include <array>
#include <cmath>

#include "rectlat/theta.hpp"

namespace rectlat {

namespace detail {

/// Runs `direct(s)` at s = max(t, pi^2/t) and applies the (pi/t) reflection factor.
template <class Direct>
double reflected(double t, const Direct& direct)
{
    require_positive_t(t);
    if (t >= kModularSwitch) return direct(t);
    return (kPi / t) * direct(kPi * kPi / t);
}

inline double bracket_e2_direct(double t)
{
    const auto d = theta_direct<2>(t);
    return t * d[0] * d[1] - t * t * d[1] * d[1] + t * t * d[0] * d[2];
}

inline double bracket_e4_direct(double t)
{
    const auto d = theta_direct<4>(t);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    return (t * d[0] * d[1] - t2 * d[1] * d[1] + 7.0 * t2 * d[0] * d[2] +
            6.0 * t3 * d[0] * d[3] - 6.0 * t3 * d[1] * d[2] + t4 * d[0] * d[4] -
            4.0 * t4 * d[1] * d[3] + 3.0 * t4 * d[2] * d[2]) /
           12.0;
}

/// P(t, eps) - 1 for direct arguments, without cancellation when both factors are near 1.
inline double product_minus_one_direct(double t, double eps)
{
    const double a = 2.0 * theta_tail_direct(t * std::exp(-eps));
    const double b = 2.0 * theta_tail_direct(t * std::exp(eps));
    return a + b + a * b;
}

/// Per-index pieces shared by the change and slope of P in eps.
struct ShiftTerms {
    double theta0 = 1.0;   ///< theta(t)
    double u0 = 0.0;       ///< t theta'(t)
    double delta_sum = 0;  ///< theta(t e^eps) + theta(t e^-eps) - 2 theta(t)
    double delta_p = 0;    ///< theta(t e^eps) - theta(t)
    double delta_m = 0;    ///< theta(t e^-eps) - theta(t)
    double gamma_p = 0;    ///< U(t e^eps) - U(t), U(x) = x theta'(x)
    double gamma_m = 0;    ///< U(t e^-eps) - U(t)
    double gamma_diff = 0; ///< gamma_p - gamma_m
};

/// e^{-x} expm1(c), without forming e^{c} when |c| is large.
inline double scaled_expm1(double x, double c)
{
    if (std::abs(c) < 1.0) return std::exp(-x) * std::expm1(c);
    return std::exp(c - x) - std::exp(-x);
}

inline ShiftTerms shift_terms(double t, double eps)
{
    ShiftTerms r;
    const double sh = std::sinh(eps);
    const double sh_half = std::sinh(0.5 * eps);
    const double xp = t * std::exp(eps);
    const double xm = t * std::exp(-eps);
    const double dp = t * std::expm1(eps);   // xp - t
    const double dm = t * std::expm1(-eps);  // xm - t
    const double x_lo = std::min(xp, xm);
    double theta_tail = 0.0;
    double u_acc = 0.0;
    for (int j = 1;; ++j) {
        const double j2 = static_cast<double>(j) * j;
        const double j2t = j2 * t;
        const double w = std::exp(-j2t);
        // exponents of the shifted terms relative to e^{-j^2 t}
        const double cp = -j2 * dp;
        const double cm = -j2 * dm;
        const double m = -2.0 * j2t * sh_half * sh_half;  // (cp + cm)/2
        const double h = -j2t * sh;                        // (cp - cm)/2
        const double wp = scaled_expm1(j2t, cp);           // e^{-j^2 t} expm1(cp)
        const double wm = scaled_expm1(j2t, cm);

        theta_tail += w;
        u_acc += j2 * w;
        r.delta_p += 2.0 * wp;
        r.delta_m += 2.0 * wm;
        r.gamma_p += -2.0 * j2 * (xp * wp + w * dp);
        r.gamma_m += -2.0 * j2 * (xm * wm + w * dm);
        if (std::abs(h) < 1.0) {
            const double sh_h2 = std::sinh(0.5 * h);
            r.delta_sum += 4.0 * w * (std::expm1(m) * std::cosh(h) + 2.0 * sh_h2 * sh_h2);
            r.gamma_diff += -4.0 * t * j2 * w * std::exp(m) * std::sinh(eps + h);
        } else {
            r.delta_sum += 2.0 * (wp + wm);
            r.gamma_diff += -2.0 * t * j2 *
                            (std::exp(m + eps + h - j2t) - std::exp(m - eps - h - j2t));
        }

        const double scale = j2 * (1.0 + j2 * x_lo) * std::exp(-j2 * x_lo);
        if (j2 * x_lo > 2.0 && scale <= kThetaTermCutoff * theta_tail) break;
        if (scale == 0.0) break;
    }
    r.theta0 = 1.0 + 2.0 * theta_tail;
    r.u0 = -2.0 * t * u_acc;
    return r;
}

/// P(t, eps) - P(t, 0), direct arguments.
inline double product_change_direct(double t, double eps)
{
    const ShiftTerms s = shift_terms(t, eps);
    return s.theta0 * s.delta_sum + s.delta_p * s.delta_m;
}

/// dP/deps at (t, eps), direct arguments.
inline double product_slope_direct(double t, double eps)
{
    const ShiftTerms s = shift_terms(t, eps);
    // U(x+) T(x-) - U(x-) T(x+), expanded around t.
    return s.u0 * (s.delta_m - s.delta_p) + s.theta0 * s.gamma_diff + s.gamma_p * s.delta_m -
           s.gamma_m * s.delta_p;
}

} // namespace detail

/// eps^2 coefficient of P(t, e^eps): t th th' - t^2 th'^2 + t^2 th th''.
inline double bracket_e2(double t) { return detail::reflected(t, detail::bracket_e2_direct); }

/// eps^4 coefficient of P(t, e^eps).
inline double bracket_e4(double t) { return detail::reflected(t, detail::bracket_e4_direct); }

/// t th th' + t^2 th th'' - t^2 th'^2 divided by t; strictly positive for t > 0.
inline double faulhuber_steinerberger(double t) { return bracket_e2(t) / t; }

/// P(t, eps) - P(t, 0).
inline double product_change(double t, double eps)
{
    return detail::reflected(t, [eps](double s) { return detail::product_change_direct(s, eps); });
}

/// dP/deps.
inline double product_slope(double t, double eps)
{
    return detail::reflected(t, [eps](double s) { return detail::product_slope_direct(s, eps); });
}

/// P(t, eps) - 1, valid for any t > 0 (direct series, no reflection).
/// The energy path uses the reflected form plus elementary integrals instead.
inline double product_minus_one(double t, double eps)
{
    detail::require_positive_t(t);
    if (t >= kModularSwitch) return detail::product_minus_one_direct(t, eps);
    const double s = kPi * kPi / t;
    return (kPi / t) * (1.0 + detail::product_minus_one_direct(s, eps)) - 1.0;
}

} // namespace rectlat
