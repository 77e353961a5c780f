#pragma once

// Energy per particle of the rectangular lattice with cell area A and aspect ratio
// Delta = e^eps,
//   E(A, Delta) = 1/2 sum'_{j,k} f( sqrt(A (j^2/Delta + k^2 Delta)) )
//               = 1/2 int_0^inf [P(t, eps) - 1] rho_f(t/A) dt/A,
// evaluated through the theta-product integral. On (0, p) the product is replaced by
// its modular image, (pi/t) P(pi^2/t, eps); the leftover (pi/t - 1) part integrates in
// closed form against each measure term, which is also where the neutralizing
// background of 1/r-type terms enters.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "rectlat/errors.hpp"
#include "rectlat/lattice_theta.hpp"
#include "rectlat/potential.hpp"
#include "rectlat/quadrature.hpp"

namespace rectlat {

struct LatticeState {
    double area = 1.0;  ///< A, inverse particle density
    double eps = 0.0;   ///< log aspect ratio

    [[nodiscard]] double delta() const { return std::exp(eps); }

    static LatticeState from_delta(double area, double delta)
    {
        if (!(delta > 0.0) || !std::isfinite(delta)) {
            throw DomainError("aspect ratio Delta must be positive, got " + std::to_string(delta));
        }
        return {area, std::log(delta)};
    }

    /// Mirror onto the eps >= 0 branch.
    [[nodiscard]] LatticeState canonical() const { return {area, std::abs(eps)}; }

    void validate() const
    {
        if (!(area > 0.0) || !std::isfinite(area)) {
            throw DomainError("inverse density A must be positive, got " + std::to_string(area));
        }
        if (!std::isfinite(eps)) throw DomainError("log aspect ratio must be finite");
    }
};

namespace detail {

/// int_0^inf F(t) w(t) dt for F obeying F(t) = (pi/t) F(pi^2/t), split at p.
/// `direct(s)` evaluates F at s >= min(p, pi^2/p) and returns std::array<double, N>.
template <std::size_t N, class Direct, class Weight>
QuadratureResult<N> reflected_integral(const Direct& direct, const Weight& weight,
                                       const QuadratureConfig& q)
{
    constexpr double pi = std::numbers::pi;
    const double p = q.split_point;
    const auto mirror = [&](double s) { return pi * weight(pi * pi / s) / s; };
    if (p == pi) {
        const auto f = [&](double s) {
            auto v = direct(s);
            const double w = weight(s) + mirror(s);
            for (auto& x : v) x *= w;
            return v;
        };
        return integrate_vector_to_infinity<N>(f, pi, q);
    }
    const auto upper = [&](double t) {
        auto v = direct(t);
        const double w = weight(t);
        for (auto& x : v) x *= w;
        return v;
    };
    const auto lower = [&](double s) {
        auto v = direct(s);
        const double w = mirror(s);
        for (auto& x : v) x *= w;
        return v;
    };
    auto a = integrate_vector_to_infinity<N>(upper, p, q);
    const auto b = integrate_vector_to_infinity<N>(lower, pi * pi / p, q);
    for (std::size_t c = 0; c < N; ++c) {
        a.value[c] += b.value[c];
        a.error[c] += b.error[c];
        a.l1[c] += b.l1[c];
    }
    a.evaluations += b.evaluations;
    a.intervals += b.intervals;
    return a;
}

template <class Direct>
double reflected_scalar(const Direct& direct, const PotentialSpec& spec, double area,
                        const QuadratureConfig& q)
{
    const auto d = [&](double s) { return std::array<double, 1>{direct(s)}; };
    const auto w = [&](double t) { return spec.scaled_density(t, area); };
    return reflected_integral<1>(d, w, q).value[0];
}

/// Differences in eps are controlled relative to their own size, down to roundoff.
inline QuadratureConfig relative_only(QuadratureConfig q)
{
    q.abs_tol = 0.0;
    return q;
}

} // namespace detail

/// E(A, e^eps) via the theta-function integral.
inline double lattice_energy(const PotentialSpec& spec, const LatticeState& state,
                             const QuadratureConfig& q = {})
{
    state.validate();
    q.validate();
    const LatticeState c = state.canonical();
    const double integral = detail::reflected_scalar(
        [eps = c.eps](double s) { return detail::product_minus_one_direct(s, eps); }, spec,
        c.area, q);
    return 0.5 * (integral + spec.small_t_elementary(q.split_point, c.area));
}

/// E(A, e^eps) - E(A, 1), integrated without forming either energy.
inline double energy_difference(const PotentialSpec& spec, double area, double eps,
                                const QuadratureConfig& q = {})
{
    LatticeState{area, eps}.validate();
    q.validate();
    const double e = std::abs(eps);
    if (e == 0.0) return 0.0;
    return 0.5 * detail::reflected_scalar(
                     [e](double s) { return detail::product_change_direct(s, e); }, spec, area,
                     detail::relative_only(q));
}

/// dE(A, e^eps)/deps.
inline double energy_slope(const PotentialSpec& spec, double area, double eps,
                           const QuadratureConfig& q = {})
{
    LatticeState{area, eps}.validate();
    q.validate();
    if (eps == 0.0) return 0.0;
    const double e = std::abs(eps);
    const double slope = 0.5 * detail::reflected_scalar(
                                   [e](double s) { return detail::product_slope_direct(s, e); },
                                   spec, area, detail::relative_only(q));
    return eps > 0.0 ? slope : -slope;
}

namespace detail {

/// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

} // namespace detail

inline constexpr std::int64_t kMaxLatticeShells = 20000;

/// 1/2 sum over (j,k) != 0 of f(|p|), accumulated over square shells max(|j|,|k|) = n
/// until the bound on all remaining shells drops below `cutoff_tol`.
/// Only for potentials whose lattice sum converges absolutely.
inline double direct_lattice_sum(const PotentialSpec& spec, const LatticeState& state,
                                 double cutoff_tol = 1e-16)
{
    state.validate();
    if (!(cutoff_tol > 0.0)) throw DomainError("direct_lattice_sum: cutoff_tol must be positive");
    if (spec.needs_background()) {
        throw UnsupportedOracle("direct_lattice_sum: the " + std::string(to_string(spec.family())) +
                                " lattice sum is only conditionally convergent");
    }
    for (const auto& p : spec.power_terms()) {
        if (p.exponent <= 2.0) {
            throw UnsupportedOracle("direct_lattice_sum: 1/r^s needs s > 2");
        }
    }

    const double delta = state.delta();
    const double ax = std::sqrt(state.area / delta);  // spacing along j
    const double ay = std::sqrt(state.area * delta);  // spacing along k
    const double c = std::min(ax, ay);

    double kappa_min = 0.0;
    double screened_amp = 0.0;
    for (const auto& t : spec.screened_terms()) {
        kappa_min = (kappa_min == 0.0) ? t.kappa : std::min(kappa_min, t.kappa);
        screened_amp += std::abs(t.amplitude);
    }
    // Bound on the sum over all shells m > n of 1/2 * 8m * |f(m c)|.
    const auto tail_bound = [&](std::int64_t n) {
        double b = 0.0;
        if (screened_amp > 0.0) {
            const double q = std::exp(-kappa_min * c);
            b += 0.5 * 8.0 * screened_amp / c * std::pow(q, static_cast<double>(n + 1)) / (1.0 - q);
        }
        for (const auto& p : spec.power_terms()) {
            b += 0.5 * 8.0 * std::abs(p.amplitude) * std::pow(c, -p.exponent) *
                 std::pow(static_cast<double>(n), 2.0 - p.exponent) / (p.exponent - 2.0);
        }
        return b;
    };

    const auto f_at = [&](std::int64_t j, std::int64_t k) {
        const double x = static_cast<double>(j) * ax;
        const double y = static_cast<double>(k) * ay;
        return spec.value(std::sqrt(x * x + y * y));
    };

    detail::CompensatedSum total;
    for (std::int64_t n = 1;; ++n) {
        // Each shell point and its images under (j,k) -> (-j,k), (j,-k), (-j,-k).
        detail::CompensatedSum shell;
        shell.add(2.0 * f_at(n, 0) + 2.0 * f_at(0, n));
        shell.add(4.0 * f_at(n, n));
        for (std::int64_t m = 1; m < n; ++m) shell.add(4.0 * f_at(n, m) + 4.0 * f_at(m, n));
        total.add(0.5 * shell.value());
        if (tail_bound(n) < cutoff_tol) break;
        if (n >= kMaxLatticeShells) {
            throw UnsupportedOracle("direct_lattice_sum: tail bound " + std::to_string(tail_bound(n)) +
                                    " still above cutoff after " + std::to_string(n) + " shells");
        }
    }
    return total.value();
}

} // namespace rectlat
