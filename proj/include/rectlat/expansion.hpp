#pragma once

// Landau coefficients of E(A, e^eps) = E0 + E2 eps^2 + E4 eps^4 + E6 eps^6 + ...
//
// Two independent routes:
//   closed form  E2, E4 from fixed theta-derivative brackets;
//   series       the eps-series of P(t, eps) built per node by exponentiating the
//                exponent series of each lattice term, summed over (j, k) shells.
// Both integrate against rho_f(t/A)/A with the modular reflection at pi.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "rectlat/energy.hpp"
#include "rectlat/errors.hpp"
#include "rectlat/lattice_theta.hpp"
#include "rectlat/potential.hpp"
#include "rectlat/powerseries.hpp"
#include "rectlat/quadrature.hpp"

namespace rectlat {

enum class ExpansionMethod { ClosedForm, Series };

inline std::string_view to_string(ExpansionMethod m)
{
    return m == ExpansionMethod::ClosedForm ? "closed" : "series";
}

struct ExpansionCoefficients {
    double area = 0.0;
    double e0 = 0.0;
    double e2 = 0.0;
    double e4 = 0.0;
    std::optional<double> e6;  ///< series method only
    ExpansionMethod method = ExpansionMethod::ClosedForm;
    /// Full coefficient list c_0..c_8 (series method); odd entries vanish by symmetry.
    std::array<double, kDefaultSeriesOrder + 1> coefficients{};
};

/// E(A, 1).
inline double e0(const PotentialSpec& spec, double area, const QuadratureConfig& q = {})
{
    return lattice_energy(spec, LatticeState{area, 0.0}, q);
}

/// 1/2 int_0^inf B2(t) rho_f(t/A) dt/A with B2 = t th th' - t^2 th'^2 + t^2 th th''.
inline double e2_closed(const PotentialSpec& spec, double area, const QuadratureConfig& q = {})
{
    LatticeState{area, 0.0}.validate();
    q.validate();
    return 0.5 * detail::reflected_scalar(detail::bracket_e2_direct, spec, area, q);
}

/// The eps^4 coefficient from its closed theta-derivative bracket.
inline double e4_closed(const PotentialSpec& spec, double area, const QuadratureConfig& q = {})
{
    LatticeState{area, 0.0}.validate();
    q.validate();
    return 0.5 * detail::reflected_scalar(detail::bracket_e4_direct, spec, area, q);
}

inline ExpansionCoefficients expansion_closed(const PotentialSpec& spec, double area,
                                              const QuadratureConfig& q = {})
{
    ExpansionCoefficients c;
    c.area = area;
    c.method = ExpansionMethod::ClosedForm;
    c.e0 = e0(spec, area, q);
    c.e2 = e2_closed(spec, area, q);
    c.e4 = e4_closed(spec, area, q);
    c.coefficients[0] = c.e0;
    c.coefficients[2] = c.e2;
    c.coefficients[4] = c.e4;
    return c;
}

namespace detail {

inline constexpr std::size_t kSeriesSize = kDefaultSeriesOrder + 1;
inline constexpr int kMaxSeriesShells = 200;

/// eps-series coefficients of P(t, eps) at a direct node t >= pi, with c_0 - 1
/// in place of c_0.
inline std::array<double, kSeriesSize> product_series_direct(double t)
{
    constexpr std::size_t N = kDefaultSeriesOrder;
    std::array<double, kSeriesSize> total{};
    double peak = 0.0;

    // exp(-t (j^2 e^{-eps} + k^2 e^{eps})), eps-coefficients of the exponent
    const auto term = [&](double j2, double k2) {
        PowerSeries ex(N);
        double fact = 1.0;
        for (std::size_t n = 0; n <= N; ++n) {
            if (n > 0) fact *= static_cast<double>(n);
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            ex[n] = -t * (j2 * sign + k2) / fact;
        }
        return series_exp(ex);
    };

    for (int n = 1; n <= kMaxSeriesShells; ++n) {
        std::array<double, kSeriesSize> shell{};
        // shell max(j, k) = n over j, k >= 0, each point weighted by its sign images
        for (int m = 0; m <= n; ++m) {
            const int pairs[2][2] = {{n, m}, {m, n}};
            for (int p = 0; p < (m == n ? 1 : 2); ++p) {
                const int j = pairs[p][0];
                const int k = pairs[p][1];
                const double mult = (j == 0 ? 1.0 : 2.0) * (k == 0 ? 1.0 : 2.0);
                const PowerSeries s = term(static_cast<double>(j) * j, static_cast<double>(k) * k);
                for (std::size_t c = 0; c < kSeriesSize; ++c) shell[c] += mult * s[c];
            }
        }
        double shell_max = 0.0;
        for (std::size_t c = 0; c < kSeriesSize; ++c) {
            total[c] += shell[c];
            shell_max = std::max(shell_max, std::abs(shell[c]));
            peak = std::max(peak, std::abs(total[c]));
        }
        // beyond n^2 t > N every coefficient decays monotonically with the shell index
        if (static_cast<double>(n) * n * t > static_cast<double>(N) &&
            shell_max <= kThetaTermCutoff * peak) {
            return total;
        }
    }
    throw QuadratureError("expansion_series: (j,k) shell sum did not converge at t = " +
                              std::to_string(t),
                          peak);
}

} // namespace detail

/// Landau coefficients from the series engine: E0..E6 (and the vanishing odd ones).
inline ExpansionCoefficients expansion_series(const PotentialSpec& spec, double area,
                                              const QuadratureConfig& q = {})
{
    LatticeState{area, 0.0}.validate();
    q.validate();
    const auto w = [&](double t) { return spec.scaled_density(t, area); };
    const auto r = detail::reflected_integral<detail::kSeriesSize>(
        detail::product_series_direct, w, q);

    ExpansionCoefficients c;
    c.area = area;
    c.method = ExpansionMethod::Series;
    for (std::size_t i = 0; i < detail::kSeriesSize; ++i) c.coefficients[i] = 0.5 * r.value[i];
    c.coefficients[0] += 0.5 * spec.small_t_elementary(q.split_point, area);
    c.e0 = c.coefficients[0];
    c.e2 = c.coefficients[2];
    c.e4 = c.coefficients[4];
    c.e6 = c.coefficients[6];
    return c;
}

/// Landau coefficients by the requested method.
inline ExpansionCoefficients expansion(const PotentialSpec& spec, double area,
                                       ExpansionMethod method, const QuadratureConfig& q = {})
{
    return method == ExpansionMethod::ClosedForm ? expansion_closed(spec, area, q)
                                                 : expansion_series(spec, area, q);
}

} // namespace rectlat
