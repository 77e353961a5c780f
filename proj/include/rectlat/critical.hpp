#pragma once

// Transition finding on the rectangular family:
//   second order   E2(A*) = 0 with E4(A*) > 0, eps ~ (A - A*)^{1/2};
//   tricritical    E2 = E4 = 0 along a one-parameter family, eps ~ (A - At)^{1/4};
//   first order    E4(A*) < 0; the square and rectangular minima exchange at the
//                  density where their energies cross, eps jumps.
// E2 > 0 on the dense side of A*, so the rectangular phase lies at A > A*.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "rectlat/energy.hpp"
#include "rectlat/errors.hpp"
#include "rectlat/expansion.hpp"
#include "rectlat/lattice_theta.hpp"
#include "rectlat/potential.hpp"
#include "rectlat/quadrature.hpp"

namespace rectlat {

enum class TransitionOrder { Second, First };

inline std::string_view to_string(TransitionOrder o)
{
    return o == TransitionOrder::Second ? "second" : "first";
}

namespace detail {

inline constexpr std::uintmax_t kMaxRootIterations = 200;

/// Bracketed root by TOMS 748, stopping at |b - a| <= rel_tol * max(|a|, |b|).
template <class F>
double bracketed_root(const F& f, double a, double b, double fa, double fb, double rel_tol,
                      const char* what)
{
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
        throw BracketError(std::string(what) + ": no sign change on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]");
    }
    std::uintmax_t iters = kMaxRootIterations;
    const auto tol = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    if (iters >= kMaxRootIterations) {
        throw NonconvergenceError(std::string(what) + ": root refinement did not converge");
    }
    return 0.5 * (r.first + r.second);
}

template <class F>
double bracketed_root(const F& f, double a, double b, double rel_tol, const char* what)
{
    return bracketed_root(f, a, b, f(a), f(b), rel_tol, what);
}

/// (E2, E4) from one vector quadrature.
inline std::array<double, 2> e2_e4(const PotentialSpec& spec, double area, const QuadratureConfig& q)
{
    LatticeState{area, 0.0}.validate();
    const auto d = [](double s) {
        return std::array<double, 2>{bracket_e2_direct(s), bracket_e4_direct(s)};
    };
    const auto w = [&](double t) { return spec.scaled_density(t, area); };
    const auto r = reflected_integral<2>(d, w, q);
    return {0.5 * r.value[0], 0.5 * r.value[1]};
}

} // namespace detail

/// dE2/dA by central differences with step 1e-5 A.
inline double e2_area_derivative(const PotentialSpec& spec, double area, const QuadratureConfig& q = {})
{
    const double h = 1e-5 * area;
    return (e2_closed(spec, area + h, q) - e2_closed(spec, area - h, q)) / (2.0 * h);
}

// ---------------------------------------------------------------------------------
// Minimization over the aspect ratio

/// Default upper end of every aspect search: Delta <= 4.
inline const double kDefaultEpsCap = std::log(4.0);

struct AspectSearch {
    double eps_floor = 0.0;           ///< lower end of the search interval
    double eps_cap = kDefaultEpsCap;  ///< upper end of the search interval
    double eps_grid_min = 1e-7;       ///< smallest nonzero grid point
    int points_per_decade = 8;

    void validate() const
    {
        if (!(eps_floor >= 0.0) || !(eps_cap > eps_floor) || !std::isfinite(eps_cap)) {
            throw DomainError("aspect search: need 0 <= eps_floor < eps_cap");
        }
        if (!(eps_grid_min > 0.0) || points_per_decade < 1) {
            throw DomainError("aspect search: invalid grid");
        }
    }
};

struct AspectMinimum {
    double eps = 0.0;          ///< minimizing log aspect ratio, >= 0
    double energy = 0.0;       ///< E(A, e^eps)
    double energy_gain = 0.0;  ///< E(A, e^eps) - E(A, 1)
    bool at_boundary = false;  ///< minimum sits on eps_floor or eps_cap
};

namespace detail {

inline std::vector<double> eps_grid(const AspectSearch& s)
{
    std::vector<double> g;
    const double start = s.eps_floor > 0.0 ? s.eps_floor : s.eps_grid_min;
    if (s.eps_floor == 0.0) g.push_back(0.0);
    const double decades = std::log10(s.eps_cap / start);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * s.points_per_decade)) + 1);
    for (int i = 0; i < n; ++i) {
        g.push_back(i + 1 == n ? s.eps_cap : start * std::pow(10.0, decades * i / (n - 1)));
    }
    return g;
}

} // namespace detail

/// Global minimizer of E(A, e^eps) over eps in [eps_floor, eps_cap].
/// Every local minimum of a logarithmic eps-grid is refined by a root of dE/deps.
inline AspectMinimum minimize_aspect(const PotentialSpec& spec, double area,
                                     const QuadratureConfig& q = {}, const AspectSearch& s = {})
{
    s.validate();
    LatticeState{area, 0.0}.validate();
    const std::vector<double> x = detail::eps_grid(s);
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = energy_difference(spec, area, x[i], q);

    const auto slope = [&](double e) { return energy_slope(spec, area, e, q); };
    bool found = false;
    AspectMinimum best;
    const auto consider = [&](double e, double gain, bool boundary) {
        if (!std::isfinite(gain)) return;
        if (!found || gain < best.energy_gain) {
            best.eps = e;
            best.energy_gain = gain;
            best.at_boundary = boundary;
            found = true;
        }
    };

    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || d[i] <= d[i - 1];
        const bool right_ok = i + 1 == n || d[i] <= d[i + 1];
        if (!left_ok || !right_ok) continue;
        if (i == 0 || i + 1 == n) {
            const double sl = x[i] == 0.0 ? 0.0 : slope(x[i]);
            // a boundary point is a minimum only if the slope points outward
            if ((i == 0 && sl >= 0.0) || (i + 1 == n && sl <= 0.0)) {
                consider(x[i], d[i], true);
                continue;
            }
        }
        const double a = i == 0 ? x[i] : x[i - 1];
        const double b = i + 1 == n ? x[i] : x[i + 1];
        const double sa = a == 0.0 ? 0.0 : slope(a);
        const double sb = slope(b);
        if (sa < 0.0 && sb > 0.0) {
            const double e = detail::bracketed_root(slope, a, b, sa, sb, 1e-13, "minimize_aspect");
            consider(e, energy_difference(spec, area, e, q), false);
        } else {
            consider(x[i], d[i], false);
        }
    }
    if (!found) {
        throw SearchFailure("minimize_aspect: no minimum found on [" + std::to_string(s.eps_floor) +
                            ", " + std::to_string(s.eps_cap) + "] at A = " + std::to_string(area));
    }
    best.energy = e0(spec, area, q) + best.energy_gain;
    return best;
}

// ---------------------------------------------------------------------------------
// Second-order transition points

struct TransitionPoint {
    double a_star = 0.0;
    TransitionOrder order = TransitionOrder::Second;
    double e2_residual = 0.0;
    double e4_at_a_star = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
};

/// Where E2 roots are looked for. Brackets are cells of width `cell` on a fixed grid,
/// so a root is refined from the same bracket whatever the starting hint.
struct RootSearch {
    double a_min = 0.25;
    double a_max = 12.0;
    double coarse_step = 0.125;
    double cell = 1.0 / 64.0;
    int hint_cells = 16;  ///< cells searched on each side of a hint
};

/// Canonical bracket [k c, (k+1) c] of the E2 root; first sign change in A when cold.
inline std::pair<double, double> bracket_e2_root(const PotentialSpec& spec, const QuadratureConfig& q,
                                                 std::optional<double> hint = std::nullopt,
                                                 const RootSearch& rs = {})
{
    const double c = rs.cell;
    const auto e2 = [&](double a) { return e2_closed(spec, a, q); };
    const auto changes = [](double fa, double fb) { return (fa > 0.0) != (fb > 0.0); };

    if (hint && std::isfinite(*hint) && *hint > rs.a_min && *hint < rs.a_max) {
        const double k0 = std::floor(*hint / c);
        for (int off = 0; off <= rs.hint_cells; ++off) {
            for (int sign : {1, -1}) {
                if (off == 0 && sign < 0) continue;
                const double k = k0 + sign * off;
                const double lo = k * c;
                if (lo < rs.a_min || lo + c > rs.a_max) continue;
                if (changes(e2(lo), e2(lo + c))) return {lo, lo + c};
            }
        }
    }

    double prev_a = rs.a_min;
    double prev = e2(prev_a);
    for (double a = rs.a_min + rs.coarse_step; a <= rs.a_max + 0.5 * rs.coarse_step;
         a += rs.coarse_step) {
        const double cur = e2(a);
        if (changes(prev, cur)) {
            double lo = prev_a;
            double flo = prev;
            for (double b = prev_a + c; b < a - 0.5 * c; b += c) {
                const double fb = e2(b);
                if (changes(flo, fb)) return {lo, b};
                lo = b;
                flo = fb;
            }
            return {lo, a};
        }
        prev_a = a;
        prev = cur;
    }
    throw BracketError("no sign change of E2 for A in [" + std::to_string(rs.a_min) + ", " +
                       std::to_string(rs.a_max) + "]: no transition point");
}

/// A* refined inside a given bracket, classified by the sign of E4(A*).
inline TransitionPoint find_transition(const PotentialSpec& spec, double a_lo, double a_hi,
                                       const QuadratureConfig& q = {})
{
    if (!(a_lo > 0.0) || !(a_hi > a_lo)) throw DomainError("find_transition: invalid bracket");
    const auto e2 = [&](double a) { return e2_closed(spec, a, q); };
    TransitionPoint tp;
    tp.bracket = {a_lo, a_hi};
    tp.a_star = detail::bracketed_root(e2, a_lo, a_hi, 2e-15, "find_transition");
    const auto r = detail::e2_e4(spec, tp.a_star, q);
    tp.e2_residual = r[0];
    tp.e4_at_a_star = r[1];
    tp.order = r[1] > 0.0 ? TransitionOrder::Second : TransitionOrder::First;
    return tp;
}

/// A* with an automatically located bracket.
inline TransitionPoint find_transition(const PotentialSpec& spec, const QuadratureConfig& q = {},
                                       std::optional<double> hint = std::nullopt,
                                       const RootSearch& rs = {})
{
    const auto [lo, hi] = bracket_e2_root(spec, q, hint, rs);
    return find_transition(spec, lo, hi, q);
}

// ---------------------------------------------------------------------------------
// Tricritical points

/// One-parameter family of potentials, p -> spec(p).
struct ParametricFamily {
    std::string parameter;                     ///< "v1" or "kappa1"
    std::function<PotentialSpec(double)> make;
    double lo = 0.0;                           ///< admissible window for the nested search
    double hi = 0.0;
    bool log_spacing = true;
    int scan_points = 24;
};

/// Double Yukawa at fixed kappa1, parametrized by v1 above the kappa2 > 0 border.
inline ParametricFamily double_yukawa_family(double kappa1, double v1_max = 1e4)
{
    const double border = double_yukawa_v1_bound(kappa1);
    return {"v1", [kappa1](double v1) { return derive_double_yukawa(v1, kappa1); },
            border * (1.0 + 1e-9), v1_max, true, 24};
}

/// Yukawa-Coulomb, parametrized by kappa1.
inline ParametricFamily yukawa_coulomb_family(double kappa_lo = 0.5, double kappa_hi = 6.0)
{
    return {"kappa1", [](double k) { return derive_yukawa_coulomb(k); }, kappa_lo, kappa_hi, true,
            24};
}

struct TricriticalPoint {
    double a_t = 0.0;
    double param_t = 0.0;
    std::string parameter;
    double e2_residual = 0.0;
    double e4_residual = 0.0;
    double jacobian_condition = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    std::string method;  ///< "newton" or "nested"
    std::vector<std::string> trace;
};

struct TricriticalOptions {
    int max_newton_iterations = 30;
    double step_tolerance = 1e-13;  ///< relative step size declaring convergence
    double fd_step = 1e-5;          ///< relative finite-difference step of the Jacobian
    RootSearch roots;
};

namespace detail {

inline std::string short_fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// E4 at the E2 root of family member p, with that root.
inline std::pair<double, double> e4_on_critical_curve(const ParametricFamily& fam, double p,
                                                      const QuadratureConfig& q,
                                                      std::optional<double> hint,
                                                      const RootSearch& rs)
{
    const TransitionPoint tp = find_transition(fam.make(p), q, hint, rs);
    return {tp.e4_at_a_star, tp.a_star};
}

struct Jacobian2 {
    double j11, j12, j21, j22;
    [[nodiscard]] double det() const { return j11 * j22 - j12 * j21; }
    /// 2-norm condition number in relative variables (columns scaled by a and p).
    [[nodiscard]] double condition(double a, double p) const
    {
        const double b11 = j11 * a, b12 = j12 * p, b21 = j21 * a, b22 = j22 * p;
        const double fro2 = b11 * b11 + b12 * b12 + b21 * b21 + b22 * b22;
        const double dt = std::abs(b11 * b22 - b12 * b21);
        const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4 * dt * dt));
        return std::sqrt((fro2 + disc) / std::max(fro2 - disc, 1e-300));
    }
};

/// Central-difference Jacobian of (E2, E4) with respect to (A, p).
inline Jacobian2 tricritical_jacobian(const ParametricFamily& fam, double a, double p,
                                      const QuadratureConfig& q, double fd_step)
{
    const auto residual = [&](double aa, double pp) { return e2_e4(fam.make(pp), aa, q); };
    const double ha = fd_step * a;
    const double hp = fd_step * std::abs(p);
    const auto fa1 = residual(a + ha, p);
    const auto fa0 = residual(a - ha, p);
    const auto fp1 = residual(a, p + hp);
    const auto fp0 = residual(a, p - hp);
    return {(fa1[0] - fa0[0]) / (2 * ha), (fp1[0] - fp0[0]) / (2 * hp), (fa1[1] - fa0[1]) / (2 * ha),
            (fp1[1] - fp0[1]) / (2 * hp)};
}

inline TricriticalPoint tricritical_newton(const ParametricFamily& fam, double a0, double p0,
                                           const QuadratureConfig& q, const TricriticalOptions& o)
{
    TricriticalPoint tp;
    tp.parameter = fam.parameter;
    tp.method = "newton";
    double a = a0;
    double p = p0;
    const auto residual = [&](double aa, double pp) { return e2_e4(fam.make(pp), aa, q); };
    auto f = residual(a, p);
    for (int it = 1; it <= o.max_newton_iterations; ++it) {
        const Jacobian2 jac = tricritical_jacobian(fam, a, p, q, o.fd_step);
        const double j11 = jac.j11, j12 = jac.j12, j21 = jac.j21, j22 = jac.j22;
        const double det = jac.det();
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
            tp.trace.push_back("iteration " + std::to_string(it) + ": singular Jacobian");
            throw NonconvergenceError("find_tricritical: singular Jacobian", tp.trace);
        }
        tp.jacobian_condition = jac.condition(a, p);
        const double da = -(j22 * f[0] - j12 * f[1]) / det;
        const double dp = -(-j21 * f[0] + j11 * f[1]) / det;
        const auto decrement = [&](const std::array<double, 2>& g) {
            const double xa = (j22 * g[0] - j12 * g[1]) / det;
            const double xp = (-j21 * g[0] + j11 * g[1]) / det;
            return std::hypot(xa / a, xp / p);
        };
        const double d0 = decrement(f);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 12; ++k, lambda *= 0.5) {
            const double na = a + lambda * da;
            const double np = p + lambda * dp;
            try {
                const auto nf = residual(na, np);
                if (decrement(nf) < d0 || d0 < 1e-15) {
                    a = na;
                    p = np;
                    f = nf;
                    accepted = true;
                    break;
                }
            } catch (const DomainError&) {
                // step left the admissible region; shorten it
            }
        }
        tp.trace.push_back("iteration " + std::to_string(it) + ": A = " + fmt(a) + ", " +
                           fam.parameter + " = " + fmt(p) + ", E2 = " + fmt(f[0]) +
                           ", E4 = " + fmt(f[1]) + ", damping = " + fmt(lambda));
        if (!accepted) throw NonconvergenceError("find_tricritical: damped step rejected", tp.trace);
        tp.iterations = it;
        if (std::abs(lambda * da) <= o.step_tolerance * a &&
            std::abs(lambda * dp) <= o.step_tolerance * std::abs(p)) {
            tp.a_t = a;
            tp.param_t = p;
            tp.e2_residual = f[0];
            tp.e4_residual = f[1];
            return tp;
        }
    }
    throw NonconvergenceError("find_tricritical: Newton iteration limit reached", tp.trace);
}

inline TricriticalPoint tricritical_nested(const ParametricFamily& fam, const QuadratureConfig& q,
                                           const TricriticalOptions& o)
{
    TricriticalPoint tp;
    tp.parameter = fam.parameter;
    tp.method = "nested";
    std::optional<double> hint;
    const auto h = [&](double p) {
        const auto [e4, a] = e4_on_critical_curve(fam, p, q, hint, o.roots);
        hint = a;
        ++tp.iterations;
        tp.trace.push_back(fam.parameter + " = " + fmt(p) + ": A* = " + fmt(a) + ", E4 = " + fmt(e4));
        return e4;
    };
    const int n = fam.scan_points;
    double prev_p = fam.lo;
    double prev = std::numeric_limits<double>::quiet_NaN();
    try {
        prev = h(prev_p);
    } catch (const Error& e) {
        tp.trace.push_back(std::string("lower end: ") + e.what());
    }
    for (int i = 1; i < n; ++i) {
        const double u = static_cast<double>(i) / (n - 1);
        const double p = fam.log_spacing ? fam.lo * std::pow(fam.hi / fam.lo, u)
                                         : fam.lo + (fam.hi - fam.lo) * u;
        double cur = std::numeric_limits<double>::quiet_NaN();
        try {
            cur = h(p);
        } catch (const Error& e) {
            tp.trace.push_back(fam.parameter + " = " + fmt(p) + ": " + e.what());
        }
        if (std::isfinite(prev) && std::isfinite(cur) && (prev > 0.0) != (cur > 0.0)) {
            const double pt = bracketed_root(h, prev_p, p, prev, cur, 1e-14, "find_tricritical");
            const TransitionPoint fin = find_transition(fam.make(pt), q, hint, o.roots);
            tp.param_t = pt;
            tp.a_t = fin.a_star;
            tp.e2_residual = fin.e2_residual;
            tp.e4_residual = fin.e4_at_a_star;
            tp.jacobian_condition = tricritical_jacobian(fam, tp.a_t, pt, q, o.fd_step).condition(tp.a_t, pt);
            return tp;
        }
        prev_p = p;
        prev = cur;
    }
    throw NonconvergenceError("find_tricritical: E4 keeps its sign along the critical curve for " +
                                  fam.parameter + " in [" + fmt(fam.lo) + ", " + fmt(fam.hi) +
                                  "]; no tricritical point in this range",
                              tp.trace);
}

} // namespace detail

/// Joint root of (E2, E4) in (A, p). Damped Newton from `guess` when given; otherwise,
/// or when Newton fails, nested 1D solves: E4 at the E2 root as a function of p.
inline TricriticalPoint find_tricritical(const ParametricFamily& fam, const QuadratureConfig& q = {},
                                         std::optional<std::pair<double, double>> guess = std::nullopt,
                                         const TricriticalOptions& o = {})
{
    std::vector<std::string> trace;
    if (guess) {
        try {
            return detail::tricritical_newton(fam, guess->first, guess->second, q, o);
        } catch (const Error& e) {
            trace.push_back(std::string("newton abandoned: ") + e.what());
            if (const auto* ne = dynamic_cast<const NonconvergenceError*>(&e)) {
                trace.insert(trace.end(), ne->trace().begin(), ne->trace().end());
            }
        }
    }
    try {
        TricriticalPoint tp = detail::tricritical_nested(fam, q, o);
        trace.insert(trace.end(), tp.trace.begin(), tp.trace.end());
        tp.trace = std::move(trace);
        return tp;
    } catch (const NonconvergenceError& e) {
        trace.insert(trace.end(), e.trace().begin(), e.trace().end());
        throw NonconvergenceError(e.what(), trace);
    }
}

// ---------------------------------------------------------------------------------
// First-order transitions

struct FirstOrderTransition {
    double a_trans = 0.0;
    double eps_jump = 0.0;         ///< minimizing eps of the rectangular branch at a_trans
    double a_star = 0.0;           ///< E2 root (limit of metastability of the square)
    double e4_at_a_star = 0.0;
    double e6_at_a_star = 0.0;
    double landau_estimate = 0.0;  ///< A* - E4^2/(4 b E6), b = -dE2/dA; NaN unless E6 > 0
    double eps_floor = 0.0;
    double barrier_eps = 0.0;
    double square_energy = 0.0;    ///< E(a_trans, 1)
    double branch_energy = 0.0;    ///< E(a_trans, e^eps_jump)
};

namespace detail {

/// Peak of the barrier between eps = 0 and the rectangular branch, on a coarse grid.
inline std::optional<double> barrier_peak(const PotentialSpec& spec, double area,
                                          const QuadratureConfig& q, double eps_cap)
{
    AspectSearch s;
    s.eps_cap = eps_cap;
    s.eps_grid_min = 1e-6;
    s.points_per_decade = 16;
    const std::vector<double> x = eps_grid(s);
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = energy_difference(spec, area, x[i], q);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (d[i] > 0.0 && d[i] >= d[i - 1] && d[i] > d[i + 1]) {
            // a barrier needs a lower point beyond it
            for (std::size_t k = i + 1; k < x.size(); ++k) {
                if (d[k] < d[i] && k + 1 < x.size() && d[k] <= d[k + 1]) return x[i];
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Density where the square minimum and the rectangular branch minimum are degenerate.
/// Requires E4 < 0 at the E2 root; the crossing lies on the dense side of A*.
/// The rectangular branch is searched for eps <= eps_cap.
inline FirstOrderTransition find_first_order(const PotentialSpec& spec, const QuadratureConfig& q = {},
                                             std::optional<double> hint = std::nullopt,
                                             const RootSearch& rs = {}, double eps_cap = kDefaultEpsCap)
{
    if (!(eps_cap > 0.0) || !std::isfinite(eps_cap)) {
        throw DomainError("find_first_order: eps_cap must be positive, got " + detail::fmt(eps_cap));
    }
    FirstOrderTransition r;
    const TransitionPoint tp = find_transition(spec, q, hint, rs);
    r.a_star = tp.a_star;
    r.e4_at_a_star = tp.e4_at_a_star;
    if (tp.order != TransitionOrder::First) {
        throw ClassificationError("find_first_order: E4(A*) = " + detail::fmt(tp.e4_at_a_star) +
                                  " > 0, the transition is of second order");
    }
    const ExpansionCoefficients ex = expansion_series(spec, r.a_star, q);
    r.e6_at_a_star = ex.e6.value();
    const double b = -e2_area_derivative(spec, r.a_star, q);
    if (!(b > 0.0)) {
        throw ClassificationError("find_first_order: E2 does not decrease through A* (dE2/dA = " +
                                  detail::fmt(-b) + ")");
    }
    // Landau sextic estimate of A* - A_trans; without a positive E6 the branch is set by
    // higher orders and a fixed trial offset replaces it.
    double gap = 1e-3 * r.a_star;
    if (r.e6_at_a_star > 0.0) {
        gap = r.e4_at_a_star * r.e4_at_a_star / (4.0 * b * r.e6_at_a_star);
        r.landau_estimate = r.a_star - gap;
    } else {
        r.landau_estimate = std::numeric_limits<double>::quiet_NaN();
    }

    // Probe near the estimate first, then sweep offsets geometrically: a small E6 inflates
    // the estimate far beyond the true gap.
    std::vector<double> offsets;
    for (double f : {1.0, 0.5, 1.25, 0.25}) offsets.push_back(f * gap);
    for (double d = 1e-4 * r.a_star; d < 0.5 * r.a_star; d *= 2.0) offsets.push_back(d);
    std::optional<double> peak;
    for (double d : offsets) {
        if (d >= 0.5 * r.a_star) continue;
        peak = detail::barrier_peak(spec, r.a_star - d, q, eps_cap);
        if (peak) {
            gap = d;
            break;
        }
    }
    if (!peak) {
        throw ClassificationError("find_first_order: no energy barrier found below A* = " +
                                  detail::fmt(r.a_star) + " for Delta <= " + detail::short_fmt(std::exp(eps_cap)));
    }
    r.barrier_eps = *peak;
    r.eps_floor = 0.5 * *peak;

    AspectSearch branch;
    branch.eps_floor = r.eps_floor;
    branch.eps_cap = eps_cap;
    // g > 0 once the rectangular branch is below the square
    const auto g = [&](double a) { return -minimize_aspect(spec, a, q, branch).energy_gain; };
    const double a_hi = r.a_star;
    const double g_hi = g(a_hi);
    double step = 2.0 * gap;
    double a_lo = r.a_star - step;
    double g_lo = g(a_lo);
    while (g_lo >= 0.0) {
        step *= 2.0;
        if (step >= 0.5 * r.a_star) {
            throw SearchFailure("find_first_order: rectangular branch stays below the square down to A = " +
                                detail::fmt(a_lo));
        }
        a_lo = r.a_star - step;
        g_lo = g(a_lo);
    }
    r.a_trans = detail::bracketed_root(g, a_lo, a_hi, g_lo, g_hi, 1e-15, "find_first_order");
    const AspectMinimum m = minimize_aspect(spec, r.a_trans, q, branch);
    r.eps_jump = m.eps;
    r.square_energy = e0(spec, r.a_trans, q);
    r.branch_energy = r.square_energy + m.energy_gain;
    return r;
}

// ---------------------------------------------------------------------------------
// Critical exponents

struct FitResult {
    double beta = 0.0;
    double amplitude = 0.0;  ///< Delta - 1 ~ amplitude * delta^beta
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::vector<double> deltas;
    std::vector<double> eps;
    std::vector<double> residuals;  ///< of log(Delta - 1)
    bool accepted = false;          ///< r_squared above the acceptance threshold
};

inline constexpr double kFitAcceptance = 0.999;
inline constexpr std::size_t kMinFitSamples = 8;

enum class CriticalKind { Second, Tricritical };

/// Default offsets: n geometric points across three decades, [1e-9, 1e-6] a_ref next to a
/// second-order point and [1e-11, 1e-8] a_ref next to a tricritical one, where the
/// leading power law dominates its first correction.
inline std::vector<double> default_fit_deltas(double a_ref, CriticalKind kind = CriticalKind::Second,
                                              int n = 12)
{
    const double lo = kind == CriticalKind::Second ? 1e-9 : 1e-11;
    std::vector<double> d;
    for (int i = 0; i < n; ++i) d.push_back(a_ref * lo * std::pow(1e3, static_cast<double>(i) / (n - 1)));
    return d;
}

/// Least-squares slope of log(Delta - 1) against log(A - a_ref) over minimized states
/// at A = a_ref + delta (the rectangular side).
inline FitResult fit_exponent(const PotentialSpec& spec, double a_ref, std::vector<double> deltas,
                              const QuadratureConfig& q = {})
{
    if (deltas.empty()) deltas = default_fit_deltas(a_ref);
    if (deltas.size() < kMinFitSamples) {
        throw DomainError("fit_exponent: need at least " + std::to_string(kMinFitSamples) +
                          " offsets, got " + std::to_string(deltas.size()));
    }
    FitResult fr;
    std::vector<double> lx, ly;
    for (double dl : deltas) {
        if (!(dl > 0.0)) throw DomainError("fit_exponent: offsets must be positive");
        const AspectMinimum m = minimize_aspect(spec, a_ref + dl, q);
        if (!(m.eps > 0.0)) {
            throw SearchFailure("fit_exponent: square lattice still minimal at A = a_ref + " +
                                detail::fmt(dl));
        }
        fr.deltas.push_back(dl);
        fr.eps.push_back(m.eps);
        lx.push_back(std::log(dl));
        ly.push_back(std::log(std::expm1(m.eps)));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    fr.beta = sxy / sxx;
    fr.amplitude = std::exp(my - fr.beta * mx);
    double ssr = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double res = ly[i] - (my + fr.beta * (lx[i] - mx));
        fr.residuals.push_back(res);
        ssr += res * res;
    }
    fr.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
    fr.window = {*std::min_element(deltas.begin(), deltas.end()),
                 *std::max_element(deltas.begin(), deltas.end())};
    fr.accepted = fr.r_squared > kFitAcceptance;
    return fr;
}

/// Predicted eps/sqrt(A - A*) just above a second-order point: sqrt(-E2'/(2 E4)).
inline double second_order_amplitude(const PotentialSpec& spec, double a_star,
                                     const QuadratureConfig& q = {})
{
    return std::sqrt(-e2_area_derivative(spec, a_star, q) / (2.0 * e4_closed(spec, a_star, q)));
}

/// Predicted eps/(A - At)^{1/4} at a tricritical point: (-E2'/(3 E6))^{1/4}.
inline double tricritical_amplitude(const PotentialSpec& spec, double a_t,
                                    const QuadratureConfig& q = {})
{
    const double e6 = expansion_series(spec, a_t, q).e6.value();
    return std::pow(-e2_area_derivative(spec, a_t, q) / (3.0 * e6), 0.25);
}

// ---------------------------------------------------------------------------------
// Large-v1 limit of the double Yukawa critical curve

namespace detail {

/// int_0^inf B2(t) t^{-1/2} e^{-k^2 A/(4t)} [1 - (1+k) A/(2t)] dt, B2 the E2 bracket.
inline double a_star_min_condition(double kappa1, double area, const QuadratureConfig& q)
{
    const double c = kappa1 * kappa1 * area / 4.0;
    const double lin = 0.5 * (1.0 + kappa1) * area;
    // e^{2 sqrt(c)} keeps the integrand, which peaks near e^{-c/t - t}, above underflow
    const double shift = 2.0 * std::sqrt(c);
    const auto w = [c, lin, shift](double t) {
        return std::exp(shift - c / t) * (1.0 - lin / t) / std::sqrt(t);
    };
    const auto d = [](double s) { return std::array<double, 1>{bracket_e2_direct(s)}; };
    return reflected_integral<1>(d, w, relative_only(q)).value[0];
}

} // namespace detail

/// Beyond this the rescaled weight of the limiting condition overflows.
inline constexpr double kAStarMinMaxKappa = 500.0;

/// Transition density of the double Yukawa family in the limit v1 -> inf at fixed kappa1.
inline double a_star_min(double kappa1, const QuadratureConfig& q = {})
{
    if (!(kappa1 > 0.0) || !(kappa1 <= kAStarMinMaxKappa)) {
        throw DomainError("a_star_min: kappa1 must lie in (0, " + detail::fmt(kAStarMinMaxKappa) +
                          "], got " + detail::fmt(kappa1));
    }
    const auto f = [&](double a) { return detail::a_star_min_condition(kappa1, a, q); };
    double lo = 0.25;
    double flo = f(lo);
    for (double hi = lo * 1.25; hi <= 64.0; hi *= 1.25) {
        const double fhi = f(hi);
        if ((flo > 0.0) != (fhi > 0.0)) return detail::bracketed_root(f, lo, hi, flo, fhi, 2e-15, "a_star_min");
        lo = hi;
        flo = fhi;
    }
    throw BracketError("a_star_min: no root for A in [0.25, 64] at kappa1 = " + detail::fmt(kappa1));
}

/// kappa1 -> 0+ limit of a_star_min: 2 int B2 t^{-1/2} dt / int B2 t^{-3/2} dt.
inline double a_star_min_zero_limit(const QuadratureConfig& q = {})
{
    const auto d = [](double s) { return std::array<double, 1>{detail::bracket_e2_direct(s)}; };
    const double num = detail::reflected_integral<1>(
        d, [](double t) { return 1.0 / std::sqrt(t); }, q).value[0];
    const double den = detail::reflected_integral<1>(
        d, [](double t) { return 1.0 / (t * std::sqrt(t)); }, q).value[0];
    return 2.0 * num / den;
}

// ---------------------------------------------------------------------------------
// Ends of the double Yukawa tricritical locus

inline constexpr double kTricriticalDivergenceV1 = 1e4;

/// kappa1 at which the tricritical v1 reaches `v1_threshold` (lower end of the locus).
inline double kappa1_lower(const QuadratureConfig& q = {}, double v1_threshold = kTricriticalDivergenceV1,
                           double k_lo = 1.0, double k_hi = 2.0)
{
    std::optional<double> hint;
    const auto h = [&](double k) {
        const TransitionPoint tp = find_transition(derive_double_yukawa(v1_threshold, k), q, hint);
        hint = tp.a_star;
        return tp.e4_at_a_star;
    };
    return detail::bracketed_root(h, k_lo, k_hi, 1e-12, "kappa1_lower");
}

/// kappa1 at which the tricritical v1 meets the border e^{kappa1}/kappa1 (upper end).
inline double kappa1_upper(const QuadratureConfig& q = {}, double k_lo = 1.8, double k_hi = 2.3)
{
    std::optional<double> hint;
    const auto h = [&](double k) {
        const double v1 = double_yukawa_v1_bound(k) * (1.0 + 1e-9);
        const TransitionPoint tp = find_transition(derive_double_yukawa(v1, k), q, hint);
        hint = tp.a_star;
        return tp.e4_at_a_star;
    };
    return detail::bracketed_root(h, k_lo, k_hi, 1e-12, "kappa1_upper");
}

} // namespace rectlat
