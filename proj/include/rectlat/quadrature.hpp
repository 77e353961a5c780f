#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature for vector-valued integrands,
// on finite intervals and on [a, inf) for integrands with exponential decay.
// Node placement and refinement order are deterministic, so repeated runs are
// bit-identical.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rectlat/errors.hpp"

namespace rectlat {

struct QuadratureConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double split_point = std::numbers::pi;  ///< where the energy integral switches to 1/t
    int max_refinements = 4000;

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol >= 0.0)) {
            throw DomainError("QuadratureConfig: tolerances must be positive");
        }
        if (!(split_point > 0.0) || !std::isfinite(split_point)) {
            throw DomainError("QuadratureConfig: split_point must be positive");
        }
        if (max_refinements < 1) {
            throw DomainError("QuadratureConfig: max_refinements must be at least 1");
        }
    }
};

template <std::size_t N>
struct QuadratureResult {
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> l1{};  ///< integral of |f|, per component
    int evaluations = 0;
    int intervals = 0;
};

namespace detail {

// Abscissae and weights of the 21-point Kronrod rule and embedded 10-point Gauss rule
// (QUADPACK dqk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment {
    double a = 0.0;
    double b = 0.0;
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> l1{};
};

template <class T>
struct as_array;
template <>
struct as_array<double> {
    static constexpr std::size_t size = 1;
    static std::array<double, 1> get(double v) { return {v}; }
};
template <std::size_t N>
struct as_array<std::array<double, N>> {
    static constexpr std::size_t size = N;
    static const std::array<double, N>& get(const std::array<double, N>& v) { return v; }
};

template <std::size_t N, class F>
Segment<N> gauss_kronrod21(const F& f, double a, double b)
{
    using Conv = as_array<std::decay_t<decltype(f(a))>>;
    static_assert(Conv::size == N);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    std::array<std::array<double, N>, 21> fv{};
    fv[0] = Conv::get(f(centr));
    for (int j = 0; j < 10; ++j) {
        const double absc = hlgth * kXgk[j];
        fv[1 + 2 * j] = Conv::get(f(centr - absc));
        fv[2 + 2 * j] = Conv::get(f(centr + absc));
    }

    for (const auto& v : fv) {
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw QuadratureError("quadrature: non-finite integrand on [" + std::to_string(a) +
                                          ", " + std::to_string(b) + "]",
                                      std::numeric_limits<double>::infinity());
            }
        }
    }

    Segment<N> seg;
    seg.a = a;
    seg.b = b;
    for (std::size_t c = 0; c < N; ++c) {
        const double fc = fv[0][c];
        double resg = 0.0;
        double resk = kWgk[10] * fc;
        double resabs = std::abs(resk);
        for (int j = 0; j < 10; ++j) {
            const double f1 = fv[1 + 2 * j][c];
            const double f2 = fv[2 + 2 * j][c];
            resk += kWgk[j] * (f1 + f2);
            resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
            if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
        }
        const double reskh = 0.5 * resk;
        double resasc = kWgk[10] * std::abs(fc - reskh);
        for (int j = 0; j < 10; ++j) {
            resasc += kWgk[j] *
                      (std::abs(fv[1 + 2 * j][c] - reskh) + std::abs(fv[2 + 2 * j][c] - reskh));
        }
        const double result = resk * hlgth;
        resabs *= dhlgth;
        resasc *= dhlgth;
        double err = std::abs((resk - resg) * hlgth);
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        if (resabs > uflow / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
        seg.value[c] = result;
        seg.error[c] = err;
        seg.l1[c] = resabs;
    }
    return seg;
}

inline std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

template <std::size_t N>
QuadratureResult<N> refine(std::vector<Segment<N>> segs, const QuadratureConfig& cfg,
                           const auto& f, int evaluations)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int refinements = 0;
    for (;;) {
        QuadratureResult<N> r;
        for (const auto& s : segs) {
            for (std::size_t c = 0; c < N; ++c) {
                r.value[c] += s.value[c];
                r.error[c] += s.error[c];
                r.l1[c] += s.l1[c];
            }
        }
        std::array<double, N> target{};
        bool done = true;
        for (std::size_t c = 0; c < N; ++c) {
            target[c] = std::max({cfg.abs_tol, cfg.rel_tol * std::abs(r.value[c]),
                                  100.0 * eps * r.l1[c],
                                  std::numeric_limits<double>::min()});
            if (!(r.error[c] <= target[c])) done = false;
        }
        r.evaluations = evaluations;
        r.intervals = static_cast<int>(segs.size());
        if (done) return r;

        if (refinements >= cfg.max_refinements) {
            double worst = 0.0;
            for (std::size_t c = 0; c < N; ++c) worst = std::max(worst, r.error[c]);
            throw QuadratureError("quadrature: no convergence after " +
                                      std::to_string(refinements) +
                                      " refinements, error estimate " + detail::sci(worst),
                                  worst);
        }
        // Bisect the segment contributing most to the normalized error.
        std::size_t worst_idx = 0;
        double worst_score = -1.0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            double score = 0.0;
            for (std::size_t c = 0; c < N; ++c) score += segs[i].error[c] / target[c];
            if (score > worst_score) {
                worst_score = score;
                worst_idx = i;
            }
        }
        const Segment<N> old = segs[worst_idx];
        const double mid = 0.5 * (old.a + old.b);
        if (!(mid > old.a && mid < old.b)) {
            double worst = 0.0;
            for (std::size_t c = 0; c < N; ++c) worst = std::max(worst, r.error[c]);
            throw QuadratureError("quadrature: interval cannot be subdivided further", worst);
        }
        segs[worst_idx] = gauss_kronrod21<N>(f, old.a, mid);
        segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(worst_idx) + 1,
                    gauss_kronrod21<N>(f, mid, old.b));
        evaluations += 42;
        ++refinements;
    }
}

} // namespace detail

/// Integral of a vector-valued `f` over [a, b].
template <std::size_t N, class F>
QuadratureResult<N> integrate_vector(const F& f, double a, double b, const QuadratureConfig& cfg)
{
    cfg.validate();
    std::vector<detail::Segment<N>> segs{detail::gauss_kronrod21<N>(f, a, b)};
    return detail::refine<N>(std::move(segs), cfg, f, 21);
}

/// Integral of a vector-valued `f` over [a, inf).
/// Panels of geometrically growing width are laid down until a panel falls below
/// 1e-18 of the accumulated |f| integral while decaying; the integrand must decay
/// at least exponentially beyond its peak.
template <std::size_t N, class F>
QuadratureResult<N> integrate_vector_to_infinity(const F& f, double a,
                                                 const QuadratureConfig& cfg)
{
    cfg.validate();
    constexpr double kTailFraction = 1e-18;
    constexpr double kMaxSpan = 1e5;
    std::vector<detail::Segment<N>> segs;
    std::array<double, N> acc{};
    std::array<double, N> prev{};
    prev.fill(std::numeric_limits<double>::infinity());
    double lo = a;
    double width = 1.0;
    int evaluations = 0;
    for (;;) {
        const double hi = lo + width;
        auto seg = detail::gauss_kronrod21<N>(f, lo, hi);
        evaluations += 21;
        // components without mass so far (identically zero, or not yet risen above
        // underflow) do not decide the tail
        bool tail = segs.size() >= 3;
        bool any_mass = false;
        for (std::size_t c = 0; c < N; ++c) {
            acc[c] += seg.l1[c];
            if (acc[c] > 0.0) {
                any_mass = true;
                if (!(seg.l1[c] <= kTailFraction * acc[c] && seg.l1[c] <= prev[c])) tail = false;
            }
            prev[c] = seg.l1[c];
        }
        segs.push_back(seg);
        if (tail && any_mass) break;
        if (hi - a > kMaxSpan) {
            if (!any_mass) break;  // the integrand vanishes to double precision
            throw QuadratureError("quadrature: integrand does not decay on [a, inf)", acc[0]);
        }
        lo = hi;
        width *= 1.5;
    }
    return detail::refine<N>(std::move(segs), cfg, f, evaluations);
}

template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg)
{
    return integrate_vector<1>(f, a, b, cfg).value[0];
}

template <class F>
double integrate_to_infinity(const F& f, double a, const QuadratureConfig& cfg)
{
    return integrate_vector_to_infinity<1>(f, a, cfg).value[0];
}

} // namespace rectlat
