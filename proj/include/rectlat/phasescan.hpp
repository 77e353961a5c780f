#pragma once

// Parameter sweeps producing phase-diagram rows.
//
// Every row is computed from canonical brackets (E2 roots are refined inside fixed
// A-cells), so a neighbour's solution only shortens the bracket search and the rows
// come out identical for any number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rectlat/critical.hpp"
#include "rectlat/errors.hpp"
#include "rectlat/potential.hpp"
#include "rectlat/quadrature.hpp"

namespace rectlat {

enum class Spacing { Linear, Logarithmic };

/// lo:hi:{lin|log}:N
struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    Spacing spacing = Spacing::Linear;
    int n = 64;

    void validate() const
    {
        if (!std::isfinite(lo) || !std::isfinite(hi) || n < 1 || (n > 1 && !(hi > lo))) {
            throw DomainError("grid: need finite lo < hi and N >= 1");
        }
        if (spacing == Spacing::Logarithmic && !(lo > 0.0)) {
            throw DomainError("grid: logarithmic spacing needs lo > 0");
        }
    }

    [[nodiscard]] std::vector<double> values() const
    {
        validate();
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            if (i + 1 == n && n > 1) {
                v.push_back(hi);
            } else if (spacing == Spacing::Linear) {
                v.push_back(lo + (hi - lo) * u);
            } else {
                v.push_back(lo * std::pow(hi / lo, u));
            }
        }
        return v;
    }
};

inline Grid parse_grid(std::string_view text)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) {
        throw DomainError("grid '" + std::string(text) + "' must have the form lo:hi:{lin|log}:N");
    }
    Grid g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("lo");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("hi");
        g.n = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("N");
    } catch (const std::logic_error&) {
        throw DomainError("grid '" + std::string(text) + "': malformed number");
    }
    if (parts[2] == "lin") {
        g.spacing = Spacing::Linear;
    } else if (parts[2] == "log") {
        g.spacing = Spacing::Logarithmic;
    } else {
        throw DomainError("grid '" + std::string(text) + "': spacing must be lin or log");
    }
    g.validate();
    return g;
}

enum class RowOrder { None, Second, First, Tricritical };

inline std::string_view to_string(RowOrder o)
{
    switch (o) {
    case RowOrder::Second: return "second";
    case RowOrder::First: return "first";
    case RowOrder::Tricritical: return "tricritical";
    case RowOrder::None: break;
    }
    return "";
}

inline RowOrder row_order(TransitionOrder o)
{
    return o == TransitionOrder::Second ? RowOrder::Second : RowOrder::First;
}

/// One scan sample. Unavailable numbers are NaN.
struct PhaseDiagramRow {
    static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

    Family family = Family::DoubleYukawa;
    double kappa1 = kNone;
    double v1 = kNone;
    double a_star = kNone;     ///< A*, A_trans, A^t or A*_min depending on the row
    RowOrder order = RowOrder::None;
    double eps_jump = kNone;
    double e2_residual = kNone;
    double e4_value = kNone;
    /// ok | prolongation | out-of-domain | failed: <reason> | kappa1-lower | kappa1-upper | limit
    std::string status = "ok";
};

struct ScanOptions {
    QuadratureConfig quadrature;
    int workers = 1;
    RootSearch roots;
    /// Add a midpoint sample to every grid interval across which the order changes.
    bool refine_order_changes = true;
    /// Upper end of the rectangular-branch search at first-order points.
    double eps_cap = kDefaultEpsCap;
};

namespace detail {

/// Runs fn(i, hint) for i in [0, n) over contiguous chunks, one chunk per worker.
/// `hint` carries the previous result of the same chunk.
template <class Row>
std::vector<Row> chunked_map(std::size_t n, int workers,
                             const std::function<Row(std::size_t, const Row*)>& fn)
{
    std::vector<Row> out(n);
    const std::size_t w = std::max<std::size_t>(
        1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers))));
    std::vector<std::exception_ptr> errors(w);
    const auto run = [&](std::size_t k) {
        const std::size_t begin = n * k / w;
        const std::size_t end = n * (k + 1) / w;
        try {
            const Row* prev = nullptr;
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = fn(i, prev);
                prev = &out[i];
            }
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (w == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(w);
        for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run, k);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

inline std::string failure(const std::exception& e) { return std::string("failed: ") + e.what(); }

inline std::optional<double> hint_of(const std::vector<PhaseDiagramRow>* prev)
{
    if (prev == nullptr) return std::nullopt;
    for (const auto& r : *prev) {
        if (std::isfinite(r.a_star)) return r.a_star;
    }
    return std::nullopt;
}

/// Rows for one family member: the E2 root, and when E4 < 0 the first-order crossing
/// followed by the E2 root as a prolongation row.
inline std::vector<PhaseDiagramRow> transition_rows(const PotentialSpec& spec, PhaseDiagramRow base,
                                                    std::optional<double> hint,
                                                    const ScanOptions& o)
{
    const QuadratureConfig& q = o.quadrature;
    TransitionPoint tp;
    try {
        tp = find_transition(spec, q, hint, o.roots);
    } catch (const Error& e) {
        base.status = failure(e);
        return {base};
    }
    PhaseDiagramRow crit = base;
    crit.a_star = tp.a_star;
    crit.order = row_order(tp.order);
    crit.e2_residual = tp.e2_residual;
    crit.e4_value = tp.e4_at_a_star;
    if (tp.order == TransitionOrder::Second) {
        crit.eps_jump = 0.0;
        return {crit};
    }
    crit.status = "prolongation";
    PhaseDiagramRow first = base;
    first.order = RowOrder::First;
    first.e4_value = tp.e4_at_a_star;
    try {
        const FirstOrderTransition fo = find_first_order(spec, q, tp.a_star, o.roots, o.eps_cap);
        first.a_star = fo.a_trans;
        first.eps_jump = fo.eps_jump;
        first.e2_residual = e2_closed(spec, fo.a_trans, q);
    } catch (const Error& e) {
        first.status = failure(e);
    }
    return {first, crit};
}

using RowGroup = std::vector<PhaseDiagramRow>;

/// Order of the first row of a group, None when the solve failed.
inline RowOrder group_order(const RowGroup& g)
{
    if (g.empty() || g.front().status.starts_with("failed") || g.front().status == "out-of-domain") {
        return RowOrder::None;
    }
    return g.front().order;
}

/// Inserts eval(midpoint) between neighbouring groups of different order. Runs after the
/// parallel pass, so the result does not depend on the worker count.
inline void refine_order_changes(std::vector<double>& grid, std::vector<RowGroup>& groups,
                                 const std::function<RowGroup(double, const RowGroup*)>& eval)
{
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        const RowOrder a = group_order(groups[i]);
        const RowOrder b = group_order(groups[i + 1]);
        if (a == RowOrder::None || b == RowOrder::None || a == b) continue;
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(i) + 1, eval(mid, &groups[i]));
        grid.insert(grid.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
        ++i;
    }
}

inline std::vector<PhaseDiagramRow> flatten(const std::vector<std::vector<PhaseDiagramRow>>& parts)
{
    std::vector<PhaseDiagramRow> rows;
    for (const auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
    return rows;
}

} // namespace detail

/// Double Yukawa critical curve at fixed kappa1 over a v1 grid.
inline std::vector<PhaseDiagramRow> scan_critical_curve(double kappa1, const std::vector<double>& v1_grid,
                                                        const ScanOptions& o = {})
{
    if (!std::is_sorted(v1_grid.begin(), v1_grid.end())) {
        throw DomainError("scan_critical_curve: v1 grid must be increasing");
    }
    using Rows = std::vector<PhaseDiagramRow>;
    const auto eval = [&](double v1, const Rows* prev) {
        PhaseDiagramRow base;
        base.family = Family::DoubleYukawa;
        base.kappa1 = kappa1;
        base.v1 = v1;
        try {
            const PotentialSpec spec = derive_double_yukawa(v1, kappa1);
            return detail::transition_rows(spec, base, detail::hint_of(prev), o);
        } catch (const DomainError&) {
            base.status = "out-of-domain";
            return Rows{base};
        }
    };
    auto parts = detail::chunked_map<Rows>(v1_grid.size(), o.workers,
                                           [&](std::size_t i, const Rows* prev) { return eval(v1_grid[i], prev); });
    if (o.refine_order_changes) {
        std::vector<double> grid = v1_grid;
        detail::refine_order_changes(grid, parts, eval);
    }
    return detail::flatten(parts);
}

struct TricriticalLocus {
    std::vector<PhaseDiagramRow> rows;  ///< one per kappa1, order = tricritical when found
    double kappa1_lower = PhaseDiagramRow::kNone;
    double kappa1_upper = PhaseDiagramRow::kNone;
    std::string boundary_status = "ok";
};

/// Double Yukawa tricritical points over a kappa1 grid, with both ends of the locus.
inline TricriticalLocus scan_tricritical_locus(const std::vector<double>& kappa1_grid,
                                               const ScanOptions& o = {})
{
    if (!std::is_sorted(kappa1_grid.begin(), kappa1_grid.end())) {
        throw DomainError("scan_tricritical_locus: kappa1 grid must be increasing");
    }
    TricriticalLocus locus;
    locus.rows = detail::chunked_map<PhaseDiagramRow>(
        kappa1_grid.size(), o.workers, [&](std::size_t i, const PhaseDiagramRow*) {
            PhaseDiagramRow r;
            r.family = Family::DoubleYukawa;
            r.kappa1 = kappa1_grid[i];
            try {
                TricriticalOptions to;
                to.roots = o.roots;
                const TricriticalPoint tp =
                    find_tricritical(double_yukawa_family(kappa1_grid[i]), o.quadrature, std::nullopt, to);
                r.v1 = tp.param_t;
                r.a_star = tp.a_t;
                r.order = RowOrder::Tricritical;
                r.eps_jump = 0.0;
                r.e2_residual = tp.e2_residual;
                r.e4_value = tp.e4_residual;
            } catch (const NonconvergenceError&) {
                r.status = "out-of-domain";
            } catch (const Error& e) {
                r.status = detail::failure(e);
            }
            return r;
        });
    try {
        locus.kappa1_lower = kappa1_lower(o.quadrature);
        locus.kappa1_upper = kappa1_upper(o.quadrature);
    } catch (const Error& e) {
        locus.boundary_status = detail::failure(e);
    }
    return locus;
}

/// Rows of a tricritical locus followed by its two boundary rows.
inline std::vector<PhaseDiagramRow> locus_rows(const TricriticalLocus& locus)
{
    std::vector<PhaseDiagramRow> rows = locus.rows;
    PhaseDiagramRow lo;
    lo.kappa1 = locus.kappa1_lower;
    lo.v1 = kTricriticalDivergenceV1;
    lo.status = locus.boundary_status == "ok" ? "kappa1-lower" : locus.boundary_status;
    PhaseDiagramRow hi;
    hi.kappa1 = locus.kappa1_upper;
    if (std::isfinite(hi.kappa1)) hi.v1 = double_yukawa_v1_bound(hi.kappa1);
    hi.status = locus.boundary_status == "ok" ? "kappa1-upper" : locus.boundary_status;
    rows.push_back(lo);
    rows.push_back(hi);
    return rows;
}

/// A*_min over a kappa1 grid.
inline std::vector<PhaseDiagramRow> scan_a_star_min(const std::vector<double>& kappa1_grid,
                                                    const ScanOptions& o = {})
{
    return detail::chunked_map<PhaseDiagramRow>(
        kappa1_grid.size(), o.workers, [&](std::size_t i, const PhaseDiagramRow*) {
            PhaseDiagramRow r;
            r.family = Family::DoubleYukawa;
            r.kappa1 = kappa1_grid[i];
            r.v1 = std::numeric_limits<double>::infinity();
            r.order = RowOrder::Second;
            r.status = "limit";
            try {
                r.a_star = a_star_min(kappa1_grid[i], o.quadrature);
            } catch (const Error& e) {
                r.status = detail::failure(e);
            }
            return r;
        });
}

/// Yukawa-Coulomb phase diagram over a kappa1 grid, with the tricritical point
/// inserted at its place in kappa1.
inline std::vector<PhaseDiagramRow> scan_yukawa_coulomb(const std::vector<double>& kappa1_grid,
                                                        const ScanOptions& o = {})
{
    if (!std::is_sorted(kappa1_grid.begin(), kappa1_grid.end())) {
        throw DomainError("scan_yukawa_coulomb: kappa1 grid must be increasing");
    }
    using Rows = std::vector<PhaseDiagramRow>;
    const auto eval = [&](double kappa1, const Rows* prev) {
        PhaseDiagramRow base;
        base.family = Family::YukawaCoulomb;
        base.kappa1 = kappa1;
        try {
            const PotentialSpec spec = derive_yukawa_coulomb(kappa1);
            base.v1 = spec.v1();
            return detail::transition_rows(spec, base, detail::hint_of(prev), o);
        } catch (const DomainError&) {
            base.status = "out-of-domain";
            return Rows{base};
        }
    };
    auto parts = detail::chunked_map<Rows>(kappa1_grid.size(), o.workers,
                                           [&](std::size_t i, const Rows* prev) { return eval(kappa1_grid[i], prev); });
    if (o.refine_order_changes) {
        std::vector<double> grid = kappa1_grid;
        detail::refine_order_changes(grid, parts, eval);
    }
    std::vector<PhaseDiagramRow> rows = detail::flatten(parts);

    PhaseDiagramRow tri;
    tri.family = Family::YukawaCoulomb;
    tri.order = RowOrder::Tricritical;
    try {
        TricriticalOptions to;
        to.roots = o.roots;
        const TricriticalPoint tp = find_tricritical(yukawa_coulomb_family(), o.quadrature, std::nullopt, to);
        tri.kappa1 = tp.param_t;
        tri.v1 = derive_yukawa_coulomb(tp.param_t).v1();
        tri.a_star = tp.a_t;
        tri.eps_jump = 0.0;
        tri.e2_residual = tp.e2_residual;
        tri.e4_value = tp.e4_residual;
    } catch (const Error& e) {
        tri.status = detail::failure(e);
        return rows;
    }
    const auto pos = std::find_if(rows.begin(), rows.end(),
                                  [&](const PhaseDiagramRow& r) { return r.kappa1 > tri.kappa1; });
    rows.insert(pos, tri);
    return rows;
}

} // namespace rectlat
