// rectlat: command-line front end of the rectangular-lattice library.
//
// Exit codes: 0 success, 2 parameter-domain or usage error, 3 numerical failure,
// 4 nonconvergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rectlat/io.hpp"
#include "rectlat/rectlat.hpp"

namespace {

using rectlat::Family;
using rectlat::PotentialSpec;

constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonconvergence = 4;

struct Options {
    std::string family;
    std::optional<double> v1, kappa1, kappa, v, s;
    std::optional<double> area, delta;
    std::string method = "closed";
    std::string format = "csv";
    std::string output;
    int workers = 1;
    bool no_refine = false;
    double max_delta = 4.0;
    std::optional<double> rel_tol, abs_tol;
    std::string mode = "critical-curve";
    std::string kappa1_grid, v1_grid, delta_grid;
    std::optional<double> a_lo, a_hi, a_ref;
    std::optional<double> guess_area, guess_param;
    std::string kind = "second";
};

using Value = std::variant<double, std::string, long long, bool>;
using Record = std::vector<std::pair<std::string, Value>>;

std::string csv_value(const Value& v)
{
    if (const auto* d = std::get_if<double>(&v)) return rectlat::csv_number(*d);
    if (const auto* s = std::get_if<std::string>(&v)) return rectlat::csv_field(*s);
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    return std::get<bool>(v) ? "true" : "false";
}

nlohmann::json json_value(const Value& v)
{
    if (const auto* d = std::get_if<double>(&v)) return rectlat::json_number(*d);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<long long>(&v)) return *i;
    return std::get<bool>(v);
}

nlohmann::json config_json(const std::string& command, const Options& o)
{
    nlohmann::json c{{"command", command}};
    const auto put = [&](const char* k, const std::optional<double>& x) {
        if (x) c[k] = *x;
    };
    if (!o.family.empty()) c["family"] = o.family;
    put("v1", o.v1);
    put("kappa1", o.kappa1);
    put("kappa", o.kappa);
    put("v", o.v);
    put("s", o.s);
    put("area", o.area);
    put("delta", o.delta);
    put("rel_tol", o.rel_tol);
    put("abs_tol", o.abs_tol);
    put("a_lo", o.a_lo);
    put("a_hi", o.a_hi);
    put("a_ref", o.a_ref);
    if (command == "first-order" || command == "scan") c["max_delta"] = o.max_delta;
    if (command == "expand") c["method"] = o.method;
    if (command == "fit") c["kind"] = o.kind;
    if (command == "scan") {
        c["mode"] = o.mode;
        c["workers"] = o.workers;
        c["refine"] = !o.no_refine;
        if (!o.kappa1_grid.empty()) c["kappa1_grid"] = o.kappa1_grid;
        if (!o.v1_grid.empty()) c["v1_grid"] = o.v1_grid;
    }
    if (!o.delta_grid.empty()) c["delta_grid"] = o.delta_grid;
    return c;
}

void emit(const std::string& text, const Options& o)
{
    if (o.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw rectlat::DomainError("cannot open output file '" + o.output + "'");
    f << text;
}

void emit_records(const std::vector<Record>& recs, const std::string& command, const Options& o)
{
    if (o.format == "json") {
        nlohmann::json doc;
        doc["meta"] = {{"version", rectlat::kFormatVersion}, {"config", config_json(command, o)}};
        doc["rows"] = nlohmann::json::array();
        for (const auto& r : recs) {
            nlohmann::json row = nlohmann::json::object();
            for (const auto& [k, v] : r) row[k] = json_value(v);
            doc["rows"].push_back(row);
        }
        emit(doc.dump(2) + "\n", o);
        return;
    }
    std::string out;
    if (!recs.empty()) {
        for (std::size_t i = 0; i < recs.front().size(); ++i) {
            out += (i ? "," : "") + recs.front()[i].first;
        }
        out += '\n';
    }
    for (const auto& r : recs) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_value(r[i].second);
        out += '\n';
    }
    emit(out, o);
}

double need(const std::optional<double>& x, const char* flag)
{
    if (!x) throw rectlat::DomainError(std::string("missing required flag ") + flag);
    return *x;
}

PotentialSpec make_potential(const Options& o)
{
    if (o.family.empty()) throw rectlat::DomainError("missing required flag --family");
    switch (rectlat::family_from_string(o.family)) {
    case Family::Riesz: return rectlat::riesz(need(o.s, "--s"));
    case Family::Yukawa: return rectlat::yukawa(need(o.kappa, "--kappa"), o.v.value_or(1.0));
    case Family::DoubleYukawa:
        return rectlat::derive_double_yukawa(need(o.v1, "--v1"), need(o.kappa1, "--kappa1"));
    case Family::YukawaCoulomb: return rectlat::derive_yukawa_coulomb(need(o.kappa1, "--kappa1"));
    }
    throw rectlat::DomainError("unknown family");
}

rectlat::QuadratureConfig quadrature(const Options& o)
{
    rectlat::QuadratureConfig q;
    if (o.rel_tol) q.rel_tol = *o.rel_tol;
    if (o.abs_tol) q.abs_tol = *o.abs_tol;
    q.validate();
    return q;
}

Record potential_fields(const PotentialSpec& p)
{
    Record r{{"family", std::string(rectlat::to_string(p.family()))}};
    switch (p.family()) {
    case Family::Riesz: r.emplace_back("s", p.s()); break;
    case Family::Yukawa:
        r.emplace_back("kappa", p.kappa());
        r.emplace_back("v", p.v());
        break;
    case Family::DoubleYukawa:
    case Family::YukawaCoulomb:
        r.emplace_back("kappa1", p.kappa1());
        r.emplace_back("v1", p.v1());
        break;
    }
    return r;
}

rectlat::ParametricFamily tricritical_family(const Options& o)
{
    const Family f = rectlat::family_from_string(o.family);
    if (f == Family::DoubleYukawa) return rectlat::double_yukawa_family(need(o.kappa1, "--kappa1"));
    if (f == Family::YukawaCoulomb) return rectlat::yukawa_coulomb_family();
    throw rectlat::DomainError("tricritical points exist for double-yukawa and yukawa-coulomb only");
}

int cmd_energy(const Options& o)
{
    const PotentialSpec p = make_potential(o);
    const double delta = o.delta.value_or(1.0);
    const auto state = rectlat::LatticeState::from_delta(need(o.area, "--area"), delta);
    Record r = potential_fields(p);
    r.emplace_back("A", state.area);
    r.emplace_back("delta", delta);
    r.emplace_back("energy", rectlat::lattice_energy(p, state, quadrature(o)));
    emit_records({r}, "energy", o);
    return 0;
}

int cmd_expand(const Options& o)
{
    const PotentialSpec p = make_potential(o);
    const double a = need(o.area, "--area");
    const auto q = quadrature(o);
    Record r = potential_fields(p);
    r.emplace_back("A", a);
    const auto put = [&](const rectlat::ExpansionCoefficients& c) {
        r.emplace_back("e0", c.e0);
        r.emplace_back("e2", c.e2);
        r.emplace_back("e4", c.e4);
        r.emplace_back("e6", c.e6.value_or(std::nan("")));
    };
    if (o.method == "closed") {
        put(rectlat::expansion_closed(p, a, q));
        r.emplace_back("method", std::string("closed"));
    } else if (o.method == "series") {
        put(rectlat::expansion_series(p, a, q));
        r.emplace_back("method", std::string("series"));
    } else {
        const auto c = rectlat::expansion_closed(p, a, q);
        const auto s = rectlat::expansion_series(p, a, q);
        put(s);
        r.emplace_back("method", std::string("both"));
        // relative above unit magnitude, absolute below
        const auto diff = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); };
        r.emplace_back("discrepancy", std::max({diff(c.e0, s.e0), diff(c.e2, s.e2), diff(c.e4, s.e4)}));
    }
    emit_records({r}, "expand", o);
    return 0;
}

int cmd_transition(const Options& o)
{
    const PotentialSpec p = make_potential(o);
    const auto q = quadrature(o);
    const rectlat::TransitionPoint tp = (o.a_lo && o.a_hi)
                                            ? rectlat::find_transition(p, *o.a_lo, *o.a_hi, q)
                                            : rectlat::find_transition(p, q);
    Record r = potential_fields(p);
    r.emplace_back("a_star", tp.a_star);
    r.emplace_back("order", std::string(rectlat::to_string(tp.order)));
    r.emplace_back("e2_residual", tp.e2_residual);
    r.emplace_back("e4_value", tp.e4_at_a_star);
    r.emplace_back("a_lo", tp.bracket.first);
    r.emplace_back("a_hi", tp.bracket.second);
    emit_records({r}, "transition", o);
    return 0;
}

int cmd_tricritical(const Options& o)
{
    const auto fam = tricritical_family(o);
    std::optional<std::pair<double, double>> guess;
    if (o.guess_area && o.guess_param) guess = std::make_pair(*o.guess_area, *o.guess_param);
    const rectlat::TricriticalPoint tp = rectlat::find_tricritical(fam, quadrature(o), guess);
    Record r{{"family", o.family}};
    if (o.kappa1 && fam.parameter == "v1") r.emplace_back("kappa1", *o.kappa1);
    r.emplace_back("a_t", tp.a_t);
    r.emplace_back("parameter", tp.parameter);
    r.emplace_back("param_t", tp.param_t);
    r.emplace_back("e2_residual", tp.e2_residual);
    r.emplace_back("e4_residual", tp.e4_residual);
    r.emplace_back("method", tp.method);
    r.emplace_back("iterations", static_cast<long long>(tp.iterations));
    emit_records({r}, "tricritical", o);
    return 0;
}

double eps_cap(const Options& o)
{
    if (!(o.max_delta > 1.0) || !std::isfinite(o.max_delta)) {
        throw rectlat::DomainError("--max-delta must exceed 1");
    }
    return std::log(o.max_delta);
}

int cmd_first_order(const Options& o)
{
    const PotentialSpec p = make_potential(o);
    const rectlat::FirstOrderTransition fo =
        rectlat::find_first_order(p, quadrature(o), std::nullopt, {}, eps_cap(o));
    Record r = potential_fields(p);
    r.emplace_back("a_trans", fo.a_trans);
    r.emplace_back("eps_jump", fo.eps_jump);
    r.emplace_back("delta_jump", std::exp(fo.eps_jump));
    r.emplace_back("a_star", fo.a_star);
    r.emplace_back("e4_at_a_star", fo.e4_at_a_star);
    r.emplace_back("e6_at_a_star", fo.e6_at_a_star);
    r.emplace_back("landau_estimate", fo.landau_estimate);
    r.emplace_back("eps_floor", fo.eps_floor);
    r.emplace_back("square_energy", fo.square_energy);
    r.emplace_back("branch_energy", fo.branch_energy);
    emit_records({r}, "first-order", o);
    return 0;
}

int cmd_fit(const Options& o)
{
    const auto q = quadrature(o);
    rectlat::CriticalKind kind;
    if (o.kind == "second") {
        kind = rectlat::CriticalKind::Second;
    } else if (o.kind == "tricritical") {
        kind = rectlat::CriticalKind::Tricritical;
    } else {
        throw rectlat::DomainError("--kind must be second or tricritical");
    }
    std::optional<PotentialSpec> spec;
    double a_ref = 0.0;
    if (kind == rectlat::CriticalKind::Second) {
        spec = make_potential(o);
        a_ref = o.a_ref ? *o.a_ref : rectlat::find_transition(*spec, q).a_star;
    } else {
        const auto fam = tricritical_family(o);
        const rectlat::TricriticalPoint tp = rectlat::find_tricritical(fam, q);
        spec = fam.make(tp.param_t);
        a_ref = tp.a_t;
    }
    std::vector<double> deltas = o.delta_grid.empty()
                                     ? rectlat::default_fit_deltas(a_ref, kind)
                                     : rectlat::parse_grid(o.delta_grid).values();
    const rectlat::FitResult fr = rectlat::fit_exponent(*spec, a_ref, deltas, q);
    if (!fr.accepted) {
        std::cerr << "warning: poor power-law fit, r^2 = " << fr.r_squared << "; residuals:";
        for (double x : fr.residuals) std::cerr << ' ' << x;
        std::cerr << '\n';
    }
    Record r = potential_fields(*spec);
    r.emplace_back("kind", o.kind);
    r.emplace_back("a_ref", a_ref);
    r.emplace_back("beta", fr.beta);
    r.emplace_back("amplitude", fr.amplitude);
    r.emplace_back("r_squared", fr.r_squared);
    r.emplace_back("delta_min", fr.window.first);
    r.emplace_back("delta_max", fr.window.second);
    r.emplace_back("samples", static_cast<long long>(fr.deltas.size()));
    r.emplace_back("accepted", fr.accepted);
    emit_records({r}, "fit", o);
    return 0;
}

int cmd_scan(const Options& o)
{
    rectlat::ScanOptions so;
    so.quadrature = quadrature(o);
    if (o.workers < 1) throw rectlat::DomainError("--workers must be at least 1");
    so.workers = o.workers;
    so.refine_order_changes = !o.no_refine;
    so.eps_cap = eps_cap(o);
    const auto grid_or = [](const std::string& text, const std::string& fallback) {
        return rectlat::parse_grid(text.empty() ? fallback : text).values();
    };
    std::vector<rectlat::PhaseDiagramRow> rows;
    nlohmann::json config = config_json("scan", o);
    if (o.mode == "critical-curve") {
        const double k = need(o.kappa1, "--kappa1");
        const double border = rectlat::double_yukawa_v1_bound(k);
        char fallback[96];
        std::snprintf(fallback, sizeof fallback, "%.17g:%.17g:log:64", 1.05 * border, 100.0);
        rows = rectlat::scan_critical_curve(k, grid_or(o.v1_grid, fallback), so);
    } else if (o.mode == "tricritical-locus") {
        const auto locus = rectlat::scan_tricritical_locus(grid_or(o.kappa1_grid, "1.45:2.03:lin:64"), so);
        rows = rectlat::locus_rows(locus);
        config["kappa1_lower"] = rectlat::json_number(locus.kappa1_lower);
        config["kappa1_upper"] = rectlat::json_number(locus.kappa1_upper);
    } else if (o.mode == "a-star-min") {
        rows = rectlat::scan_a_star_min(grid_or(o.kappa1_grid, "0.1:50:log:64"), so);
    } else if (o.mode == "yukawa-coulomb") {
        rows = rectlat::scan_yukawa_coulomb(grid_or(o.kappa1_grid, "1.5:3:lin:64"), so);
    } else {
        throw rectlat::DomainError("--mode must be critical-curve, tricritical-locus, a-star-min or yukawa-coulomb");
    }
    if (o.format == "json") {
        emit(rectlat::rows_document(rows, config).dump(2) + "\n", o);
    } else {
        emit(rectlat::to_csv(rows), o);
    }
    return 0;
}

void add_potential(CLI::App* c, Options& o)
{
    c->add_option("--family", o.family, "riesz | yukawa | double-yukawa | yukawa-coulomb");
    c->add_option("--v1", o.v1, "double Yukawa repulsion amplitude");
    c->add_option("--kappa1", o.kappa1, "inverse screening length of the repulsive term");
    c->add_option("--kappa", o.kappa, "Yukawa inverse screening length");
    c->add_option("--v", o.v, "Yukawa amplitude (default 1)");
    c->add_option("--s", o.s, "Riesz exponent");
}

void add_common(CLI::App* c, Options& o)
{
    c->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--output", o.output, "output file (default standard output)");
    c->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    c->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energies and structural transitions of 2D rectangular lattices"};
    app.require_subcommand(1);
    Options o;

    auto* energy = app.add_subcommand("energy", "lattice energy per particle E(A, Delta)");
    add_potential(energy, o);
    add_common(energy, o);
    energy->add_option("--area", o.area, "inverse density A")->required();
    energy->add_option("--delta", o.delta, "aspect ratio Delta (default 1)");

    auto* expand = app.add_subcommand("expand", "Landau coefficients E0, E2, E4, E6");
    add_potential(expand, o);
    add_common(expand, o);
    expand->add_option("--area", o.area, "inverse density A")->required();
    expand->add_option("--method", o.method, "closed | series | both")
        ->check(CLI::IsMember({"closed", "series", "both"}));

    auto* transition = app.add_subcommand("transition", "second-order transition point A*");
    add_potential(transition, o);
    add_common(transition, o);
    transition->add_option("--a-lo", o.a_lo, "lower end of the A bracket");
    transition->add_option("--a-hi", o.a_hi, "upper end of the A bracket");

    auto* tricritical = app.add_subcommand("tricritical", "tricritical point");
    add_potential(tricritical, o);
    add_common(tricritical, o);
    tricritical->add_option("--guess-area", o.guess_area, "Newton starting A");
    tricritical->add_option("--guess-param", o.guess_param, "Newton starting v1 or kappa1");

    auto* first = app.add_subcommand("first-order", "first-order transition density and jump");
    add_potential(first, o);
    add_common(first, o);
    first->add_option("--max-delta", o.max_delta, "largest aspect ratio searched (default 4)");

    auto* fit = app.add_subcommand("fit", "critical exponent of the minimizing aspect ratio");
    add_potential(fit, o);
    add_common(fit, o);
    fit->add_option("--kind", o.kind, "second | tricritical");
    fit->add_option("--a-ref", o.a_ref, "reference density (default: located automatically)");
    fit->add_option("--delta-grid", o.delta_grid, "offsets A - a_ref as lo:hi:{lin|log}:N");

    auto* scan = app.add_subcommand("scan", "phase-diagram sweeps");
    add_potential(scan, o);
    add_common(scan, o);
    scan->add_option("--mode", o.mode, "critical-curve | tricritical-locus | a-star-min | yukawa-coulomb");
    scan->add_option("--kappa1-grid", o.kappa1_grid, "lo:hi:{lin|log}:N");
    scan->add_option("--v1-grid", o.v1_grid, "lo:hi:{lin|log}:N");
    scan->add_option("--workers", o.workers, "worker threads");
    scan->add_option("--max-delta", o.max_delta, "largest aspect ratio searched at first-order points (default 4)");
    scan->add_flag("--no-refine", o.no_refine, "do not add midpoints where the transition order changes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitDomain;
    }

    try {
        if (*energy) return cmd_energy(o);
        if (*expand) return cmd_expand(o);
        if (*transition) return cmd_transition(o);
        if (*tricritical) return cmd_tricritical(o);
        if (*first) return cmd_first_order(o);
        if (*fit) return cmd_fit(o);
        if (*scan) return cmd_scan(o);
    } catch (const rectlat::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const rectlat::ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const rectlat::NonconvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (const auto& line : e.trace()) std::cerr << "  " << line << '\n';
        return kExitNonconvergence;
    } catch (const rectlat::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitDomain;
}
