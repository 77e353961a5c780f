#pragma once

// CSV and JSON forms of potentials and phase-diagram rows.
// Needs nlohmann/json (single header "json.hpp") on the include path.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "rectlat/errors.hpp"
#include "rectlat/phasescan.hpp"
#include "rectlat/potential.hpp"

namespace rectlat {

inline constexpr const char* kFormatVersion = "1.0";
inline constexpr const char* kCsvHeader =
    "family,kappa1,v1,a_star,order,eps_jump,e2_residual,e4_value,status";

/// 15 significant digits; non-finite values become empty fields.
inline std::string csv_number(double x)
{
    if (!std::isfinite(x)) return std::isinf(x) && x > 0 ? "inf" : "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

/// RFC 4180 quoting for fields containing separators, quotes or line breaks.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_csv(const std::vector<PhaseDiagramRow>& rows)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.family)) + ',' + csv_number(r.kappa1) + ',' + csv_number(r.v1) +
               ',' + csv_number(r.a_star) + ',' + std::string(to_string(r.order)) + ',' +
               csv_number(r.eps_jump) + ',' + csv_number(r.e2_residual) + ',' +
               csv_number(r.e4_value) + ',' + csv_field(r.status) + '\n';
    }
    return out;
}

/// Finite numbers as JSON numbers (shortest round-trip form), others as null.
inline nlohmann::json json_number(double x)
{
    if (std::isfinite(x)) return x;
    return nullptr;
}

inline nlohmann::json to_json(const PhaseDiagramRow& r)
{
    return {{"family", std::string(to_string(r.family))},
            {"kappa1", json_number(r.kappa1)},
            {"v1", json_number(r.v1)},
            {"a_star", json_number(r.a_star)},
            {"order", std::string(to_string(r.order))},
            {"eps_jump", json_number(r.eps_jump)},
            {"e2_residual", json_number(r.e2_residual)},
            {"e4_value", json_number(r.e4_value)},
            {"status", r.status}};
}

/// {meta: {version, config}, rows: [...]}
inline nlohmann::json rows_document(const std::vector<PhaseDiagramRow>& rows, const nlohmann::json& config)
{
    nlohmann::json doc;
    doc["meta"] = {{"version", kFormatVersion}, {"config", config}};
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) doc["rows"].push_back(to_json(r));
    return doc;
}

inline nlohmann::json to_json(const PotentialSpec& p)
{
    nlohmann::json j{{"family", std::string(to_string(p.family()))}};
    switch (p.family()) {
    case Family::Riesz: j["s"] = p.s(); break;
    case Family::Yukawa:
        j["kappa"] = p.kappa();
        j["v"] = p.v();
        break;
    case Family::DoubleYukawa:
        j["v1"] = p.v1();
        j["kappa1"] = p.kappa1();
        j["v2"] = p.v2();
        j["kappa2"] = p.kappa2();
        break;
    case Family::YukawaCoulomb:
        j["kappa1"] = p.kappa1();
        j["v1"] = p.v1();
        j["v2"] = p.v2();
        break;
    }
    return j;
}

/// Rebuilds a potential from its free parameters; derived ones are recomputed.
inline PotentialSpec potential_from_json(const nlohmann::json& j)
{
    try {
        const Family f = family_from_string(j.at("family").get<std::string>());
        switch (f) {
        case Family::Riesz: return riesz(j.at("s").get<double>());
        case Family::Yukawa: return yukawa(j.at("kappa").get<double>(), j.value("v", 1.0));
        case Family::DoubleYukawa:
            return derive_double_yukawa(j.at("v1").get<double>(), j.at("kappa1").get<double>());
        case Family::YukawaCoulomb: return derive_yukawa_coulomb(j.at("kappa1").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("potential JSON: ") + e.what());
    }
    throw DomainError("potential JSON: unknown family");
}

} // namespace rectlat
