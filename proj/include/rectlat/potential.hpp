#pragma once

// Pair potentials with a Gaussian (Laplace) representation
//   f(r) = int_0^inf e^{-r^2 t} rho_f(t) dt,
// restricted to sums of two kinds of terms:
//   screened  v e^{-kappa r}/r   rho = v (pi t)^{-1/2} e^{-kappa^2/(4t)}
//   power     v / r^s            rho = v t^{s/2-1} / Gamma(s/2)
// Power terms with s < 2 are not summable on a 2D lattice and are regularized by a
// uniform neutralizing background (the Coulomb term of the Yukawa-Coulomb model).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rectlat/errors.hpp"

namespace rectlat {

enum class Family { Riesz, Yukawa, DoubleYukawa, YukawaCoulomb };

inline std::string_view to_string(Family f)
{
    switch (f) {
    case Family::Riesz: return "riesz";
    case Family::Yukawa: return "yukawa";
    case Family::DoubleYukawa: return "double-yukawa";
    case Family::YukawaCoulomb: return "yukawa-coulomb";
    }
    return "unknown";
}

inline Family family_from_string(std::string_view name)
{
    if (name == "riesz") return Family::Riesz;
    if (name == "yukawa") return Family::Yukawa;
    if (name == "double-yukawa") return Family::DoubleYukawa;
    if (name == "yukawa-coulomb") return Family::YukawaCoulomb;
    throw DomainError("unknown potential family '" + std::string(name) + "'");
}

struct ScreenedTerm {
    double amplitude;
    double kappa;  ///< inverse screening length, > 0
};

struct PowerTerm {
    double amplitude;
    double exponent;  ///< s in 1/r^s
};

/// Residuals of the r_min = 1, f(1) = -1 normalization.
struct Normalization {
    double value_residual = 0.0;  ///< |f(1) + 1|
    double slope_residual = 0.0;  ///< |f'(1)|
};

inline constexpr double kNormalizationTolerance = 1e-10;

class PotentialSpec {
public:
    [[nodiscard]] Family family() const noexcept { return family_; }

    [[nodiscard]] double s() const noexcept { return s_; }
    [[nodiscard]] double kappa() const noexcept { return kappa1_; }
    [[nodiscard]] double v() const noexcept { return v1_; }
    [[nodiscard]] double v1() const noexcept { return v1_; }
    [[nodiscard]] double kappa1() const noexcept { return kappa1_; }
    [[nodiscard]] double v2() const noexcept { return v2_; }
    [[nodiscard]] double kappa2() const noexcept { return kappa2_; }

    /// True when the lattice sum needs a neutralizing background (any power term with s < 2).
    [[nodiscard]] bool needs_background() const noexcept
    {
        for (const auto& p : power_) {
            if (p.exponent < 2.0) return true;
        }
        return false;
    }

    /// All terms of the family decay exponentially.
    [[nodiscard]] bool exponentially_decaying() const noexcept { return power_.empty(); }

    [[nodiscard]] const std::vector<ScreenedTerm>& screened_terms() const noexcept
    {
        return screened_;
    }
    [[nodiscard]] const std::vector<PowerTerm>& power_terms() const noexcept { return power_; }

    [[nodiscard]] const Normalization& normalization() const noexcept { return norm_; }

    /// Bare pair potential f(r); for Yukawa-Coulomb the background is not included.
    [[nodiscard]] double value(double r) const
    {
        require_positive(r, "potential_value: r");
        double f = 0.0;
        for (const auto& t : screened_) f += t.amplitude * std::exp(-t.kappa * r) / r;
        for (const auto& p : power_) f += p.amplitude * std::pow(r, -p.exponent);
        return f;
    }

    /// Analytic f'(r).
    [[nodiscard]] double derivative(double r) const
    {
        require_positive(r, "potential_derivative: r");
        double d = 0.0;
        for (const auto& t : screened_) {
            d -= t.amplitude * std::exp(-t.kappa * r) * (t.kappa * r + 1.0) / (r * r);
        }
        for (const auto& p : power_) d -= p.amplitude * p.exponent * std::pow(r, -p.exponent - 1.0);
        return d;
    }

    /// Density rho_f(t) of the Laplace measure.
    [[nodiscard]] double density(double t) const
    {
        require_positive(t, "measure_density: t");
        const double inv_sqrt = 1.0 / std::sqrt(std::numbers::pi * t);
        double rho = inv_sqrt * screened_sum(1.0 / (4.0 * t));
        for (const auto& p : power_) {
            const double a = 0.5 * p.exponent;
            rho += p.amplitude * std::pow(t, a - 1.0) / std::tgamma(a);
        }
        return rho;
    }

    /// rho_f(t/A)/A, the weight of the lattice integrals at inverse density A.
    [[nodiscard]] double scaled_density(double t, double area) const
    {
        const double inv_sqrt = 1.0 / std::sqrt(std::numbers::pi * t * area);
        double w = inv_sqrt * screened_sum(area / (4.0 * t));
        for (const auto& p : power_) {
            const double a = 0.5 * p.exponent;
            w += p.amplitude * std::pow(t / area, a - 1.0) / (std::tgamma(a) * area);
        }
        return w;
    }

    /// Closed form of int_0^p (pi/t - 1) rho_f(t/A) dt/A.
    /// Background terms (s < 2) use the analytic continuation, which equals
    /// -int_0^p w dt - int_p^inf (pi/t) w dt.
    [[nodiscard]] double small_t_elementary(double p, double area) const
    {
        constexpr double pi = std::numbers::pi;
        double total = 0.0;
        for (const auto& s : screened_) {
            const double c = s.kappa * s.kappa * area / 4.0;
            const double x = std::sqrt(c / p);
            const double erfc_x = std::erfc(x);
            // int_0^p t^{-3/2} e^{-c/t} dt and int_0^p t^{-1/2} e^{-c/t} dt
            const double i32 = std::sqrt(pi / c) * erfc_x;
            const double i12 = 2.0 * std::sqrt(p) * std::exp(-c / p) - 2.0 * std::sqrt(pi * c) * erfc_x;
            total += s.amplitude / std::sqrt(pi * area) * (pi * i32 - i12);
        }
        for (const auto& q : power_) {
            const double a = 0.5 * q.exponent;
            if (a == 1.0) {
                throw DomainError("lattice energy: 1/r^2 is logarithmically divergent on a 2D lattice");
            }
            total += q.amplitude * (pi * std::pow(p, a - 1.0) / (a - 1.0) - std::pow(p, a) / a) /
                     (std::tgamma(a) * std::pow(area, a));
        }
        return total;
    }

    friend PotentialSpec riesz(double s);
    friend PotentialSpec yukawa(double kappa, double v);
    friend PotentialSpec derive_double_yukawa(double v1, double kappa1);
    friend PotentialSpec derive_yukawa_coulomb(double kappa1);

private:
    /// sum_i a_i e^{-kappa_i^2 x}. An opposite-sign pair is formed as
    /// -a_1 e^{-k1^2 x} expm1(log(-a_2/a_1) - (k2^2 - k1^2) x), which stays accurate
    /// when the two terms nearly cancel (large v1); -a_2 - a_1 is exact there.
    [[nodiscard]] double screened_sum(double x) const
    {
        if (screened_.size() == 2 && screened_[0].amplitude * screened_[1].amplitude < 0.0) {
            const ScreenedTerm& a = screened_[0];
            const ScreenedTerm& b = screened_[1];
            const double gap = (b.kappa - a.kappa) * (b.kappa + a.kappa);
            const double arg = std::log1p((-b.amplitude - a.amplitude) / a.amplitude) - gap * x;
            // Far from cancellation the plain sum is accurate and cannot form 0 * inf.
            if (std::abs(arg) < 1.0) return -a.amplitude * std::exp(-a.kappa * a.kappa * x) * std::expm1(arg);
        }
        double sum = 0.0;
        for (const auto& s : screened_) sum += s.amplitude * std::exp(-s.kappa * s.kappa * x);
        return sum;
    }

    static void require_positive(double x, const char* what)
    {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw DomainError(std::string(what) + " must be positive and finite, got " +
                              std::to_string(x));
        }
    }

    void check_normalization()
    {
        norm_.value_residual = std::abs(value(1.0) + 1.0);
        norm_.slope_residual = std::abs(derivative(1.0));
        double scale = 1.0;
        for (const auto& t : screened_) scale = std::max(scale, std::abs(t.amplitude) * std::exp(-t.kappa));
        if (norm_.value_residual > kNormalizationTolerance * scale ||
            norm_.slope_residual > kNormalizationTolerance * scale) {
            throw ContractViolation("potential normalization f(1) = -1, f'(1) = 0 violated: |f(1)+1| = " +
                                    std::to_string(norm_.value_residual) +
                                    ", |f'(1)| = " + std::to_string(norm_.slope_residual));
        }
    }

    Family family_ = Family::Riesz;
    double s_ = 0.0;
    double v1_ = 0.0;
    double kappa1_ = 0.0;
    double v2_ = 0.0;
    double kappa2_ = 0.0;
    std::vector<ScreenedTerm> screened_;
    std::vector<PowerTerm> power_;
    Normalization norm_;
};

/// f(r) = 1/r^s.
inline PotentialSpec riesz(double s)
{
    PotentialSpec p;
    PotentialSpec::require_positive(s, "riesz: exponent s");
    p.family_ = Family::Riesz;
    p.s_ = s;
    p.power_.push_back({1.0, s});
    return p;
}

/// f(r) = v e^{-kappa r}/r.
inline PotentialSpec yukawa(double kappa, double v = 1.0)
{
    PotentialSpec p;
    PotentialSpec::require_positive(kappa, "yukawa: kappa");
    if (!std::isfinite(v)) throw DomainError("yukawa: amplitude must be finite");
    p.family_ = Family::Yukawa;
    p.kappa1_ = kappa;
    p.v1_ = v;
    p.screened_.push_back({v, kappa});
    return p;
}

/// Double Yukawa v1 e^{-k1 r}/r - v2 e^{-k2 r}/r normalized to a minimum f(1) = -1.
/// Requires v1 > e^{k1}/k1 so that k2 > 0.
inline PotentialSpec derive_double_yukawa(double v1, double kappa1)
{
    PotentialSpec::require_positive(kappa1, "double-yukawa: kappa1");
    PotentialSpec::require_positive(v1, "double-yukawa: v1");
    const double ek = std::exp(kappa1);
    const double bound = ek / kappa1;
    const double kappa2 = (kappa1 * v1 - ek) / (v1 + ek);
    if (!(v1 > bound) || !(kappa2 > 0.0)) {
        throw DomainError("double-yukawa: v1 = " + std::to_string(v1) +
                          " must exceed e^{kappa1}/kappa1 = " + std::to_string(bound));
    }
    const double v2 = std::exp(kappa2 - kappa1) * (1.0 + kappa1) * v1 / (1.0 + kappa2);

    PotentialSpec p;
    p.family_ = Family::DoubleYukawa;
    p.v1_ = v1;
    p.kappa1_ = kappa1;
    p.v2_ = v2;
    p.kappa2_ = kappa2;
    p.screened_ = {{v1, kappa1}, {-v2, kappa2}};
    p.check_normalization();
    return p;
}

/// Yukawa-Coulomb v1 e^{-k1 r}/r - v2/r with v1 = e^{k1}/k1 and v2 = (1+k1)/k1.
inline PotentialSpec derive_yukawa_coulomb(double kappa1)
{
    PotentialSpec::require_positive(kappa1, "yukawa-coulomb: kappa1");
    PotentialSpec p;
    p.family_ = Family::YukawaCoulomb;
    p.kappa1_ = kappa1;
    p.v1_ = std::exp(kappa1) / kappa1;
    p.v2_ = (1.0 + kappa1) / kappa1;
    p.kappa2_ = 0.0;
    p.screened_ = {{p.v1_, kappa1}};
    p.power_ = {{-p.v2_, 1.0}};
    p.check_normalization();
    return p;
}

/// Lower bound e^{k1}/k1 on v1 for the double Yukawa family.
inline double double_yukawa_v1_bound(double kappa1) { return std::exp(kappa1) / kappa1; }

/// Sign-change point of the double Yukawa density: rho_f(t) < 0 iff t < this value.
inline double density_sign_change(const PotentialSpec& spec)
{
    if (spec.family() != Family::DoubleYukawa) {
        throw DomainError("density_sign_change: defined for the double Yukawa family only");
    }
    const double k1 = spec.kappa1();
    const double k2 = spec.kappa2();
    return (k1 * k1 - k2 * k2) / (4.0 * std::log(spec.v1() / spec.v2()));
}

} // namespace rectlat
