#pragma once

// Truncated univariate power series c0 + c1 x + ... + cN x^N.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "rectlat/errors.hpp"

namespace rectlat {

inline constexpr std::size_t kDefaultSeriesOrder = 8;

class PowerSeries {
public:
    explicit PowerSeries(std::size_t order = kDefaultSeriesOrder) : coeffs_(order + 1, 0.0) {}

    /// Missing trailing coefficients are zero; extra ones are a contract violation.
    PowerSeries(std::size_t order, std::initializer_list<double> coeffs) : coeffs_(order + 1, 0.0)
    {
        if (coeffs.size() > coeffs_.size()) {
            throw ContractViolation("PowerSeries: " + std::to_string(coeffs.size()) +
                                    " coefficients exceed truncation order " +
                                    std::to_string(order));
        }
        std::size_t i = 0;
        for (double c : coeffs) coeffs_[i++] = c;
    }

    static PowerSeries constant(double c, std::size_t order = kDefaultSeriesOrder)
    {
        PowerSeries s(order);
        s.coeffs_[0] = c;
        return s;
    }

    /// The expansion variable itself, x.
    static PowerSeries variable(std::size_t order = kDefaultSeriesOrder)
    {
        PowerSeries s(order);
        if (order >= 1) s.coeffs_[1] = 1.0;
        return s;
    }

    [[nodiscard]] std::size_t order() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }

    double& operator[](std::size_t i) { return coeffs_.at(i); }
    double operator[](std::size_t i) const { return coeffs_.at(i); }

    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    /// Horner evaluation of the truncated polynomial.
    [[nodiscard]] double evaluate(double x) const
    {
        double r = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
        return r;
    }

    PowerSeries& operator*=(double k)
    {
        for (double& c : coeffs_) c *= k;
        return *this;
    }

private:
    std::vector<double> coeffs_;
};

namespace detail {
inline void require_same_order(const PowerSeries& a, const PowerSeries& b, const char* op)
{
    if (a.order() != b.order()) {
        throw ContractViolation(std::string("PowerSeries ") + op + ": order mismatch (" +
                                std::to_string(a.order()) + " vs " +
                                std::to_string(b.order()) + ")");
    }
}
} // namespace detail

inline PowerSeries series_add(const PowerSeries& a, const PowerSeries& b)
{
    detail::require_same_order(a, b, "add");
    PowerSeries r(a.order());
    for (std::size_t i = 0; i <= a.order(); ++i) r[i] = a[i] + b[i];
    return r;
}

/// Cauchy product, truncated at the common order.
inline PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b)
{
    detail::require_same_order(a, b, "mul");
    const std::size_t n = a.order();
    PowerSeries r(n);
    for (std::size_t i = 0; i <= n; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

/// exp of a series via k e_k = sum_{m=1}^{k} m s_m e_{k-m}, which follows from (exp s)' = s' exp s.
inline PowerSeries series_exp(const PowerSeries& s)
{
    const std::size_t n = s.order();
    PowerSeries r(n);
    r[0] = std::exp(s[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (std::size_t m = 1; m <= k; ++m) acc += static_cast<double>(m) * s[m] * r[k - m];
        r[k] = acc / static_cast<double>(k);
    }
    return r;
}

inline PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) { return series_add(a, b); }
inline PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) { return series_mul(a, b); }

inline PowerSeries operator-(const PowerSeries& a)
{
    PowerSeries r = a;
    r *= -1.0;
    return r;
}

inline PowerSeries operator*(double k, PowerSeries a)
{
    a *= k;
    return a;
}

} // namespace rectlat
