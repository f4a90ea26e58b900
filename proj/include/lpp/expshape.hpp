#pragma once

// Limit shape of the exponential model with i.i.d. random row rates: the
// flux a(u), the level curve g(y), the shape Psi_G by level-curve inversion,
// the boundary solver for Psi_G(1, alpha) and the small-alpha expansions.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "envmodel.hpp"

namespace lpp {

//! Thrown when the closed form for Psi_G(1, alpha) is requested past its window.
class BoundaryWindowError : public std::domain_error
{
  public:
    explicit BoundaryWindowError(double alpha0)
        : std::domain_error("alpha beyond the closed-form window; alpha0 = " + std::to_string(alpha0)),
          alpha0_(alpha0)
    {
    }
    double alpha0() const noexcept { return alpha0_; }

  private:
    double alpha0_;
};

namespace detail {

/*!
 * Root of an increasing function V(a, gap) = target over a in (0, c), where
 * gap = c - a. Small roots are resolved in `a`, roots near c in the gap so
 * both ends keep relative precision. Returns {a, gap}; gap = 0 means the
 * target is not reached below c.
 */
template <class V>
std::pair<double, double> solve_increasing_in_a(double c, double target, V&& value)
{
    const double half = 0.5 * c;
    if (value(half, c - half) >= target)
    {
        double lo = 0.0, hi = half;
        for (int it = 0; it < 400; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi) || hi - lo <= 2e-16 * hi)
                break;
            if (value(mid, c - mid) >= target)
                hi = mid;
            else
                lo = mid;
        }
        return {hi, c - hi};
    }
    // Root has gap in (0, c/2); the value decreases as the gap grows.
    double glo = c * 1e-100, ghi = c - half;
    if (value(c - glo, glo) < target)
        return {c, 0.0};
    for (int it = 0; it < 400; ++it)
    {
        const double mid = std::sqrt(glo) * std::sqrt(ghi);
        if (!(mid > glo && mid < ghi) || ghi - glo <= 2e-16 * glo)
            break;
        if (value(c - mid, mid) >= target)
            glo = mid;
        else
            ghi = mid;
    }
    return {c - glo, glo};
}

} // namespace detail

/*!
 * Duality machinery for a fixed rate measure m. Immutable after
 * construction, so one instance can be shared between threads.
 */
class ExpDual
{
  public:
    explicit ExpDual(RateMeasure m) : m_(std::move(m))
    {
        u_star_ = measure_expectation(m_, Integrand::c_over_xi_minus_c, m_.c());
        mu_ = measure_expectation(m_, Integrand::inv_xi);
        slope_at_c_ = measure_expectation_shift(m_, Integrand::xi_over_shifted_sq, m_.c(), 0.0);
    }

    const RateMeasure& measure() const noexcept { return m_; }
    double c() const noexcept { return m_.c(); }
    double u_star() const noexcept { return u_star_; }
    double mean() const noexcept { return mu_; }    //!< mu_G = int 1/xi dm

    //! u(a) = int a/(xi - a) dm.
    double density(double a, double gap) const
    {
        return measure_expectation_shift(m_, Integrand::a_over_shifted, a, gap);
    }

    //! int xi/(xi - a)^2 dm = 1/a'(u) at a = a(u).
    double inverse_slope(double a, double gap) const
    {
        return measure_expectation_shift(m_, Integrand::xi_over_shifted_sq, a, gap);
    }

    //! The flux a(u): inverse of u(a) on (0, c), saturating at c for u >= u*.
    double a_of_u(double u) const
    {
        if (!(u >= 0.0))
            throw std::domain_error("a_of_u needs u >= 0");
        if (u == 0.0)
            return 0.0;
        if (u >= u_star_)
            return c();
        return detail::solve_increasing_in_a(c(), u, [&](double a, double gap) { return density(a, gap); })
            .first;
    }

    //! g(y) = sup_u { a(u) - y u }.
    double g_of_y(double y) const
    {
        if (!(y >= 0.0))
            throw std::domain_error("g_of_y needs y >= 0");
        if (y == 0.0)
            return c();
        if (y >= 1.0 / mu_)
            return 0.0;
        if (std::isfinite(slope_at_c_) && y <= 1.0 / slope_at_c_)
            return c() - y * u_star_;
        const auto [a, gap] = detail::solve_increasing_in_a(
            c(), 1.0 / y, [&](double a, double gap) { return inverse_slope(a, gap); });
        if (gap == 0.0)
            return c() - y * u_star_;
        return a - y * density(a, gap);
    }

    /*!
     * Psi_G(x, y) = inf{ t >= 0 : t g(y/t) >= x }. t g(y/t) is
     * nondecreasing and below t c, so the crossing lies above x/c.
     */
    double psi(double x, double y) const
    {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::domain_error("psi needs x, y > 0");
        auto level = [&](double t) { return t * g_of_y(y / t); };
        double lo = x / c();
        double hi = 2.0 * lo;
        while (level(hi) < x)
        {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi) || hi - lo <= 1e-15 * lo)
                break;
            if (level(mid) >= x)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

  private:
    RateMeasure m_;
    double u_star_;
    double mu_;
    double slope_at_c_;
};

inline double u_star(const RateMeasure& m)
{
    return measure_expectation(m, Integrand::c_over_xi_minus_c, m.c());
}
inline double a_of_u(const RateMeasure& m, double u) { return ExpDual(m).a_of_u(u); }
inline double g_of_y(const RateMeasure& m, double y) { return ExpDual(m).g_of_y(y); }
inline double psi_g(const RateMeasure& m, double x, double y) { return ExpDual(m).psi(x, y); }

enum class BoundaryCase
{
    Case1,    //!< int (xi-c)^{-2} dm < inf: linear in alpha near 0
    Case2,
};

struct BoundaryResult
{
    double alpha = 0.0;
    double psi = 0.0;
    BoundaryCase kind = BoundaryCase::Case2;
    std::optional<double> a0;
    std::optional<double> u0;
    double residual = 0.0;    //!< relative residual of 1/a0^2 = alpha int (xi-a0)^{-2} dm
};

//! Largest alpha for which the Case 1 closed form holds; nullopt in Case 2.
inline std::optional<double> case1_window(const RateMeasure& m)
{
    const double second = measure_expectation(m, Integrand::inv_shifted_sq, m.c());
    if (!std::isfinite(second))
        return std::nullopt;
    return 1.0 / (m.c() * m.c() * second);
}

/*!
 * Psi_G(1, alpha) through the stationary point a0 of the boundary problem:
 * 1/a0^2 = alpha int (xi-a0)^{-2} dm, Psi = 1/a0 + alpha int (xi-a0)^{-1} dm.
 * When the second inverse moment at c is finite and alpha is small, a0 = c.
 */
inline BoundaryResult boundary_psi(const RateMeasure& m, double alpha)
{
    if (!(alpha > 0.0))
        throw std::domain_error("boundary_psi needs alpha > 0");
    const double c = m.c();
    BoundaryResult out;
    out.alpha = alpha;
    if (const auto alpha0 = case1_window(m))
    {
        if (alpha > *alpha0)
            throw BoundaryWindowError(*alpha0);
        out.kind = BoundaryCase::Case1;
        out.a0 = c;
        out.u0 = u_star(m);
        out.psi = 1.0 / c + alpha * measure_expectation(m, Integrand::inv_shifted, c);
        out.residual = 0.0;
        return out;
    }
    // 1/a^2 - alpha J(a) is strictly decreasing: +inf at 0+, -inf at c-.
    auto balance = [&](double a, double gap) {
        return alpha * a * a * measure_expectation_shift(m, Integrand::inv_shifted_sq, a, gap);
    };
    const auto [a0, gap] = detail::solve_increasing_in_a(c, 1.0, balance);
    out.kind = BoundaryCase::Case2;
    out.a0 = a0;
    out.u0 = measure_expectation_shift(m, Integrand::a_over_shifted, a0, gap);
    out.psi = 1.0 / a0 + alpha * measure_expectation_shift(m, Integrand::inv_shifted, a0, gap);
    out.residual = std::abs(1.0 - balance(a0, gap));
    return out;
}

struct AsymptoticConstants
{
    double nu = 0.0;
    double kappa = 0.0;
    double c = 0.0;
    double a_nu = 0.0;
    std::optional<double> a_nu2;    //!< defined for nu < 0
    std::optional<double> b0;       //!< defined for nu < 1
    std::optional<double> b;        //!< defined for nu < 0
};

namespace detail {

/*!
 * sum_k binom(nu+1, k) (-1)^k / (k + shift). The terms eventually keep one
 * sign and decay like k^{-(nu+3)}, so the raw partial sums converge slowly
 * for nu near -1. Partial sums at K, 2K, 4K are combined by Richardson
 * extrapolation against the tail expansion in powers K^{-(nu+2)}, K^{-(nu+3)}.
 */
inline double binomial_series(double nu, double shift)
{
    constexpr std::size_t K = 1 << 15;
    long double term_coef = 1.0L;    // binom(nu+1, k) (-1)^k
    long double sum = 0.0L, comp = 0.0L;
    long double s1 = 0, s2 = 0, s4 = 0;
    for (std::size_t k = 0; k < 4 * K; ++k)
    {
        const long double t = term_coef / (static_cast<long double>(k) + shift);
        const long double yv = t - comp;
        const long double tv = sum + yv;
        comp = (tv - sum) - yv;
        sum = tv;
        if (k + 1 == K)
            s1 = sum;
        if (k + 1 == 2 * K)
            s2 = sum;
        term_coef *= -(static_cast<long double>(nu) + 1.0L - static_cast<long double>(k))
                     / static_cast<long double>(k + 1);
        if (term_coef == 0.0L)
            return static_cast<double>(sum);
    }
    s4 = sum;
    const long double p = static_cast<long double>(nu) + 2.0L;
    const long double f1 = std::pow(2.0L, p), f2 = std::pow(2.0L, p + 1.0L);
    const long double r1 = (f1 * s2 - s1) / (f1 - 1.0L);
    const long double r2 = (f1 * s4 - s2) / (f1 - 1.0L);
    return static_cast<double>((f2 * r2 - r1) / (f2 - 1.0L));
}

} // namespace detail

//! Constants of the small-alpha expansion for a tail of exponent nu and weight kappa at c.
inline AsymptoticConstants asymptotic_constants(double nu, double kappa, double c)
{
    if (!(nu >= -1.0 && nu <= 1.0))
        throw std::domain_error("asymptotic constants need nu in [-1, 1]");
    if (!(kappa > 0.0) || !(c > 0.0))
        throw std::domain_error("asymptotic constants need kappa > 0 and c > 0");
    AsymptoticConstants k;
    k.nu = nu;
    k.kappa = kappa;
    k.c = c;
    k.a_nu = detail::binomial_series(nu, 1.0 - nu);
    if (nu < 0.0)
        k.a_nu2 = detail::binomial_series(nu, -nu);
    if (nu < 1.0)
        k.b0 = std::pow(2.0 * kappa * c * c * k.a_nu, 1.0 / (1.0 - nu));
    if (k.a_nu2 && k.b0)
        k.b = *k.b0 / (c * c) + kappa * std::pow(*k.b0, nu) * *k.a_nu2;
    return k;
}

/*!
 * Leading terms of Psi_G(1, alpha) as alpha -> 0 for a measure whose mass
 * near c behaves like kappa (xi-c)^{nu+1}.
 */
inline double asymptotic_psi(const RateMeasure& m, double alpha)
{
    if (!m.tail())
        throw std::invalid_argument("asymptotic_psi needs a tail segment");
    if (!(alpha > 0.0))
        throw std::domain_error("asymptotic_psi needs alpha > 0");
    const auto& tail = *m.tail();
    const double c = m.c();
    if (tail.nu > 0.0)
        return 1.0 / c + alpha * measure_expectation(m, Integrand::inv_shifted, c);
    if (tail.nu == 0.0)
        return 1.0 / c - tail.kappa * alpha * std::log(alpha);
    const auto k = asymptotic_constants(tail.nu, tail.kappa, c);
    return 1.0 / c + *k.b * std::pow(alpha, 1.0 / (1.0 - tail.nu));
}

} // namespace lpp
