#pragma once

// Row weight laws, environment laws and the rate measure of the exponential
// model, with sampling, quantile coupling and exact moments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "quadrature.hpp"
#include "rng.hpp"

namespace lpp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct MeanVar
{
    double mean = 0.0;
    double var = 0.0;
};

//---------------------------------------------------------------------------//
// RowDistribution
//---------------------------------------------------------------------------//

struct Exponential
{
    double rate;
};

struct Bernoulli
{
    double p;
};

struct DiscreteAtom
{
    double value;
    double prob;
};

//! Atoms sorted by value with strictly increasing values.
struct FiniteDiscrete
{
    std::vector<DiscreteAtom> atoms;
    std::vector<double> cumulative;
};

/*!
 * Exponential(rate) on [0, tau), then an atom of mass (1-ptilde)e^{-rate tau}
 * at tau and an atom of mass ptilde e^{-rate tau} at upper >= tau.
 */
struct TruncatedThreePart
{
    double rate;
    double tau;
    double ptilde;
    double upper;
};

class RowDistribution
{
  public:
    using Kind = std::variant<Exponential, Bernoulli, FiniteDiscrete, TruncatedThreePart>;

    static RowDistribution exponential(double rate)
    {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("exponential rate must be positive and finite");
        return RowDistribution(Exponential{rate});
    }

    static RowDistribution bernoulli(double p)
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("bernoulli p must lie in [0,1]");
        return RowDistribution(Bernoulli{p});
    }

    static RowDistribution discrete(std::vector<DiscreteAtom> atoms)
    {
        if (atoms.empty())
            throw std::invalid_argument("finite discrete law needs at least one atom");
        double total = 0.0;
        for (const auto& a : atoms)
        {
            if (!(a.prob >= 0.0) || !std::isfinite(a.value))
                throw std::invalid_argument("discrete atom must have finite value and prob >= 0");
            total += a.prob;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("discrete probabilities must sum to 1");
        std::sort(atoms.begin(), atoms.end(),
                  [](const DiscreteAtom& l, const DiscreteAtom& r) { return l.value < r.value; });
        FiniteDiscrete d;
        for (const auto& a : atoms)
        {
            if (a.prob == 0.0)
                continue;
            if (!d.atoms.empty() && d.atoms.back().value == a.value)
                d.atoms.back().prob += a.prob;
            else
                d.atoms.push_back(a);
        }
        double run = 0.0;
        for (const auto& a : d.atoms)
        {
            run += a.prob;
            d.cumulative.push_back(run);
        }
        d.cumulative.back() = 1.0;
        return RowDistribution(std::move(d));
    }

    static RowDistribution truncated(double rate, double tau, double ptilde, double upper)
    {
        if (!(rate > 0.0) || !(tau > 0.0))
            throw std::invalid_argument("truncated law needs rate > 0 and tau > 0");
        if (!(ptilde >= 0.0 && ptilde <= 1.0))
            throw std::invalid_argument("truncated law needs ptilde in [0,1]");
        if (!(upper >= tau))
            throw std::invalid_argument("truncated law needs upper atom >= tau");
        return RowDistribution(TruncatedThreePart{rate, tau, ptilde, upper});
    }

    const Kind& kind() const noexcept { return kind_; }

    template <class T>
    const T* as() const noexcept
    {
        return std::get_if<T>(&kind_);
    }

    //! F(x) = P(X <= x).
    double cdf(double x) const
    {
        return std::visit(
            [x](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>)
                    return x < 0.0 ? 0.0 : -std::expm1(-d.rate * x);
                else if constexpr (std::is_same_v<T, Bernoulli>)
                    return x < 0.0 ? 0.0 : (x < 1.0 ? 1.0 - d.p : 1.0);
                else if constexpr (std::is_same_v<T, FiniteDiscrete>)
                {
                    auto it = std::upper_bound(
                        d.atoms.begin(), d.atoms.end(), x,
                        [](double v, const DiscreteAtom& a) { return v < a.value; });
                    if (it == d.atoms.begin())
                        return 0.0;
                    return d.cumulative[static_cast<std::size_t>(it - d.atoms.begin()) - 1];
                }
                else
                {
                    if (x < 0.0)
                        return 0.0;
                    if (x < d.tau)
                        return -std::expm1(-d.rate * x);
                    if (x < d.upper)
                        return 1.0 - d.ptilde * std::exp(-d.rate * d.tau);
                    return 1.0;
                }
            },
            kind_);
    }

    //! 1 - F(x), computed without cancellation in the exponential tail.
    double survival(double x) const
    {
        if (const auto* e = as<Exponential>())
            return x < 0.0 ? 1.0 : std::exp(-e->rate * x);
        if (const auto* t = as<TruncatedThreePart>(); t && x >= 0.0 && x < t->tau)
            return std::exp(-t->rate * x);
        return 1.0 - cdf(x);
    }

    //! Points where the CDF jumps or changes its analytic form.
    std::vector<double> breakpoints() const
    {
        return std::visit(
            [](const auto& d) -> std::vector<double> {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>)
                    return {0.0};
                else if constexpr (std::is_same_v<T, Bernoulli>)
                    return {0.0, 1.0};
                else if constexpr (std::is_same_v<T, FiniteDiscrete>)
                {
                    std::vector<double> v;
                    for (const auto& a : d.atoms)
                        v.push_back(a.value);
                    return v;
                }
                else
                    return {0.0, d.tau, d.upper};
            },
            kind_);
    }

    //! True when the support is unbounded above.
    bool unbounded_above() const noexcept { return std::holds_alternative<Exponential>(kind_); }

    std::string describe() const
    {
        return std::visit(
            [](const auto& d) -> std::string {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>)
                    return "Exp(" + std::to_string(d.rate) + ")";
                else if constexpr (std::is_same_v<T, Bernoulli>)
                    return "Ber(" + std::to_string(d.p) + ")";
                else if constexpr (std::is_same_v<T, FiniteDiscrete>)
                    return "Discrete(" + std::to_string(d.atoms.size()) + " atoms)";
                else
                    return "Truncated(" + std::to_string(d.rate) + "," + std::to_string(d.tau) + ")";
            },
            kind_);
    }

  private:
    explicit RowDistribution(Kind k) : kind_(std::move(k)) {}

    Kind kind_;
};

/*!
 * Generalized inverse F^{-1}(u) = sup{x : F(x) < u}.
 *
 * Nondecreasing in u, and for F >= G pointwise quantile(F,u) <= quantile(G,u),
 * which is what makes shared uniforms a monotone coupling.
 */
inline double quantile(const RowDistribution& dist, double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile argument must lie in (0,1)");
    return std::visit(
        [u](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return -std::log1p(-u) / d.rate;
            else if constexpr (std::is_same_v<T, Bernoulli>)
                return u <= 1.0 - d.p ? 0.0 : 1.0;
            else if constexpr (std::is_same_v<T, FiniteDiscrete>)
            {
                auto it = std::lower_bound(d.cumulative.begin(), d.cumulative.end(), u);
                if (it == d.cumulative.end())
                    --it;
                return d.atoms[static_cast<std::size_t>(it - d.cumulative.begin())].value;
            }
            else
            {
                const double tail = std::exp(-d.rate * d.tau);
                if (u <= 1.0 - tail)
                    return -std::log1p(-u) / d.rate;
                if (u <= 1.0 - d.ptilde * tail)
                    return d.tau;
                return d.upper;
            }
        },
        dist.kind());
}

//! Exact mean and variance.
inline MeanVar mean_var(const RowDistribution& dist)
{
    return std::visit(
        [](const auto& d) -> MeanVar {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return {1.0 / d.rate, 1.0 / (d.rate * d.rate)};
            else if constexpr (std::is_same_v<T, Bernoulli>)
                return {d.p, d.p * (1.0 - d.p)};
            else if constexpr (std::is_same_v<T, FiniteDiscrete>)
            {
                double mean = 0.0;
                for (const auto& a : d.atoms)
                    mean += a.prob * a.value;
                double var = 0.0;
                for (const auto& a : d.atoms)
                    var += a.prob * (a.value - mean) * (a.value - mean);
                return {mean, var};
            }
            else
            {
                const double x = d.rate * d.tau;
                const double e = std::exp(-x);
                // Partial moments of the exponential part on [0, tau).
                const double m1 = (-std::expm1(-x) - x * e) / d.rate;
                const double m2 = 2.0 * (-std::expm1(-x) - e * (x + 0.5 * x * x)) / (d.rate * d.rate);
                const double mean = m1 + e * ((1.0 - d.ptilde) * d.tau + d.ptilde * d.upper);
                const double second
                    = m2 + e * ((1.0 - d.ptilde) * d.tau * d.tau + d.ptilde * d.upper * d.upper);
                return {mean, std::max(0.0, second - mean * mean)};
            }
        },
        dist.kind());
}

/*!
 * Replace the part of Exponential(rate) above tau by two atoms (at tau and
 * at tau + 2/rate) that carry the same mass and the same first two
 * conditional moments.
 */
inline RowDistribution truncate_two_moment(const RowDistribution& dist, double tau)
{
    const auto* e = dist.as<Exponential>();
    if (!e)
        throw std::invalid_argument("truncate_two_moment expects an exponential law");
    if (!(tau > 0.0))
        throw std::invalid_argument("truncation threshold must be positive");
    const double xi = e->rate;
    const double cond_mean = tau + 1.0 / xi;
    const double cond_second = tau * tau + 2.0 * tau / xi + 2.0 / (xi * xi);
    const double excess = cond_mean - tau;
    const double ptilde = excess * excess / (excess * excess + cond_second - cond_mean * cond_mean);
    const double upper = (cond_second - tau * tau) / excess - tau;
    return RowDistribution::truncated(xi, tau, ptilde, upper);
}

//---------------------------------------------------------------------------//
// RateMeasure
//---------------------------------------------------------------------------//

struct RateAtom
{
    double rate;
    double weight;
};

//! Density kappa (nu+1) (xi-c)^nu on (c, c+width]; nu = -1 means an atom kappa at c.
struct PowerTail
{
    double kappa;
    double nu;
    double width;
};

//! Integrands accepted by measure_expectation. `a` is the shift parameter.
enum class Integrand
{
    a_over_shifted,        //!< a/(xi-a)
    inv_shifted,           //!< 1/(xi-a)
    inv_shifted_sq,        //!< 1/(xi-a)^2
    xi_over_shifted_sq,    //!< xi/(xi-a)^2
    inv_xi,                //!< 1/xi
    inv_xi_sq,             //!< 1/xi^2
    c_over_xi_minus_c,     //!< c/(xi-c)
};

class RateMeasure
{
  public:
    RateMeasure(double c, std::vector<RateAtom> atoms, std::optional<PowerTail> tail = {})
        : c_(c), atoms_(std::move(atoms)), tail_(tail)
    {
        if (!(c_ > 0.0) || !std::isfinite(c_))
            throw std::invalid_argument("rate measure needs c > 0");
        double total = 0.0;
        bool mass_at_c = false;
        for (const auto& a : atoms_)
        {
            if (!(a.rate >= c_) || !std::isfinite(a.rate))
                throw std::invalid_argument("rate atoms must lie in [c, inf)");
            if (!(a.weight > 0.0))
                throw std::invalid_argument("rate atom weights must be positive");
            total += a.weight;
            mass_at_c = mass_at_c || a.rate == c_;
        }
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const RateAtom& l, const RateAtom& r) { return l.rate < r.rate; });
        if (tail_)
        {
            if (!(tail_->kappa > 0.0))
                throw std::invalid_argument("tail kappa must be positive");
            if (!(tail_->nu >= -1.0))
                throw std::invalid_argument("tail exponent nu must be >= -1");
            if (tail_->nu > -1.0 && !(tail_->width > 0.0))
                throw std::invalid_argument("tail width must be positive");
            total += tail_mass();
            mass_at_c = true;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("rate measure must have total mass 1");
        if (!mass_at_c)
            throw std::invalid_argument("c must be the exact lower bound: need an atom at c or a tail");
    }

    //! Deterministic rate: m = delta_rate.
    static RateMeasure delta(double rate) { return RateMeasure(rate, {{rate, 1.0}}); }

    double c() const noexcept { return c_; }
    const std::vector<RateAtom>& atoms() const noexcept { return atoms_; }
    const std::optional<PowerTail>& tail() const noexcept { return tail_; }

    //! Mass carried by the tail component (kappa width^{nu+1}, or kappa for nu = -1).
    double tail_mass() const noexcept
    {
        if (!tail_)
            return 0.0;
        if (tail_->nu == -1.0)
            return tail_->kappa;
        return tail_->kappa * std::pow(tail_->width, tail_->nu + 1.0);
    }

    bool has_atom_at_c() const noexcept
    {
        if (tail_ && tail_->nu == -1.0)
            return true;
        return std::any_of(atoms_.begin(), atoms_.end(), [&](const RateAtom& a) { return a.rate == c_; });
    }

    //! m[c, xi).
    double mass_below(double xi) const
    {
        double m = 0.0;
        for (const auto& a : atoms_)
            if (a.rate < xi)
                m += a.weight;
        if (tail_ && xi > c_)
        {
            if (tail_->nu == -1.0)
                m += tail_->kappa;
            else
                m += tail_->kappa * std::pow(std::min(xi - c_, tail_->width), tail_->nu + 1.0);
        }
        return m;
    }

    //! Map a uniform variate to a rate distributed according to m.
    double sample(double u) const
    {
        double density_mass = 0.0;
        if (tail_ && tail_->nu > -1.0)
            density_mass = tail_mass();
        if (u < density_mass)
            return c_ + std::pow(u / tail_->kappa, 1.0 / (tail_->nu + 1.0));
        u -= density_mass;
        if (tail_ && tail_->nu == -1.0)
        {
            if (u < tail_->kappa)
                return c_;
            u -= tail_->kappa;
        }
        for (const auto& a : atoms_)
        {
            if (u < a.weight)
                return a.rate;
            u -= a.weight;
        }
        return atoms_.empty() ? c_ : atoms_.back().rate;
    }

  private:
    double c_;
    std::vector<RateAtom> atoms_;
    std::optional<PowerTail> tail_;
};

namespace detail {

struct IntegrandShape
{
    int singular_power;    // power of (xi-a) in the denominator, 0 if none
    bool shifted;          // depends on the shift a
};

inline IntegrandShape shape_of(Integrand f)
{
    switch (f)
    {
        case Integrand::a_over_shifted: return {1, true};
        case Integrand::inv_shifted: return {1, true};
        case Integrand::inv_shifted_sq: return {2, true};
        case Integrand::xi_over_shifted_sq: return {2, true};
        case Integrand::inv_xi: return {0, false};
        case Integrand::inv_xi_sq: return {0, false};
        case Integrand::c_over_xi_minus_c: return {1, true};
    }
    throw std::invalid_argument("unknown integrand");
}

//! Integrand evaluated at xi = c + s with xi - a = s + gap.
inline double integrand_at(Integrand f, double s, double gap, double a, double c)
{
    const double shifted = s + gap;
    switch (f)
    {
        case Integrand::a_over_shifted: return a / shifted;
        case Integrand::inv_shifted: return 1.0 / shifted;
        case Integrand::inv_shifted_sq: return 1.0 / (shifted * shifted);
        case Integrand::xi_over_shifted_sq: return (c + s) / (shifted * shifted);
        case Integrand::inv_xi: return 1.0 / (c + s);
        case Integrand::inv_xi_sq: return 1.0 / ((c + s) * (c + s));
        case Integrand::c_over_xi_minus_c: return c / shifted;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

//! Numerator of the integrand at xi = c; used for the leading-order piece near a singular endpoint.
inline double numerator_at_c(Integrand f, double a, double c)
{
    switch (f)
    {
        case Integrand::a_over_shifted: return a;
        case Integrand::xi_over_shifted_sq: return c;
        case Integrand::c_over_xi_minus_c: return c;
        default: return 1.0;
    }
}

} // namespace detail

/*!
 * Integral of a catalog integrand against m. The shift is passed twice, as
 * `a` and as gap = c - a >= 0, so callers near either end of [0, c] can
 * supply whichever one they know exactly. Returns +inf when the integral
 * diverges.
 */
inline double measure_expectation_shift(const RateMeasure& m, Integrand f, double a, double gap)
{
    const double c = m.c();
    const auto shape = detail::shape_of(f);
    if (f == Integrand::c_over_xi_minus_c)
    {
        a = c;
        gap = 0.0;
    }
    if (!shape.shifted)
    {
        a = 0.0;    // irrelevant, keeps the code path uniform
        gap = c;
    }
    if (gap < 0.0)
        throw std::domain_error("shift must not exceed c");
    const bool singular = shape.shifted && gap == 0.0;

    double total = 0.0;
    auto atom_term = [&](double rate, double weight) {
        const double s = rate - c;
        if (singular && s == 0.0)
        {
            if (detail::numerator_at_c(f, a, c) != 0.0)
                return kInf;
            return 0.0;
        }
        return weight * detail::integrand_at(f, s, gap, a, c);
    };
    for (const auto& at : m.atoms())
        total += atom_term(at.rate, at.weight);

    const auto& tail = m.tail();
    if (!tail)
        return total;
    if (tail->nu == -1.0)
        return total + atom_term(c, tail->kappa);

    const double kappa = tail->kappa, nu = tail->nu, width = tail->width;
    const int k = shape.singular_power;
    auto weighted = [&](double s) {
        return detail::integrand_at(f, s, gap, a, c) * kappa * (nu + 1.0) * std::pow(s, nu);
    };

    double inner_end;
    double inner;
    if (singular)
    {
        const double expo = nu + 1.0 - k;
        if (expo <= 0.0)
            return kInf;
        inner_end = width * 0x1.0p-60;
        inner = kappa * (nu + 1.0) * detail::numerator_at_c(f, a, c) * std::pow(inner_end, expo) / expo;
    }
    else
    {
        const double scale = shape.shifted ? std::min(width, gap) : width;
        inner_end = scale * 0x1.0p-40;
        inner = kappa * std::pow(inner_end, nu + 1.0) * detail::integrand_at(f, 0.0, gap, a, c);
    }

    double tail_sum = inner;
    for (double lo = inner_end; lo < width;)
    {
        const double hi = std::min(2.0 * lo, width);
        tail_sum += quad::integrate(weighted, lo, hi, 1e-14, 0.0, 30);
        lo = hi;
    }
    return total + tail_sum;
}

//! Integral of a catalog integrand against m with shift parameter a <= c.
inline double measure_expectation(const RateMeasure& m, Integrand f, double a = 0.0)
{
    const auto shape = detail::shape_of(f);
    if (shape.shifted && f != Integrand::c_over_xi_minus_c && a > m.c())
        throw std::domain_error("measure_expectation: shift a must not exceed c");
    return measure_expectation_shift(m, f, a, m.c() - a);
}

//! Integral of a bounded smooth function h(xi) against m.
template <class H>
double integrate_rate_measure(const RateMeasure& m, H&& h)
{
    double total = 0.0;
    for (const auto& at : m.atoms())
        total += at.weight * h(at.rate);
    const auto& tail = m.tail();
    if (!tail)
        return total;
    if (tail->nu == -1.0)
        return total + tail->kappa * h(m.c());
    const double kappa = tail->kappa, nu = tail->nu, width = tail->width;
    auto weighted = [&](double s) { return h(m.c() + s) * kappa * (nu + 1.0) * std::pow(s, nu); };
    const double inner_end = width * 0x1.0p-40;
    total += kappa * std::pow(inner_end, nu + 1.0) * h(m.c());
    for (double lo = inner_end; lo < width;)
    {
        const double hi = std::min(2.0 * lo, width);
        total += quad::integrate(weighted, lo, hi, 1e-13, 0.0, 30);
        lo = hi;
    }
    return total;
}

//---------------------------------------------------------------------------//
// EnvironmentLaw
//---------------------------------------------------------------------------//

struct Component
{
    RowDistribution dist;
    double weight;
};

enum class EnvMode
{
    iid,
    markov,    //!< finite-state stationary chain with explicit transition matrix
};

class EnvironmentLaw
{
  public:
    static EnvironmentLaw iid(std::vector<Component> components)
    {
        EnvironmentLaw law;
        law.components_ = std::move(components);
        law.mode_ = EnvMode::iid;
        law.validate_weights();
        return law;
    }

    static EnvironmentLaw single(RowDistribution dist) { return iid({{std::move(dist), 1.0}}); }

    static EnvironmentLaw markov(std::vector<Component> components,
                                 std::vector<std::vector<double>> transition)
    {
        EnvironmentLaw law;
        law.components_ = std::move(components);
        law.mode_ = EnvMode::markov;
        law.validate_weights();
        const std::size_t n = law.components_.size();
        if (transition.size() != n)
            throw std::invalid_argument("transition matrix size must match component count");
        for (const auto& row : transition)
        {
            if (row.size() != n)
                throw std::invalid_argument("transition matrix must be square");
            double s = 0.0;
            for (double v : row)
            {
                if (!(v >= 0.0))
                    throw std::invalid_argument("transition probabilities must be nonnegative");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-10)
                throw std::invalid_argument("transition matrix must be row-stochastic");
        }
        for (std::size_t j = 0; j < n; ++j)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += law.components_[i].weight * transition[i][j];
            if (std::abs(s - law.components_[j].weight) > 1e-10)
                throw std::invalid_argument("component weights must be stationary for the transition matrix");
        }
        law.transition_ = std::move(transition);
        return law;
    }

    //! Exponential rows whose rates are i.i.d. draws from m.
    static EnvironmentLaw exponential_rates(RateMeasure m)
    {
        EnvironmentLaw law;
        law.mode_ = EnvMode::iid;
        law.rates_ = std::move(m);
        return law;
    }

    EnvMode mode() const noexcept { return mode_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }
    const std::optional<RateMeasure>& rate_measure() const noexcept { return rates_; }

    //! True if every row law is Bernoulli.
    bool is_bernoulli() const
    {
        if (rates_ || components_.empty())
            return false;
        return std::all_of(components_.begin(), components_.end(),
                           [](const Component& c) { return c.dist.as<Bernoulli>() != nullptr; });
    }

  private:
    EnvironmentLaw() = default;

    void validate_weights() const
    {
        if (components_.empty())
            throw std::invalid_argument("environment law needs at least one component");
        double s = 0.0;
        for (const auto& c : components_)
        {
            if (!(c.weight >= 0.0))
                throw std::invalid_argument("component weights must be nonnegative");
            s += c.weight;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("component weights must sum to 1");
    }

    std::vector<Component> components_;
    EnvMode mode_ = EnvMode::iid;
    std::vector<std::vector<double>> transition_;
    std::optional<RateMeasure> rates_;
};

struct EnvRealization
{
    std::vector<RowDistribution> rows;
    std::uint64_t seed = 0;
};

namespace detail {
inline std::size_t pick(const std::vector<double>& probs, double u)
{
    for (std::size_t i = 0; i < probs.size(); ++i)
    {
        if (u < probs[i])
            return i;
        u -= probs[i];
    }
    // Rounding can leave u marginally above the total; fall back to the last positive entry.
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0)
            return i;
    return probs.size() - 1;
}
} // namespace detail

//! Draw the row laws F_0, ..., F_{nRows-1}. Deterministic given the seed.
inline EnvRealization sample_environment(const EnvironmentLaw& law, std::size_t n_rows, std::uint64_t seed)
{
    if (n_rows == 0)
        throw std::invalid_argument("sample_environment needs at least one row");
    Xoshiro256 rng(seed);
    EnvRealization env;
    env.seed = seed;
    env.rows.reserve(n_rows);

    if (const auto& m = law.rate_measure())
    {
        for (std::size_t j = 0; j < n_rows; ++j)
            env.rows.push_back(RowDistribution::exponential(m->sample(rng.uniform01())));
        return env;
    }

    const auto& comps = law.components();
    std::vector<double> weights;
    for (const auto& c : comps)
        weights.push_back(c.weight);

    std::size_t state = detail::pick(weights, rng.uniform01());
    for (std::size_t j = 0; j < n_rows; ++j)
    {
        if (j > 0)
        {
            const double u = rng.uniform01();
            state = law.mode() == EnvMode::markov ? detail::pick(law.transition()[state], u)
                                                  : detail::pick(weights, u);
        }
        env.rows.push_back(comps[state].dist);
    }
    return env;
}

/*!
 * Averaged moments of the environment: mu = E mu_0 and sigma^2 = E sigma_0^2,
 * the mean of the quenched variances (not the variance of the mixture).
 */
inline MeanVar env_moments(const EnvironmentLaw& law)
{
    if (const auto& m = law.rate_measure())
        return {measure_expectation(*m, Integrand::inv_xi), measure_expectation(*m, Integrand::inv_xi_sq)};
    if (law.components().size() == 1)
        return mean_var(law.components().front().dist);
    MeanVar out;
    for (const auto& c : law.components())
    {
        const auto mv = mean_var(c.dist);
        out.mean += c.weight * mv.mean;
        out.var += c.weight * mv.var;
    }
    return out;
}

} // namespace lpp
