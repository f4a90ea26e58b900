#pragma once

// Exact strict-weak limit shapes and closed-form upper bounds for Bernoulli
// weights in a random environment with finitely many success probabilities.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "envmodel.hpp"

namespace lpp {

struct BernoulliAtom
{
    double p;
    double weight;
};

//! Law of the row success probability p: finitely many atoms.
class BernoulliEnv
{
  public:
    explicit BernoulliEnv(std::vector<BernoulliAtom> atoms)
    {
        double total = 0.0;
        for (const auto& a : atoms)
        {
            if (!(a.p >= 0.0 && a.p <= 1.0))
                throw std::invalid_argument("bernoulli environment: p must lie in [0,1]");
            if (!(a.weight >= 0.0))
                throw std::invalid_argument("bernoulli environment: weights must be nonnegative");
            total += a.weight;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("bernoulli environment: weights must sum to 1");
        std::sort(atoms.begin(), atoms.end(),
                  [](const BernoulliAtom& l, const BernoulliAtom& r) { return l.p < r.p; });
        for (const auto& a : atoms)
        {
            if (a.weight == 0.0)
                continue;
            if (!atoms_.empty() && atoms_.back().p == a.p)
                atoms_.back().weight += a.weight;
            else
                atoms_.push_back(a);
        }
        if (atoms_.empty())
            throw std::invalid_argument("bernoulli environment needs an atom of positive weight");
        b_ = atoms_.back().p;
        for (const auto& a : atoms_)
            pbar_ += a.weight * a.p;
    }

    static BernoulliEnv from_law(const EnvironmentLaw& law)
    {
        if (!law.is_bernoulli())
            throw std::invalid_argument("environment law is not Bernoulli");
        std::vector<BernoulliAtom> atoms;
        for (const auto& c : law.components())
            atoms.push_back({c.dist.as<Bernoulli>()->p, c.weight});
        return BernoulliEnv(std::move(atoms));
    }

    const std::vector<BernoulliAtom>& atoms() const noexcept { return atoms_; }
    double b() const noexcept { return b_; }         //!< largest p in the support
    double pbar() const noexcept { return pbar_; }   //!< mean of p

    //! E h(p); an atom where h is infinite makes the whole expectation +inf.
    template <class H>
    double expect(H&& h) const
    {
        double s = 0.0;
        for (const auto& a : atoms_)
            s += a.weight * h(a.p);
        return s;
    }

  private:
    std::vector<BernoulliAtom> atoms_;
    double b_ = 0.0;
    double pbar_ = 0.0;
};

enum class ShapeBranch
{
    LinearEdge,
    Interior,
    Flat,
};

inline std::string to_string(ShapeBranch b)
{
    switch (b)
    {
        case ShapeBranch::LinearEdge: return "linear-edge";
        case ShapeBranch::Interior: return "interior";
        case ShapeBranch::Flat: return "flat";
    }
    return "unknown";
}

struct ShapeEvaluation
{
    double value = 0.0;
    ShapeBranch branch = ShapeBranch::Flat;
    std::optional<double> root_z0;
    double residual = 0.0;    //!< |x/y - defining map at root_z0| for the interior branch
};

namespace detail {

inline double ratio_or_inf(double num, double den)
{
    if (num == 0.0)
        return 0.0;
    return den == 0.0 ? kInf : num / den;
}

//! E[p(1-p)/(z-p)^2] at z = b + d.
inline double strict_x_map(const BernoulliEnv& env, double d)
{
    return env.expect([&](double p) {
        const double gap = (env.b() - p) + d;
        return p * (1.0 - p) / (gap * gap);
    });
}

//! E[p(1-p)/(z+p)^2].
inline double strict_y_map(const BernoulliEnv& env, double z)
{
    return env.expect([&](double p) { return p * (1.0 - p) / ((z + p) * (z + p)); });
}

} // namespace detail

/*!
 * Limit shape for paths taking exactly one cell per column. Three regimes in
 * r = x/y: the edge r <= E[p/(1-p)] where the value is x, an interior regime
 * with a root z0 in (b,1), and a linear regime beyond E[p(1-p)/(b-p)^2]
 * (unreachable when b carries positive mass, which it always does here).
 */
inline ShapeEvaluation psi_strict_x(const BernoulliEnv& env, double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw std::domain_error("psi_strict_x needs x, y > 0");
    const double b = env.b();
    const double r = x / y;
    ShapeEvaluation out;
    if (b == 0.0)
    {
        out.value = 0.0;
        out.branch = ShapeBranch::Flat;
        return out;
    }

    const double edge = env.expect([](double p) { return detail::ratio_or_inf(p, 1.0 - p); });
    if (r <= edge)
    {
        out.value = x;
        out.branch = ShapeBranch::LinearEdge;
        return out;
    }
    const double linear = env.expect([&](double p) { return detail::ratio_or_inf(p * (1.0 - p), (b - p) * (b - p)); });
    if (r >= linear)
    {
        out.value = b * x + y * (1.0 - b) * env.expect([&](double p) { return detail::ratio_or_inf(p, b - p); });
        out.branch = ShapeBranch::Flat;
        return out;
    }

    // The map is strictly decreasing in d = z - b, +inf at d = 0 and equal to
    // `edge` < r at d = 1 - b. Bisect on d with a relative criterion.
    double lo = 0.0, hi = 1.0 - b;
    for (int it = 0; it < 2000; ++it)
    {
        const double mid = lo == 0.0 ? 0.5 * hi : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi) || (lo > 0.0 && hi - lo <= 1e-15 * lo))
            break;
        if (detail::strict_x_map(env, mid) > r)
            lo = mid;
        else
            hi = mid;
    }
    const double res_lo = lo > 0.0 ? std::abs(detail::strict_x_map(env, lo) - r) : kInf;
    const double res_hi = std::abs(detail::strict_x_map(env, hi) - r);
    const double d = res_lo < res_hi ? lo : hi;
    const double z0 = b + d;
    const double tail = env.expect([&](double p) {
        const double gap = (b - p) + d;
        return (1.0 - p) / (gap * gap);
    });
    out.value = y * z0 * z0 * tail - y;
    out.branch = ShapeBranch::Interior;
    out.root_z0 = z0;
    out.residual = std::min(res_lo, res_hi);
    return out;
}

/*!
 * Limit shape for paths taking exactly one cell per row. Flat at y P(p > 0)
 * once r = x/y reaches E[(1-p)/p; p > 0]; otherwise a root z0 in (0, inf).
 */
inline ShapeEvaluation psi_strict_y(const BernoulliEnv& env, double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw std::domain_error("psi_strict_y needs x, y > 0");
    const double r = x / y;
    ShapeEvaluation out;
    const double positive = env.expect([](double p) { return p > 0.0 ? 1.0 : 0.0; });
    const double flat = env.expect([](double p) { return p > 0.0 ? (1.0 - p) / p : 0.0; });
    if (r >= flat)
    {
        out.value = y * positive;
        out.branch = ShapeBranch::Flat;
        return out;
    }

    // Strictly decreasing in z from `flat` at z = 0+ down to 0 at infinity.
    double hi = 1.0;
    while (detail::strict_y_map(env, hi) >= r)
        hi *= 2.0;
    double lo = hi;
    while (detail::strict_y_map(env, lo) < r)
        lo *= 0.5;
    for (int it = 0; it < 2000; ++it)
    {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi) || hi - lo <= 1e-15 * lo)
            break;
        if (detail::strict_y_map(env, mid) >= r)
            lo = mid;
        else
            hi = mid;
    }
    const double res_lo = std::abs(detail::strict_y_map(env, lo) - r);
    const double res_hi = std::abs(detail::strict_y_map(env, hi) - r);
    const double z0 = res_lo < res_hi ? lo : hi;
    const double tail = env.expect([&](double p) { return (1.0 - p) / ((z0 + p) * (z0 + p)); });
    out.value = y - y * z0 * z0 * tail;
    out.branch = ShapeBranch::Interior;
    out.root_z0 = z0;
    out.residual = std::min(res_lo, res_hi);
    return out;
}

struct BernoulliBounds
{
    double strict_x;
    double strict_y;
    double weak_weak;
    double loose;
};

//! Closed-form upper bounds in terms of b and the mean pbar only.
inline BernoulliBounds bernoulli_bounds(const BernoulliEnv& env, double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw std::domain_error("bernoulli_bounds needs x, y > 0");
    const double b = env.b(), pbar = env.pbar();
    const double xy = x * y;
    BernoulliBounds out;
    out.strict_x = b * x + 2.0 * std::sqrt(pbar * (1.0 - b) * xy);
    out.strict_y = pbar * y + 2.0 * std::sqrt(pbar * (1.0 - pbar) * xy);
    out.weak_weak = pbar * y + 4.0 * std::sqrt(pbar * (1.0 - pbar) * xy) + b * x;
    out.loose = (y + 4.0 * std::sqrt(xy)) * std::sqrt(pbar) + b * x;
    return out;
}

} // namespace lpp
