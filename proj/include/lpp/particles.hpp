#pragma once

// Discrete-time particle systems dual to strict-weak last-passage times in a
// Bernoulli environment, and the tagged-particle speed estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "envmodel.hpp"
#include "lppsim.hpp"
#include "rng.hpp"

namespace lpp {

using Site = std::int64_t;

/*!
 * One step of the strict-x system. `z` holds particle positions in label
 * order (z[0] leftmost, strictly increasing). `boundary` is the new position
 * of z[0], which summarizes everything to the left of the window; `marks` are
 * the sorted marked sites of the current row that lie above `boundary`.
 *
 * Particle k moves to the (k-i)-th mark after z[i] when that is smaller
 * than z[k], minimized over i < k.
 */
inline void step_strict_x(std::vector<Site>& z, Site boundary, const std::vector<Site>& marks)
{
    const std::size_t n = z.size();
    if (n == 0)
        return;
    // best = min over i < k of (r_i - i), r_i = index of the first mark > z[i].
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::size_t r = 0;
    const auto n_marks = static_cast<std::int64_t>(marks.size());
    for (std::size_t k = 0; k < n; ++k)
    {
        const Site old = z[k];
        if (k > 0 && best != std::numeric_limits<std::int64_t>::max())
        {
            const std::int64_t idx = static_cast<std::int64_t>(k) - 1 + best;
            if (idx < n_marks)
                z[k] = std::min(z[k], marks[static_cast<std::size_t>(idx)]);
        }
        const Site pos = k == 0 ? boundary : old;
        while (r < marks.size() && marks[r] <= pos)
            ++r;
        best = std::min(best, static_cast<std::int64_t>(r) - static_cast<std::int64_t>(k));
        if (k == 0)
            z[0] = boundary;
    }
}

/*!
 * One step of the strict-y system. Particle k moves to the first mark at or
 * after the old position of particle k-1 when that is smaller than z[k].
 * `boundary` is the new position of z[0]; `marks` are sorted.
 */
inline void step_strict_y(std::vector<Site>& z, Site boundary, const std::vector<Site>& marks)
{
    const std::size_t n = z.size();
    if (n == 0)
        return;
    Site prev_old = z[0];
    z[0] = boundary;
    std::size_t r = 0;
    for (std::size_t k = 1; k < n; ++k)
    {
        while (r < marks.size() && marks[r] < prev_old)
            ++r;
        prev_old = z[k];
        if (r < marks.size())
            z[k] = std::min(z[k], marks[r]);
    }
}

//! How the leftmost particle of the finite window moves.
enum class WindowBoundary
{
    Stationary,    //!< i.i.d. jumps from the stationary single-step law
    Frozen,        //!< never moves: the window is the whole system
};

struct TaggedSpeedOptions
{
    std::size_t max_window = 1024;
    WindowBoundary boundary = WindowBoundary::Stationary;
    //! Particles left of the tag; 0 means min(steps + 10, max_window).
    std::size_t window = 0;
};

namespace detail {

//! Marked sites in (lo, hi], each marked independently with probability p.
inline void sample_marks(Xoshiro256& rng, double p, Site lo, Site hi, std::vector<Site>& out)
{
    out.clear();
    if (p <= 0.0 || hi <= lo)
        return;
    if (p >= 1.0)
    {
        for (Site s = lo + 1; s <= hi; ++s)
            out.push_back(s);
        return;
    }
    Site s = lo + 1 + static_cast<Site>(rng.geometric0(p));
    while (s <= hi)
    {
        out.push_back(s);
        s += 1 + static_cast<Site>(rng.geometric0(p));
    }
}

inline std::vector<double> bernoulli_params(const EnvironmentLaw& law)
{
    if (!law.is_bernoulli())
        throw std::invalid_argument("tagged-particle simulation needs a Bernoulli environment");
    std::vector<double> ps;
    for (const auto& c : law.components())
        if (c.weight > 0.0)
            ps.push_back(c.dist.as<Bernoulli>()->p);
    return ps;
}

} // namespace detail

/*!
 * Estimate the speed f(u) of the tagged particle z_0 started from the
 * stationary gap distribution with mean u: returns -z_0(steps)/steps.
 *
 * Only particles to the left of the tag can influence it, so the window holds
 * the tag and min(steps + 10, max_window) particles to its left.
 */
inline double simulate_tagged_speed(const EnvironmentLaw& law, double u, std::size_t steps,
                                    std::uint64_t seed, PathGeometry variant,
                                    TaggedSpeedOptions opts = {})
{
    const auto ps = detail::bernoulli_params(law);
    const double b = *std::max_element(ps.begin(), ps.end());
    if (variant == PathGeometry::StrictX)
    {
        if (!(u >= 1.0) || !(u * b < 1.0))
            throw std::domain_error("strict-x tagged speed needs 1 <= u < 1/b");
    }
    else if (variant == PathGeometry::StrictY)
    {
        if (!(u >= 0.0) || !std::isfinite(u))
            throw std::domain_error("strict-y tagged speed needs u >= 0");
    }
    else
    {
        throw std::invalid_argument("tagged-particle simulation is defined for strict geometries only");
    }
    if (steps == 0)
        throw std::invalid_argument("need at least one step");

    const std::size_t left = opts.window > 0 ? opts.window : std::min(steps + 10, opts.max_window);
    const std::size_t n = left + 1;
    const bool strict_x = variant == PathGeometry::StrictX;

    Xoshiro256 init_rng(derive_seed(seed, 0));
    Xoshiro256 row_rng(derive_seed(seed, 1));
    Xoshiro256 edge_rng(derive_seed(seed, 2));
    const auto env = sample_environment(law, steps, derive_seed(seed, 3));

    // Stationary gaps, built leftward from the tag at the origin.
    std::vector<Site> z(n);
    z[n - 1] = 0;
    for (std::size_t k = n - 1; k-- > 0;)
    {
        Site gap;
        if (strict_x)
            gap = 1 + static_cast<Site>(init_rng.geometric0(1.0 / u));
        else
            gap = static_cast<Site>(init_rng.geometric0(1.0 / (1.0 + u)));
        z[k] = z[k + 1] - gap;
    }

    std::vector<Site> marks;
    for (std::size_t t = 0; t < steps; ++t)
    {
        const double p = env.rows[t].as<Bernoulli>()->p;
        Site jump = 0;
        if (opts.boundary == WindowBoundary::Stationary)
        {
            if (strict_x)
            {
                const double q = 1.0 - p;
                const double stay = q > 0.0 ? (1.0 - u * p) / q : 1.0;
                if (edge_rng.uniform01() >= stay)
                {
                    const double ratio = (u - 1.0) / (u * q);
                    jump = 1 + static_cast<Site>(edge_rng.geometric0(1.0 - ratio));
                }
            }
            else
            {
                const double stay = 1.0 / (1.0 + u * p);
                if (edge_rng.uniform01() >= stay)
                    jump = 1 + static_cast<Site>(edge_rng.geometric0(1.0 / (1.0 + u)));
            }
        }
        const Site boundary = z[0] - jump;
        if (strict_x)
        {
            detail::sample_marks(row_rng, p, boundary, z[n - 1], marks);
            step_strict_x(z, boundary, marks);
        }
        else
        {
            detail::sample_marks(row_rng, p, z[0] - 1, z[n - 1] - 1, marks);
            step_strict_y(z, boundary, marks);
        }
    }
    return -static_cast<double>(z[n - 1]) / static_cast<double>(steps);
}

//! Closed-form stationary speed of the tagged particle.
inline double tagged_speed_formula(const EnvironmentLaw& law, double u, PathGeometry variant)
{
    double f = 0.0;
    for (const auto& c : law.components())
    {
        const auto* ber = c.dist.as<Bernoulli>();
        if (!ber)
            throw std::invalid_argument("speed formula needs a Bernoulli environment");
        const double p = ber->p;
        if (variant == PathGeometry::StrictX)
            f += c.weight * p * u * (u - 1.0) / (1.0 - u * p);
        else
            f += c.weight * u * (u + 1.0) * p / (1.0 + u * p);
    }
    return f;
}

} // namespace lpp
