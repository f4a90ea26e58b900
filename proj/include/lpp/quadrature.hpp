#pragma once

#include <array>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lpp::quad {

//! Nodes and weights of an N-point Gauss-Legendre rule on [-1,1].
template <std::size_t N>
struct GaussLegendre
{
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussLegendre()
    {
        for (std::size_t i = 0; i < (N + 1) / 2; ++i)
        {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75)
                                / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter)
            {
                double p0 = 1.0, p1 = 0.0;
                for (std::size_t j = 1; j <= N; ++j)
                {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
                }
                dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16)
                    break;
            }
            x[i] = -z;
            x[N - 1 - i] = z;
            w[i] = w[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

inline const GaussLegendre<20>& gl20()
{
    static const GaussLegendre<20> rule;
    return rule;
}

template <class F>
double gauss20(F&& f, double a, double b)
{
    const auto& rule = gl20();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
        sum += rule.w[i] * f(mid + half * rule.x[i]);
    return sum * half;
}

namespace detail {
struct Panel
{
    double a, b, value, err;
    int depth;
    bool operator<(const Panel& o) const { return err < o.err; }
};

inline Panel make_panel(auto& f, double a, double b, int depth)
{
    const double mid = 0.5 * (a + b);
    const double whole = gauss20(f, a, b);
    const double both = gauss20(f, a, mid) + gauss20(f, mid, b);
    double err = std::abs(both - whole);
    if (!std::isfinite(err))
        err = std::numeric_limits<double>::infinity();
    return {a, b, both, err, depth};
}
} // namespace detail

/*!
 * Globally adaptive 20-point Gauss-Legendre on [a,b]. The panel with the
 * largest error estimate (single panel vs. its two halves) is split until the
 * summed estimate is within max(atol, rtol*|I|), no panel can be split
 * further, or max_panels is reached.
 */
template <class F>
double integrate(F&& f, double a, double b, double rtol = 1e-13, double atol = 0.0,
                 int max_depth = 50, std::size_t max_panels = 4000)
{
    if (a == b)
        return 0.0;
    std::priority_queue<detail::Panel> open;
    std::vector<detail::Panel> done;
    open.push(detail::make_panel(f, a, b, 0));
    auto totals = [&] {
        double value = 0.0, err = 0.0;
        for (const auto& p : done)
            value += p.value, err += p.err;
        auto copy = open;
        for (; !copy.empty(); copy.pop())
            value += copy.top().value, err += copy.top().err;
        return std::pair{value, err};
    };
    double value = open.top().value, err = open.top().err;
    while (!open.empty() && !(err <= std::max(atol, rtol * std::abs(value)))
           && open.size() + done.size() < max_panels)
    {
        const auto p = open.top();
        open.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (p.depth >= max_depth || !(mid > p.a && mid < p.b))
        {
            done.push_back(p);
            continue;
        }
        const auto left = detail::make_panel(f, p.a, mid, p.depth + 1);
        const auto right = detail::make_panel(f, mid, p.b, p.depth + 1);
        value += left.value + right.value - p.value;
        err += left.err + right.err - p.err;
        open.push(left);
        open.push(right);
        // Running sums drift when errors span many magnitudes; refresh now and then.
        if ((open.size() + done.size()) % 256 == 0)
            std::tie(value, err) = totals();
    }
    return totals().first;
}

/*!
 * Integral over [a, inf) through x = a + t/(1-t). The integrand must decay
 * fast enough for the transformed integrand to stay bounded near t = 1.
 */
template <class F>
double integrate_to_infinity(F&& f, double a, double rtol = 1e-12, double atol = 1e-15)
{
    auto g = [&](double t) {
        if (t >= 1.0)
            return 0.0;
        const double s = 1.0 - t;
        const double v = f(a + t / s);
        return v / (s * s);
    };
    return integrate(g, 0.0, 1.0, rtol, atol, 60);
}

} // namespace lpp::quad
