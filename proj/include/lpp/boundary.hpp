#pragma once

// Boundary expansions of the time constant for general row laws, the
// comparison bound between two environments and the tail-assumption checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "envmodel.hpp"
#include "quadrature.hpp"

namespace lpp {

//! Two-term expansion mu + 2 sigma sqrt(alpha) of Psi(alpha, 1).
inline double psi_near_y_axis(const EnvironmentLaw& law, double alpha)
{
    if (!(alpha > 0.0))
        throw std::domain_error("psi_near_y_axis needs alpha > 0");
    const auto mv = env_moments(law);
    if (!std::isfinite(mv.var))
        throw std::domain_error("psi_near_y_axis needs a finite variance");
    return mv.mean + 2.0 * std::sqrt(mv.var) * std::sqrt(alpha);
}

struct XAxisBounds
{
    double lower = 0.0;
    double upper = 0.0;
    double mu_star = 0.0;
    std::size_t max_state = 0;    //!< component index realizing the largest mean
    bool tie = false;             //!< more than one component attains the largest mean
};

//! Rewrite an atom-only rate-measure law as a finite mixture of exponentials.
inline EnvironmentLaw as_mixture(const EnvironmentLaw& law)
{
    const auto& m = law.rate_measure();
    if (!m)
        return law;
    if (m->tail() && m->tail()->nu > -1.0)
        throw std::invalid_argument("law has a continuous rate density; no finite-state form");
    std::vector<Component> comps;
    if (m->tail())
        comps.push_back({RowDistribution::exponential(m->c()), m->tail()->kappa});
    for (const auto& a : m->atoms())
        comps.push_back({RowDistribution::exponential(a.rate), a.weight});
    return EnvironmentLaw::iid(std::move(comps));
}

/*!
 * Bounds for Psi(1, alpha) over a finite-state environment:
 * upper = mu* + 2 sqrt(alpha) sum_l sigma(H_l), and the thinning lower bound
 * mu* + 2 sigma(H_i*) sqrt(w_i* alpha) that keeps only the rows of a
 * maximal-mean state.
 */
inline XAxisBounds psi_near_x_axis_bounds(const EnvironmentLaw& law_in, double alpha)
{
    if (!(alpha > 0.0))
        throw std::domain_error("psi_near_x_axis_bounds needs alpha > 0");
    const auto law = as_mixture(law_in);
    const auto& comps = law.components();
    XAxisBounds out;
    out.mu_star = -kInf;
    double sigma_sum = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i)
    {
        if (comps[i].weight <= 0.0)
            continue;
        const auto mv = mean_var(comps[i].dist);
        sigma_sum += std::sqrt(mv.var);
        if (mv.mean > out.mu_star)
        {
            out.mu_star = mv.mean;
            out.max_state = i;
            out.tie = false;
        }
        else if (mv.mean == out.mu_star)
        {
            out.tie = true;
        }
    }
    const double sigma_star = std::sqrt(mean_var(comps[out.max_state].dist).var);
    const double root = std::sqrt(alpha);
    out.upper = out.mu_star + 2.0 * root * sigma_sum;
    out.lower = out.mu_star + 2.0 * sigma_star * std::sqrt(comps[out.max_state].weight) * root;
    return out;
}

struct ComparisonBound
{
    double alpha = 0.0;
    double term1 = 0.0;      //!< 8 sqrt(alpha) int (E|G_0 - F_0|)^{1/2} dx
    double term2 = 0.0;      //!< alpha int esssup |F_0 - G_0| dx
    double mean_gap = 0.0;   //!< mu_F - mu_G
    bool aligned = false;    //!< components paired index by index rather than independently
};

namespace detail {

//! Coupled pairs (F_i, G_j, probability) of the time-zero row laws.
struct CoupledPair
{
    const RowDistribution* f;
    const RowDistribution* g;
    double prob;
};

inline std::vector<CoupledPair> couple(const EnvironmentLaw& lf, const EnvironmentLaw& lg, bool& aligned)
{
    const auto& cf = lf.components();
    const auto& cg = lg.components();
    std::vector<CoupledPair> pairs;
    aligned = cf.size() == cg.size();
    for (std::size_t i = 0; aligned && i < cf.size(); ++i)
        aligned = cf[i].weight == cg[i].weight;
    if (aligned)
    {
        for (std::size_t i = 0; i < cf.size(); ++i)
            if (cf[i].weight > 0.0)
                pairs.push_back({&cf[i].dist, &cg[i].dist, cf[i].weight});
        return pairs;
    }
    for (const auto& a : cf)
        for (const auto& b : cg)
            if (a.weight * b.weight > 0.0)
                pairs.push_back({&a.dist, &b.dist, a.weight * b.weight});
    return pairs;
}

/*!
 * Integral of f over [lo, inf) when f is smooth between consecutive
 * breakpoints. Past the last breakpoint f must decay (it is integrated to
 * infinity only when `unbounded` is set, otherwise assumed to vanish).
 */
template <class F>
double integrate_piecewise(F&& f, std::vector<double> points, bool unbounded, double lo, double hi)
{
    points.push_back(lo);
    points.push_back(hi);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
    {
        const double a = points[k], b = points[k + 1];
        if (a < lo || b > hi || !(b > a) || !std::isfinite(b))
            continue;
        total += quad::integrate(f, a, b, 1e-12, 1e-16, 40);
    }
    if (unbounded && std::isinf(hi))
        total += quad::integrate_to_infinity(f, std::max(lo, points[points.size() - 2]));
    return total;
}

} // namespace detail

/*!
 * The two error terms bounding |Psi_F(alpha,1) - Psi_G(alpha,1) - (mu_F - mu_G)|.
 * Environments are coupled component by component when both laws list the
 * same weights in the same order, and independently otherwise.
 */
inline ComparisonBound comparison_bound(const EnvironmentLaw& law_f, const EnvironmentLaw& law_g, double alpha)
{
    if (!(alpha > 0.0))
        throw std::domain_error("comparison_bound needs alpha > 0");
    const auto lf = as_mixture(law_f);
    const auto lg = as_mixture(law_g);
    ComparisonBound out;
    out.alpha = alpha;
    out.mean_gap = env_moments(lf).mean - env_moments(lg).mean;
    const auto pairs = detail::couple(lf, lg, out.aligned);

    std::vector<double> points;
    bool unbounded = false;
    for (const auto& p : pairs)
    {
        for (const auto* d : {p.f, p.g})
        {
            const auto b = d->breakpoints();
            points.insert(points.end(), b.begin(), b.end());
            unbounded = unbounded || d->unbounded_above();
        }
    }
    const double lo = *std::min_element(points.begin(), points.end());
    const double hi = unbounded ? kInf : *std::max_element(points.begin(), points.end());

    // Tails are differenced through the survival function to avoid cancellation.
    auto gap = [](const RowDistribution* a, const RowDistribution* b, double x) {
        return x > 0.0 ? std::abs(a->survival(x) - b->survival(x)) : std::abs(a->cdf(x) - b->cdf(x));
    };
    auto mean_abs = [&](double x) {
        double s = 0.0;
        for (const auto& p : pairs)
            s += p.prob * gap(p.g, p.f, x);
        return std::sqrt(s);
    };
    auto sup_abs = [&](double x) {
        double s = 0.0;
        for (const auto& p : pairs)
            s = std::max(s, gap(p.f, p.g, x));
        return s;
    };
    out.term1 = 8.0 * std::sqrt(alpha) * detail::integrate_piecewise(mean_abs, points, unbounded, lo, hi);
    out.term2 = alpha * detail::integrate_piecewise(sup_abs, points, unbounded, lo, hi);
    return out;
}

struct AssumptionCheck
{
    std::string name;
    std::string description;
    double value = 0.0;
    bool pass = false;
};

struct AssumptionReport
{
    std::vector<AssumptionCheck> checks;
    bool all_pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
    }
};

namespace detail {

inline AssumptionReport make_report(double first_moment, double right_mean, double right_sup, double left_mean,
                                    double left_sup)
{
    AssumptionReport r;
    auto add = [&](std::string name, std::string desc, double v) {
        r.checks.push_back({std::move(name), std::move(desc), v, std::isfinite(v)});
    };
    add("first-moment", "E|X| < inf", first_moment);
    add("right-tail-mean", "int_0^inf (1 - E F_0(x))^{1/2} dx < inf", right_mean);
    add("right-tail-sup", "int_0^inf esssup (1 - F_0(x)) dx < inf", right_sup);
    add("left-tail-mean", "int_-inf^0 (E F_0(x))^{1/2} dx < inf", left_mean);
    add("left-tail-sup", "int_-inf^0 esssup F_0(x) dx < inf", left_sup);
    return r;
}

inline double abs_first_moment(const RowDistribution& d)
{
    if (const auto* fd = d.as<FiniteDiscrete>())
    {
        double s = 0.0;
        for (const auto& a : fd->atoms)
            s += a.prob * std::abs(a.value);
        return s;
    }
    return mean_var(d).mean;    // remaining kinds are nonnegative
}

} // namespace detail

/*!
 * Exponential rows with rates drawn from finitely many values. Rates may be
 * zero here (degenerate rows), which is the standard way the right-tail
 * conditions fail.
 */
inline AssumptionReport check_exponential_rates(const std::vector<RateAtom>& rates)
{
    double min_rate = kInf, first = 0.0, total = 0.0;
    for (const auto& r : rates)
    {
        if (!(r.rate >= 0.0) || !(r.weight >= 0.0))
            throw std::invalid_argument("rates and weights must be nonnegative");
        if (r.weight == 0.0)
            continue;
        min_rate = std::min(min_rate, r.rate);
        first += r.weight / r.rate;
        total += r.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("rate weights must sum to 1");
    double right_mean = kInf;
    if (min_rate > 0.0)
    {
        auto f = [&](double x) {
            double s = 0.0;
            for (const auto& r : rates)
                s += r.weight * std::exp(-r.rate * x);
            return std::sqrt(s);
        };
        right_mean = quad::integrate_to_infinity(f, 0.0);
    }
    const double right_sup = min_rate > 0.0 ? 1.0 / min_rate : kInf;
    return detail::make_report(first, right_mean, right_sup, 0.0, 0.0);
}

//! Evaluate the moment and tail conditions on the time-zero row law.
inline AssumptionReport check_assumptions(const EnvironmentLaw& law)
{
    if (const auto& m = law.rate_measure())
    {
        auto f = [&](double x) {
            return std::sqrt(integrate_rate_measure(*m, [x](double xi) { return std::exp(-xi * x); }));
        };
        const double right_mean = quad::integrate_to_infinity(f, 0.0);
        return detail::make_report(env_moments(law).mean, right_mean, 1.0 / m->c(), 0.0, 0.0);
    }

    const auto& comps = law.components();
    std::vector<double> points{0.0};
    bool unbounded = false;
    double first = 0.0;
    for (const auto& c : comps)
    {
        if (c.weight <= 0.0)
            continue;
        const auto b = c.dist.breakpoints();
        points.insert(points.end(), b.begin(), b.end());
        unbounded = unbounded || c.dist.unbounded_above();
        first += c.weight * detail::abs_first_moment(c.dist);
    }
    const double lo = *std::min_element(points.begin(), points.end());
    const double hi = unbounded ? kInf : *std::max_element(points.begin(), points.end());

    auto mean_cdf = [&](double x) {
        double s = 0.0;
        for (const auto& c : comps)
            s += c.weight * c.dist.cdf(x);
        return s;
    };
    auto sup_survival = [&](double x) {
        double s = 0.0;
        for (const auto& c : comps)
            if (c.weight > 0.0)
                s = std::max(s, c.dist.survival(x));
        return s;
    };
    auto sup_cdf = [&](double x) {
        double s = 0.0;
        for (const auto& c : comps)
            if (c.weight > 0.0)
                s = std::max(s, c.dist.cdf(x));
        return s;
    };
    auto mean_survival = [&](double x) {
        double s = 0.0;
        for (const auto& c : comps)
            s += c.weight * c.dist.survival(x);
        return s;
    };
    const double right_mean = detail::integrate_piecewise(
        [&](double x) { return std::sqrt(mean_survival(x)); }, points, unbounded, 0.0, hi);
    const double right_sup = detail::integrate_piecewise(sup_survival, points, unbounded, 0.0, hi);
    double left_mean = 0.0, left_sup = 0.0;
    if (lo < 0.0)
    {
        left_mean = detail::integrate_piecewise([&](double x) { return std::sqrt(mean_cdf(x)); }, points, false, lo, 0.0);
        left_sup = detail::integrate_piecewise(sup_cdf, points, false, lo, 0.0);
    }
    return detail::make_report(first, right_mean, right_sup, left_mean, left_sup);
}

} // namespace lpp
