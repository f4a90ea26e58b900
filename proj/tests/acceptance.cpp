// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lpp/lpp.hpp"

using namespace lpp;

namespace {

namespace tol {
constexpr double corner_analytic = 1e-6;
constexpr double corner_sim_lo = 3.80, corner_sim_hi = 4.00;
constexpr double strict_x_rel = 0.02;
constexpr double root_residual = 1e-12;
constexpr double tagged_rel = 0.01;
constexpr double case1_rel = 1e-8;
constexpr double case1_slope = 1e-6;
constexpr double nu_half_lo = 0.617, nu_half_hi = 0.717;
constexpr double nu_minus_one = 0.05;
constexpr double nu_zero_rel = 0.10;
constexpr double remainder_factor = 10.0;
constexpr double comparison_z = 3.0;
constexpr double moments = 1e-12;
constexpr double beta_rel = 1e-10;
constexpr double homogeneity = 1e-10;
constexpr double continuity = 1e-8;
} // namespace tol

struct Outcome
{
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

//---------------------------------------------------------------------------//
// Generators
//---------------------------------------------------------------------------//

WeightGrid random_grid(std::mt19937_64& gen, std::size_t cols, std::size_t rows, bool signed_weights)
{
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    WeightGrid g(cols, rows);
    for (std::size_t j = 0; j < rows; ++j)
        for (std::size_t i = 0; i < cols; ++i)
            g(i, j) = signed_weights ? unif(gen) : expo(gen);
    return g;
}

BernoulliEnv random_bernoulli_env(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 4), special(0, 9);
    std::vector<BernoulliAtom> atoms;
    const int n = count(gen);
    double total = 0.0;
    for (int k = 0; k < n; ++k)
    {
        double p = unif(gen);
        const int s = special(gen);
        if (s == 0)
            p = 0.0;
        else if (s == 1 && n > 1)
            p = 1.0;
        atoms.push_back({p, 0.05 + unif(gen)});
        total += atoms.back().weight;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k)
        sum += atoms[k].weight /= total;
    atoms.back().weight = 1.0 - sum;
    return BernoulliEnv(atoms);
}

//! A row law of a random kind, and a nearby law of the same kind.
std::pair<RowDistribution, RowDistribution> random_row_pair(std::mt19937_64& gen)
{
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto nudge = [&](double v, double spread) { return v * (1.0 + spread * (2.0 * unif(gen) - 1.0)); };
    switch (kind(gen))
    {
        case 0:
        {
            const double rate = 0.5 + 1.5 * unif(gen);
            return {RowDistribution::exponential(rate), RowDistribution::exponential(nudge(rate, 0.3))};
        }
        case 1:
        {
            const double p = 0.1 + 0.8 * unif(gen);
            return {RowDistribution::bernoulli(p), RowDistribution::bernoulli(std::clamp(nudge(p, 0.3), 0.0, 1.0))};
        }
        case 2:
        {
            const double lo = -unif(gen), hi = 1.0 + unif(gen), q = 0.2 + 0.6 * unif(gen);
            return {RowDistribution::discrete({{lo, q}, {hi, 1.0 - q}}),
                    RowDistribution::discrete({{nudge(lo, 0.3), q}, {nudge(hi, 0.3), 1.0 - q}})};
        }
        default:
        {
            const double rate = 0.5 + unif(gen);
            const auto e = RowDistribution::exponential(rate);
            return {e, truncate_two_moment(e, (1.0 + 3.0 * unif(gen)) / rate)};
        }
    }
}

//---------------------------------------------------------------------------//
// Criteria
//---------------------------------------------------------------------------//

Outcome corner_analytic()
{
    const ExpDual dual(RateMeasure(1.0, {{1.0, 1.0}}));
    const double grid[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    double worst = std::abs(dual.psi(1.0, 1.0) - 4.0);
    const double at_one = worst;
    for (double x : grid)
        for (double y : grid)
        {
            const double exact = (std::sqrt(x) + std::sqrt(y)) * (std::sqrt(x) + std::sqrt(y));
            worst = std::max(worst, std::abs(dual.psi(x, y) - exact));
        }
    return {worst <= tol::corner_analytic, fmt("|psi(1,1)-4| = %.2e, max error on 25 points %.2e", at_one, worst)};
}

Outcome corner_simulated()
{
    const auto law = EnvironmentLaw::single(RowDistribution::exponential(1.0));
    const auto est = estimate_time_constant(law, 1.0, 1.0, 1500, PathGeometry::WeakWeak, 40, 2024);
    return {est.mean >= tol::corner_sim_lo && est.mean <= tol::corner_sim_hi,
            fmt("mean %.5f, stderr %.5f, want [%.2f, %.2f]", est.mean, est.std_error, tol::corner_sim_lo, tol::corner_sim_hi)};
}

Outcome oracle_equivalence()
{
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    int mismatches = 0, checked = 0;
    for (auto geo : {PathGeometry::WeakWeak, PathGeometry::StrictX, PathGeometry::StrictY})
        for (int trial = 0; trial < 100; ++trial)
        {
            const auto g = random_grid(gen, dim(gen), dim(gen), trial % 2 == 1);
            mismatches += last_passage(g, geo) != brute_force_paths(g, geo);
            ++checked;
        }
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto g = random_grid(gen, 50, 50, false);
        mismatches += tandem_queue_departures(g) != last_passage(g, PathGeometry::WeakWeak);
        ++checked;
    }
    return {mismatches == 0, fmt("%d exact comparisons, %d mismatches", checked, mismatches)};
}

Outcome strict_x_versus_simulation()
{
    const BernoulliEnv env({{0.2, 0.5}, {0.6, 0.5}});
    const auto law = EnvironmentLaw::iid({{RowDistribution::bernoulli(0.2), 0.5}, {RowDistribution::bernoulli(0.6), 0.5}});
    const auto a = psi_strict_x(env, 4.0, 1.0);
    const auto est = estimate_time_constant(law, 4.0, 1.0, 2000, PathGeometry::StrictX, 30, 4);
    const double rel = std::abs(est.mean - a.value) / a.value;
    return {rel <= tol::strict_x_rel && a.residual <= tol::root_residual,
            fmt("analytic %.6f, simulated %.6f (stderr %.1e), rel %.4f, root residual %.1e", a.value, est.mean,
                est.std_error, rel, a.residual)};
}

Outcome bernoulli_domination()
{
    std::mt19937_64 gen(105);
    std::uniform_real_distribution<double> coord(0.05, 5.0);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const auto env = random_bernoulli_env(gen);
        const double x = coord(gen), y = coord(gen);
        const auto b = bernoulli_bounds(env, x, y);
        violations += psi_strict_x(env, x, y).value > b.strict_x * (1.0 + 1e-14);
        violations += psi_strict_y(env, x, y).value > b.strict_y * (1.0 + 1e-14);
    }
    return {violations == 0, fmt("1000 random cases, %d violations", violations)};
}

Outcome tagged_speed()
{
    const auto law = EnvironmentLaw::single(RowDistribution::bernoulli(0.5));
    const double f = tagged_speed_formula(law, 1.5, PathGeometry::StrictX);
    const double v = simulate_tagged_speed(law, 1.5, 100000, 6, PathGeometry::StrictX);
    const double rel = std::abs(v - f) / f;
    return {rel <= tol::tagged_rel, fmt("simulated %.5f, formula %.5f, rel %.5f", v, f, rel)};
}

Outcome case1_boundary()
{
    const RateMeasure cube(1.0, {}, PowerTail{1.0, 2.0, 1.0});
    const ExpDual dual(cube);
    double worst = 0.0;
    for (double alpha : {1e-2, 1e-3})
    {
        const double b = boundary_psi(cube, alpha).psi;
        worst = std::max(worst, std::abs(b - dual.psi(1.0, alpha)) / b);
    }
    const double slope = (dual.psi(1.0, 1e-2) - dual.psi(1.0, 1e-3)) / (1e-2 - 1e-3);
    return {worst <= tol::case1_rel && std::abs(slope - 1.5) <= tol::case1_slope,
            fmt("max rel gap %.2e, slope %.9f", worst, slope)};
}

double log_log_slope(const ExpDual& dual, const std::vector<double>& alphas)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(alphas.size());
    for (double a : alphas)
    {
        const double lx = std::log(a), ly = std::log(dual.psi(1.0, a) - 1.0 / dual.c());
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome tail_exponent()
{
    const std::vector<double> alphas{1e-3, 1e-4, 1e-5, 1e-6};
    const double s_half = log_log_slope(ExpDual(RateMeasure(1.0, {}, PowerTail{1.0, -0.5, 1.0})), alphas);
    const double s_atom = log_log_slope(ExpDual(RateMeasure(1.0, {{1.0, 0.5}, {2.0, 0.5}})), alphas);
    const ExpDual flat(RateMeasure(1.0, {}, PowerTail{1.0, 0.0, 1.0}));
    const double a = 1e-6;
    const double ratio = (flat.psi(1.0, a) - 1.0) / (-a * std::log(a));
    const bool pass = s_half >= tol::nu_half_lo && s_half <= tol::nu_half_hi
                      && std::abs(s_atom - 0.5) <= tol::nu_minus_one && std::abs(ratio - 1.0) <= tol::nu_zero_rel;
    return {pass, fmt("slope(nu=-1/2) %.4f, slope(atom at c) %.4f, nu=0 ratio/kappa %.4f", s_half, s_atom, ratio)};
}

Outcome near_axis_remainder()
{
    const ExpDual dual(RateMeasure(1.0, {{1.0, 0.5}, {2.0, 0.5}}));
    const double mu = 0.75, sigma = std::sqrt(0.625);
    double prev = kInf;
    bool pass = true;
    std::string values;
    for (double alpha : {1e-2, 1e-3, 1e-4})
    {
        const double r = std::abs(dual.psi(alpha, 1.0) - mu - 2.0 * sigma * std::sqrt(alpha)) / std::sqrt(alpha);
        pass = pass && r < prev && r <= tol::remainder_factor * 0.5 * std::sqrt(alpha);
        prev = r;
        values += fmt(" %.3e", r);
    }
    return {pass, "r(alpha) =" + values};
}

Outcome comparison_bound_holds()
{
    std::mt19937_64 gen(110);
    std::uniform_real_distribution<double> unif(0.2, 0.8);
    const double alpha = 0.04;
    int violations = 0;
    double worst_slack = kInf;
    for (int pair = 0; pair < 20; ++pair)
    {
        const double w = unif(gen);
        const auto [f0, g0] = random_row_pair(gen);
        const auto [f1, g1] = random_row_pair(gen);
        const auto lf = EnvironmentLaw::iid({{f0, w}, {f1, 1.0 - w}});
        const auto lg = EnvironmentLaw::iid({{g0, w}, {g1, 1.0 - w}});
        const auto bound = comparison_bound(lf, lg, alpha);
        const std::uint64_t seed = 500 + pair;
        const auto sf = estimate_time_constant(lf, alpha, 1.0, 1000, PathGeometry::WeakWeak, 20, seed);
        const auto sg = estimate_time_constant(lg, alpha, 1.0, 1000, PathGeometry::WeakWeak, 20, seed);
        const double se = std::hypot(sf.std_error, sg.std_error);
        const double lhs = std::abs(sf.mean - sg.mean - bound.mean_gap);
        const double rhs = bound.term1 + bound.term2 + tol::comparison_z * se;
        violations += lhs > rhs;
        worst_slack = std::min(worst_slack, rhs - lhs);
    }
    return {violations == 0, fmt("20 law pairs, %d violations, smallest slack %.4f", violations, worst_slack)};
}

Outcome moment_machinery()
{
    std::mt19937_64 gen(111);
    std::uniform_real_distribution<double> rate(0.1, 10.0), scale(0.05, 5.0), nu_all(-1.0, 1.0), nu_neg(-1.0, 0.0);
    double worst_moment = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const double xi = rate(gen);
        const double tau = scale(gen) / xi;
        const auto mv = mean_var(truncate_two_moment(RowDistribution::exponential(xi), tau));
        worst_moment = std::max({worst_moment, std::abs(mv.mean - 1.0 / xi) * xi, std::abs(mv.var - 1.0 / (xi * xi)) * xi * xi});
    }
    double worst_beta = 0.0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const double nu = nu_all(gen);
        const double a = std::tgamma(1.0 - nu) * std::tgamma(2.0 + nu) / 2.0;
        worst_beta = std::max(worst_beta, std::abs(asymptotic_constants(nu, 1.0, 1.0).a_nu - a) / a);
        const double nu2 = nu_neg(gen);
        const double a2 = std::tgamma(-nu2) * std::tgamma(2.0 + nu2);
        worst_beta = std::max(worst_beta, std::abs(*asymptotic_constants(nu2, 1.0, 1.0).a_nu2 - a2) / a2);
    }
    return {worst_moment <= tol::moments && worst_beta <= tol::beta_rel,
            fmt("moment error %.2e (relative), series vs closed form %.2e (relative)", worst_moment, worst_beta)};
}

Outcome invariants()
{
    std::mt19937_64 gen(112);
    std::uniform_real_distribution<double> coord(0.05, 5.0), unit(0.01, 0.99);
    int failures = 0;

    // Homogeneity of the analytic shapes.
    const ExpDual dual(RateMeasure(1.0, {{1.0, 0.5}, {2.0, 0.5}}));
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto env = random_bernoulli_env(gen);
        const double x = coord(gen), y = coord(gen), c = 0.2 + 5.0 * unit(gen);
        const double vx = psi_strict_x(env, x, y).value, vy = psi_strict_y(env, x, y).value, vg = dual.psi(x, y);
        failures += std::abs(psi_strict_x(env, c * x, c * y).value - c * vx) > tol::homogeneity * std::max(1.0, c * vx);
        failures += std::abs(psi_strict_y(env, c * x, c * y).value - c * vy) > tol::homogeneity * std::max(1.0, c * vy);
        failures += std::abs(dual.psi(c * x, c * y) - c * vg) > tol::homogeneity * std::max(1.0, c * vg);
    }

    // Continuity across the branch thresholds.
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto env = random_bernoulli_env(gen);
        const double eps = 1e-10;
        const double edge = env.expect([](double p) { return p >= 1.0 ? kInf : p / (1.0 - p); });
        if (std::isfinite(edge) && env.b() > 0.0)
        {
            const double lo = psi_strict_x(env, edge * (1.0 - eps), 1.0).value;
            const double hi = psi_strict_x(env, edge * (1.0 + eps), 1.0).value;
            failures += std::abs(lo - hi) > tol::continuity * std::max(1.0, hi);
        }
        const double flat = env.expect([](double p) { return p > 0.0 ? (1.0 - p) / p : 0.0; });
        if (flat > 0.0)
        {
            const double lo = psi_strict_y(env, flat * (1.0 - eps), 1.0).value;
            const double hi = psi_strict_y(env, flat * (1.0 + eps), 1.0).value;
            failures += std::abs(lo - hi) > tol::continuity * std::max(1.0, hi);
        }
    }

    // Last-passage monotonicity, superadditivity and geometry ordering.
    std::uniform_int_distribution<std::size_t> dim(1, 15);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t k = dim(gen), l = dim(gen);
        auto g = random_grid(gen, 2 * k + 1, 2 * l + 1, false);
        const double whole = last_passage(g, PathGeometry::WeakWeak);
        WeightGrid first(k + 1, l + 1), second(k, l);
        for (std::size_t j = 0; j <= l; ++j)
            for (std::size_t i = 0; i <= k; ++i)
                first(i, j) = g(i, j);
        for (std::size_t j = 0; j < l; ++j)
            for (std::size_t i = 0; i < k; ++i)
                second(i, j) = g(k + 1 + i, l + 1 + j);
        failures += whole < last_passage(first, PathGeometry::WeakWeak) + last_passage(second, PathGeometry::WeakWeak);
        const double sx = last_passage(g, PathGeometry::StrictX), sy = last_passage(g, PathGeometry::StrictY);
        failures += sx > whole || sy > whole || whole > sx + sy;
        for (auto geo : {PathGeometry::WeakWeak, PathGeometry::StrictX, PathGeometry::StrictY})
        {
            auto h = g;
            h(k, l) += 0.5;
            failures += last_passage(h, geo) < last_passage(g, geo);
        }
    }

    // Coupled monotonicity in the row laws.
    const auto slow = EnvironmentLaw::iid({{RowDistribution::exponential(1.0), 0.5}, {RowDistribution::exponential(2.0), 0.5}});
    const auto fast = EnvironmentLaw::iid({{RowDistribution::exponential(0.8), 0.5}, {RowDistribution::exponential(1.5), 0.5}});
    for (std::uint64_t seed = 0; seed < 30; ++seed)
        for (auto geo : {PathGeometry::WeakWeak, PathGeometry::StrictX, PathGeometry::StrictY})
            failures += sample_last_passage(slow, 30, 25, geo, seed) > sample_last_passage(fast, 30, 25, geo, seed);

    return {failures == 0, fmt("%d invariant failures", failures)};
}

struct Criterion
{
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "corner-shape-analytic", corner_analytic},
        {2, "corner-shape-simulated", corner_simulated},
        {3, "oracle-equivalence", oracle_equivalence},
        {4, "strict-x-vs-simulation", strict_x_versus_simulation},
        {5, "bernoulli-bound-domination", bernoulli_domination},
        {6, "tagged-particle-speed", tagged_speed},
        {7, "case1-boundary", case1_boundary},
        {8, "tail-exponent-slopes", tail_exponent},
        {9, "near-axis-remainder", near_axis_remainder},
        {10, "comparison-bound", comparison_bound_holds},
        {11, "moment-machinery", moment_machinery},
        {12, "invariant-suites", invariants},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = c.run();
        }
        catch (const std::exception& e)
        {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %-28s %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !out.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
