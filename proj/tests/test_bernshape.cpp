#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lpp/bernshape.hpp"

using namespace lpp;

namespace {

const BernoulliEnv b37({{0.3, 0.5}, {0.7, 0.5}});
const BernoulliEnv b26({{0.2, 0.5}, {0.6, 0.5}});

BernoulliEnv random_env(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 4), special(0, 9);
    std::vector<BernoulliAtom> atoms;
    double total = 0.0;
    const int n = count(gen);
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
    for (auto& a : atoms)
        a.weight /= total;
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k)
        sum += atoms[k].weight;
    atoms.back().weight = 1.0 - sum;
    return BernoulliEnv(atoms);
}

double edge_threshold(const BernoulliEnv& env)
{
    return env.expect([](double p) { return p >= 1.0 ? kInf : p / (1.0 - p); });
}

double flat_threshold(const BernoulliEnv& env)
{
    return env.expect([](double p) { return p > 0.0 ? (1.0 - p) / p : 0.0; });
}

} // namespace

TEST(BernoulliEnv, DerivedQuantities)
{
    EXPECT_EQ(b37.b(), 0.7);
    EXPECT_DOUBLE_EQ(b37.pbar(), 0.5);
    const auto law = EnvironmentLaw::iid({{RowDistribution::bernoulli(0.3), 0.25},
                                          {RowDistribution::bernoulli(0.3), 0.25},
                                          {RowDistribution::bernoulli(0.9), 0.5}});
    const auto env = BernoulliEnv::from_law(law);
    ASSERT_EQ(env.atoms().size(), 2u);
    EXPECT_DOUBLE_EQ(env.atoms()[0].weight, 0.5);
    EXPECT_THROW(BernoulliEnv({{0.3, 0.5}}), std::invalid_argument);
    EXPECT_THROW(BernoulliEnv({{1.3, 1.0}}), std::invalid_argument);
    EXPECT_THROW(BernoulliEnv::from_law(EnvironmentLaw::single(RowDistribution::exponential(1.0))),
                 std::invalid_argument);
}

TEST(PsiStrictX, LinearEdge)
{
    EXPECT_NEAR(edge_threshold(b37), 0.5 * (3.0 / 7.0 + 7.0 / 3.0), 1e-15);
    const auto r = psi_strict_x(b37, 1.0, 1.0);
    EXPECT_EQ(r.value, 1.0);
    EXPECT_EQ(r.branch, ShapeBranch::LinearEdge);
    EXPECT_FALSE(r.root_z0);
}

TEST(PsiStrictX, InteriorRoot)
{
    const auto r = psi_strict_x(b26, 4.0, 1.0);
    EXPECT_EQ(r.branch, ShapeBranch::Interior);
    ASSERT_TRUE(r.root_z0);
    EXPECT_GT(*r.root_z0, 0.6);
    EXPECT_LT(*r.root_z0, 1.0);
    const double z = *r.root_z0;
    const double map = b26.expect([&](double p) { return p * (1.0 - p) / ((z - p) * (z - p)); });
    EXPECT_LE(std::abs(map - 4.0), 1e-12);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_GT(r.value, 4.0 * 0.6);
    EXPECT_LT(r.value, bernoulli_bounds(b26, 4.0, 1.0).strict_x);
}

TEST(PsiStrictX, NoSuccessesGivesZero)
{
    const BernoulliEnv zero({{0.0, 1.0}});
    EXPECT_EQ(psi_strict_x(zero, 2.0, 1.0).value, 0.0);
    EXPECT_THROW(psi_strict_x(b37, 0.0, 1.0), std::domain_error);
}

TEST(PsiStrictY, FlatBranch)
{
    const auto r = psi_strict_y(b37, 2.0, 1.0);
    EXPECT_EQ(r.value, 1.0);
    EXPECT_EQ(r.branch, ShapeBranch::Flat);
    const BernoulliEnv ones({{1.0, 1.0}});
    for (double x : {0.01, 1.0, 50.0})
        for (double y : {0.1, 3.0})
            EXPECT_EQ(psi_strict_y(ones, x, y).value, y);
}

TEST(PsiStrictY, InteriorRoot)
{
    EXPECT_NEAR(flat_threshold(b37), 0.5 * (7.0 / 3.0 + 3.0 / 7.0), 1e-15);
    const auto r = psi_strict_y(b37, 1.0, 1.0);
    EXPECT_EQ(r.branch, ShapeBranch::Interior);
    ASSERT_TRUE(r.root_z0);
    const double z = *r.root_z0;
    const double map = b37.expect([&](double p) { return p * (1.0 - p) / ((z + p) * (z + p)); });
    EXPECT_LE(std::abs(map - 1.0), 1e-12);
    EXPECT_GT(r.value, 0.0);
    EXPECT_LT(r.value, 1.0);
}

TEST(PsiStrictY, ZeroAtomCapsFlatValue)
{
    // A row with p = 0 can never be collected; the flat value is y P(p > 0).
    const BernoulliEnv env({{0.0, 0.25}, {0.5, 0.75}});
    const auto r = psi_strict_y(env, 10.0, 2.0);
    EXPECT_EQ(r.branch, ShapeBranch::Flat);
    EXPECT_DOUBLE_EQ(r.value, 1.5);
}

TEST(BernoulliBoundsTest, Examples)
{
    const BernoulliEnv zero({{0.0, 1.0}});
    const auto z = bernoulli_bounds(zero, 1.3, 0.7);
    EXPECT_EQ(z.strict_x, 0.0);
    EXPECT_EQ(z.strict_y, 0.0);
    EXPECT_EQ(z.weak_weak, 0.0);
    EXPECT_EQ(z.loose, 0.0);

    const auto b = bernoulli_bounds(b37, 1.0, 1.0);
    EXPECT_NEAR(b.strict_x, 0.7 + 2.0 * std::sqrt(0.15), 1e-15);
    EXPECT_NEAR(b.strict_x, 1.47460, 5e-6);
    EXPECT_NEAR(b.weak_weak, 3.2, 1e-15);
    EXPECT_LE(b.weak_weak, b.loose);
}

TEST(BernoulliShapes, Homogeneous)
{
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> coord(0.05, 5.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto env = random_env(gen);
        const double x = coord(gen), y = coord(gen);
        const double vx = psi_strict_x(env, x, y).value;
        const double vy = psi_strict_y(env, x, y).value;
        for (double c : {0.5, 2.0, 7.0})
        {
            EXPECT_NEAR(psi_strict_x(env, c * x, c * y).value, c * vx, 1e-10 * std::max(1.0, c * vx));
            EXPECT_NEAR(psi_strict_y(env, c * x, c * y).value, c * vy, 1e-10 * std::max(1.0, c * vy));
        }
    }
}

TEST(BernoulliShapes, ContinuousAcrossBranches)
{
    std::mt19937_64 gen(32);
    const double eps = 1e-10;
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
        const auto env = random_env(gen);
        const double y = 1.0;
        const double edge = edge_threshold(env);
        if (std::isfinite(edge) && env.b() > 0.0)
        {
            const auto below = psi_strict_x(env, edge * (1.0 - eps), y);
            const auto above = psi_strict_x(env, edge * (1.0 + eps), y);
            EXPECT_EQ(below.branch, ShapeBranch::LinearEdge);
            EXPECT_EQ(above.branch, ShapeBranch::Interior);
            EXPECT_NEAR(below.value, above.value, 1e-8 * std::max(1.0, above.value));
            ++checked;
        }
        const double flat = flat_threshold(env);
        if (flat > 0.0)
        {
            const auto below = psi_strict_y(env, flat * (1.0 - eps), y);
            const auto above = psi_strict_y(env, flat * (1.0 + eps), y);
            EXPECT_EQ(below.branch, ShapeBranch::Interior);
            EXPECT_EQ(above.branch, ShapeBranch::Flat);
            EXPECT_NEAR(below.value, above.value, 1e-8 * std::max(1.0, above.value));
            ++checked;
        }
    }
    EXPECT_GT(checked, 300);
}

TEST(BernoulliShapes, MidpointConcaveAlongSegments)
{
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    for (int trial = 0; trial < 300; ++trial)
    {
        const auto env = random_env(gen);
        const double s1 = unif(gen), s2 = unif(gen), sm = 0.5 * (s1 + s2);
        for (auto shape : {psi_strict_x, psi_strict_y})
        {
            const double f1 = shape(env, s1, 1.0 - s1).value;
            const double f2 = shape(env, s2, 1.0 - s2).value;
            const double fm = shape(env, sm, 1.0 - sm).value;
            EXPECT_GE(fm, 0.5 * (f1 + f2) - 1e-10);
        }
    }
}

TEST(BernoulliShapes, BoundsDominateAndRootsResolve)
{
    std::mt19937_64 gen(34);
    std::uniform_real_distribution<double> coord(0.05, 5.0);
    for (int trial = 0; trial < 1000; ++trial)
    {
        const auto env = random_env(gen);
        const double x = coord(gen), y = coord(gen);
        const auto sx = psi_strict_x(env, x, y);
        const auto sy = psi_strict_y(env, x, y);
        const auto bd = bernoulli_bounds(env, x, y);
        EXPECT_LE(sx.value, bd.strict_x * (1.0 + 1e-14));
        EXPECT_LE(sy.value, bd.strict_y * (1.0 + 1e-14));
        EXPECT_LE(bd.weak_weak, bd.loose * (1.0 + 1e-14));
        for (const auto* r : {&sx, &sy})
        {
            if (r->branch == ShapeBranch::Interior)
            {
                EXPECT_LE(r->residual, 1e-12);
            }
        }
    }
}
