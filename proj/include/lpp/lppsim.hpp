#pragma once

// Last-passage times on finite grids, two independent oracles and the
// replicated Monte Carlo estimator of the time constant.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "envmodel.hpp"
#include "rng.hpp"

namespace lpp {

enum class PathGeometry
{
    WeakWeak,
    StrictX,    //!< exactly one cell per column, heights nondecreasing
    StrictY,    //!< exactly one cell per row, columns nondecreasing
};

inline std::string to_string(PathGeometry g)
{
    switch (g)
    {
        case PathGeometry::WeakWeak: return "weak-weak";
        case PathGeometry::StrictX: return "strict-x";
        case PathGeometry::StrictY: return "strict-y";
    }
    return "unknown";
}

inline PathGeometry parse_geometry(const std::string& s)
{
    if (s == "weak-weak" || s == "weakweak")
        return PathGeometry::WeakWeak;
    if (s == "strict-x" || s == "strictx")
        return PathGeometry::StrictX;
    if (s == "strict-y" || s == "stricty")
        return PathGeometry::StrictY;
    throw std::invalid_argument("unknown path geometry: " + s);
}

/*!
 * Weights X(i,j) with column index i in [0, cols) and row index j in
 * [0, rows). Row j is drawn from the j-th row law of the environment.
 */
class WeightGrid
{
  public:
    WeightGrid() = default;
    WeightGrid(std::size_t cols, std::size_t rows, double fill = 0.0)
        : cols_(cols), rows_(rows), data_(cols * rows, fill)
    {
    }

    std::size_t cols() const noexcept { return cols_; }
    std::size_t rows() const noexcept { return rows_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * cols_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * cols_ + i]; }

    std::span<double> row(std::size_t j) { return {data_.data() + j * cols_, cols_}; }
    std::span<const double> row(std::size_t j) const { return {data_.data() + j * cols_, cols_}; }

    std::uint64_t seed = 0;    //!< seed of the weight stream, 0 if filled by hand

  private:
    std::size_t cols_ = 0;
    std::size_t rows_ = 0;
    std::vector<double> data_;
};

//! Fill one row with quantile-coupled draws from a row law.
inline void fill_row(const RowDistribution& dist, Xoshiro256& rng, std::span<double> out)
{
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>)
            {
                const double inv = 1.0 / d.rate;
                for (auto& v : out)
                    v = -std::log1p(-rng.uniform01()) * inv;
            }
            else if constexpr (std::is_same_v<T, Bernoulli>)
            {
                const double cut = 1.0 - d.p;
                for (auto& v : out)
                    v = rng.uniform01() <= cut ? 0.0 : 1.0;
            }
            else
            {
                for (auto& v : out)
                    v = quantile(dist, rng.uniform01());
            }
        },
        dist.kind());
}

//! Weights for a realized environment, one row per row law.
inline WeightGrid sample_grid(const EnvRealization& env, std::size_t cols, std::uint64_t seed)
{
    WeightGrid grid(cols, env.rows.size());
    grid.seed = seed;
    Xoshiro256 rng(seed);
    for (std::size_t j = 0; j < env.rows.size(); ++j)
        fill_row(env.rows[j], rng, grid.row(j));
    return grid;
}

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Weak-weak recursion with the outer loop over `outer` and a rolling buffer
// of length n_inner; x(inner, outer) returns the weight.
template <class Get>
double weak_kernel(std::size_t n_inner, std::size_t n_outer, Get&& x)
{
    std::vector<double> prev(n_inner, kNegInf);
    for (std::size_t o = 0; o < n_outer; ++o)
    {
        double left = kNegInf;
        for (std::size_t in = 0; in < n_inner; ++in)
        {
            const double best = (o == 0 && in == 0) ? 0.0 : std::max(left, prev[in]);
            left = x(in, o) + best;
            prev[in] = left;
        }
    }
    return prev.back();
}

// Strict along `a`, weak along `b`; buffer indexed by a (b is the outer loop).
// B(a,b) = max(B(a,b-1), X(a,b) + B(a-1,b)), B(-1,b) = 0, B(a,-1) = -inf.
template <class Get>
double strict_buffer_a(std::size_t na, std::size_t nb, Get&& x)
{
    std::vector<double> prev(na, kNegInf);
    for (std::size_t b = 0; b < nb; ++b)
    {
        double left = 0.0;
        for (std::size_t a = 0; a < na; ++a)
        {
            const double take = x(a, b) + left;
            prev[a] = std::max(prev[a], take);
            left = prev[a];
        }
    }
    return prev.back();
}

// Same recursion with a buffer indexed by b (a is the outer loop).
template <class Get>
double strict_buffer_b(std::size_t na, std::size_t nb, Get&& x)
{
    std::vector<double> col(nb, 0.0);
    for (std::size_t a = 0; a < na; ++a)
    {
        double below = kNegInf;
        for (std::size_t b = 0; b < nb; ++b)
        {
            const double take = x(a, b) + col[b];
            below = std::max(below, take);
            col[b] = below;
        }
    }
    return col.back();
}

template <class Get>
double strict_kernel(std::size_t na, std::size_t nb, Get&& x)
{
    if (na <= nb)
        return strict_buffer_a(na, nb, x);
    return strict_buffer_b(na, nb, x);
}

} // namespace detail

/*!
 * Last-passage time from (0,0) to (cols-1, rows-1). Both endpoints are
 * included. Memory is linear in the smaller grid dimension.
 */
inline double last_passage(const WeightGrid& grid, PathGeometry geometry)
{
    if (grid.empty())
        throw std::invalid_argument("last_passage: empty grid");
    const std::size_t nc = grid.cols(), nr = grid.rows();
    switch (geometry)
    {
        case PathGeometry::WeakWeak:
            if (nc <= nr)
                return detail::weak_kernel(nc, nr, [&](std::size_t i, std::size_t j) { return grid(i, j); });
            return detail::weak_kernel(nr, nc, [&](std::size_t j, std::size_t i) { return grid(i, j); });
        case PathGeometry::StrictX:
            return detail::strict_kernel(nc, nr, [&](std::size_t i, std::size_t j) { return grid(i, j); });
        case PathGeometry::StrictY:
            return detail::strict_kernel(nr, nc, [&](std::size_t j, std::size_t i) { return grid(i, j); });
    }
    throw std::invalid_argument("unknown geometry");
}

/*!
 * Exhaustive maximization over every admissible path. Test oracle only;
 * limited to 8x8 grids.
 */
inline double brute_force_paths(const WeightGrid& grid, PathGeometry geometry)
{
    if (grid.empty())
        throw std::invalid_argument("brute_force_paths: empty grid");
    if (grid.cols() > 8 || grid.rows() > 8)
        throw std::invalid_argument("brute_force_paths: grid larger than 8x8");
    const int nc = static_cast<int>(grid.cols()), nr = static_cast<int>(grid.rows());
    double best = detail::kNegInf;

    if (geometry == PathGeometry::WeakWeak)
    {
        std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
            acc += grid(i, j);
            if (i == nc - 1 && j == nr - 1)
            {
                best = std::max(best, acc);
                return;
            }
            if (i + 1 < nc)
                walk(i + 1, j, acc);
            if (j + 1 < nr)
                walk(i, j + 1, acc);
        };
        walk(0, 0, 0.0);
        return best;
    }

    // Strict geometries: one cell per strict index, nondecreasing weak index.
    const bool along_x = geometry == PathGeometry::StrictX;
    const int n_strict = along_x ? nc : nr;
    const int n_weak = along_x ? nr : nc;
    auto at = [&](int s, int w) { return along_x ? grid(s, w) : grid(w, s); };
    std::function<void(int, int, double)> walk = [&](int s, int floor, double acc) {
        if (s == n_strict)
        {
            best = std::max(best, acc);
            return;
        }
        for (int w = floor; w < n_weak; ++w)
            walk(s + 1, w, acc + at(s, w));
    };
    walk(0, 0, 0.0);
    return best;
}

/*!
 * Discrete-event simulation of a FIFO tandem of rows() servers serving
 * cols() customers who all wait at the first server at time zero. X(i,j) is
 * the service time of customer i at server j. Returns the time the last
 * customer leaves the last server.
 */
inline double tandem_queue_departures(const WeightGrid& service)
{
    if (service.empty())
        throw std::invalid_argument("tandem_queue_departures: empty grid");
    const std::size_t customers = service.cols(), servers = service.rows();
    for (std::size_t j = 0; j < servers; ++j)
        for (double v : service.row(j))
            if (!(v >= 0.0))
                throw std::invalid_argument("tandem_queue_departures: negative service time");

    // (time, sequence, server, customer); the sequence number breaks ties deterministically.
    using Event = std::tuple<double, std::uint64_t, std::size_t, std::size_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::vector<std::queue<std::size_t>> waiting(servers);
    std::vector<bool> busy(servers, false);
    std::uint64_t seq = 0;
    double last_departure = 0.0;

    auto start_next = [&](std::size_t server, double now) {
        if (busy[server] || waiting[server].empty())
            return;
        const std::size_t cust = waiting[server].front();
        waiting[server].pop();
        busy[server] = true;
        events.emplace(now + service(cust, server), seq++, server, cust);
    };

    for (std::size_t i = 0; i < customers; ++i)
        waiting[0].push(i);
    start_next(0, 0.0);

    while (!events.empty())
    {
        const auto [t, s, server, cust] = events.top();
        events.pop();
        busy[server] = false;
        if (server + 1 < servers)
        {
            waiting[server + 1].push(cust);
            start_next(server + 1, t);
        }
        else if (cust + 1 == customers)
        {
            last_departure = t;
        }
        start_next(server, t);
    }
    return last_departure;
}

//---------------------------------------------------------------------------//
// Monte Carlo estimator
//---------------------------------------------------------------------------//

struct SimEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t replicas = 0;
    std::size_t n = 0;
    double x = 0.0;
    double y = 0.0;
    PathGeometry geometry = PathGeometry::WeakWeak;
    std::uint64_t seed = 0;
};

namespace detail {

//! Pairwise summation; the result depends only on the order of `v`.
inline double pairwise_sum(const double* v, std::size_t n)
{
    if (n <= 8)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

} // namespace detail

//! Mean and standard error of per-replica values, reduced in index order.
inline std::pair<double, double> mean_stderr(const std::vector<double>& values)
{
    const std::size_t r = values.size();
    if (r == 0)
        return {0.0, 0.0};
    const double mean = detail::pairwise_sum(values.data(), r) / static_cast<double>(r);
    if (r == 1)
        return {mean, 0.0};
    std::vector<double> sq(r);
    for (std::size_t i = 0; i < r; ++i)
        sq[i] = (values[i] - mean) * (values[i] - mean);
    const double var = detail::pairwise_sum(sq.data(), r) / static_cast<double>(r - 1);
    return {mean, std::sqrt(var / static_cast<double>(r))};
}

/*!
 * Last-passage time over a freshly sampled environment and weight field,
 * computed row by row so the grid is never stored. The environment and the
 * weights use separate substreams of `seed`, so two laws run with the same
 * seed see the same uniforms (quantile coupling).
 */
inline double sample_last_passage(const EnvironmentLaw& law, std::size_t cols, std::size_t rows,
                                  PathGeometry geometry, std::uint64_t seed)
{
    const auto env = sample_environment(law, rows, derive_seed(seed, 0));
    Xoshiro256 rng(derive_seed(seed, 1));
    std::vector<double> row(cols);
    std::vector<double> buf(cols, detail::kNegInf);

    for (std::size_t j = 0; j < rows; ++j)
    {
        fill_row(env.rows[j], rng, row);
        switch (geometry)
        {
            case PathGeometry::WeakWeak:
            {
                double left = detail::kNegInf;
                for (std::size_t i = 0; i < cols; ++i)
                {
                    const double best = (j == 0 && i == 0) ? 0.0 : std::max(left, buf[i]);
                    left = row[i] + best;
                    buf[i] = left;
                }
                break;
            }
            case PathGeometry::StrictX:
            {
                double left = 0.0;
                for (std::size_t i = 0; i < cols; ++i)
                {
                    buf[i] = std::max(buf[i], row[i] + left);
                    left = buf[i];
                }
                break;
            }
            case PathGeometry::StrictY:
            {
                // buf[i] holds the best path using rows 0..j-1 ending in a column <= i.
                double below = detail::kNegInf;
                for (std::size_t i = 0; i < cols; ++i)
                {
                    const double prev = j == 0 ? 0.0 : buf[i];
                    below = std::max(below, row[i] + prev);
                    buf[i] = below;
                }
                break;
            }
        }
    }
    return buf.back();
}

/*!
 * Estimate the time constant at (x, y) from `replicas` independent samples
 * of T(floor(n x) - 1, floor(n y) - 1) / n. Replica r uses the substream
 * derive_seed(seed, r); results do not depend on the number of threads.
 */
inline SimEstimate estimate_time_constant(const EnvironmentLaw& law, double x, double y, std::size_t n,
                                          PathGeometry geometry, std::size_t replicas, std::uint64_t seed,
                                          unsigned threads = 0)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("estimate_time_constant: x and y must be positive");
    if (replicas == 0)
        throw std::invalid_argument("estimate_time_constant: need at least one replica");
    const double nd = static_cast<double>(n);
    const auto cols = static_cast<std::size_t>(std::floor(nd * x));
    const auto rows = static_cast<std::size_t>(std::floor(nd * y));
    if (cols < 1 || rows < 1)
        throw std::invalid_argument("estimate_time_constant: n too small for (x, y)");

    std::vector<double> values(replicas);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < replicas; r = next++)
            values[r] = sample_last_passage(law, cols, rows, geometry, derive_seed(seed, r)) / nd;
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, replicas));
    if (threads <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    SimEstimate est;
    std::tie(est.mean, est.std_error) = mean_stderr(values);
    est.replicas = replicas;
    est.n = n;
    est.x = x;
    est.y = y;
    est.geometry = geometry;
    est.seed = seed;
    return est;
}

} // namespace lpp
