// Command-line front end: simulation, analytic shapes, comparisons and
// assumption checks, with CSV or JSON output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpp/json_io.hpp"
#include "lpp/lpp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using lpp::io::ConfigError;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int
{
    kOk = 0,
    kConfig = 2,
    kAssumption = 3,
    kWindow = 4,
    kTolerance = 5,
};

struct AssumptionFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Parameters: config file values overlaid by flags; every read is recorded.
//---------------------------------------------------------------------------//

class Params
{
  public:
    json cfg = json::object();
    fs::path base = fs::current_path();
    json used = json::object();

    bool has(const std::string& key) const { return cfg.contains(key) && !cfg.at(key).is_null(); }

    template <class T>
    void overlay(const std::string& key, const std::optional<T>& flag)
    {
        if (flag)
            cfg[key] = *flag;
    }

    void overlay(const std::string& key, const std::vector<double>& flag)
    {
        if (!flag.empty())
            cfg[key] = flag;
    }

    void overlay_path(const std::string& key, const std::optional<std::string>& flag)
    {
        if (flag)
            cfg[key] = fs::absolute(*flag).string();
    }

    template <class T>
    T get(const std::string& key, T fallback)
    {
        T v = fallback;
        if (has(key))
        {
            try
            {
                v = cfg.at(key).get<T>();
            }
            catch (const json::exception&)
            {
                throw ConfigError("config field '" + key + "' has the wrong type");
            }
        }
        used[key] = v;
        return v;
    }

    template <class T>
    T require(const std::string& key)
    {
        if (!has(key))
            throw ConfigError("missing required parameter '" + key + "'");
        return get<T>(key, T{});
    }

    //! A number or a list of numbers.
    std::vector<double> list(const std::string& key, std::optional<double> fallback = {})
    {
        std::vector<double> out;
        if (!has(key))
        {
            if (!fallback)
                throw ConfigError("missing required parameter '" + key + "'");
            out.push_back(*fallback);
        }
        else if (cfg.at(key).is_array())
        {
            for (const auto& v : cfg.at(key))
            {
                if (!v.is_number())
                    throw ConfigError("'" + key + "' must hold numbers");
                out.push_back(v.get<double>());
            }
        }
        else if (cfg.at(key).is_number())
            out.push_back(cfg.at(key).get<double>());
        else
            throw ConfigError("'" + key + "' must be a number or a list of numbers");
        if (out.empty())
            throw ConfigError("'" + key + "' is empty");
        used[key] = out;
        return out;
    }

    //! A JSON document given inline or as a path; recorded inline.
    json document(const std::string& key)
    {
        if (!has(key))
            throw ConfigError("missing required parameter '" + key + "'");
        json doc = cfg.at(key);
        if (doc.is_string())
        {
            fs::path p = doc.get<std::string>();
            if (p.is_relative())
                p = base / p;
            doc = lpp::io::read_json_file(p.string());
        }
        used[key] = doc;
        return doc;
    }

    //! Explicit "alpha" values, or a geometric grid start * factor^k.
    std::vector<double> alphas()
    {
        if (has("alpha"))
            return list("alpha");
        if (!has("alpha-start"))
            throw ConfigError("give --alpha or an alpha grid (--alpha-start, --alpha-factor, --alpha-count)");
        const double start = get<double>("alpha-start", 0.0);
        const double factor = get<double>("alpha-factor", 0.1);
        const int count = get<int>("alpha-count", 1);
        if (!(start > 0.0) || !(factor > 0.0) || count < 1)
            throw ConfigError("alpha grid needs start > 0, factor > 0 and count >= 1");
        std::vector<double> out;
        for (int k = 0; k < count; ++k)
            out.push_back(start * std::pow(factor, k));
        return out;
    }
};

std::uint64_t default_seed()
{
    if (const char* s = std::getenv("LPP_SEED"))
    {
        try
        {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used);
            if (used == std::string(s).size())
                return v;
        }
        catch (const std::exception&)
        {
        }
        throw ConfigError(std::string("LPP_SEED is not an unsigned integer: ") + s);
    }
    return 0;
}

//---------------------------------------------------------------------------//
// Output
//---------------------------------------------------------------------------//

struct Table
{
    std::vector<std::string> columns;
    std::vector<json> rows;
};

std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "";
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned())
        return v.dump();
    if (v.is_number_float())
    {
        const double d = v.get<double>();
        if (std::isnan(d))
            return "nan";
        if (std::isinf(d))
            return d > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", d);
        return buf;
    }
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos)
    {
        std::string quoted = "\"";
        for (char ch : s)
            quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return quoted + "\"";
    }
    return s;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json optional_number(const std::optional<double>& v)
{
    return v ? number_or_null(*v) : json(nullptr);
}

void write_output(std::ostream& os, const std::string& format, const std::string& command, const json& config,
                  const Table& table)
{
    if (format == "json")
    {
        json doc = {{"lpp", kVersion}, {"command", command}, {"config", config}, {"columns", table.columns},
                    {"results", table.rows}};
        os << doc.dump(2) << '\n';
        return;
    }
    os << "# lpp " << kVersion << " command=" << command << " config=" << config.dump() << '\n';
    for (std::size_t k = 0; k < table.columns.size(); ++k)
        os << (k ? "," : "") << table.columns[k];
    os << '\n';
    for (const auto& row : table.rows)
    {
        for (std::size_t k = 0; k < table.columns.size(); ++k)
            os << (k ? "," : "") << csv_cell(row.value(table.columns[k], json(nullptr)));
        os << '\n';
    }
}

//---------------------------------------------------------------------------//
// Shared pieces
//---------------------------------------------------------------------------//

lpp::RateMeasure measure_from(const json& doc)
{
    if (!doc.is_object() || !doc.contains("c"))
        throw ConfigError("rate measure document needs a 'c' field");
    return lpp::io::parse_rate_measure(doc);
}

//! Environment law from "env", or from "measure" when no env is given.
lpp::io::LoadedEnvironment environment_from(Params& p)
{
    if (p.has("env") || !p.has("measure"))
        return lpp::io::parse_environment(p.document("env"));
    lpp::io::LoadedEnvironment out;
    out.source = p.document("measure");
    out.law = lpp::EnvironmentLaw::exponential_rates(measure_from(out.source));
    return out;
}

lpp::AssumptionReport assumptions_of(const lpp::io::LoadedEnvironment& env)
{
    if (!env.degenerate_rates.empty())
        return lpp::check_exponential_rates(env.degenerate_rates);
    return lpp::check_assumptions(*env.law);
}

void describe_failures(const lpp::AssumptionReport& r, std::ostream& os)
{
    for (const auto& c : r.checks)
        if (!c.pass)
            os << "lpp: assumption '" << c.name << "' fails (" << c.description << "), value " << c.value << '\n';
}

//! Law ready for simulation, after the assumption checks unless skipped.
lpp::EnvironmentLaw simulation_law(Params& p, const lpp::io::LoadedEnvironment& env)
{
    const bool skip = p.get<bool>("skip-checks", false);
    if (!skip)
    {
        const auto report = assumptions_of(env);
        if (!report.all_pass())
        {
            describe_failures(report, std::cerr);
            throw AssumptionFailure("environment violates the moment or tail assumptions");
        }
    }
    if (!env.law)
        throw ConfigError("environment with zero rates cannot be simulated");
    return *env.law;
}

struct SimSettings
{
    std::size_t n;
    std::size_t replicas;
    std::uint64_t seed;
    unsigned threads;
};

SimSettings sim_settings(Params& p, std::size_t default_replicas)
{
    SimSettings s;
    s.n = p.require<std::size_t>("n");
    s.replicas = p.get<std::size_t>("replicas", default_replicas);
    s.seed = p.get<std::uint64_t>("seed", default_seed());
    s.threads = p.get<unsigned>("threads", 0u);
    if (s.n < 1)
        throw ConfigError("n must be at least 1");
    return s;
}

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

Table cmd_simulate(Params& p)
{
    const auto env = environment_from(p);
    const double x = p.get<double>("x", 1.0);
    const double y = p.get<double>("y", 1.0);
    const auto geometry = lpp::parse_geometry(p.get<std::string>("geometry", "weak-weak"));
    const auto s = sim_settings(p, 10);
    const auto law = simulation_law(p, env);
    const auto est = lpp::estimate_time_constant(law, x, y, s.n, geometry, s.replicas, s.seed, s.threads);
    Table t{{"geometry", "x", "y", "n", "replicas", "seed", "mean", "stderr"}, {}};
    t.rows.push_back({{"geometry", lpp::to_string(est.geometry)},
                      {"x", est.x},
                      {"y", est.y},
                      {"n", est.n},
                      {"replicas", est.replicas},
                      {"seed", est.seed},
                      {"mean", est.mean},
                      {"stderr", est.std_error}});
    return t;
}

lpp::BernoulliEnv bernoulli_env(Params& p)
{
    const auto env = lpp::io::parse_environment(p.document("env"));
    if (!env.law)
        throw ConfigError("a Bernoulli environment is required");
    return lpp::BernoulliEnv::from_law(*env.law);
}

json shape_row(double x, double y, const lpp::ShapeEvaluation& e)
{
    return {{"x", x},
            {"y", y},
            {"value", e.value},
            {"branch", lpp::to_string(e.branch)},
            {"rootZ0", optional_number(e.root_z0)},
            {"residual", e.residual}};
}

Table cmd_shape(Params& p, const std::string& target)
{
    if (target == "bernoulli-strict-x" || target == "bernoulli-strict-y" || target == "bernoulli-bounds")
    {
        const auto env = bernoulli_env(p);
        const auto xs = p.list("x", 1.0);
        const auto ys = p.list("y", 1.0);
        Table t;
        if (target == "bernoulli-bounds")
            t.columns = {"x", "y", "strictX", "strictY", "weakWeak", "loose"};
        else
            t.columns = {"x", "y", "value", "branch", "rootZ0", "residual"};
        for (double x : xs)
            for (double y : ys)
            {
                if (target == "bernoulli-strict-x")
                    t.rows.push_back(shape_row(x, y, lpp::psi_strict_x(env, x, y)));
                else if (target == "bernoulli-strict-y")
                    t.rows.push_back(shape_row(x, y, lpp::psi_strict_y(env, x, y)));
                else
                {
                    const auto b = lpp::bernoulli_bounds(env, x, y);
                    t.rows.push_back({{"x", x},
                                      {"y", y},
                                      {"strictX", b.strict_x},
                                      {"strictY", b.strict_y},
                                      {"weakWeak", b.weak_weak},
                                      {"loose", b.loose}});
                }
            }
        return t;
    }
    if (target == "exp-dual")
    {
        const lpp::ExpDual dual(measure_from(p.document("measure")));
        const auto xs = p.list("x", 1.0);
        const auto ys = p.list("y", 1.0);
        Table t{{"x", "y", "value"}, {}};
        for (double x : xs)
            for (double y : ys)
                t.rows.push_back({{"x", x}, {"y", y}, {"value", dual.psi(x, y)}});
        return t;
    }
    if (target == "exp-boundary")
    {
        const auto m = measure_from(p.document("measure"));
        Table t{{"alpha", "psi", "case", "a0", "u0", "residual"}, {}};
        for (double alpha : p.alphas())
        {
            const auto r = lpp::boundary_psi(m, alpha);
            t.rows.push_back({{"alpha", alpha},
                              {"psi", r.psi},
                              {"case", r.kind == lpp::BoundaryCase::Case1 ? "case1" : "case2"},
                              {"a0", optional_number(r.a0)},
                              {"u0", optional_number(r.u0)},
                              {"residual", r.residual}});
        }
        return t;
    }
    if (target == "exp-asymptote")
    {
        std::optional<lpp::RateMeasure> m;
        double nu, kappa, c;
        if (p.has("measure"))
        {
            m = measure_from(p.document("measure"));
            if (!m->tail())
                throw ConfigError("exp-asymptote needs a measure with a tail segment");
            nu = m->tail()->nu;
            kappa = m->tail()->kappa;
            c = m->c();
        }
        else
        {
            nu = p.require<double>("nu");
            kappa = p.require<double>("kappa");
            c = p.require<double>("c");
            if (nu > 0.0)
                throw ConfigError("for nu > 0 the leading term needs the full measure (--measure)");
        }
        const auto k = lpp::asymptotic_constants(nu, kappa, c);
        Table t{{"alpha", "value", "nu", "kappa", "c", "A", "A2", "B0", "B"}, {}};
        for (double alpha : p.alphas())
        {
            double value;
            if (m)
                value = lpp::asymptotic_psi(*m, alpha);
            else if (nu == 0.0)
                value = 1.0 / c - kappa * alpha * std::log(alpha);
            else
                value = 1.0 / c + *k.b * std::pow(alpha, 1.0 / (1.0 - nu));
            t.rows.push_back({{"alpha", alpha},
                              {"value", value},
                              {"nu", nu},
                              {"kappa", kappa},
                              {"c", c},
                              {"A", k.a_nu},
                              {"A2", optional_number(k.a_nu2)},
                              {"B0", optional_number(k.b0)},
                              {"B", optional_number(k.b)}});
        }
        return t;
    }
    throw ConfigError("unknown shape target '" + target + "'");
}

struct CompareOutcome
{
    Table table;
    bool within_tol = true;
};

CompareOutcome cmd_compare(Params& p, const std::string& target)
{
    double x = 0.0, y = 0.0, analytic = 0.0;
    lpp::PathGeometry geometry = lpp::PathGeometry::WeakWeak;
    lpp::io::LoadedEnvironment env;
    if (target == "bernoulli-strict-x" || target == "bernoulli-strict-y")
    {
        env = lpp::io::parse_environment(p.document("env"));
        if (!env.law)
            throw ConfigError("a Bernoulli environment is required");
        const auto benv = lpp::BernoulliEnv::from_law(*env.law);
        x = p.get<double>("x", 1.0);
        y = p.get<double>("y", 1.0);
        const bool sx = target == "bernoulli-strict-x";
        analytic = (sx ? lpp::psi_strict_x(benv, x, y) : lpp::psi_strict_y(benv, x, y)).value;
        geometry = sx ? lpp::PathGeometry::StrictX : lpp::PathGeometry::StrictY;
    }
    else if (target == "exp-dual")
    {
        env.source = p.document("measure");
        const auto m = measure_from(env.source);
        env.law = lpp::EnvironmentLaw::exponential_rates(m);
        x = p.get<double>("x", 1.0);
        y = p.get<double>("y", 1.0);
        analytic = lpp::ExpDual(m).psi(x, y);
    }
    else if (target == "near-y-axis")
    {
        env = environment_from(p);
        if (!env.law)
            throw ConfigError("environment with zero rates has no near-axis expansion");
        x = p.require<double>("alpha");
        y = 1.0;
        analytic = lpp::psi_near_y_axis(*env.law, x);
    }
    else
        throw ConfigError("unknown compare target '" + target + "'");

    const double tol = p.get<double>("tol", 0.02);
    const auto against = p.get<std::string>("against", "sim");
    double sim_mean = analytic, sim_stderr = 0.0;
    if (against == "sim")
    {
        const auto s = sim_settings(p, 20);
        const auto law = simulation_law(p, env);
        const auto est = lpp::estimate_time_constant(law, x, y, s.n, geometry, s.replicas, s.seed, s.threads);
        sim_mean = est.mean;
        sim_stderr = est.std_error;
    }
    else if (against != "analytic")
        throw ConfigError("--against must be 'sim' or 'analytic'");

    const double diff = sim_mean - analytic;
    const double z = sim_stderr > 0.0 ? diff / sim_stderr : (diff == 0.0 ? 0.0 : std::copysign(lpp::kInf, diff));
    const double rel = analytic != 0.0 ? diff / analytic : (diff == 0.0 ? 0.0 : lpp::kInf);

    CompareOutcome out;
    out.table.columns = {"target", "x", "y", "analytic", "simMean", "simStderr", "zScore", "relErr"};
    out.table.rows.push_back({{"target", target},
                              {"x", x},
                              {"y", y},
                              {"analytic", analytic},
                              {"simMean", sim_mean},
                              {"simStderr", sim_stderr},
                              {"zScore", number_or_null(z)},
                              {"relErr", number_or_null(rel)}});
    out.within_tol = std::abs(rel) <= tol;
    return out;
}

Table cmd_sweep(Params& p)
{
    const auto env = environment_from(p);
    const auto alphas = p.alphas();
    if (!env.law)
        throw ConfigError("environment with zero rates has no near-axis bounds");
    const auto replicas = p.get<std::size_t>("replicas", 20);
    std::optional<SimSettings> s;
    std::optional<lpp::EnvironmentLaw> law;
    if (replicas > 0)
    {
        s = sim_settings(p, replicas);
        law = simulation_law(p, env);
    }
    Table t{{"alpha", "lower", "upper", "simMean", "simStderr"}, {}};
    for (double alpha : alphas)
    {
        const auto b = lpp::psi_near_x_axis_bounds(*env.law, alpha);
        json row = {{"alpha", alpha}, {"lower", b.lower}, {"upper", b.upper}, {"simMean", nullptr}, {"simStderr", nullptr}};
        if (s)
        {
            const auto est = lpp::estimate_time_constant(*law, 1.0, alpha, s->n, lpp::PathGeometry::WeakWeak,
                                                         s->replicas, s->seed, s->threads);
            row["simMean"] = est.mean;
            row["simStderr"] = est.std_error;
        }
        t.rows.push_back(row);
    }
    return t;
}

Table cmd_check(Params& p, bool& all_pass)
{
    const auto env = environment_from(p);
    const auto report = assumptions_of(env);
    all_pass = report.all_pass();
    Table t{{"name", "value", "pass", "description"}, {}};
    for (const auto& c : report.checks)
        t.rows.push_back({{"name", c.name}, {"value", number_or_null(c.value)}, {"pass", c.pass}, {"description", c.description}});
    return t;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Last-passage percolation in a random row environment"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path, output_path;
    std::string format = "csv";
    app.add_option("--config", config_path, "JSON file of parameters; flags override it");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output_path, "Write output here instead of stdout");

    // Flag values; unset ones fall back to the config file, then defaults.
    std::optional<std::string> env, measure, geometry, target_flag, against;
    std::optional<double> x1, y1, alpha1, tol, nu, kappa, c, alpha_start, alpha_factor;
    std::vector<double> xs, ys, alphas;
    std::optional<std::size_t> n, replicas;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<int> alpha_count;
    bool skip_checks = false;

    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--n", n, "Scale parameter n");
        sub->add_option("--replicas", replicas, "Independent replicas");
        sub->add_option("--seed", seed, "Master seed (default: LPP_SEED or 0)");
        sub->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");
        sub->add_flag("--skip-checks", skip_checks, "Do not run the assumption checks first");
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--alpha", alphas, "Alpha values");
        sub->add_option("--alpha-start", alpha_start, "First value of a geometric alpha grid");
        sub->add_option("--alpha-factor", alpha_factor, "Ratio of the geometric alpha grid");
        sub->add_option("--alpha-count", alpha_count, "Length of the geometric alpha grid");
    };

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the time constant");
    simulate->add_option("--env", env, "Environment JSON");
    simulate->add_option("--measure", measure, "Rate-measure JSON (exponential rows)");
    simulate->add_option("--x", x1, "Direction x");
    simulate->add_option("--y", y1, "Direction y");
    simulate->add_option("--geometry", geometry, "weak-weak, strict-x or strict-y");
    add_sim(simulate);

    auto* shape = app.add_subcommand("shape", "Analytic shape functions");
    shape->add_option("target", target_flag,
                      "bernoulli-strict-x, bernoulli-strict-y, bernoulli-bounds, exp-dual, exp-boundary, exp-asymptote");
    shape->add_option("--env", env, "Bernoulli environment JSON");
    shape->add_option("--measure", measure, "Rate-measure JSON");
    shape->add_option("--x", xs, "x values (grid with --y)");
    shape->add_option("--y", ys, "y values");
    shape->add_option("--nu", nu, "Tail exponent");
    shape->add_option("--kappa", kappa, "Tail constant");
    shape->add_option("--c", c, "Smallest rate");
    add_grid(shape);

    auto* compare = app.add_subcommand("compare", "Analytic value against simulation");
    compare->add_option("target", target_flag, "bernoulli-strict-x, bernoulli-strict-y, exp-dual, near-y-axis");
    compare->add_option("--env", env, "Environment JSON");
    compare->add_option("--measure", measure, "Rate-measure JSON");
    compare->add_option("--x", x1, "Direction x");
    compare->add_option("--y", y1, "Direction y");
    compare->add_option("--alpha", alpha1, "Alpha for near-y-axis");
    compare->add_option("--tol", tol, "Largest accepted |relErr| (default 0.02)");
    compare->add_option("--against", against, "sim (default) or analytic");
    add_sim(compare);

    auto* sweep = app.add_subcommand("sweep", "Near-x-axis bounds and simulation over an alpha grid");
    sweep->add_option("--env", env, "Environment JSON");
    sweep->add_option("--measure", measure, "Rate-measure JSON");
    add_grid(sweep);
    add_sim(sweep);

    auto* check = app.add_subcommand("check", "Moment and tail assumption checks");
    check->add_option("--env", env, "Environment JSON");
    check->add_option("--measure", measure, "Rate-measure JSON");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    const auto* active = app.get_subcommands().front();
    const std::string command = active->get_name();
    try
    {
        Params p;
        if (config_path)
        {
            p.cfg = lpp::io::read_json_file(*config_path);
            if (!p.cfg.is_object())
                throw ConfigError("config file must hold a JSON object");
            p.base = fs::absolute(*config_path).parent_path();
        }
        p.overlay_path("env", env);
        p.overlay_path("measure", measure);
        p.overlay("geometry", geometry);
        p.overlay("target", target_flag);
        p.overlay("against", against);
        p.overlay("x", x1);
        p.overlay("y", y1);
        p.overlay("x", xs);
        p.overlay("y", ys);
        p.overlay("alpha", alpha1);
        p.overlay("alpha", alphas);
        p.overlay("alpha-start", alpha_start);
        p.overlay("alpha-factor", alpha_factor);
        p.overlay("alpha-count", alpha_count);
        p.overlay("tol", tol);
        p.overlay("nu", nu);
        p.overlay("kappa", kappa);
        p.overlay("c", c);
        p.overlay("n", n);
        p.overlay("replicas", replicas);
        p.overlay("seed", seed);
        p.overlay("threads", threads);
        if (skip_checks)
            p.cfg["skip-checks"] = true;

        Table table;
        int code = kOk;
        if (command == "simulate")
            table = cmd_simulate(p);
        else if (command == "shape")
            table = cmd_shape(p, p.require<std::string>("target"));
        else if (command == "compare")
        {
            auto out = cmd_compare(p, p.require<std::string>("target"));
            table = std::move(out.table);
            if (!out.within_tol)
                code = kTolerance;
        }
        else if (command == "sweep")
            table = cmd_sweep(p);
        else
        {
            bool all_pass = true;
            table = cmd_check(p, all_pass);
            if (!all_pass)
                code = kAssumption;
        }

        if (output_path)
        {
            std::ofstream out(*output_path);
            if (!out)
                throw ConfigError("cannot write " + *output_path);
            write_output(out, format, command, p.used, table);
        }
        else
            write_output(std::cout, format, command, p.used, table);
        return code;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "lpp: config error: " << e.what() << '\n';
        return kConfig;
    }
    catch (const AssumptionFailure& e)
    {
        std::cerr << "lpp: " << e.what() << " (use --skip-checks to run anyway)\n";
        return kAssumption;
    }
    catch (const lpp::BoundaryWindowError& e)
    {
        std::cerr << "lpp: " << e.what() << '\n';
        return kWindow;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "lpp: invalid input: " << e.what() << '\n';
        return kConfig;
    }
    catch (const std::domain_error& e)
    {
        std::cerr << "lpp: invalid input: " << e.what() << '\n';
        return kConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "lpp: error: " << e.what() << '\n';
        return 1;
    }
}
