#pragma once

// JSON reading and writing of environment laws and rate measures.
// Requires nlohmann/json on the include path.

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "envmodel.hpp"

namespace lpp::io {

using nlohmann::json;

//! Raised for malformed or invalid configuration documents.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(path + ": " + e.what());
    }
}

namespace detail {

inline double number(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

} // namespace detail

inline RowDistribution parse_row_distribution(const json& j)
{
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("distribution needs a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential")
        return RowDistribution::exponential(detail::number(j, "rate"));
    if (kind == "bernoulli")
        return RowDistribution::bernoulli(detail::number(j, "p"));
    if (kind == "discrete")
    {
        std::vector<DiscreteAtom> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.push_back({detail::number(a, "value"), detail::number(a, "prob")});
        return RowDistribution::discrete(std::move(atoms));
    }
    if (kind == "truncated")
    {
        const double rate = detail::number(j, "rate");
        const double tau = detail::number(j, "tau");
        if (j.contains("ptilde") || j.contains("upper"))
            return RowDistribution::truncated(rate, tau, detail::number(j, "ptilde"), detail::number(j, "upper"));
        return truncate_two_moment(RowDistribution::exponential(rate), tau);
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
}

inline json to_json(const RowDistribution& d)
{
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return {{"kind", "exponential"}, {"rate", v.rate}};
            else if constexpr (std::is_same_v<T, Bernoulli>)
                return {{"kind", "bernoulli"}, {"p", v.p}};
            else if constexpr (std::is_same_v<T, FiniteDiscrete>)
            {
                json atoms = json::array();
                for (const auto& a : v.atoms)
                    atoms.push_back({{"value", a.value}, {"prob", a.prob}});
                return {{"kind", "discrete"}, {"atoms", atoms}};
            }
            else
                return {{"kind", "truncated"}, {"rate", v.rate}, {"tau", v.tau}, {"ptilde", v.ptilde}, {"upper", v.upper}};
        },
        d.kind());
}

inline RateMeasure parse_rate_measure(const json& j)
{
    try
    {
        const double c = detail::number(j, "c");
        std::vector<RateAtom> atoms;
        if (j.contains("atoms"))
            for (const auto& a : j.at("atoms"))
                atoms.push_back({detail::number(a, "rate"), detail::number(a, "weight")});
        std::optional<PowerTail> tail;
        if (j.contains("tail") && !j.at("tail").is_null())
        {
            const auto& t = j.at("tail");
            const double nu = detail::number(t, "nu");
            const double width = t.contains("width") ? detail::number(t, "width") : 0.0;
            tail = PowerTail{detail::number(t, "kappa"), nu, width};
        }
        return RateMeasure(c, std::move(atoms), tail);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("invalid rate measure: ") + e.what());
    }
}

inline json to_json(const RateMeasure& m)
{
    json atoms = json::array();
    for (const auto& a : m.atoms())
        atoms.push_back({{"rate", a.rate}, {"weight", a.weight}});
    json out = {{"c", m.c()}, {"atoms", atoms}};
    if (const auto& t = m.tail())
        out["tail"] = {{"kappa", t->kappa}, {"nu", t->nu}, {"width", t->width}};
    return out;
}

/*!
 * A parsed environment document. Exponential rows with a zero rate cannot
 * form a valid law; they are kept as raw rates so the assumption checks can
 * report on them.
 */
struct LoadedEnvironment
{
    std::optional<EnvironmentLaw> law;
    std::vector<RateAtom> degenerate_rates;
    json source;
};

inline LoadedEnvironment parse_environment(const json& j)
{
    LoadedEnvironment out;
    out.source = j;
    if (!j.is_object())
        throw ConfigError("environment must be a JSON object");
    try
    {
        if (!j.contains("components"))
        {
            if (j.contains("c"))
            {
                out.law = EnvironmentLaw::exponential_rates(parse_rate_measure(j));
                return out;
            }
            throw ConfigError("environment needs 'components' or a rate measure");
        }
        const auto& comps_j = j.at("components");
        if (!comps_j.is_array() || comps_j.empty())
            throw ConfigError("environment needs a nonempty 'components' list");

        bool zero_rate = false;
        for (const auto& c : comps_j)
        {
            const auto& d = c.at("dist");
            if (d.value("kind", "") == "exponential" && d.contains("rate") && d.at("rate").is_number()
                && d.at("rate").get<double>() == 0.0)
                zero_rate = true;
        }
        if (zero_rate)
        {
            for (const auto& c : comps_j)
            {
                const auto& d = c.at("dist");
                if (d.value("kind", "") != "exponential")
                    throw ConfigError("zero rates are only meaningful in all-exponential environments");
                out.degenerate_rates.push_back({detail::number(d, "rate"), detail::number(c, "weight")});
            }
            return out;
        }

        std::vector<Component> comps;
        for (const auto& c : comps_j)
            comps.push_back({parse_row_distribution(c.at("dist")), detail::number(c, "weight")});
        const auto mode = j.value("mode", std::string("iid"));
        if (mode == "iid")
            out.law = EnvironmentLaw::iid(std::move(comps));
        else if (mode == "markov")
            out.law = EnvironmentLaw::markov(std::move(comps), j.at("transition").get<std::vector<std::vector<double>>>());
        else
            throw ConfigError("unknown environment mode '" + mode + "'");
        return out;
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("invalid environment: ") + e.what());
    }
    catch (const json::exception& e)
    {
        throw ConfigError(std::string("malformed environment: ") + e.what());
    }
}

inline json to_json(const EnvironmentLaw& law)
{
    if (const auto& m = law.rate_measure())
        return to_json(*m);
    json comps = json::array();
    for (const auto& c : law.components())
        comps.push_back({{"weight", c.weight}, {"dist", to_json(c.dist)}});
    json out = {{"mode", law.mode() == EnvMode::iid ? "iid" : "markov"}, {"components", comps}};
    if (law.mode() == EnvMode::markov)
        out["transition"] = law.transition();
    return out;
}

} // namespace lpp::io
