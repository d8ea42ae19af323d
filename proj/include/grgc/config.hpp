#pragma once

// Flat dotted-key configuration files:
//
//   # comment
//   scenario = "poisson-fixed-k"
//   weight.kind = constant
//   weight.c = 0.9
//   n_grid = [50, 100, 200]
//   length_set = 3,4          # or "all"
//
// A `[section]` line prefixes the keys that follow with `section.`.
// Unknown keys are rejected when the file is resolved, after overrides.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "grgc/errors.hpp"
#include "grgc/graph.hpp"
#include "grgc/harness.hpp"
#include "grgc/rng.hpp"
#include "grgc/steinchen.hpp"
#include "grgc/weights.hpp"

namespace grgc {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Drops a trailing `# comment` that is not inside quotes.
inline std::string_view strip_comment(std::string_view s)
{
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"')
            quoted = !quoted;
        else if (s[i] == '#' && !quoted)
            return s.substr(0, i);
    }
    return s;
}

inline std::string unquote(std::string_view s)
{
    s = trim(s);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        s = s.substr(1, s.size() - 2);
    return std::string(s);
}

}  // namespace detail

class ConfigFile {
  public:
    static ConfigFile parse(std::string_view text)
    {
        ConfigFile cfg;
        std::string section;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                           : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            const auto line = detail::trim(detail::strip_comment(raw));
            if (line.empty())
                continue;
            if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
                section = std::string(detail::trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
            std::string key(detail::trim(line.substr(0, eq)));
            if (key.empty())
                throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
            if (!section.empty())
                key = section + "." + key;
            cfg.entries_[key] = detail::unquote(line.substr(eq + 1));
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read config file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

    /// Applies one `key=value` override.
    void apply_override(std::string_view kv)
    {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos || detail::trim(kv.substr(0, eq)).empty())
            throw ConfigError("", "override '" + std::string(kv) + "' is not key=value");
        set(std::string(detail::trim(kv.substr(0, eq))), detail::unquote(kv.substr(eq + 1)));
    }

    /// Later entries win.
    void merge(const ConfigFile& o)
    {
        for (const auto& [k, v] : o.entries_)
            entries_[k] = v;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    void erase(const std::string& key) { entries_.erase(key); }

    std::optional<std::string> get(const std::string& key) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        return it->second;
    }

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// One `key = value` line per entry, sorted by key; reparses to an equal file.
    std::string canonical() const
    {
        std::string out;
        for (const auto& [k, v] : entries_)
            out += k + " = \"" + v + "\"\n";
        return out;
    }

    std::uint64_t hash() const { return fnv1a64(canonical()); }

    bool operator==(const ConfigFile&) const = default;

  private:
    std::map<std::string, std::string> entries_;
};

/// Typed readers; every failure names the key.
namespace cfgval {

inline double real(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const auto s = detail::trim(v);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x))
        throw ConfigError(key, "expected a number, got '" + v + "'");
    return x;
}

inline std::uint64_t unsigned_int(const std::string& key, const std::string& v)
{
    const auto s = detail::trim(v);
    std::uint64_t x = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size())
        return x;
    // accept integral values written like 1e5
    const double d = real(key, v);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(d);
}

inline std::vector<std::string> list(const std::string& key, const std::string& v)
{
    auto s = detail::trim(v);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']')
            throw ConfigError(key, "unterminated list '" + v + "'");
        s = s.substr(1, s.size() - 2);
    }
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto c = s.find(',', pos);
        const auto item =
            detail::trim(s.substr(pos, c == std::string_view::npos ? s.size() - pos : c - pos));
        if (!item.empty())
            out.push_back(detail::unquote(item));
        else if (c != std::string_view::npos)
            throw ConfigError(key, "empty list element in '" + v + "'");
        if (c == std::string_view::npos)
            break;
        pos = c + 1;
    }
    return out;
}

}  // namespace cfgval

/// Acceptance thresholds read from `assert.*` keys.
struct Thresholds {
    std::map<std::string, double> values;

    std::optional<double> get(const std::string& name) const
    {
        const auto it = values.find(name);
        if (it == values.end())
            return std::nullopt;
        return it->second;
    }
};

inline const std::set<std::string>& assert_keys()
{
    static const std::set<std::string> keys{
        "tv_max",          "mean_z_max",       "dispersion_min",   "dispersion_max",
        "cov_z_max",       "slope_min",        "slope_max",        "monotone_violations_max",
        "long_cycle_freq_max", "kol_max",      "p_no_cycle_z_max", "violations_max",
        "bound_max"};
    return keys;
}

inline const std::set<std::string>& config_keys()
{
    static const std::set<std::string> keys{
        "scenario",     "graph.kind",   "weight.kind",       "weight.c",
        "weight.v1",    "weight.v2",    "weight.prob",       "weight.rate",
        "weight.shape", "weight.scale", "weight.tail_index", "n",
        "n_grid",       "reps",         "length_set",        "a_log_constant",
        "master_seed",  "sampling",     "q",                 "variant",
        "workers",      "max_len"};
    return keys;
}

/// Unknown key check, before any value is interpreted.
inline void check_known_keys(const ConfigFile& f)
{
    for (const auto& [k, v] : f.entries()) {
        if (config_keys().count(k))
            continue;
        if (k.rfind("assert.", 0) == 0 && assert_keys().count(k.substr(7)))
            continue;
        throw ConfigError(k, "unknown configuration key");
    }
}

inline WeightModel read_weight_model(const ConfigFile& f)
{
    const std::string kind = f.get("weight.kind").value_or("constant");
    auto num = [&](const std::string& key, double def) {
        const auto v = f.get(key);
        return v ? cfgval::real(key, *v) : def;
    };
    auto build = [&]() -> WeightModel {
        if (kind == "constant")
            return WeightModel::constant(num("weight.c", 0.5));
        if (kind == "two-point")
            return WeightModel::two_point(num("weight.v1", 0.5), num("weight.v2", 1.0),
                                          num("weight.prob", 0.5));
        if (kind == "exponential")
            return WeightModel::exponential(num("weight.rate", 1.0));
        if (kind == "gamma")
            return WeightModel::gamma(num("weight.shape", 1.0), num("weight.scale", 1.0));
        if (kind == "pareto")
            return WeightModel::pareto(num("weight.scale", 1.0), num("weight.tail_index", 3.0));
        throw ConfigError("weight.kind", "unknown weight kind '" + kind + "'");
    };
    try {
        return build();
    } catch (const DomainError& e) {
        throw ConfigError("weight.kind", e.what());
    }
}

inline LengthSet read_length_set(const std::string& v)
{
    if (detail::trim(v) == "all" || detail::trim(v) == "all-from-3")
        return LengthSet::all();
    std::set<int> ks;
    for (const auto& item : cfgval::list("length_set", v)) {
        const auto k = cfgval::unsigned_int("length_set", item);
        if (k < 3 || k > 1'000'000)
            throw ConfigError("length_set", "cycle lengths must be >= 3");
        ks.insert(static_cast<int>(k));
    }
    return LengthSet::of(std::move(ks));
}

/// A fully interpreted configuration.
struct ResolvedConfig {
    ExperimentConfig experiment;
    Thresholds thresholds;
    std::optional<int> max_len;
    ConfigFile file;  // the merged key/value view used for provenance
};

/// Interprets a merged config file. `scenario` is the default when the file
/// has no `scenario` key.
inline ResolvedConfig resolve_config(const ConfigFile& f, Scenario scenario)
{
    check_known_keys(f);
    ResolvedConfig rc;
    rc.file = f;
    ExperimentConfig& e = rc.experiment;
    e.scenario = f.get("scenario") ? parse_scenario(*f.get("scenario")) : scenario;
    e.model = read_weight_model(f);
    if (const auto v = f.get("graph.kind")) {
        try {
            e.graph = parse_model_kind(*v);
        } catch (const std::exception& ex) {
            throw ConfigError("graph.kind", ex.what());
        }
    }
    if (const auto v = f.get("n_grid")) {
        e.n_grid.clear();
        for (const auto& item : cfgval::list("n_grid", *v))
            e.n_grid.push_back(cfgval::unsigned_int("n_grid", item));
    }
    if (const auto v = f.get("n"))
        e.n_grid = {static_cast<std::size_t>(cfgval::unsigned_int("n", *v))};
    if (const auto v = f.get("reps"))
        e.reps = cfgval::unsigned_int("reps", *v);
    if (const auto v = f.get("length_set"))
        e.lengths = read_length_set(*v);
    if (const auto v = f.get("a_log_constant"))
        e.a_log_constant = cfgval::real("a_log_constant", *v);
    if (const auto v = f.get("master_seed"))
        e.master_seed = cfgval::unsigned_int("master_seed", *v);
    if (const auto v = f.get("sampling")) {
        if (*v == "annealed")
            e.sampling = Sampling::Annealed;
        else if (*v == "quenched")
            e.sampling = Sampling::Quenched;
        else
            throw ConfigError("sampling", "expected annealed or quenched, got '" + *v + "'");
    }
    if (const auto v = f.get("variant")) {
        if (*v == "edge-sharing")
            e.variant = Neighborhood::EdgeSharing;
        else if (*v == "vertex-sharing")
            e.variant = Neighborhood::VertexSharing;
        else
            throw ConfigError("variant", "expected edge-sharing or vertex-sharing, got '" + *v +
                                             "'");
    }
    if (const auto v = f.get("workers"))
        e.workers = static_cast<unsigned>(cfgval::unsigned_int("workers", *v));
    if (const auto v = f.get("max_len")) {
        const auto m = cfgval::unsigned_int("max_len", *v);
        if (m < 3 || m > 1'000'000)
            throw ConfigError("max_len", "must be >= 3");
        rc.max_len = static_cast<int>(m);
    }
    if (const auto v = f.get("q")) {
        // either a list aligned with length_set or k:q pairs
        const auto items = cfgval::list("q", *v);
        const std::vector<int> ks(e.lengths.lengths.begin(), e.lengths.lengths.end());
        const bool pairs = !items.empty() && items.front().find(':') != std::string::npos;
        if (!pairs && items.size() != ks.size())
            throw ConfigError("q", "expected one probability per length in length_set");
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (pairs) {
                const auto c = items[i].find(':');
                if (c == std::string::npos)
                    throw ConfigError("q", "mixing k:q pairs and plain values");
                e.thinning[static_cast<int>(cfgval::unsigned_int("q", items[i].substr(0, c)))] =
                    cfgval::real("q", items[i].substr(c + 1));
            } else {
                e.thinning[ks[i]] = cfgval::real("q", items[i]);
            }
        }
    }
    for (const auto& [k, v] : f.entries())
        if (k.rfind("assert.", 0) == 0)
            rc.thresholds.values[k.substr(7)] = cfgval::real(k, v);
    return rc;
}

}  // namespace grgc
