#pragma once

// Command-line front end: subcommand defaults, config resolution, result
// serialization (CSV and JSON) and threshold assertions.
//
// Exit codes: 0 success, 1 assertion failure (--assert), 2 usage error,
// 3 configuration error, 4 I/O error, 5 unexpected internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grgc/config.hpp"
#include "grgc/cycles.hpp"
#include "grgc/errors.hpp"
#include "grgc/graph.hpp"
#include "grgc/harness.hpp"
#include "grgc/steinchen.hpp"
#include "grgc/weights.hpp"

namespace grgc::cli {

inline constexpr const char* kVersion = "grgc 0.1.0";

enum ExitCode : int {
    kOk = 0,
    kAssertFailed = 1,
    kUsage = 2,
    kConfig = 3,
    kIo = 4,
    kInternal = 5
};

enum class Subcommand {
    Generate,
    Census,
    VerifyPoisson,
    VerifyRate,
    NoLongCycles,
    Extremes,
    CramerWold,
    Bounds,
    Domination
};

inline const char* to_string(Subcommand s)
{
    switch (s) {
    case Subcommand::Generate: return "generate";
    case Subcommand::Census: return "census";
    case Subcommand::VerifyPoisson: return "verify-poisson";
    case Subcommand::VerifyRate: return "verify-rate";
    case Subcommand::NoLongCycles: return "no-long-cycles";
    case Subcommand::Extremes: return "extremes";
    case Subcommand::CramerWold: return "cramer-wold";
    case Subcommand::Bounds: return "bounds";
    case Subcommand::Domination: return "domination";
    }
    return "?";
}

inline const std::vector<Subcommand>& all_subcommands()
{
    static const std::vector<Subcommand> v{
        Subcommand::Generate,     Subcommand::Census,   Subcommand::VerifyPoisson,
        Subcommand::VerifyRate,   Subcommand::NoLongCycles, Subcommand::Extremes,
        Subcommand::CramerWold,   Subcommand::Bounds,   Subcommand::Domination};
    return v;
}

enum class Format { Csv, Json };

/// Built-in defaults per subcommand, including the documented thresholds.
inline std::string default_config_text(Subcommand s)
{
    switch (s) {
    case Subcommand::Generate:
    case Subcommand::Census:
        return "graph.kind = grg\nweight.kind = constant\nweight.c = 0.9\nn = 100\n"
               "master_seed = 1\n";
    case Subcommand::VerifyPoisson:
        return "scenario = poisson-fixed-k\ngraph.kind = grg\nweight.kind = constant\n"
               "weight.c = 0.9\nn_grid = [400]\nreps = 100000\nlength_set = [3]\n"
               "master_seed = 1\nassert.mean_z_max = 3\nassert.dispersion_min = 0.9\n"
               "assert.dispersion_max = 1.1\nassert.tv_max = 0.01\nassert.cov_z_max = 3\n";
    case Subcommand::VerifyRate:
        return "scenario = rate-bounded\ngraph.kind = grg\nweight.kind = constant\n"
               "weight.c = 0.9\nn_grid = [50, 100, 200, 400]\nreps = 100000\nlength_set = [3]\n"
               "a_log_constant = 3\nmaster_seed = 1\nassert.monotone_violations_max = 0\n"
               "assert.slope_min = -1.6\nassert.slope_max = -0.4\n";
    case Subcommand::NoLongCycles:
        return "scenario = no-long-cycles\ngraph.kind = grg\nweight.kind = constant\n"
               "weight.c = 0.5\nn_grid = [2000]\nreps = 10000\na_log_constant = 3\n"
               "master_seed = 1\nassert.long_cycle_freq_max = 0.0005\n";
    case Subcommand::Extremes:
        return "scenario = extremes\ngraph.kind = grg\nweight.kind = constant\nweight.c = 0.9\n"
               "n_grid = [400]\nreps = 100000\nmaster_seed = 1\nassert.kol_max = 0.01\n"
               "assert.p_no_cycle_z_max = 3\nassert.violations_max = 0\n";
    case Subcommand::CramerWold:
        return "scenario = cramer-wold\ngraph.kind = grg\nweight.kind = constant\n"
               "weight.c = 0.9\nn_grid = [400]\nreps = 100000\nlength_set = [3, 4]\n"
               "q = [0.5, 0.25]\nmaster_seed = 1\nassert.mean_z_max = 3\nassert.tv_max = 0.01\n";
    case Subcommand::Bounds:
        return "scenario = bounds-check\nweight.kind = constant\nweight.c = 0.9\n"
               "n_grid = [100, 1000, 10000]\nreps = 1000\nlength_set = [3]\n"
               "variant = vertex-sharing\nmaster_seed = 1\n";
    case Subcommand::Domination:
        return "scenario = domination\nweight.kind = exponential\nweight.rate = 1\n"
               "n_grid = [100]\nreps = 1000\nlength_set = [3]\nmaster_seed = 1\n"
               "assert.violations_max = 0\n";
    }
    return "";
}

inline Scenario default_scenario(Subcommand s)
{
    switch (s) {
    case Subcommand::VerifyPoisson: return Scenario::PoissonFixedK;
    case Subcommand::VerifyRate: return Scenario::RateBounded;
    case Subcommand::NoLongCycles: return Scenario::NoLongCycles;
    case Subcommand::Extremes: return Scenario::Extremes;
    case Subcommand::CramerWold: return Scenario::CramerWold;
    case Subcommand::Bounds: return Scenario::BoundsCheck;
    case Subcommand::Domination: return Scenario::Domination;
    default: return Scenario::PoissonFixedK;
    }
}

inline bool scenario_allowed(Subcommand s, Scenario sc)
{
    switch (s) {
    case Subcommand::VerifyPoisson:
        return sc == Scenario::PoissonFixedK || sc == Scenario::PoissonJoint;
    case Subcommand::VerifyRate:
        return sc == Scenario::RateBounded || sc == Scenario::RateUnbounded;
    case Subcommand::Generate:
    case Subcommand::Census: return true;
    default: return sc == default_scenario(s);
    }
}

struct CliInvocation {
    Subcommand subcommand = Subcommand::VerifyPoisson;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir = ".";
    Format format = Format::Csv;
    bool assert_mode = false;
    ResolvedConfig config;
};

struct ParseOutcome {
    std::optional<CliInvocation> invocation;
    int exit_code = kOk;
};

/// Merges defaults, the config file and overrides, then validates.
inline ResolvedConfig build_config(Subcommand sub, const std::string& config_path,
                                   const std::vector<std::string>& overrides,
                                   std::optional<unsigned> workers_flag = std::nullopt)
{
    ConfigFile f = ConfigFile::parse(default_config_text(sub));
    if (!config_path.empty()) {
        const ConfigFile user = ConfigFile::load(config_path);
        // a single n in the user file replaces the default grid and vice versa
        if (user.has("n"))
            f.erase("n_grid");
        if (user.has("n_grid"))
            f.erase("n");
        f.merge(user);
    }
    for (const auto& o : overrides) {
        ConfigFile one;
        one.apply_override(o);
        if (one.has("n"))
            f.erase("n_grid");
        if (one.has("n_grid"))
            f.erase("n");
        f.merge(one);
    }
    if (const char* env = std::getenv("GRGC_WORKERS"); env && *env)
        f.set("workers", env);
    if (workers_flag)
        f.set("workers", std::to_string(*workers_flag));

    // rate over all lengths is the unbounded scenario
    if (sub == Subcommand::VerifyRate && f.get("length_set") &&
        (*f.get("length_set") == "all" || *f.get("length_set") == "all-from-3") &&
        f.get("scenario") == std::optional<std::string>("rate-bounded"))
        f.set("scenario", "rate-unbounded");

    ResolvedConfig rc = resolve_config(f, default_scenario(sub));
    // worker count never changes results, so it stays out of the provenance hash
    rc.file.erase("workers");
    if (!scenario_allowed(sub, rc.experiment.scenario))
        throw ConfigError("scenario", std::string("scenario ") + to_string(rc.experiment.scenario) +
                                          " does not belong to " + to_string(sub));
    if (sub == Subcommand::Generate || sub == Subcommand::Census) {
        if (rc.experiment.n_grid.size() != 1 || rc.experiment.n_grid[0] < 1)
            throw ConfigError("n", "needs a single graph size n >= 1");
        try {
            (void)rc.experiment.model.moment(1);
        } catch (const std::exception& e) {
            throw ConfigError("weight.kind", e.what());
        }
    } else {
        rc.experiment.validate();
    }
    return rc;
}

inline ParseOutcome parse_and_validate(int argc, const char* const* argv, std::ostream& out,
                                       std::ostream& err)
{
    CLI::App app{"Cycle counts in rank-1 inhomogeneous random graphs", "grgc"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    CliInvocation inv;
    std::string format = "csv";
    std::optional<unsigned> workers;
    std::map<CLI::App*, Subcommand> subs;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", inv.config_path, "Config file (flat key = value)")
            ->check(CLI::ExistingFile);
        sc->add_option("--override", inv.overrides, "key=value applied after the config file")
            ->take_all();
        sc->add_option("--output-dir", inv.output_dir, "Directory for result files");
        sc->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sc->add_option("--workers", workers, "Worker threads (default: all cores)");
        sc->add_flag("--assert", inv.assert_mode, "Exit 1 if any assert.* threshold fails");
    };
    const std::map<Subcommand, const char*> help{
        {Subcommand::Generate, "Sample one graph and write its edge list"},
        {Subcommand::Census, "Sample one graph and count its cycles by length"},
        {Subcommand::VerifyPoisson, "Poisson limit of C_n(A): mean, dispersion, TV, covariance"},
        {Subcommand::VerifyRate, "TV across an n-grid with log-log slope fits"},
        {Subcommand::NoLongCycles, "Frequency of cycles longer than a log n"},
        {Subcommand::Extremes, "Laws of the shortest and longest cycle"},
        {Subcommand::CramerWold, "Thinned cycle-count sums against their Poisson limit"},
        {Subcommand::Bounds, "Explicit Stein-Chen total-variation bound"},
        {Subcommand::Domination, "Coupled GRG / Norros-Reittu / Chung-Lu subset checks"}};
    for (Subcommand s : all_subcommands()) {
        CLI::App* sc = app.add_subcommand(to_string(s), help.at(s));
        add_common(sc);
        subs[sc] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? kOk : kUsage};
    }
    for (const auto& [sc, s] : subs)
        if (sc->parsed())
            inv.subcommand = s;
    inv.format = format == "json" ? Format::Json : Format::Csv;
    try {
        inv.config = build_config(inv.subcommand, inv.config_path, inv.overrides, workers);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return {std::nullopt, kConfig};
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return {std::nullopt, kIo};
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return {std::nullopt, kConfig};
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return {std::nullopt, kConfig};
    }
    return {std::move(inv), kOk};
}

/// %.17g
inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct AssertOutcome {
    std::string name;
    std::size_t n = 0;
    double observed = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Applies every configured threshold that is relevant to the result's scenario.
inline std::vector<AssertOutcome> evaluate_asserts(const ExperimentResult& res,
                                                   const Thresholds& th)
{
    std::vector<AssertOutcome> out;
    const bool rate = res.scenario == Scenario::RateBounded ||
                      res.scenario == Scenario::RateUnbounded;
    const std::size_t last_n = res.records.empty() ? 0 : res.records.back().n;
    auto max_check = [&](const std::string& key, auto matches, bool absolute, bool last_only) {
        const auto t = th.get(key);
        if (!t)
            return;
        for (const auto& r : res.records) {
            if (!matches(r.quantity) || (last_only && r.n != last_n))
                continue;
            const double v = absolute ? std::abs(r.estimate) : r.estimate;
            out.push_back({key + ":" + r.quantity, r.n, v, *t, v <= *t});
        }
    };
    auto is = [](const char* q) { return [q](const std::string& s) { return s == q; }; };
    auto starts = [](const char* p, const char* suffix = "") {
        return [p, suffix](const std::string& s) {
            const std::string sx(suffix);
            return s.rfind(p, 0) == 0 && (sx.empty() || (s.size() >= sx.size() &&
                                                         s.compare(s.size() - sx.size(),
                                                                   sx.size(), sx) == 0));
        };
    };
    max_check("tv_max", is("tv"), false, rate);
    if (!rate) {
        max_check("mean_z_max", starts("mean_z"), true, false);
        if (res.scenario == Scenario::PoissonFixedK || res.scenario == Scenario::PoissonJoint) {
            max_check("cov_z_max", starts("cov_", "_z"), true, false);
            for (const char* bound : {"dispersion_min", "dispersion_max"}) {
                const auto t = th.get(bound);
                if (!t)
                    continue;
                const bool lower = std::string(bound) == "dispersion_min";
                for (const auto& r : res.records) {
                    if (r.quantity.rfind("dispersion", 0) != 0)
                        continue;
                    out.push_back({std::string(bound) + ":" + r.quantity, r.n, r.estimate, *t,
                                   lower ? r.estimate >= *t : r.estimate <= *t});
                }
            }
        }
    }
    max_check("long_cycle_freq_max", is("long_cycle_freq"), false, false);
    max_check("kol_max", starts("kol_"), false, false);
    max_check("p_no_cycle_z_max", is("p_no_cycle_z"), true, false);
    max_check("violations_max",
              [](const std::string& s) {
                  return s == "edge_violations" || s == "count_violations" ||
                         s == "zero_mismatch";
              },
              false, false);
    max_check("bound_max", is("total_bound"), false, false);
    if (rate) {
        const auto smin = th.get("slope_min"), smax = th.get("slope_max");
        const double slope = res.fit ? res.fit->slope : std::nan("");
        if (smin)
            out.push_back({"slope_min", 0, slope, *smin, res.fit && slope >= *smin});
        if (smax)
            out.push_back({"slope_max", 0, slope, *smax, res.fit && slope <= *smax});
        if (const auto mv = th.get("monotone_violations_max")) {
            const double v = res.reference.at("monotone_violations");
            out.push_back({"monotone_violations_max", 0, v, *mv, v <= *mv});
        }
    }
    return out;
}

inline std::string fnv_hex(std::uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

using Json = nlohmann::ordered_json;

inline Json provenance(const ResolvedConfig& rc)
{
    Json p;
    p["version"] = kVersion;
    p["config_hash"] = fnv_hex(rc.file.hash());
    p["master_seed"] = rc.experiment.master_seed;
    Json cfg = Json::object();
    for (const auto& [k, v] : rc.file.entries())
        cfg[k] = v;
    p["config"] = cfg;
    return p;
}

inline std::string csv_provenance(const ResolvedConfig& rc)
{
    std::string s = std::string("# ") + kVersion + "\n# config_hash=" + fnv_hex(rc.file.hash()) +
                    "\n# master_seed=" + std::to_string(rc.experiment.master_seed) + "\n";
    for (const auto& [k, v] : rc.file.entries())
        s += "# config " + k + " = \"" + v + "\"\n";
    return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out)
        throw IoError("failed writing " + path.string());
}

inline Json fit_json(const RateFit& f)
{
    Json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["residuals"] = f.residuals;
    return j;
}

inline Json asserts_json(const std::vector<AssertOutcome>& as)
{
    Json arr = Json::array();
    for (const auto& a : as) {
        Json j;
        j["name"] = a.name;
        j["n"] = a.n;
        j["observed"] = a.observed;
        j["threshold"] = a.threshold;
        j["pass"] = a.pass;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace detail

/// Result document as JSON text.
inline std::string result_json(const CliInvocation& inv, const ExperimentResult& res,
                               const std::vector<AssertOutcome>& asserts)
{
    detail::Json j;
    j["command"] = to_string(inv.subcommand);
    j["scenario"] = to_string(res.scenario);
    detail::Json recs = detail::Json::array();
    for (const auto& r : res.records) {
        detail::Json o;
        o["n"] = r.n;
        o["model"] = inv.config.experiment.model.describe();
        o["quantity"] = r.quantity;
        o["estimate"] = r.estimate;
        o["se"] = r.se;
        o["reps"] = r.reps;
        o["seed"] = inv.config.experiment.master_seed;
        recs.push_back(o);
    }
    j["records"] = recs;
    if (res.fit)
        j["fit"] = detail::fit_json(*res.fit);
    if (res.fit_log3)
        j["fit_log3"] = detail::fit_json(*res.fit_log3);
    detail::Json ref = detail::Json::object();
    for (const auto& [k, v] : res.reference)
        ref[k] = v;
    j["reference"] = ref;
    j["flags"] = res.flags;
    j["valid"] = res.valid();
    if (!asserts.empty())
        j["assertions"] = detail::asserts_json(asserts);
    j["provenance"] = detail::provenance(inv.config);
    return j.dump(2) + "\n";
}

/// One CSV file per quantity: quantity -> file content.
inline std::map<std::string, std::string> result_csv(const CliInvocation& inv,
                                                     const ExperimentResult& res,
                                                     const std::vector<AssertOutcome>& asserts)
{
    const std::string head = detail::csv_provenance(inv.config);
    std::map<std::string, std::string> files;
    for (const auto& r : res.records) {
        auto& f = files[r.quantity];
        if (f.empty())
            f = head + "n,estimate,se,reps\n";
        f += std::to_string(r.n) + "," + fmt(r.estimate) + "," + fmt(r.se) + "," +
             std::to_string(r.reps) + "\n";
    }
    if (res.fit || res.fit_log3) {
        std::string f = head + "fit,slope,intercept\n";
        if (res.fit)
            f += "log_n," + fmt(res.fit->slope) + "," + fmt(res.fit->intercept) + "\n";
        if (res.fit_log3)
            f += "log3_over_n," + fmt(res.fit_log3->slope) + "," + fmt(res.fit_log3->intercept) +
                 "\n";
        files["fit"] = f;
    }
    if (!asserts.empty()) {
        std::string f = head + "name,n,observed,threshold,pass\n";
        for (const auto& a : asserts)
            f += a.name + "," + std::to_string(a.n) + "," + fmt(a.observed) + "," +
                 fmt(a.threshold) + "," + (a.pass ? "1" : "0") + "\n";
        files["assertions"] = f;
    }
    return files;
}

inline std::string bounds_json(const CliInvocation& inv, const std::vector<SteinChenReport>& rs)
{
    detail::Json j;
    j["command"] = "bounds";
    detail::Json arr = detail::Json::array();
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        detail::Json o;
        o["n"] = inv.config.experiment.n_grid[i];
        o["variant"] = grgc::to_string(r.variant);
        o["b1"] = r.b1;
        o["b2"] = r.b2;
        o["b3"] = r.b3;
        o["summand1"] = r.summand1;
        o["summand2"] = r.summand2;
        o["summand3"] = r.summand3;
        o["totalBound"] = r.total_bound;
        o["method"] = r.method == BoundMethod::Exact ? "exact" : "monte-carlo";
        o["reps"] = r.reps;
        o["se"] = r.se_total;
        o["vacuous"] = r.vacuous();
        o["unrealizableClasses"] = r.unrealizable_classes;
        arr.push_back(o);
    }
    j["reports"] = arr;
    j["provenance"] = detail::provenance(inv.config);
    return j.dump(2) + "\n";
}

inline GraphSample sample_from_config(const ResolvedConfig& rc)
{
    const auto& e = rc.experiment;
    RngStream rng(e.master_seed, "generate", e.n_grid[0], 0);
    const WeightVector w = sample_weights(e.model, e.n_grid[0], rng);
    return sample_graph_fast(e.graph, w, rng);
}

/// Default census scan depth: n for small graphs, else ceil(3 ln n) + 10 in the
/// subcritical regime and 8 otherwise.
inline int default_census_depth(const ResolvedConfig& rc)
{
    const std::size_t n = rc.experiment.n_grid[0];
    if (rc.max_len)
        return std::min<int>(*rc.max_len, static_cast<int>(n));
    if (n <= 12)
        return static_cast<int>(n);
    if (regime(rc.experiment.model) == Regime::Subcritical)
        return log_length_cap(n, 3.0);
    return std::min<int>(8, static_cast<int>(n));
}

inline std::string census_csv(const CliInvocation& inv, const CycleCensus& c)
{
    std::string s = detail::csv_provenance(inv.config);
    s += "# scanned_to=" + std::to_string(c.max_length_scanned()) + "\n";
    s += "k,count\n";
    for (int k = 3; k <= c.max_length_scanned(); ++k)
        s += std::to_string(k) + "," + std::to_string(c.count(k)) + "\n";
    const auto [lo, hi] = shortest_longest(c);
    s += "shortest,longest\n" + std::to_string(lo) + "," + std::to_string(hi) + "\n";
    return s;
}

inline std::string census_json(const CliInvocation& inv, const CycleCensus& c)
{
    detail::Json j;
    j["command"] = "census";
    j["scanned_to"] = c.max_length_scanned();
    detail::Json counts = detail::Json::object();
    for (int k = 3; k <= c.max_length_scanned(); ++k)
        counts[std::to_string(k)] = c.count(k);
    j["counts"] = counts;
    const auto [lo, hi] = shortest_longest(c);
    j["shortest"] = lo;
    j["longest"] = hi;
    j["provenance"] = detail::provenance(inv.config);
    return j.dump(2) + "\n";
}

inline int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err)
{
    namespace fs = std::filesystem;
    const fs::path dir(inv.output_dir);
    const std::string base = to_string(inv.subcommand);
    const bool json = inv.format == Format::Json;
    try {
        switch (inv.subcommand) {
        case Subcommand::Generate: {
            const GraphSample g = sample_from_config(inv.config);
            detail::write_file(dir / "graph.txt", dump_graph(g, inv.config.experiment.master_seed));
            out << "n=" << g.vertex_count() << " m=" << g.edge_count() << " kind="
                << to_string(g.kind()) << " seed=" << inv.config.experiment.master_seed << "\n";
            return kOk;
        }
        case Subcommand::Census: {
            const GraphSample g = sample_from_config(inv.config);
            const int depth = default_census_depth(inv.config);
            const CycleCensus c = g.vertex_count() < 3 ? CycleCensus({}, 3) : census(g, depth);
            if (json)
                detail::write_file(dir / "census.json", census_json(inv, c));
            else
                detail::write_file(dir / "census.csv", census_csv(inv, c));
            const auto [lo, hi] = shortest_longest(c);
            out << "n=" << g.vertex_count() << " cycles=" << c.total() << " shortest=" << lo
                << " longest=" << hi << " scanned_to=" << c.max_length_scanned() << "\n";
            return kOk;
        }
        case Subcommand::Bounds: {
            const auto reports = bounds_reports(inv.config.experiment);
            const ExperimentConfig& e = inv.config.experiment;
            const ExperimentResult res = bounds_result(e, reports);
            const auto asserts = evaluate_asserts(res, inv.config.thresholds);
            if (json) {
                detail::write_file(dir / (base + ".json"), bounds_json(inv, reports));
            } else {
                for (const auto& [q, content] : result_csv(inv, res, asserts))
                    detail::write_file(dir / (base + "_" + q + ".csv"), content);
            }
            for (std::size_t i = 0; i < reports.size(); ++i)
                out << "n=" << e.n_grid[i] << " b1=" << fmt(reports[i].b1)
                    << " b2=" << fmt(reports[i].b2) << " total_bound="
                    << fmt(reports[i].total_bound) << "\n";
            bool ok = true;
            for (const auto& a : asserts)
                ok = ok && a.pass;
            return inv.assert_mode && !ok ? kAssertFailed : kOk;
        }
        default: break;
        }
        const ExperimentResult res = run_experiment(inv.config.experiment);
        const auto asserts = evaluate_asserts(res, inv.config.thresholds);
        if (json) {
            detail::write_file(dir / (base + ".json"), result_json(inv, res, asserts));
        } else {
            for (const auto& [q, content] : result_csv(inv, res, asserts))
                detail::write_file(dir / (base + "_" + q + ".csv"), content);
        }
        for (std::size_t n : inv.config.experiment.n_grid) {
            out << "n=" << n;
            for (const auto& r : res.records)
                if (r.n == n)
                    out << " " << r.quantity << "=" << fmt(r.estimate);
            out << "\n";
        }
        if (res.fit)
            out << "fit slope=" << fmt(res.fit->slope) << "\n";
        for (const auto& f : res.flags)
            err << "flag: " << f << "\n";
        bool ok = res.valid();
        for (const auto& a : asserts) {
            if (inv.assert_mode)
                out << (a.pass ? "PASS " : "FAIL ") << a.name << " n=" << a.n
                    << " observed=" << fmt(a.observed) << " threshold=" << fmt(a.threshold)
                    << "\n";
            ok = ok && a.pass;
        }
        return inv.assert_mode && !ok ? kAssertFailed : kOk;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr)
{
    ParseOutcome p = parse_and_validate(argc, argv, out, err);
    if (!p.invocation)
        return p.exit_code;
    return execute(*p.invocation, out, err);
}

}  // namespace grgc::cli
