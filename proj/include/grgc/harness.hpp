#pragma once

// Seeded Monte Carlo scenarios, one per limit statement, run over a grid of
// graph sizes. Replication r at size n always uses the stream
// StreamId{master_seed, scenario name, n, r}; weights (annealed mode) are
// drawn first, then the graph, then any thinning variates. Results merge
// through exact integer histograms, so they do not depend on worker count or
// scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "grgc/cycles.hpp"
#include "grgc/errors.hpp"
#include "grgc/graph.hpp"
#include "grgc/poisson.hpp"
#include "grgc/rng.hpp"
#include "grgc/stats.hpp"
#include "grgc/steinchen.hpp"
#include "grgc/weights.hpp"

namespace grgc {

enum class Scenario {
    PoissonFixedK,
    PoissonJoint,
    RateBounded,
    NoLongCycles,
    RateUnbounded,
    Extremes,
    Domination,
    CramerWold,
    BoundsCheck
};

inline const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::PoissonFixedK: return "poisson-fixed-k";
    case Scenario::PoissonJoint: return "poisson-joint";
    case Scenario::RateBounded: return "rate-bounded";
    case Scenario::NoLongCycles: return "no-long-cycles";
    case Scenario::RateUnbounded: return "rate-unbounded";
    case Scenario::Extremes: return "extremes";
    case Scenario::Domination: return "domination";
    case Scenario::CramerWold: return "cramer-wold";
    case Scenario::BoundsCheck: return "bounds-check";
    }
    return "?";
}

inline Scenario parse_scenario(const std::string& s)
{
    for (Scenario sc : {Scenario::PoissonFixedK, Scenario::PoissonJoint, Scenario::RateBounded,
                        Scenario::NoLongCycles, Scenario::RateUnbounded, Scenario::Extremes,
                        Scenario::Domination, Scenario::CramerWold, Scenario::BoundsCheck})
        if (s == to_string(sc))
            return sc;
    throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

enum class Sampling { Annealed, Quenched };

/// A set of cycle lengths, either finite or all of {3, 4, ...}.
struct LengthSet {
    bool all_from_3 = false;
    std::set<int> lengths;

    static LengthSet all() { return {true, {}}; }
    static LengthSet of(std::set<int> ks) { return {false, std::move(ks)}; }

    bool bounded() const noexcept { return !all_from_3; }
    int max() const { return lengths.empty() ? 0 : *lengths.rbegin(); }
    bool contains(int k) const { return all_from_3 ? k >= 3 : lengths.count(k) > 0; }
};

struct ExperimentConfig {
    Scenario scenario = Scenario::PoissonFixedK;
    WeightModel model = WeightModel::constant(0.5);
    ModelKind graph = ModelKind::GRG;
    std::vector<std::size_t> n_grid{400};
    std::uint64_t reps = 10000;
    LengthSet lengths = LengthSet::of({3});
    double a_log_constant = 3.0;
    std::uint64_t master_seed = 1;
    Sampling sampling = Sampling::Annealed;
    std::map<int, double> thinning;  // cramer-wold retention probabilities q_k
    Neighborhood variant = Neighborhood::VertexSharing;
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const;
};

struct Record {
    std::size_t n = 0;
    std::string quantity;
    double estimate = 0.0;
    double se = 0.0;
    std::uint64_t reps = 0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

struct RatePoint {
    double n = 0.0;
    double estimate = 0.0;
    double se = 0.0;
};

struct ExperimentResult {
    Scenario scenario = Scenario::PoissonFixedK;
    std::vector<Record> records;
    std::optional<RateFit> fit;       // ln(estimate) against ln(n)
    std::optional<RateFit> fit_log3;  // ln(estimate) against ln(ln(n)^3 / n)
    std::map<std::string, double> reference;
    std::vector<std::string> flags;

    bool valid() const noexcept { return flags.empty(); }

    const Record& at(std::size_t n, const std::string& quantity) const
    {
        for (const auto& r : records)
            if (r.n == n && r.quantity == quantity)
                return r;
        throw RangeError("no record " + quantity + " at n=" + std::to_string(n));
    }

    std::vector<const Record*> series(const std::string& quantity) const
    {
        std::vector<const Record*> out;
        for (const auto& r : records)
            if (r.quantity == quantity)
                out.push_back(&r);
        return out;
    }
};

/// Least squares of ln(estimate) on ln(n).
inline RateFit fit_rate(const std::vector<RatePoint>& points)
{
    if (points.size() < 3)
        throw DomainError("fit_rate needs at least 3 points");
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (!(p.estimate > 0.0) || !(p.n > 0.0))
            throw DomainError("fit_rate needs positive n and estimates");
        x.push_back(std::log(p.n));
        y.push_back(std::log(p.estimate));
    }
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    RateFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
    return f;
}

/// Exact joint histogram of small integer observation vectors.
class JointHistogram {
  public:
    using Observation = std::vector<std::uint64_t>;

    void add(Observation obs)
    {
        ++cells_[std::move(obs)];
        ++n_;
    }

    void merge(const JointHistogram& o)
    {
        for (const auto& [k, c] : o.cells_)
            cells_[k] += c;
        n_ += o.n_;
    }

    std::uint64_t size() const noexcept { return n_; }
    const std::map<Observation, std::uint64_t>& cells() const noexcept { return cells_; }

    EmpiricalLaw marginal(std::size_t j) const
    {
        EmpiricalLaw law;
        for (const auto& [k, c] : cells_)
            law.add(k.at(j), c);
        return law;
    }

    double mean(std::size_t j) const
    {
        double s = 0.0;
        for (const auto& [k, c] : cells_)
            s += static_cast<double>(k.at(j)) * static_cast<double>(c);
        return s / static_cast<double>(n_);
    }

    /// Unbiased covariance of coordinates i and j.
    double covariance(std::size_t i, std::size_t j) const
    {
        if (n_ < 2)
            return 0.0;
        const double mi = mean(i), mj = mean(j);
        double s = 0.0;
        for (const auto& [k, c] : cells_)
            s += (k.at(i) - mi) * (k.at(j) - mj) * static_cast<double>(c);
        return s / static_cast<double>(n_ - 1);
    }

    double variance(std::size_t j) const { return covariance(j, j); }

    double se_mean(std::size_t j) const { return std::sqrt(variance(j) / n_); }

    /// Delta-method SE of the covariance estimate (of the variance when i == j).
    double se_covariance(std::size_t i, std::size_t j) const
    {
        if (n_ < 2)
            return 0.0;
        const double mi = mean(i), mj = mean(j);
        const double cov = covariance(i, j);
        double s = 0.0;
        for (const auto& [k, c] : cells_) {
            const double d = (k.at(i) - mi) * (k.at(j) - mj) - cov;
            s += d * d * static_cast<double>(c);
        }
        return std::sqrt(s / static_cast<double>(n_ - 1) / n_);
    }

    bool operator==(const JointHistogram&) const = default;

  private:
    std::map<Observation, std::uint64_t> cells_;
    std::uint64_t n_ = 0;
};

inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs body(r) for r in [0, reps) on `workers` threads, in fixed-size chunks.
template <class Body>
JointHistogram run_replications(std::uint64_t reps, unsigned workers, Body&& body)
{
    constexpr std::uint64_t kChunk = 2048;
    const std::uint64_t chunks = (reps + kChunk - 1) / kChunk;
    std::vector<JointHistogram> parts(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto work = [&] {
        try {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= chunks || failed.load())
                    return;
                const std::uint64_t end = std::min(reps, (c + 1) * kChunk);
                for (std::uint64_t r = c * kChunk; r < end; ++r)
                    parts[c].add(body(r));
            }
        } catch (...) {
            if (!failed.exchange(true))
                error = std::current_exception();
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(resolve_workers(workers),
                                                       static_cast<unsigned>(chunks)));
    if (w == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < w; ++i)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    JointHistogram out;
    for (const auto& p : parts)
        out.merge(p);
    return out;
}

/// Census cap for scans over unbounded length sets: ceil(a ln n) + 10, at most n.
inline int log_length_cap(std::size_t n, double a)
{
    const double cap = std::ceil(a * std::log(static_cast<double>(n))) + 10.0;
    return static_cast<int>(std::min<double>(static_cast<double>(n), cap));
}

/// floor(a ln n): cycles longer than this count as long.
inline int long_cycle_threshold(std::size_t n, double a)
{
    return static_cast<int>(std::floor(a * std::log(static_cast<double>(n))));
}

namespace detail {

inline bool needs_subcritical(Scenario s)
{
    return s == Scenario::RateBounded || s == Scenario::RateUnbounded ||
           s == Scenario::NoLongCycles || s == Scenario::Extremes;
}

inline CycleCensus census_capped(const GraphSample& g, int max_len)
{
    if (g.vertex_count() < 3)
        return CycleCensus({}, std::max(3, max_len));
    return census(g, std::min<int>(max_len, static_cast<int>(g.vertex_count())));
}

inline std::uint64_t count_lengths(const CycleCensus& c, const LengthSet& a)
{
    if (a.all_from_3)
        return c.total();
    std::uint64_t s = 0;
    for (int k : a.lengths)
        if (k <= c.max_length_scanned())
            s += c.count(k);
    return s;
}

class Replicator {
  public:
    Replicator(const ExperimentConfig& cfg, std::size_t n) : cfg_(cfg), n_(n)
    {
        if (cfg.sampling == Sampling::Quenched) {
            RngStream ws(cfg.master_seed, std::string(to_string(cfg.scenario)) + "/weights", n, 0);
            quenched_ = sample_weights(cfg.model, n, ws);
        }
    }

    RngStream stream(std::uint64_t rep) const
    {
        return RngStream(cfg_.master_seed, to_string(cfg_.scenario), n_, rep);
    }

    WeightVector weights(RngStream& rng) const
    {
        return quenched_ ? *quenched_ : sample_weights(cfg_.model, n_, rng);
    }

    GraphSample graph(RngStream& rng) const
    {
        const WeightVector w = weights(rng);
        return sample_graph_fast(cfg_.graph, w, rng);
    }

  private:
    const ExperimentConfig& cfg_;
    std::size_t n_;
    std::optional<WeightVector> quenched_;
};

inline RngStream bootstrap_stream(const ExperimentConfig& cfg, std::size_t n)
{
    return RngStream(cfg.master_seed, std::string(to_string(cfg.scenario)) + "/bootstrap", n, 0);
}

inline double lambda_sum(const PoissonReference& ref, const LengthSet& a)
{
    if (a.all_from_3)
        return ref.lambda_tail(3);
    double s = 0.0;
    for (int k : a.lengths)
        s += ref.lambda_k(k);
    return s;
}

inline void add_mean_records(ExperimentResult& res, const JointHistogram& h, std::size_t n,
                             std::size_t j, const std::string& suffix)
{
    const std::uint64_t m = h.size();
    const double mean = h.mean(j);
    const double var = h.variance(j);
    const double se_mean = h.se_mean(j);
    const double se_var = h.se_covariance(j, j);
    res.records.push_back({n, "mean" + suffix, mean, se_mean, m});
    res.records.push_back({n, "variance" + suffix, var, se_var, m});
    const double disp = mean > 0.0 ? var / mean : 0.0;
    const double se_disp =
        mean > 0.0 ? std::hypot(se_var / mean, var * se_mean / (mean * mean)) : 0.0;
    res.records.push_back({n, "dispersion" + suffix, disp, se_disp, m});
}

inline void check_guard(ExperimentResult& res, const ExperimentConfig& cfg, std::size_t n,
                        int cap)
{
    // replication 0 rescanned at full depth must have nothing above the cap
    if (cap >= static_cast<int>(n) || n < 3)
        return;
    Replicator rep(cfg, n);
    RngStream rng = rep.stream(0);
    const GraphSample g = rep.graph(rng);
    const CycleCensus full = census(g, static_cast<int>(n));
    std::uint64_t above = 0;
    for (int k = cap + 1; k <= full.max_length_scanned(); ++k)
        above += full.count(k);
    res.records.push_back({n, "guard_cycles_above_cap", static_cast<double>(above), 0.0, 1});
    if (above > 0)
        res.flags.push_back("census cap " + std::to_string(cap) + " truncated a cycle at n=" +
                            std::to_string(n));
}

}  // namespace detail

inline void ExperimentConfig::validate() const
{
    if (n_grid.empty())
        throw ConfigError("n_grid", "must contain at least one size");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1)
            throw ConfigError("n_grid", "sizes must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw ConfigError("n_grid", "must be strictly increasing");
    }
    if (reps < 1)
        throw ConfigError("reps", "must be >= 1");
    if (!(a_log_constant > 0.0))
        throw ConfigError("a_log_constant", "must be positive");
    for (int k : lengths.lengths)
        if (k < 3)
            throw ConfigError("length_set", "cycle lengths start at 3");

    const Regime reg = regime(model);
    if (detail::needs_subcritical(scenario) && reg != Regime::Subcritical)
        throw ConfigError("weight.kind", std::string(to_string(scenario)) +
                                             " requires a subcritical weight model, got " +
                                             to_string(reg) + " " + model.describe());

    switch (scenario) {
    case Scenario::PoissonFixedK:
    case Scenario::RateBounded:
        if (!lengths.bounded())
            throw ConfigError("length_set", "unbounded length set: use rate-unbounded");
        break;
    case Scenario::PoissonJoint:
        if (!lengths.bounded() || lengths.lengths.size() < 2)
            throw ConfigError("length_set", "poisson-joint needs at least two lengths");
        break;
    case Scenario::CramerWold:
        if (!lengths.bounded())
            throw ConfigError("length_set", "cramer-wold needs a bounded length set");
        for (auto [k, q] : thinning) {
            if (!lengths.contains(k))
                throw ConfigError("q", "thinning key " + std::to_string(k) + " not in length_set");
            if (!(q >= 0.0 && q <= 1.0))
                throw ConfigError("q", "thinning probabilities must lie in [0,1]");
        }
        break;
    case Scenario::BoundsCheck:
        if (!lengths.bounded())
            throw ConfigError("length_set", "bounds need a bounded length set");
        break;
    default: break;
    }
    if (scenario == Scenario::RateBounded || scenario == Scenario::RateUnbounded)
        if (n_grid.size() < 3)
            throw ConfigError("n_grid", "rate fits need at least 3 grid points");

    const bool needs_m4 = scenario == Scenario::PoissonFixedK ||
                          scenario == Scenario::RateBounded ||
                          scenario == Scenario::RateUnbounded || scenario == Scenario::Extremes;
    if (needs_m4 && !model.finite_moment(4))
        throw ConfigError("weight.kind", "scenario requires a finite fourth moment");
    if (!model.finite_moment(2) && scenario != Scenario::Domination)
        throw ConfigError("weight.kind", "scenario requires a finite second moment");

    if (lengths.bounded() && scenario != Scenario::Domination)
        for (std::size_t n : n_grid)
            if (static_cast<std::size_t>(lengths.max()) > n)
                throw ConfigError("length_set", "lengths exceed n=" + std::to_string(n));
}

/// Marginal check: mean, variance and TV of C_n(A) against
/// Poi(sum_{k in A} lambda_k).
inline ExperimentResult run_poisson_fixed_k(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::PoissonFixedK && cfg.scenario != Scenario::RateBounded &&
        cfg.scenario != Scenario::RateUnbounded)
        throw ConfigError("scenario", "run_poisson_fixed_k needs a fixed-k or rate scenario");
    const PoissonReference ref(cfg.model.rho());
    const double mu = detail::lambda_sum(ref, cfg.lengths);
    ExperimentResult res;
    res.scenario = cfg.scenario;
    res.reference["lambda"] = mu;
    for (std::size_t n : cfg.n_grid) {
        const int cap = cfg.lengths.bounded() ? cfg.lengths.max()
                                              : log_length_cap(n, cfg.a_log_constant);
        detail::Replicator rep(cfg, n);
        const JointHistogram h = run_replications(cfg.reps, cfg.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const GraphSample g = rep.graph(rng);
            return JointHistogram::Observation{
                detail::count_lengths(detail::census_capped(g, cap), cfg.lengths)};
        });
        detail::add_mean_records(res, h, n, 0, "");
        res.records.push_back(
            {n, "mean_z", (h.mean(0) - mu) / std::max(h.se_mean(0), 1e-300), 1.0, h.size()});
        RngStream boot = detail::bootstrap_stream(cfg, n);
        const auto tv = tv_distance(h.marginal(0), mu, boot);
        res.records.push_back({n, "tv", tv.value, tv.standard_error, h.size()});
        if (!cfg.lengths.bounded())
            detail::check_guard(res, cfg, n, cap);
    }
    return res;
}

/// Asymptotic independence: covariance matrix of (C_n(k))_{k in A}.
inline ExperimentResult run_poisson_joint(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::PoissonJoint)
        throw ConfigError("scenario", "run_poisson_joint needs scenario poisson-joint");
    const PoissonReference ref(cfg.model.rho());
    const std::vector<int> ks(cfg.lengths.lengths.begin(), cfg.lengths.lengths.end());
    ExperimentResult res;
    res.scenario = cfg.scenario;
    for (int k : ks)
        res.reference["lambda_" + std::to_string(k)] = ref.lambda_k(k);
    for (std::size_t n : cfg.n_grid) {
        detail::Replicator rep(cfg, n);
        const JointHistogram h = run_replications(cfg.reps, cfg.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const GraphSample g = rep.graph(rng);
            const CycleCensus c = detail::census_capped(g, ks.back());
            JointHistogram::Observation obs;
            for (int k : ks)
                obs.push_back(c.count(k));
            return obs;
        });
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::string si = "_k" + std::to_string(ks[i]);
            detail::add_mean_records(res, h, n, i, si);
            res.records.push_back({n, "mean_z" + si,
                                   (h.mean(i) - ref.lambda_k(ks[i])) /
                                       std::max(h.se_mean(i), 1e-300),
                                   1.0, h.size()});
            for (std::size_t j = i + 1; j < ks.size(); ++j) {
                const std::string name = "cov_k" + std::to_string(ks[i]) + "_k" +
                                         std::to_string(ks[j]);
                const double se = h.se_covariance(i, j);
                res.records.push_back({n, name, h.covariance(i, j), se, h.size()});
                res.records.push_back({n, name + "_z", h.covariance(i, j) / std::max(se, 1e-300),
                                       1.0, h.size()});
            }
        }
    }
    return res;
}

/// TV per grid point plus log-log fits. Bounded A uses the fixed-k pipeline;
/// A = all lengths scans to ceil(a ln n) + 10 with a full-depth guard.
inline ExperimentResult run_rate(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::RateBounded && cfg.scenario != Scenario::RateUnbounded)
        throw ConfigError("scenario", "run_rate needs rate-bounded or rate-unbounded");
    ExperimentResult res = run_poisson_fixed_k(cfg);
    std::vector<RatePoint> pts, pts3;
    int violations = 0;
    const Record* prev = nullptr;
    for (const Record* r : res.series("tv")) {
        const double n = static_cast<double>(r->n);
        pts.push_back({n, r->estimate, r->se});
        pts3.push_back({std::pow(std::log(n), 3) / n, r->estimate, r->se});
        if (prev && r->estimate > prev->estimate + 2.0 * std::hypot(r->se, prev->se))
            ++violations;
        prev = r;
    }
    res.reference["monotone_violations"] = violations;
    const bool positive =
        std::all_of(pts.begin(), pts.end(), [](const RatePoint& p) { return p.estimate > 0.0; });
    if (pts.size() >= 3 && positive) {
        res.fit = fit_rate(pts);
        res.fit_log3 = fit_rate(pts3);
        res.reference["slope"] = res.fit->slope;
        res.reference["slope_log3"] = res.fit_log3->slope;
    }
    return res;
}

/// Frequency of any cycle longer than floor(a ln n), with the decay exponent
/// a ln p, p = 2E[W^2] / (E[W^2] + E[W]).
inline ExperimentResult run_no_long_cycles(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::NoLongCycles)
        throw ConfigError("scenario", "run_no_long_cycles needs scenario no-long-cycles");
    ExperimentResult res;
    res.scenario = cfg.scenario;
    const double p = cfg.model.long_cycle_base();
    res.reference["p"] = p;
    res.reference["bound_exponent"] = cfg.a_log_constant * std::log(p);
    for (std::size_t n : cfg.n_grid) {
        const int threshold = std::max(2, long_cycle_threshold(n, cfg.a_log_constant));
        detail::Replicator rep(cfg, n);
        const JointHistogram h = run_replications(cfg.reps, cfg.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const GraphSample g = rep.graph(rng);
            std::uint64_t longer = 0;
            if (n >= 3 && static_cast<std::size_t>(threshold) < n) {
                const CycleCensus c = census(g, static_cast<int>(n));
                for (int k = threshold + 1; k <= c.max_length_scanned(); ++k)
                    longer += c.count(k);
            }
            return JointHistogram::Observation{longer > 0 ? 1u : 0u};
        });
        const double freq = h.mean(0);
        res.records.push_back({n, "threshold_length", static_cast<double>(threshold), 0.0,
                               h.size()});
        res.records.push_back({n, "long_cycle_freq", freq, h.se_mean(0), h.size()});
        res.records.push_back(
            {n, "bound_shape", std::pow(static_cast<double>(n), res.reference["bound_exponent"]),
             0.0, h.size()});
    }
    return res;
}

/// Laws of the shortest and longest cycle (full-depth census) against S and L.
inline ExperimentResult run_extremes(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::Extremes)
        throw ConfigError("scenario", "run_extremes needs scenario extremes");
    const PoissonReference ref(cfg.model.rho());
    ExperimentResult res;
    res.scenario = cfg.scenario;
    res.reference["p_no_cycle"] = ref.no_cycle_probability();
    for (std::size_t n : cfg.n_grid) {
        detail::Replicator rep(cfg, n);
        const JointHistogram h = run_replications(cfg.reps, cfg.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const GraphSample g = rep.graph(rng);
            const auto [lo, hi] = shortest_longest(detail::census_capped(g, static_cast<int>(n)));
            return JointHistogram::Observation{static_cast<std::uint64_t>(lo),
                                               static_cast<std::uint64_t>(hi)};
        });
        std::uint64_t mismatched = 0, none = 0;
        for (const auto& [obs, c] : h.cells()) {
            if ((obs[0] == 0) != (obs[1] == 0))
                mismatched += c;
            if (obs[0] == 0)
                none += c;
        }
        RngStream boot = detail::bootstrap_stream(cfg, n);
        const auto ks = kolmogorov_distance(h.marginal(0), cycle_length_cdf(ref, false), boot);
        const auto kl = kolmogorov_distance(h.marginal(1), cycle_length_cdf(ref, true), boot);
        const double m = static_cast<double>(h.size());
        const double p0 = static_cast<double>(none) / m;
        const double se0 = std::sqrt(p0 * (1.0 - p0) / m);
        res.records.push_back({n, "kol_shortest", ks.value, ks.standard_error, h.size()});
        res.records.push_back({n, "kol_longest", kl.value, kl.standard_error, h.size()});
        res.records.push_back({n, "p_no_cycle", p0, se0, h.size()});
        res.records.push_back({n, "p_no_cycle_z",
                               (p0 - ref.no_cycle_probability()) / std::max(se0, 1e-300), 1.0,
                               h.size()});
        res.records.push_back(
            {n, "zero_mismatch", static_cast<double>(mismatched), 0.0, h.size()});
    }
    return res;
}

/// Thinned sums sum_k Bin(C_n(k), q_k) against Poi(sum_k q_k lambda_k).
inline ExperimentResult run_cramer_wold(const ExperimentConfig& cfg, std::map<int, double> q)
{
    ExperimentConfig c = cfg;
    c.thinning = std::move(q);
    c.validate();
    if (c.scenario != Scenario::CramerWold)
        throw ConfigError("scenario", "run_cramer_wold needs scenario cramer-wold");
    const PoissonReference ref(c.model.rho());
    double mu = 0.0;
    std::vector<std::pair<int, double>> qs;
    for (int k : c.lengths.lengths) {
        const auto it = c.thinning.find(k);
        const double qk = it == c.thinning.end() ? 1.0 : it->second;
        qs.emplace_back(k, qk);
        mu += qk * ref.lambda_k(k);
    }
    ExperimentResult res;
    res.scenario = c.scenario;
    res.reference["mu"] = mu;
    for (std::size_t n : c.n_grid) {
        detail::Replicator rep(c, n);
        const JointHistogram h = run_replications(c.reps, c.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const GraphSample g = rep.graph(rng);
            const CycleCensus census_n = detail::census_capped(g, c.lengths.max());
            std::uint64_t sum = 0;
            for (auto [k, qk] : qs)
                sum += thin(census_n.count(k), qk, rng);
            return JointHistogram::Observation{sum};
        });
        detail::add_mean_records(res, h, n, 0, "");
        res.records.push_back(
            {n, "mean_z", (h.mean(0) - mu) / std::max(h.se_mean(0), 1e-300), 1.0, h.size()});
        RngStream boot = detail::bootstrap_stream(c, n);
        const auto tv = tv_distance(h.marginal(0), mu, boot);
        res.records.push_back({n, "tv", tv.value, tv.standard_error, h.size()});
    }
    return res;
}

inline ExperimentResult run_cramer_wold(const ExperimentConfig& cfg)
{
    return run_cramer_wold(cfg, cfg.thinning);
}

/// Coupled GRG / NR / CL samples: subset violations (must be zero) and the
/// induced per-sample ordering of cycle counts.
inline ExperimentResult run_domination(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.scenario != Scenario::Domination)
        throw ConfigError("scenario", "run_domination needs scenario domination");
    ExperimentResult res;
    res.scenario = cfg.scenario;
    const bool sub = regime(cfg.model) == Regime::Subcritical;
    for (std::size_t n : cfg.n_grid) {
        const int cap = cfg.lengths.bounded()
                            ? cfg.lengths.max()
                            : (sub ? log_length_cap(n, cfg.a_log_constant) : 8);
        detail::Replicator rep(cfg, n);
        const JointHistogram h = run_replications(cfg.reps, cfg.workers, [&](std::uint64_t r) {
            RngStream rng = rep.stream(r);
            const WeightVector w = rep.weights(rng);
            const CoupledSample s = sample_coupled(w, rng);
            std::uint64_t edge_viol = 0;
            for (auto [u, v] : s.grg.edges())
                edge_viol += !s.norros_reittu.has_edge(u, v);
            for (auto [u, v] : s.norros_reittu.edges())
                edge_viol += !s.chung_lu.has_edge(u, v);
            std::uint64_t count_viol = 0, cg = 0, cn = 0, cc = 0;
            if (n >= 3) {
                const CycleCensus a = detail::census_capped(s.grg, cap);
                const CycleCensus b = detail::census_capped(s.norros_reittu, cap);
                const CycleCensus c = detail::census_capped(s.chung_lu, cap);
                for (int k = 3; k <= a.max_length_scanned(); ++k) {
                    if (!cfg.lengths.contains(k))
                        continue;
                    count_viol += a.count(k) > b.count(k) || b.count(k) > c.count(k);
                }
                cg = detail::count_lengths(a, cfg.lengths);
                cn = detail::count_lengths(b, cfg.lengths);
                cc = detail::count_lengths(c, cfg.lengths);
            }
            return JointHistogram::Observation{edge_viol > 0 ? 1u : 0u, count_viol > 0 ? 1u : 0u,
                                               cg, cn, cc};
        });
        const double m = static_cast<double>(h.size());
        res.records.push_back({n, "edge_violations", h.mean(0) * m, 0.0, h.size()});
        res.records.push_back({n, "count_violations", h.mean(1) * m, 0.0, h.size()});
        res.records.push_back({n, "mean_grg", h.mean(2), h.se_mean(2), h.size()});
        res.records.push_back({n, "mean_norros_reittu", h.mean(3), h.se_mean(3), h.size()});
        res.records.push_back({n, "mean_chung_lu", h.mean(4), h.se_mean(4), h.size()});
    }
    return res;
}

/// Stein-Chen report per grid point: closed form for constant weights,
/// Monte Carlo with `reps` weight vectors per input otherwise.
inline std::vector<SteinChenReport> bounds_reports(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<SteinChenReport> out;
    for (std::size_t n : cfg.n_grid) {
        BoundInputs in;
        BoundMethod method = BoundMethod::Exact;
        if (cfg.model.kind() == WeightKind::Constant) {
            in = exact_bound_inputs(cfg.model, n, cfg.lengths.lengths);
        } else {
            RngStream rng(cfg.master_seed, to_string(Scenario::BoundsCheck), n, 0);
            in = mc_bound_inputs(cfg.model, n, cfg.lengths.lengths, cfg.reps, rng);
            method = BoundMethod::MonteCarlo;
        }
        SteinChenReport r = lemma_tv_bound(cfg.model, n, cfg.lengths.lengths, in, cfg.variant);
        r.method = method;
        r.reps = method == BoundMethod::Exact ? 0 : cfg.reps;
        out.push_back(r);
    }
    return out;
}

inline ExperimentResult bounds_result(const ExperimentConfig& cfg,
                                      const std::vector<SteinChenReport>& reports)
{
    ExperimentResult res;
    res.scenario = cfg.scenario;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const std::size_t n = cfg.n_grid[i];
        res.records.push_back({n, "b1", r.b1, 0.0, r.reps});
        res.records.push_back({n, "b2", r.b2, 0.0, r.reps});
        res.records.push_back({n, "summand1", r.summand1, r.se_summand1, r.reps});
        res.records.push_back({n, "summand2", r.summand2, r.se_summand2, r.reps});
        res.records.push_back({n, "summand3", r.summand3, r.se_summand3, r.reps});
        res.records.push_back({n, "total_bound", r.total_bound, r.se_total, r.reps});
    }
    return res;
}

inline ExperimentResult run_bounds(const ExperimentConfig& cfg)
{
    if (cfg.scenario != Scenario::BoundsCheck)
        throw ConfigError("scenario", "run_bounds needs scenario bounds-check");
    return bounds_result(cfg, bounds_reports(cfg));
}

/// Dispatch on cfg.scenario.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    switch (cfg.scenario) {
    case Scenario::PoissonFixedK: return run_poisson_fixed_k(cfg);
    case Scenario::PoissonJoint: return run_poisson_joint(cfg);
    case Scenario::RateBounded:
    case Scenario::RateUnbounded: return run_rate(cfg);
    case Scenario::NoLongCycles: return run_no_long_cycles(cfg);
    case Scenario::Extremes: return run_extremes(cfg);
    case Scenario::Domination: return run_domination(cfg);
    case Scenario::CramerWold: return run_cramer_wold(cfg);
    case Scenario::BoundsCheck: return run_bounds(cfg);
    }
    throw ConfigError("scenario", "unhandled scenario");
}

}  // namespace grgc
