#pragma once

// Stein-Chen quantities for cycle counts: conditional cycle probabilities,
// exhaustive b1/b2 sums, the pair probabilities p_k and p_{k,l,s,i}, and the
// explicit three-summand total-variation bound built from them.
//
// b3 is never estimated. With edge-sharing neighbourhoods the indicators
// outside B_alpha are conditionally independent given the weights; with
// vertex-sharing neighbourhoods they are independent outright. In both cases
// b3 is identically zero.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grgc/cycles.hpp"
#include "grgc/errors.hpp"
#include "grgc/graph.hpp"
#include "grgc/poisson.hpp"
#include "grgc/stats.hpp"
#include "grgc/weights.hpp"

namespace grgc {

enum class Neighborhood { EdgeSharing, VertexSharing };

inline const char* to_string(Neighborhood v)
{
    return v == Neighborhood::EdgeSharing ? "edge-sharing" : "vertex-sharing";
}

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// prod over the cycle's edges {x,y} of W_x W_y / (L_n + W_x W_y).
inline double conditional_cycle_prob(const WeightVector& w, const CanonicalCycle& alpha)
{
    const std::size_t k = alpha.length();
    double log_p = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Vertex x = alpha[i], y = alpha[(i + 1) % k];
        if (x >= w.size() || y >= w.size())
            throw DomainError("cycle vertex outside the weight vector");
        log_p += std::log(edge_prob(ModelKind::GRG, w[x], w[y], w.total()));
    }
    return std::exp(log_p);
}

namespace detail {

/// Calls fn(tuple) for every tuple in I_len over vertices 0..m-1.
template <class Fn>
void for_each_canonical(std::size_t m, std::size_t len, Fn&& fn)
{
    if (len < 3 || len > m)
        return;
    std::vector<Vertex> t;
    std::vector<char> used(m, 0);
    auto rec = [&](auto&& self) -> void {
        if (t.size() == len) {
            if (t[1] < t.back())
                fn(std::span<const Vertex>(t));
            return;
        }
        for (Vertex w = t[0] + 1; w < m; ++w) {
            if (used[w])
                continue;
            used[w] = 1;
            t.push_back(w);
            self(self);
            t.pop_back();
            used[w] = 0;
        }
    };
    for (Vertex first = 0; first + 2 < m; ++first) {
        t.assign(1, first);
        used[first] = 1;
        rec(rec);
        used[first] = 0;
    }
}

inline std::size_t pair_index(Vertex a, Vertex b, std::size_t n)
{
    if (a > b)
        std::swap(a, b);
    return a * n - a * (a + 1) / 2 + (b - a - 1);
}

struct CycleMasks {
    std::uint64_t vertices = 0;
    std::uint64_t edges = 0;
    double log_p = 0.0;
};

inline std::vector<CycleMasks> cycle_masks(const WeightVector& w, const std::set<int>& lengths,
                                           std::vector<double>& log_edge)
{
    const std::size_t n = w.size();
    log_edge.assign(n * (n - 1) / 2, 0.0);
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            log_edge[pair_index(a, b, n)] =
                std::log(edge_prob(ModelKind::GRG, w[a], w[b], w.total()));
    std::vector<CycleMasks> out;
    for (int k : lengths) {
        for_each_canonical(n, static_cast<std::size_t>(k), [&](std::span<const Vertex> t) {
            CycleMasks m;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const std::size_t e = pair_index(t[i], t[(i + 1) % t.size()], n);
                m.vertices |= std::uint64_t{1} << t[i];
                m.edges |= std::uint64_t{1} << e;
                m.log_p += log_edge[e];
            }
            out.push_back(m);
        });
    }
    return out;
}

inline void check_exact_inputs(const WeightVector& w, const std::set<int>& lengths,
                               std::size_t limit)
{
    constexpr std::size_t kHardLimit = 11;  // edge masks must fit in 64 bits
    if (w.size() > limit || w.size() > kHardLimit)
        throw RefusalError("exact Stein-Chen sums refuse n=" + std::to_string(w.size()));
    for (int k : lengths)
        if (k < 3 || static_cast<std::size_t>(k) > w.size())
            throw DomainError("length set must lie in [3, n]");
}

inline bool related(const CycleMasks& a, const CycleMasks& b, Neighborhood v)
{
    return v == Neighborhood::VertexSharing ? (a.vertices & b.vertices) != 0
                                            : (a.edges & b.edges) != 0;
}

}  // namespace detail

constexpr std::size_t kExactPairLimit = 8;

/// sum_{alpha in I} sum_{beta in B_alpha} p_alpha p_beta, conditional on the
/// weights, by exhaustive enumeration. B_alpha contains alpha itself.
inline double b1_exact(const WeightVector& w, const std::set<int>& lengths, Neighborhood variant,
                       std::size_t limit = kExactPairLimit)
{
    detail::check_exact_inputs(w, lengths, limit);
    if (lengths.empty())
        return 0.0;
    std::vector<double> log_edge;
    const auto cyc = detail::cycle_masks(w, lengths, log_edge);
    double b1 = 0.0;
    for (const auto& a : cyc)
        for (const auto& b : cyc)
            if (detail::related(a, b, variant))
                b1 += std::exp(a.log_p + b.log_p);
    return b1;
}

/// sum_{alpha in I} sum_{beta in B_alpha, beta != alpha} p_{alpha beta} where
/// p_{alpha beta} is the product of edge probabilities over the union of both
/// edge sets.
inline double b2_exact(const WeightVector& w, const std::set<int>& lengths, Neighborhood variant,
                       std::size_t limit = kExactPairLimit)
{
    detail::check_exact_inputs(w, lengths, limit);
    if (lengths.empty())
        return 0.0;
    std::vector<double> log_edge;
    const auto cyc = detail::cycle_masks(w, lengths, log_edge);
    double b2 = 0.0;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        for (std::size_t j = 0; j < cyc.size(); ++j) {
            if (i == j || !detail::related(cyc[i], cyc[j], variant))
                continue;
            std::uint64_t u = cyc[i].edges | cyc[j].edges;
            double lp = 0.0;
            while (u) {
                lp += log_edge[static_cast<std::size_t>(std::countr_zero(u))];
                u &= u - 1;
            }
            b2 += std::exp(lp);
        }
    }
    return b2;
}

/// Intersection class (k, l, s, i) of an ordered pair: alpha of length k,
/// beta of length l, sharing segments of lengths i_1..i_s along alpha.
struct PairClass {
    int k = 0;
    int l = 0;
    std::vector<int> segments;

    int segment_count() const noexcept { return static_cast<int>(segments.size()); }
    int shared_vertices() const noexcept
    {
        int s = 0;
        for (int x : segments)
            s += x;
        return s;
    }
    int shared_edges() const noexcept { return shared_vertices() - segment_count(); }
    int union_vertices() const noexcept { return k + l - shared_vertices(); }
    int union_edges() const noexcept { return k + l - shared_edges(); }

    std::string label() const
    {
        std::string s = "k=" + std::to_string(k) + ",l=" + std::to_string(l) + ",i=(";
        for (std::size_t j = 0; j < segments.size(); ++j)
            s += (j ? "," : "") + std::to_string(segments[j]);
        return s + ")";
    }

    auto operator<=>(const PairClass&) const = default;
};

/// A realisable class with one representative pair on vertices
/// 0..union_vertices-1 (alpha = (0..k-1); beta's fresh vertices are k, k+1, ...)
/// and the number of l-cycles that fall in the class for a fixed alpha and a
/// fixed set of fresh vertices.
struct PairClassInfo {
    PairClass cls;
    CanonicalCycle alpha;
    CanonicalCycle beta;
    std::vector<Edge> union_edges;
    std::uint64_t cycles_per_fresh_set = 0;
};

constexpr int kPairClassLimit = 14;

inline std::vector<PairClassInfo> pair_classes(int k, int l)
{
    if (k < 3 || l < 3)
        throw DomainError("pair classes need cycle lengths >= 3");
    if (k + l > kPairClassLimit)
        throw RefusalError("pair class enumeration refuses k + l > " +
                           std::to_string(kPairClassLimit));
    std::vector<Vertex> a(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        a[i] = static_cast<Vertex>(i);
    const CanonicalCycle alpha = canonical_cycle(a);

    std::map<PairClass, PairClassInfo> found;
    detail::for_each_canonical(
        static_cast<std::size_t>(k + l), static_cast<std::size_t>(l),
        [&](std::span<const Vertex> t) {
            // only fresh sets {k, ..., k+f-1}; other fresh sets are relabelings
            int shared = 0;
            Vertex max_fresh = 0;
            for (Vertex v : t) {
                if (v < static_cast<Vertex>(k))
                    ++shared;
                else
                    max_fresh = std::max(max_fresh, v);
            }
            if (shared == 0)
                return;
            const int fresh = l - shared;
            if (fresh > 0 && max_fresh != static_cast<Vertex>(k + fresh - 1))
                return;
            const CanonicalCycle beta = canonical_cycle(t);
            if (beta == alpha)
                return;
            auto prof = segment_decomposition(alpha, beta);
            PairClass cls{k, l, prof->segment_lengths};
            auto [it, inserted] = found.try_emplace(cls);
            if (inserted) {
                it->second.cls = cls;
                it->second.alpha = alpha;
                it->second.beta = beta;
                std::set<Edge> u;
                for (auto* c : {&alpha, &beta})
                    for (std::size_t i = 0; i < c->length(); ++i) {
                        Vertex x = (*c)[i], y = (*c)[(i + 1) % c->length()];
                        u.insert({std::min(x, y), std::max(x, y)});
                    }
                it->second.union_edges.assign(u.begin(), u.end());
            }
            ++it->second.cycles_per_fresh_set;
        });
    std::vector<PairClassInfo> out;
    for (auto& [cls, info] : found)
        out.push_back(std::move(info));
    return out;
}

/// ln C(m, r), or -inf when r > m.
inline double log_binomial(double m, double r)
{
    if (r < 0 || r > m)
        return -std::numeric_limits<double>::infinity();
    return std::lgamma(m + 1) - std::lgamma(r + 1) - std::lgamma(m - r + 1);
}

/// Number of ordered pairs (alpha, beta) in class `info` among cycles on n vertices.
inline double class_pair_count(const PairClassInfo& info, std::size_t n)
{
    const double nn = static_cast<double>(n);
    const int k = info.cls.k;
    if (static_cast<std::size_t>(info.cls.union_vertices()) > n)
        return 0.0;
    const double log_alpha = log_falling_factorial(nn, k) - std::log(2.0 * k);
    const double log_beta = std::log(static_cast<double>(info.cycles_per_fresh_set)) +
                            log_binomial(nn - k, info.cls.l - info.cls.shared_vertices());
    return std::exp(log_alpha + log_beta);
}

/// p_k for a constant weight c: (c^2 / (n c + c^2))^k.
inline double pk_constant(double c, std::size_t n, int k)
{
    return std::pow(c / (static_cast<double>(n) + c), k);
}

/// Monte Carlo estimate of p_k = E[prod_{i=1..k} W_i W_{i-1} / (L_n + W_i W_{i-1})]
/// over fresh weight vectors; exact (SE 0) for constant weights.
inline Estimate pk_mc(const WeightModel& model, std::size_t n, int k, std::uint64_t reps,
                      RngStream& rng)
{
    if (k < 3 || static_cast<std::size_t>(k) > n)
        throw DomainError("pk_mc requires 3 <= k <= n");
    if (reps < 1)
        throw DomainError("pk_mc requires reps >= 1");
    if (model.kind() == WeightKind::Constant)
        return {pk_constant(model.params()[0], n, k), 0.0};
    RunningMoments m;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const WeightVector w = sample_weights(model, n, rng);
        double lp = 0.0;
        for (int i = 0; i < k; ++i)
            lp += std::log(edge_prob(ModelKind::GRG, w[i], w[(i + k - 1) % k], w.total()));
        m.add(std::exp(lp));
    }
    return {m.mean(), m.standard_error()};
}

/// Probability that every edge of a fixed graph on vertices 0..v-1 is present,
/// averaged over fresh weight vectors of length n; exact for constant weights.
inline Estimate union_prob_mc(const WeightModel& model, std::size_t n,
                              std::span<const Edge> edges, std::uint64_t reps, RngStream& rng)
{
    if (model.kind() == WeightKind::Constant)
        return {std::pow(model.params()[0] / (static_cast<double>(n) + model.params()[0]),
                         static_cast<double>(edges.size())),
                0.0};
    RunningMoments m;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const WeightVector w = sample_weights(model, n, rng);
        double lp = 0.0;
        for (auto [x, y] : edges)
            lp += std::log(edge_prob(ModelKind::GRG, w[x], w[y], w.total()));
        m.add(std::exp(lp));
    }
    return {m.mean(), m.standard_error()};
}

/// Probability inputs to the bound: p_k per length and p_{k,l,s,i} per class.
struct BoundInputs {
    std::map<int, Estimate> pk;
    std::map<PairClass, Estimate> pair;
};

enum class BoundMethod { Exact, MonteCarlo };

struct SteinChenReport {
    Neighborhood variant = Neighborhood::VertexSharing;
    double b1 = 0.0;
    double b2 = 0.0;
    static constexpr double b3 = 0.0;
    static constexpr const char* b3_reason =
        "identically zero: indicators outside B_alpha are independent of X_alpha";
    double summand1 = 0.0;
    double summand2 = 0.0;
    double summand3 = 0.0;
    double total_bound = 0.0;
    double se_summand1 = 0.0, se_summand2 = 0.0, se_summand3 = 0.0, se_total = 0.0;
    BoundMethod method = BoundMethod::Exact;
    std::uint64_t reps = 0;
    int realizable_classes = 0;
    double unrealizable_classes = 0.0;  // index tuples in [k]^s with no cycle pair, taken as 0

    bool vacuous() const noexcept { return total_bound >= 1.0; }
};

namespace detail {

inline void check_lengths(std::size_t n, const std::set<int>& lengths)
{
    for (int k : lengths)
        if (k < 3 || static_cast<std::size_t>(k) > n)
            throw DomainError("length set must lie in [3, n]");
}

inline std::vector<PairClassInfo> realizable_classes(int k, int l, std::size_t n)
{
    std::vector<PairClassInfo> out;
    for (auto& c : pair_classes(k, l))
        if (static_cast<std::size_t>(c.cls.union_vertices()) <= n)
            out.push_back(std::move(c));
    return out;
}

}  // namespace detail

/// Closed-form inputs for a constant weight model.
inline BoundInputs exact_bound_inputs(const WeightModel& model, std::size_t n,
                                      const std::set<int>& lengths)
{
    if (model.kind() != WeightKind::Constant)
        throw DomainError("exact bound inputs need a constant weight model");
    detail::check_lengths(n, lengths);
    const double c = model.params()[0];
    BoundInputs in;
    for (int k : lengths) {
        in.pk[k] = {pk_constant(c, n, k), 0.0};
        for (int l : lengths)
            for (const auto& info : detail::realizable_classes(k, l, n))
                in.pair[info.cls] = {std::pow(c / (n + c), info.cls.union_edges()), 0.0};
    }
    return in;
}

/// Monte Carlo inputs; each quantity uses `reps` fresh weight vectors from
/// its own child stream of `rng`.
inline BoundInputs mc_bound_inputs(const WeightModel& model, std::size_t n,
                                   const std::set<int>& lengths, std::uint64_t reps,
                                   RngStream& rng)
{
    detail::check_lengths(n, lengths);
    BoundInputs in;
    std::uint64_t tag = 0;
    for (int k : lengths) {
        RngStream s = rng.split(++tag);
        in.pk[k] = pk_mc(model, n, k, reps, s);
        for (int l : lengths) {
            for (const auto& info : detail::realizable_classes(k, l, n)) {
                RngStream t = rng.split(++tag);
                in.pair[info.cls] = union_prob_mc(model, n, info.union_edges, reps, t);
            }
        }
    }
    return in;
}

/// Evaluates the explicit bound
///   (1/2n) sum p_k p_l n^{k+l}
///   + sum p_{k,l,s,i} (2kl)^{s-1} n^{k+l-|i|}
///   + sum |(n)_k/(2k) p_k - lambda_k|
/// together with b1 and b2 for the chosen neighbourhood, from the supplied
/// probabilities. Classes that no cycle pair on n vertices realises contribute
/// zero and are counted in `unrealizable_classes`.
inline SteinChenReport lemma_tv_bound(const WeightModel& model, std::size_t n,
                                      const std::set<int>& lengths, const BoundInputs& in,
                                      Neighborhood variant = Neighborhood::VertexSharing)
{
    detail::check_lengths(n, lengths);
    SteinChenReport rep;
    rep.variant = variant;
    if (lengths.empty())
        return rep;
    const PoissonReference ref(model.rho());
    const double nn = static_cast<double>(n);
    const double ln_n = std::log(nn);

    auto pk = [&](int k) -> const Estimate& {
        auto it = in.pk.find(k);
        if (it == in.pk.end())
            throw IncompleteInputError("missing p_k for k=" + std::to_string(k));
        return it->second;
    };
    auto log_cycles = [&](int k, double m) {
        return static_cast<double>(k) > m ? -std::numeric_limits<double>::infinity()
                                          : log_falling_factorial(m, k) - std::log(2.0 * k);
    };

    std::map<int, double> grad1;
    double var2 = 0.0, var3 = 0.0;
    for (int k : lengths) {
        const Estimate& a = pk(k);
        for (int l : lengths) {
            const Estimate& b = pk(l);
            const double coef = std::exp((k + l) * ln_n - std::log(2.0 * nn));
            rep.summand1 += coef * a.value * b.value;
            grad1[k] += coef * b.value;
            grad1[l] += coef * a.value;

            // b1: |B_alpha cap I_l| summed over alpha in I_k
            const double ik = std::exp(log_cycles(k, nn));
            double partners = 0.0;
            if (variant == Neighborhood::VertexSharing)
                partners = std::exp(log_cycles(l, nn)) - std::exp(log_cycles(l, nn - k));
            else
                partners = (k == l) ? 1.0 : 0.0;

            double tuples = 0.0;
            for (int s = 1; s <= k; ++s)
                tuples += std::pow(static_cast<double>(k), s);
            int realised = 0;
            for (const auto& info : detail::realizable_classes(k, l, n)) {
                auto it = in.pair.find(info.cls);
                if (it == in.pair.end())
                    throw IncompleteInputError("missing p_{k,l,s,i} for " + info.cls.label());
                ++realised;
                const int s = info.cls.segment_count();
                const double c2 = std::exp((s - 1) * std::log(2.0 * k * l) +
                                           (k + l - info.cls.shared_vertices()) * ln_n);
                rep.summand2 += c2 * it->second.value;
                var2 += std::pow(c2 * it->second.standard_error, 2);

                const bool in_nbhd =
                    variant == Neighborhood::VertexSharing || info.cls.shared_edges() > 0;
                if (in_nbhd) {
                    const double count = class_pair_count(info, n);
                    rep.b2 += count * it->second.value;
                    if (variant == Neighborhood::EdgeSharing)
                        partners += count / ik;
                }
            }
            rep.realizable_classes += realised;
            rep.unrealizable_classes += tuples - realised;
            rep.b1 += a.value * b.value * ik * partners;
        }
        const double coef3 = std::exp(log_cycles(k, nn));
        rep.summand3 += std::abs(coef3 * a.value - ref.lambda_k(k));
        var3 += std::pow(coef3 * a.standard_error, 2);
    }
    double var1 = 0.0;
    for (int k : lengths)
        var1 += std::pow(grad1[k] * pk(k).standard_error, 2);
    rep.se_summand1 = std::sqrt(var1);
    rep.se_summand2 = std::sqrt(var2);
    rep.se_summand3 = std::sqrt(var3);
    rep.se_total = std::sqrt(var1 + var2 + var3);
    rep.total_bound = rep.summand1 + rep.summand2 + rep.summand3;
    return rep;
}

}  // namespace grgc
