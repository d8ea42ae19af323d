#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grgc/errors.hpp"
#include "grgc/graph.hpp"

namespace grgc {

/// A cycle written as (a_1, ..., a_k) with a_1 the smallest entry and
/// a_2 < a_k, so every undirected cycle has exactly one representation.
class CanonicalCycle {
  public:
    CanonicalCycle() = default;

    std::span<const Vertex> vertices() const noexcept { return v_; }
    std::size_t length() const noexcept { return v_.size(); }
    Vertex operator[](std::size_t i) const noexcept { return v_[i]; }

    auto operator<=>(const CanonicalCycle&) const = default;

  private:
    friend CanonicalCycle canonical_cycle(std::span<const Vertex> tuple);
    explicit CanonicalCycle(std::vector<Vertex> v) : v_(std::move(v)) {}
    std::vector<Vertex> v_;
};

inline bool satisfies_canonical_constraints(std::span<const Vertex> t)
{
    if (t.size() < 3)
        return false;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] <= t[0])
            return false;
    return t[1] < t.back();
}

inline CanonicalCycle canonical_cycle(std::span<const Vertex> tuple)
{
    const std::size_t k = tuple.size();
    if (k < 3)
        throw DomainError("a cycle needs at least 3 vertices");
    std::vector<Vertex> sorted(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("cycle tuple repeats a vertex");

    const std::size_t m = static_cast<std::size_t>(
        std::min_element(tuple.begin(), tuple.end()) - tuple.begin());
    const Vertex next = tuple[(m + 1) % k];
    const Vertex prev = tuple[(m + k - 1) % k];
    std::vector<Vertex> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = next < prev ? tuple[(m + i) % k] : tuple[(m + k - i) % k];
    return CanonicalCycle(std::move(out));
}

inline CanonicalCycle canonical_cycle(std::initializer_list<Vertex> tuple)
{
    return canonical_cycle(std::span<const Vertex>(tuple.begin(), tuple.size()));
}

/// |I_k| = (n)_k / (2k), the number of distinct k-cycles on n labelled vertices.
inline std::uint64_t count_canonical(std::uint64_t n, std::uint64_t k)
{
    if (k < 3 || k > n)
        throw DomainError("count_canonical requires 3 <= k <= n");
    // (n)_k / (2k) = (n)_{k-1} * (n-k+1) / (2k); divide early to stay exact
    unsigned __int128 ff = 1;
    for (std::uint64_t j = 0; j < k; ++j) {
        ff *= (n - j);
        if (ff > std::numeric_limits<std::uint64_t>::max() * static_cast<unsigned __int128>(2 * k))
            throw RangeError("count_canonical overflows 64 bits");
    }
    return static_cast<std::uint64_t>(ff / (2 * k));
}

/// log((n)_k) as a real, for any 0 <= k <= n.
inline double log_falling_factorial(double n, int k)
{
    double s = 0.0;
    for (int j = 0; j < k; ++j)
        s += std::log(n - j);
    return s;
}

/// Cycle counts C_n({k}) for k = 3..max_length_scanned.
class CycleCensus {
  public:
    CycleCensus() = default;
    CycleCensus(std::vector<std::uint64_t> counts, int max_len)
        : counts_(std::move(counts)), max_len_(max_len)
    {
        counts_.resize(static_cast<std::size_t>(max_len_) + 1, 0);
        for (int k = 0; k < 3 && k <= max_len_; ++k)
            counts_[k] = 0;
    }

    std::uint64_t count(int k) const
    {
        if (k < 3 || k > max_len_)
            throw RangeError("cycle length " + std::to_string(k) + " outside scanned range [3," +
                             std::to_string(max_len_) + "]");
        return counts_[k];
    }

    int max_length_scanned() const noexcept { return max_len_; }

    std::uint64_t total() const noexcept
    {
        return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
    }

    /// Raw table indexed by length; entries 0..2 are always zero.
    std::span<const std::uint64_t> by_length() const noexcept { return counts_; }

    bool operator==(const CycleCensus&) const = default;

  private:
    std::vector<std::uint64_t> counts_;
    int max_len_ = 2;
};

namespace detail {

/// Vertices of the 2-core; every cycle lives inside it.
inline std::vector<char> two_core(const GraphSample& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> deg(n);
    std::vector<char> alive(n, 1);
    std::vector<Vertex> stack;
    for (Vertex v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        if (deg[v] < 2) {
            alive[v] = 0;
            stack.push_back(v);
        }
    }
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : g.neighbors(v)) {
            if (alive[w] && --deg[w] < 2) {
                alive[w] = 0;
                stack.push_back(w);
            }
        }
    }
    return alive;
}

class RootedCycleSearch {
  public:
    RootedCycleSearch(const GraphSample& g, int max_len, std::vector<std::uint64_t>& counts)
        : g_(g), max_len_(max_len), counts_(counts), core_(two_core(g)),
          on_path_(g.vertex_count(), 0)
    {
        path_.reserve(static_cast<std::size_t>(max_len) + 1);
    }

    void run()
    {
        for (Vertex r = 0; r < g_.vertex_count(); ++r) {
            if (!core_[r])
                continue;
            root_ = r;
            path_.assign(1, r);
            on_path_[r] = 1;
            extend(r);
            on_path_[r] = 0;
        }
    }

  private:
    // Paths start at the root (the cycle's minimum) and use only larger
    // vertices; a closing edge back to the root counts the cycle iff the
    // second vertex is smaller than the last one.
    void extend(Vertex v)
    {
        const int depth = static_cast<int>(path_.size());
        for (Vertex w : g_.neighbors(v)) {
            if (w == root_) {
                if (depth >= 3 && path_[1] < v)
                    ++counts_[depth];
                continue;
            }
            if (w < root_ || !core_[w] || on_path_[w] || depth >= max_len_)
                continue;
            on_path_[w] = 1;
            path_.push_back(w);
            extend(w);
            path_.pop_back();
            on_path_[w] = 0;
        }
    }

    const GraphSample& g_;
    int max_len_;
    std::vector<std::uint64_t>& counts_;
    std::vector<char> core_;
    std::vector<char> on_path_;
    std::vector<Vertex> path_;
    Vertex root_ = 0;
};

}  // namespace detail

/// Exact number of simple cycles of each length 3..max_len.
inline CycleCensus census(const GraphSample& g, int max_len)
{
    if (max_len < 3 || static_cast<std::size_t>(max_len) > g.vertex_count())
        throw DomainError("census requires 3 <= max_len <= n");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_len) + 1, 0);
    detail::RootedCycleSearch(g, max_len, counts).run();
    return CycleCensus(std::move(counts), max_len);
}

constexpr std::size_t kBruteforceLimit = 10;

/// Oracle: evaluates X_alpha for every canonical tuple alpha of each length.
inline CycleCensus census_bruteforce(const GraphSample& g, int max_len,
                                     std::size_t limit = kBruteforceLimit)
{
    const std::size_t n = g.vertex_count();
    if (n > limit)
        throw RefusalError("census_bruteforce refuses n=" + std::to_string(n) + " above limit " +
                           std::to_string(limit));
    if (max_len < 3 || static_cast<std::size_t>(max_len) > n)
        throw DomainError("census requires 3 <= max_len <= n");

    std::vector<char> adj(n * n, 0);
    for (auto [u, v] : g.edges())
        adj[u * n + v] = adj[v * n + u] = 1;

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_len) + 1, 0);
    std::vector<Vertex> tuple;
    std::vector<char> used(n, 0);
    for (int k = 3; k <= max_len; ++k) {
        // generate every tuple in I_k and test all k closing adjacencies
        auto rec = [&](auto&& self) -> void {
            if (static_cast<int>(tuple.size()) == k) {
                if (!(tuple[1] < tuple[k - 1]))
                    return;
                for (int i = 0; i < k; ++i)
                    if (!adj[tuple[i] * n + tuple[(i + 1) % k]])
                        return;
                ++counts[k];
                return;
            }
            for (Vertex w = tuple[0] + 1; w < n; ++w) {
                if (used[w])
                    continue;
                used[w] = 1;
                tuple.push_back(w);
                self(self);
                tuple.pop_back();
                used[w] = 0;
            }
        };
        for (Vertex first = 0; first < n; ++first) {
            tuple.assign(1, first);
            used[first] = 1;
            rec(rec);
            used[first] = 0;
        }
    }
    return CycleCensus(std::move(counts), max_len);
}

/// C_n(A) = sum over k in A of the census counts.
inline std::uint64_t count_in_set(const CycleCensus& c, const std::set<int>& lengths)
{
    std::uint64_t total = 0;
    for (int k : lengths)
        total += c.count(k);
    return total;
}

/// (shortest, longest) cycle length, or (0, 0) when the graph has no cycle.
inline std::pair<int, int> shortest_longest(const CycleCensus& c)
{
    const auto counts = c.by_length();
    int lo = 0, hi = 0;
    for (int k = 3; k <= c.max_length_scanned(); ++k) {
        if (counts[k] > 0) {
            if (lo == 0)
                lo = k;
            hi = k;
        }
    }
    return {lo, hi};
}

/// Maximal runs of consecutively shared vertices between two distinct cycles.
struct IntersectionProfile {
    std::vector<int> segment_lengths;  // ordered along alpha
    int shared_vertices = 0;           // |i|
    int shared_edges = 0;              // |i| - s for distinct cycles

    int segment_count() const noexcept { return static_cast<int>(segment_lengths.size()); }
    auto operator<=>(const IntersectionProfile&) const = default;
};

/// Segments of alpha shared with beta, or nullopt if they share no vertex.
/// Segments are ordered by the smaller alpha-index of their two endpoints.
inline std::optional<IntersectionProfile> segment_decomposition(const CanonicalCycle& alpha_in,
                                                                const CanonicalCycle& beta_in)
{
    const CanonicalCycle alpha = canonical_cycle(alpha_in.vertices());
    const CanonicalCycle beta = canonical_cycle(beta_in.vertices());
    if (alpha == beta)
        throw DomainError("segment_decomposition is undefined for identical cycles");

    const std::size_t k = alpha.length();
    const std::size_t l = beta.length();
    auto beta_pos = [&](Vertex v) -> std::optional<std::size_t> {
        for (std::size_t j = 0; j < l; ++j)
            if (beta[j] == v)
                return j;
        return std::nullopt;
    };

    std::vector<std::optional<std::size_t>> pos(k);
    bool any = false;
    for (std::size_t t = 0; t < k; ++t) {
        pos[t] = beta_pos(alpha[t]);
        any = any || pos[t].has_value();
    }
    if (!any)
        return std::nullopt;

    // link[t]: alpha_t and alpha_{t+1} are both shared and adjacent in beta
    std::vector<char> link(k, 0);
    for (std::size_t t = 0; t < k; ++t) {
        const auto& a = pos[t];
        const auto& b = pos[(t + 1) % k];
        if (a && b) {
            const std::size_t d = (*a + l - *b) % l;
            link[t] = (d == 1 || d == l - 1);
        }
    }

    std::size_t start = k;
    for (std::size_t t = 0; t < k; ++t) {
        if (pos[t] && !link[(t + k - 1) % k]) {
            start = t;
            break;
        }
    }
    if (start == k)
        throw DomainError("cycles share every edge of alpha");

    struct Run {
        std::size_t key;
        int length;
    };
    std::vector<Run> runs;
    IntersectionProfile prof;
    for (std::size_t step = 0; step < k;) {
        const std::size_t t = (start + step) % k;
        if (!pos[t]) {
            ++step;
            continue;
        }
        int len = 1;
        std::size_t end = t;
        while (link[end] && step + len < k) {
            end = (end + 1) % k;
            ++len;
        }
        runs.push_back({std::min(t, end), len});
        prof.shared_vertices += len;
        prof.shared_edges += len - 1;
        step += len;
    }
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.key < b.key; });
    for (const auto& r : runs)
        prof.segment_lengths.push_back(r.length);
    return prof;
}

}  // namespace grgc
