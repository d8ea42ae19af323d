#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "grgc/errors.hpp"
#include "grgc/rng.hpp"
#include "grgc/weights.hpp"

namespace grgc {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

enum class ModelKind { GRG, ChungLu, NorrosReittu };

inline std::string_view to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::GRG: return "grg";
    case ModelKind::ChungLu: return "chung-lu";
    case ModelKind::NorrosReittu: return "norros-reittu";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view s)
{
    if (s == "grg")
        return ModelKind::GRG;
    if (s == "chung-lu")
        return ModelKind::ChungLu;
    if (s == "norros-reittu")
        return ModelKind::NorrosReittu;
    throw DomainError("unknown graph model '" + std::string(s) + "'");
}

namespace detail {

inline double grg_prob(double x, double total) { return x / (x + total); }

inline double nr_prob(double x, double total)
{
    // clamped from below by the GRG value so GRG <= NR holds after rounding
    return std::max(-std::expm1(-x / total), grg_prob(x, total));
}

inline double cl_prob(double x, double total)
{
    return std::max(std::min(1.0, x / total), nr_prob(x, total));
}

}  // namespace detail

/// Conditional probability that two distinct vertices with weights wi, wj are
/// joined, given L_n = total. The three models satisfy GRG <= NR <= CL pointwise.
inline double edge_prob(ModelKind kind, double wi, double wj, double total)
{
    if (!(wi > 0.0) || !(wj > 0.0) || !(total > 0.0))
        throw DomainError("edge_prob requires positive weights and total weight");
    const double x = wi * wj;
    switch (kind) {
    case ModelKind::GRG: return detail::grg_prob(x, total);
    case ModelKind::ChungLu: return detail::cl_prob(x, total);
    case ModelKind::NorrosReittu: return detail::nr_prob(x, total);
    }
    return 0.0;
}

/// A simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
/// Vertex ids are 0-based in memory and 1-based in every text format.
class GraphSample {
  public:
    GraphSample() = default;

    GraphSample(std::size_t n, std::vector<Edge> edges, WeightVector weights, ModelKind kind,
                StreamId seed)
        : n_(n), weights_(std::move(weights)), kind_(kind), seed_(std::move(seed))
    {
        if (weights_.size() != 0 && weights_.size() != n_)
            throw DomainError("weight vector length must equal vertex count");
        for (auto& e : edges) {
            if (e.first == e.second)
                throw DomainError("self-loop in edge list");
            if (e.first >= n_ || e.second >= n_)
                throw DomainError("edge endpoint out of range");
            if (e.first > e.second)
                std::swap(e.first, e.second);
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw DomainError("duplicate edge in edge list");
        edges_ = std::move(edges);

        offsets_.assign(n_ + 1, 0);
        for (auto [u, v] : edges_) {
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        adjacency_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (auto [u, v] : edges_) {
            adjacency_[fill[u]++] = v;
            adjacency_[fill[v]++] = u;
        }
        for (std::size_t v = 0; v < n_; ++v)
            std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1]);
    }

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const WeightVector& weights() const noexcept { return weights_; }
    ModelKind kind() const noexcept { return kind_; }
    const StreamId& seed_info() const noexcept { return seed_; }

    std::span<const Vertex> neighbors(Vertex v) const noexcept
    {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }

    std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

    bool has_edge(Vertex u, Vertex v) const noexcept
    {
        if (u >= n_ || v >= n_)
            return false;
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// Same graph with vertex v renamed to perm[v].
    GraphSample relabeled(std::span<const Vertex> perm) const
    {
        std::vector<Edge> e;
        e.reserve(edges_.size());
        for (auto [u, v] : edges_)
            e.emplace_back(perm[u], perm[v]);
        std::vector<double> w(n_);
        for (std::size_t v = 0; v < n_ && weights_.size() == n_; ++v)
            w[perm[v]] = weights_[v];
        return GraphSample(n_, std::move(e),
                           weights_.size() == n_ ? WeightVector(std::move(w)) : WeightVector{},
                           kind_, seed_);
    }

  private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Vertex> adjacency_;
    WeightVector weights_;
    ModelKind kind_ = ModelKind::GRG;
    StreamId seed_;
};

/// Reference sampler: one uniform per pair (i<j, lexicographic), O(n^2).
inline GraphSample sample_graph(ModelKind kind, const WeightVector& weights, RngStream& rng)
{
    const std::size_t n = weights.size();
    if (n < 1)
        throw DomainError("sample_graph requires n >= 1");
    std::vector<Edge> edges;
    const double total = weights.total();
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j)
            if (rng.uniform() < edge_prob(kind, weights[i], weights[j], total))
                edges.emplace_back(i, j);
    return GraphSample(n, std::move(edges), weights, kind, rng.id());
}

/// Expected O(n + m) sampler. Vertices are visited in order of decreasing
/// weight; within a row the edge probability is nonincreasing, so the most
/// recent candidate's probability bounds the rest of the row. Candidates are
/// reached by geometric jumps under that bound and accepted with ratio
/// edge_prob / bound.
inline GraphSample sample_graph_fast(ModelKind kind, const WeightVector& weights, RngStream& rng)
{
    const std::size_t n = weights.size();
    if (n < 1)
        throw DomainError("sample_graph_fast requires n >= 1");
    const double total = weights.total();
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return weights[a] > weights[b]; });

    std::vector<Edge> edges;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        const Vertex u = order[a];
        const double wu = weights[u];
        std::size_t pos = a + 1;
        double bound = edge_prob(kind, wu, weights[order[pos]], total);
        while (pos < n && bound > 0.0) {
            if (bound < 1.0) {
                const double jump = std::floor(std::log(rng.uniform_open()) / std::log1p(-bound));
                if (jump >= static_cast<double>(n - pos))
                    break;
                pos += static_cast<std::size_t>(jump);
            }
            const Vertex v = order[pos];
            const double p = edge_prob(kind, wu, weights[v], total);
            if (rng.uniform() * bound < p)
                edges.emplace_back(u, v);
            bound = p;
            ++pos;
        }
    }
    return GraphSample(n, std::move(edges), weights, kind, rng.id());
}

struct CoupledSample {
    GraphSample grg;
    GraphSample norros_reittu;
    GraphSample chung_lu;
};

/// One uniform U_ij per pair drives all three models, so on every sample
/// edges(GRG) is a subset of edges(NR), which is a subset of edges(CL).
inline CoupledSample sample_coupled(const WeightVector& weights, RngStream& rng)
{
    const std::size_t n = weights.size();
    if (n < 1)
        throw DomainError("sample_coupled requires n >= 1");
    const double total = weights.total();
    std::vector<Edge> grg, nr, cl;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) {
            const double u = rng.uniform();
            if (u < edge_prob(ModelKind::ChungLu, weights[i], weights[j], total))
                cl.emplace_back(i, j);
            else
                continue;
            if (u < edge_prob(ModelKind::NorrosReittu, weights[i], weights[j], total))
                nr.emplace_back(i, j);
            if (u < edge_prob(ModelKind::GRG, weights[i], weights[j], total))
                grg.emplace_back(i, j);
        }
    }
    return {GraphSample(n, std::move(grg), weights, ModelKind::GRG, rng.id()),
            GraphSample(n, std::move(nr), weights, ModelKind::NorrosReittu, rng.id()),
            GraphSample(n, std::move(cl), weights, ModelKind::ChungLu, rng.id())};
}

/// Graph dump: header `n m kind seed`, then one `u v` line per edge,
/// 1-indexed, u < v, lexicographically sorted.
inline std::string dump_graph(const GraphSample& g, std::uint64_t seed)
{
    std::string out = std::to_string(g.vertex_count()) + ' ' + std::to_string(g.edge_count()) +
                      ' ' + std::string(to_string(g.kind())) + ' ' + std::to_string(seed) + '\n';
    for (auto [u, v] : g.edges()) {
        out += std::to_string(u + 1);
        out += ' ';
        out += std::to_string(v + 1);
        out += '\n';
    }
    return out;
}

}  // namespace grgc
