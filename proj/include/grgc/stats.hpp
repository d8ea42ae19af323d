#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "grgc/errors.hpp"
#include "grgc/poisson.hpp"
#include "grgc/rng.hpp"

namespace grgc {

/// Histogram of nonnegative integer observations.
class EmpiricalLaw {
  public:
    EmpiricalLaw() = default;

    void add(std::uint64_t value, std::uint64_t times = 1)
    {
        if (times == 0)
            return;
        counts_[value] += times;
        size_ += times;
    }

    void merge(const EmpiricalLaw& other)
    {
        for (auto [v, c] : other.counts_)
            add(v, c);
    }

    std::uint64_t sample_size() const noexcept { return size_; }
    const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }

    double probability(std::uint64_t value) const
    {
        auto it = counts_.find(value);
        return it == counts_.end() ? 0.0 : static_cast<double>(it->second) / size_;
    }

    /// Empirical P(X <= t).
    double cdf(double t) const
    {
        std::uint64_t below = 0;
        for (auto [v, c] : counts_) {
            if (static_cast<double>(v) > t)
                break;
            below += c;
        }
        return size_ == 0 ? 0.0 : static_cast<double>(below) / size_;
    }

    bool operator==(const EmpiricalLaw&) const = default;

  private:
    std::map<std::uint64_t, std::uint64_t> counts_;
    std::uint64_t size_ = 0;
};

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
class RunningMoments {
  public:
    void add(double x) noexcept
    {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningMoments& o) noexcept
    {
        if (o.n_ == 0)
            return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double d = o.mean_ - mean_;
        const double n = na + nb;
        mean_ += d * nb / n;
        m2_ += o.m2_ + d * d * na * nb / n;
        n_ += o.n_;
    }

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance.
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const noexcept
    {
        return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Running co-moment of two series, merged the same way as RunningMoments.
class RunningCovariance {
  public:
    void add(double x, double y) noexcept
    {
        ++n_;
        const double dx = x - mx_;
        mx_ += dx / static_cast<double>(n_);
        my_ += (y - my_) / static_cast<double>(n_);
        c_ += dx * (y - my_);
    }

    void merge(const RunningCovariance& o) noexcept
    {
        if (o.n_ == 0)
            return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const double dx = o.mx_ - mx_, dy = o.my_ - my_;
        c_ += o.c_ + dx * dy * na * nb / n;
        mx_ += dx * nb / n;
        my_ += dy * nb / n;
        n_ += o.n_;
    }

    std::uint64_t count() const noexcept { return n_; }
    double covariance() const noexcept
    {
        return n_ > 1 ? c_ / static_cast<double>(n_ - 1) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mx_ = 0.0, my_ = 0.0, c_ = 0.0;
};

/// Empirical law plus moment summary of a stream of integer observations.
struct Aggregate {
    EmpiricalLaw law;
    RunningMoments moments;

    void add(std::uint64_t x)
    {
        law.add(x);
        moments.add(static_cast<double>(x));
    }

    void merge(const Aggregate& o)
    {
        law.merge(o.law);
        moments.merge(o.moments);
    }

    double mean() const noexcept { return moments.mean(); }
    double variance() const noexcept { return moments.variance(); }
    double standard_error() const noexcept { return moments.standard_error(); }
};

inline Aggregate aggregate(std::span<const std::uint64_t> observations)
{
    if (observations.empty())
        throw DomainError("aggregate requires at least one observation");
    Aggregate a;
    for (auto x : observations)
        a.add(x);
    return a;
}

enum class DistanceMethod { PluginTV, KolmogorovSup };

struct DistanceEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    DistanceMethod method = DistanceMethod::PluginTV;
};

namespace detail {

/// Plug-in TV between an empirical pmf and Poi(mu), including the reference
/// mass outside the observed support.
inline double tv_against_poisson(const std::map<std::uint64_t, std::uint64_t>& counts,
                                 std::uint64_t size, double mu)
{
    double diff = 0.0;
    double ref_on_support = 0.0;
    for (auto [v, c] : counts) {
        const double p = poisson_pmf(mu, v);
        ref_on_support += p;
        diff += std::abs(static_cast<double>(c) / size - p);
    }
    return std::clamp(0.5 * (diff + std::max(0.0, 1.0 - ref_on_support)), 0.0, 1.0);
}

/// Multinomial resample of an empirical law via sequential binomials.
inline std::map<std::uint64_t, std::uint64_t> resample(const EmpiricalLaw& law, RngStream& rng)
{
    std::map<std::uint64_t, std::uint64_t> out;
    std::uint64_t left = law.sample_size();
    double mass_left = 1.0;
    for (auto it = law.counts().begin(); it != law.counts().end() && left > 0; ++it) {
        const double p = static_cast<double>(it->second) / law.sample_size();
        std::uint64_t c;
        if (std::next(it) == law.counts().end() || p >= mass_left) {
            c = left;
        } else {
            std::binomial_distribution<std::uint64_t> b(left, std::clamp(p / mass_left, 0.0, 1.0));
            c = b(rng);
        }
        mass_left -= p;
        left -= c;
        if (c > 0)
            out[it->first] = c;
    }
    return out;
}

}  // namespace detail

constexpr int kDefaultBootstrap = 200;

/// d_TV(law, Poi(mu)) by plug-in with a bootstrap standard error.
inline DistanceEstimate tv_distance(const EmpiricalLaw& law, double mu, RngStream& rng,
                                    int bootstrap = kDefaultBootstrap)
{
    if (law.sample_size() == 0)
        throw DomainError("tv_distance requires a nonempty law");
    DistanceEstimate est;
    est.method = DistanceMethod::PluginTV;
    est.value = detail::tv_against_poisson(law.counts(), law.sample_size(), mu);
    if (bootstrap > 1) {
        RunningMoments boot;
        for (int b = 0; b < bootstrap; ++b)
            boot.add(detail::tv_against_poisson(detail::resample(law, rng), law.sample_size(), mu));
        est.standard_error = std::sqrt(boot.variance());
    }
    return est;
}

inline DistanceEstimate tv_distance(const EmpiricalLaw& law, double mu,
                                    int bootstrap = kDefaultBootstrap)
{
    RngStream rng(0x7476626f6f74ull ^ law.sample_size());
    return tv_distance(law, mu, rng, bootstrap);
}

/// Half-L1 distance between two empirical laws.
inline double tv_distance(const EmpiricalLaw& p, const EmpiricalLaw& q)
{
    if (p.sample_size() == 0 || q.sample_size() == 0)
        throw DomainError("tv_distance requires nonempty laws");
    double s = 0.0;
    auto a = p.counts().begin(), ae = p.counts().end();
    auto b = q.counts().begin(), be = q.counts().end();
    while (a != ae || b != be) {
        if (b == be || (a != ae && a->first < b->first)) {
            s += p.probability(a->first);
            ++a;
        } else if (a == ae || b->first < a->first) {
            s += q.probability(b->first);
            ++b;
        } else {
            s += std::abs(p.probability(a->first) - q.probability(b->first));
            ++a;
            ++b;
        }
    }
    return std::clamp(0.5 * s, 0.0, 1.0);
}

using IntegerCdf = std::function<double(long)>;

namespace detail {

inline double kolmogorov_sup(const std::map<std::uint64_t, std::uint64_t>& counts,
                             std::uint64_t size, std::span<const double> ref)
{
    double sup = 0.0;
    std::uint64_t below = 0;
    auto it = counts.begin();
    for (std::size_t t = 0; t < ref.size(); ++t) {
        while (it != counts.end() && it->first <= t) {
            below += it->second;
            ++it;
        }
        sup = std::max(sup, std::abs(static_cast<double>(below) / size - ref[t]));
    }
    return std::clamp(sup, 0.0, 1.0);
}

}  // namespace detail

/// sup_t |F_emp(t) - F_ref(t)| over integer t, with a bootstrap standard error.
/// Both CDFs are right-continuous step functions jumping only at integers, so
/// the integer grid attains the supremum. The scan runs past the largest
/// observation until the reference has less than 1e-12 mass left.
inline DistanceEstimate kolmogorov_distance(const EmpiricalLaw& law, const IntegerCdf& reference,
                                            RngStream& rng, int bootstrap = kDefaultBootstrap,
                                            long scan_limit = 1'000'000)
{
    if (law.sample_size() == 0)
        throw DomainError("kolmogorov_distance requires a nonempty law");
    const long max_obs = static_cast<long>(law.counts().rbegin()->first);
    std::vector<double> ref;
    for (long t = 0; t <= scan_limit; ++t) {
        ref.push_back(reference(t));
        if (t >= max_obs && 1.0 - ref.back() < 1e-12)
            break;
    }
    DistanceEstimate est;
    est.method = DistanceMethod::KolmogorovSup;
    est.value = detail::kolmogorov_sup(law.counts(), law.sample_size(), ref);
    if (bootstrap > 1) {
        RunningMoments boot;
        for (int b = 0; b < bootstrap; ++b)
            boot.add(detail::kolmogorov_sup(detail::resample(law, rng), law.sample_size(), ref));
        est.standard_error = std::sqrt(boot.variance());
    }
    return est;
}

inline DistanceEstimate kolmogorov_distance(const EmpiricalLaw& law, const IntegerCdf& reference,
                                            int bootstrap = kDefaultBootstrap)
{
    RngStream rng(0x6b6f6c626f6f74ull ^ law.sample_size());
    return kolmogorov_distance(law, reference, rng, bootstrap);
}

/// CDF of the limiting shortest (or longest) cycle length as a function on
/// all integers; the laws put no mass on 1 and 2.
inline IntegerCdf cycle_length_cdf(const PoissonReference& ref, bool longest)
{
    return [ref, longest](long t) {
        if (t < 0)
            return 0.0;
        const long s = t < 3 ? 0 : t;
        return longest ? ref.law_longest(s) : ref.law_shortest(s);
    };
}

/// Y^(q) ~ Bin(count, q).
template <class Rng>
std::uint64_t thin(std::uint64_t count, double q, Rng& rng)
{
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("thinning probability must lie in [0,1]");
    if (count == 0 || q == 0.0)
        return 0;
    if (q == 1.0)
        return count;
    std::binomial_distribution<std::uint64_t> b(count, q);
    return b(rng);
}

}  // namespace grgc
