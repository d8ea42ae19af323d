#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "grgc/errors.hpp"
#include "grgc/rng.hpp"
#include "grgc/weights.hpp"

namespace grgc {

/// e^{-mu} mu^j / j!, evaluated in log space.
inline double poisson_pmf(double mu, std::uint64_t j)
{
    if (!(mu >= 0.0))
        throw DomainError("poisson_pmf requires mu >= 0");
    if (mu == 0.0)
        return j == 0 ? 1.0 : 0.0;
    const double jj = static_cast<double>(j);
    return std::exp(jj * std::log(mu) - mu - std::lgamma(jj + 1.0));
}

/// P(Poi(mu) <= j).
inline double poisson_cdf(double mu, std::uint64_t j)
{
    double s = 0.0;
    for (std::uint64_t i = 0; i <= j; ++i)
        s += poisson_pmf(mu, i);
    return std::min(1.0, s);
}

template <class Rng>
std::uint64_t sample_poisson(double mu, Rng& rng)
{
    if (mu <= 0.0)
        return 0;
    std::poisson_distribution<std::uint64_t> dist(mu);
    return dist(rng);
}

/// |lam - mu|, an upper bound on d_TV(Poi(lam), Poi(mu)).
inline double tv_poisson_poisson_bound(double lam, double mu)
{
    if (!(lam >= 0.0) || !(mu >= 0.0))
        throw DomainError("Poisson parameters must be nonnegative");
    return std::abs(lam - mu);
}

/// Intensities lambda_k = rho^k / (2k) of the limiting cycle process and the
/// laws of its shortest and longest points.
class PoissonReference {
  public:
    explicit PoissonReference(double rho) : rho_(rho)
    {
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw DomainError("rho must be positive and finite");
        if (rho_ < 1.0) {
            // smallest K with rho^{K+1} / ((2K+2)(1-rho)) < 1e-12
            int k = 3;
            while (std::pow(rho_, k + 1) / ((2.0 * k + 2.0) * (1.0 - rho_)) >= 1e-12)
                ++k;
            tail_cutoff_ = k;
        }
    }

    static PoissonReference from_model(const WeightModel& model)
    {
        return PoissonReference(model.rho());
    }

    double rho() const noexcept { return rho_; }
    bool finite_intensity() const noexcept { return rho_ < 1.0; }
    int tail_cutoff() const noexcept { return tail_cutoff_; }

    double lambda_k(int k) const
    {
        if (k < 1)
            throw DomainError("lambda_k requires k >= 1");
        return std::pow(rho_, k) / (2.0 * k);
    }

    /// sum_{k >= from_k} lambda_k via -log(1-rho) minus the leading terms.
    double lambda_tail(int from_k) const
    {
        require_subcritical("lambda_tail");
        if (from_k < 1)
            throw DomainError("lambda_tail requires from_k >= 1");
        double head = 0.0;
        double term = 1.0;
        for (int k = 1; k < from_k; ++k) {
            term *= rho_;
            head += term / k;
        }
        return std::max(0.0, 0.5 * (-std::log1p(-rho_) - head));
    }

    /// Same tail by direct summation up to the geometric cutoff.
    double lambda_tail_series(int from_k) const
    {
        require_subcritical("lambda_tail_series");
        double s = 0.0;
        const int last = std::max(from_k, tail_cutoff_) + 64;
        for (int k = last; k >= from_k; --k)
            s += lambda_k(k);
        return s;
    }

    /// P(S = 0) = P(L = 0) = exp(-sum_{k>=3} lambda_k).
    double no_cycle_probability() const { return std::exp(-lambda_tail(3)); }

    /// P(S <= t) on the state space {0, 3, 4, ...}.
    double law_shortest(long t) const
    {
        check_state(t);
        const double atom = no_cycle_probability();
        if (t == 0)
            return atom;
        const double partial = lambda_tail(3) - lambda_tail(static_cast<int>(t) + 1);
        return std::min(1.0, atom + 1.0 - std::exp(-partial));
    }

    /// P(L <= t) on the state space {0, 3, 4, ...}.
    double law_longest(long t) const
    {
        check_state(t);
        if (t == 0)
            return no_cycle_probability();
        return std::exp(-lambda_tail(static_cast<int>(t) + 1));
    }

    /// One draw of the limiting process restricted to 3..max_k, or over all
    /// k >= 3 when max_k is empty (requires rho < 1).
    std::map<int, std::uint64_t> sample_eta(std::optional<int> max_k, RngStream& rng) const
    {
        std::map<int, std::uint64_t> out;
        if (max_k) {
            for (int k = 3; k <= *max_k; ++k)
                if (auto c = sample_poisson(lambda_k(k), rng); c > 0)
                    out[k] = c;
            return out;
        }
        if (!finite_intensity())
            throw DivergenceError("unbounded eta requires rho < 1");
        const double mass = lambda_tail(3);
        const std::uint64_t total = sample_poisson(mass, rng);
        for (std::uint64_t i = 0; i < total; ++i) {
            double u = rng.uniform() * mass;
            int k = 3;
            for (;; ++k) {
                u -= lambda_k(k);
                if (u < 0.0 || k > tail_cutoff_ + 1000)
                    break;
            }
            ++out[k];
        }
        return out;
    }

  private:
    void require_subcritical(const char* what) const
    {
        if (!finite_intensity())
            throw DivergenceError(std::string(what) + " diverges for rho >= 1");
    }

    void check_state(long t) const
    {
        if (t == 1 || t == 2 || t < 0)
            throw DomainError("cycle-length laws live on {0,3,4,...}");
        require_subcritical("cycle-length law");
    }

    double rho_;
    int tail_cutoff_ = 0;
};

}  // namespace grgc
