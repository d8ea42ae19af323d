#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "grgc/errors.hpp"
#include "grgc/rng.hpp"

namespace grgc {

enum class WeightKind { Constant, TwoPoint, Exponential, Gamma, Pareto };

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* to_string(Regime r)
{
    switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

/// Distribution of a positive vertex weight W with closed-form moments.
///
/// Divergent moments are reported as +infinity; callers that need a finite
/// moment check `std::isfinite` and reject explicitly.
class WeightModel {
  public:
    static WeightModel constant(double c) { return WeightModel(WeightKind::Constant, {c}); }

    /// W = v1 with probability `prob`, v2 otherwise.
    static WeightModel two_point(double v1, double v2, double prob)
    {
        if (!(prob > 0.0 && prob < 1.0))
            throw DomainError("two-point probability must lie in (0,1)");
        return WeightModel(WeightKind::TwoPoint, {v1, v2, prob});
    }

    static WeightModel exponential(double rate)
    {
        return WeightModel(WeightKind::Exponential, {rate});
    }
    static WeightModel gamma(double shape, double scale)
    {
        return WeightModel(WeightKind::Gamma, {shape, scale});
    }
    static WeightModel pareto(double scale, double tail_index)
    {
        return WeightModel(WeightKind::Pareto, {scale, tail_index});
    }

    WeightKind kind() const noexcept { return kind_; }
    std::span<const double> params() const noexcept { return {params_.data(), params_.size()}; }

    /// E[W^r] in closed form; +infinity when the moment diverges.
    double moment(int r) const
    {
        if (r < 1)
            throw DomainError("moment order must be >= 1");
        const double rr = r;
        switch (kind_) {
        case WeightKind::Constant: return std::pow(params_[0], rr);
        case WeightKind::TwoPoint:
            return params_[2] * std::pow(params_[0], rr) +
                   (1.0 - params_[2]) * std::pow(params_[1], rr);
        case WeightKind::Exponential:
            return std::exp(std::lgamma(rr + 1.0) - rr * std::log(params_[0]));
        case WeightKind::Gamma:
            return std::exp(rr * std::log(params_[1]) + std::lgamma(params_[0] + rr) -
                            std::lgamma(params_[0]));
        case WeightKind::Pareto: {
            const double alpha = params_[1];
            if (alpha <= rr)
                return std::numeric_limits<double>::infinity();
            return alpha * std::pow(params_[0], rr) / (alpha - rr);
        }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    /// E[W^2] / E[W]; the parameter of the limiting cycle intensities.
    double rho() const
    {
        const double m2 = moment(2);
        if (!std::isfinite(m2))
            throw DivergenceError("E[W^2] is infinite for " + describe());
        return m2 / moment(1);
    }

    /// 2E[W^2] / (E[W^2] + E[W]): base of the polynomial decay of long cycles.
    /// Only meaningful (and < 1) in the subcritical regime.
    double long_cycle_base() const;

    bool finite_moment(int r) const { return std::isfinite(moment(r)); }

    double sample(RngStream& rng) const
    {
        switch (kind_) {
        case WeightKind::Constant: return params_[0];
        case WeightKind::TwoPoint: return rng.uniform() < params_[2] ? params_[0] : params_[1];
        case WeightKind::Exponential: return -std::log(rng.uniform_open()) / params_[0];
        case WeightKind::Gamma: {
            std::gamma_distribution<double> dist(params_[0], params_[1]);
            double w = dist(rng);
            // gamma draws with tiny shape can underflow to 0
            return w > 0.0 ? w : std::numeric_limits<double>::min();
        }
        case WeightKind::Pareto:
            return params_[0] * std::pow(rng.uniform_open(), -1.0 / params_[1]);
        }
        return params_[0];
    }

    std::string describe() const
    {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
        case WeightKind::Constant: os << "constant(c=" << params_[0] << ")"; break;
        case WeightKind::TwoPoint:
            os << "two-point(v1=" << params_[0] << ",v2=" << params_[1] << ",prob=" << params_[2]
               << ")";
            break;
        case WeightKind::Exponential: os << "exponential(rate=" << params_[0] << ")"; break;
        case WeightKind::Gamma:
            os << "gamma(shape=" << params_[0] << ",scale=" << params_[1] << ")";
            break;
        case WeightKind::Pareto:
            os << "pareto(scale=" << params_[0] << ",tail_index=" << params_[1] << ")";
            break;
        }
        return os.str();
    }

  private:
    WeightModel(WeightKind kind, std::vector<double> params)
        : kind_(kind), params_(std::move(params))
    {
        for (double p : params_)
            if (!(p > 0.0) || !std::isfinite(p))
                throw DomainError("weight model parameters must be positive and finite");
    }

    WeightKind kind_;
    std::vector<double> params_;
};

inline double moment(const WeightModel& model, int r) { return model.moment(r); }

/// Subcritical iff E[W^2] < E[W]; an infinite second moment is supercritical.
inline Regime regime(const WeightModel& model)
{
    const double m1 = model.moment(1);
    const double m2 = model.moment(2);
    if (!std::isfinite(m2) || m2 > m1)
        return Regime::Supercritical;
    return m2 < m1 ? Regime::Subcritical : Regime::Critical;
}

inline double WeightModel::long_cycle_base() const
{
    if (regime(*this) != Regime::Subcritical)
        throw DomainError("long-cycle base requires a subcritical weight model");
    const double m1 = moment(1);
    const double m2 = moment(2);
    return 2.0 * m2 / (m2 + m1);
}

/// Realised weights W_1..W_n together with L_n = sum W_i.
class WeightVector {
  public:
    WeightVector() = default;

    explicit WeightVector(std::vector<double> weights) : weights_(std::move(weights))
    {
        // Neumaier summation keeps L_n within a few ulps of the exact sum.
        double sum = 0.0;
        double comp = 0.0;
        for (double w : weights_) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw DomainError("weights must be positive and finite");
            const double t = sum + w;
            comp += std::abs(sum) >= w ? (sum - t) + w : (w - t) + sum;
            sum = t;
        }
        total_ = sum + comp;
    }

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const noexcept { return weights_[i]; }
    std::span<const double> values() const noexcept { return weights_; }
    double total() const noexcept { return total_; }

    bool operator==(const WeightVector&) const = default;

  private:
    std::vector<double> weights_;
    double total_ = 0.0;
};

inline WeightVector sample_weights(const WeightModel& model, std::size_t n, RngStream& rng)
{
    if (n < 1)
        throw DomainError("sample_weights requires n >= 1");
    std::vector<double> w(n);
    for (auto& x : w)
        x = model.sample(rng);
    return WeightVector(std::move(w));
}

}  // namespace grgc
