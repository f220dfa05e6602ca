#pragma once

#include <cmath>
#include <cstdint>

#include "kplane/errors.hpp"

namespace kplane {

/// Evaluation budget: Monte-Carlo sample count or a tensor quadrature order
/// (per axis, via the tan substitution mapping R to (-pi/2, pi/2)).
struct QuadratureSpec {
    enum class Mode { MonteCarlo, TensorTan };

    Mode mode = Mode::MonteCarlo;
    long samples = 100000;
    int order = 64;
    uint64_t seed = 0;

    static QuadratureSpec mc(long samples, uint64_t seed) {
        detail::require(samples >= 1, "samples >= 1");
        QuadratureSpec q;
        q.mode = Mode::MonteCarlo;
        q.samples = samples;
        q.seed = seed;
        return q;
    }

    static QuadratureSpec tensor(int order) {
        detail::require(order >= 2, "order >= 2");
        QuadratureSpec q;
        q.mode = Mode::TensorTan;
        q.order = order;
        return q;
    }

    QuadratureSpec with_seed(uint64_t s) const {
        QuadratureSpec q = *this;
        q.seed = s;
        return q;
    }

    QuadratureSpec with_samples(long n) const {
        QuadratureSpec q = *this;
        q.samples = n;
        return q;
    }
};

/// A numerical value with the standard error of its Monte-Carlo mean
/// (0 for deterministic quadrature).
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    long samples_used = 0;

    static Estimate exact(double v) { return {v, 0.0, 0}; }

    Estimate scaled(double c) const { return {c * value, std::abs(c) * std_error, samples_used}; }

    /// Delta-method push-through of x -> x^a.
    Estimate powed(double a) const {
        const double v = std::pow(value, a);
        const double se = std::abs(a) * std::pow(value, a - 1.0) * std_error;
        return {v, se, samples_used};
    }
};

/// Streaming mean with the sample standard error of the mean.
class MeanAccumulator {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    long count() const { return n_; }

    Estimate estimate() const {
        Estimate e;
        e.samples_used = n_;
        e.value = mean_;
        if (n_ > 1) {
            const double var = std::max(m2_, 0.0) / (static_cast<double>(n_) - 1.0);
            e.std_error = std::sqrt(var / static_cast<double>(n_));
        }
        return e;
    }

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Standard error of a difference lhs - c * rhs.
inline double combined_std_error(const Estimate& lhs, const Estimate& rhs, double c) {
    return std::sqrt(lhs.std_error * lhs.std_error + c * c * rhs.std_error * rhs.std_error);
}

} // namespace kplane
