#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "kplane/constants.hpp"
#include "kplane/errors.hpp"

namespace kplane {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendre compute_gauss_legendre(int order) {
    require(order >= 2, "order >= 2", "Gauss-Legendre order " + std::to_string(order));
    GaussLegendre rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton from the Chebyshev-like initial guess.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[order - 1 - i] = rule.weights[i];
    }
    return rule;
}

} // namespace detail

/// Cached rule lookup; rules are immutable once built.
inline const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, detail::compute_gauss_legendre(order)).first;
    return it->second;
}

/// Integral of h over [a, b].
template <class F>
double integrate_interval(F&& h, double a, double b, int order) {
    const auto& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < order; ++i)
        sum += rule.weights[i] * h(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Integral of h over [0, inf) via r = tan t; exact-grade for integrands with
/// power or faster decay.
template <class F>
double integrate_half_line(F&& h, int order) {
    return integrate_interval(
        [&](double t) {
            const double c = std::cos(t);
            const double r = std::tan(t);
            const double v = h(r);
            return v / (c * c);
        },
        0.0, 0.5 * kPi, order);
}

/// Integral of h over all of R via s = tan t.
template <class F>
double integrate_real_line(F&& h, int order) {
    return integrate_interval(
        [&](double t) {
            const double c = std::cos(t);
            return h(std::tan(t)) / (c * c);
        },
        -0.5 * kPi, 0.5 * kPi, order);
}

} // namespace kplane
