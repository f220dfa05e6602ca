#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "kplane/estimates.hpp"
#include "kplane/fields.hpp"
#include "kplane/geometry.hpp"
#include "kplane/quadrature.hpp"
#include "kplane/transforms.hpp"

namespace kplane {

// ---------------------------------------------------------------------------
// Weighted integrators over the four domains
// ---------------------------------------------------------------------------

struct RadialHints {
    /// g ~ r^{zero_power} at the origin (integrable iff zero_power > -dim).
    double zero_power = 0.0;
    /// g <= C r^{-decay} at infinity; +inf for super-polynomial decay.
    double decay = kInf;
    std::optional<double> support_radius;
    /// Set when g(x) = h(|x|): the integral collapses to the radial rule and
    /// the estimate is deterministic.
    bool radial = false;
};

namespace detail {

/// 1-D radial integral of F(r) = r^{dim-1} g(r theta) with a power-absorbing
/// substitution near 0 and the tan substitution (or compact cut) for the tail.
template <class F>
double radial_integral(F&& integrand, int dim, const RadialHints& hints, int order) {
    const double kappa = dim + hints.zero_power;
    require(kappa > 0.0, "zero_power > -dim (integrable at the origin)",
            "zero_power = " + std::to_string(hints.zero_power));
    const double r1 = hints.support_radius ? *hints.support_radius : 1.0;
    // [0, r1]: r = r1 y^{1/kappa} turns an r^{kappa-1} vanishing/singularity
    // into a bounded smooth integrand.
    double head = integrate_interval(
        [&](double y) {
            const double r = r1 * std::pow(y, 1.0 / kappa);
            const double jac = (r1 / kappa) * std::pow(y, 1.0 / kappa - 1.0);
            return integrand(r) * jac;
        },
        0.0, 1.0, order);
    if (hints.support_radius) return head;
    if (std::isfinite(hints.decay))
        require(hints.decay > dim, "decay > dim (integrable at infinity)",
                "decay = " + std::to_string(hints.decay) + ", dim = " + std::to_string(dim));
    // Tail over [1, inf) by the tan substitution.
    return head + integrate_interval(
                      [&](double t) {
                          const double c = std::cos(t);
                          return integrand(std::tan(t)) / (c * c);
                      },
                      kPi / 4.0, kPi / 2.0, order);
}

} // namespace detail

/// Integral of g over R^n by polar decomposition: deterministic radial rule
/// times uniform-sphere Monte Carlo over directions (deterministic outright
/// for radial integrands).
inline Estimate euclidean_integral(int n, const std::function<double(const VectorXd&)>& g,
                                   const RadialHints& hints, const QuadratureSpec& q,
                                   int radial_order = 96) {
    detail::require(n >= 1, "n >= 1", "euclidean_integral");
    const double area = sphere_area(n - 1);
    auto directional = [&](const VectorXd& theta) {
        return detail::radial_integral(
            [&](double r) { return std::pow(r, n - 1) * g(r * theta); }, n, hints,
            radial_order);
    };
    if (hints.radial || n == 1) {
        const double v = directional(VectorXd::Unit(n, 0));
        if (n == 1) {
            // Both rays.
            return Estimate::exact(v + directional(VectorXd(-VectorXd::Unit(1, 0))));
        }
        return Estimate::exact(area * v);
    }
    RandomStream stream(q.seed, "euclidean");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        acc.add(directional(uniform_direction(n, sub)));
    }
    return acc.estimate().scaled(area);
}

struct AffineHints {
    double zero_power = 0.0; // g ~ |tau|^{zero_power} at distance 0
    double decay = kInf;     // g <= C |tau|^{-decay} at infinity
    std::optional<double> support_radius;
};

/// Integral of g over the affine Grassmannian of k-planes in R^n against
/// d tau = d* xi du, by importance sampling with a decay-matched proposal.
inline Estimate affine_integral(int n, int k,
                                const std::function<double(const AffinePlane&)>& g,
                                const AffineHints& hints, const QuadratureSpec& q,
                                const std::string& stream_label = "affine") {
    const int m = n - k;
    detail::require(k >= 1 && k < n, "1 <= k < n", "affine_integral");
    RadialProposal proposal = [&] {
        if (hints.support_radius)
            return RadialProposal::ball(m, *hints.support_radius, hints.zero_power);
        if (!std::isfinite(hints.decay))
            return RadialProposal::power_law(m, m + hints.zero_power + 3.0, hints.zero_power);
        detail::require(hints.decay > m, "decay > n - k (integrable at infinity)",
                        "decay = " + std::to_string(hints.decay));
        return RadialProposal::power_law(m, hints.decay + hints.zero_power, hints.zero_power);
    }();
    RandomStream stream(q.seed, stream_label);
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const auto ws = sample_affine_plane_with(n, k, proposal, sub);
        const double v = g(ws.plane) * ws.importance_weight;
        detail::check_finite(v, "affine_integral");
        acc.add(v);
    }
    return acc.estimate();
}

/// Integral of g(theta) |theta_n|^{pole_power} over S^{n-1} against the
/// normalized measure; the pole power may be singular (> -1).
inline Estimate sphere_integral(int n, const std::function<double(const VectorXd&)>& g,
                                double pole_power, const QuadratureSpec& q,
                                const std::string& stream_label = "sphere") {
    detail::require(n >= 2, "n >= 2", "sphere_integral");
    RandomStream stream(q.seed, stream_label);
    MeanAccumulator acc;
    if (pole_power == 0.0) {
        for (long i = 0; i < q.samples; ++i) {
            auto sub = stream.at(static_cast<uint64_t>(i));
            const double v = g(uniform_direction(n, sub));
            detail::check_finite(v, "sphere_integral");
            acc.add(v);
        }
        return acc.estimate();
    }
    detail::require(pole_power > -1.0, "pole exponent > -1 (integrable)",
                    "exponent = " + std::to_string(pole_power));
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const auto ss = sample_sphere_pole_power(n, pole_power, sub);
        const double v = g(ss.theta) * ss.weight;
        detail::check_finite(v, "sphere_integral");
        acc.add(v);
    }
    return acc.estimate();
}

/// Integral of (sin d)^{sin_pow} (cos d)^{cos_pow} Phi(tau0) over G_{n,k}
/// against the Haar probability measure, with d the geodesic pole distance.
/// Pass vanish > 0 when Phi vanishes like (cos d)^{vanish} at the equator.
inline Estimate grassmann_integral(int n, int k, const SubspaceFn& phi, double sin_pow,
                                   double cos_pow, double vanish, const QuadratureSpec& q,
                                   const std::string& stream_label = "grassmann") {
    detail::require(n >= 2 && k >= 1 && k < n, "1 <= k < n", "grassmann_integral");
    const VectorXd pole = VectorXd::Unit(n, n - 1);
    RandomStream stream(q.seed, stream_label);
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const auto ts = sample_subspace_tilted(n, k, pole, sin_pow, cos_pow, vanish, sub);
        const double v = phi(ts.frame) * ts.weight;
        detail::check_finite(v, "grassmann_integral");
        acc.add(v);
    }
    return acc.estimate();
}

/// Weighted solid integral over a star set: integral of |x|^e dx over L,
/// with the radial part closed per direction.
inline Estimate star_weighted_moment(const StarSet& L, double e, const QuadratureSpec& q) {
    const int n = L.n;
    detail::require(n + e > 0.0, "exponent > -n (integrable)",
                    "exponent = " + std::to_string(e));
    RandomStream stream(q.seed, "starmoment");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const VectorXd theta = uniform_direction(n, sub);
        acc.add(std::pow(L.rho(theta), n + e));
    }
    return acc.estimate().scaled(sphere_area(n - 1) / (n + e));
}

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------

/// Pole weight (sin d)^{sin_pow} (cos d)^{cos_pow} on a sphere or compact
/// Grassmannian; on the sphere cos d = |theta_n|.
struct PoleWeight {
    double sin_pow = 0.0;
    double cos_pow = 0.0;
};

struct NormSpec {
    enum class Domain { Euclidean, AffineGrassmannian, Sphere, Grassmannian };
    Domain domain = Domain::Euclidean;
    int n = 0;
    int k = 0;        // plane/subspace dimension for the Grassmannian domains
    double p = 1.0;   // [1, inf]
    double mu = 0.0;  // |x|^mu or |tau|^mu radial weight exponent
    std::optional<PoleWeight> pole_weight; // named compact-domain weights
};

/// (integral of |f|^p weight)^{1/p}; p = inf is a sampled essential sup
/// (a lower bound). The integrability precheck refuses to run divergent
/// combinations and names the violated condition.
inline Estimate weighted_norm(const ScalarField& f, const NormSpec& spec,
                              const QuadratureSpec& q) {
    detail::require(spec.p >= 1.0, "1 <= p <= inf", "weighted_norm");
    const double p = spec.p;

    if (std::isinf(p)) {
        // Sampled essential sup of |f| |x|^mu.
        RandomStream stream(q.seed, "esssup");
        double best = 0.0;
        if (spec.domain == NormSpec::Domain::AffineGrassmannian) {
            const auto proposal = RadialProposal::power_law(spec.n - spec.k, spec.n + 1.0);
            for (long i = 0; i < q.samples; ++i) {
                auto sub = stream.at(static_cast<uint64_t>(i));
                const auto ws = sample_affine_plane_with(spec.n, spec.k, proposal, sub);
                const double w =
                    spec.mu == 0.0 ? 1.0 : std::pow(ws.plane.distance(), spec.mu);
                best = std::max(best, std::abs(f(ws.plane)) * w);
            }
        } else {
            detail::require(spec.domain == NormSpec::Domain::Euclidean,
                            "p = inf supported on Euclidean and affine domains");
            const auto proposal = RadialProposal::power_law(spec.n, spec.n + 1.0);
            for (long i = 0; i < q.samples; ++i) {
                auto sub = stream.at(static_cast<uint64_t>(i));
                const VectorXd dir = uniform_direction(spec.n, sub);
                const double r = proposal.sample(sub);
                const VectorXd x = r * dir;
                best = std::max(best,
                                std::abs(f(x)) * (spec.mu == 0.0 ? 1.0 : std::pow(r, spec.mu)));
            }
            // include the origin, where radial proposals never land exactly
            if (spec.mu == 0.0) best = std::max(best, std::abs(f(VectorXd::Zero(spec.n))));
        }
        return Estimate{best, 0.0, q.samples};
    }

    switch (spec.domain) {
        case NormSpec::Domain::Euclidean: {
            const double decay = f.meta.decay_exponent.value_or(
                f.meta.support_radius ? kInf : 0.0);
            RadialHints hints;
            hints.zero_power = spec.mu * p;
            hints.support_radius = f.meta.support_radius;
            hints.decay = std::isfinite(decay) ? p * decay - spec.mu * p : kInf;
            hints.radial = static_cast<bool>(f.meta.radial_profile);
            const auto eval = f.point_eval;
            const double mup = spec.mu * p;
            auto g = [eval, p, mup](const VectorXd& x) {
                const double fx = std::abs(eval(x));
                const double w = mup == 0.0 ? 1.0 : std::pow(x.norm(), mup);
                return std::pow(fx, p) * w;
            };
            return euclidean_integral(spec.n, g, hints, q).powed(1.0 / p);
        }
        case NormSpec::Domain::AffineGrassmannian: {
            detail::require(f.domain == FieldDomain::AffineGrassmannian,
                            "field and norm domains agree", "weighted_norm");
            const double decay = f.meta.decay_exponent.value_or(kInf);
            AffineHints hints;
            hints.zero_power = spec.mu * p;
            hints.decay = std::isfinite(decay) ? p * decay - spec.mu * p : kInf;
            hints.support_radius = f.meta.support_radius;
            const auto eval = f.plane_eval;
            const double mup = spec.mu * p;
            auto g = [eval, p, mup](const AffinePlane& tau) {
                const double v = std::abs(eval(tau));
                const double w = mup == 0.0 ? 1.0 : std::pow(tau.distance(), mup);
                return std::pow(v, p) * w;
            };
            return affine_integral(spec.n, spec.k, g, hints, q).powed(1.0 / p);
        }
        case NormSpec::Domain::Sphere: {
            detail::require(f.domain == FieldDomain::Sphere, "field and norm domains agree",
                            "weighted_norm");
            const PoleWeight w = spec.pole_weight.value_or(PoleWeight{});
            detail::require(w.sin_pow > 1.0 - spec.n, "sin exponent > 1 - n (integrable)",
                            "sin exponent = " + std::to_string(w.sin_pow));
            const auto eval = f.point_eval;
            const double p_ = p, sp = w.sin_pow;
            const int n = spec.n;
            auto g = [eval, p_, sp, n](const VectorXd& theta) {
                const double base = std::pow(std::abs(eval(theta)), p_);
                const double s2 = std::max(1.0 - theta[n - 1] * theta[n - 1], 0.0);
                return sp == 0.0 ? base : base * std::pow(s2, 0.5 * sp);
            };
            return sphere_integral(spec.n, g, w.cos_pow, q).powed(1.0 / p);
        }
        case NormSpec::Domain::Grassmannian:
            throw domain_violation(
                "Grassmannian norms are evaluated through grassmann_integral with an explicit "
                "subspace function");
    }
    throw domain_violation("unknown norm domain");
}

// ---------------------------------------------------------------------------
// Star-set functionals
// ---------------------------------------------------------------------------

/// V_n(L) = b_n * mean of rho^n over the sphere.
inline Estimate star_volume(const StarSet& L, const QuadratureSpec& q) {
    RandomStream stream(q.seed, "starvol");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const double r = L.rho(uniform_direction(L.n, sub));
        acc.add(std::pow(r, L.n));
    }
    return acc.estimate().scaled(ball_volume(L.n));
}

/// m-th dual Quermassintegral of the central section:
/// b_k * (Funk mean of rho^m over the subsphere of tau0); m = k recovers the
/// section volume.
inline Estimate section_dual_quermass(const StarSet& L, const Frame& tau0, double m,
                                      const QuadratureSpec& q) {
    detail::require(m >= 0.0 || L.pole_vanish == 0.0,
                    "rho^m integrable on the subsphere (m >= 0 for vanishing radial)",
                    "m = " + std::to_string(m));
    ScalarField rho_m;
    rho_m.domain = FieldDomain::Sphere;
    rho_m.n = L.n;
    const StarSet copy = L;
    rho_m.point_eval = [copy, m](const VectorXd& theta) {
        return std::pow(copy.rho(theta), m);
    };
    rho_m.meta.label = "rho^m";
    return funk_transform(rho_m, tau0, q).scaled(ball_volume(tau0.rank()));
}

/// m-th dual Quermassintegral of L itself: b_n * mean of rho^m over the sphere.
inline Estimate dual_quermass(const StarSet& L, double m, const QuadratureSpec& q) {
    detail::require(m >= 0.0 || L.pole_vanish == 0.0,
                    "rho^m integrable on the sphere (m >= 0 for vanishing radial)",
                    "m = " + std::to_string(m));
    RandomStream stream(q.seed, "dualquermass");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        acc.add(std::pow(L.rho(uniform_direction(L.n, sub)), m));
    }
    return acc.estimate().scaled(ball_volume(L.n));
}

} // namespace kplane
