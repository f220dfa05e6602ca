#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "kplane/estimates.hpp"
#include "kplane/fields.hpp"
#include "kplane/geometry.hpp"
#include "kplane/quadrature.hpp"
#include "kplane/rng.hpp"

namespace kplane {

/// A function on a linear Grassmannian, evaluated through frames (must depend
/// only on the span).
using SubspaceFn = std::function<double(const Frame&)>;

namespace detail {

/// Radial proposal for integrating `f`-like decay over an m-dimensional
/// offset space: matches the power decay when finite, ball-bounded when the
/// integrand has compact support.
inline RadialProposal offset_proposal(int m, std::optional<double> support, double decay,
                                      double zero_tilt = 0.0) {
    if (support) return RadialProposal::ball(m, *support, zero_tilt);
    if (!std::isfinite(decay)) return RadialProposal::power_law(m, m + zero_tilt + 3.0, zero_tilt);
    require(decay > m, "decay exponent > offset dimension (integrable)",
            "decay = " + std::to_string(decay) + ", dimension = " + std::to_string(m));
    return RadialProposal::power_law(m, decay + zero_tilt, zero_tilt);
}

inline void require_plane_integrable(const ScalarField& f, int m) {
    if (f.meta.support_radius) return;
    require(f.meta.decay_exponent.has_value(),
            "field declares decay_exponent or compact support", "field " + f.meta.label);
    require(*f.meta.decay_exponent > m, "decay_exponent > plane dimension (integrable on planes)",
            "decay = " + std::to_string(*f.meta.decay_exponent));
}

inline void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw numeric_error(std::string(what) + ": evaluator produced NaN/inf");
}

} // namespace detail

// ---------------------------------------------------------------------------
// k-plane transform
// ---------------------------------------------------------------------------

/// Integral of f over the affine plane tau with respect to Euclidean volume.
/// TensorTan collapses to a 1-D radial rule for fields with a radial profile
/// (|x|^2 = |tau|^2 + |s|^2 on the plane) and uses a tensor tan-substituted
/// rule otherwise (k <= 3). MonteCarlo importance-samples points of the plane.
inline Estimate kplane_transform(const ScalarField& f, const AffinePlane& tau,
                                 const QuadratureSpec& q) {
    detail::require(f.domain == FieldDomain::Euclidean, "field on R^n", "kplane_transform");
    const int k = tau.dim();
    detail::require(k >= 1, "plane dimension >= 1", "kplane_transform");
    detail::require_plane_integrable(f, k);
    const double dist = tau.distance();

    if (q.mode == QuadratureSpec::Mode::TensorTan) {
        if (f.meta.radial_profile) {
            const auto& profile = f.meta.radial_profile;
            const double area = sphere_area(k - 1);
            double value = 0.0;
            if (f.meta.support_radius) {
                const double r2 = *f.meta.support_radius * *f.meta.support_radius
                                - dist * dist;
                if (r2 <= 0.0) return Estimate::exact(0.0);
                const double rmax = std::sqrt(r2);
                value = area * integrate_interval(
                    [&](double r) {
                        return std::pow(r, k - 1) * profile(std::hypot(dist, r));
                    },
                    0.0, rmax, q.order);
            } else {
                value = area * integrate_half_line(
                    [&](double r) {
                        return std::pow(r, k - 1) * profile(std::hypot(dist, r));
                    },
                    q.order);
            }
            detail::check_finite(value, "kplane_transform");
            return Estimate::exact(value);
        }
        detail::require(k <= 3, "TensorTan requires k <= 3 (cost grows as order^k)",
                        "k = " + std::to_string(k));
        const auto& rule = gauss_legendre(q.order);
        VectorXd s(k);
        double value = 0.0;
        std::function<void(int, double)> walk = [&](int axis, double acc) {
            for (int i = 0; i < q.order; ++i) {
                const double t = 0.5 * kPi * rule.nodes[i];
                const double c = std::cos(t);
                s[axis] = std::tan(t);
                const double w = 0.5 * kPi * rule.weights[i] / (c * c);
                if (axis + 1 == k)
                    value += acc * w * f(tau.point(s));
                else
                    walk(axis + 1, acc * w);
            }
        };
        walk(0, 1.0);
        detail::check_finite(value, "kplane_transform");
        return Estimate::exact(value);
    }

    // Monte Carlo over weighted points of the plane.
    std::optional<double> sup;
    if (f.meta.support_radius) {
        const double r2 = *f.meta.support_radius * *f.meta.support_radius - dist * dist;
        if (r2 <= 0.0) return Estimate::exact(0.0);
        sup = std::sqrt(r2);
    }
    const auto proposal =
        detail::offset_proposal(k, sup, f.meta.decay_exponent.value_or(kInf));
    RandomStream stream(q.seed, "kplane");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const auto zs = sample_subplane_with(tau, 0, proposal, sub);
        const double v = f(zs.plane.offset) * zs.importance_weight;
        detail::check_finite(v, "kplane_transform");
        acc.add(v);
    }
    return acc.estimate();
}

// ---------------------------------------------------------------------------
// (j,k)-transform
// ---------------------------------------------------------------------------

/// View a Euclidean field as a field on point-planes (j = 0).
inline ScalarField as_plane_field(const ScalarField& f) {
    detail::require(f.domain == FieldDomain::Euclidean, "field on R^n", "as_plane_field");
    ScalarField g = f;
    g.domain = FieldDomain::AffineGrassmannian;
    g.j = 0;
    const auto eval = f.point_eval;
    g.plane_eval = [eval](const AffinePlane& z) { return eval(z.offset); };
    return g;
}

/// Integral of f over all j-planes contained in tau, against the canonical
/// measure (Haar over directions inside tau, Lebesgue over offsets). j = 0
/// reproduces the k-plane transform sample-for-sample on shared streams.
inline Estimate jk_transform(const ScalarField& f, const AffinePlane& tau,
                             const QuadratureSpec& q) {
    detail::require(f.domain == FieldDomain::AffineGrassmannian,
                    "field on the affine Grassmannian", "jk_transform");
    const int j = f.j;
    const int k = tau.dim();
    detail::require(j >= 0 && j < k, "0 <= j < k",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k));
    detail::require(q.mode == QuadratureSpec::Mode::MonteCarlo,
                    "jk_transform is MonteCarlo-only");
    detail::require_plane_integrable(f, k - j);
    const auto proposal = detail::offset_proposal(
        k - j, std::nullopt, f.meta.decay_exponent.value_or(kInf));
    RandomStream stream(q.seed, "kplane"); // shared with the j = 0 point path
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const auto zs = sample_subplane_with(tau, j, proposal, sub);
        const double v = f(zs.plane) * zs.importance_weight;
        detail::check_finite(v, "jk_transform");
        acc.add(v);
    }
    return acc.estimate();
}

// ---------------------------------------------------------------------------
// Funk-type transforms
// ---------------------------------------------------------------------------

/// Mean of phi over the subsphere S^{n-1} cut by span(tau0); the measure is
/// the rotation-invariant probability measure. Rank 1 is the two-point
/// average, evaluated exactly.
inline Estimate funk_transform(const ScalarField& phi, const Frame& tau0,
                               const QuadratureSpec& q) {
    detail::require(phi.domain == FieldDomain::Sphere, "field on the sphere",
                    "funk_transform");
    detail::require(tau0.rank() >= 1, "rank >= 1", "funk_transform");
    if (tau0.rank() == 1) {
        const VectorXd c = tau0.columns().col(0);
        const double v = 0.5 * (phi(c) + phi(VectorXd(-c)));
        detail::check_finite(v, "funk_transform");
        return Estimate::exact(v);
    }
    RandomStream stream(q.seed, "funk");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const double v = phi(sample_subsphere(tau0, sub));
        detail::check_finite(v, "funk_transform");
        acc.add(v);
    }
    return acc.estimate();
}

/// Mean of g over Haar j-subspaces of span(tau0).
inline Estimate funk_jk_transform(const SubspaceFn& g, const Frame& tau0, int j,
                                  const QuadratureSpec& q) {
    const int k = tau0.rank();
    detail::require(j >= 1 && j < k, "1 <= j < k",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k));
    RandomStream stream(q.seed, "funkjk");
    MeanAccumulator acc;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const Frame local = haar_subspace(k, j, sub);
        const Frame zeta(tau0.columns() * local.columns());
        const double v = g(zeta);
        detail::check_finite(v, "funk_jk_transform");
        acc.add(v);
    }
    return acc.estimate();
}

// ---------------------------------------------------------------------------
// Stereographic conjugation between the affine and compact pictures
// ---------------------------------------------------------------------------

/// rho_1(zeta) = (1+|zeta|^2)^{-(k+1)/2}, rho_2(tau) = (1+|tau|^2)^{-(j+1)/2}.
inline double rho1_weight(int k, const AffinePlane& z) {
    return std::pow(1.0 + z.offset.squaredNorm(), -0.5 * (k + 1));
}
inline double rho2_weight(int j, const AffinePlane& t) {
    return std::pow(1.0 + t.offset.squaredNorm(), -0.5 * (j + 1));
}

/// Evaluates the (j,k)-transform of f through the compact picture:
///   a * rho_2(tau) * [mean over Haar (j+1)-subspaces of the lift of tau
///                     of (rho_1^{-1} f) at the unlifted plane],
/// with a = sigma_k / sigma_j.
inline Estimate radon_from_funk(const ScalarField& f, const AffinePlane& tau,
                                const QuadratureSpec& q) {
    detail::require(f.domain == FieldDomain::AffineGrassmannian,
                    "field on the affine Grassmannian", "radon_from_funk");
    const int j = f.j;
    const int k = tau.dim();
    detail::require(j >= 0 && j < k, "0 <= j < k", "radon_from_funk");
    const Frame lifted = lift(tau);
    const double a = sphere_area(k) / sphere_area(j);
    const double r2 = rho2_weight(j, tau);
    RandomStream stream(q.seed, "radon-from-funk");
    MeanAccumulator acc;
    long skipped = 0;
    for (long i = 0; i < q.samples; ++i) {
        auto sub = stream.at(static_cast<uint64_t>(i));
        const Frame local = haar_subspace(k + 1, j + 1, sub);
        const Frame zeta0(lifted.columns() * local.columns());
        try {
            const AffinePlane zeta = unlift(zeta0);
            const double v = f(zeta) / rho1_weight(k, zeta);
            detail::check_finite(v, "radon_from_funk");
            acc.add(v);
        } catch (const numeric_error&) {
            ++skipped; // exceptional set has measure zero
            if (skipped > q.samples / 100 + 8)
                throw numeric_error("radon_from_funk: too many exceptional-set draws");
        }
    }
    return acc.estimate().scaled(a * r2);
}

/// Evaluates the Funk-type transform of g on G_{n+1,j+1} at a (k+1)-frame
/// through the affine picture:
///   a^{-1} * rho_2^{-1}(tau) * R_{j,k}[rho_1 * (g o lift)](tau),
/// at tau = unlift(tau0). Throws on the exceptional set.
inline Estimate funk_from_radon(const SubspaceFn& g, const Frame& tau0, int j,
                                const QuadratureSpec& q) {
    const int kp1 = tau0.rank();
    detail::require(j >= 0 && j + 1 < kp1, "0 <= j < k", "funk_from_radon");
    const int k = kp1 - 1;
    const AffinePlane tau = unlift(tau0);
    ScalarField integrand;
    integrand.domain = FieldDomain::AffineGrassmannian;
    integrand.n = tau.ambient();
    integrand.j = j;
    integrand.plane_eval = [g, k](const AffinePlane& z) {
        return rho1_weight(k, z) * g(lift(z));
    };
    integrand.meta.decay_exponent = k + 1.0;
    integrand.meta.label = "lift-pullback";
    const Estimate r = jk_transform(integrand, tau, q);
    const double a = sphere_area(k) / sphere_area(j);
    return r.scaled(1.0 / (a * rho2_weight(j, tau)));
}

} // namespace kplane
