#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kplane/constants.hpp"
#include "kplane/errors.hpp"
#include "kplane/geometry.hpp"
#include "kplane/rng.hpp"

namespace kplane {

// ---------------------------------------------------------------------------
// Scalar fields over the three domains
// ---------------------------------------------------------------------------

enum class FieldDomain { Euclidean, AffineGrassmannian, Sphere };

struct FieldMeta {
    /// |f(x)| <= C (1+|x|)^{-decay_exponent}; +inf for super-polynomial decay.
    std::optional<double> decay_exponent;
    std::optional<double> support_radius;
    /// Set when f(x) = profile(|x|); lets plane quadrature collapse to 1-D.
    std::function<double(double)> radial_profile;
    /// Exact k-plane transform as a function of (k, plane distance), present
    /// for fields with a closed form.
    std::function<double(int, double)> closed_kplane;
    /// Exact sup of |f| restricted to a plane, when known.
    std::function<double(const AffinePlane&)> sup_on_plane;
    std::string label; // short descriptor used in reports
};

struct ScalarField {
    FieldDomain domain = FieldDomain::Euclidean;
    int n = 0; // ambient dimension (Sphere: S^{n-1} in R^n)
    int j = 0; // plane dimension when domain == AffineGrassmannian
    std::function<double(const VectorXd&)> point_eval;
    std::function<double(const AffinePlane&)> plane_eval;
    FieldMeta meta;

    double operator()(const VectorXd& x) const { return point_eval(x); }
    double operator()(const AffinePlane& z) const { return plane_eval(z); }
};

inline ScalarField gaussian_field(int n) {
    ScalarField f;
    f.domain = FieldDomain::Euclidean;
    f.n = n;
    f.point_eval = [](const VectorXd& x) { return std::exp(-x.squaredNorm()); };
    f.meta.decay_exponent = kInf;
    f.meta.radial_profile = [](double r) { return std::exp(-r * r); };
    f.meta.closed_kplane = [](int k, double dist) {
        return std::pow(kPi, 0.5 * k) * std::exp(-dist * dist);
    };
    f.meta.sup_on_plane = [](const AffinePlane& tau) {
        return std::exp(-tau.offset.squaredNorm());
    };
    f.meta.label = "gaussian";
    return f;
}

inline ScalarField ball_indicator_field(int n, double radius) {
    detail::require(radius > 0.0, "radius > 0", "ball indicator");
    ScalarField f;
    f.domain = FieldDomain::Euclidean;
    f.n = n;
    f.point_eval = [radius](const VectorXd& x) {
        return x.norm() <= radius ? 1.0 : 0.0;
    };
    f.meta.support_radius = radius;
    f.meta.radial_profile = [radius](double r) { return r <= radius ? 1.0 : 0.0; };
    f.meta.closed_kplane = [radius](int k, double dist) {
        const double h = radius * radius - dist * dist;
        return h > 0.0 ? ball_volume(k) * std::pow(h, 0.5 * k) : 0.0;
    };
    f.meta.sup_on_plane = [radius](const AffinePlane& tau) {
        return tau.distance() < radius ? 1.0 : 0.0;
    };
    f.meta.label = "ball";
    return f;
}

/// The extremizer family (1 + |A x + b|^2)^{-(k+1)/2}. With the identity map
/// the k-plane transform has the closed form (sigma_k / 2)(1+|tau|^2)^{-1/2}.
inline ScalarField make_extremizer(int n, int k,
                                   std::optional<MatrixXd> a = std::nullopt,
                                   std::optional<VectorXd> b = std::nullopt) {
    detail::require(k > 0 && k < n, "0 < k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const bool identity = !a && !b;
    MatrixXd m = a ? *a : MatrixXd::Identity(n, n);
    VectorXd t = b ? *b : VectorXd::Zero(n);
    {
        Eigen::JacobiSVD<MatrixXd> svd(m);
        const double smin = svd.singularValues().minCoeff();
        detail::require(smin > 1e-12, "matrix invertible", "extremizer map");
    }
    ScalarField f;
    f.domain = FieldDomain::Euclidean;
    f.n = n;
    const double expo = -0.5 * (k + 1);
    f.point_eval = [m, t, expo](const VectorXd& x) {
        return std::pow(1.0 + (m * x + t).squaredNorm(), expo);
    };
    f.meta.decay_exponent = k + 1.0;
    f.meta.label = identity ? "extremizer" : "extremizer-affine";
    if (identity) {
        f.meta.radial_profile = [expo](double r) { return std::pow(1.0 + r * r, expo); };
        const double half_sigma_k = 0.5 * sphere_area(k);
        f.meta.closed_kplane = [half_sigma_k](int kk, double dist) {
            (void)kk;
            return half_sigma_k / std::sqrt(1.0 + dist * dist);
        };
        f.meta.sup_on_plane = [expo](const AffinePlane& tau) {
            return std::pow(1.0 + tau.offset.squaredNorm(), expo);
        };
    }
    return f;
}

/// f0 on the affine Grassmannian of j-planes: (1+|zeta|^2)^{-(k+1)/2}.
inline ScalarField extremizer_plane_field(int n, int j, int k) {
    detail::require(j >= 0 && j < k && k < n, "0 <= j < k < n", "extremizer plane field");
    ScalarField f;
    f.domain = FieldDomain::AffineGrassmannian;
    f.n = n;
    f.j = j;
    const double expo = -0.5 * (k + 1);
    f.plane_eval = [expo](const AffinePlane& z) {
        return std::pow(1.0 + z.offset.squaredNorm(), expo);
    };
    f.meta.decay_exponent = k + 1.0;
    f.meta.label = "f0";
    return f;
}

inline ScalarField gaussian_plane_field(int n, int j) {
    ScalarField f;
    f.domain = FieldDomain::AffineGrassmannian;
    f.n = n;
    f.j = j;
    f.plane_eval = [](const AffinePlane& z) { return std::exp(-z.offset.squaredNorm()); };
    f.meta.decay_exponent = kInf;
    f.meta.label = "plane-gaussian";
    return f;
}

/// Positive smooth field on the sphere: exp of a random linear functional sum.
inline ScalarField random_smooth_sphere_field(int n, uint64_t seed, int terms = 4,
                                              double amplitude = 0.6) {
    ScalarField f;
    f.domain = FieldDomain::Sphere;
    f.n = n;
    RandomStream s(seed, "smooth-sphere-field");
    auto sub = s.at(0);
    std::vector<std::pair<double, VectorXd>> comps;
    for (int i = 0; i < terms; ++i) {
        const double a = amplitude * sub.normal();
        comps.emplace_back(a, uniform_direction(n, sub));
    }
    f.point_eval = [comps](const VectorXd& theta) {
        double e = 0.0;
        for (const auto& [a, v] : comps) e += a * v.dot(theta);
        return std::exp(e);
    };
    f.meta.label = "smooth(" + std::to_string(seed) + ")";
    return f;
}

/// Positive smooth radial field with exact power decay, for inequality panels.
inline ScalarField random_smooth_radial_field(int n, uint64_t seed, double decay) {
    detail::require(decay > 0.0, "decay > 0", "random radial field");
    ScalarField f;
    f.domain = FieldDomain::Euclidean;
    f.n = n;
    RandomStream s(seed, "smooth-radial-field");
    auto sub = s.at(0);
    const double freq = 0.5 + 1.5 * sub.uniform();
    const double phase = 2.0 * kPi * sub.uniform();
    const double amp = 0.4 * sub.uniform();
    auto profile = [decay, freq, phase, amp](double r) {
        const double base = std::pow(1.0 + r * r, -0.5 * decay);
        return base * (1.0 + amp * std::cos(freq * r + phase) / (1.0 + r));
    };
    f.point_eval = [profile](const VectorXd& x) { return profile(x.norm()); };
    f.meta.radial_profile = profile;
    f.meta.decay_exponent = decay;
    f.meta.label = "radial(" + std::to_string(seed) + ")";
    return f;
}

// ---------------------------------------------------------------------------
// Ellipsoids and star sets
// ---------------------------------------------------------------------------

/// The body {x : x^T A x <= 1} with A symmetric positive-definite.
struct Ellipsoid {
    MatrixXd a;

    explicit Ellipsoid(MatrixXd m) : a(std::move(m)) {
        detail::require(a.rows() == a.cols(), "matrix square", "ellipsoid");
        detail::require((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-10,
                        "matrix symmetric", "ellipsoid");
        Eigen::LLT<MatrixXd> llt(a);
        detail::require(llt.info() == Eigen::Success,
                        "matrix positive-definite (eigenvalues > 0)", "ellipsoid");
    }

    int dim() const { return static_cast<int>(a.rows()); }

    double radial(const VectorXd& theta) const {
        return 1.0 / std::sqrt(theta.dot(a * theta));
    }
};

/// Volume of the central section: the cut of an ellipsoid by a subspace is an
/// ellipsoid with matrix Q^T A Q in frame coordinates.
inline double ellipsoid_section_volume(const Ellipsoid& e, const Frame& f) {
    const int k = f.rank();
    detail::require(k >= 1 && k <= e.dim(), "1 <= rank <= n", "ellipsoid section");
    const MatrixXd g = f.columns().transpose() * e.a * f.columns();
    return ball_volume(k) / std::sqrt(g.determinant());
}

/// Volume of an affine section: minimize the quadratic form over the plane,
/// then scale the central-section shape accordingly.
inline double ellipsoid_affine_section_volume(const Ellipsoid& e, const AffinePlane& tau) {
    const int k = tau.dim();
    detail::require(k >= 1, "rank >= 1", "ellipsoid affine section");
    const MatrixXd q = tau.direction.columns();
    const MatrixXd g = q.transpose() * e.a * q;
    const VectorXd au = e.a * tau.offset;
    const VectorXd cross = q.transpose() * au;
    const double cmin = tau.offset.dot(au) - cross.dot(g.ldlt().solve(cross));
    const double h = 1.0 - cmin;
    if (h <= 0.0) return 0.0;
    return ball_volume(k) * std::pow(h, 0.5 * k) / std::sqrt(g.determinant());
}

/// A star set given by its radial function on the sphere.
struct StarSet {
    int n = 0;
    std::string kind;
    std::function<double(const VectorXd&)> radial;
    /// rho vanishes like |theta_n|^{pole_vanish} near the equator (0 if not).
    double pole_vanish = 0.0;
    /// A valid upper bound for rho, used by compact-support proposals.
    double radial_bound = 0.0;

    double rho(const VectorXd& theta) const { return radial(theta); }
};

inline StarSet make_ball_star(int n, double r) {
    detail::require(r > 0.0, "radius > 0", "ball star set");
    StarSet L;
    L.n = n;
    L.kind = "ball(" + std::to_string(r) + ")";
    L.radial = [r](const VectorXd&) { return r; };
    L.radial_bound = r;
    return L;
}

inline StarSet make_ellipsoid_star(const Ellipsoid& e) {
    StarSet L;
    L.n = e.dim();
    L.kind = "ellipsoid";
    const Ellipsoid copy = e;
    L.radial = [copy](const VectorXd& theta) { return copy.radial(theta); };
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(e.a);
    L.radial_bound = 1.0 / std::sqrt(es.eigenvalues().minCoeff());
    return L;
}

/// rho(theta) = |theta_n|^gamma: vanishes on the equator, which tames the
/// singular pole weights of the weighted star equalities.
inline StarSet make_equatorial_bump(int n, double gamma) {
    detail::require(gamma > 0.0, "gamma > 0", "equatorial bump");
    StarSet L;
    L.n = n;
    L.kind = "bump(" + std::to_string(gamma) + ")";
    L.radial = [n, gamma](const VectorXd& theta) {
        return std::pow(std::abs(theta[n - 1]), gamma);
    };
    L.pole_vanish = gamma;
    L.radial_bound = 1.0;
    return L;
}

/// rho(theta) = exp(sum a_i <theta, v_i>): positive and smooth by
/// construction, no clipping.
inline StarSet make_random_smooth_star(int n, uint64_t seed, int terms = 4,
                                       double amplitude = 0.5) {
    StarSet L;
    L.n = n;
    L.kind = "smooth(" + std::to_string(seed) + ")";
    RandomStream s(seed, "smooth-star");
    auto sub = s.at(0);
    std::vector<std::pair<double, VectorXd>> comps;
    double bound_exp = 0.0;
    for (int i = 0; i < terms; ++i) {
        const double a = amplitude * sub.normal();
        bound_exp += std::abs(a);
        comps.emplace_back(a, uniform_direction(n, sub));
    }
    L.radial = [comps](const VectorXd& theta) {
        double e = 0.0;
        for (const auto& [a, v] : comps) e += a * v.dot(theta);
        return std::exp(e);
    };
    L.radial_bound = std::exp(bound_exp);
    return L;
}

/// Indicator field of a star set (membership by radial comparison).
inline ScalarField star_indicator_field(const StarSet& L) {
    ScalarField f;
    f.domain = FieldDomain::Euclidean;
    f.n = L.n;
    const StarSet copy = L;
    f.point_eval = [copy](const VectorXd& x) {
        const double r = x.norm();
        if (r == 0.0) return 1.0;
        return r <= copy.radial(x / r) ? 1.0 : 0.0;
    };
    f.meta.support_radius = L.radial_bound;
    f.meta.label = "chi[" + L.kind + "]";
    return f;
}

/// Scaled copy lambda L (radial scaled by lambda).
inline StarSet scale_star(const StarSet& L, double lambda) {
    detail::require(lambda > 0.0, "lambda > 0", "scale_star");
    StarSet out = L;
    const auto base = L.radial;
    out.radial = [base, lambda](const VectorXd& theta) { return lambda * base(theta); };
    out.radial_bound = L.radial_bound * lambda;
    out.kind = L.kind + "*" + std::to_string(lambda);
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form transform oracles
// ---------------------------------------------------------------------------

/// Exact value of the k-plane transform for fields carrying a closed form.
inline double oracle_kplane(const ScalarField& f, int k, const AffinePlane& tau) {
    detail::require(static_cast<bool>(f.meta.closed_kplane),
                    "field carries a closed-form k-plane transform",
                    "field " + f.meta.label);
    return f.meta.closed_kplane(k, tau.distance());
}

/// Exact (j,k)-transform of f0: (sigma_k / sigma_j)(1+|tau|^2)^{-(j+1)/2}.
inline double oracle_jk_extremizer(int n, int j, int k, const AffinePlane& tau) {
    detail::require(j >= 0 && j < k && k < n, "0 <= j < k < n", "oracle_jk_extremizer");
    const double lambda = sphere_area(k) / sphere_area(j);
    return lambda * std::pow(1.0 + tau.offset.squaredNorm(), -0.5 * (j + 1));
}

} // namespace kplane
