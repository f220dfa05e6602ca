#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <optional>
#include <utility>

#include "kplane/constants.hpp"
#include "kplane/errors.hpp"
#include "kplane/rng.hpp"

namespace kplane {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kOrthoTol = 1e-10;
inline constexpr double kExceptionalTol = 1e-12;

// ---------------------------------------------------------------------------
// Frames and planes
// ---------------------------------------------------------------------------

/// A subspace carried by an orthonormal frame. Frames are non-unique; subspace
/// equality is always tested through projectors, never through columns.
class Frame {
public:
    Frame() = default;

    explicit Frame(MatrixXd cols) : cols_(std::move(cols)) {
        detail::require(cols_.cols() <= cols_.rows(), "rank <= ambient dimension");
        if (cols_.cols() > 0) {
            const double err = (cols_.transpose() * cols_ -
                                MatrixXd::Identity(cols_.cols(), cols_.cols()))
                                   .cwiseAbs()
                                   .maxCoeff();
            detail::require(err <= kOrthoTol, "frame columns orthonormal",
                            "gram defect " + std::to_string(err));
        }
    }

    int ambient() const { return static_cast<int>(cols_.rows()); }
    int rank() const { return static_cast<int>(cols_.cols()); }
    const MatrixXd& columns() const { return cols_; }

    MatrixXd projector() const { return cols_ * cols_.transpose(); }

    VectorXd project(const VectorXd& v) const {
        if (rank() == 0) return VectorXd::Zero(v.size());
        return cols_ * (cols_.transpose() * v);
    }

    double gram_error() const {
        if (rank() == 0) return 0.0;
        return (cols_.transpose() * cols_ - MatrixXd::Identity(rank(), rank()))
            .cwiseAbs()
            .maxCoeff();
    }

private:
    MatrixXd cols_; // ambient x rank, orthonormal columns
};

/// Max-norm distance between projectors; zero iff the spans agree.
inline double projector_distance(const Frame& a, const Frame& b) {
    return (a.projector() - b.projector()).cwiseAbs().maxCoeff();
}

/// An affine k-plane (xi, u): orthonormal direction frame plus an offset
/// orthogonal to it. Rank 0 encodes a point-plane (offset = the point).
struct AffinePlane {
    Frame direction;
    VectorXd offset;

    AffinePlane() = default;

    /// Builds the plane through `point` with the given direction; the offset
    /// is the projection of the point onto the orthogonal complement, which
    /// keeps the u-perp-xi invariant under every construction path.
    AffinePlane(Frame dir, const VectorXd& point)
        : direction(std::move(dir)), offset(point - direction.project(point)) {}

    int ambient() const { return static_cast<int>(offset.size()); }
    int dim() const { return direction.rank(); }

    /// Euclidean distance from the origin (= |u| since u is perp to xi).
    double distance() const { return offset.norm(); }

    /// A point of the plane with local coordinates s in the direction frame.
    VectorXd point(const VectorXd& s) const {
        if (direction.rank() == 0) return offset;
        return offset + direction.columns() * s;
    }

    double orthogonality_error() const {
        if (direction.rank() == 0) return 0.0;
        return (direction.columns().transpose() * offset).cwiseAbs().maxCoeff();
    }
};

struct WeightedSample {
    AffinePlane plane;
    double importance_weight = 0.0; // d tau density over proposal density
};

// ---------------------------------------------------------------------------
// Orthonormalization
// ---------------------------------------------------------------------------

/// Modified Gram-Schmidt with a re-orthogonalization pass and a deterministic
/// sign convention (first entry of magnitude > 1e-12 made positive), so the
/// output frame is a function of the input columns only.
inline std::optional<MatrixXd> try_orthonormalize(MatrixXd m, double rank_tol = 1e-8) {
    const int k = static_cast<int>(m.cols());
    for (int j = 0; j < k; ++j) {
        VectorXd v = m.col(j);
        const double scale = v.norm();
        if (scale < rank_tol) return std::nullopt;
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i) v -= m.col(i).dot(v) * m.col(i);
        const double norm = v.norm();
        if (norm < rank_tol * scale) return std::nullopt;
        v /= norm;
        for (int r = 0; r < v.size(); ++r) {
            if (std::abs(v[r]) > 1e-12) {
                if (v[r] < 0.0) v = -v;
                break;
            }
        }
        m.col(j) = v;
    }
    return m;
}

inline Frame orthonormalize(const MatrixXd& m) {
    auto q = try_orthonormalize(m);
    if (!q) throw numeric_error("orthonormalize: rank-deficient input");
    return Frame(std::move(*q));
}

/// Orthonormal basis of the orthogonal complement of span(frame) in R^n.
inline MatrixXd complement_basis(const Frame& f, int n) {
    const int k = f.rank();
    if (k == 0) return MatrixXd::Identity(n, n);
    Eigen::HouseholderQR<MatrixXd> qr(f.columns());
    MatrixXd q = qr.householderQ();
    return q.rightCols(n - k);
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

inline VectorXd gaussian_vector(int n, Substream& sub) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = sub.normal();
    return v;
}

/// Uniform unit vector in R^n.
inline VectorXd uniform_direction(int n, Substream& sub) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        VectorXd v = gaussian_vector(n, sub);
        const double norm = v.norm();
        if (norm > 1e-8) return v / norm;
    }
    throw numeric_error("uniform_direction: degenerate draws exhausted retries");
}

/// Haar-distributed k-subspace of R^n, realized by orthonormalizing k
/// standard Gaussian columns; deterministic up to the sign convention.
inline Frame haar_subspace(int n, int k, Substream& sub) {
    detail::require(k >= 1 && k <= n, "1 <= k <= n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    for (int attempt = 0; attempt < 64; ++attempt) {
        MatrixXd m(n, k);
        for (int j = 0; j < k; ++j) m.col(j) = gaussian_vector(n, sub);
        if (auto q = try_orthonormalize(std::move(m))) return Frame(std::move(*q));
    }
    throw numeric_error("haar_subspace: rank-deficient draws exhausted retries");
}

/// Uniform point of the unit sphere of span(frame).
inline VectorXd sample_subsphere(const Frame& f, Substream& sub) {
    detail::require(f.rank() >= 1, "rank >= 1", "sample_subsphere");
    const VectorXd z = uniform_direction(f.rank(), sub);
    return f.columns() * z;
}

// ---------------------------------------------------------------------------
// Radial proposals for offsets of affine planes
// ---------------------------------------------------------------------------

/// Proposal for the offset u in R^m. Two families:
///   power-law  density(r) ~ r^{m-1+tilt} (1+r^2)^{-alpha/2} on [0, inf)
///   ball       density(r) ~ r^{m-1+tilt} on [0, radius]
/// The tilt absorbs an r^{tilt} factor of the integrand at the origin; the
/// weight is 1/q(u), making weighted means unbiased d(u)-integrals.
class RadialProposal {
public:
    static RadialProposal power_law(int m, double alpha, double tilt = 0.0) {
        detail::require(m >= 1, "offset dimension >= 1");
        detail::require(m + tilt > 0.0, "m + tilt > 0 (proposal integrable at 0)",
                        "m = " + std::to_string(m) + ", tilt = " + std::to_string(tilt));
        detail::require(alpha > m + tilt, "alpha > m + tilt (proposal normalizable)",
                        "alpha = " + std::to_string(alpha) + ", m + tilt = " +
                        std::to_string(m + tilt));
        RadialProposal p;
        p.m_ = m;
        p.tilt_ = tilt;
        p.alpha_ = alpha;
        p.beta_a_ = 0.5 * (m + tilt);
        p.beta_b_ = 0.5 * (alpha - m - tilt);
        // log of sigma_{m-1} * Z_r with Z_r = B(a,b)/2
        p.log_norm_ = detail::log_sphere_area(m - 1) - std::log(2.0)
                    + log_gamma(p.beta_a_) + log_gamma(p.beta_b_)
                    - log_gamma(p.beta_a_ + p.beta_b_);
        return p;
    }

    static RadialProposal ball(int m, double radius, double tilt = 0.0) {
        detail::require(m >= 1, "offset dimension >= 1");
        detail::require(m + tilt > 0.0, "m + tilt > 0 (proposal integrable at 0)");
        detail::require(radius > 0.0, "radius > 0");
        RadialProposal p;
        p.m_ = m;
        p.tilt_ = tilt;
        p.radius_ = radius;
        p.log_norm_ = detail::log_sphere_area(m - 1) + (m + tilt) * std::log(radius)
                    - std::log(m + tilt);
        return p;
    }

    bool compact() const { return radius_ > 0.0; }

    double sample(Substream& sub) const {
        const double u = sub.uniform_open();
        if (compact()) return radius_ * std::pow(u, 1.0 / (m_ + tilt_));
        double y;
        if (beta_b_ == 1.0)
            y = std::pow(u, 1.0 / beta_a_);
        else if (beta_a_ == 1.0)
            y = 1.0 - std::pow(1.0 - u, 1.0 / beta_b_);
        else
            y = boost::math::ibeta_inv(beta_a_, beta_b_, u);
        y = std::min(y, 1.0 - 1e-16);
        return std::sqrt(y / (1.0 - y));
    }

    double log_weight(double r) const {
        double lw = log_norm_ - tilt_ * std::log(r);
        if (!compact()) lw += 0.5 * alpha_ * std::log1p(r * r);
        return lw;
    }

    double weight(double r) const { return std::exp(log_weight(r)); }

private:
    int m_ = 1;
    double tilt_ = 0.0;
    double alpha_ = 0.0;
    double beta_a_ = 0.0, beta_b_ = 0.0;
    double radius_ = 0.0;
    double log_norm_ = 0.0;
};

/// Haar direction plus an importance-weighted offset: averaging
/// g(plane) * weight over draws estimates the d(tau) integral of g.
inline WeightedSample sample_affine_plane_with(int n, int k, const RadialProposal& proposal,
                                               Substream& sub) {
    detail::require(k >= 1 && k < n, "1 <= k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const Frame xi = haar_subspace(n, k, sub);
    const MatrixXd comp = complement_basis(xi, n);
    const int m = n - k;
    const VectorXd omega = uniform_direction(m, sub);
    const double r = proposal.sample(sub);
    const VectorXd u = comp * (r * omega);
    return {AffinePlane(xi, u), proposal.weight(r)};
}

/// Default entry point with the power-law proposal of exponent alpha.
inline WeightedSample sample_affine_plane(int n, int k, double alpha, Substream& sub) {
    return sample_affine_plane_with(n, k, RadialProposal::power_law(n - k, alpha), sub);
}

/// A weighted j-plane (eta, u+w) inside the k-plane tau: eta is a Haar
/// j-subspace of span(tau), w lives in span(tau) minus eta with the given
/// radial proposal over m = k-j dimensions. Averaging f(zeta) * weight over
/// draws estimates the canonical measure integral over planes inside tau.
/// j = 0 degenerates to weighted points of tau.
inline WeightedSample sample_subplane_with(const AffinePlane& tau, int j,
                                           const RadialProposal& proposal, Substream& sub) {
    const int k = tau.dim();
    detail::require(j >= 0 && j < k, "0 <= j < k",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k));
    Frame eta_local; // j-subspace in the local coordinates of tau
    if (j >= 1) eta_local = haar_subspace(k, j, sub);
    const MatrixXd comp_local = complement_basis(eta_local, k); // k x (k-j)
    const VectorXd omega = uniform_direction(k - j, sub);
    const double r = proposal.sample(sub);
    const VectorXd w = tau.direction.columns() * (comp_local * (r * omega));
    Frame eta = (j >= 1) ? Frame(tau.direction.columns() * eta_local.columns()) : Frame();
    if (j == 0) {
        AffinePlane zeta;
        zeta.offset = tau.offset + w;
        return {std::move(zeta), proposal.weight(r)};
    }
    return {AffinePlane(std::move(eta), tau.offset + w), proposal.weight(r)};
}

inline WeightedSample sample_subplane(const AffinePlane& tau, int j, double alpha,
                                      Substream& sub) {
    return sample_subplane_with(tau, j, RadialProposal::power_law(tau.dim() - j, alpha), sub);
}

// ---------------------------------------------------------------------------
// Stereographic lift between affine planes in R^n and subspaces of R^{n+1}
// ---------------------------------------------------------------------------

/// Geodesic distance on the sphere between the pole and the subsphere cut by
/// span(frame): arccos of the norm of the projected pole. Range [0, pi/2].
inline double geodesic_distance(const Frame& f, const VectorXd& pole) {
    detail::require(f.rank() >= 1, "rank >= 1", "geodesic_distance");
    const double c = std::min(1.0, (f.columns().transpose() * pole).norm());
    return std::acos(c);
}

/// Lift of the k-plane (xi, u) in R^n to the (k+1)-subspace of R^{n+1}
/// spanned by the zero-padded direction and u0 = (u + e_{n+1}) / sqrt(1+|u|^2).
inline Frame lift(const AffinePlane& tau) {
    const int n = tau.ambient();
    const int k = tau.dim();
    MatrixXd cols = MatrixXd::Zero(n + 1, k + 1);
    if (k > 0) cols.topLeftCorner(n, k) = tau.direction.columns();
    const double s = 1.0 / std::sqrt(1.0 + tau.offset.squaredNorm());
    cols.col(k).head(n) = s * tau.offset;
    cols(n, k) = s;
    return Frame(std::move(cols));
}

/// Inverse of lift, defined away from subspaces contained in the hyperplane
/// orthogonal to e_{n+1} (the measure-zero exceptional set, detected by a
/// hard tolerance on the projected-pole norm).
inline AffinePlane unlift(const Frame& tau0) {
    const int rank = tau0.rank();
    detail::require(rank >= 1, "rank >= 1", "unlift");
    const int n = tau0.ambient() - 1;
    const int k = rank - 1;
    const VectorXd r = tau0.columns().row(n).transpose(); // components along e_{n+1}
    const double rn = r.norm();
    if (rn < kExceptionalTol)
        throw numeric_error("unlift: frame lies in the exceptional set (pole projection below "
                            "tolerance)");
    // Point of the plane: the unique z in span with last coordinate 1.
    const VectorXd z = tau0.columns() * (r / (rn * rn));
    const VectorXd point = z.head(n);

    Frame dir;
    if (k > 0) {
        // Kernel of r within the local coordinates = directions with zero
        // last coordinate.
        Eigen::HouseholderQR<MatrixXd> qr(MatrixXd(r / rn));
        MatrixXd kernel = MatrixXd(qr.householderQ()).rightCols(k);
        MatrixXd cols = (tau0.columns() * kernel).topRows(n);
        dir = orthonormalize(cols);
    }
    return AffinePlane(std::move(dir), point);
}

// ---------------------------------------------------------------------------
// Affine images of planes
// ---------------------------------------------------------------------------

/// Image of the plane under x -> A x + b, re-orthonormalized, with the offset
/// re-projected onto the new orthogonal complement.
inline AffinePlane apply_affine(const MatrixXd& a, const VectorXd& b, const AffinePlane& tau) {
    Eigen::JacobiSVD<MatrixXd> svd(a);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    detail::require(smin > 0.0 && smax / smin < 1e12, "matrix invertible (condition < 1e12)");
    Frame dir;
    if (tau.dim() > 0) dir = orthonormalize(a * tau.direction.columns());
    return AffinePlane(std::move(dir), a * tau.offset + b);
}

// ---------------------------------------------------------------------------
// Pole-conditioned (tilted) samplers for singular weights
// ---------------------------------------------------------------------------

/// Weighted Haar sample of G_{n,k} for integrals of the form
///   integral of (sin d)^sin_pow (cos d)^cos_pow Phi(tau0) d* tau0,
/// with d the geodesic distance to the pole. The squared projected-pole norm
/// x = cos^2 d of a Haar subspace follows Beta(k/2,(n-k)/2); the proposal
/// tilts that marginal to Beta((k+cos_pow+vanish)/2, (n-k+sin_pow)/2) so the
/// weight carries exactly x^{-vanish/2}:
///   mean of Phi(frame) * weight over draws estimates the weighted integral.
/// Pass vanish > 0 when Phi itself vanishes like (cos d)^vanish.
struct TiltedSubspaceSample {
    Frame frame;
    double weight = 0.0;
    double cos2 = 0.0; // squared cosine of the pole distance
};

inline TiltedSubspaceSample sample_subspace_tilted(int n, int k, const VectorXd& pole,
                                                   double sin_pow, double cos_pow,
                                                   double vanish, Substream& sub) {
    detail::require(k >= 1 && k < n, "1 <= k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const double a = 0.5 * (k + cos_pow + vanish);
    const double b = 0.5 * (n - k + sin_pow);
    detail::require(a > 0.0, "k + cos exponent + vanish order > 0",
                    "value = " + std::to_string(2.0 * a));
    detail::require(b > 0.0, "n - k + sin exponent > 0", "value = " + std::to_string(2.0 * b));

    double x;
    const double u = sub.uniform_open();
    if (b == 1.0)
        x = std::pow(u, 1.0 / a);
    else if (a == 1.0)
        x = 1.0 - std::pow(1.0 - u, 1.0 / b);
    else
        x = boost::math::ibeta_inv(a, b, u);
    x = std::min(std::max(x, 1e-300), 1.0 - 1e-16);

    // Conditional frame given cos^2 d = x: the distinguished direction w plus
    // a Haar (k-1)-subspace of the complement of {pole, phi'}.
    const MatrixXd pole_comp = complement_basis(Frame(MatrixXd(pole)), n); // n x (n-1)
    const VectorXd phi = pole_comp * uniform_direction(n - 1, sub);
    const VectorXd w = std::sqrt(x) * pole + std::sqrt(1.0 - x) * phi;
    MatrixXd cols(n, k);
    cols.col(0) = w;
    if (k >= 2) {
        MatrixXd pair(n, 2);
        pair.col(0) = pole;
        pair.col(1) = phi;
        const MatrixXd rest = complement_basis(Frame(orthonormalize(pair)), n); // n x (n-2)
        const Frame local = haar_subspace(n - 2, k - 1, sub);
        cols.rightCols(k - 1) = rest * local.columns();
    }

    const double log_w = log_gamma(a) + log_gamma(b) - log_gamma(a + b)
                       - (log_gamma(0.5 * k) + log_gamma(0.5 * (n - k)) - log_gamma(0.5 * n))
                       - 0.5 * vanish * std::log(x);
    TiltedSubspaceSample out;
    out.frame = orthonormalize(cols);
    out.weight = std::exp(log_w);
    out.cos2 = x;
    return out;
}

/// Weighted sample of the sphere S^{n-1} for integrals
///   integral of |theta_n|^pole_pow g(theta) d* theta,  pole_pow > -1,
/// via the substitution |theta_n| = t^{1/(1+pole_pow)} in the 1-D marginal:
/// mean of g(theta) * weight over draws estimates the weighted integral.
struct SphereSample {
    VectorXd theta;
    double weight = 0.0;
};

inline SphereSample sample_sphere_pole_power(int n, double pole_pow, Substream& sub) {
    detail::require(n >= 2, "n >= 2", "sample_sphere_pole_power");
    detail::require(pole_pow > -1.0, "pole exponent > -1",
                    "exponent = " + std::to_string(pole_pow));
    const double t = sub.uniform_open();
    const double s = std::pow(t, 1.0 / (1.0 + pole_pow));
    const double sign = sub.sign();
    VectorXd theta(n);
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    theta.head(n - 1) = c * uniform_direction(n - 1, sub);
    theta[n - 1] = sign * s;
    // marginal density of theta_n under the uniform sphere measure
    const double log_marginal = log_gamma(0.5 * n) - log_gamma(0.5 * (n - 1))
                              - 0.5 * std::log(kPi)
                              + 0.5 * (n - 3) * std::log(std::max(1.0 - s * s, 1e-300));
    SphereSample out;
    out.theta = std::move(theta);
    out.weight = 2.0 / (1.0 + pole_pow) * std::exp(log_marginal);
    return out;
}

} // namespace kplane
