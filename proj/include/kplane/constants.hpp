#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "kplane/errors.hpp"

namespace kplane {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ln Gamma(x) for x > 0. Relative error <= 1e-13 on [1e-3, 1e7].
inline double log_gamma(double x) {
    detail::require(x > 0.0, "x > 0", "log_gamma argument " + std::to_string(x));
    return std::lgamma(x);
}

namespace detail {

// Exponent conventions for p in [1, inf]: 1/p is 0 at p = inf, and
// 1/p' = 1 - 1/p is 0 at p = 1. Handled by explicit case, never by
// floating division through infinity.
inline double inv_p(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }
inline double inv_pprime(double p) { return 1.0 - inv_p(p); }

inline void require_p(double p) {
    require(p >= 1.0, "1 <= p <= inf", "p = " + std::to_string(p));
}

inline double log_sphere_area(double m) {
    // sigma_m = 2 pi^{(m+1)/2} / Gamma((m+1)/2), the area of S^m.
    return std::log(2.0) + 0.5 * (m + 1.0) * std::log(kPi) - log_gamma(0.5 * (m + 1.0));
}

inline double log_ball_volume(double m) {
    // b_m = pi^{m/2} / Gamma(m/2 + 1)
    return 0.5 * m * std::log(kPi) - log_gamma(0.5 * m + 1.0);
}

inline double exp_checked(double logv, const char* what) {
    if (logv > 709.0)
        throw numeric_error(std::string(what) + ": log-domain result exceeds representable range");
    return std::exp(logv);
}

} // namespace detail

/// Area of the unit sphere S^m.
inline double sphere_area(int m) {
    detail::require(m >= 0, "m >= 0", "sphere_area");
    return std::exp(detail::log_sphere_area(m));
}

/// Volume of the unit ball B_m (b_0 = 1).
inline double ball_volume(int m) {
    detail::require(m >= 0, "m >= 0", "ball_volume");
    return std::exp(detail::log_ball_volume(m));
}

/// Norm of the k-plane transform between weighted L^p spaces,
/// omega_{k,p,mu}(n) = pi^{k/2p'} (G(n/2)/G((n-k)/2))^{1/p}
///                     G((mu+n/p-k)/2) / G((mu+n/p)/2).
inline double omega_kpmu(double n, int k, double p, double mu) {
    detail::require_p(p);
    detail::require(k > 0 && k < n, "0 < k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const double ip = detail::inv_p(p);
    const double ipp = detail::inv_pprime(p);
    detail::require(mu > k - n * ip, "mu > k - n/p",
                    "mu = " + std::to_string(mu) + ", k - n/p = " + std::to_string(k - n * ip));
    const double logv = 0.5 * k * ipp * std::log(kPi)
                      + ip * (log_gamma(0.5 * n) - log_gamma(0.5 * (n - k)))
                      + log_gamma(0.5 * (mu + n * ip - k))
                      - log_gamma(0.5 * (mu + n * ip));
    return detail::exp_checked(logv, "omega_kpmu");
}

/// Norm of the (j,k)-transform between weighted L^p spaces; j = 0 reduces
/// to omega_kpmu with identical parameters.
inline double omega_jkpmu(double n, int j, int k, double p, double mu) {
    detail::require_p(p);
    detail::require(j >= 0 && j < k && k < n, "0 <= j < k < n",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k) +
                    ", n = " + std::to_string(n));
    const double ip = detail::inv_p(p);
    const double ipp = detail::inv_pprime(p);
    detail::require(mu > k - n * ip - j * ipp, "mu > k - n/p - j/p'",
                    "mu = " + std::to_string(mu) +
                    ", bound = " + std::to_string(k - n * ip - j * ipp));
    const double logv = 0.5 * (k - j) * ipp * std::log(kPi)
                      + ip * (log_gamma(0.5 * (n - j)) - log_gamma(0.5 * (n - k)))
                      + log_gamma(0.5 * (mu + n * ip - k + j * ipp))
                      - log_gamma(0.5 * (mu + n * ip - j * ip));
    return detail::exp_checked(logv, "omega_jkpmu");
}

/// Sharp constant in the L^p -> L^q bound for R_k at p=(n+1)/(k+1), q=n+1:
/// Omega_k(n) = (2^{k-n} sigma_k^n / sigma_n^k)^{1/(n+1)}.
inline double big_omega_k(int n, int k) {
    detail::require(k > 0 && k < n, "0 < k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const double logv = ((k - n) * std::log(2.0)
                       + n * detail::log_sphere_area(k)
                       - k * detail::log_sphere_area(n)) / (n + 1.0);
    return std::exp(logv);
}

/// Conjectured sharp constant for R_{j,k} at p=(n+1)/(k+1), q=(n+1)/(j+1):
/// Omega_{j,k}(n) = (sigma_k^{n-j} sigma_j^{k-n} sigma_n^{j-k})^{1/(n+1)}.
/// j = 0 coincides with big_omega_k.
inline double big_omega_jk(int n, int j, int k) {
    detail::require(j >= 0 && j < k && k < n, "0 <= j < k < n",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k) +
                    ", n = " + std::to_string(n));
    const double logv = ((n - j) * detail::log_sphere_area(k)
                       + (k - n) * detail::log_sphere_area(j)
                       + (j - k) * detail::log_sphere_area(n)) / (n + 1.0);
    return std::exp(logv);
}

/// Constant of the sharp section-power inequality for bounded Borel sets
/// (also the constant of the restricted-sup transform inequality):
/// b_k^{n+1} b_{n(k+1)} / (b_n^{k+1} b_{k(n+1)}).
inline double gardner_constant(int n, int k) {
    detail::require(k > 0 && k <= n, "0 < k <= n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const double logv = (n + 1.0) * detail::log_ball_volume(k)
                      + detail::log_ball_volume(static_cast<double>(n) * (k + 1))
                      - (k + 1.0) * detail::log_ball_volume(n)
                      - detail::log_ball_volume(static_cast<double>(k) * (n + 1));
    return detail::exp_checked(logv, "gardner_constant");
}

inline double dpp_constant(int n, int k) {
    detail::require(k > 0 && k < n, "0 < k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    return gardner_constant(n, k);
}

/// Constant of the convex-body section-power inequality with exponent m+1:
/// b_k^{m+1} b_{n+km} / (b_n^{(n+km)/n} b_{k+km}).
inline double schneider_constant(int n, int k, int m) {
    detail::require(k > 0 && k <= n, "0 < k <= n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    detail::require(m >= 1 && m <= n, "1 <= m <= n", "m = " + std::to_string(m));
    const double km = static_cast<double>(k) * m;
    const double logv = (m + 1.0) * detail::log_ball_volume(k)
                      + detail::log_ball_volume(n + km)
                      - ((n + km) / n) * detail::log_ball_volume(n)
                      - detail::log_ball_volume(k + km);
    return detail::exp_checked(logv, "schneider_constant");
}

/// Sharp constant of the weighted inequality between Funk transforms over
/// j- and k-dimensional subspaces of R^n (1 <= j < k < n).
inline double funk_weighted_c(int n, int j, int k, double p, double mu) {
    detail::require_p(p);
    detail::require(j >= 1 && j < k && k < n, "1 <= j < k < n",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k) +
                    ", n = " + std::to_string(n));
    const double ip = detail::inv_p(p);
    const double ipp = detail::inv_pprime(p);
    detail::require(mu > k - n * ip - j * ipp, "mu > k - n/p - j/p'",
                    "mu = " + std::to_string(mu) +
                    ", bound = " + std::to_string(k - n * ip - j * ipp));
    const double logv = ipp * (log_gamma(0.5 * k) - log_gamma(0.5 * j))
                      + ip * (log_gamma(0.5 * (n - j)) - log_gamma(0.5 * (n - k)))
                      + log_gamma(0.5 * (mu + n * ip - k + j * ipp))
                      - log_gamma(0.5 * (mu + n * ip - j * ip));
    return detail::exp_checked(logv, "funk_weighted_c");
}

/// j = 1 specialization: sharp constant of the weighted inequality between
/// the Funk transform on G_{n,k} and a weighted norm on the sphere.
inline double funk_weighted_c1(int n, int k, double p, double mu) {
    detail::require_p(p);
    detail::require(k >= 1 && k < n, "1 <= k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    const double ip = detail::inv_p(p);
    const double ipp = detail::inv_pprime(p);
    detail::require(mu > k - n * ip - ipp, "mu > k - n/p - 1/p'",
                    "mu = " + std::to_string(mu) +
                    ", bound = " + std::to_string(k - n * ip - ipp));
    const double logv = ipp * (log_gamma(0.5 * k) - log_gamma(0.5))
                      + ip * (log_gamma(0.5 * (n - 1)) - log_gamma(0.5 * (n - k)))
                      + log_gamma(0.5 * (mu + n * ip - k + ipp))
                      - log_gamma(0.5 * (mu + n * ip - ip));
    return detail::exp_checked(logv, "funk_weighted_c1");
}

/// Constant of the p=1 exact spherical equality:
/// c1~ = G((n-1)/2)/G((n-k)/2) * G((mu+n-k)/2)/G((mu+n-1)/2), mu > k-n.
inline double funk_tilde_c1(int n, int k, double mu) {
    detail::require(k >= 1 && k < n, "1 <= k < n",
                    "k = " + std::to_string(k) + ", n = " + std::to_string(n));
    detail::require(mu > k - n, "mu > k - n",
                    "mu = " + std::to_string(mu) + ", k - n = " + std::to_string(k - n));
    const double logv = log_gamma(0.5 * (n - 1)) - log_gamma(0.5 * (n - k))
                      + log_gamma(0.5 * (mu + n - k)) - log_gamma(0.5 * (mu + n - 1));
    return detail::exp_checked(logv, "funk_tilde_c1");
}

/// Large-n limit of n^{(k-j)/2p'} omega_{j,k,p,mu}(n):
/// (2 pi)^{(k-j)/2p'} p^{(k-j)/2}. Independent of mu.
inline double asymptotic_limit(int j, int k, double p) {
    detail::require_p(p);
    detail::require(j >= 0 && j < k, "0 <= j < k",
                    "j = " + std::to_string(j) + ", k = " + std::to_string(k));
    const double ipp = detail::inv_pprime(p);
    if (std::isinf(p))
        throw numeric_error("asymptotic_limit: log-domain result exceeds representable range");
    const double logv = 0.5 * (k - j) * ipp * std::log(2.0 * kPi)
                      + 0.5 * (k - j) * std::log(p);
    return std::exp(logv);
}

// ---------------------------------------------------------------------------
// Tagged dispatch used by the CLI and the experiment-file schema.
// ---------------------------------------------------------------------------

enum class ConstantTag {
    OmegaKPMu,
    OmegaJKPMu,
    BigOmegaK,
    BigOmegaJK,
    GardnerC,
    SchneiderC,
    DppC,
    FunkWeightedC,
    FunkWeightedC1,
    FunkTildeC1,
    AsymptoticLimit,
};

struct ConstantKind {
    ConstantTag tag;
    std::map<std::string, double> params; // named n, j, k, p, mu, m as required
};

namespace detail {
inline double kind_param(const ConstantKind& kind, const std::string& name) {
    const auto it = kind.params.find(name);
    require(it != kind.params.end(), "parameter '" + name + "' required");
    return it->second;
}
inline int kind_int(const ConstantKind& kind, const std::string& name) {
    const double v = kind_param(kind, name);
    require(v == static_cast<int>(v), "parameter '" + name + "' must be an integer",
            name + " = " + std::to_string(v));
    return static_cast<int>(v);
}
} // namespace detail

/// Closed-form evaluation of any tagged constant, computed in log domain.
inline double sharp_constant(const ConstantKind& kind) {
    using detail::kind_int;
    using detail::kind_param;
    switch (kind.tag) {
        case ConstantTag::OmegaKPMu:
            return omega_kpmu(kind_param(kind, "n"), kind_int(kind, "k"),
                              kind_param(kind, "p"), kind_param(kind, "mu"));
        case ConstantTag::OmegaJKPMu:
            return omega_jkpmu(kind_param(kind, "n"), kind_int(kind, "j"), kind_int(kind, "k"),
                               kind_param(kind, "p"), kind_param(kind, "mu"));
        case ConstantTag::BigOmegaK:
            return big_omega_k(kind_int(kind, "n"), kind_int(kind, "k"));
        case ConstantTag::BigOmegaJK:
            return big_omega_jk(kind_int(kind, "n"), kind_int(kind, "j"), kind_int(kind, "k"));
        case ConstantTag::GardnerC:
            return gardner_constant(kind_int(kind, "n"), kind_int(kind, "k"));
        case ConstantTag::SchneiderC:
            return schneider_constant(kind_int(kind, "n"), kind_int(kind, "k"),
                                      kind_int(kind, "m"));
        case ConstantTag::DppC:
            return dpp_constant(kind_int(kind, "n"), kind_int(kind, "k"));
        case ConstantTag::FunkWeightedC:
            return funk_weighted_c(kind_int(kind, "n"), kind_int(kind, "j"), kind_int(kind, "k"),
                                   kind_param(kind, "p"), kind_param(kind, "mu"));
        case ConstantTag::FunkWeightedC1:
            return funk_weighted_c1(kind_int(kind, "n"), kind_int(kind, "k"),
                                    kind_param(kind, "p"), kind_param(kind, "mu"));
        case ConstantTag::FunkTildeC1:
            return funk_tilde_c1(kind_int(kind, "n"), kind_int(kind, "k"),
                                 kind_param(kind, "mu"));
        case ConstantTag::AsymptoticLimit:
            return asymptotic_limit(kind_int(kind, "j"), kind_int(kind, "k"),
                                    kind_param(kind, "p"));
    }
    throw domain_violation("unknown constant tag");
}

} // namespace kplane
