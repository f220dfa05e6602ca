#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kplane/constants.hpp"
#include "kplane/quadrature.hpp"

using namespace kplane;

TEST_CASE("log_gamma reference values") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(log_gamma(2.0) == 0.0);
    CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(kPi)) < 1e-15);

    // Gamma(10) = 9!, oracle by integer multiplication.
    long long f = 1;
    for (int i = 2; i <= 9; ++i) f *= i;
    CHECK(f == 362880);
    CHECK(std::abs(log_gamma(10.0) - std::log(static_cast<double>(f))) < 1e-13);

    // Integers up to 170 against a compensated sum of logs.
    double acc = 0.0, comp = 0.0;
    for (int m = 2; m <= 170; ++m) {
        const double term = std::log(static_cast<double>(m - 1));
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        CHECK(std::abs(log_gamma(m) - acc) <= 1e-13 * std::max(1.0, std::abs(acc)));
    }

    // Large arguments against the Stirling series (truncation error ~ 1/x^7).
    for (double x : {1e4, 1e5, 1e6, 1e7}) {
        const double stirling = (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * kPi)
                              + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x)
                              + 1.0 / (1260.0 * std::pow(x, 5.0));
        CHECK(std::abs(log_gamma(x) - stirling) <= 1e-13 * std::abs(stirling));
    }

    CHECK_THROWS_AS(log_gamma(0.0), domain_violation);
    CHECK_THROWS_AS(log_gamma(-3.0), domain_violation);
}

TEST_CASE("sphere areas and ball volumes") {
    CHECK(std::abs(sphere_area(0) - 2.0) < 1e-14);
    CHECK(std::abs(sphere_area(1) - 2.0 * kPi) < 1e-14);
    CHECK(std::abs(sphere_area(2) - 4.0 * kPi) < 1e-13);
    CHECK(std::abs(ball_volume(0) - 1.0) < 1e-15);
    CHECK(std::abs(ball_volume(1) - 2.0) < 1e-14);
    CHECK(std::abs(ball_volume(2) - kPi) < 1e-14);
    CHECK(std::abs(ball_volume(3) - 4.0 * kPi / 3.0) < 1e-13);
    // b_m = sigma_{m-1}/m
    for (int m = 1; m <= 30; ++m)
        CHECK(ball_volume(m) == Catch::Approx(sphere_area(m - 1) / m).epsilon(1e-13));
}

TEST_CASE("omega examples") {
    CHECK(std::abs(omega_kpmu(5, 2, 1.0, 0.0) - 1.0) < 1e-12);
    CHECK(std::abs(omega_kpmu(2, 1, 2.0, 1.0) - std::sqrt(kPi)) < 1e-12);
    CHECK(std::abs(big_omega_k(2, 1) - std::cbrt(kPi / 2.0)) < 1e-12);
    CHECK(big_omega_jk(3, 0, 1) == Catch::Approx(big_omega_k(3, 1)).epsilon(1e-13));
}

TEST_CASE("p=1, mu=0 collapses to 1 for all 1<=k<n<=20") {
    for (int n = 2; n <= 20; ++n)
        for (int k = 1; k < n; ++k)
            CHECK(std::abs(omega_kpmu(n, k, 1.0, 0.0) - 1.0) < 1e-12);
}

TEST_CASE("j=0 coincidences") {
    const double ps[] = {1.0, 1.5, 2.0, 4.0};
    for (int n = 2; n <= 10; ++n)
        for (int k = 1; k < n; ++k) {
            for (double p : ps) {
                const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
                const double mu = k - n * ip + 0.25; // strictly in-domain
                const double a = omega_jkpmu(n, 0, k, p, mu);
                const double b = omega_kpmu(n, k, p, mu);
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, b));
            }
            if (n <= 20) CHECK(big_omega_jk(n, 0, k) ==
                               Catch::Approx(big_omega_k(n, k)).epsilon(1e-12));
        }
}

TEST_CASE("sharp constants are positive and finite in-domain") {
    const double ps[] = {1.0, 2.0, 3.0, kInf};
    for (int n = 2; n <= 8; ++n)
        for (int k = 1; k < n; ++k)
            for (int j = 0; j < k; ++j)
                for (double p : ps) {
                    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
                    const double ipp = 1.0 - ip;
                    const double mu = k - n * ip - j * ipp + 0.5;
                    const double v = omega_jkpmu(n, j, k, p, mu);
                    CHECK(v > 0.0);
                    CHECK(std::isfinite(v));
                }
}

TEST_CASE("asymptotic limit formula and examples") {
    CHECK(std::abs(asymptotic_limit(0, 1, 1.0) - 1.0) < 1e-14);
    CHECK(asymptotic_limit(0, 1, 2.0) ==
          Catch::Approx(std::pow(2.0 * kPi, 0.25) * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(asymptotic_limit(0, 1, 2.0) == Catch::Approx(2.2390).epsilon(1e-4));
    CHECK(asymptotic_limit(1, 3, 2.0) ==
          Catch::Approx(std::sqrt(2.0 * kPi) * 2.0).epsilon(1e-13));
    CHECK(asymptotic_limit(1, 3, 2.0) == Catch::Approx(5.0133).epsilon(1e-4));
}

TEST_CASE("normalized omega approaches its large-n limit, independent of mu") {
    const double n = 1e6;
    const int jks[][2] = {{0, 1}, {0, 2}, {1, 3}};
    for (auto [j, k] : jks)
        for (double p : {1.0, 1.5, 2.0, 4.0})
            for (double mu : {0.25, 1.5}) {
                const double ipp = 1.0 - 1.0 / p;
                const double scaled = omega_jkpmu(n, j, k, p, mu)
                                    * std::pow(n, 0.5 * (k - j) * ipp);
                CHECK(std::abs(scaled / asymptotic_limit(j, k, p) - 1.0) < 1e-3);
            }
}

TEST_CASE("domain violations name the constraint") {
    CHECK_THROWS_WITH(omega_kpmu(2, 3, 1.0, 0.0), Catch::Matchers::ContainsSubstring("k < n"));
    CHECK_THROWS_WITH(omega_kpmu(5, 2, 2.0, -1.0),
                      Catch::Matchers::ContainsSubstring("mu > k - n/p"));
    CHECK_THROWS_WITH(omega_jkpmu(5, 1, 2, 2.0, -2.0),
                      Catch::Matchers::ContainsSubstring("mu > k - n/p - j/p'"));
    CHECK_THROWS_WITH(funk_tilde_c1(3, 2, -1.5), Catch::Matchers::ContainsSubstring("mu > k - n"));
    CHECK_THROWS_AS(omega_kpmu(5, 2, 0.5, 0.0), domain_violation);
    CHECK_THROWS_AS(asymptotic_limit(0, 1, kInf), numeric_error);
}

TEST_CASE("funk weighted constants: specializations agree") {
    // j = 1 formula equals the general one.
    for (int n : {3, 4, 6})
        for (int k = 2; k < n; ++k)
            for (double p : {1.0, 2.0, 3.0}) {
                const double ip = 1.0 / p, ipp = 1.0 - ip;
                const double mu = k - n * ip - ipp + 0.75;
                CHECK(funk_weighted_c(n, 1, k, p, mu) ==
                      Catch::Approx(funk_weighted_c1(n, k, p, mu)).epsilon(1e-13));
            }
    // p = 1 reduces to the tilde constant.
    for (int n : {3, 4, 5})
        for (int k = 1; k < n; ++k)
            for (double mu : {0.0, 0.5, -0.4}) {
                if (!(mu > k - n)) continue;
                CHECK(funk_weighted_c1(n, k, 1.0, mu) ==
                      Catch::Approx(funk_tilde_c1(n, k, mu)).epsilon(1e-13));
            }
    // Descent from the affine constant: c(n,j,k,p,mu) =
    // omega_{j-1,k-1,p,mu}(n-1) * (sigma_{j-1}/sigma_{k-1})^{1/p'}.
    for (double p : {1.0, 2.0, 4.0}) {
        const int n = 5, j = 2, k = 3;
        const double ip = 1.0 / p, ipp = 1.0 - ip;
        const double mu = k - n * ip - j * ipp + 0.6;
        const double lhs = funk_weighted_c(n, j, k, p, mu);
        const double rhs = omega_jkpmu(n - 1, j - 1, k - 1, p, mu)
                         * std::pow(sphere_area(j - 1) / sphere_area(k - 1), ipp);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("section-power constant closes for the unit ball") {
    // Two log-gamma routes to the same ball-case identity:
    // pi^{(n-k)/2} G(k(n+1)/2+1) / G(n(k+1)/2+1) == b_{n(k+1)} / b_{k(n+1)}.
    for (int n = 2; n <= 8; ++n)
        for (int k = 1; k <= n; ++k) {
            const double lhs = std::exp(0.5 * (n - k) * std::log(kPi)
                                        + log_gamma(0.5 * k * (n + 1) + 1.0)
                                        - log_gamma(0.5 * n * (k + 1) + 1.0));
            const double rhs = std::exp(detail::log_ball_volume(static_cast<double>(n) * (k + 1))
                                        - detail::log_ball_volume(static_cast<double>(k) * (n + 1)));
            CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("schneider constant reduces to the section-power constant at m=n") {
    for (int n = 2; n <= 8; ++n)
        for (int k = 1; k <= n; ++k)
            CHECK(schneider_constant(n, k, n) ==
                  Catch::Approx(gardner_constant(n, k)).epsilon(1e-12));
}

TEST_CASE("tagged dispatch") {
    ConstantKind kind{ConstantTag::OmegaKPMu, {{"n", 5}, {"k", 2}, {"p", 1}, {"mu", 0}}};
    CHECK(std::abs(sharp_constant(kind) - 1.0) < 1e-12);
    ConstantKind bo{ConstantTag::BigOmegaK, {{"n", 2}, {"k", 1}}};
    CHECK(sharp_constant(bo) == Catch::Approx(std::cbrt(kPi / 2.0)).epsilon(1e-12));
    ConstantKind missing{ConstantTag::BigOmegaK, {{"n", 2}}};
    CHECK_THROWS_AS(sharp_constant(missing), domain_violation);
}

TEST_CASE("gauss-legendre sanity") {
    // Exact for polynomials of degree < 2*order.
    const double v = integrate_interval([](double x) { return x * x * x * x; }, -1.0, 1.0, 8);
    CHECK(v == Catch::Approx(0.4).epsilon(1e-14));
    const double g = integrate_real_line([](double s) { return std::exp(-s * s); }, 64);
    CHECK(g == Catch::Approx(std::sqrt(kPi)).epsilon(1e-12));
    const double h = integrate_half_line([](double r) { return 1.0 / ((1.0 + r * r)); }, 64);
    CHECK(h == Catch::Approx(kPi / 2.0).epsilon(1e-12));
}
