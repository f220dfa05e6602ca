#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <vector>

#include "kplane/geometry.hpp"
#include "kplane/quadrature.hpp"
#include "stat_helpers.hpp"

using namespace kplane;
using testutil::ks_one_sample;
using testutil::ks_one_sample_critical;
using testutil::ks_two_sample;
using testutil::ks_two_sample_critical;
using testutil::mean_stderr;

TEST_CASE("haar frames are orthonormal and reproducible") {
    RandomStream s(11, "haar");
    const int cases[][2] = {{3, 1}, {4, 2}, {5, 3}, {6, 6}};
    for (auto [n, k] : cases)
        for (int i = 0; i < 100; ++i) {
            auto sub = s.at(i);
            const Frame f = haar_subspace(n, k, sub);
            CHECK(f.gram_error() <= 1e-10);
        }
    // Same substream index gives the same frame.
    auto a = s.at(7);
    auto b = s.at(7);
    CHECK(projector_distance(haar_subspace(4, 2, a), haar_subspace(4, 2, b)) < 1e-15);
}

TEST_CASE("full-rank haar spans everything") {
    RandomStream s(3, "full");
    auto sub = s.at(0);
    const Frame f = haar_subspace(3, 3, sub);
    CHECK((f.projector() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("haar line in R^3: |<column, e3>| matches the uniform-sphere law") {
    RandomStream s(17, "line");
    RandomStream so(18, "oracle");
    const int N = 100000;
    std::vector<double> line, oracle;
    line.reserve(N);
    oracle.reserve(N);
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const Frame f = haar_subspace(3, 1, sub);
        line.push_back(std::abs(f.columns()(2, 0)));
        auto osub = so.at(i);
        oracle.push_back(std::abs(uniform_direction(3, osub)[2]));
    }
    const double d = ks_two_sample(line, oracle);
    CHECK(d < ks_two_sample_critical(N, N, 0.01));
}

TEST_CASE("haar invariance under a fixed rotation") {
    RandomStream s(23, "rot");
    auto qsub = s.at(999999);
    const Frame q = haar_subspace(4, 4, qsub); // a fixed rotation of R^4
    const int N = 100000;
    std::vector<double> plain, rotated;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const Frame f = haar_subspace(4, 2, sub);
        const VectorXd e1 = VectorXd::Unit(4, 0);
        plain.push_back(f.project(e1).norm());
        const Frame g(q.columns() * f.columns());
        rotated.push_back(g.project(e1).norm());
    }
    CHECK(ks_two_sample(plain, rotated) < ks_two_sample_critical(N, N, 0.01));
}

TEST_CASE("affine plane invariants and distance") {
    RandomStream s(29, "plane");
    for (int i = 0; i < 200; ++i) {
        auto sub = s.at(i);
        const auto ws = sample_affine_plane(4, 2, 5.0, sub);
        CHECK(ws.importance_weight > 0.0);
        CHECK(std::isfinite(ws.importance_weight));
        CHECK(ws.plane.orthogonality_error() <= 1e-10);
        CHECK(ws.plane.direction.gram_error() <= 1e-10);
    }
    // n=2, k=1, direction e1, point (0,3): distance 3.
    MatrixXd dir(2, 1);
    dir << 1, 0;
    VectorXd p(2);
    p << 0, 3;
    const AffinePlane tau(Frame(dir), p);
    CHECK(tau.distance() == Catch::Approx(3.0).margin(1e-14));
    // Point-set oracle: descent over local coordinates recovers the distance.
    auto sub = s.at(1000);
    const auto ws = sample_affine_plane(5, 2, 6.0, sub);
    VectorXd sloc = VectorXd::Constant(2, 0.7);
    for (int it = 0; it < 500; ++it) {
        const VectorXd x = ws.plane.point(sloc);
        const VectorXd grad = ws.plane.direction.columns().transpose() * x;
        sloc -= 0.5 * grad;
    }
    CHECK(ws.plane.point(sloc).norm() == Catch::Approx(ws.plane.distance()).margin(1e-6));
}

TEST_CASE("importance-weighted plane integrals are unbiased") {
    // g(tau) = pi^{1/2} e^{-|tau|^2} is the line integral of the Gaussian, so
    // the weighted mean over A_{3,1} should match the full Gaussian integral.
    const double gauss_1d = integrate_real_line([](double s) { return std::exp(-s * s); }, 96);
    const double expect = gauss_1d * gauss_1d * gauss_1d; // Fubini oracle
    RandomStream s(31, "unbiased");
    const int N = 60000;
    std::vector<double> vals;
    vals.reserve(N);
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const auto ws = sample_affine_plane(3, 1, 4.0, sub);
        const double d2 = ws.plane.offset.squaredNorm();
        vals.push_back(std::sqrt(kPi) * std::exp(-d2) * ws.importance_weight);
    }
    const auto [mean, se] = mean_stderr(vals);
    CHECK(std::abs(mean - expect) < 3.0 * se);
    CHECK(expect == Catch::Approx(std::pow(kPi, 1.5)).epsilon(1e-10));

    // Two more integrands with known integrals.
    std::vector<double> v2, v3;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i + N);
        const auto ws = sample_affine_plane(4, 2, 5.0, sub);
        const double d2 = ws.plane.offset.squaredNorm();
        // integral of e^{-|u|^2} over R^2 = pi
        v2.push_back(std::exp(-d2) * ws.importance_weight);
        // integral of |u|^2 e^{-|u|^2} over R^2 = pi
        v3.push_back(d2 * std::exp(-d2) * ws.importance_weight);
    }
    const auto m2 = mean_stderr(v2);
    const auto m3 = mean_stderr(v3);
    CHECK(std::abs(m2.mean - kPi) < 3.0 * m2.stderr_);
    CHECK(std::abs(m3.mean - kPi) < 3.0 * m3.stderr_);
}

TEST_CASE("extremizer-matched proposal absorbs the canonical integrand") {
    // alpha = n+1 matches the (1+|u|^2)^{-(n+1)/2} decay exactly, so the
    // weighted integrand is constant: the estimator has zero variance.
    const int n = 3, k = 1;
    RandomStream s(37, "var");
    std::vector<double> vals;
    for (int i = 0; i < 5000; ++i) {
        auto sub = s.at(i);
        const auto ws = sample_affine_plane(n, k, n + 1.0, sub);
        const double d2 = ws.plane.offset.squaredNorm();
        vals.push_back(std::pow(1.0 + d2, -0.5 * (n + 1)) * ws.importance_weight);
    }
    const auto a = mean_stderr(vals);
    const double expect = sphere_area(n) / sphere_area(k);
    CHECK(a.mean == Catch::Approx(expect).epsilon(1e-10));
    CHECK(a.stderr_ < 1e-10 * expect);
}

TEST_CASE("stderr shrinks like 1/sqrt(2) under budget doubling") {
    // Gaussian integrand against the power-law proposal is genuinely noisy.
    const int n = 3, k = 1;
    RandomStream s(38, "shrink");
    auto run = [&](int count, int off) {
        std::vector<double> vals;
        vals.reserve(count);
        for (int i = 0; i < count; ++i) {
            auto sub = s.at(i + off);
            const auto ws = sample_affine_plane(n, k, n + 1.0, sub);
            const double d2 = ws.plane.offset.squaredNorm();
            vals.push_back(std::exp(-d2) * ws.importance_weight);
        }
        return mean_stderr(vals);
    };
    const auto a = run(20000, 0);
    const auto b = run(40000, 100000);
    const double expect = kPi; // integral of e^{-|u|^2} over R^2
    CHECK(std::abs(a.mean - expect) < 4.0 * a.stderr_);
    CHECK(std::abs(b.mean - expect) < 4.0 * b.stderr_);
    const double shrink = a.stderr_ / b.stderr_;
    CHECK(shrink > std::sqrt(2.0) * 0.8);
    CHECK(shrink < std::sqrt(2.0) * 1.2);
}

TEST_CASE("lift and unlift") {
    RandomStream s(41, "lift");
    // Through the origin: contains e_{n+1}, geodesic distance 0.
    MatrixXd dir(3, 1);
    dir << 1, 0, 0;
    const AffinePlane origin_plane(Frame(dir), VectorXd::Zero(3));
    const Frame lifted = lift(origin_plane);
    const VectorXd pole = VectorXd::Unit(4, 3);
    CHECK((lifted.project(pole) - pole).norm() < 1e-12);
    CHECK(geodesic_distance(lifted, pole) == Catch::Approx(0.0).margin(1e-7));

    // tan(geodesic distance) = plane distance, and unlift(lift) is identity,
    // for 1000 random planes.
    for (int i = 0; i < 1000; ++i) {
        auto sub = s.at(i);
        const int n = 3 + static_cast<int>(i % 2);
        const int k = 1 + static_cast<int>(i % 2);
        const auto ws = sample_affine_plane(n, k, n + 1.0, sub);
        const Frame l = lift(ws.plane);
        const VectorXd pl = VectorXd::Unit(n + 1, n);
        const double theta = geodesic_distance(l, pl);
        CHECK(std::tan(theta) == Catch::Approx(ws.plane.distance()).margin(1e-10));
        const AffinePlane back = unlift(l);
        CHECK(projector_distance(back.direction, ws.plane.direction) < 1e-10);
        CHECK((back.offset - ws.plane.offset).norm() < 1e-10);
    }
}

TEST_CASE("unlift canonical cases") {
    // span(e1, e3) in R^3 (pole = e3): the line span(e1) through the origin.
    MatrixXd cols(3, 2);
    cols << 1, 0, 0, 0, 0, 1;
    const AffinePlane tau = unlift(Frame(cols));
    CHECK(tau.dim() == 1);
    CHECK(tau.distance() == Catch::Approx(0.0).margin(1e-14));
    MatrixXd e1(2, 1);
    e1 << 1, 0;
    CHECK(projector_distance(tau.direction, Frame(e1)) < 1e-14);

    // A span inside the coordinate hyperplane is the exceptional set.
    MatrixXd bad(3, 2);
    bad << 1, 0, 0, 1, 0, 0;
    CHECK_THROWS_AS(unlift(Frame(bad)), numeric_error);

    // Round trip the other way: lift(unlift) preserves the projector.
    MatrixXd cols2(3, 2);
    cols2 << 1, 0, 0, 1.0 / std::sqrt(2.0), 0, 1.0 / std::sqrt(2.0);
    const Frame f2(cols2);
    CHECK(projector_distance(lift(unlift(f2)), f2) < 1e-12);
}

TEST_CASE("geodesic distance special values") {
    MatrixXd cols(3, 1);
    cols << 1, 0, 0;
    const Frame f(cols);
    CHECK(geodesic_distance(f, VectorXd::Unit(3, 0)) == Catch::Approx(0.0).margin(1e-8));
    CHECK(geodesic_distance(f, VectorXd::Unit(3, 2)) == Catch::Approx(kPi / 2).margin(1e-12));
    VectorXd diag(3);
    diag << 1.0 / std::sqrt(2.0), 0, 1.0 / std::sqrt(2.0);
    CHECK(geodesic_distance(f, diag) == Catch::Approx(kPi / 4).margin(1e-12));
}

TEST_CASE("apply_affine") {
    RandomStream s(43, "affine");
    auto sub = s.at(0);
    const auto ws = sample_affine_plane(3, 1, 4.0, sub);

    const AffinePlane same = apply_affine(MatrixXd::Identity(3, 3), VectorXd::Zero(3), ws.plane);
    CHECK(projector_distance(same.direction, ws.plane.direction) < 1e-12);
    CHECK((same.offset - ws.plane.offset).norm() < 1e-12);

    // Pure translation: distance equals min |x| over the translated plane.
    VectorXd t(3);
    t << 0.3, -1.2, 0.8;
    const AffinePlane shifted = apply_affine(MatrixXd::Identity(3, 3), t, ws.plane);
    CHECK(shifted.orthogonality_error() < 1e-10);
    VectorXd sloc = VectorXd::Zero(1);
    for (int it = 0; it < 800; ++it) {
        const VectorXd x = shifted.point(sloc);
        sloc -= 0.5 * (shifted.direction.columns().transpose() * x);
    }
    CHECK(shifted.distance() == Catch::Approx(shifted.point(sloc).norm()).margin(1e-8));

    // Rotation: distance preserved.
    auto qsub = s.at(1);
    const Frame q = haar_subspace(3, 3, qsub);
    const AffinePlane rot = apply_affine(q.columns(), VectorXd::Zero(3), ws.plane);
    CHECK(rot.distance() == Catch::Approx(ws.plane.distance()).margin(1e-10));

    MatrixXd singular = MatrixXd::Zero(3, 3);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(apply_affine(singular, VectorXd::Zero(3), ws.plane), domain_violation);
}

TEST_CASE("subsphere sampling") {
    RandomStream s(47, "subsphere");
    // Rank 1: +/- the column with equal probability.
    MatrixXd col(3, 1);
    col << 0, 0, 1;
    const Frame line(col);
    int plus = 0;
    const int N = 40000;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const VectorXd v = sample_subsphere(line, sub);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        plus += (v[2] > 0);
    }
    CHECK(std::abs(plus / static_cast<double>(N) - 0.5) < 0.01);

    // Lies in the span, unit norm.
    auto sub = s.at(12345);
    const Frame f = haar_subspace(5, 3, sub);
    for (int i = 0; i < 100; ++i) {
        auto sub2 = s.at(100000 + i);
        const VectorXd v = sample_subsphere(f, sub2);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        CHECK((f.project(v) - v).norm() < 1e-10);
    }

    // Rank 2 in R^3: angle uniform on [0, 2 pi).
    auto fsub = s.at(999);
    const Frame plane = haar_subspace(3, 2, fsub);
    std::vector<double> angles;
    for (int i = 0; i < 50000; ++i) {
        auto sub2 = s.at(200000 + i);
        const VectorXd v = sample_subsphere(plane, sub2);
        const double a = plane.columns().col(0).dot(v);
        const double b = plane.columns().col(1).dot(v);
        angles.push_back(std::atan2(b, a) + kPi);
    }
    const double d = ks_one_sample(angles, [](double a) { return a / (2.0 * kPi); });
    CHECK(d < ks_one_sample_critical(50000, 0.01));
}

TEST_CASE("subplane sampling") {
    RandomStream s(53, "subplane");
    auto tsub = s.at(0);
    const auto tau = sample_affine_plane(4, 2, 5.0, tsub).plane;

    // Pythagoras: |zeta|^2 = |tau|^2 + |w|^2.
    for (int i = 0; i < 200; ++i) {
        auto sub = s.at(i + 1);
        const auto zs = sample_subplane(tau, 1, 3.0, sub);
        const double w2 = (zs.plane.offset - tau.offset).squaredNorm();
        CHECK(zs.plane.offset.squaredNorm() ==
              Catch::Approx(tau.offset.squaredNorm() + w2).margin(1e-10));
        CHECK(zs.plane.orthogonality_error() < 1e-10);
    }

    // Gaussian reduction: weighted mean of e^{-|zeta|^2} over j-planes of tau
    // equals pi^{(k-j)/2} e^{-|tau|^2}.
    const double expect = std::sqrt(kPi) * std::exp(-tau.offset.squaredNorm());
    std::vector<double> vals;
    const int N = 40000;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(10000 + i);
        const auto zs = sample_subplane(tau, 1, 3.0, sub);
        vals.push_back(std::exp(-zs.plane.offset.squaredNorm()) * zs.importance_weight);
    }
    const auto [mean, se] = mean_stderr(vals);
    CHECK(std::abs(mean - expect) < 3.0 * se);

    // j = 0 yields weighted points whose mean estimates the plain plane
    // integral of the Gaussian.
    std::vector<double> pts;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(200000 + i);
        const auto zs = sample_subplane(tau, 0, 4.0, sub);
        CHECK(zs.plane.dim() == 0);
        pts.push_back(std::exp(-zs.plane.offset.squaredNorm()) * zs.importance_weight);
    }
    const auto m0 = mean_stderr(pts);
    CHECK(std::abs(m0.mean - kPi * std::exp(-tau.offset.squaredNorm())) < 3.0 * m0.stderr_);
}

TEST_CASE("tilted subspace sampler reduces to Haar at zero exponents") {
    RandomStream s(59, "tilted");
    const int n = 4, k = 2, N = 60000;
    const VectorXd pole = VectorXd::Unit(n, n - 1);
    std::vector<double> cos2;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const auto ts = sample_subspace_tilted(n, k, pole, 0.0, 0.0, 0.0, sub);
        CHECK(ts.weight == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(ts.frame.gram_error() < 1e-10);
        cos2.push_back(ts.cos2);
        CHECK(ts.cos2 == Catch::Approx(ts.frame.project(pole).squaredNorm()).margin(1e-10));
    }
    // cos^2 follows Beta(k/2, (n-k)/2) for Haar subspaces.
    const double d = ks_one_sample(
        cos2, [&](double x) { return boost::math::ibeta(0.5 * k, 0.5 * (n - k), x); });
    CHECK(d < ks_one_sample_critical(N, 0.01));

    // And its smooth functionals agree with the Gram-Schmidt Haar sampler.
    std::vector<double> a, b;
    for (int i = 0; i < N; ++i) {
        auto s1 = s.at(100000 + i);
        auto s2 = s.at(200000 + i);
        a.push_back(sample_subspace_tilted(n, k, pole, 0.0, 0.0, 0.0, s1)
                        .frame.project(VectorXd::Unit(n, 0))
                        .norm());
        b.push_back(haar_subspace(n, k, s2).project(VectorXd::Unit(n, 0)).norm());
    }
    CHECK(ks_two_sample(a, b) < ks_two_sample_critical(N, N, 0.01));
}

TEST_CASE("tilted subspace sampler integrates singular pole weights") {
    // E[(cos d)^b (sin d)^a] over Haar has a closed Beta-moment form.
    RandomStream s(61, "tiltw");
    const int n = 3, k = 2, N = 60000;
    const VectorXd pole = VectorXd::Unit(n, n - 1);
    const double a_exp = -0.5, b_exp = -1.5; // both singular
    std::vector<double> vals;
    for (int i = 0; i < N; ++i) {
        auto sub = s.at(i);
        const auto ts = sample_subspace_tilted(n, k, pole, a_exp, b_exp, 0.0, sub);
        vals.push_back(ts.weight);
    }
    const auto [mean, se] = mean_stderr(vals);
    const double expect =
        std::exp(log_gamma(0.5 * (k + b_exp)) + log_gamma(0.5 * (n - k + a_exp))
                 - log_gamma(0.5 * (n + a_exp + b_exp))
                 - (log_gamma(0.5 * k) + log_gamma(0.5 * (n - k)) - log_gamma(0.5 * n)));
    CHECK(se < 1e-12); // pure power weights are absorbed exactly
    CHECK(mean == Catch::Approx(expect).epsilon(1e-10));

    auto sub = s.at(0);
    CHECK_THROWS_WITH(sample_subspace_tilted(3, 2, pole, 0.0, -2.5, 0.0, sub),
                      Catch::Matchers::ContainsSubstring("cos exponent"));
}

TEST_CASE("pole-power sphere sampler matches the closed moment") {
    // integral of |theta_n|^e d* theta = G(n/2) G((e+1)/2) / (sqrt(pi) G((n+e)/2))
    auto moment = [](int n, double ee) {
        return std::exp(log_gamma(0.5 * n) + log_gamma(0.5 * (ee + 1.0)) - 0.5 * std::log(kPi)
                        - log_gamma(0.5 * (n + ee)));
    };

    RandomStream s(67, "spole");
    const double e = -0.5;
    const int N = 50000;
    {
        // n = 3: the marginal is flat, so the substitution absorbs the weight
        // exactly and the estimator is deterministic.
        std::vector<double> vals, vals2;
        for (int i = 0; i < N; ++i) {
            auto sub = s.at(i);
            const auto ss = sample_sphere_pole_power(3, e, sub);
            CHECK(std::abs(ss.theta.norm() - 1.0) < 1e-12);
            vals.push_back(ss.weight);
            vals2.push_back(ss.weight * ss.theta[2] * ss.theta[2]);
        }
        const auto m1 = mean_stderr(vals);
        CHECK(m1.mean == Catch::Approx(moment(3, e)).epsilon(1e-12));
        CHECK(m1.stderr_ < 1e-12);
        const auto m2 = mean_stderr(vals2);
        CHECK(std::abs(m2.mean - moment(3, e + 2.0)) < 3.0 * m2.stderr_);
    }
    {
        // n = 4: genuinely stochastic.
        std::vector<double> vals, vals2;
        for (int i = 0; i < N; ++i) {
            auto sub = s.at(100000 + i);
            const auto ss = sample_sphere_pole_power(4, e, sub);
            vals.push_back(ss.weight);
            vals2.push_back(ss.weight * ss.theta[3] * ss.theta[3]);
        }
        const auto m1 = mean_stderr(vals);
        CHECK(std::abs(m1.mean - moment(4, e)) < 3.0 * m1.stderr_);
        const auto m2 = mean_stderr(vals2);
        CHECK(std::abs(m2.mean - moment(4, e + 2.0)) < 3.0 * m2.stderr_);
    }
}
