#include "shrinkerlab/catalog.hpp"

#include "oracles.hpp"
#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shrinkerlab;

TEST_CASE("plane differential data vanishes") {
    const auto plane = GeneralizedCylinder::canonical(2, 0);
    Eigen::VectorXd p(3);
    p << 0.0, 1.3, -2.7;
    const DifferentialData dd = plane.differential_data(p);
    CHECK(dd.mean_curvature.norm() == 0.0);
    CHECK(dd.x_normal.norm() == 0.0);
    CHECK(dd.norm_A_sq == 0.0);
}

TEST_CASE("sphere and cylinder curvature values") {
    // sphere S^n_{sqrt 2n}: |H| = sqrt(n/2), |A|^2 = n/r^2 = 1/2
    for (int n : {1, 2, 3}) {
        const auto sphere = GeneralizedCylinder::canonical(n, n);
        std::mt19937_64 rng(7 + n);
        const Eigen::VectorXd p = sphere.sample_in_ball(std::sqrt(2.0 * n) + 1.0, rng);
        const DifferentialData dd = sphere.differential_data(p);
        CHECK(dd.mean_curvature.norm() == doctest::Approx(std::sqrt(0.5 * n)).epsilon(1e-12));
        CHECK(dd.norm_A_sq == doctest::Approx(0.5).epsilon(1e-12));
    }
    // k=1, n=2 cylinder: |x_perp| = sqrt(2), |H| = sqrt(2)/2, |A|^2 = 1/2
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    Eigen::VectorXd p(3);
    p << std::sqrt(2.0), 0.0, 1.7;
    const DifferentialData dd = cyl.differential_data(p);
    CHECK(dd.x_normal.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(dd.mean_curvature.norm() == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(dd.norm_A_sq == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("off-surface points are rejected") {
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    Eigen::VectorXd p(3);
    p << 2.0, 0.0, 0.0; // radius 2 != sqrt(2)
    CHECK_THROWS_WITH_AS(cyl.differential_data(p),
                         doctest::Contains("point-off-surface"), Error);
}

TEST_CASE("shrinker residual is zero on the whole catalog") {
    std::mt19937_64 rng(2024);
    for (int n = 1; n <= 4; ++n)
        for (int k = 0; k <= n; ++k) {
            const Eigen::MatrixXd rot = random_orthogonal(n + 1, rng);
            const GeneralizedCylinder cyl(n, k, rot);
            for (int i = 0; i < 50; ++i) {
                const Eigen::VectorXd p = cyl.sample_in_ball(8.0, rng);
                CHECK(cyl.shrinker_residual(p) <= 1e-12);
                const DifferentialData dd = cyl.differential_data(p);
                // Pythagorean split
                CHECK(std::abs(dd.x_tangent.squaredNorm() + dd.x_normal.squaredNorm() -
                               p.squaredNorm()) <= 1e-10 * std::max(1.0, p.squaredNorm()));
                // trace of A reproduces H
                Eigen::VectorXd trace =
                    dd.second_fundamental.trace() * dd.normal_basis.col(0);
                CHECK((trace - dd.mean_curvature).norm() <= 1e-10);
            }
        }
}

TEST_CASE("scalar invariants are rotation invariant") {
    std::mt19937_64 rng(5);
    const auto canon = GeneralizedCylinder::canonical(2, 1);
    const Eigen::MatrixXd rot = random_orthogonal(3, rng);
    const GeneralizedCylinder rotated(2, 1, rot);
    Eigen::VectorXd p(3);
    p << std::sqrt(2.0) * std::cos(0.3), std::sqrt(2.0) * std::sin(0.3), -0.9;
    const Eigen::VectorXd q = rot * p;
    const auto d1 = canon.differential_data(p);
    const auto d2 = rotated.differential_data(q);
    CHECK(d1.mean_curvature.norm() == doctest::Approx(d2.mean_curvature.norm()).epsilon(1e-12));
    CHECK(d1.x_normal.norm() == doctest::Approx(d2.x_normal.norm()).epsilon(1e-12));
    CHECK(d1.norm_A_sq == doctest::Approx(d2.norm_A_sq).epsilon(1e-12));
}

TEST_CASE("sign-independent Laplacian identity for |x|^2") {
    // Delta_S |x|^2 = 2n - 4|H|^2 and the drift form 2n - |x|^2
    std::mt19937_64 rng(99);
    for (int n : {1, 2, 3})
        for (int k = 0; k <= n; ++k) {
            const auto cyl = GeneralizedCylinder::canonical(n, k);
            const Eigen::VectorXd p = cyl.sample_in_ball(6.0, rng);
            const double lap = drift_laplacian_xsq(cyl, p);
            CHECK(lap == doctest::Approx(2.0 * n - p.squaredNorm()).epsilon(1e-11));
            // finite-difference oracle through the geodesic chart
            const double fd = testing::fd_drift_laplacian(
                cyl, p, [](const Eigen::VectorXd& x) { return x.squaredNorm(); }, 1e-4);
            CHECK(fd == doctest::Approx(lap).epsilon(1e-5));
        }
}

TEST_CASE("coordinate eigenfields: product path at 1e-10, FD oracle at 1e-5") {
    std::mt19937_64 rng(31);
    for (int n : {1, 2, 3})
        for (int k = 0; k <= n; ++k) {
            const Eigen::MatrixXd rot = random_orthogonal(n + 1, rng);
            const GeneralizedCylinder cyl(n, k, rot);
            for (int i = 0; i < 20; ++i) {
                const Eigen::VectorXd p = cyl.sample_in_ball(7.0, rng);
                const auto check = check_coordinate_fields_at(cyl, p);
                CHECK(check.sum_vi_sq_error <= 1e-10);
                CHECK(check.max_Lvi_error <= 1e-10);
            }
        }

    // FD oracle: scalar drift Laplacian of a(x) = <e_i, nu(x)> matches the
    // closed form -(k/r^2) a used inside the product path
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    Eigen::VectorXd p(3);
    p << std::sqrt(2.0) * std::cos(1.1), std::sqrt(2.0) * std::sin(1.1), 0.4;
    auto a_fun = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd xi = cyl.to_canonical(x);
        return xi(0) / xi.head(2).norm(); // <e_0, nu> in canonical coords
    };
    const double fd = testing::fd_drift_laplacian(cyl, p, a_fun, 1e-4);
    const double expected = -(1.0 / 2.0) * a_fun(p); // -(k/r^2) a
    CHECK(fd == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("higher-codimension cylinder via rotation padding") {
    std::mt19937_64 rng(64);
    const Eigen::MatrixXd rot = random_orthogonal(4, rng);
    const GeneralizedCylinder cyl(2, 1, rot); // n=2 in R^4, codim 2
    for (int i = 0; i < 30; ++i) {
        const Eigen::VectorXd p = cyl.sample_in_ball(6.0, rng);
        const auto check = check_coordinate_fields_at(cyl, p);
        CHECK(check.sum_vi_sq_error <= 1e-10); // sum |v_i|^2 = N - n = 2
        CHECK(check.max_Lvi_error <= 1e-10);
        CHECK(cyl.shrinker_residual(p) <= 1e-12);
    }
}

TEST_CASE("gaussian area closed forms") {
    const double pi = std::numbers::pi;
    // plane through the origin normalizes to one
    for (int n : {1, 2, 3}) {
        const auto plane = GeneralizedCylinder::canonical(n, 0);
        CHECK(plane.gaussian_area(14.0) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // circle S^1_{sqrt 2}: (4 pi)^{-1/2} 2 pi sqrt(2) e^{-1/2}
    const auto circle = GeneralizedCylinder::canonical(1, 1);
    const double f_circle = circle.gaussian_area(3.0);
    CHECK(f_circle == doctest::Approx(std::sqrt(2.0 * pi) * std::exp(-0.5)).epsilon(1e-12));
    CHECK(f_circle == doctest::Approx(1.52035).epsilon(1e-4));
    // sphere S^2_2: 4/e
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    CHECK(sphere.gaussian_area(3.0) == doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-12));
    // independent oracle: 1D radial quadrature for the cylinder k=1, n=2
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    const double R = 5.0;
    const double s_max = std::sqrt(R * R - 2.0);
    const double oracle =
        std::pow(4.0 * pi, -1.0) * (2.0 * pi * std::sqrt(2.0)) * std::exp(-0.5) *
        integrate([](double t) { return 2.0 * std::exp(-0.25 * t * t); }, 0.0, s_max,
                  1e-13);
    CHECK(cyl.gaussian_area(R) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("volume profiles match slice derivatives (coarea)") {
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    // V'(r) from the closed form equals the finite difference of V
    for (double r : {2.5, 3.0, 4.0}) {
        const double dr = 1e-6;
        const double fd =
            (cyl.ball_volume_profile(r + dr) - cyl.ball_volume_profile(r - dr)) /
            (2.0 * dr);
        CHECK(cyl.ball_volume_derivative(r) == doctest::Approx(fd).epsilon(1e-6));
    }
    // closed sphere: V jumps at r = sqrt(2n) and is flat after
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    CHECK(sphere.ball_volume_profile(1.9) == 0.0);
    CHECK(sphere.ball_volume_profile(2.1) ==
          doctest::Approx(16.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(!sphere.regular_radius(2.0));
    CHECK(sphere.regular_radius(2.5));
}

TEST_CASE("sampling stays on the shape and inside the ball") {
    std::mt19937_64 rng(123);
    const auto cyl = GeneralizedCylinder::canonical(3, 2);
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd p = cyl.sample_in_ball(5.0, rng);
        CHECK(cyl.distance(p) <= 1e-12);
        CHECK(p.norm() <= 5.0 + 1e-12);
    }
}
