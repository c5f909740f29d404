#include "shrinkerlab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shrinkerlab;

TEST_CASE("sphere areas and ball volumes") {
    const double pi = std::numbers::pi;
    CHECK(unit_sphere_area(0) == doctest::Approx(2.0));
    CHECK(unit_sphere_area(1) == doctest::Approx(2.0 * pi));
    CHECK(unit_sphere_area(2) == doctest::Approx(4.0 * pi));
    CHECK(unit_sphere_area(3) == doctest::Approx(2.0 * pi * pi));
    CHECK(ball_volume(1, 2.0) == doctest::Approx(4.0));
    CHECK(ball_volume(2, 3.0) == doctest::Approx(9.0 * pi));
    CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * pi / 3.0));
    CHECK(ball_volume(0, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("adaptive quadrature hits closed forms") {
    const double pi = std::numbers::pi;
    // full Gaussian integral
    const double g = integrate([](double t) { return std::exp(-0.25 * t * t); },
                               -40.0, 40.0, 1e-13);
    CHECK(g == doctest::Approx(2.0 * std::sqrt(pi)).epsilon(1e-12));
    // kinky integrand split at breakpoints
    const double v = integrate_with_breaks(
        [](double t) { return std::abs(t - 0.5); }, 0.0, 1.0, {0.5}, 1e-14);
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
    std::vector<double> x, w;
    for (int npts : {2, 3, 4, 5, 8}) {
        gauss_legendre(npts, x, w);
        double sum = 0.0, moment = 0.0;
        for (int i = 0; i < npts; ++i) {
            sum += w[i];
            moment += w[i] * std::pow(x[i], 2 * npts - 2);
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(moment == doctest::Approx(2.0 / (2.0 * npts - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("sphere quadrature integrates smooth functions") {
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> wts;
    for (int dim : {0, 1, 2}) {
        sphere_quadrature(dim, 48, pts, wts);
        double total = 0.0, coord_sq = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            total += wts[i];
            coord_sq += wts[i] * pts[i](0) * pts[i](0);
        }
        CHECK(total == doctest::Approx(unit_sphere_area(dim)).epsilon(1e-10));
        // int x_0^2 over S^dim = area / (dim+1)
        CHECK(coord_sq ==
              doctest::Approx(unit_sphere_area(dim) / (dim + 1)).epsilon(1e-9));
    }
}

TEST_CASE("random orthogonal matrices are orthogonal and deterministic") {
    std::mt19937_64 rng(42);
    const Eigen::MatrixXd q = random_orthogonal(5, rng);
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
          1e-13);
    std::mt19937_64 rng2(42);
    const Eigen::MatrixXd q2 = random_orthogonal(5, rng2);
    CHECK((q - q2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("deterministic parallel chunking covers the range once") {
    std::vector<int> hits(1000, 0);
    parallel_for_chunks(1000, [&](std::int64_t b, std::int64_t e, int) {
        for (std::int64_t i = b; i < e; ++i) hits[i] += 1;
    });
    for (int h : hits) CHECK(h == 1);
}
