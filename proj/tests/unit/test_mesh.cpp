#include "shrinkerlab/mesh.hpp"

#include "shrinkerlab/differential.hpp"
#include "shrinkerlab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace shrinkerlab;

TEST_CASE("sphere mesh is closed with Euler characteristic 2") {
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    const DiscreteHypersurface mesh = build_mesh(sphere, 3.0, 0.1);
    CHECK(mesh.validate().empty());
    CHECK(mesh.boundary_facets.empty());
    CHECK(mesh.euler_characteristic() == 2);
    CHECK(mesh.max_edge_length() <= 1.5 * 0.1);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        CHECK(mesh.vertex(v).norm() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("line mesh spans [-R, R] with two boundary vertices") {
    const auto line = GeneralizedCylinder::canonical(1, 0);
    const DiscreteHypersurface mesh = build_mesh(line, 5.0, 0.05);
    CHECK(mesh.validate().empty());
    CHECK(mesh.boundary_facets.size() == 2);
    const auto bmask = mesh.boundary_vertex_mask();
    int boundary_count = 0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (bmask[v]) {
            ++boundary_count;
            CHECK(mesh.vertex(v).norm() == doctest::Approx(5.0).epsilon(1e-12));
        }
    CHECK(boundary_count == 2);
    CHECK(mesh.max_edge_length() <= 1.5 * 0.05);
}

TEST_CASE("tube mesh is an annulus with boundary on |x| = R") {
    const auto cyl = GeneralizedCylinder::canonical(2, 1);
    const DiscreteHypersurface mesh = build_mesh(cyl, 6.0, 0.1);
    CHECK(mesh.validate().empty());
    CHECK(mesh.euler_characteristic() == 0);
    CHECK(!mesh.boundary_facets.empty());
    const auto bmask = mesh.boundary_vertex_mask();
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const double r = mesh.vertex(v).norm();
        if (bmask[v]) {
            CHECK(r >= 6.0 - 0.1 - 1e-12);
            CHECK(r <= 6.0 + 1e-12);
        }
    }
    CHECK(mesh.max_edge_length() <= 1.5 * 0.1);
}

TEST_CASE("disk mesh covers the ball with boundary ring") {
    const auto plane = GeneralizedCylinder::canonical(2, 0);
    const DiscreteHypersurface mesh = build_mesh(plane, 3.0, 0.1);
    CHECK(mesh.validate().empty());
    CHECK(mesh.euler_characteristic() == 1);
    CHECK(mesh.max_edge_length() <= 1.5 * 0.1);
    // total area approximates the disk
    double area = 0.0;
    for (int s = 0; s < mesh.n_simplices(); ++s) area += mesh.simplex_volume(s);
    CHECK(area == doctest::Approx(std::numbers::pi * 9.0).epsilon(2e-3));
}

TEST_CASE("circle mesh is closed and consistent") {
    const auto circle = GeneralizedCylinder::canonical(1, 1);
    const DiscreteHypersurface mesh = build_mesh(circle, 3.0, 0.05);
    CHECK(mesh.validate().empty());
    CHECK(mesh.boundary_facets.empty());
    double len = 0.0;
    for (int s = 0; s < mesh.n_simplices(); ++s) len += mesh.simplex_volume(s);
    CHECK(len == doctest::Approx(2.0 * std::numbers::pi * std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("build errors: dimension and radius preconditions") {
    CHECK_THROWS_WITH_AS(build_mesh(GeneralizedCylinder::canonical(3, 0), 5.0, 0.1),
                         doctest::Contains("unsupported-dimension"), Error);
    CHECK_THROWS_WITH_AS(build_mesh(GeneralizedCylinder::canonical(2, 2), 1.5, 0.1),
                         doctest::Contains("R-too-small"), Error);
}

TEST_CASE("quadrature weights sum to the simplex measure") {
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    DiscreteHypersurface mesh = build_mesh(sphere, 3.0, 0.3);
    std::vector<QuadraturePoint> q;
    for (auto rule : {QuadratureRule::Barycenter, QuadratureRule::ThreePoint}) {
        mesh.quad_rule = rule;
        for (int s = 0; s < std::min(10, mesh.n_simplices()); ++s) {
            mesh.quadrature(s, q);
            double w = 0.0;
            for (const auto& p : q) w += p.weight;
            CHECK(w == doctest::Approx(mesh.simplex_volume(s)).epsilon(1e-13));
        }
    }
}

TEST_CASE("flat polyline has zero estimated curvature") {
    const auto line = GeneralizedCylinder::canonical(1, 0);
    const DiscreteHypersurface mesh = build_mesh(line, 3.0, 0.1);
    const DifferentialField f = DifferentialField::estimate(mesh);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (f.valid[v]) CHECK(f.mean_curvature.col(v).norm() <= 1e-12);
}

TEST_CASE("circle curvature estimate converges at second order") {
    const auto circle = GeneralizedCylinder::canonical(1, 1);
    auto max_error = [&](double h) {
        const DiscreteHypersurface mesh = build_mesh(circle, 3.0, h);
        const DifferentialField est = DifferentialField::estimate(mesh);
        const DifferentialField ana = DifferentialField::from_analytic(mesh);
        double err = 0.0;
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (est.valid[v])
                err = std::max(err, (est.mean_curvature.col(v) -
                                     ana.mean_curvature.col(v)).norm());
        return err;
    };
    const double e1 = max_error(0.1);
    const double e2 = max_error(0.05);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("sphere curvature estimate: accuracy and second-order convergence") {
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    auto stats = [&](double h, double& max_err, double& mean_H) {
        const DiscreteHypersurface mesh = build_mesh(sphere, 3.0, h);
        const DifferentialField est = DifferentialField::estimate(mesh);
        const DifferentialField ana = DifferentialField::from_analytic(mesh);
        max_err = 0.0;
        mean_H = 0.0;
        int count = 0;
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            if (!est.valid[v]) continue;
            max_err = std::max(max_err, (est.mean_curvature.col(v) -
                                         ana.mean_curvature.col(v)).norm());
            mean_H += est.mean_curvature.col(v).norm();
            ++count;
        }
        mean_H /= count;
    };
    double e1, e2, m1, m2;
    stats(0.1, e1, m1);
    stats(0.05, e2, m2);
    // analytic |H| = n/r = 1; mean within 2 percent at h = 0.05
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("residual statistics: analytic and estimated paths") {
    // catalog meshes with analytic data are exact
    for (int kk : {0, 1}) {
        const auto shape = GeneralizedCylinder::canonical(1, kk);
        const DiscreteHypersurface mesh = build_mesh(shape, 4.0, 0.05);
        const ResidualStats stats = shrinker_residual(mesh);
        CHECK(stats.max <= 1e-12);
    }
    // scaled sphere (radius 2.1, not a shrinker): residual |n/r - r/2|
    const auto sphere = GeneralizedCylinder::canonical(2, 2);
    DiscreteHypersurface mesh = build_mesh(sphere, 3.0, 0.05);
    mesh.vertices *= 2.1 / 2.0;
    mesh.analytic_source.reset();
    const ResidualStats stats = shrinker_residual(mesh);
    const double expected = std::abs(2.0 / 2.1 - 2.1 / 2.0);
    CHECK(stats.max == doctest::Approx(expected).epsilon(0.02));

    // Richardson: estimated-path residual drops at second order on the sphere
    auto residual_at = [&](double h) {
        DiscreteHypersurface m = build_mesh(sphere, 3.0, h);
        m.analytic_source.reset();
        return shrinker_residual(m).max;
    };
    const double r1 = residual_at(0.1);
    const double r2 = residual_at(0.05);
    CHECK(r1 / r2 >= 3.0);
    CHECK(r1 / r2 <= 5.5);
}

TEST_CASE("degenerate-star guard fires on a broken mesh") {
    // two triangles sharing an edge, boundary flags stripped so the shared
    // vertices masquerade as interior
    DiscreteHypersurface mesh;
    mesh.n = 2;
    mesh.ambient = 3;
    mesh.vertices.resize(3, 4);
    mesh.vertices << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0;
    mesh.simplices.resize(3, 2);
    mesh.simplices.col(0) << 0, 1, 2;
    mesh.simplices.col(1) << 1, 3, 2;
    mesh.boundary_facets.clear(); // deliberately wrong
    CHECK_THROWS_WITH_AS(DifferentialField::estimate(mesh),
                         doctest::Contains("degenerate-star"), Error);
}

TEST_CASE("rotated meshes keep scalar invariants") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd rot = random_orthogonal(3, rng);
    const GeneralizedCylinder cyl(2, 1, rot);
    const DiscreteHypersurface mesh = build_mesh(cyl, 5.0, 0.2);
    CHECK(mesh.validate().empty());
    const ResidualStats stats = shrinker_residual(mesh);
    CHECK(stats.max <= 1e-12);
}
