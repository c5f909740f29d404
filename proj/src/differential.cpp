#include "shrinkerlab/differential.hpp"

#include "shrinkerlab/errors.hpp"

#include <cmath>
#include <vector>

namespace shrinkerlab {

DifferentialField DifferentialField::from_analytic(const DiscreteHypersurface& mesh) {
    require(mesh.analytic_source.has_value(), "missing-curvature",
            "mesh has no analytic source");
    const GeneralizedCylinder& shape = *mesh.analytic_source;
    const int V = mesh.n_vertices();
    DifferentialField f;
    f.normal.resize(mesh.ambient, V);
    f.mean_curvature.resize(mesh.ambient, V);
    f.norm_A_sq.resize(V);
    f.x_tangent.resize(mesh.ambient, V);
    f.x_normal.resize(mesh.ambient, V);
    f.valid.assign(V, 1);
    for (int v = 0; v < V; ++v) {
        const DifferentialData dd = shape.differential_data(mesh.vertex(v));
        f.normal.col(v) = dd.unit_normal();
        f.mean_curvature.col(v) = dd.mean_curvature;
        f.norm_A_sq(v) = dd.norm_A_sq;
        f.x_tangent.col(v) = dd.x_tangent;
        f.x_normal.col(v) = dd.x_normal;
    }
    return f;
}

namespace {

DifferentialField estimate_curve(const DiscreteHypersurface& mesh) {
    const int V = mesh.n_vertices();
    DifferentialField f;
    f.normal = Eigen::MatrixXd::Zero(2, V);
    f.mean_curvature = Eigen::MatrixXd::Zero(2, V);
    f.norm_A_sq = Eigen::VectorXd::Zero(V);
    f.x_tangent = Eigen::MatrixXd::Zero(2, V);
    f.x_normal = Eigen::MatrixXd::Zero(2, V);
    f.valid.assign(V, 0);

    // neighbors along the polyline, in simplex orientation (prev -> v -> next)
    std::vector<int> prev(V, -1), next(V, -1);
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        const int a = mesh.simplices(0, s), b = mesh.simplices(1, s);
        next[a] = b;
        prev[b] = a;
    }
    for (int v = 0; v < V; ++v) {
        if (prev[v] < 0 || next[v] < 0) continue; // boundary vertex
        const Eigen::Vector2d p = mesh.vertex(prev[v]);
        const Eigen::Vector2d q = mesh.vertex(v);
        const Eigen::Vector2d r = mesh.vertex(next[v]);
        const Eigen::Vector2d e0 = q - p, e1 = r - q;
        const double l0 = e0.norm(), l1 = e1.norm();
        require(l0 > 0.0 && l1 > 0.0, "degenerate-star", "zero-length edge");
        // turning angle over mean incident length: kappa = 2 theta / (l0 + l1)
        const double cross = e0.x() * e1.y() - e0.y() * e1.x();
        const double theta = std::atan2(cross, e0.dot(e1));
        const double kappa = 2.0 * theta / (l0 + l1);
        // unit normal: left normal of the averaged tangent
        const Eigen::Vector2d t = (e0 / l0 + e1 / l1).normalized();
        const Eigen::Vector2d nrm(-t.y(), t.x());
        f.normal.col(v) = nrm;
        // curvature vector bends toward the turn: H = kappa * n with the left
        // normal; for a CCW circle this points inward.
        f.mean_curvature.col(v) = kappa * nrm;
        f.norm_A_sq(v) = kappa * kappa;
        const double xn = q.dot(nrm);
        f.x_normal.col(v) = xn * nrm;
        f.x_tangent.col(v) = Eigen::Vector2d(q) - xn * nrm;
        f.valid[v] = 1;
    }
    return f;
}

DifferentialField estimate_surface(const DiscreteHypersurface& mesh) {
    const int V = mesh.n_vertices();
    DifferentialField f;
    f.normal = Eigen::MatrixXd::Zero(3, V);
    f.mean_curvature = Eigen::MatrixXd::Zero(3, V);
    f.norm_A_sq = Eigen::VectorXd::Zero(V);
    f.x_tangent = Eigen::MatrixXd::Zero(3, V);
    f.x_normal = Eigen::MatrixXd::Zero(3, V);
    f.valid.assign(V, 0);

    std::vector<std::vector<int>> star(V);
    for (int s = 0; s < mesh.n_simplices(); ++s)
        for (int j = 0; j < 3; ++j) star[mesh.simplices(j, s)].push_back(s);
    const auto bmask = mesh.boundary_vertex_mask();

    // area-weighted face normals per vertex
    Eigen::MatrixXd vnormal = Eigen::MatrixXd::Zero(3, V);
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        const Eigen::Vector3d a = mesh.vertex(mesh.simplices(0, s));
        const Eigen::Vector3d b = mesh.vertex(mesh.simplices(1, s));
        const Eigen::Vector3d c = mesh.vertex(mesh.simplices(2, s));
        const Eigen::Vector3d fn = 0.5 * (b - a).cross(c - a); // area-weighted
        for (int j = 0; j < 3; ++j) vnormal.col(mesh.simplices(j, s)) += fn;
    }

    std::vector<int> ring;
    std::vector<char> seen(V, 0);
    for (int v = 0; v < V; ++v) {
        if (bmask[v]) continue;
        if (star[v].size() < 3)
            fail("degenerate-star", "interior vertex " + std::to_string(v) +
                                        " has fewer than 3 incident simplices");
        // collect one-ring, expand to two-ring when the fit is underdetermined
        ring.clear();
        auto add_ring = [&](const std::vector<int>& verts) {
            for (int w : verts)
                if (w != v && !seen[w]) {
                    seen[w] = 1;
                    ring.push_back(w);
                }
        };
        std::vector<int> first;
        for (int s : star[v])
            for (int j = 0; j < 3; ++j) first.push_back(mesh.simplices(j, s));
        seen[v] = 1;
        add_ring(first);
        if (ring.size() < 8) {
            std::vector<int> second;
            for (int w : ring)
                for (int s : star[w])
                    for (int j = 0; j < 3; ++j) second.push_back(mesh.simplices(j, s));
            add_ring(second);
        }
        for (int w : ring) seen[w] = 0;
        seen[v] = 0;

        const Eigen::Vector3d nv = vnormal.col(v).normalized();
        // local frame
        Eigen::Vector3d t1 = nv.unitOrthogonal();
        Eigen::Vector3d t2 = nv.cross(t1);
        // fit z = p u + q w + (a u^2 + 2 b u w + c w^2) / 2 over the ring
        const int m = static_cast<int>(ring.size());
        Eigen::MatrixXd M(m, 5);
        Eigen::VectorXd rhs(m);
        const Eigen::Vector3d p0 = mesh.vertex(v);
        for (int i = 0; i < m; ++i) {
            const Eigen::Vector3d d = Eigen::Vector3d(mesh.vertex(ring[i])) - p0;
            const double u = d.dot(t1), w = d.dot(t2), z = d.dot(nv);
            M.row(i) << u, w, 0.5 * u * u, u * w, 0.5 * w * w;
            rhs(i) = z;
        }
        const Eigen::VectorXd sol =
            M.colPivHouseholderQr().solve(rhs);
        const double p = sol(0), q = sol(1), a = sol(2), b = sol(3), c = sol(4);
        // correct for the linear tilt: true normal and shape operator of the
        // graph at the origin
        Eigen::Vector3d nrm = (nv - p * t1 - q * t2).normalized() *
                              ((nv - p * t1 - q * t2).dot(nv) >= 0 ? 1.0 : -1.0);
        const double g = 1.0 + p * p + q * q;
        // first/second fundamental forms of the graph at 0
        Eigen::Matrix2d I;
        I << 1.0 + p * p, p * q, p * q, 1.0 + q * q;
        Eigen::Matrix2d II;
        II << a, b, b, c;
        II /= std::sqrt(g);
        const Eigen::Matrix2d shape_op = I.inverse() * II;
        const double mean_h = shape_op.trace(); // sum of principal curvatures
        f.normal.col(v) = nrm;
        f.mean_curvature.col(v) = mean_h * nrm;
        // sum of squared principal curvatures: (tr W)^2 - 2 det W
        f.norm_A_sq(v) = mean_h * mean_h - 2.0 * shape_op.determinant();
        const double xn = p0.dot(nrm);
        f.x_normal.col(v) = xn * nrm;
        f.x_tangent.col(v) = Eigen::Vector3d(p0) - xn * nrm;
        f.valid[v] = 1;
    }
    return f;
}

} // namespace

DifferentialField DifferentialField::estimate(const DiscreteHypersurface& mesh) {
    require(mesh.n == 1 || mesh.n == 2, "unsupported-dimension",
            "estimators cover n in {1, 2}");
    return mesh.n == 1 ? estimate_curve(mesh) : estimate_surface(mesh);
}

ResidualStats shrinker_residual(const DiscreteHypersurface& mesh,
                                const DifferentialField& field) {
    ResidualStats stats;
    const double s = shrinker_sign();
    // Gaussian lumped vertex masses for the weighted mean
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.n_vertices());
    std::vector<QuadraturePoint> qpts;
    for (int e = 0; e < mesh.n_simplices(); ++e) {
        mesh.quadrature(e, qpts);
        for (const auto& q : qpts) {
            const double w = q.weight * std::exp(-0.25 * q.x.squaredNorm());
            for (int j = 0; j <= mesh.n; ++j)
                mass(mesh.simplices(j, e)) += w * q.barycentric(j);
        }
    }
    double num = 0.0, den = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!field.valid[v]) continue;
        const double res =
            (field.mean_curvature.col(v) - s * 0.5 * field.x_normal.col(v)).norm();
        stats.max = std::max(stats.max, res);
        num += mass(v) * res * res;
        den += mass(v);
        ++stats.n_points;
    }
    stats.weighted_l2_mean = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return stats;
}

ResidualStats shrinker_residual(const DiscreteHypersurface& mesh) {
    const DifferentialField f = mesh.analytic_source
                                    ? DifferentialField::from_analytic(mesh)
                                    : DifferentialField::estimate(mesh);
    return shrinker_residual(mesh, f);
}

} // namespace shrinkerlab
