#include "shrinkerlab/cutoff.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <cmath>
#include <limits>

namespace shrinkerlab {

double SingularSetProxy::distance(const Eigen::VectorXd& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points.cols(); ++i)
        best = std::min(best, (x - points.col(i)).norm());
    return best;
}

int SingularSetProxy::nearest(const Eigen::VectorXd& x) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points.cols(); ++i) {
        const double d = (x - points.col(i)).norm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

SingularSetProxy make_covering(const Eigen::MatrixXd& points, double rho, double R) {
    require(rho > 0.0, "bad-argument", "covering radius must be positive");
    require(rho < 1.0 / (3.0 * R), "rho-too-large",
            "need rho < 1/(3R) = " + std::to_string(1.0 / (3.0 * R)));
    SingularSetProxy proxy;
    proxy.points = points;
    proxy.rho = rho;
    const int count = static_cast<int>(points.cols());
    for (int i = 0; i < count; ++i)
        require(points.col(i).norm() <= R - 1.0 + 1e-12, "bad-argument",
                "singular points must lie in B_{R-1}");
    if (count == 0) {
        proxy.centers.resize(points.rows(), 0);
        proxy.m = 0;
        return proxy;
    }
    // farthest-point greedy covering, seeded at index 0
    std::vector<int> centers = {0};
    std::vector<double> dist(count);
    for (int i = 0; i < count; ++i) dist[i] = (points.col(i) - points.col(0)).norm();
    for (;;) {
        int far = 0;
        for (int i = 1; i < count; ++i)
            if (dist[i] > dist[far]) far = i;
        if (dist[far] <= rho) break;
        centers.push_back(far);
        for (int i = 0; i < count; ++i)
            dist[i] = std::min(dist[i], (points.col(i) - points.col(far)).norm());
    }
    proxy.m = static_cast<int>(centers.size());
    proxy.centers.resize(points.rows(), proxy.m);
    for (int i = 0; i < proxy.m; ++i) proxy.centers.col(i) = points.col(centers[i]);
    return proxy;
}

namespace {

double phi_of_distance(double d, double rho) {
    if (d <= rho) return 0.0;
    if (d >= 2.0 * rho) return 1.0;
    return d / rho - 1.0;
}

} // namespace

CutoffFunction build_cutoff(const DiscreteHypersurface& mesh,
                            const SingularSetProxy& proxy, double R) {
    require(proxy.size() == 0 || proxy.rho < 1.0 / (3.0 * R), "rho-too-large",
            "need rho < 1/(3R)");
    CutoffFunction phi;
    phi.proxy = proxy;
    phi.values.resize(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        phi.values(v) = proxy.size() == 0
                            ? 1.0
                            : phi_of_distance(proxy.distance(mesh.vertex(v)), proxy.rho);
    return phi;
}

CutoffEnergies cutoff_energy(const DiscreteHypersurface& mesh,
                             const CutoffFunction& phi) {
    require(phi.values.size() == mesh.n_vertices(), "dimension-mismatch",
            "cutoff built on a different surface");
    CutoffEnergies out;
    std::vector<QuadraturePoint> qpts;
    std::vector<Eigen::VectorXd> grads;
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        mesh.quadrature(s, qpts);
        p1_gradients(mesh, s, grads);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(mesh.ambient);
        for (int j = 0; j <= mesh.n; ++j)
            grad += phi.values(mesh.simplices(j, s)) * grads[j];
        const double g2 = grad.squaredNorm();
        for (const auto& q : qpts) {
            const double w = q.weight * std::exp(-0.25 * q.x.squaredNorm());
            double interp = 0.0;
            for (int j = 0; j <= mesh.n; ++j)
                interp += q.barycentric(j) * phi.values(mesh.simplices(j, s));
            out.dirichlet += w * g2;
            out.deficiency += w * (1.0 - interp * interp);
        }
    }
    return out;
}

void for_each_band_point(
    const GeneralizedCylinder& shape, const SingularSetProxy& proxy,
    int radial_points, int angular_points,
    const std::function<void(const Eigen::VectorXd&, double, int, double)>& fn) {
    if (proxy.size() == 0) return;
    const int n = shape.n();
    const int k = shape.k();
    const double rho = proxy.rho;

    // singular points in canonical coordinates (isometry: distances and the
    // radial weight are unchanged)
    Eigen::MatrixXd s_can(shape.ambient(), proxy.size());
    for (int i = 0; i < proxy.size(); ++i) {
        require(shape.distance(proxy.points.col(i)) <= 1e-9, "point-off-surface",
                "singular proxy point off the shape");
        s_can.col(i) = shape.to_canonical(proxy.points.col(i));
    }
    auto nearest_can = [&](const Eigen::VectorXd& x, double& dist) {
        int best = 0;
        dist = (x - s_can.col(0)).norm();
        for (int i = 1; i < s_can.cols(); ++i) {
            const double d = (x - s_can.col(i)).norm();
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        return best;
    };

    std::vector<Eigen::VectorXd> ang_pts;
    std::vector<double> ang_wts;
    sphere_quadrature(n - 1, angular_points, ang_pts, ang_wts);
    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(4, gl_nodes, gl_weights);
    const double t_max = 3.0 * rho;
    // panel count divisible by 3 puts the band kinks on panel boundaries
    const int panels = std::max(9, 3 * (radial_points / 12));

    for (int i = 0; i < proxy.size(); ++i) {
        const CylinderChart chart = make_chart(shape, proxy.points.col(i));
        for (int pan = 0; pan < panels; ++pan) {
            const double a = t_max * pan / panels;
            const double b = t_max * (pan + 1) / panels;
            for (std::size_t g = 0; g < gl_nodes.size(); ++g) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * gl_nodes[g];
                const double wt_rad = 0.5 * (b - a) * gl_weights[g];
                for (std::size_t aidx = 0; aidx < ang_pts.size(); ++aidx) {
                    const Eigen::VectorXd& omega = ang_pts[aidx];
                    const Eigen::VectorXd u = t * omega.head(k);
                    const Eigen::VectorXd z = t * omega.tail(n - k);
                    const Eigen::VectorXd x = chart.point_canonical(u, z);
                    double d;
                    const int near = nearest_can(x, d);
                    if (near != i || d >= 2.0 * rho) continue;
                    const double vol = wt_rad * ang_wts[aidx] * std::pow(t, n - 1) *
                                       chart.volume_element(u);
                    fn(x, d, near, vol);
                }
            }
        }
    }
}

CutoffEnergies cutoff_energy_analytic(const GeneralizedCylinder& shape,
                                      const SingularSetProxy& proxy,
                                      int radial_points, int angular_points) {
    CutoffEnergies out;
    if (proxy.size() == 0) return out;
    const double rho = proxy.rho;
    Eigen::MatrixXd s_can(shape.ambient(), proxy.size());
    for (int i = 0; i < proxy.size(); ++i)
        s_can.col(i) = shape.to_canonical(proxy.points.col(i));
    for_each_band_point(
        shape, proxy, radial_points, angular_points,
        [&](const Eigen::VectorXd& x, double d, int near, double vol) {
            const double weight = std::exp(-0.25 * x.squaredNorm());
            const double phi = phi_of_distance(d, rho);
            out.deficiency += vol * weight * (1.0 - phi * phi);
            if (d > rho && d < 2.0 * rho) {
                const Eigen::VectorXd grad_d = (x - s_can.col(near)) / d;
                const Eigen::VectorXd gt = tangential_part_canonical(shape, x, grad_d);
                out.dirichlet += vol * weight * gt.squaredNorm() / (rho * rho);
            }
        });
    return out;
}

} // namespace shrinkerlab
