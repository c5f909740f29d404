#include "shrinkerlab/catalog.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <cmath>
#include <numbers>

namespace shrinkerlab {

namespace {

// Orthonormal basis of the orthogonal complement of unit vector v in R^d,
// via the Householder map sending e_0 to v.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& v) {
    const int d = static_cast<int>(v.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd u = v;
    u(0) -= 1.0;
    const double uu = u.squaredNorm();
    if (uu > 1e-28) h -= (2.0 / uu) * (u * u.transpose());
    return h.rightCols(d - 1);
}

} // namespace

GeneralizedCylinder::GeneralizedCylinder(int n, int k, Eigen::MatrixXd rotation)
    : n_(n), k_(k), ambient_(static_cast<int>(rotation.rows())),
      rotation_(std::move(rotation)) {
    require(n_ >= 1, "bad-argument", "intrinsic dimension must be >= 1");
    require(k_ >= 0 && k_ <= n_, "bad-argument", "need 0 <= k <= n");
    require(ambient_ >= n_ + 1, "bad-argument", "ambient dimension too small");
    require(rotation_.rows() == rotation_.cols(), "bad-argument",
            "rotation must be square");
    const double ortho =
        (rotation_.transpose() * rotation_ - Eigen::MatrixXd::Identity(ambient_, ambient_))
            .cwiseAbs()
            .maxCoeff();
    require(ortho <= 1e-12, "bad-argument", "rotation columns not orthonormal");
}

GeneralizedCylinder GeneralizedCylinder::canonical(int n, int k, int ambient_dim) {
    if (ambient_dim < 0) ambient_dim = n + 1;
    return GeneralizedCylinder(n, k, Eigen::MatrixXd::Identity(ambient_dim, ambient_dim));
}

double GeneralizedCylinder::sphere_radius() const { return std::sqrt(2.0 * k_); }

Eigen::VectorXd GeneralizedCylinder::to_canonical(const Eigen::VectorXd& x) const {
    return rotation_.transpose() * x;
}

Eigen::VectorXd GeneralizedCylinder::from_canonical(const Eigen::VectorXd& xi) const {
    return rotation_ * xi;
}

double GeneralizedCylinder::distance(const Eigen::VectorXd& x) const {
    require(x.size() == ambient_, "dimension-mismatch", "point dimension");
    const Eigen::VectorXd xi = to_canonical(x);
    const int sb = k_ + 1;
    const double ynorm = xi.head(sb).norm();
    const double pad_sq = xi.tail(ambient_ - (n_ + 1)).squaredNorm();
    if (k_ == 0) return std::sqrt(xi(0) * xi(0) + pad_sq);
    const double dr = ynorm - sphere_radius();
    return std::sqrt(dr * dr + pad_sq);
}

Eigen::VectorXd GeneralizedCylinder::project(const Eigen::VectorXd& x) const {
    Eigen::VectorXd xi = to_canonical(x);
    const int sb = k_ + 1;
    if (k_ == 0) {
        xi(0) = 0.0;
    } else {
        const double ynorm = xi.head(sb).norm();
        if (ynorm < 1e-300) {
            xi.head(sb).setZero();
            xi(0) = sphere_radius();
        } else {
            xi.head(sb) *= sphere_radius() / ynorm;
        }
    }
    xi.tail(ambient_ - (n_ + 1)).setZero();
    return from_canonical(xi);
}

DifferentialData GeneralizedCylinder::differential_data(const Eigen::VectorXd& p) const {
    require(distance(p) <= 1e-9, "point-off-surface",
            "point is not on the cylinder (distance > 1e-9)");
    const Eigen::VectorXd xi = to_canonical(p);
    const int sb = k_ + 1;
    const int m = n_ - k_;
    const int codim = ambient_ - n_;
    const double r = sphere_radius();

    DifferentialData dd;
    dd.tangent_frame = Eigen::MatrixXd::Zero(ambient_, n_);
    dd.normal_basis = Eigen::MatrixXd::Zero(ambient_, codim);

    // Normal 0: radial direction of the sphere block (e_0 for the plane).
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(ambient_);
    if (k_ == 0) {
        nu(0) = 1.0;
    } else {
        nu.head(sb) = xi.head(sb) / xi.head(sb).norm();
    }
    dd.normal_basis.col(0) = nu;
    // Padding directions are the remaining normals.
    for (int a = 1; a < codim; ++a) dd.normal_basis(n_ + a, a) = 1.0;

    // Tangent frame: sphere-factor directions then Euclidean directions.
    if (k_ >= 1) {
        const Eigen::MatrixXd tan_sphere = complement_basis(nu.head(sb));
        dd.tangent_frame.block(0, 0, sb, k_) = tan_sphere;
    }
    for (int j = 0; j < m; ++j) dd.tangent_frame(sb + j, k_ + j) = 1.0;

    dd.second_fundamental = Eigen::MatrixXd::Zero(n_, n_);
    if (k_ >= 1) {
        for (int i = 0; i < k_; ++i) dd.second_fundamental(i, i) = -1.0 / r;
        dd.norm_A_sq = k_ / (r * r); // = 1/2
    }
    dd.mean_curvature = (k_ >= 1) ? Eigen::VectorXd(-(k_ / r) * nu)
                                  : Eigen::VectorXd(Eigen::VectorXd::Zero(ambient_));

    // x-splitting in canonical coordinates; padding block of x is zero here.
    Eigen::VectorXd x_norm = Eigen::VectorXd::Zero(ambient_);
    for (int a = 0; a < codim; ++a)
        x_norm += dd.normal_basis.col(a).dot(xi) * dd.normal_basis.col(a);
    dd.x_normal = x_norm;
    dd.x_tangent = xi - x_norm;

    // Rotate everything back to ambient coordinates.
    dd.tangent_frame = rotation_ * dd.tangent_frame;
    dd.normal_basis = rotation_ * dd.normal_basis;
    dd.mean_curvature = rotation_ * dd.mean_curvature;
    dd.x_normal = rotation_ * dd.x_normal;
    dd.x_tangent = rotation_ * dd.x_tangent;
    return dd;
}

double shrinker_sign() {
    // Calibrated once on the closed shrinker sphere: pick s with zero residual.
    static const double s = [] {
        const auto sphere = GeneralizedCylinder::canonical(1, 1);
        Eigen::VectorXd p(2);
        p << std::sqrt(2.0), 0.0;
        const DifferentialData dd = sphere.differential_data(p);
        const double proj = dd.mean_curvature.dot(dd.x_normal) /
                            (0.5 * dd.x_normal.squaredNorm());
        return proj >= 0.0 ? 1.0 : -1.0;
    }();
    return s;
}

double GeneralizedCylinder::shrinker_residual(const Eigen::VectorXd& p) const {
    const DifferentialData dd = differential_data(p);
    return (dd.mean_curvature - shrinker_sign() * 0.5 * dd.x_normal).norm();
}

Eigen::VectorXd GeneralizedCylinder::sample_in_ball(double R,
                                                    std::mt19937_64& rng) const {
    require(R > sphere_radius(), "R-too-small", "ball misses the shape");
    const int sb = k_ + 1;
    const int m = n_ - k_;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(ambient_);
    if (k_ >= 1) {
        Eigen::VectorXd y(sb);
        do {
            for (int i = 0; i < sb; ++i) y(i) = gauss(rng);
        } while (y.norm() < 1e-12);
        xi.head(sb) = sphere_radius() * y.normalized();
    }
    if (m > 0) {
        const double s = std::sqrt(R * R - 2.0 * k_);
        Eigen::VectorXd dir(m);
        do {
            for (int i = 0; i < m; ++i) dir(i) = gauss(rng);
        } while (dir.norm() < 1e-12);
        const double rad = s * std::pow(unif(rng), 1.0 / m);
        xi.segment(sb, m) = rad * dir.normalized();
    }
    return from_canonical(xi);
}

double GeneralizedCylinder::sphere_factor_area() const {
    if (k_ == 0) return 1.0;
    return unit_sphere_area(k_) * std::pow(sphere_radius(), k_);
}

double GeneralizedCylinder::ball_volume_profile(double r) const {
    const int m = n_ - k_;
    const double rr = r * r - 2.0 * k_;
    if (rr <= 0.0) return 0.0;
    return sphere_factor_area() * ball_volume(m, std::sqrt(rr));
}

double GeneralizedCylinder::curvature_profile(double r) const {
    return mean_curvature_sq() * ball_volume_profile(r);
}

double GeneralizedCylinder::mean_curvature_sq() const { return 0.5 * k_; }

double GeneralizedCylinder::slice_xtangent(double r) const {
    // integral over S^k_{sqrt 2k} x S^{m-1}_s of |x^T| = s, with s^2 = r^2-2k.
    const int m = n_ - k_;
    const double rr = r * r - 2.0 * k_;
    if (m == 0 || rr <= 0.0) return 0.0;
    const double s = std::sqrt(rr);
    return sphere_factor_area() * s * unit_sphere_area(m - 1) * std::pow(s, m - 1);
}

double GeneralizedCylinder::ball_volume_derivative(double r) const {
    const int m = n_ - k_;
    const double rr = r * r - 2.0 * k_;
    if (m == 0 || rr <= 0.0) return 0.0;
    const double s = std::sqrt(rr);
    // coarea: V'(r) = r * int_slice 1/|x^T| = r/s * area(slice).
    return r / s * sphere_factor_area() * unit_sphere_area(m - 1) * std::pow(s, m - 1);
}

bool GeneralizedCylinder::regular_radius(double r, double tol) const {
    return std::abs(r * r - 2.0 * k_) > tol;
}

double GeneralizedCylinder::gaussian_area(double R) const {
    const double pi = std::numbers::pi;
    const int m = n_ - k_;
    const double rr = R * R - 2.0 * k_;
    if (rr <= 0.0) return 0.0;
    const double weight_sphere = std::exp(-0.5 * k_); // e^{-2k/4}
    double euclidean = 1.0;
    if (m > 0) {
        const double s = std::sqrt(rr);
        euclidean = unit_sphere_area(m - 1) *
                    integrate([m](double t) {
                        return std::pow(t, m - 1) * std::exp(-0.25 * t * t);
                    }, 0.0, s, 1e-13);
    }
    return std::pow(4.0 * pi, -0.5 * n_) * sphere_factor_area() * weight_sphere *
           euclidean;
}

namespace {

// Surface Laplacian, gradient, and drift of an ambient-linear function
// f(x) = <c, x> restricted to the cylinder, evaluated at canonical point xi
// with data dd (canonical frame): Delta_S f = -Hess_f(normals) + <H, c> = <H, c>
// for linear f, grad_S f = tangential projection of c.
struct RestrictedLinear {
    double laplacian;
    Eigen::VectorXd gradient; // tangential, canonical coords
};

RestrictedLinear restrict_linear(const Eigen::VectorXd& c,
                                 const DifferentialData& dd) {
    RestrictedLinear out;
    out.laplacian = dd.mean_curvature.dot(c);
    Eigen::VectorXd g = c;
    for (int a = 0; a < dd.normal_basis.cols(); ++a)
        g -= dd.normal_basis.col(a).dot(c) * dd.normal_basis.col(a);
    out.gradient = g;
    return out;
}

} // namespace

CoordinateFieldCheck check_coordinate_fields_at(const GeneralizedCylinder& cyl,
                                                const Eigen::VectorXd& p) {
    const DifferentialData dd = cyl.differential_data(p);
    const int N = cyl.ambient();
    const int codim = cyl.codim();

    CoordinateFieldCheck out;
    double sum_sq = 0.0;
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
        e(i) = 1.0;
        // v_i = e_i^perp expressed in the normal frame.
        Eigen::VectorXd coeffs(codim);
        for (int a = 0; a < codim; ++a) coeffs(a) = dd.normal_basis.col(a).dot(e);
        sum_sq += coeffs.squaredNorm();

        // L v_i componentwise in the parallel normal frame {nu, E_alpha}:
        // component along nu is a(x) = <e_i, nu(x)>, an ambient-linear function
        // of x restricted to the shape (c = sphere-block part of e_i over r for
        // k >= 1; constant for k = 0); components along padding normals are
        // constants.  L a = Delta_S a - (1/2) <x^T, grad a> + |A|^2 a + a/2 on
        // the nu component, L b = b/2 on parallel constants.
        Eigen::VectorXd Lv = Eigen::VectorXd::Zero(N);
        const double a0 = coeffs(0);
        double La;
        if (cyl.k() == 0) {
            La = 0.5 * a0; // constant normal component, |A|^2 = 0
        } else {
            // a(x) = <e_i, y/r> with y the sphere block of x: linear with
            // c = P_sphere e_i / r.
            Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
            const Eigen::VectorXd e_can = cyl.to_canonical(e);
            c.head(cyl.k() + 1) = e_can.head(cyl.k() + 1) / cyl.sphere_radius();
            const Eigen::VectorXd c_amb = cyl.from_canonical(c);
            const RestrictedLinear rl = restrict_linear(c_amb, dd);
            const double drift = dd.x_tangent.dot(rl.gradient);
            La = rl.laplacian - 0.5 * drift + dd.norm_A_sq * a0 + 0.5 * a0;
        }
        Lv += La * dd.normal_basis.col(0);
        for (int a = 1; a < codim; ++a)
            Lv += 0.5 * coeffs(a) * dd.normal_basis.col(a);

        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        for (int a = 0; a < codim; ++a) v += coeffs(a) * dd.normal_basis.col(a);
        out.max_Lvi_error = std::max(out.max_Lvi_error, (Lv - 0.5 * v).norm());
    }
    out.sum_vi_sq_error = std::abs(sum_sq - codim);
    return out;
}

CoordinateFieldCheck check_coordinate_fields(const GeneralizedCylinder& cyl,
                                             int n_points, double R,
                                             std::mt19937_64& rng) {
    CoordinateFieldCheck worst;
    for (int i = 0; i < n_points; ++i) {
        const auto c = check_coordinate_fields_at(cyl, cyl.sample_in_ball(R, rng));
        worst.sum_vi_sq_error = std::max(worst.sum_vi_sq_error, c.sum_vi_sq_error);
        worst.max_Lvi_error = std::max(worst.max_Lvi_error, c.max_Lvi_error);
    }
    return worst;
}

double drift_laplacian_xsq(const GeneralizedCylinder& cyl, const Eigen::VectorXd& p) {
    const DifferentialData dd = cyl.differential_data(p);
    return 2.0 * cyl.n() + 2.0 * dd.mean_curvature.dot(p) - dd.x_tangent.squaredNorm();
}

Eigen::VectorXd CylinderChart::point_canonical(const Eigen::VectorXd& u,
                                               const Eigen::VectorXd& z) const {
    const int k = shape->k();
    const int sb = k + 1;
    Eigen::VectorXd xi = base_canonical;
    if (k >= 1) {
        const double r = shape->sphere_radius();
        const double s = u.norm();
        Eigen::VectorXd y(sb);
        if (s < 1e-300) {
            y = base_canonical.head(sb);
        } else {
            const Eigen::VectorXd dir = sphere_tangent * (u / s);
            y = std::cos(s / r) * base_canonical.head(sb) + r * std::sin(s / r) * dir;
        }
        xi.head(sb) = y;
    }
    xi.segment(sb, shape->n() - k) += z;
    return xi;
}

Eigen::VectorXd CylinderChart::point(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& z) const {
    return shape->from_canonical(point_canonical(u, z));
}

Eigen::VectorXd tangential_part_canonical(const GeneralizedCylinder& cyl,
                                          const Eigen::VectorXd& x_canonical,
                                          const Eigen::VectorXd& v_canonical) {
    const int sb = cyl.k() + 1;
    Eigen::VectorXd out = v_canonical;
    if (cyl.k() >= 1) {
        const Eigen::VectorXd nu = x_canonical.head(sb).normalized();
        out.head(sb) -= nu.dot(v_canonical.head(sb)) * nu;
    } else {
        out(0) = 0.0;
    }
    out.tail(cyl.ambient() - (cyl.n() + 1)).setZero();
    return out;
}

double CylinderChart::volume_element(const Eigen::VectorXd& u) const {
    const int k = shape->k();
    if (k <= 1) return 1.0;
    const double r = shape->sphere_radius();
    const double s = u.norm();
    if (s < 1e-14) return 1.0;
    return std::pow(r * std::sin(s / r) / s, k - 1);
}

CylinderChart make_chart(const GeneralizedCylinder& cyl, const Eigen::VectorXd& p) {
    require(cyl.distance(p) <= 1e-9, "point-off-surface", "chart base off surface");
    CylinderChart chart;
    chart.shape = &cyl;
    chart.base_canonical = cyl.to_canonical(cyl.project(p));
    if (cyl.k() >= 1) {
        const Eigen::VectorXd yhat =
            chart.base_canonical.head(cyl.k() + 1).normalized();
        // complement of yhat within the sphere block
        const int sb = cyl.k() + 1;
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(sb, sb);
        Eigen::VectorXd u = yhat;
        u(0) -= 1.0;
        const double uu = u.squaredNorm();
        if (uu > 1e-28) h -= (2.0 / uu) * (u * u.transpose());
        chart.sphere_tangent = h.rightCols(sb - 1);
    }
    return chart;
}

} // namespace shrinkerlab
