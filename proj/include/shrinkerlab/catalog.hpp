#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

namespace shrinkerlab {

/// Pointwise differential-geometric data of a hypersurface (or, on the
/// analytic catalog, a submanifold of any codimension).
///
/// Conventions: the second fundamental form is A(X, Y) = (D_X Y)^perp and the
/// mean curvature vector is its trace, so a round sphere has H pointing toward
/// the center.  `second_fundamental` holds the coefficients of A along
/// normal_basis.col(0); on the catalog that is the only normal direction A
/// touches and it coincides with the scalar hypersurface form when codim = 1.
struct DifferentialData {
    Eigen::MatrixXd tangent_frame; // ambient x n, orthonormal columns
    Eigen::MatrixXd normal_basis;  // ambient x codim, orthonormal columns
    Eigen::VectorXd x_tangent;     // x^T
    Eigen::VectorXd x_normal;      // x^perp
    Eigen::VectorXd mean_curvature;
    Eigen::MatrixXd second_fundamental; // n x n coefficients along normal 0
    double norm_A_sq = 0.0;

    const Eigen::VectorXd unit_normal() const { return normal_basis.col(0); }
};

/// Global sign s in {+1, -1} calibrated once so that S^n_{sqrt(2n)} has zero
/// residual ||H - s x^perp / 2||.
double shrinker_sign();

/// Exact generalized cylinder S^k_{sqrt(2k)} x R^{n-k}, optionally embedded in
/// a higher-dimensional ambient space (padding coordinates pinned to zero) and
/// rotated by an orthogonal matrix.
///
/// Canonical coordinate layout before rotation: the first k+1 coordinates are
/// the sphere block (|y| = sqrt(2k); for k = 0 the single coordinate is 0),
/// the next n-k the Euclidean factor, the rest padding zeros.
class GeneralizedCylinder {
public:
    GeneralizedCylinder(int n, int k, Eigen::MatrixXd rotation);

    static GeneralizedCylinder canonical(int n, int k, int ambient_dim = -1);

    int n() const { return n_; }
    int k() const { return k_; }
    int ambient() const { return ambient_; }
    int codim() const { return ambient_ - n_; }
    double sphere_radius() const; // sqrt(2k)
    const Eigen::MatrixXd& rotation() const { return rotation_; }

    Eigen::VectorXd to_canonical(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_canonical(const Eigen::VectorXd& xi) const;

    /// Euclidean distance from x to the shape.
    double distance(const Eigen::VectorXd& x) const;
    /// Nearest point of the shape.
    Eigen::VectorXd project(const Eigen::VectorXd& x) const;

    /// Closed-form differential data; throws point-off-surface if
    /// distance(p) > 1e-9.
    DifferentialData differential_data(const Eigen::VectorXd& p) const;

    /// ||H - s x^perp/2|| at p (calibrated sign).
    double shrinker_residual(const Eigen::VectorXd& p) const;

    /// Uniform-ish random point of B_R intersect shape (sphere factor uniform,
    /// Euclidean factor uniform in the admissible ball).
    Eigen::VectorXd sample_in_ball(double R, std::mt19937_64& rng) const;

    /// Total mass of the sphere factor: area of S^k_{sqrt 2k}, with the k = 0
    /// convention that the factor is the single point 0 (mass 1).
    double sphere_factor_area() const;

    /// n-volume of B_r intersect shape (closed form; any n).
    double ball_volume_profile(double r) const;
    /// integral of |H|^2 over B_r intersect shape = (k/2) V(r).
    double curvature_profile(double r) const;
    /// integral of |x^T| over the slice |x| = r (closed form).
    double slice_xtangent(double r) const;
    /// d/dr of ball_volume_profile at regular r.
    double ball_volume_derivative(double r) const;
    /// Radii r with |r^2 - 2k| <= tol are tangency radii (non-regular).
    bool regular_radius(double r, double tol = 1e-9) const;

    /// Gaussian area of B_R intersect shape, (4 pi)^{-n/2} int e^{-|x|^2/4}.
    double gaussian_area(double R) const;

    /// |H|^2 (constant on the shape).
    double mean_curvature_sq() const;

private:
    int n_, k_, ambient_;
    Eigen::MatrixXd rotation_;
};

/// Report of the coordinate eigenfield checks at one point: deviations of
/// sum_i |v_i|^2 from the codimension and of L v_i from v_i / 2, where
/// v_i = e_i^perp and L is assembled from independently computed pieces
/// (ambient-restriction Laplacian, drift along x^T, curvature contraction).
struct CoordinateFieldCheck {
    double sum_vi_sq_error = 0.0;
    double max_Lvi_error = 0.0;
};

CoordinateFieldCheck check_coordinate_fields_at(const GeneralizedCylinder& cyl,
                                                const Eigen::VectorXd& p);

/// Max deviations over a set of sampled points.
CoordinateFieldCheck check_coordinate_fields(const GeneralizedCylinder& cyl,
                                             int n_points, double R,
                                             std::mt19937_64& rng);

/// Drift Laplacian of |x|^2 at p, assembled from differential data as
/// 2n + 2<H, x> - |x^T|^2 (equals 2n - |x|^2 on shrinkers).
double drift_laplacian_xsq(const GeneralizedCylinder& cyl,
                           const Eigen::VectorXd& p);

/// Geodesic-normal chart around a point of the shape, for local quadrature.
/// map(u, z): u in R^k are geodesic coordinates on the sphere factor, z in
/// R^{n-k} offsets on the Euclidean factor; jacobian(u) is the volume element.
struct CylinderChart {
    const GeneralizedCylinder* shape;
    Eigen::VectorXd base_canonical;
    Eigen::MatrixXd sphere_tangent; // (k+1) x k in the sphere block
    Eigen::VectorXd point(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;
    Eigen::VectorXd point_canonical(const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& z) const;
    double volume_element(const Eigen::VectorXd& u) const;
};

/// Tangential projection at a canonical on-surface point (subtracts the
/// sphere-radial and padding components).
Eigen::VectorXd tangential_part_canonical(const GeneralizedCylinder& cyl,
                                          const Eigen::VectorXd& x_canonical,
                                          const Eigen::VectorXd& v_canonical);

CylinderChart make_chart(const GeneralizedCylinder& cyl, const Eigen::VectorXd& p);

} // namespace shrinkerlab
