#pragma once

#include "shrinkerlab/catalog.hpp"
#include "shrinkerlab/differential.hpp"
#include "shrinkerlab/mesh.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace shrinkerlab {

/// V(r), T(r) profile on a radius grid with regular-value flags.
struct GrowthProfile {
    Eigen::VectorXd radii;
    Eigen::VectorXd volume;      // V(r) = vol(B_r cap Sigma)
    Eigen::VectorXd curvature;   // T(r) = int_{B_r} |H|^2
    std::vector<char> regular;
    int n = 1;

    std::string to_csv(const std::string& config_comment = "") const;
};

/// Length of segment cap ball (exact).
double segment_ball_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           double r);
/// Area of triangle cap ball (exact triangle-disk clipping in the plane of
/// the triangle).
double triangle_ball_area(const Eigen::VectorXd& v0, const Eigen::VectorXd& v1,
                          const Eigen::VectorXd& v2, double r);

/// Mesh profile; V by exact clipping, T by clipped measure times |H|^2.
/// Radii within regular_band of a vertex norm are flagged non-regular
/// (regular_band <= 0 selects the default 0.25 * target_h).
GrowthProfile growth_profile(const DiscreteHypersurface& mesh,
                             const DifferentialField& field,
                             const Eigen::VectorXd& radii,
                             double regular_band = -1.0);

/// Closed-form profile of a catalog shape (any n).
GrowthProfile growth_profile_analytic(const GeneralizedCylinder& shape,
                                      const Eigen::VectorXd& radii);

struct GrowthCheck {
    double slack = 0.0;
    bool pass = false;
};

/// Volume-growth inequality between two grid radii:
/// slack = V(r1)/r1^n - (1 - 2n/r2^2) V(r2)/r2^n, pass iff slack >= -tol.
/// Throws precondition-violation unless sqrt(4+2n) <= r1 < r2.
GrowthCheck check_volume_growth(const GrowthProfile& profile, double r1, double r2,
                                double tol = 1e-6);

struct H2CheckRow {
    double r = 0.0;
    bool regular = false;
    bool pass = false;
    double excess = 0.0; // T - (n/2) V, negative when satisfied
};

/// T(r) <= (n/2) V(r) + tol * V(r) at regular radii.
std::vector<H2CheckRow> check_H2_bound(const GrowthProfile& profile,
                                       double tol = 1e-6);

/// Integral of g over the slice |x| = r (counting measure for n = 1, chord
/// quadrature for n = 2); g is interpolated from per-vertex values.
double slice_integral(const DiscreteHypersurface& mesh, double r,
                      const Eigen::VectorXd& vertex_values);

/// Relative residual of 2 n V(r) - 4 T(r) = 2 int_{slice} |x^T| computed by
/// independent quadratures (clipping vs slice).  Throws non-regular-radius.
double divergence_identity_check(const DiscreteHypersurface& mesh,
                                 const DifferentialField& field, double r,
                                 double regular_band = -1.0);

/// Same check on the closed-form catalog path.
double divergence_identity_check_analytic(const GeneralizedCylinder& shape,
                                          double r);

} // namespace shrinkerlab
