#pragma once

#include "shrinkerlab/mesh.hpp"

#include <Eigen/Dense>

namespace shrinkerlab {

/// Per-vertex differential data of a mesh.  `valid` is 0 where no estimate is
/// available (boundary vertices on the estimated path).
struct DifferentialField {
    Eigen::MatrixXd normal;         // ambient x V
    Eigen::MatrixXd mean_curvature; // ambient x V
    Eigen::VectorXd norm_A_sq;      // V
    Eigen::MatrixXd x_tangent;      // ambient x V
    Eigen::MatrixXd x_normal;       // ambient x V
    std::vector<char> valid;

    static DifferentialField from_analytic(const DiscreteHypersurface& mesh);
    /// One-ring estimators: turning-angle curvature for n = 1, quadric fit
    /// for n = 2.  Throws degenerate-star when an interior vertex of a
    /// triangle mesh has fewer than 3 incident simplices.
    static DifferentialField estimate(const DiscreteHypersurface& mesh);
};

struct ResidualStats {
    double max = 0.0;
    double weighted_l2_mean = 0.0; // sqrt of the Gaussian-weighted mean square
    int n_points = 0;
};

/// Per-vertex ||H - s x^perp/2|| with the calibrated sign, over valid
/// vertices; the weighted mean uses the Gaussian lumped vertex masses.
ResidualStats shrinker_residual(const DiscreteHypersurface& mesh,
                                const DifferentialField& field);

/// Convenience: analytic field if the mesh has a source, else estimated.
ResidualStats shrinker_residual(const DiscreteHypersurface& mesh);

} // namespace shrinkerlab
