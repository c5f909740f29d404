#pragma once

#include "shrinkerlab/catalog.hpp"
#include "shrinkerlab/mesh.hpp"
#include "shrinkerlab/weighted.hpp"

#include <Eigen/Dense>
#include <functional>

namespace shrinkerlab {

/// Finite stand-in for the singular set: points S inside B_{R-1}, a covering
/// radius rho < 1/(3R), and greedy covering centers drawn from S.
struct SingularSetProxy {
    Eigen::MatrixXd points;  // ambient x |S|
    double rho = 0.0;
    Eigen::MatrixXd centers; // ambient x m
    int m = 0;

    int size() const { return static_cast<int>(points.cols()); }
    /// Euclidean distance to S (infinity when S is empty).
    double distance(const Eigen::VectorXd& x) const;
    /// Index of the nearest point of S (lowest index wins ties), -1 if empty.
    int nearest(const Eigen::VectorXd& x) const;
};

/// Greedy farthest-point covering of `points` at radius rho; throws
/// rho-too-large when rho >= 1/(3R) and requires S inside B_{R-1}.
SingularSetProxy make_covering(const Eigen::MatrixXd& points, double rho, double R);

/// Three-band distance cutoff: 0 / d/rho - 1 / 1.
struct CutoffFunction {
    WeightedScalarField values; // per vertex, in [0, 1]
    SingularSetProxy proxy;
};

/// phi at every vertex from the exact Euclidean distance to S.
CutoffFunction build_cutoff(const DiscreteHypersurface& mesh,
                            const SingularSetProxy& proxy, double R);

struct CutoffEnergies {
    double dirichlet = 0.0;  // int |grad phi|^2 e^{-|x|^2/4}
    double deficiency = 0.0; // int (1 - phi^2) e^{-|x|^2/4}
};

/// Discrete energies of phi on the mesh (P1 gradient, element quadrature).
CutoffEnergies cutoff_energy(const DiscreteHypersurface& mesh,
                             const CutoffFunction& phi);

/// Analytic-path energies on a catalog shape: local geodesic-chart quadrature
/// of the bands around each S point, any n (this is the n >= 3 route).
/// Points of S must lie on the shape.
CutoffEnergies cutoff_energy_analytic(const GeneralizedCylinder& shape,
                                      const SingularSetProxy& proxy,
                                      int radial_points = 96, int angular_points = 64);

/// Quadrature over the tubular region d_S < 2 rho of the shape, partitioned
/// into Voronoi cells of the S points.  fn receives the canonical point, the
/// exact distance d_S, the nearest S index, and the surface measure weight.
void for_each_band_point(
    const GeneralizedCylinder& shape, const SingularSetProxy& proxy,
    int radial_points, int angular_points,
    const std::function<void(const Eigen::VectorXd& x_canonical, double d,
                             int nearest, double vol)>& fn);

} // namespace shrinkerlab
