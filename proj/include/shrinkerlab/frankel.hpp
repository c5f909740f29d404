#pragma once

#include "shrinkerlab/catalog.hpp"
#include "shrinkerlab/certificates.hpp"
#include "shrinkerlab/mesh.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace shrinkerlab {

struct IntersectionWitness {
    int simplex1 = -1;
    int simplex2 = -1;
    Eigen::VectorXd point;
};

/// Distance between two simplices (segments for n=1, triangles for n=2) with
/// a representative closest/crossing point.
double simplex_pair_distance(const DiscreteHypersurface& m1, int s1,
                             const DiscreteHypersurface& m2, int s2,
                             Eigen::VectorXd& witness);

/// Pairs of simplices at distance <= tol with witness inside B_R.  tol = 0
/// selects the exact-intersection tolerance (1e-9).
std::vector<IntersectionWitness> intersection_test(const DiscreteHypersurface& s1,
                                                   const DiscreteHypersurface& s2,
                                                   double R, double tol = 0.0);

/// Unsigned distance from p to the simplicial complex, with the nearest point
/// and simplex.
double distance_to_complex(const DiscreteHypersurface& mesh, const Eigen::VectorXd& p,
                           Eigen::VectorXd* nearest = nullptr, int* simplex = nullptr);

/// Which side of an n=1 complex p lies on (+1/-1 by the left-normal of the
/// nearest segment); 0 on the complex.
int side_of(const DiscreteHypersurface& mesh, const Eigen::VectorXd& p,
            double tol = 1e-12);

struct SegmentSearch {
    bool intersected = false; // surfaces already meet; no segment produced
    std::vector<IntersectionWitness> witnesses;
    Eigen::VectorXd a, b; // endpoints on Sigma1 / Sigma2
};

/// Connecting segment inside the core ball B_{sqrt(2n)}: nearest-point
/// representatives with interior disjoint from both surfaces.  Throws
/// surface-misses-core-ball when an input avoids the closed core ball.
SegmentSearch find_segment(const DiscreteHypersurface& s1,
                           const DiscreteHypersurface& s2);

/// Obstacle-constrained configuration for the connecting argument.
struct FrankelProblem {
    const DiscreteHypersurface* sigma1 = nullptr;
    const DiscreteHypersurface* sigma2 = nullptr;
    double R = 0.0;
    Eigen::VectorXd seg_a, seg_b;
    int side1 = 0, side2 = 0; // feasible sides, seeded from the segment interior
};

FrankelProblem make_frankel_problem(const DiscreteHypersurface& s1,
                                    const DiscreteHypersurface& s2, double R,
                                    const SegmentSearch& seg);

enum ContactFlag : int {
    ContactNone = 0,
    ContactSigma1 = 1,
    ContactSigma2 = 2,
    ContactBall = 4,
};

struct ObstacleMinimizer {
    DiscreteHypersurface gamma;
    std::vector<int> contact;        // ContactFlag bitmask per vertex
    std::vector<char> fixed;         // boundary vertices held exactly
    double F = 0.0;
    double residual = 0.0;           // sup norm of the feasible-direction gradient
    bool converged = false;
    int iterations = 0;
    std::vector<double> F_history;   // accepted steps only (nonincreasing)
};

/// Projected weighted-gradient descent of the Gaussian length of a polyline
/// constrained to the closure of the feasible region (n = 1 path).
/// Terminates at feasible-direction residual <= tol_factor * F.
ObstacleMinimizer minimize_F_obstacle(const FrankelProblem& problem,
                                      double tol_factor = 1e-6,
                                      int max_iterations = 200000);

/// Graph-type n = 2 path: heights u over a reference mesh along `direction`,
/// box constraints lo <= u <= hi per vertex, boundary heights fixed.
struct GraphMinimizer {
    Eigen::VectorXd heights;
    std::vector<int> contact; // 1 = lower bound, 2 = upper bound
    double F = 0.0;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> F_history;
};

GraphMinimizer minimize_F_graph(const DiscreteHypersurface& base,
                                const Eigen::VectorXd& direction,
                                const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                const Eigen::VectorXd& u0, double tol_factor = 1e-6,
                                int max_iterations = 200000);

struct FrankelVerdict {
    bool intersect = false;
    std::vector<IntersectionWitness> witnesses;
    // disjoint-evidence route:
    std::optional<ObstacleMinimizer> minimizer;
    std::vector<int> gamma1_simplices; // component of B_R cap Gamma meeting sigma
    std::optional<InstabilityCertificate> certificate;
    std::string note;
};

/// Intersect(witnesses) or DisjointEvidence(Gamma, certificate): the full
/// desk-scale pipeline (n = 1).
FrankelVerdict frankel_verdict(const DiscreteHypersurface& s1,
                               const DiscreteHypersurface& s2, double R);

} // namespace shrinkerlab
