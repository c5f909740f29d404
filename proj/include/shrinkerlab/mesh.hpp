#pragma once

#include "shrinkerlab/catalog.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace shrinkerlab {

enum class QuadratureRule {
    Barycenter, // one point per simplex
    ThreePoint  // edge midpoints (n=2) / two-point Gauss (n=1)
};

struct QuadraturePoint {
    Eigen::VectorXd x;
    double weight;                 // includes the simplex measure
    Eigen::VectorXd barycentric;   // n+1 shape-function values at x
};

/// Simplicial codimension-one hypersurface, n in {1, 2}.
///
/// Facet j of simplex s is the face opposite local vertex j; its global id is
/// s * (n+1) + j.  Boundary facets are listed by global id.
struct DiscreteHypersurface {
    int n = 1;
    int ambient = 2;
    Eigen::MatrixXd vertices;  // ambient x V
    Eigen::MatrixXi simplices; // (n+1) x S
    std::vector<int> boundary_facets;
    QuadratureRule quad_rule = QuadratureRule::Barycenter;
    std::optional<GeneralizedCylinder> analytic_source;
    double target_h = 0.0;
    double construction_radius = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.cols()); }
    int n_simplices() const { return static_cast<int>(simplices.cols()); }

    Eigen::VectorXd vertex(int v) const { return vertices.col(v); }
    double simplex_volume(int s) const;
    Eigen::VectorXd simplex_barycenter(int s) const;
    double max_edge_length() const;

    /// Vertex indices of a facet by global id (n of them).
    std::vector<int> facet_vertices(int facet_id) const;
    /// True at vertices incident to a boundary facet.
    std::vector<char> boundary_vertex_mask() const;
    /// V - E + F for n = 2.
    int euler_characteristic() const;

    void quadrature(int s, std::vector<QuadraturePoint>& out) const;

    /// Structural invariants: positive volumes, consistent orientation,
    /// index ranges, boundary facets on |x| = R when R is known.  Returns an
    /// empty list when valid.
    std::vector<std::string> validate() const;
};

/// Recompute the boundary facet list topologically (facets incident to
/// exactly one simplex).
std::vector<int> topological_boundary(const DiscreteHypersurface& mesh);

/// Constant P1 hat-function gradients on simplex s (one per local vertex).
void p1_gradients(const DiscreteHypersurface& mesh, int s,
                  std::vector<Eigen::VectorXd>& grads);

/// Mesh of B_R intersect shape with target edge length h (max edge <= 1.5 h).
/// Supports n in {1, 2}; throws unsupported-dimension otherwise and
/// R-too-small when the ball misses the shape.
DiscreteHypersurface build_mesh(const GeneralizedCylinder& shape, double R, double h);

} // namespace shrinkerlab
