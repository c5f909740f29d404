#pragma once

#include "shrinkerlab/differential.hpp"
#include "shrinkerlab/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shrinkerlab {

/// Per-vertex scalar field; the Gaussian weight e^{-|x|^2/4} is implicit in
/// all inner products.
using WeightedScalarField = Eigen::VectorXd;

/// Gaussian area (4 pi)^{-n/2} int e^{-|x|^2/4} of the discrete surface.
double gaussian_area(const DiscreteHypersurface& mesh);

/// Assembled weighted P1 forms: stiffness K with <grad u, grad v>_w = u'Kv,
/// lumped Gaussian mass Ml with <u, v>_w = sum_i Ml_i u_i v_i, and the
/// per-vertex potential |A|^2 + 1/2.
///
/// The drift Laplacian is represented through the Dirichlet form (discrete
/// L u = -Ml^{-1} K u), which keeps it exactly self-adjoint in <.,.>_w.
struct WeightedForms {
    const DiscreteHypersurface* mesh = nullptr;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd lumped_mass;
    Eigen::VectorXd potential;
    std::vector<char> boundary;

    double inner(const WeightedScalarField& u, const WeightedScalarField& v) const;
    double dirichlet(const WeightedScalarField& u, const WeightedScalarField& v) const;
    double potential_form(const WeightedScalarField& u, const WeightedScalarField& v) const;
};

/// Assemble forms; the potential uses analytic |A|^2 when the mesh has an
/// analytic source, otherwise estimated curvature.  Throws singular-mass if a
/// lumped mass entry is not positive.
WeightedForms assemble_forms(const DiscreteHypersurface& mesh);
WeightedForms assemble_forms(const DiscreteHypersurface& mesh,
                             const DifferentialField& field);

/// Discrete drift Laplacian: L w = -Ml^{-1} K w.
WeightedScalarField apply_weighted_drift_laplacian(const WeightedForms& forms,
                                                   const WeightedScalarField& w);

/// Scalar stability operator L w = drift Laplacian + (|A|^2 + 1/2) w.
WeightedScalarField apply_stability_operator(const WeightedForms& forms,
                                             const WeightedScalarField& w);

/// Q(w) = [<grad w, grad w>_w - <(|A|^2 + 1/2) w, w>_w] / <w, w>_w for a
/// Dirichlet field w; Q < 0 certifies Gaussian instability.
double rayleigh_quotient(const WeightedForms& forms, const WeightedScalarField& w);

struct SpectralReport {
    double lambda = 0.0;     // lowest eigenvalue of -L, Dirichlet conditions
    double residual = 0.0;   // ||(-L - lambda) w||_w / ||w||_w
    int iterations = 0;
    bool converged = false;
    WeightedScalarField eigenfield; // full-length, zero on the boundary
};

/// Smallest eigenvalue of -L with Dirichlet conditions via shifted inverse
/// iteration on (K - P, Ml), starting below the Gershgorin bound.
SpectralReport lowest_dirichlet_eigenvalue(const WeightedForms& forms,
                                           int max_iterations = 200,
                                           double tol = 1e-9);

} // namespace shrinkerlab
