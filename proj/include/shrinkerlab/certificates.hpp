#pragma once

#include "shrinkerlab/catalog.hpp"
#include "shrinkerlab/cutoff.hpp"
#include "shrinkerlab/mesh.hpp"
#include "shrinkerlab/weighted.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace shrinkerlab {

/// Radial cutoff: 1 on |x| <= r2-1, linear down to 0 at |x| = r2.
double radial_cutoff_value(double xnorm, double r2);

/// Per-vertex radial cutoff field; throws r2-out-of-range when r2 > R or
/// r2 <= 1.
WeightedScalarField radial_cutoff(const DiscreteHypersurface& mesh, double r2);

/// Poincare-violation certificate for w = eta phi: fires iff
/// mass > 2 energy (strictly), i.e. int w^2 e^{-|x|^2/4} > 2 int |grad w|^2.
struct InstabilityCertificate {
    double r1 = 0.0, r2 = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double margin = 0.0; // mass - 2 energy
    bool fires = false;
    WeightedScalarField field; // w on mesh paths; empty on the analytic path
};

/// Mesh path; w vanishes on boundary vertices and on the rho-band of S.
InstabilityCertificate certify_instability(const DiscreteHypersurface& mesh,
                                           const WeightedForms& forms, double r1,
                                           double r2,
                                           const SingularSetProxy* proxy = nullptr);

/// Analytic path on B_{r2} of a catalog shape (any n); with a nonempty proxy
/// the eta-phi cross terms are integrated over the bands.
InstabilityCertificate certify_instability_analytic(
    const GeneralizedCylinder& shape, double r1, double r2,
    const SingularSetProxy* proxy = nullptr);

/// The proof-of-instability volume comparison: stability would force
/// e^{-r1^2/4} V(r1) <= 4 e^{-(r2-1)^2/4} V(r2).  Returns lhs - rhs; the
/// inequality fails (exhibiting the contradiction) when this is positive.
double volume_comparison_gap(const GeneralizedCylinder& shape, double r1, double r2);

struct RnEntry {
    int k = 0;
    double r_star = 0.0; // smallest firing grid radius (NaN if none <= cap)
    double r1 = 0.0, r2 = 0.0;
    double mass = 0.0, energy = 0.0, margin = 0.0;
    bool found = false;
};

struct RnEstimate {
    int n = 0;
    double step = 0.0;
    double cap = 0.0;
    std::vector<RnEntry> entries; // k = 0..n
    double r_n_hat = 0.0;         // max over k of r_star
    bool all_found = false;

    std::string to_csv(const std::string& config_comment = "") const;
};

/// Smallest grid radius at which the certificate fires on B_R of each
/// generalized cylinder, r1 fixed at sqrt(4+2n), r2 on the step grid.
RnEstimate estimate_Rn(int n, double step, double cap = 20.0);

} // namespace shrinkerlab
