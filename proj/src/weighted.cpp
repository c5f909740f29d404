#include "shrinkerlab/weighted.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <numbers>

namespace shrinkerlab {

double gaussian_area(const DiscreteHypersurface& mesh) {
    const int S = mesh.n_simplices();
    std::vector<double> partial(64, 0.0);
    parallel_for_chunks(S, [&](std::int64_t b, std::int64_t e, int chunk) {
        std::vector<QuadraturePoint> qpts;
        double acc = 0.0;
        for (std::int64_t s = b; s < e; ++s) {
            mesh.quadrature(static_cast<int>(s), qpts);
            for (const auto& q : qpts)
                acc += q.weight * std::exp(-0.25 * q.x.squaredNorm());
        }
        partial[chunk] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return std::pow(4.0 * std::numbers::pi, -0.5 * mesh.n) * total;
}

WeightedForms assemble_forms(const DiscreteHypersurface& mesh) {
    const DifferentialField f = mesh.analytic_source
                                    ? DifferentialField::from_analytic(mesh)
                                    : DifferentialField::estimate(mesh);
    return assemble_forms(mesh, f);
}

WeightedForms assemble_forms(const DiscreteHypersurface& mesh,
                             const DifferentialField& field) {
    const int V = mesh.n_vertices();
    const int S = mesh.n_simplices();
    WeightedForms forms;
    forms.mesh = &mesh;
    forms.lumped_mass = Eigen::VectorXd::Zero(V);
    forms.potential = Eigen::VectorXd::Zero(V);
    const auto bmask = mesh.boundary_vertex_mask();
    forms.boundary.assign(bmask.begin(), bmask.end());

    constexpr int n_chunks = 64;
    std::vector<std::vector<Eigen::Triplet<double>>> triplets(n_chunks);
    std::vector<Eigen::VectorXd> mass_part(n_chunks, Eigen::VectorXd::Zero(V));
    parallel_for_chunks(S, [&](std::int64_t b, std::int64_t e, int chunk) {
        std::vector<QuadraturePoint> qpts;
        std::vector<Eigen::VectorXd> grads;
        auto& trip = triplets[chunk];
        auto& mass = mass_part[chunk];
        for (std::int64_t s = b; s < e; ++s) {
            const int si = static_cast<int>(s);
            mesh.quadrature(si, qpts);
            p1_gradients(mesh, si, grads);
            double wsum = 0.0;
            for (const auto& q : qpts) {
                const double w = q.weight * std::exp(-0.25 * q.x.squaredNorm());
                wsum += w;
                for (int j = 0; j <= mesh.n; ++j)
                    mass(mesh.simplices(j, si)) += w * q.barycentric(j);
            }
            for (int i = 0; i <= mesh.n; ++i)
                for (int j = 0; j <= mesh.n; ++j)
                    trip.emplace_back(mesh.simplices(i, si), mesh.simplices(j, si),
                                      wsum * grads[i].dot(grads[j]));
        }
    }, n_chunks);

    std::vector<Eigen::Triplet<double>> all;
    std::size_t count = 0;
    for (const auto& t : triplets) count += t.size();
    all.reserve(count);
    for (auto& t : triplets) all.insert(all.end(), t.begin(), t.end());
    forms.stiffness.resize(V, V);
    forms.stiffness.setFromTriplets(all.begin(), all.end());
    for (const auto& m : mass_part) forms.lumped_mass += m;

    for (int v = 0; v < V; ++v) {
        require(forms.lumped_mass(v) > 0.0, "singular-mass",
                "nonpositive lumped mass at vertex " + std::to_string(v));
        forms.potential(v) = (field.valid[v] ? field.norm_A_sq(v) : 0.0) + 0.5;
    }
    return forms;
}

double WeightedForms::inner(const WeightedScalarField& u,
                            const WeightedScalarField& v) const {
    return (lumped_mass.array() * u.array() * v.array()).sum();
}

double WeightedForms::dirichlet(const WeightedScalarField& u,
                                const WeightedScalarField& v) const {
    return u.dot(stiffness * v);
}

double WeightedForms::potential_form(const WeightedScalarField& u,
                                     const WeightedScalarField& v) const {
    return (lumped_mass.array() * potential.array() * u.array() * v.array()).sum();
}

WeightedScalarField apply_weighted_drift_laplacian(const WeightedForms& forms,
                                                   const WeightedScalarField& w) {
    require(w.size() == forms.lumped_mass.size(), "dimension-mismatch",
            "field size");
    return -(forms.stiffness * w).cwiseQuotient(forms.lumped_mass);
}

WeightedScalarField apply_stability_operator(const WeightedForms& forms,
                                             const WeightedScalarField& w) {
    return apply_weighted_drift_laplacian(forms, w) +
           (forms.potential.array() * w.array()).matrix();
}

double rayleigh_quotient(const WeightedForms& forms, const WeightedScalarField& w) {
    require(w.size() == forms.lumped_mass.size(), "dimension-mismatch", "field size");
    for (int v = 0; v < w.size(); ++v)
        require(!forms.boundary[v] || w(v) == 0.0, "precondition-violation",
                "Rayleigh quotient needs a Dirichlet field");
    const double mass = forms.inner(w, w);
    require(mass > 0.0, "zero-field", "field is identically zero");
    return (forms.dirichlet(w, w) - forms.potential_form(w, w)) / mass;
}

SpectralReport lowest_dirichlet_eigenvalue(const WeightedForms& forms,
                                           int max_iterations, double tol) {
    const int V = static_cast<int>(forms.lumped_mass.size());
    std::vector<int> interior;
    for (int v = 0; v < V; ++v)
        if (!forms.boundary[v]) interior.push_back(v);
    const int ni = static_cast<int>(interior.size());
    require(ni > 0, "precondition-violation", "no interior vertex");

    std::vector<int> to_interior(V, -1);
    for (int i = 0; i < ni; ++i) to_interior[interior[i]] = i;

    // A = K - diag(Ml * potential) restricted to interior dofs
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < forms.stiffness.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(forms.stiffness, col); it;
             ++it) {
            const int i = to_interior[it.row()], j = to_interior[it.col()];
            if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
        }
    Eigen::SparseMatrix<double> A(ni, ni);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd M(ni), P(ni);
    for (int i = 0; i < ni; ++i) {
        M(i) = forms.lumped_mass(interior[i]);
        P(i) = forms.lumped_mass(interior[i]) * forms.potential(interior[i]);
    }
    for (int i = 0; i < ni; ++i) A.coeffRef(i, i) -= P(i);
    A.makeCompressed();

    // Gershgorin lower bound for the pencil (A, diag(M))
    double bound = std::numeric_limits<double>::infinity();
    Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(ni);
    for (int col = 0; col < A.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            if (it.row() == it.col()) diag(it.row()) = it.value();
            else row_abs(it.row()) += std::abs(it.value());
        }
    for (int i = 0; i < ni; ++i)
        bound = std::min(bound, (diag(i) - row_abs(i)) / M(i));

    SpectralReport report;
    double shift = bound - 1.0;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(ni);
    w /= std::sqrt((M.array() * w.array().square()).sum());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    // Accept a shift only if A - sigma M is positive definite (all LDLT pivots
    // positive), i.e. sigma stays strictly below the smallest eigenvalue, so
    // inverse iteration always targets lambda_1.
    auto factor = [&](double sigma) {
        Eigen::SparseMatrix<double> B = A;
        for (int i = 0; i < ni; ++i) B.coeffRef(i, i) -= sigma * M(i);
        solver.compute(B);
        return solver.info() == Eigen::Success && solver.vectorD().minCoeff() > 0.0;
    };
    while (!factor(shift)) shift -= std::max(1.0, std::abs(shift));

    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        ++report.iterations;
        Eigen::VectorXd rhs = (M.array() * w.array()).matrix();
        Eigen::VectorXd z = solver.solve(rhs);
        const double znorm = std::sqrt((M.array() * z.array().square()).sum());
        if (!(znorm > 0.0) || !z.allFinite()) break;
        w = z / znorm;
        lambda = w.dot(A * w) / (M.array() * w.array().square()).sum();
        const Eigen::VectorXd resid = A * w - lambda * (M.array() * w.array()).matrix();
        const double rnorm = std::sqrt((resid.array().square() / M.array()).sum());
        report.residual = rnorm; // ||w||_M = 1
        if (rnorm <= tol) {
            report.converged = true;
            break;
        }
        // Rayleigh-quotient shift update once the iterate has settled; the
        // inertia check above rejects any overshoot past lambda_1.
        if (rnorm < 1e-2) {
            double target = lambda - std::max(1e-10, 1e-8 * std::abs(lambda));
            int attempts = 0;
            const double last_good = shift;
            while (target > last_good && !factor(target) && attempts++ < 20)
                target = 0.5 * (target + last_good);
            if (target > last_good && attempts <= 20) {
                shift = target;
            } else {
                factor(shift); // restore the last good factorization
            }
        }
    }
    report.lambda = lambda;
    report.eigenfield = Eigen::VectorXd::Zero(V);
    for (int i = 0; i < ni; ++i) report.eigenfield(interior[i]) = w(i);
    return report;
}

} // namespace shrinkerlab
