#include "shrinkerlab/certificates.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/io.hpp"
#include "shrinkerlab/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace shrinkerlab {

double radial_cutoff_value(double xnorm, double r2) {
    if (xnorm <= r2 - 1.0) return 1.0;
    if (xnorm >= r2) return 0.0;
    return r2 - xnorm;
}

WeightedScalarField radial_cutoff(const DiscreteHypersurface& mesh, double r2) {
    require(r2 > 1.0, "r2-out-of-range", "need r2 > 1");
    if (mesh.construction_radius > 0.0)
        require(r2 <= mesh.construction_radius + 1e-12, "r2-out-of-range",
                "r2 beyond the construction ball");
    WeightedScalarField eta(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        eta(v) = radial_cutoff_value(mesh.vertex(v).norm(), r2);
    return eta;
}

namespace {

void check_radii(int n, double r1, double r2) {
    const double r_min = std::sqrt(4.0 + 2.0 * n);
    require(r1 >= r_min - 1e-12, "precondition-violation",
            "need r1 >= sqrt(4+2n) = " + std::to_string(r_min));
    require(r2 > r1 + 1.0, "precondition-violation", "need r2 > r1 + 1 (strictly)");
}

} // namespace

InstabilityCertificate certify_instability(const DiscreteHypersurface& mesh,
                                           const WeightedForms& forms, double r1,
                                           double r2, const SingularSetProxy* proxy) {
    check_radii(mesh.n, r1, r2);
    if (mesh.construction_radius > 0.0)
        require(r2 <= mesh.construction_radius + 1e-12, "precondition-violation",
                "r2 beyond the construction ball");

    InstabilityCertificate cert;
    cert.r1 = r1;
    cert.r2 = r2;
    WeightedScalarField w = radial_cutoff(mesh, r2);
    if (proxy && proxy->size() > 0) {
        const CutoffFunction phi = build_cutoff(mesh, *proxy, mesh.construction_radius);
        w = w.cwiseProduct(phi.values);
    }
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (forms.boundary[v]) w(v) = 0.0;
    cert.field = w;
    cert.mass = forms.inner(w, w);
    cert.energy = forms.dirichlet(w, w);
    cert.margin = cert.mass - 2.0 * cert.energy;
    cert.fires = cert.margin > 0.0;
    return cert;
}

InstabilityCertificate certify_instability_analytic(const GeneralizedCylinder& shape,
                                                    double r1, double r2,
                                                    const SingularSetProxy* proxy) {
    const int n = shape.n();
    const int k = shape.k();
    const int m = n - k;
    check_radii(n, r1, r2);

    InstabilityCertificate cert;
    cert.r1 = r1;
    cert.r2 = r2;

    const double prefactor = shape.sphere_factor_area() * std::exp(-0.5 * k);
    double mass_eta = 0.0, energy_eta = 0.0;
    if (m == 0) {
        const double eta = radial_cutoff_value(shape.sphere_radius(), r2);
        mass_eta = prefactor * eta * eta;
        energy_eta = 0.0; // eta is radial and |x^T| = 0 on the closed sphere
    } else {
        const double s2 = std::sqrt(std::max(0.0, r2 * r2 - 2.0 * k));
        const double band = (r2 - 1.0) * (r2 - 1.0) - 2.0 * k;
        std::vector<double> breaks;
        if (band > 0.0) breaks.push_back(std::sqrt(band));
        const double omega = unit_sphere_area(m - 1);
        mass_eta = prefactor * omega *
                   integrate_with_breaks(
                       [&](double t) {
                           const double l = std::sqrt(2.0 * k + t * t);
                           const double eta = radial_cutoff_value(l, r2);
                           return eta * eta * std::pow(t, m - 1) *
                                  std::exp(-0.25 * t * t);
                       },
                       0.0, s2, breaks, 1e-12);
        // |grad eta|^2 = eta'(|x|)^2 |x^T|^2/|x|^2 with |x^T| = t on the shape
        energy_eta = prefactor * omega *
                     integrate_with_breaks(
                         [&](double t) {
                             const double l2 = 2.0 * k + t * t;
                             const double l = std::sqrt(l2);
                             if (l <= r2 - 1.0 || l >= r2) return 0.0;
                             return (t * t / l2) * std::pow(t, m - 1) *
                                    std::exp(-0.25 * t * t);
                         },
                         0.0, s2, breaks, 1e-12);
    }

    double mass = mass_eta, energy = energy_eta;
    if (proxy && proxy->size() > 0) {
        const double rho = proxy->rho;
        Eigen::MatrixXd s_can(shape.ambient(), proxy->size());
        for (int i = 0; i < proxy->size(); ++i)
            s_can.col(i) = shape.to_canonical(proxy->points.col(i));
        // w = eta phi: corrections supported in the bands of S
        for_each_band_point(
            shape, *proxy, 96, 64,
            [&](const Eigen::VectorXd& x, double d, int near, double vol) {
                const double weight = std::exp(-0.25 * x.squaredNorm());
                const double xn = x.norm();
                const double eta = radial_cutoff_value(xn, r2);
                const double phi = d <= rho ? 0.0 : (d >= 2.0 * rho ? 1.0 : d / rho - 1.0);
                mass -= vol * weight * eta * eta * (1.0 - phi * phi);
                const bool eta_band = xn > r2 - 1.0 && xn < r2;
                const bool phi_band = d > rho && d < 2.0 * rho;
                Eigen::VectorXd grad_eta = Eigen::VectorXd::Zero(x.size());
                if (eta_band)
                    grad_eta = -tangential_part_canonical(shape, x, x / xn);
                Eigen::VectorXd grad_phi = Eigen::VectorXd::Zero(x.size());
                if (phi_band)
                    grad_phi =
                        tangential_part_canonical(shape, x, (x - s_can.col(near)) / d) / rho;
                // energy of eta phi minus the pure-eta energy over the band
                const Eigen::VectorXd grad_w = phi * grad_eta + eta * grad_phi;
                energy += vol * weight * (grad_w.squaredNorm() - grad_eta.squaredNorm());
            });
    }
    cert.mass = mass;
    cert.energy = energy;
    cert.margin = mass - 2.0 * energy;
    cert.fires = cert.margin > 0.0;
    return cert;
}

double volume_comparison_gap(const GeneralizedCylinder& shape, double r1, double r2) {
    const double lhs = std::exp(-0.25 * r1 * r1) * shape.ball_volume_profile(r1);
    const double rhs =
        4.0 * std::exp(-0.25 * (r2 - 1.0) * (r2 - 1.0)) * shape.ball_volume_profile(r2);
    return lhs - rhs;
}

std::string RnEstimate::to_csv(const std::string& config_comment) const {
    std::ostringstream out;
    if (!config_comment.empty()) out << "# " << config_comment << '\n';
    out << "n,k,Rstar,r1,r2,mass,energy,margin\n";
    for (const auto& e : entries)
        out << n << ',' << e.k << ',' << format_double(e.r_star) << ','
            << format_double(e.r1) << ',' << format_double(e.r2) << ','
            << format_double(e.mass) << ',' << format_double(e.energy) << ','
            << format_double(e.margin) << '\n';
    return out.str();
}

RnEstimate estimate_Rn(int n, double step, double cap) {
    require(n >= 1, "bad-argument", "need n >= 1");
    require(step > 0.0 && step <= 0.25, "bad-argument", "need grid step <= 0.25");
    RnEstimate est;
    est.n = n;
    est.step = step;
    est.cap = cap;
    est.entries.resize(n + 1);
    est.all_found = true;
    const double r1 = std::sqrt(4.0 + 2.0 * n);
    for (int k = 0; k <= n; ++k) {
        RnEntry& entry = est.entries[k];
        entry.k = k;
        entry.r1 = r1;
        entry.r_star = std::numeric_limits<double>::quiet_NaN();
        const auto shape = GeneralizedCylinder::canonical(n, k);
        // first admissible grid radius strictly above r1 + 1
        int j = static_cast<int>(std::floor((r1 + 1.0) / step)) + 1;
        for (; j * step <= cap + 1e-12; ++j) {
            const double r2 = j * step;
            if (r2 <= r1 + 1.0) continue;
            const InstabilityCertificate cert =
                certify_instability_analytic(shape, r1, r2);
            if (cert.fires) {
                entry.found = true;
                entry.r_star = r2;
                entry.r2 = r2;
                entry.mass = cert.mass;
                entry.energy = cert.energy;
                entry.margin = cert.margin;
                break;
            }
        }
        if (!entry.found) est.all_found = false;
    }
    est.r_n_hat = 0.0;
    for (const auto& e : est.entries)
        if (e.found) est.r_n_hat = std::max(est.r_n_hat, e.r_star);
    return est;
}

} // namespace shrinkerlab
