#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include "shrinkerlab/catalog.hpp"

#include <Eigen/Dense>
#include <functional>

namespace shrinkerlab::testing {

/// Finite-difference drift Laplacian of a scalar f(x) restricted to the
/// catalog shape: L f = Delta_S f - <x^T, grad_S f>/2, evaluated through the
/// geodesic normal chart (second-order differences, step delta).
inline double fd_drift_laplacian(const GeneralizedCylinder& shape,
                                 const Eigen::VectorXd& p,
                                 const std::function<double(const Eigen::VectorXd&)>& f,
                                 double delta = 1e-4) {
    const CylinderChart chart = make_chart(shape, p);
    const DifferentialData dd = shape.differential_data(p);
    const int n = shape.n();
    const int k = shape.k();
    const Eigen::VectorXd x_t_can = shape.to_canonical(dd.x_tangent);

    double laplacian = 0.0, drift = 0.0;
    const double f0 = f(p);
    for (int a = 0; a < n; ++a) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n - k);
        Eigen::VectorXd dir_can = Eigen::VectorXd::Zero(shape.ambient());
        if (a < k) {
            u(a) = delta;
            dir_can.head(k + 1) = chart.sphere_tangent.col(a);
        } else {
            z(a - k) = delta;
            dir_can(k + 1 + (a - k)) = 1.0;
        }
        const double fp = f(chart.point(u, z));
        const double fm = f(chart.point(-u, -z));
        laplacian += (fp - 2.0 * f0 + fm) / (delta * delta);
        drift += (fp - fm) / (2.0 * delta) * x_t_can.dot(dir_can);
    }
    return laplacian - 0.5 * drift;
}

} // namespace shrinkerlab::testing
