#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace shrinkerlab {

/// Surface area of the unit k-sphere S^k in R^{k+1}.
double unit_sphere_area(int k);

/// Volume of the unit m-ball; ball_volume(m, r) = c_m r^m, c_0 = 1.
double ball_volume(int m, double r);

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Same, splitting at interior breakpoints first (kinks of the integrand).
double integrate_with_breaks(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breaks,
                             double tol = 1e-12);

/// Gauss-Legendre nodes/weights on [-1, 1] for npts in {1..5, 8, 16}.
void gauss_legendre(int npts, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Quadrature on the unit sphere S^dim in R^{dim+1} (product rule); weights
/// sum to the sphere area.  `resolution` controls the azimuthal count.
void sphere_quadrature(int dim, int resolution,
                       std::vector<Eigen::VectorXd>& points,
                       std::vector<double>& weights);

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, signs fixed).
Eigen::MatrixXd random_orthogonal(int dim, std::mt19937_64& rng);

/// 2D rotation by angle theta.
Eigen::MatrixXd rotation2d(double theta);

/// Rotation in the (i, j) coordinate plane of an N x N identity.
Eigen::MatrixXd plane_rotation(int dim, int i, int j, double theta);

/// Thread cap from SHRINKERLAB_THREADS (>= 1); defaults to hardware.
int thread_cap();

/// Deterministic parallel loop: [0, count) is split into a fixed number of
/// chunks processed by at most thread_cap() workers.  Results that depend on
/// accumulation order must be merged per chunk by the caller (chunk ids are
/// stable regardless of thread count).
void parallel_for_chunks(std::int64_t count,
                         const std::function<void(std::int64_t begin, std::int64_t end,
                                                  int chunk)>& body,
                         int n_chunks = 64);

} // namespace shrinkerlab
