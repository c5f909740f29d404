#include "shrinkerlab/numerics.hpp"

#include "shrinkerlab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace shrinkerlab {

double unit_sphere_area(int k) {
    require(k >= 0, "bad-argument", "sphere index must be nonnegative");
    const double pi = std::numbers::pi;
    // omega_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
    return 2.0 * std::pow(pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

double ball_volume(int m, double r) {
    require(m >= 0, "bad-argument", "ball dimension must be nonnegative");
    if (m == 0) return 1.0;
    const double pi = std::numbers::pi;
    return std::pow(pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0) * std::pow(r, m);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return adaptive(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double integrate_with_breaks(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breaks, double tol) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = std::clamp(breaks[i], a, b);
        const double hi = std::clamp(breaks[i + 1], a, b);
        if (hi > lo) total += integrate(f, lo, hi, tol);
    }
    return total;
}

void gauss_legendre(int npts, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.clear();
    weights.clear();
    switch (npts) {
    case 1:
        nodes = {0.0};
        weights = {2.0};
        return;
    case 2:
        nodes = {-0.5773502691896257645, 0.5773502691896257645};
        weights = {1.0, 1.0};
        return;
    case 3:
        nodes = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
        weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        return;
    case 4:
        nodes = {-0.8611363115940525752, -0.3399810435848562648,
                 0.3399810435848562648, 0.8611363115940525752};
        weights = {0.3478548451374538574, 0.6521451548625461426,
                   0.6521451548625461426, 0.3478548451374538574};
        return;
    case 5:
        nodes = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                 0.5384693101056830910, 0.9061798459386639928};
        weights = {0.2369268850561890875, 0.4786286704993664680,
                   0.5688888888888888889, 0.4786286704993664680,
                   0.2369268850561890875};
        return;
    default:
        break;
    }
    // Newton iteration on Legendre polynomials for other orders.
    require(npts > 0, "bad-argument", "quadrature order must be positive");
    const double pi = std::numbers::pi;
    nodes.resize(npts);
    weights.resize(npts);
    for (int i = 0; i < npts; ++i) {
        double x = std::cos(pi * (i + 0.75) / (npts + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= npts; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = npts * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= npts; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = npts * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    std::sort(nodes.begin(), nodes.end());
}

void sphere_quadrature(int dim, int resolution,
                       std::vector<Eigen::VectorXd>& points,
                       std::vector<double>& weights) {
    points.clear();
    weights.clear();
    const double pi = std::numbers::pi;
    if (dim == 0) {
        Eigen::VectorXd p(1);
        p << 1.0;
        points.push_back(p);
        p << -1.0;
        points.push_back(p);
        weights = {1.0, 1.0};
        return;
    }
    if (dim == 1) {
        const int m = std::max(4, resolution);
        for (int i = 0; i < m; ++i) {
            const double th = 2.0 * pi * i / m;
            Eigen::VectorXd p(2);
            p << std::cos(th), std::sin(th);
            points.push_back(p);
            weights.push_back(2.0 * pi / m);
        }
        return;
    }
    // polar Gauss-Legendre in cos(theta) times a sub-sphere rule
    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(std::max(4, resolution / 2), gl_nodes, gl_weights);
    std::vector<Eigen::VectorXd> sub_p;
    std::vector<double> sub_w;
    sphere_quadrature(dim - 1, resolution, sub_p, sub_w);
    for (std::size_t a = 0; a < gl_nodes.size(); ++a) {
        const double c = gl_nodes[a];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double jac = std::pow(1.0 - c * c, 0.5 * (dim - 2));
        for (std::size_t b = 0; b < sub_p.size(); ++b) {
            Eigen::VectorXd p(dim + 1);
            p(0) = c;
            p.tail(dim) = s * sub_p[b];
            points.push_back(p);
            weights.push_back(gl_weights[a] * jac * sub_w[b]);
        }
    }
}

Eigen::MatrixXd random_orthogonal(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

Eigen::MatrixXd rotation2d(double theta) {
    Eigen::MatrixXd r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

Eigen::MatrixXd plane_rotation(int dim, int i, int j, double theta) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim, dim);
    r(i, i) = std::cos(theta);
    r(j, j) = std::cos(theta);
    r(i, j) = -std::sin(theta);
    r(j, i) = std::sin(theta);
    return r;
}

int thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("SHRINKERLAB_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) cap = std::min(cap, requested);
    }
    return cap;
}

void parallel_for_chunks(std::int64_t count,
                         const std::function<void(std::int64_t, std::int64_t, int)>& body,
                         int n_chunks) {
    if (count <= 0) return;
    n_chunks = static_cast<int>(std::min<std::int64_t>(n_chunks, count));
    const std::int64_t per = (count + n_chunks - 1) / n_chunks;
    const int workers = std::min(thread_cap(), n_chunks);
    if (workers <= 1) {
        for (int c = 0; c < n_chunks; ++c) {
            const std::int64_t b = c * per;
            const std::int64_t e = std::min<std::int64_t>(count, b + per);
            if (b < e) body(b, e, c);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int c = next.fetch_add(1);
                if (c >= n_chunks) return;
                const std::int64_t b = c * per;
                const std::int64_t e = std::min<std::int64_t>(count, b + per);
                if (b < e) body(b, e, c);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace shrinkerlab
