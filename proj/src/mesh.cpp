#include "shrinkerlab/mesh.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace shrinkerlab {

double DiscreteHypersurface::simplex_volume(int s) const {
    if (n == 1) {
        return (vertices.col(simplices(1, s)) - vertices.col(simplices(0, s))).norm();
    }
    const Eigen::VectorXd a = vertices.col(simplices(0, s));
    const Eigen::VectorXd e1 = vertices.col(simplices(1, s)) - a;
    const Eigen::VectorXd e2 = vertices.col(simplices(2, s)) - a;
    const double g11 = e1.squaredNorm(), g22 = e2.squaredNorm(), g12 = e1.dot(e2);
    return 0.5 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
}

Eigen::VectorXd DiscreteHypersurface::simplex_barycenter(int s) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ambient);
    for (int j = 0; j <= n; ++j) b += vertices.col(simplices(j, s));
    return b / (n + 1);
}

double DiscreteHypersurface::max_edge_length() const {
    double m = 0.0;
    for (int s = 0; s < n_simplices(); ++s)
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                m = std::max(m, (vertices.col(simplices(i, s)) -
                                 vertices.col(simplices(j, s))).norm());
    return m;
}

std::vector<int> DiscreteHypersurface::facet_vertices(int facet_id) const {
    const int s = facet_id / (n + 1);
    const int j = facet_id % (n + 1);
    std::vector<int> vs;
    for (int i = 0; i <= n; ++i)
        if (i != j) vs.push_back(simplices(i, s));
    return vs;
}

std::vector<char> DiscreteHypersurface::boundary_vertex_mask() const {
    std::vector<char> mask(n_vertices(), 0);
    for (int f : boundary_facets)
        for (int v : facet_vertices(f)) mask[v] = 1;
    return mask;
}

int DiscreteHypersurface::euler_characteristic() const {
    require(n == 2, "dimension-mismatch", "Euler characteristic needs n = 2");
    std::set<std::pair<int, int>> edges;
    for (int s = 0; s < n_simplices(); ++s)
        for (int i = 0; i < 3; ++i) {
            int a = simplices(i, s), b = simplices((i + 1) % 3, s);
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
    return n_vertices() - static_cast<int>(edges.size()) + n_simplices();
}

void DiscreteHypersurface::quadrature(int s, std::vector<QuadraturePoint>& out) const {
    out.clear();
    const double vol = simplex_volume(s);
    if (quad_rule == QuadratureRule::Barycenter) {
        QuadraturePoint q;
        q.x = simplex_barycenter(s);
        q.weight = vol;
        q.barycentric = Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
        out.push_back(std::move(q));
        return;
    }
    if (n == 1) {
        // two-point Gauss on the segment
        const Eigen::VectorXd a = vertices.col(simplices(0, s));
        const Eigen::VectorXd b = vertices.col(simplices(1, s));
        const double t0 = 0.5 - 0.5 / std::sqrt(3.0), t1 = 0.5 + 0.5 / std::sqrt(3.0);
        for (double t : {t0, t1}) {
            QuadraturePoint q;
            q.x = (1.0 - t) * a + t * b;
            q.weight = 0.5 * vol;
            q.barycentric = Eigen::Vector2d(1.0 - t, t);
            out.push_back(std::move(q));
        }
        return;
    }
    // edge-midpoint rule on the triangle (degree 2)
    const Eigen::VectorXd v0 = vertices.col(simplices(0, s));
    const Eigen::VectorXd v1 = vertices.col(simplices(1, s));
    const Eigen::VectorXd v2 = vertices.col(simplices(2, s));
    const Eigen::Vector3d barys[3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (const auto& b : barys) {
        QuadraturePoint q;
        q.x = b(0) * v0 + b(1) * v1 + b(2) * v2;
        q.weight = vol / 3.0;
        q.barycentric = b;
        out.push_back(std::move(q));
    }
}

void p1_gradients(const DiscreteHypersurface& mesh, int s,
                  std::vector<Eigen::VectorXd>& grads) {
    grads.clear();
    if (mesh.n == 1) {
        const Eigen::VectorXd a = mesh.vertices.col(mesh.simplices(0, s));
        const Eigen::VectorXd b = mesh.vertices.col(mesh.simplices(1, s));
        const Eigen::VectorXd d = b - a;
        const double l2 = d.squaredNorm();
        grads.push_back(-d / l2);
        grads.push_back(d / l2);
        return;
    }
    const Eigen::VectorXd v0 = mesh.vertices.col(mesh.simplices(0, s));
    const Eigen::VectorXd v1 = mesh.vertices.col(mesh.simplices(1, s));
    const Eigen::VectorXd v2 = mesh.vertices.col(mesh.simplices(2, s));
    Eigen::MatrixXd E(v0.size(), 2);
    E.col(0) = v1 - v0;
    E.col(1) = v2 - v0;
    const Eigen::Matrix2d G = E.transpose() * E;
    const Eigen::MatrixXd D = E * G.inverse(); // dual basis of the edge frame
    grads.resize(3, Eigen::VectorXd::Zero(v0.size()));
    grads[1] = D.col(0);
    grads[2] = D.col(1);
    grads[0] = -grads[1] - grads[2];
}

std::vector<int> topological_boundary(const DiscreteHypersurface& mesh) {
    // map sorted facet vertices -> incident facet ids
    std::map<std::vector<int>, std::vector<int>> incidence;
    for (int s = 0; s < mesh.n_simplices(); ++s)
        for (int j = 0; j <= mesh.n; ++j) {
            const int fid = s * (mesh.n + 1) + j;
            std::vector<int> key = mesh.facet_vertices(fid);
            std::sort(key.begin(), key.end());
            incidence[key].push_back(fid);
        }
    std::vector<int> boundary;
    for (const auto& [key, fids] : incidence)
        if (fids.size() == 1) boundary.push_back(fids[0]);
    std::sort(boundary.begin(), boundary.end());
    return boundary;
}

std::vector<std::string> DiscreteHypersurface::validate() const {
    std::vector<std::string> issues;
    if (n != 1 && n != 2) {
        issues.push_back("unsupported intrinsic dimension " + std::to_string(n));
        return issues;
    }
    if (ambient != n + 1)
        issues.push_back("ambient dimension must be n + 1 for meshes");
    for (int s = 0; s < n_simplices(); ++s) {
        double diam = 0.0;
        for (int i = 0; i <= n; ++i) {
            if (simplices(i, s) < 0 || simplices(i, s) >= n_vertices()) {
                issues.push_back("simplex " + std::to_string(s) + " references vertex out of range");
                return issues;
            }
            for (int j = i + 1; j <= n; ++j)
                diam = std::max(diam, (vertices.col(simplices(i, s)) -
                                       vertices.col(simplices(j, s))).norm());
        }
        if (simplex_volume(s) <= 1e-14 * std::pow(diam, n))
            issues.push_back("degenerate simplex " + std::to_string(s));
    }
    // orientation consistency: interior facets must appear with both parities
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> facets; // key -> (fid, parity)
    for (int s = 0; s < n_simplices(); ++s)
        for (int j = 0; j <= n; ++j) {
            const int fid = s * (n + 1) + j;
            std::vector<int> dir;
            if (n == 1) {
                dir = {simplices(1 - j, s)};
            } else {
                // directed edge of the oriented triangle opposite vertex j
                dir = {simplices((j + 1) % 3, s), simplices((j + 2) % 3, s)};
            }
            std::vector<int> key = dir;
            std::sort(key.begin(), key.end());
            int parity;
            if (n == 1) {
                parity = (j == 0) ? +1 : -1; // facet {v1} is the head
            } else {
                parity = (dir == key) ? +1 : -1;
            }
            facets[key].push_back({fid, parity});
        }
    std::set<int> bset(boundary_facets.begin(), boundary_facets.end());
    for (const auto& [key, inc] : facets) {
        if (inc.size() > 2) {
            issues.push_back("non-manifold facet");
        } else if (inc.size() == 2) {
            if (inc[0].second == inc[1].second)
                issues.push_back("inconsistent orientation at a shared facet");
        } else if (!bset.count(inc[0].first)) {
            issues.push_back("unflagged boundary facet " + std::to_string(inc[0].first));
        }
    }
    for (int f : bset) {
        if (f < 0 || f >= n_simplices() * (n + 1)) {
            issues.push_back("boundary facet id out of range");
            continue;
        }
        std::vector<int> key = facet_vertices(f);
        std::sort(key.begin(), key.end());
        if (facets[key].size() != 1)
            issues.push_back("flagged facet is interior: " + std::to_string(f));
    }
    // boundary facets must sit on the construction sphere when R is known
    if (construction_radius > 0.0 && target_h > 0.0) {
        for (int f : boundary_facets)
            for (int v : facet_vertices(f)) {
                const double r = vertices.col(v).norm();
                if (r < construction_radius - target_h - 1e-9 ||
                    r > construction_radius + 1e-9)
                    issues.push_back("boundary vertex off the construction sphere");
            }
    }
    return issues;
}

namespace {

DiscreteHypersurface make_line(const GeneralizedCylinder& shape, double R, double h) {
    const int m = std::max(2, static_cast<int>(std::ceil(2.0 * R / h)));
    DiscreteHypersurface mesh;
    mesh.n = 1;
    mesh.ambient = 2;
    mesh.vertices.resize(2, m + 1);
    Eigen::VectorXd t(2);
    for (int i = 0; i <= m; ++i) {
        t << 0.0, -R + 2.0 * R * i / m;
        mesh.vertices.col(i) = shape.from_canonical(t);
    }
    mesh.simplices.resize(2, m);
    for (int i = 0; i < m; ++i) mesh.simplices.col(i) << i, i + 1;
    return mesh;
}

DiscreteHypersurface make_circle(const GeneralizedCylinder& shape, double h) {
    const double r = shape.sphere_radius();
    const int c = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
    DiscreteHypersurface mesh;
    mesh.n = 1;
    mesh.ambient = 2;
    mesh.vertices.resize(2, c);
    Eigen::VectorXd y(2);
    for (int i = 0; i < c; ++i) {
        const double th = 2.0 * std::numbers::pi * i / c;
        y << r * std::cos(th), r * std::sin(th);
        mesh.vertices.col(i) = shape.from_canonical(y);
    }
    mesh.simplices.resize(2, c);
    for (int i = 0; i < c; ++i) mesh.simplices.col(i) << i, (i + 1) % c;
    return mesh;
}

// Triangulate the annulus between two vertex rings (sorted by angle) by
// merging the two angle sequences; A is the inner ring.
void stitch_rings(const std::vector<int>& ring_a, const std::vector<double>& ang_a,
                  const std::vector<int>& ring_b, const std::vector<double>& ang_b,
                  std::vector<Eigen::Vector3i>& tris) {
    const int ca = static_cast<int>(ring_a.size());
    const int cb = static_cast<int>(ring_b.size());
    const double two_pi = 2.0 * std::numbers::pi;
    // start B at the index whose angle is closest above ang_a[0]
    int j0 = 0;
    double best = 1e300;
    for (int j = 0; j < cb; ++j) {
        double d = std::fmod(ang_b[j] - ang_a[0] + 2.0 * two_pi, two_pi);
        if (d < best) {
            best = d;
            j0 = j;
        }
    }
    auto a_ang = [&](int i) { return ang_a[0] + (i < ca ? std::fmod(ang_a[i % ca] - ang_a[0] + two_pi, two_pi) : two_pi); };
    auto b_ang = [&](int j) { return ang_a[0] + best + (j < cb ? std::fmod(ang_b[(j0 + j) % cb] - ang_b[j0] + two_pi, two_pi) : two_pi); };
    int i = 0, j = 0;
    while (i < ca || j < cb) {
        const bool advance_a =
            (j == cb) || (i < ca && a_ang(i + 1) <= b_ang(j + 1));
        if (advance_a) {
            tris.emplace_back(ring_a[i % ca], ring_b[(j0 + j) % cb], ring_a[(i + 1) % ca]);
            ++i;
        } else {
            tris.emplace_back(ring_b[(j0 + j) % cb], ring_b[(j0 + j + 1) % cb], ring_a[i % ca]);
            ++j;
        }
    }
}

DiscreteHypersurface make_disk(const GeneralizedCylinder& shape, double R, double h) {
    const int m = std::max(2, static_cast<int>(std::ceil(R / (0.95 * h))));
    const double dr = R / m;
    std::vector<Eigen::Vector2d> pts2d;
    std::vector<std::vector<int>> rings(m + 1);
    std::vector<std::vector<double>> angles(m + 1);
    pts2d.emplace_back(0.0, 0.0);
    rings[0] = {0};
    angles[0] = {0.0};
    for (int jr = 1; jr <= m; ++jr) {
        const double r = jr * dr;
        const int c = std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / (0.8 * h))));
        const double off = (jr % 2) * std::numbers::pi / c;
        for (int i = 0; i < c; ++i) {
            const double th = off + 2.0 * std::numbers::pi * i / c;
            rings[jr].push_back(static_cast<int>(pts2d.size()));
            angles[jr].push_back(th);
            pts2d.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    std::vector<Eigen::Vector3i> tris;
    // center fan
    const auto& r1 = rings[1];
    for (std::size_t i = 0; i < r1.size(); ++i)
        tris.emplace_back(0, r1[i], r1[(i + 1) % r1.size()]);
    for (int jr = 1; jr < m; ++jr)
        stitch_rings(rings[jr], angles[jr], rings[jr + 1], angles[jr + 1], tris);

    DiscreteHypersurface mesh;
    mesh.n = 2;
    mesh.ambient = 3;
    mesh.vertices.resize(3, static_cast<int>(pts2d.size()));
    Eigen::VectorXd xi(3);
    for (std::size_t i = 0; i < pts2d.size(); ++i) {
        xi << 0.0, pts2d[i].x(), pts2d[i].y();
        mesh.vertices.col(static_cast<int>(i)) = shape.from_canonical(xi);
    }
    mesh.simplices.resize(3, static_cast<int>(tris.size()));
    for (std::size_t t = 0; t < tris.size(); ++t) mesh.simplices.col(static_cast<int>(t)) = tris[t];
    return mesh;
}

DiscreteHypersurface make_tube(const GeneralizedCylinder& shape, double R, double h) {
    const double r = shape.sphere_radius();
    const double L = std::sqrt(R * R - r * r);
    const int mz = std::max(2, static_cast<int>(std::ceil(2.0 * L / (0.95 * h))));
    const int c = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / (0.95 * h))));
    DiscreteHypersurface mesh;
    mesh.n = 2;
    mesh.ambient = 3;
    mesh.vertices.resize(3, (mz + 1) * c);
    Eigen::VectorXd xi(3);
    for (int i = 0; i <= mz; ++i) {
        const double z = -L + 2.0 * L * i / mz;
        for (int s = 0; s < c; ++s) {
            const double th = 2.0 * std::numbers::pi * s / c;
            xi << r * std::cos(th), r * std::sin(th), z;
            mesh.vertices.col(i * c + s) = shape.from_canonical(xi);
        }
    }
    mesh.simplices.resize(3, 2 * mz * c);
    int t = 0;
    for (int i = 0; i < mz; ++i)
        for (int s = 0; s < c; ++s) {
            const int a = i * c + s, b = i * c + (s + 1) % c;
            const int d = (i + 1) * c + s, e = (i + 1) * c + (s + 1) % c;
            mesh.simplices.col(t++) << a, b, d;
            mesh.simplices.col(t++) << b, e, d;
        }
    return mesh;
}

DiscreteHypersurface make_icosphere(const GeneralizedCylinder& shape, double h) {
    const double r = shape.sphere_radius();
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v = r * v.normalized();
    std::vector<Eigen::Vector3i> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    auto max_edge = [&]() {
        double m = 0.0;
        for (const auto& f : faces)
            for (int i = 0; i < 3; ++i)
                m = std::max(m, (verts[f[i]] - verts[f[(i + 1) % 3]]).norm());
        return m;
    };
    while (max_edge() > 1.4 * h) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const Eigen::Vector3d p = r * (0.5 * (verts[a] + verts[b])).normalized();
            verts.push_back(p);
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<Eigen::Vector3i> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    DiscreteHypersurface mesh;
    mesh.n = 2;
    mesh.ambient = 3;
    mesh.vertices.resize(3, static_cast<int>(verts.size()));
    Eigen::VectorXd xi(3);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        xi = verts[i];
        mesh.vertices.col(static_cast<int>(i)) = shape.from_canonical(xi);
    }
    mesh.simplices.resize(3, static_cast<int>(faces.size()));
    for (std::size_t t = 0; t < faces.size(); ++t)
        mesh.simplices.col(static_cast<int>(t)) = faces[t];
    return mesh;
}

} // namespace

DiscreteHypersurface build_mesh(const GeneralizedCylinder& shape, double R, double h) {
    require(shape.n() == 1 || shape.n() == 2, "unsupported-dimension",
            "meshes are built for n in {1, 2}; use the analytic path for n >= 3");
    require(h > 0.0, "bad-argument", "target edge length must be positive");
    require(R > shape.sphere_radius(), "R-too-small", "ball misses the shape");
    require(shape.ambient() == shape.n() + 1, "dimension-mismatch",
            "meshes need codimension one");

    DiscreteHypersurface mesh;
    if (shape.n() == 1) {
        mesh = (shape.k() == 0) ? make_line(shape, R, h) : make_circle(shape, h);
    } else if (shape.k() == 0) {
        mesh = make_disk(shape, R, h);
    } else if (shape.k() == 1) {
        mesh = make_tube(shape, R, h);
    } else {
        mesh = make_icosphere(shape, h);
    }
    mesh.analytic_source = shape;
    mesh.target_h = h;
    mesh.construction_radius = R;
    mesh.boundary_facets = topological_boundary(mesh);
    return mesh;
}

} // namespace shrinkerlab
