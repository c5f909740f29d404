#include "shrinkerlab/growth.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/io.hpp"
#include "shrinkerlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace shrinkerlab {

std::string GrowthProfile::to_csv(const std::string& config_comment) const {
    std::ostringstream out;
    if (!config_comment.empty()) out << "# " << config_comment << '\n';
    out << "r,V,T,regular\n";
    for (int i = 0; i < radii.size(); ++i)
        out << format_double(radii(i)) << ',' << format_double(volume(i)) << ','
            << format_double(curvature(i)) << ',' << int(regular[i]) << '\n';
    return out.str();
}

double segment_ball_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           double r) {
    const Eigen::VectorXd d = b - a;
    const double dd = d.squaredNorm();
    if (dd == 0.0) return 0.0;
    // |a + t d|^2 = r^2
    const double pb = a.dot(d) / dd;
    const double pc = (a.squaredNorm() - r * r) / dd;
    const double disc = pb * pb - pc;
    if (disc <= 0.0) return 0.0; // entirely outside (or tangent)
    const double s = std::sqrt(disc);
    const double t0 = std::max(0.0, -pb - s);
    const double t1 = std::min(1.0, -pb + s);
    return t1 > t0 ? (t1 - t0) * std::sqrt(dd) : 0.0;
}

namespace {

// Signed area of triangle(0, p, q) cap disk(0, r) in 2D.
double origin_triangle_disk(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                            double r) {
    auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
        return u.x() * v.y() - u.y() * v.x();
    };
    const Eigen::Vector2d d = q - p;
    const double dd = d.squaredNorm();
    std::vector<double> ts = {0.0, 1.0};
    if (dd > 0.0) {
        const double pb = p.dot(d) / dd;
        const double pc = (p.squaredNorm() - r * r) / dd;
        const double disc = pb * pb - pc;
        if (disc > 0.0) {
            const double s = std::sqrt(disc);
            for (double t : {-pb - s, -pb + s})
                if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const Eigen::Vector2d xa = p + ts[i] * d;
        const Eigen::Vector2d xb = p + ts[i + 1] * d;
        const Eigen::Vector2d xm = p + 0.5 * (ts[i] + ts[i + 1]) * d;
        if (xm.squaredNorm() <= r * r) {
            area += 0.5 * cross(xa, xb);
        } else {
            const double ang = std::atan2(cross(xa, xb), xa.dot(xb));
            area += 0.5 * r * r * ang;
        }
    }
    return area;
}

} // namespace

double triangle_ball_area(const Eigen::VectorXd& v0, const Eigen::VectorXd& v1,
                          const Eigen::VectorXd& v2, double r) {
    // plane of the triangle and in-plane circle
    const Eigen::VectorXd e1 = v1 - v0, e2 = v2 - v0;
    Eigen::VectorXd nrm = Eigen::VectorXd::Zero(3);
    {
        const Eigen::Vector3d a = e1, b = e2;
        nrm = a.cross(b);
    }
    const double nn = nrm.norm();
    if (nn == 0.0) return 0.0;
    nrm /= nn;
    const double dist = v0.dot(nrm); // signed distance of plane from origin
    if (dist * dist >= r * r) return 0.0;
    const double rc = std::sqrt(r * r - dist * dist);
    const Eigen::VectorXd c0 = dist * nrm; // in-plane circle center
    Eigen::VectorXd t1 = e1.normalized();
    Eigen::VectorXd t2 = nrm;
    {
        const Eigen::Vector3d a = nrm, b = t1;
        t2 = a.cross(b);
    }
    auto to2d = [&](const Eigen::VectorXd& x) {
        return Eigen::Vector2d((x - c0).dot(t1), (x - c0).dot(t2));
    };
    const Eigen::Vector2d a = to2d(v0), b = to2d(v1), c = to2d(v2);
    const double area = origin_triangle_disk(a, b, rc) +
                        origin_triangle_disk(b, c, rc) +
                        origin_triangle_disk(c, a, rc);
    return std::abs(area);
}

namespace {

double clipped_measure(const DiscreteHypersurface& mesh, int s, double r) {
    if (mesh.n == 1)
        return segment_ball_length(mesh.vertices.col(mesh.simplices(0, s)),
                                   mesh.vertices.col(mesh.simplices(1, s)), r);
    return triangle_ball_area(mesh.vertices.col(mesh.simplices(0, s)),
                              mesh.vertices.col(mesh.simplices(1, s)),
                              mesh.vertices.col(mesh.simplices(2, s)), r);
}

double simplex_h2(const DiscreteHypersurface& mesh, const DifferentialField& field,
                  int s) {
    double acc = 0.0;
    int cnt = 0;
    for (int j = 0; j <= mesh.n; ++j) {
        const int v = mesh.simplices(j, s);
        if (field.valid[v]) {
            acc += field.mean_curvature.col(v).squaredNorm();
            ++cnt;
        }
    }
    return cnt ? acc / cnt : 0.0;
}

} // namespace

GrowthProfile growth_profile(const DiscreteHypersurface& mesh,
                             const DifferentialField& field,
                             const Eigen::VectorXd& radii, double regular_band) {
    for (int i = 1; i < radii.size(); ++i)
        require(radii(i) > radii(i - 1), "bad-argument", "radii must increase");
    if (mesh.construction_radius > 0.0)
        require(radii(radii.size() - 1) <= mesh.construction_radius + 1e-12,
                "radius-exceeds-domain", "max radius beyond construction ball");
    if (regular_band < 0.0) regular_band = 0.25 * mesh.target_h;

    GrowthProfile prof;
    prof.n = mesh.n;
    prof.radii = radii;
    prof.volume = Eigen::VectorXd::Zero(radii.size());
    prof.curvature = Eigen::VectorXd::Zero(radii.size());
    prof.regular.assign(radii.size(), 1);

    const int R = static_cast<int>(radii.size());
    std::vector<Eigen::VectorXd> vol_part(64, Eigen::VectorXd::Zero(R));
    std::vector<Eigen::VectorXd> cur_part(64, Eigen::VectorXd::Zero(R));
    parallel_for_chunks(mesh.n_simplices(), [&](std::int64_t b, std::int64_t e, int chunk) {
        for (std::int64_t s = b; s < e; ++s) {
            const double h2 = simplex_h2(mesh, field, static_cast<int>(s));
            for (int i = 0; i < R; ++i) {
                const double m = clipped_measure(mesh, static_cast<int>(s), radii(i));
                vol_part[chunk](i) += m;
                cur_part[chunk](i) += m * h2;
            }
        }
    });
    for (int c = 0; c < 64; ++c) {
        prof.volume += vol_part[c];
        prof.curvature += cur_part[c];
    }

    if (regular_band > 0.0) {
        std::vector<double> norms(mesh.n_vertices());
        for (int v = 0; v < mesh.n_vertices(); ++v) norms[v] = mesh.vertex(v).norm();
        std::sort(norms.begin(), norms.end());
        for (int i = 0; i < R; ++i) {
            auto it = std::lower_bound(norms.begin(), norms.end(), radii(i) - regular_band);
            if (it != norms.end() && *it < radii(i) + regular_band) prof.regular[i] = 0;
        }
    }
    return prof;
}

GrowthProfile growth_profile_analytic(const GeneralizedCylinder& shape,
                                      const Eigen::VectorXd& radii) {
    GrowthProfile prof;
    prof.n = shape.n();
    prof.radii = radii;
    prof.volume.resize(radii.size());
    prof.curvature.resize(radii.size());
    prof.regular.assign(radii.size(), 1);
    for (int i = 0; i < radii.size(); ++i) {
        prof.volume(i) = shape.ball_volume_profile(radii(i));
        prof.curvature(i) = shape.curvature_profile(radii(i));
        prof.regular[i] = shape.regular_radius(radii(i)) ? 1 : 0;
    }
    return prof;
}

namespace {

int grid_index(const GrowthProfile& profile, double r) {
    for (int i = 0; i < profile.radii.size(); ++i)
        if (std::abs(profile.radii(i) - r) <= 1e-9) return i;
    fail("precondition-violation", "radius " + std::to_string(r) + " not on the grid");
}

} // namespace

GrowthCheck check_volume_growth(const GrowthProfile& profile, double r1, double r2,
                                double tol) {
    const double r_min = std::sqrt(4.0 + 2.0 * profile.n);
    require(r1 >= r_min - 1e-12, "precondition-violation",
            "need r1 >= sqrt(4+2n) = " + std::to_string(r_min));
    require(r1 < r2, "precondition-violation", "need r1 < r2");
    const int i1 = grid_index(profile, r1), i2 = grid_index(profile, r2);
    const int n = profile.n;
    GrowthCheck out;
    out.slack = profile.volume(i1) / std::pow(r1, n) -
                (1.0 - 2.0 * n / (r2 * r2)) * profile.volume(i2) / std::pow(r2, n);
    out.pass = out.slack >= -tol;
    return out;
}

std::vector<H2CheckRow> check_H2_bound(const GrowthProfile& profile, double tol) {
    std::vector<H2CheckRow> rows;
    for (int i = 0; i < profile.radii.size(); ++i) {
        H2CheckRow row;
        row.r = profile.radii(i);
        row.regular = profile.regular[i];
        row.excess = profile.curvature(i) - 0.5 * profile.n * profile.volume(i);
        row.pass = !row.regular ||
                   profile.curvature(i) <=
                       (0.5 * profile.n + tol) * profile.volume(i) + 1e-300;
        rows.push_back(row);
    }
    return rows;
}

namespace {

// crossing parameters of edge (a, b) with |x| = r, strictly inside (0,1)
void edge_crossings(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double r,
                    std::vector<double>& ts) {
    ts.clear();
    const Eigen::VectorXd d = b - a;
    const double dd = d.squaredNorm();
    if (dd == 0.0) return;
    const double pb = a.dot(d) / dd;
    const double pc = (a.squaredNorm() - r * r) / dd;
    const double disc = pb * pb - pc;
    if (disc <= 0.0) return;
    const double s = std::sqrt(disc);
    for (double t : {-pb - s, -pb + s})
        if (t > 0.0 && t < 1.0) ts.push_back(t);
}

} // namespace

double slice_integral(const DiscreteHypersurface& mesh, double r,
                      const Eigen::VectorXd& vertex_values) {
    require(vertex_values.size() == mesh.n_vertices(), "dimension-mismatch",
            "per-vertex values");
    double total = 0.0;
    std::vector<double> ts;
    if (mesh.n == 1) {
        for (int s = 0; s < mesh.n_simplices(); ++s) {
            const int ia = mesh.simplices(0, s), ib = mesh.simplices(1, s);
            edge_crossings(mesh.vertices.col(ia), mesh.vertices.col(ib), r, ts);
            for (double t : ts)
                total += (1.0 - t) * vertex_values(ia) + t * vertex_values(ib);
        }
        return total;
    }
    // n = 2: per triangle, pair slice crossings into chords by angle around
    // the in-plane circle center, keeping arcs whose midpoint lies inside.
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        const int iv[3] = {mesh.simplices(0, s), mesh.simplices(1, s), mesh.simplices(2, s)};
        const Eigen::Vector3d v[3] = {mesh.vertices.col(iv[0]), mesh.vertices.col(iv[1]),
                                      mesh.vertices.col(iv[2])};
        struct Crossing {
            Eigen::Vector3d x;
            double value;
            double angle;
        };
        std::vector<Crossing> crossings;
        for (int eidx = 0; eidx < 3; ++eidx) {
            const int a = eidx, b = (eidx + 1) % 3;
            edge_crossings(v[a], v[b], r, ts);
            for (double t : ts) {
                Crossing c;
                c.x = (1.0 - t) * v[a] + t * v[b];
                c.value = (1.0 - t) * vertex_values(iv[a]) + t * vertex_values(iv[b]);
                crossings.push_back(c);
            }
        }
        if (crossings.size() < 2) continue;
        // plane frame centered at the in-plane circle center
        Eigen::Vector3d nrm = (v[1] - v[0]).cross(v[2] - v[0]);
        const double nn = nrm.norm();
        if (nn == 0.0) continue;
        nrm /= nn;
        const Eigen::Vector3d c0 = v[0].dot(nrm) * nrm;
        const Eigen::Vector3d t1 = (v[1] - v[0]).normalized();
        const Eigen::Vector3d t2 = nrm.cross(t1);
        for (auto& c : crossings)
            c.angle = std::atan2((c.x - c0).dot(t2), (c.x - c0).dot(t1));
        std::sort(crossings.begin(), crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.angle < b.angle; });
        const double rc2 = r * r - c0.squaredNorm();
        if (rc2 <= 0.0) continue;
        const double rc = std::sqrt(rc2);
        // min barycentric coordinate: positive strictly inside the triangle
        auto margin = [&](const Eigen::Vector3d& p) {
            const Eigen::Vector2d q((p - v[0]).dot(t1), (p - v[0]).dot(t2));
            const Eigen::Vector2d q1((v[1] - v[0]).dot(t1), (v[1] - v[0]).dot(t2));
            const Eigen::Vector2d q2((v[2] - v[0]).dot(t1), (v[2] - v[0]).dot(t2));
            const double det = q1.x() * q2.y() - q1.y() * q2.x();
            if (det == 0.0) return -1.0;
            const double l1 = (q.x() * q2.y() - q.y() * q2.x()) / det;
            const double l2 = (q1.x() * q.y() - q1.y() * q.x()) / det;
            return std::min({l1, l2, 1.0 - l1 - l2});
        };
        // Consecutive arcs alternate between inside and outside; classify the
        // arc with the clearest margin and alternate from there.
        const std::size_t m = crossings.size();
        std::vector<double> margins(m);
        std::size_t seed = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const Crossing& a = crossings[i];
            const Crossing& b = crossings[(i + 1) % m];
            double mid = 0.5 * (a.angle + b.angle);
            if ((i + 1) % m == 0) mid += std::numbers::pi; // wrap-around arc
            const Eigen::Vector3d pm =
                c0 + rc * (std::cos(mid) * t1 + std::sin(mid) * t2);
            margins[i] = margin(pm);
            if (std::abs(margins[i]) > std::abs(margins[seed])) seed = i;
        }
        bool seed_inside = margins[seed] > 0.0;
        if (m % 2 == 0) {
            for (std::size_t i = 0; i < m; ++i) {
                const bool in = ((i + m - seed) % 2 == 0) ? seed_inside : !seed_inside;
                if (!in) continue;
                const Crossing& a = crossings[i];
                const Crossing& b = crossings[(i + 1) % m];
                total += (b.x - a.x).norm() * 0.5 * (a.value + b.value);
            }
        } else {
            // degenerate crossing count (grazing); fall back to per-arc tests
            for (std::size_t i = 0; i < m; ++i) {
                if (margins[i] <= 0.0) continue;
                const Crossing& a = crossings[i];
                const Crossing& b = crossings[(i + 1) % m];
                total += (b.x - a.x).norm() * 0.5 * (a.value + b.value);
            }
        }
    }
    return total;
}

double divergence_identity_check(const DiscreteHypersurface& mesh,
                                 const DifferentialField& field, double r,
                                 double regular_band) {
    if (regular_band < 0.0) regular_band = 0.25 * mesh.target_h;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        require(std::abs(mesh.vertex(v).norm() - r) >= regular_band,
                "non-regular-radius", "radius passes within the regular band of a vertex");
    Eigen::VectorXd radii(1);
    radii << r;
    const GrowthProfile prof = growth_profile(mesh, field, radii, 0.0);
    const double lhs = 2.0 * mesh.n * prof.volume(0) - 4.0 * prof.curvature(0);
    Eigen::VectorXd xt(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        xt(v) = field.x_tangent.col(v).norm();
    const double rhs = 2.0 * slice_integral(mesh, r, xt);
    const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / denom;
}

double divergence_identity_check_analytic(const GeneralizedCylinder& shape,
                                          double r) {
    require(shape.regular_radius(r), "non-regular-radius", "tangency radius");
    const double lhs = 2.0 * shape.n() * shape.ball_volume_profile(r) -
                       4.0 * shape.curvature_profile(r);
    const double rhs = 2.0 * shape.slice_xtangent(r);
    const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / denom;
}

} // namespace shrinkerlab
