#include "shrinkerlab/frankel.hpp"

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace shrinkerlab {

namespace {

constexpr double kExactTol = 1e-9;
// Test doubles may sit a bit outside the core ball B_{sqrt(2n)} that genuine
// shrinkers must reach; allow this much slack before flagging the input.
constexpr double kCoreSlack = 0.5;

Eigen::VectorXd closest_on_segment(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double* t_out = nullptr) {
    const Eigen::VectorXd d = b - a;
    const double dd = d.squaredNorm();
    double t = dd > 0.0 ? (p - a).dot(d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (t_out) *t_out = t;
    return a + t * d;
}

// closest points of two segments (Ericson, Real-Time Collision Detection)
double segment_segment_closest(const Eigen::VectorXd& p1, const Eigen::VectorXd& q1,
                               const Eigen::VectorXd& p2, const Eigen::VectorXd& q2,
                               Eigen::VectorXd& c1, Eigen::VectorXd& c2) {
    const Eigen::VectorXd d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s, t;
    if (a <= 1e-30 && e <= 1e-30) {
        s = t = 0.0;
    } else if (a <= 1e-30) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 1e-30) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 1e-30 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    c1 = p1 + s * d1;
    c2 = p2 + t * d2;
    return (c1 - c2).norm();
}

Eigen::Vector3d closest_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                    const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    // Ericson's point-triangle closest point
    const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Eigen::Vector3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Eigen::Vector3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

bool segment_crosses_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                              const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              const Eigen::Vector3d& c, Eigen::Vector3d& hit) {
    const Eigen::Vector3d dir = q - p;
    const Eigen::Vector3d nrm = (b - a).cross(c - a);
    const double denom = nrm.dot(dir);
    if (std::abs(denom) <= 1e-14 * nrm.norm() * dir.norm()) return false;
    const double t = nrm.dot(a - p) / denom;
    if (t < 0.0 || t > 1.0) return false;
    const Eigen::Vector3d x = p + t * dir;
    // barycentric inside test
    const Eigen::Vector3d v0 = b - a, v1 = c - a, v2 = x - a;
    const double dot00 = v0.dot(v0), dot01 = v0.dot(v1), dot02 = v0.dot(v2);
    const double dot11 = v1.dot(v1), dot12 = v1.dot(v2);
    const double det = dot00 * dot11 - dot01 * dot01;
    if (det <= 0.0) return false;
    const double u = (dot11 * dot02 - dot01 * dot12) / det;
    const double v = (dot00 * dot12 - dot01 * dot02) / det;
    if (u < -1e-12 || v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    hit = x;
    return true;
}

double triangle_triangle_distance(const Eigen::Vector3d t1[3], const Eigen::Vector3d t2[3],
                                  Eigen::Vector3d& witness) {
    Eigen::Vector3d hit;
    for (int i = 0; i < 3; ++i) {
        if (segment_crosses_triangle(t1[i], t1[(i + 1) % 3], t2[0], t2[1], t2[2], hit)) {
            witness = hit;
            return 0.0;
        }
        if (segment_crosses_triangle(t2[i], t2[(i + 1) % 3], t1[0], t1[1], t1[2], hit)) {
            witness = hit;
            return 0.0;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd c1, c2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double d = segment_segment_closest(t1[i], t1[(i + 1) % 3], t2[j],
                                                     t2[(j + 1) % 3], c1, c2);
            if (d < best) {
                best = d;
                witness = 0.5 * (c1 + c2);
            }
        }
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d cp = closest_on_triangle(t1[i], t2[0], t2[1], t2[2]);
        const double d = (cp - t1[i]).norm();
        if (d < best) {
            best = d;
            witness = 0.5 * (cp + t1[i]);
        }
        const Eigen::Vector3d cq = closest_on_triangle(t2[i], t1[0], t1[1], t1[2]);
        const double dq = (cq - t2[i]).norm();
        if (dq < best) {
            best = dq;
            witness = 0.5 * (cq + t2[i]);
        }
    }
    return best;
}

} // namespace

double simplex_pair_distance(const DiscreteHypersurface& m1, int s1,
                             const DiscreteHypersurface& m2, int s2,
                             Eigen::VectorXd& witness) {
    require(m1.n == m2.n && m1.ambient == m2.ambient, "dimension-mismatch",
            "surfaces have different dimensions");
    if (m1.n == 1) {
        Eigen::VectorXd c1, c2;
        const double d = segment_segment_closest(
            m1.vertices.col(m1.simplices(0, s1)), m1.vertices.col(m1.simplices(1, s1)),
            m2.vertices.col(m2.simplices(0, s2)), m2.vertices.col(m2.simplices(1, s2)),
            c1, c2);
        witness = 0.5 * (c1 + c2);
        return d;
    }
    Eigen::Vector3d t1[3], t2[3], w;
    for (int j = 0; j < 3; ++j) {
        t1[j] = m1.vertices.col(m1.simplices(j, s1));
        t2[j] = m2.vertices.col(m2.simplices(j, s2));
    }
    const double d = triangle_triangle_distance(t1, t2, w);
    witness = w;
    return d;
}

std::vector<IntersectionWitness> intersection_test(const DiscreteHypersurface& s1,
                                                   const DiscreteHypersurface& s2,
                                                   double R, double tol) {
    require(s1.n == s2.n && s1.ambient == s2.ambient, "dimension-mismatch",
            "surfaces have different dimensions");
    if (tol <= 0.0) tol = kExactTol;
    // bounding spheres for a cheap reject
    auto bounds = [](const DiscreteHypersurface& m) {
        std::vector<std::pair<Eigen::VectorXd, double>> out(m.n_simplices());
        for (int s = 0; s < m.n_simplices(); ++s) {
            Eigen::VectorXd c = m.simplex_barycenter(s);
            double rad = 0.0;
            for (int j = 0; j <= m.n; ++j)
                rad = std::max(rad, (m.vertices.col(m.simplices(j, s)) - c).norm());
            out[s] = {c, rad};
        }
        return out;
    };
    const auto b1 = bounds(s1), b2 = bounds(s2);
    std::vector<IntersectionWitness> hits;
    Eigen::VectorXd w;
    for (int i = 0; i < s1.n_simplices(); ++i) {
        if (b1[i].first.norm() - b1[i].second > R + tol) continue;
        for (int j = 0; j < s2.n_simplices(); ++j) {
            const double sep = (b1[i].first - b2[j].first).norm();
            if (sep > b1[i].second + b2[j].second + tol) continue;
            if (simplex_pair_distance(s1, i, s2, j, w) <= tol && w.norm() <= R + tol) {
                IntersectionWitness iw;
                iw.simplex1 = i;
                iw.simplex2 = j;
                iw.point = w;
                hits.push_back(std::move(iw));
            }
        }
    }
    return hits;
}

double distance_to_complex(const DiscreteHypersurface& mesh, const Eigen::VectorXd& p,
                           Eigen::VectorXd* nearest, int* simplex) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd bp;
    int bs = -1;
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        Eigen::VectorXd cp;
        if (mesh.n == 1) {
            cp = closest_on_segment(p, mesh.vertices.col(mesh.simplices(0, s)),
                                    mesh.vertices.col(mesh.simplices(1, s)));
        } else {
            cp = closest_on_triangle(p, mesh.vertices.col(mesh.simplices(0, s)),
                                     mesh.vertices.col(mesh.simplices(1, s)),
                                     mesh.vertices.col(mesh.simplices(2, s)));
        }
        const double d = (cp - p).norm();
        if (d < best) {
            best = d;
            bp = cp;
            bs = s;
        }
    }
    if (nearest) *nearest = bp;
    if (simplex) *simplex = bs;
    return best;
}

int side_of(const DiscreteHypersurface& mesh, const Eigen::VectorXd& p, double tol) {
    require(mesh.n == 1, "dimension-mismatch", "side tests are the n = 1 path");
    Eigen::VectorXd q;
    int s = -1;
    const double d = distance_to_complex(mesh, p, &q, &s);
    if (d <= tol) return 0;
    const Eigen::VectorXd a = mesh.vertices.col(mesh.simplices(0, s));
    const Eigen::VectorXd b = mesh.vertices.col(mesh.simplices(1, s));
    const Eigen::Vector2d dir = (b - a).normalized();
    const Eigen::Vector2d nrm(-dir.y(), dir.x()); // left normal
    const double sgn = nrm.dot(p - q);
    return sgn >= 0.0 ? +1 : -1;
}

SegmentSearch find_segment(const DiscreteHypersurface& s1,
                           const DiscreteHypersurface& s2) {
    const double core = std::sqrt(2.0 * s1.n);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(s1.ambient);
    for (const auto* m : {&s1, &s2}) {
        const double d = distance_to_complex(*m, origin);
        require(d <= core + kCoreSlack, "surface-misses-core-ball",
                "surface stays at distance " + std::to_string(d) +
                    " from the origin; shrinkers must reach the core ball");
    }
    SegmentSearch out;
    out.witnesses = intersection_test(s1, s2, core + kCoreSlack);
    if (!out.witnesses.empty()) {
        out.intersected = true;
        return out;
    }
    // nearest pair between the core-ball portions
    auto candidates = [&](const DiscreteHypersurface& m) {
        std::vector<std::pair<Eigen::VectorXd, int>> out_pts;
        for (int s = 0; s < m.n_simplices(); ++s) {
            Eigen::VectorXd cp;
            if (m.n == 1)
                cp = closest_on_segment(origin, m.vertices.col(m.simplices(0, s)),
                                        m.vertices.col(m.simplices(1, s)));
            else
                cp = closest_on_triangle(origin, m.vertices.col(m.simplices(0, s)),
                                         m.vertices.col(m.simplices(1, s)),
                                         m.vertices.col(m.simplices(2, s)));
            if (cp.norm() <= core + kCoreSlack) out_pts.push_back({cp, s});
            for (int j = 0; j <= m.n; ++j) {
                const Eigen::VectorXd v = m.vertices.col(m.simplices(j, s));
                if (v.norm() <= core + kCoreSlack) out_pts.push_back({v, s});
            }
        }
        return out_pts;
    };
    const auto c1 = candidates(s1), c2 = candidates(s2);
    require(!c1.empty() && !c2.empty(), "surface-misses-core-ball",
            "no simplices near the core ball");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, sp] : c1)
        for (const auto& [q, sq] : c2) best = std::min(best, (p - q).norm());
    // near-optimal candidate pairs, closest first
    struct Pair {
        double d;
        int s1, s2;
    };
    std::vector<Pair> pairs;
    const double slack = best + 4.0 * std::max(s1.target_h, s2.target_h) + 1e-9;
    for (const auto& [p, sp] : c1)
        for (const auto& [q, sq] : c2) {
            const double d = (p - q).norm();
            if (d <= slack) pairs.push_back({d, sp, sq});
        }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& x, const Pair& y) { return x.d < y.d; });
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const Pair& x, const Pair& y) {
                                return x.s1 == y.s1 && x.s2 == y.s2;
                            }),
                pairs.end());

    auto refine = [&](int bs1, int bs2, Eigen::VectorXd& a, Eigen::VectorXd& b) {
        if (s1.n == 1) {
            segment_segment_closest(s1.vertices.col(s1.simplices(0, bs1)),
                                    s1.vertices.col(s1.simplices(1, bs1)),
                                    s2.vertices.col(s2.simplices(0, bs2)),
                                    s2.vertices.col(s2.simplices(1, bs2)), a, b);
        } else {
            // alternate nearest-point projections between the two triangles
            a = s1.simplex_barycenter(bs1);
            b = s2.simplex_barycenter(bs2);
            for (int it = 0; it < 32; ++it) {
                b = closest_on_triangle(a, s2.vertices.col(s2.simplices(0, bs2)),
                                        s2.vertices.col(s2.simplices(1, bs2)),
                                        s2.vertices.col(s2.simplices(2, bs2)));
                a = closest_on_triangle(b, s1.vertices.col(s1.simplices(0, bs1)),
                                        s1.vertices.col(s1.simplices(1, bs1)),
                                        s1.vertices.col(s1.simplices(2, bs1)));
            }
        }
    };
    // the segment interior must stay off both surfaces
    auto interior_clear = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        if ((b - a).norm() <= 1e-12) return true;
        for (const auto* m : {&s1, &s2}) {
            for (int s = 0; s < m->n_simplices(); ++s) {
                if (m->n == 1) {
                    Eigen::VectorXd ca, cb;
                    const double d = segment_segment_closest(
                        a, b, m->vertices.col(m->simplices(0, s)),
                        m->vertices.col(m->simplices(1, s)), ca, cb);
                    if (d > kExactTol) continue;
                    const double t = (ca - a).norm() / (b - a).norm();
                    if (t > 1e-4 && t < 1.0 - 1e-4) return false;
                } else {
                    Eigen::Vector3d hit;
                    if (segment_crosses_triangle(a, b, m->vertices.col(m->simplices(0, s)),
                                                 m->vertices.col(m->simplices(1, s)),
                                                 m->vertices.col(m->simplices(2, s)), hit)) {
                        const double t = (hit - Eigen::Vector3d(a)).norm() /
                                         (Eigen::Vector3d(b) - Eigen::Vector3d(a)).norm();
                        if (t > 1e-4 && t < 1.0 - 1e-4) return false;
                    }
                }
            }
        }
        return true;
    };

    const std::size_t tries = std::min<std::size_t>(pairs.size(), 200);
    for (std::size_t i = 0; i < tries; ++i) {
        Eigen::VectorXd a, b;
        refine(pairs[i].s1, pairs[i].s2, a, b);
        if (interior_clear(a, b)) {
            out.a = a;
            out.b = b;
            return out;
        }
    }
    fail("segment-search-failed",
         "no connecting segment with clear interior among candidate pairs");
}

FrankelProblem make_frankel_problem(const DiscreteHypersurface& s1,
                                    const DiscreteHypersurface& s2, double R,
                                    const SegmentSearch& seg) {
    require(!seg.intersected, "precondition-violation",
            "surfaces intersect; no obstacle problem to solve");
    FrankelProblem problem;
    problem.sigma1 = &s1;
    problem.sigma2 = &s2;
    problem.R = R;
    problem.seg_a = seg.a;
    problem.seg_b = seg.b;
    const Eigen::VectorXd mid = 0.5 * (seg.a + seg.b);
    problem.side1 = side_of(s1, mid);
    problem.side2 = side_of(s2, mid);
    require(problem.side1 != 0 && problem.side2 != 0, "precondition-violation",
            "segment midpoint lies on an obstacle");
    return problem;
}

namespace {

struct PolylineFunctional {
    double norm_const;
    explicit PolylineFunctional(int n)
        : norm_const(std::pow(4.0 * std::numbers::pi, -0.5 * n)) {}

    double weight(const Eigen::Vector2d& x) const {
        return norm_const * std::exp(-0.25 * x.squaredNorm());
    }

    double value(const Eigen::MatrixXd& pts, const Eigen::MatrixXi& simp) const {
        const double g = 0.5 / std::sqrt(3.0);
        double total = 0.0;
        for (int s = 0; s < simp.cols(); ++s) {
            const Eigen::Vector2d a = pts.col(simp(0, s));
            const Eigen::Vector2d b = pts.col(simp(1, s));
            const double len = (b - a).norm();
            for (double t : {0.5 - g, 0.5 + g})
                total += 0.5 * len * weight(a + t * (b - a));
        }
        return total;
    }

    void gradient(const Eigen::MatrixXd& pts, const Eigen::MatrixXi& simp,
                  Eigen::MatrixXd& grad) const {
        grad.setZero(2, pts.cols());
        const double g = 0.5 / std::sqrt(3.0);
        for (int s = 0; s < simp.cols(); ++s) {
            const int ia = simp(0, s), ib = simp(1, s);
            const Eigen::Vector2d a = pts.col(ia), b = pts.col(ib);
            const Eigen::Vector2d d = b - a;
            const double len = d.norm();
            if (len <= 1e-300) continue;
            const Eigen::Vector2d u = d / len;
            for (double t : {0.5 - g, 0.5 + g}) {
                const Eigen::Vector2d x = a + t * d;
                const double w = weight(x);
                const Eigen::Vector2d dw = -0.5 * w * x; // grad of the weight
                // d/da [len w(x)] = -u w + len dw (1-t); likewise for b
                grad.col(ia) += 0.5 * (-u * w + len * dw * (1.0 - t));
                grad.col(ib) += 0.5 * (u * w + len * dw * t);
            }
        }
    }
};

struct ObstacleSet {
    const FrankelProblem* problem;
    double ctol = 1e-9;

    // returns contact mask and, for contact, stores inward feasible normals
    int project(Eigen::Vector2d& p) const {
        int flags = ContactNone;
        for (int pass = 0; pass < 3; ++pass) {
            if (p.norm() > problem->R) p *= problem->R / p.norm();
            for (int which = 0; which < 2; ++which) {
                const auto* obs = which == 0 ? problem->sigma1 : problem->sigma2;
                const int want = which == 0 ? problem->side1 : problem->side2;
                Eigen::VectorXd q;
                const double d = distance_to_complex(*obs, p, &q);
                if (d > ctol && side_of(*obs, p) != want) p = q;
            }
        }
        if (p.norm() >= problem->R - ctol) flags |= ContactBall;
        Eigen::VectorXd q;
        if (distance_to_complex(*problem->sigma1, p, &q) <= ctol) flags |= ContactSigma1;
        if (distance_to_complex(*problem->sigma2, p, &q) <= ctol) flags |= ContactSigma2;
        return flags;
    }

    // outward (infeasible-side) unit normal of the active obstacle at p
    std::vector<Eigen::Vector2d> active_normals(const Eigen::Vector2d& p,
                                                int flags) const {
        std::vector<Eigen::Vector2d> normals;
        if (flags & ContactBall) normals.push_back(p.normalized());
        for (int which = 0; which < 2; ++which) {
            if (!(flags & (which == 0 ? ContactSigma1 : ContactSigma2))) continue;
            const auto* obs = which == 0 ? problem->sigma1 : problem->sigma2;
            const int want = which == 0 ? problem->side1 : problem->side2;
            Eigen::VectorXd q;
            int s = -1;
            distance_to_complex(*obs, p, &q, &s);
            const Eigen::VectorXd a = obs->vertices.col(obs->simplices(0, s));
            const Eigen::VectorXd b = obs->vertices.col(obs->simplices(1, s));
            const Eigen::Vector2d dir = (b - a).normalized();
            Eigen::Vector2d nrm(-dir.y(), dir.x()); // left normal = side +1
            if (want > 0) nrm = -nrm;               // outward = away from Omega
            normals.push_back(nrm);
        }
        return normals;
    }
};

Eigen::Vector2d feasible_direction(const Eigen::Vector2d& d,
                                   const std::vector<Eigen::Vector2d>& normals) {
    Eigen::Vector2d out = d;
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& m : normals) {
            const double push = out.dot(m);
            if (push > 0.0) out -= push * m;
        }
    return out;
}

} // namespace

ObstacleMinimizer minimize_F_obstacle(const FrankelProblem& problem,
                                      double tol_factor, int max_iterations) {
    require(problem.sigma1 && problem.sigma2, "bad-argument", "missing surfaces");
    require(problem.sigma1->n == 1, "unsupported-dimension",
            "obstacle minimization is the n = 1 path (use minimize_F_graph for graphs)");

    // Gamma starts as the piece of Sigma1 inside the ball
    ObstacleMinimizer result;
    result.gamma = *problem.sigma1;
    result.gamma.analytic_source.reset();
    result.gamma.construction_radius = problem.R;
    DiscreteHypersurface& gamma = result.gamma;
    const int V = gamma.n_vertices();

    const auto bmask = gamma.boundary_vertex_mask();
    result.fixed.assign(bmask.begin(), bmask.end());
    for (int v = 0; v < V; ++v)
        require(!result.fixed[v] || gamma.vertex(v).norm() <= problem.R + 1e-9,
                "infeasible-boundary", "fixed boundary vertex outside the ball");

    PolylineFunctional functional(gamma.n);
    ObstacleSet obstacles{&problem};

    double h_mean = 0.0;
    for (int s = 0; s < gamma.n_simplices(); ++s) h_mean += gamma.simplex_volume(s);
    h_mean /= std::max(1, gamma.n_simplices());
    const double step0 = 0.5 * std::max(h_mean, 1e-6);

    Eigen::MatrixXd pts = gamma.vertices;
    result.contact.assign(V, ContactNone);
    for (int v = 0; v < V; ++v) {
        Eigen::Vector2d p = pts.col(v);
        result.contact[v] = obstacles.project(p);
        if (!result.fixed[v]) pts.col(v) = p;
    }
    double F = functional.value(pts, gamma.simplices);
    result.F_history.push_back(F);

    Eigen::MatrixXd grad(2, V);
    for (int it = 0; it < max_iterations; ++it) {
        result.iterations = it + 1;
        functional.gradient(pts, gamma.simplices, grad);

        // feasible-direction residual
        double residual = 0.0;
        for (int v = 0; v < V; ++v) {
            if (result.fixed[v]) continue;
            const Eigen::Vector2d d = -grad.col(v);
            const auto normals = obstacles.active_normals(pts.col(v), result.contact[v]);
            residual = std::max(residual, feasible_direction(d, normals).norm());
        }
        result.residual = residual;
        if (residual <= tol_factor * std::max(F, 1e-30)) {
            result.converged = true;
            break;
        }

        // backtracking projected step, halving from step0
        double alpha = step0;
        bool accepted = false;
        while (alpha > 1e-14 * step0) {
            Eigen::MatrixXd trial = pts;
            std::vector<int> trial_contact(V, ContactNone);
            for (int v = 0; v < V; ++v) {
                if (result.fixed[v]) {
                    trial_contact[v] = result.contact[v];
                    continue;
                }
                Eigen::Vector2d p = trial.col(v) - alpha * grad.col(v);
                trial_contact[v] = obstacles.project(p);
                trial.col(v) = p;
            }
            const double Ft = functional.value(trial, gamma.simplices);
            if (Ft < F) {
                pts = std::move(trial);
                result.contact = std::move(trial_contact);
                F = Ft;
                result.F_history.push_back(F);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) { // no descent direction left at this resolution
            result.converged = result.residual <= 1e-3 * std::max(F, 1e-30);
            break;
        }
    }
    gamma.vertices = pts;
    result.F = F;
    return result;
}

GraphMinimizer minimize_F_graph(const DiscreteHypersurface& base,
                                const Eigen::VectorXd& direction,
                                const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                const Eigen::VectorXd& u0, double tol_factor,
                                int max_iterations) {
    require(base.n == 2, "unsupported-dimension", "graph path needs n = 2");
    const int V = base.n_vertices();
    require(lo.size() == V && hi.size() == V && u0.size() == V, "dimension-mismatch",
            "bounds and heights must be per-vertex");
    const Eigen::Vector3d d = Eigen::Vector3d(direction).normalized();
    const auto bmask = base.boundary_vertex_mask();
    const double norm_const = std::pow(4.0 * std::numbers::pi, -1.0);

    auto positions = [&](const Eigen::VectorXd& u, Eigen::MatrixXd& x) {
        x = base.vertices;
        for (int v = 0; v < V; ++v) x.col(v) += u(v) * d;
    };
    auto value = [&](const Eigen::MatrixXd& x) {
        double total = 0.0;
        for (int s = 0; s < base.n_simplices(); ++s) {
            const Eigen::Vector3d a = x.col(base.simplices(0, s));
            const Eigen::Vector3d b = x.col(base.simplices(1, s));
            const Eigen::Vector3d c = x.col(base.simplices(2, s));
            const double area = 0.5 * ((b - a).cross(c - a)).norm();
            const Eigen::Vector3d bary = (a + b + c) / 3.0;
            total += area * norm_const * std::exp(-0.25 * bary.squaredNorm());
        }
        return total;
    };
    auto gradient = [&](const Eigen::MatrixXd& x, Eigen::VectorXd& g) {
        g.setZero(V);
        for (int s = 0; s < base.n_simplices(); ++s) {
            const int iv[3] = {base.simplices(0, s), base.simplices(1, s),
                               base.simplices(2, s)};
            const Eigen::Vector3d a = x.col(iv[0]), b = x.col(iv[1]), c = x.col(iv[2]);
            const Eigen::Vector3d cr = (b - a).cross(c - a);
            const double area = 0.5 * cr.norm();
            if (area <= 1e-300) continue;
            const Eigen::Vector3d nrm = cr / cr.norm();
            const Eigen::Vector3d bary = (a + b + c) / 3.0;
            const double w = norm_const * std::exp(-0.25 * bary.squaredNorm());
            const Eigen::Vector3d dw = -0.5 * w * bary;
            const Eigen::Vector3d dA[3] = {0.5 * nrm.cross(c - b), 0.5 * nrm.cross(a - c),
                                           0.5 * nrm.cross(b - a)};
            for (int j = 0; j < 3; ++j)
                g(iv[j]) += (dA[j] * w + area * dw / 3.0).dot(d);
        }
    };

    GraphMinimizer result;
    Eigen::VectorXd u = u0.cwiseMax(lo).cwiseMin(hi);
    for (int v = 0; v < V; ++v)
        if (bmask[v]) u(v) = u0(v);
    Eigen::MatrixXd x;
    positions(u, x);
    double F = value(x);
    result.F_history.push_back(F);
    const double step0 = 0.5 * std::max(base.target_h, 1e-3);

    Eigen::VectorXd g(V);
    for (int it = 0; it < max_iterations; ++it) {
        result.iterations = it + 1;
        gradient(x, g);
        double residual = 0.0;
        result.contact.assign(V, 0);
        for (int v = 0; v < V; ++v) {
            if (bmask[v]) continue;
            double dv = -g(v);
            if (u(v) <= lo(v) + 1e-12) {
                result.contact[v] |= 1;
                dv = std::max(dv, 0.0);
            }
            if (u(v) >= hi(v) - 1e-12) {
                result.contact[v] |= 2;
                dv = std::min(dv, 0.0);
            }
            residual = std::max(residual, std::abs(dv));
        }
        result.residual = residual;
        if (residual <= tol_factor * std::max(F, 1e-30)) {
            result.converged = true;
            break;
        }
        double alpha = step0;
        bool accepted = false;
        while (alpha > 1e-14 * step0) {
            Eigen::VectorXd trial = u;
            for (int v = 0; v < V; ++v) {
                if (bmask[v]) continue;
                trial(v) = std::clamp(u(v) - alpha * g(v), lo(v), hi(v));
            }
            Eigen::MatrixXd xt;
            positions(trial, xt);
            const double Ft = value(xt);
            if (Ft < F) {
                u = std::move(trial);
                x = std::move(xt);
                F = Ft;
                result.F_history.push_back(F);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            result.converged = result.residual <= 1e-3 * std::max(F, 1e-30);
            break;
        }
    }
    result.heights = u;
    result.F = F;
    return result;
}

namespace {

// connected components of a polyline by shared vertices
std::vector<int> polyline_components(const DiscreteHypersurface& mesh) {
    std::vector<int> comp(mesh.n_simplices(), -1);
    std::vector<std::vector<int>> by_vertex(mesh.n_vertices());
    for (int s = 0; s < mesh.n_simplices(); ++s)
        for (int j = 0; j <= mesh.n; ++j) by_vertex[mesh.simplices(j, s)].push_back(s);
    int next = 0;
    std::vector<int> stack;
    for (int s0 = 0; s0 < mesh.n_simplices(); ++s0) {
        if (comp[s0] >= 0) continue;
        comp[s0] = next;
        stack.push_back(s0);
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            for (int j = 0; j <= mesh.n; ++j)
                for (int t : by_vertex[mesh.simplices(j, s)])
                    if (comp[t] < 0) {
                        comp[t] = next;
                        stack.push_back(t);
                    }
        }
        ++next;
    }
    return comp;
}

} // namespace

FrankelVerdict frankel_verdict(const DiscreteHypersurface& s1,
                               const DiscreteHypersurface& s2, double R) {
    require(s1.n == 1 && s2.n == 1, "unsupported-dimension",
            "the verdict pipeline is the n = 1 path");
    FrankelVerdict verdict;
    verdict.witnesses = intersection_test(s1, s2, R);
    if (!verdict.witnesses.empty()) {
        verdict.intersect = true;
        return verdict;
    }
    const SegmentSearch seg = find_segment(s1, s2);
    if (seg.intersected) {
        verdict.intersect = true;
        verdict.witnesses = seg.witnesses;
        return verdict;
    }
    const FrankelProblem problem = make_frankel_problem(s1, s2, R, seg);
    verdict.minimizer = minimize_F_obstacle(problem);
    const DiscreteHypersurface& gamma = verdict.minimizer->gamma;

    // component of B_R cap Gamma that meets sigma (segment slightly extended
    // so that a touching contact at the endpoint still registers)
    const Eigen::Vector2d a = seg.a, b = seg.b;
    const Eigen::Vector2d dir = (b - a).normalized();
    const double ext = 1e-6 + 2.0 * gamma.target_h;
    const Eigen::Vector2d b_ext = b + ext * dir;
    const auto comp = polyline_components(gamma);
    int hit_comp = -1;
    Eigen::VectorXd c1, c2;
    for (int s = 0; s < gamma.n_simplices(); ++s) {
        const bool inside =
            gamma.vertices.col(gamma.simplices(0, s)).norm() < R - 1e-9 ||
            gamma.vertices.col(gamma.simplices(1, s)).norm() < R - 1e-9;
        if (!inside) continue;
        const double d = segment_segment_closest(a, b_ext,
                                                 gamma.vertices.col(gamma.simplices(0, s)),
                                                 gamma.vertices.col(gamma.simplices(1, s)),
                                                 c1, c2);
        if (d <= 1e-6 + 1e-3 * gamma.target_h) {
            hit_comp = comp[s];
            break;
        }
    }
    if (hit_comp >= 0) {
        for (int s = 0; s < gamma.n_simplices(); ++s)
            if (comp[s] == hit_comp) verdict.gamma1_simplices.push_back(s);
        // certificate on Gamma_1
        DiscreteHypersurface g1;
        g1.n = 1;
        g1.ambient = 2;
        std::vector<int> vmap(gamma.n_vertices(), -1);
        std::vector<int> vlist;
        for (int s : verdict.gamma1_simplices)
            for (int j = 0; j <= 1; ++j) {
                const int v = gamma.simplices(j, s);
                if (vmap[v] < 0) {
                    vmap[v] = static_cast<int>(vlist.size());
                    vlist.push_back(v);
                }
            }
        g1.vertices.resize(2, static_cast<int>(vlist.size()));
        for (std::size_t i = 0; i < vlist.size(); ++i)
            g1.vertices.col(static_cast<int>(i)) = gamma.vertices.col(vlist[i]);
        g1.simplices.resize(2, static_cast<int>(verdict.gamma1_simplices.size()));
        for (std::size_t i = 0; i < verdict.gamma1_simplices.size(); ++i) {
            const int s = verdict.gamma1_simplices[i];
            g1.simplices.col(static_cast<int>(i)) << vmap[gamma.simplices(0, s)],
                vmap[gamma.simplices(1, s)];
        }
        g1.boundary_facets = topological_boundary(g1);
        g1.target_h = gamma.target_h;
        g1.construction_radius = R;

        // mass and stiffness only; the potential plays no role in the
        // Poincare-violation certificate
        DifferentialField dummy;
        dummy.normal = Eigen::MatrixXd::Zero(2, g1.n_vertices());
        dummy.mean_curvature = Eigen::MatrixXd::Zero(2, g1.n_vertices());
        dummy.norm_A_sq = Eigen::VectorXd::Zero(g1.n_vertices());
        dummy.x_tangent = Eigen::MatrixXd::Zero(2, g1.n_vertices());
        dummy.x_normal = Eigen::MatrixXd::Zero(2, g1.n_vertices());
        dummy.valid.assign(g1.n_vertices(), 1);
        const WeightedForms forms = assemble_forms(g1, dummy);
        const double r1 = std::sqrt(4.0 + 2.0 * g1.n);
        InstabilityCertificate best;
        bool have = false;
        for (double r2 = 0.25 * (std::floor((r1 + 1.0) / 0.25) + 1.0); r2 <= R + 1e-9;
             r2 += 0.25) {
            if (r2 <= r1 + 1.0) continue;
            const InstabilityCertificate cert =
                certify_instability(g1, forms, r1, r2);
            if (!have || cert.margin > best.margin) {
                best = cert;
                have = true;
            }
            if (cert.fires) break;
        }
        if (have) verdict.certificate = best;
        if (!have) verdict.note = "no admissible certificate radius below R";
    } else {
        verdict.note = "minimizer does not meet the connecting segment";
    }
    return verdict;
}

} // namespace shrinkerlab
