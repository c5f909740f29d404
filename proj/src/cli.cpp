#include "shrinkerlab/cli.hpp"

#include "shrinkerlab/catalog.hpp"
#include "shrinkerlab/certificates.hpp"
#include "shrinkerlab/cutoff.hpp"
#include "shrinkerlab/differential.hpp"
#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/frankel.hpp"
#include "shrinkerlab/growth.hpp"
#include "shrinkerlab/io.hpp"
#include "shrinkerlab/mesh.hpp"
#include "shrinkerlab/numerics.hpp"
#include "shrinkerlab/weighted.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace shrinkerlab {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string shape = "plane", shape2;
    int n = 1, k = -1, k2 = -1;
    double R = 6.0, h = 0.0;
    double r1 = 2.0, r2 = 0.0;
    double rmin = 0.5, rmax = 0.0, step = 0.25;
    double tol = -1.0;
    double rho = 0.0;
    double angle = 0.0, angle2 = 0.0;
    double cap = 20.0;
    int samples = 1000;
    int sing_count = 0;
    std::uint64_t seed = 1, rotation_seed = 0;
    std::string out_path, mesh_path, mesh2_path, emit_mesh, sing_spec;

    json to_json() const {
        json j;
        j["command"] = command;
        j["shape"] = shape;
        if (!shape2.empty()) j["shape2"] = shape2;
        j["n"] = n;
        j["k"] = k;
        if (k2 >= 0) j["k2"] = k2;
        j["R"] = R;
        j["h"] = h;
        j["r1"] = r1;
        j["r2"] = r2;
        j["rmin"] = rmin;
        j["rmax"] = rmax;
        j["step"] = step;
        j["tol"] = tol;
        j["rho"] = rho;
        j["angle"] = angle;
        j["angle2"] = angle2;
        j["cap"] = cap;
        j["samples"] = samples;
        j["sing_count"] = sing_count;
        j["seed"] = seed;
        j["rotation_seed"] = rotation_seed;
        j["out"] = out_path;
        if (!mesh_path.empty()) j["mesh"] = mesh_path;
        if (!mesh2_path.empty()) j["mesh2"] = mesh2_path;
        if (!sing_spec.empty()) j["sing"] = sing_spec;
        return j;
    }
};

int shape_to_k(const std::string& shape, int n, int k_flag) {
    if (k_flag >= 0) return k_flag;
    if (shape == "plane") return 0;
    if (shape == "sphere") return n;
    if (shape == "cylinder") return std::min(1, n);
    fail("config-error", "unknown shape `" + shape + "`");
}

GeneralizedCylinder make_shape(const RunConfig& cfg, const std::string& shape,
                               int k_flag, double angle) {
    const int k = shape_to_k(shape, cfg.n, k_flag);
    const int N = cfg.n + 1;
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(N, N);
    if (cfg.rotation_seed != 0) {
        std::mt19937_64 rng(cfg.rotation_seed);
        rot = random_orthogonal(N, rng);
    } else if (angle != 0.0) {
        rot = plane_rotation(N, 0, 1, angle);
    }
    return GeneralizedCylinder(cfg.n, k, rot);
}

json make_report(const RunConfig& cfg, const std::string& operation, double value,
                 double residual, double tolerance, bool pass) {
    json j;
    j["operation"] = operation;
    j["inputs"] = cfg.to_json();
    j["value"] = value;
    j["residual"] = residual;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    require(f.good(), "io-error", "cannot open " + path);
    f << text;
    require(f.good(), "io-error", "write failed: " + path);
}

void emit(const RunConfig& cfg, const json& report, std::ostream& out) {
    json with_cfg = report;
    out << with_cfg.dump(2) << '\n';
    if (!cfg.out_path.empty()) write_text(cfg.out_path, with_cfg.dump(2) + "\n");
}

Eigen::VectorXd radius_grid(double rmin, double rmax, double step) {
    require(rmax > rmin && step > 0.0, "config-error", "bad radius grid");
    std::vector<double> rs;
    for (double r = rmin; r <= rmax + 1e-12; r += step) rs.push_back(r);
    Eigen::VectorXd out(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) out(i) = rs[i];
    return out;
}

DiscreteHypersurface load_or_build(const RunConfig& cfg, const std::string& mesh_path,
                                   const std::string& shape, int k_flag, double angle) {
    if (!mesh_path.empty()) {
        DiscreteHypersurface mesh = read_shrnk(mesh_path);
        const auto issues = mesh.validate();
        if (!issues.empty()) fail("invalid-mesh", issues.front());
        return mesh;
    }
    require(cfg.h > 0.0, "config-error", "mesh path needs --h > 0");
    return build_mesh(make_shape(cfg, shape, k_flag, angle), cfg.R, cfg.h);
}

// ---------------------------------------------------------------- commands

int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
    const auto shape = make_shape(cfg, cfg.shape, cfg.k, cfg.angle);
    std::mt19937_64 rng(cfg.seed);
    double max_res = 0.0, max_pythag = 0.0;
    for (int i = 0; i < cfg.samples; ++i) {
        const Eigen::VectorXd p = shape.sample_in_ball(cfg.R, rng);
        max_res = std::max(max_res, shape.shrinker_residual(p));
        const DifferentialData dd = shape.differential_data(p);
        const double pythag = std::abs(dd.x_tangent.squaredNorm() +
                                       dd.x_normal.squaredNorm() - p.squaredNorm());
        max_pythag = std::max(max_pythag, pythag / std::max(1.0, p.squaredNorm()));
    }
    const auto fields = check_coordinate_fields(shape, std::min(cfg.samples, 200),
                                                cfg.R, rng);
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-12;
    const bool pass = max_res <= tol && max_pythag <= 1e-10 &&
                      fields.sum_vi_sq_error <= 1e-10 && fields.max_Lvi_error <= 1e-10;
    json report = make_report(cfg, "catalog", max_res, max_res, tol, pass);
    report["pythagorean_error"] = max_pythag;
    report["sum_vi_sq_error"] = fields.sum_vi_sq_error;
    report["Lvi_error"] = fields.max_Lvi_error;
    report["shrinker_sign"] = shrinker_sign();
    if (!cfg.emit_mesh.empty()) {
        require(cfg.n <= 2 && cfg.h > 0.0, "config-error",
                "--emit-mesh needs n <= 2 and --h");
        write_shrnk(build_mesh(shape, cfg.R, cfg.h), cfg.emit_mesh);
        report["mesh_file"] = cfg.emit_mesh;
    }
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

int cmd_residual(const RunConfig& cfg, std::ostream& out) {
    double tol = cfg.tol;
    ResidualStats stats;
    if (!cfg.mesh_path.empty()) {
        const DiscreteHypersurface mesh =
            load_or_build(cfg, cfg.mesh_path, cfg.shape, cfg.k, cfg.angle);
        stats = shrinker_residual(mesh, DifferentialField::estimate(mesh));
        if (tol <= 0.0) tol = 1e-2;
    } else if (cfg.h > 0.0 && cfg.n <= 2) {
        const DiscreteHypersurface mesh = load_or_build(cfg, "", cfg.shape, cfg.k, cfg.angle);
        stats = shrinker_residual(mesh);
        if (tol <= 0.0) tol = 1e-12;
    } else {
        // analytic sampling path (any n)
        const auto shape = make_shape(cfg, cfg.shape, cfg.k, cfg.angle);
        std::mt19937_64 rng(cfg.seed);
        for (int i = 0; i < cfg.samples; ++i) {
            const double res = shape.shrinker_residual(shape.sample_in_ball(cfg.R, rng));
            stats.max = std::max(stats.max, res);
            stats.weighted_l2_mean += res * res;
            ++stats.n_points;
        }
        stats.weighted_l2_mean = std::sqrt(stats.weighted_l2_mean / cfg.samples);
        if (tol <= 0.0) tol = 1e-12;
    }
    const bool pass = stats.max <= tol;
    json report = make_report(cfg, "residual", stats.max, stats.weighted_l2_mean, tol, pass);
    report["n_points"] = stats.n_points;
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

int cmd_area(const RunConfig& cfg, std::ostream& out) {
    const auto shape = make_shape(cfg, cfg.shape, cfg.k, cfg.angle);
    const double closed_form = shape.gaussian_area(cfg.R);
    double value;
    std::string path_used;
    if (cfg.n <= 2 && (cfg.h > 0.0 || !cfg.mesh_path.empty())) {
        const DiscreteHypersurface mesh =
            load_or_build(cfg, cfg.mesh_path, cfg.shape, cfg.k, cfg.angle);
        DiscreteHypersurface quad_mesh = mesh;
        quad_mesh.quad_rule = QuadratureRule::ThreePoint;
        value = gaussian_area(quad_mesh);
        path_used = "mesh";
    } else {
        value = closed_form;
        path_used = "analytic";
    }
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-3;
    const double residual = std::abs(value - closed_form);
    const bool pass = residual <= tol;
    json report = make_report(cfg, "area", value, residual, tol, pass);
    report["closed_form"] = closed_form;
    report["path"] = path_used;
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

int cmd_growth(const RunConfig& cfg, std::ostream& out) {
    const double rmax = cfg.rmax > 0.0 ? cfg.rmax : std::min(cfg.R, 10.0);
    const Eigen::VectorXd radii = radius_grid(cfg.rmin, rmax, cfg.step);
    GrowthProfile prof;
    if (cfg.h > 0.0 && cfg.n <= 2) {
        const DiscreteHypersurface mesh = load_or_build(cfg, cfg.mesh_path, cfg.shape,
                                                        cfg.k, cfg.angle);
        const DifferentialField field = mesh.analytic_source
                                            ? DifferentialField::from_analytic(mesh)
                                            : DifferentialField::estimate(mesh);
        prof = growth_profile(mesh, field, radii);
    } else {
        prof = growth_profile_analytic(make_shape(cfg, cfg.shape, cfg.k, cfg.angle), radii);
    }
    const std::string csv = prof.to_csv(cfg.to_json().dump());
    if (!cfg.out_path.empty()) write_text(cfg.out_path, csv);

    // inequality checks on the grid; r1 defaults to 2.0 and must be admissible
    const double r2 = cfg.r2 > 0.0 ? cfg.r2 : radii(radii.size() - 1);
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;
    const GrowthCheck evg = check_volume_growth(prof, cfg.r1, r2, tol);
    bool h2_ok = true;
    for (const auto& row : check_H2_bound(prof, tol))
        h2_ok = h2_ok && row.pass;
    const bool pass = evg.pass && h2_ok;
    json report = make_report(cfg, "growth", evg.slack, evg.slack, tol, pass);
    report["volume_growth_pass"] = evg.pass;
    report["H2_bound_pass"] = h2_ok;
    report["csv"] = cfg.out_path.empty() ? json() : json(cfg.out_path);
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

Eigen::MatrixXd parse_points(const std::string& spec, int dim) {
    std::vector<Eigen::VectorXd> pts;
    std::stringstream ss(spec);
    std::string group;
    while (std::getline(ss, group, ';')) {
        if (group.empty()) continue;
        Eigen::VectorXd p(dim);
        std::stringstream gs(group);
        std::string coord;
        for (int d = 0; d < dim; ++d) {
            require(static_cast<bool>(std::getline(gs, coord, ',')), "config-error",
                    "--sing expects " + std::to_string(dim) + " coordinates per point");
            p(d) = std::stod(coord);
        }
        pts.push_back(p);
    }
    Eigen::MatrixXd out(dim, static_cast<int>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<int>(i)) = pts[i];
    return out;
}

int cmd_cutoff(const RunConfig& cfg, std::ostream& out) {
    const auto shape = make_shape(cfg, cfg.shape, cfg.k, cfg.angle);
    require(cfg.rho > 0.0, "config-error", "--rho is required");
    Eigen::MatrixXd pts(shape.ambient(), 0);
    if (!cfg.sing_spec.empty()) {
        pts = parse_points(cfg.sing_spec, shape.ambient());
    } else if (cfg.sing_count > 0) {
        std::mt19937_64 rng(cfg.seed);
        pts.resize(shape.ambient(), cfg.sing_count);
        for (int i = 0; i < cfg.sing_count; ++i)
            pts.col(i) = shape.sample_in_ball(cfg.R - 1.0, rng);
    }
    const SingularSetProxy proxy = make_covering(pts, cfg.rho, cfg.R);
    CutoffEnergies energies;
    std::string path_used;
    if (cfg.h > 0.0 && cfg.n <= 2) {
        const DiscreteHypersurface mesh = build_mesh(shape, cfg.R, cfg.h);
        energies = cutoff_energy(mesh, build_cutoff(mesh, proxy, cfg.R));
        path_used = "mesh";
    } else {
        energies = cutoff_energy_analytic(shape, proxy);
        path_used = "analytic";
    }
    const bool pass = energies.dirichlet >= 0.0 && energies.deficiency >= 0.0;
    json report = make_report(cfg, "cutoff", energies.dirichlet, energies.deficiency,
                              cfg.tol > 0.0 ? cfg.tol : 0.0, pass);
    report["dirichlet"] = energies.dirichlet;
    report["deficiency"] = energies.deficiency;
    report["covering_count"] = proxy.m;
    report["path"] = path_used;
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
    const auto shape = make_shape(cfg, cfg.shape, cfg.k, cfg.angle);
    const double r1 = cfg.r1 > 0.0 ? cfg.r1 : std::sqrt(4.0 + 2.0 * cfg.n);
    require(cfg.r2 > 0.0, "config-error", "--r2 is required");
    InstabilityCertificate cert;
    std::string path_used;
    if (cfg.h > 0.0 && cfg.n <= 2) {
        const DiscreteHypersurface mesh = build_mesh(shape, std::max(cfg.R, cfg.r2), cfg.h);
        const WeightedForms forms = assemble_forms(mesh);
        cert = certify_instability(mesh, forms, r1, cfg.r2);
        path_used = "mesh";
    } else {
        cert = certify_instability_analytic(shape, r1, cfg.r2);
        path_used = "analytic";
    }
    json report = make_report(cfg, "certify", cert.margin, cert.margin,
                              cfg.tol > 0.0 ? cfg.tol : 0.0, cert.fires);
    report["mass"] = cert.mass;
    report["energy"] = cert.energy;
    report["margin"] = cert.margin;
    report["fires"] = cert.fires;
    report["path"] = path_used;
    emit(cfg, report, out);
    return cert.fires ? 0 : 1;
}

int cmd_rn_sweep(const RunConfig& cfg, std::ostream& out) {
    const RnEstimate est = estimate_Rn(cfg.n, cfg.step, cfg.cap);
    const std::string csv = est.to_csv(cfg.to_json().dump());
    if (!cfg.out_path.empty()) write_text(cfg.out_path, csv);
    json report = make_report(cfg, "rn-sweep", est.r_n_hat, 0.0, cfg.cap, est.all_found);
    report["R_n_hat"] = est.r_n_hat;
    json rows = json::array();
    for (const auto& e : est.entries) {
        json row;
        row["k"] = e.k;
        row["Rstar"] = e.r_star;
        row["r1"] = e.r1;
        row["r2"] = e.r2;
        row["margin"] = e.margin;
        row["found"] = e.found;
        rows.push_back(row);
    }
    report["entries"] = rows;
    if (cfg.out_path.empty()) out << csv;
    emit(cfg, report, out);
    return est.all_found ? 0 : 1;
}

int cmd_frankel(const RunConfig& cfg, std::ostream& out) {
    require(cfg.n == 1, "config-error", "the frankel command is the n = 1 path");
    const double h = cfg.h > 0.0 ? cfg.h : 0.05;
    RunConfig c1 = cfg;
    c1.h = h;
    const DiscreteHypersurface s1 = load_or_build(c1, cfg.mesh_path, cfg.shape, cfg.k,
                                                  cfg.angle);
    const std::string shape2 = cfg.shape2.empty() ? "sphere" : cfg.shape2;
    const DiscreteHypersurface s2 = load_or_build(c1, cfg.mesh2_path, shape2, cfg.k2,
                                                  cfg.angle2);
    const FrankelVerdict verdict = frankel_verdict(s1, s2, cfg.R);
    json report;
    report["operation"] = "frankel";
    report["inputs"] = cfg.to_json();
    report["verdict"] = verdict.intersect ? "Intersect" : "DisjointEvidence";
    json witnesses = json::array();
    for (const auto& w : verdict.witnesses) {
        json pt = json::array();
        for (int d = 0; d < w.point.size(); ++d) pt.push_back(w.point(d));
        witnesses.push_back(json::array({w.simplex1, w.simplex2, pt}));
    }
    report["witnesses"] = witnesses;
    bool pass = verdict.intersect;
    if (!verdict.intersect) {
        report["F_gamma"] = verdict.minimizer ? verdict.minimizer->F : 0.0;
        json cert;
        if (verdict.certificate) {
            cert["mass"] = verdict.certificate->mass;
            cert["energy"] = verdict.certificate->energy;
            cert["margin"] = verdict.certificate->margin;
            cert["fires"] = verdict.certificate->fires;
            pass = verdict.certificate->fires;
        }
        report["certificate"] = cert;
        if (!verdict.note.empty()) report["note"] = verdict.note;
    }
    report["pass"] = pass;
    emit(cfg, report, out);
    return pass ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"shrinkerlab: a numerical laboratory for mean curvature flow "
                 "self-shrinkers as Gaussian minimal hypersurfaces"};
    app.require_subcommand(1);
    RunConfig cfg;

    app.set_help_flag("--help", "print help");
    auto add_common = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--shape", cfg.shape, "plane|sphere|cylinder");
        cmd->add_option("--n", cfg.n, "intrinsic dimension");
        cmd->add_option("--k", cfg.k, "sphere index (overrides --shape)");
        cmd->add_option("--R", cfg.R, "construction ball radius");
        cmd->add_option("--h", cfg.h, "target mesh edge length (mesh path)");
        cmd->add_option("--r1", cfg.r1, "inner radius");
        cmd->add_option("--r2", cfg.r2, "outer radius");
        cmd->add_option("--step", cfg.step, "grid step");
        cmd->add_option("--tol", cfg.tol, "tolerance");
        cmd->add_option("--seed", cfg.seed, "random seed");
        cmd->add_option("--rotation-seed", cfg.rotation_seed,
                        "seed for a random ambient rotation (0 = none)");
        cmd->add_option("--angle", cfg.angle, "rotation angle in the (x0,x1) plane");
        cmd->add_option("--out", cfg.out_path, "output artifact path");
        cmd->add_option("--samples", cfg.samples, "number of sample points");
        cmd->add_option("--mesh", cfg.mesh_path, "input SHRNK mesh");
        return cmd;
    };

    auto* catalog = add_common(app.add_subcommand("catalog", "catalog differential data"));
    catalog->add_option("--emit-mesh", cfg.emit_mesh, "write the SHRNK mesh here");
    add_common(app.add_subcommand("residual", "shrinker-equation residual"));
    add_common(app.add_subcommand("area", "Gaussian area F"));
    auto* growth = add_common(app.add_subcommand("growth", "volume growth profile"));
    growth->add_option("--rmin", cfg.rmin, "profile grid start");
    growth->add_option("--rmax", cfg.rmax, "profile grid end");
    auto* cutoff = add_common(app.add_subcommand("cutoff", "singular-set cutoff energies"));
    cutoff->add_option("--rho", cfg.rho, "covering radius");
    cutoff->add_option("--sing", cfg.sing_spec, "points `x,y;x,y;...`");
    cutoff->add_option("--sing-count", cfg.sing_count, "random points on the shape");
    add_common(app.add_subcommand("certify", "instability certificate"));
    auto* rn = add_common(app.add_subcommand("rn-sweep", "minimal firing radii"));
    rn->add_option("--cap", cfg.cap, "search cap");
    auto* frankel = add_common(app.add_subcommand("frankel", "intersection verdict"));
    frankel->add_option("--shape2", cfg.shape2, "second shape");
    frankel->add_option("--k2", cfg.k2, "second sphere index");
    frankel->add_option("--angle2", cfg.angle2, "second rotation angle");
    frankel->add_option("--mesh2", cfg.mesh2_path, "second input SHRNK mesh");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        json err;
        err["error"] = "config-error";
        err["message"] = e.what();
        out << err.dump(2) << '\n';
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("catalog")) {
            cfg.command = "catalog";
            return cmd_catalog(cfg, out);
        }
        if (app.got_subcommand("residual")) {
            cfg.command = "residual";
            return cmd_residual(cfg, out);
        }
        if (app.got_subcommand("area")) {
            cfg.command = "area";
            return cmd_area(cfg, out);
        }
        if (app.got_subcommand("growth")) {
            cfg.command = "growth";
            return cmd_growth(cfg, out);
        }
        if (app.got_subcommand("cutoff")) {
            cfg.command = "cutoff";
            return cmd_cutoff(cfg, out);
        }
        if (app.got_subcommand("certify")) {
            cfg.command = "certify";
            return cmd_certify(cfg, out);
        }
        if (app.got_subcommand("rn-sweep")) {
            cfg.command = "rn-sweep";
            return cmd_rn_sweep(cfg, out);
        }
        if (app.got_subcommand("frankel")) {
            cfg.command = "frankel";
            return cmd_frankel(cfg, out);
        }
    } catch (const Error& e) {
        json err;
        err["error"] = e.code();
        err["message"] = e.what();
        out << err.dump(2) << '\n';
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = "internal-error";
        err["message"] = e.what();
        out << err.dump(2) << '\n';
        return 2;
    }
    return 2;
}

} // namespace shrinkerlab
