#include "shrinkerlab/io.hpp"

#include "shrinkerlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shrinkerlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_shrnk(const DiscreteHypersurface& mesh, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "io-error", "cannot open " + path + " for writing");
    out << "SHRNK " << mesh.n << ' ' << mesh.ambient << ' ' << mesh.n_vertices()
        << ' ' << mesh.n_simplices() << ' ' << mesh.boundary_facets.size() << '\n';
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        for (int d = 0; d < mesh.ambient; ++d) {
            if (d) out << ' ';
            out << format_double(mesh.vertices(d, v));
        }
        out << '\n';
    }
    for (int s = 0; s < mesh.n_simplices(); ++s) {
        for (int j = 0; j <= mesh.n; ++j) {
            if (j) out << ' ';
            out << mesh.simplices(j, s);
        }
        out << '\n';
    }
    for (int f : mesh.boundary_facets) out << f << '\n';
    require(out.good(), "io-error", "write failed for " + path);
}

DiscreteHypersurface read_shrnk(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "io-error", "cannot open " + path);
    std::string line;
    int lineno = 0;
    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty()) return;
        }
        fail("malformed-header", std::string("unexpected end of file, expected ") +
                                     what + " near line " + std::to_string(lineno + 1));
    };

    next_line("header");
    std::istringstream head(line);
    std::string magic;
    int n = 0, N = 0, V = 0, S = 0, B = 0;
    if (!(head >> magic >> n >> N >> V >> S >> B) || magic != "SHRNK")
        fail("malformed-header", "line 1: expected `SHRNK n N V S B`");
    if (n < 1 || n > 2 || N != n + 1 || V < 0 || S < 0 || B < 0)
        fail("malformed-header", "line 1: inconsistent sizes in header");

    DiscreteHypersurface mesh;
    mesh.n = n;
    mesh.ambient = N;
    mesh.vertices.resize(N, V);
    mesh.simplices.resize(n + 1, S);
    for (int v = 0; v < V; ++v) {
        next_line("vertex line");
        std::istringstream ss(line);
        for (int d = 0; d < N; ++d) {
            double x;
            if (!(ss >> x))
                fail("malformed-header", "line " + std::to_string(lineno) +
                                             ": expected " + std::to_string(N) +
                                             " vertex coordinates");
            mesh.vertices(d, v) = x;
        }
    }
    for (int s = 0; s < S; ++s) {
        next_line("simplex line");
        std::istringstream ss(line);
        for (int j = 0; j <= n; ++j) {
            int idx;
            if (!(ss >> idx))
                fail("malformed-header", "line " + std::to_string(lineno) +
                                             ": expected " + std::to_string(n + 1) +
                                             " vertex indices");
            if (idx < 0 || idx >= V)
                fail("index-out-of-range", "line " + std::to_string(lineno) +
                                               ": vertex index " + std::to_string(idx));
            mesh.simplices(j, s) = idx;
        }
        double diam = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                diam = std::max(diam, (mesh.vertices.col(mesh.simplices(i, s)) -
                                       mesh.vertices.col(mesh.simplices(j, s))).norm());
        if (mesh.simplex_volume(s) <= 1e-14 * std::pow(diam, n))
            fail("degenerate-simplex",
                 "line " + std::to_string(lineno) + ": simplex " + std::to_string(s));
    }
    for (int b = 0; b < B; ++b) {
        next_line("boundary facet line");
        std::istringstream ss(line);
        int f;
        if (!(ss >> f))
            fail("malformed-header",
                 "line " + std::to_string(lineno) + ": expected a facet id");
        if (f < 0 || f >= S * (n + 1))
            fail("index-out-of-range",
                 "line " + std::to_string(lineno) + ": facet id " + std::to_string(f));
        mesh.boundary_facets.push_back(f);
    }
    return mesh;
}

} // namespace shrinkerlab
