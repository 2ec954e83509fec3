#include "wamg/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wamg/dense.hpp"
#include "wamg/eigsolve.hpp"
#include "wamg/rng.hpp"

namespace wamg {

CoefficientField CoefficientField::constant() { return {}; }

CoefficientField CoefficientField::axial(double eps, int axis) {
    CoefficientField f;
    f.kind = Kind::Axial;
    f.epsilon = eps;
    f.axis = axis;
    return f;
}

CoefficientField CoefficientField::jump() {
    CoefficientField f;
    f.kind = Kind::Jump;
    return f;
}

CoefficientField CoefficientField::random(std::uint64_t seed) {
    CoefficientField f;
    f.kind = Kind::Random;
    f.seed = seed;
    return f;
}

CoefficientField CoefficientField::rotated(double theta, double eps) {
    CoefficientField f;
    f.kind = Kind::RotatedTensor;
    f.theta = theta;
    f.epsilon = eps;
    return f;
}

void CoefficientField::validate() const {
    if (kind == Kind::Axial || kind == Kind::RotatedTensor) {
        if (!(epsilon > 0.0)) throw std::invalid_argument("CoefficientField: epsilon must be > 0");
    }
    if (kind == Kind::Axial && axis != 0 && axis != 1)
        throw std::invalid_argument("CoefficientField: axis must be 0 (x) or 1 (y)");
    if (kind == Kind::RotatedTensor && (theta < 0.0 || theta >= 3.14159265358979323846))
        throw std::invalid_argument("CoefficientField: theta must lie in [0, pi)");
}

namespace {

// Deterministic per-lattice-point uniform sample in [0,1): one xoshiro stream
// keyed by (seed, lattice index).
double eta_at(std::uint64_t seed, index_t ix, index_t iy) {
    Xoshiro256pp rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(ix + 1)) ^
                     (0xc2b2ae3d27d4eb4fULL * static_cast<std::uint64_t>(iy + 1)));
    return rng.next_double();
}

} // namespace

double CoefficientField::scalar_at(double x, double y) const {
    switch (kind) {
        case Kind::Constant:
            return 1.0;
        case Kind::Axial:
            return 1.0; // handled directionally by the caller
        case Kind::Jump:
            return (x > 0.5 && y > 0.5) ? 3.0 : 1.0;
        case Kind::Random:
            throw std::logic_error("CoefficientField: random field is lattice-based");
        case Kind::RotatedTensor:
            throw std::logic_error("CoefficientField: tensor field has no scalar value");
    }
    return 1.0;
}

void CoefficientField::tensor_at(double x, double y, double out[4]) const {
    if (kind == Kind::RotatedTensor) {
        const double c = std::cos(theta), s = std::sin(theta);
        // R diag(1, eps) R'
        out[0] = c * c + epsilon * s * s;
        out[1] = c * s - epsilon * c * s;
        out[2] = out[1];
        out[3] = s * s + epsilon * c * c;
    } else {
        const double a = scalar_at(x, y);
        out[0] = a;
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = a;
    }
}

SparseMatrix gen_fd_diffusion(index_t n, const CoefficientField& field) {
    if (n < 2) throw std::invalid_argument("gen_fd_diffusion: n must be >= 2");
    field.validate();
    if (field.kind == CoefficientField::Kind::RotatedTensor)
        throw std::invalid_argument("gen_fd_diffusion: tensor coefficients require the P1 path");

    const double h = 1.0 / static_cast<double>(n + 1);
    const index_t N = n * n;

    // nodal coefficient on the full (n+2)^2 lattice including boundary points
    auto node_coef = [&](index_t ix, index_t iy) -> double {
        if (field.kind == CoefficientField::Kind::Random)
            return 0.1 + eta_at(field.seed, ix, iy);
        if (field.kind == CoefficientField::Kind::Axial) return 1.0;
        return field.scalar_at(ix * h, iy * h);
    };

    const double ax = field.kind == CoefficientField::Kind::Axial && field.axis == 0
                          ? field.epsilon
                          : 1.0;
    const double ay = field.kind == CoefficientField::Kind::Axial && field.axis == 1
                          ? field.epsilon
                          : 1.0;

    std::vector<index_t> rows, cols;
    std::vector<double> vals;
    rows.reserve(5 * N);
    cols.reserve(5 * N);
    vals.reserve(5 * N);

    for (index_t iy = 1; iy <= n; ++iy) {
        for (index_t ix = 1; ix <= n; ++ix) {
            const index_t row = (iy - 1) * n + (ix - 1);
            const double a_here = node_coef(ix, iy);
            double diag = 0.0;

            auto face = [&](index_t jx, index_t jy, double dir_scale) {
                const double c = dir_scale * 0.5 * (a_here + node_coef(jx, jy));
                diag += c;
                if (jx >= 1 && jx <= n && jy >= 1 && jy <= n) {
                    rows.push_back(row);
                    cols.push_back((jy - 1) * n + (jx - 1));
                    vals.push_back(-c);
                }
            };
            face(ix - 1, iy, ax);
            face(ix + 1, iy, ax);
            face(ix, iy - 1, ay);
            face(ix, iy + 1, ay);

            rows.push_back(row);
            cols.push_back(row);
            vals.push_back(diag);
        }
    }
    SparseMatrix A = SparseMatrix::from_triplets(N, std::move(rows), std::move(cols),
                                                 std::move(vals), false);
    return A;
}

index_t TriMesh::n_interior() const {
    index_t c = 0;
    for (auto b : boundary)
        if (!b) ++c;
    return c;
}

void TriMesh::validate() const {
    const index_t nv = n_vertices();
    if (boundary.size() != static_cast<std::size_t>(nv) || vy.size() != vx.size())
        throw std::runtime_error("TriMesh: inconsistent array sizes");

    for (const auto& t : triangles) {
        for (index_t v : t)
            if (v < 0 || v >= nv) throw std::runtime_error("TriMesh: vertex index out of range");
        const double area2 = (vx[t[1]] - vx[t[0]]) * (vy[t[2]] - vy[t[0]]) -
                             (vx[t[2]] - vx[t[0]]) * (vy[t[1]] - vy[t[0]]);
        if (area2 <= 1e-14) throw std::runtime_error("TriMesh: degenerate or inverted triangle");
    }

    // duplicate vertices: lexicographic sort, compare near neighbours
    std::vector<index_t> order(static_cast<std::size_t>(nv));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        if (vx[a] != vx[b]) return vx[a] < vx[b];
        return vy[a] < vy[b];
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const index_t a = order[k - 1], b = order[k];
        if (std::fabs(vx[a] - vx[b]) < 1e-12 && std::fabs(vy[a] - vy[b]) < 1e-12)
            throw std::runtime_error("TriMesh: duplicate vertices");
    }

    // every edge on exactly one triangle must join two boundary-flagged vertices
    std::map<std::pair<index_t, index_t>, int> edge_count;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) {
            index_t a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    for (const auto& [edge, count] : edge_count) {
        if (count > 2) throw std::runtime_error("TriMesh: non-conforming triangles");
        if (count == 1 && (!boundary[edge.first] || !boundary[edge.second]))
            throw std::runtime_error("TriMesh: boundary edge with unflagged vertex");
    }
}

TriMesh gen_structured_trimesh(int levels) {
    if (levels < 0) throw std::invalid_argument("gen_structured_trimesh: levels must be >= 0");
    const index_t m = index_t{1} << levels; // cells per side
    TriMesh mesh;
    const double h = 1.0 / static_cast<double>(m);
    for (index_t iy = 0; iy <= m; ++iy) {
        for (index_t ix = 0; ix <= m; ++ix) {
            mesh.vx.push_back(ix * h);
            mesh.vy.push_back(iy * h);
            mesh.boundary.push_back(ix == 0 || ix == m || iy == 0 || iy == m ? 1 : 0);
        }
    }
    auto vid = [m](index_t ix, index_t iy) { return iy * (m + 1) + ix; };
    for (index_t iy = 0; iy < m; ++iy) {
        for (index_t ix = 0; ix < m; ++ix) {
            const index_t v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
            const index_t v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

TriMesh load_trimesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trimesh: cannot open " + path);
    index_t nv = 0, nt = 0;
    if (!(in >> nv >> nt) || nv <= 0 || nt <= 0)
        throw std::runtime_error("load_trimesh: malformed header in " + path);
    TriMesh mesh;
    mesh.vx.resize(nv);
    mesh.vy.resize(nv);
    mesh.boundary.resize(nv);
    for (index_t i = 0; i < nv; ++i) {
        int flag;
        if (!(in >> mesh.vx[i] >> mesh.vy[i] >> flag))
            throw std::runtime_error("load_trimesh: truncated vertex list");
        mesh.boundary[i] = flag ? 1 : 0;
    }
    for (index_t t = 0; t < nt; ++t) {
        std::array<index_t, 3> tri{};
        if (!(in >> tri[0] >> tri[1] >> tri[2]))
            throw std::runtime_error("load_trimesh: truncated triangle list");
        // fix orientation so all triangles are positively oriented
        const double area2 = (mesh.vx[tri[1]] - mesh.vx[tri[0]]) * (mesh.vy[tri[2]] - mesh.vy[tri[0]]) -
                             (mesh.vx[tri[2]] - mesh.vx[tri[0]]) * (mesh.vy[tri[1]] - mesh.vy[tri[0]]);
        if (area2 < 0) std::swap(tri[1], tri[2]);
        mesh.triangles.push_back(tri);
    }
    mesh.validate();
    return mesh;
}

void save_trimesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trimesh: cannot open " + path);
    out << mesh.n_vertices() << " " << mesh.n_triangles() << "\n";
    char buf[80];
    for (index_t i = 0; i < mesh.n_vertices(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d", mesh.vx[i], mesh.vy[i],
                      mesh.boundary[i] ? 1 : 0);
        out << buf << "\n";
    }
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

SparseMatrix assemble_p1(const TriMesh& mesh, const CoefficientField& field,
                         std::vector<index_t>* interior_of_vertex) {
    field.validate();
    const index_t nv = mesh.n_vertices();
    std::vector<index_t> dof(static_cast<std::size_t>(nv), -1);
    index_t n_int = 0;
    for (index_t i = 0; i < nv; ++i)
        if (!mesh.boundary[i]) dof[i] = n_int++;
    if (n_int == 0) throw std::runtime_error("assemble_p1: no interior vertices");

    std::map<std::pair<index_t, index_t>, double> entries;
    for (const auto& t : mesh.triangles) {
        const double x0 = mesh.vx[t[0]], y0 = mesh.vy[t[0]];
        const double x1 = mesh.vx[t[1]], y1 = mesh.vy[t[1]];
        const double x2 = mesh.vx[t[2]], y2 = mesh.vy[t[2]];
        const double area2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        if (area2 <= 2e-14) throw std::runtime_error("assemble_p1: degenerate triangle");
        const double area = 0.5 * area2;

        // gradients of the barycentric basis functions
        const double gx[3] = {(y1 - y2) / area2, (y2 - y0) / area2, (y0 - y1) / area2};
        const double gy[3] = {(x2 - x1) / area2, (x0 - x2) / area2, (x1 - x0) / area2};

        double tensor[4];
        double a_scalar = 1.0;
        if (field.kind == CoefficientField::Kind::Random) {
            // centroid sample from the seeded lattice at mesh scale
            const double cx = (x0 + x1 + x2) / 3.0, cy = (y0 + y1 + y2) / 3.0;
            const index_t cells = 1024;
            a_scalar = 0.1 + eta_at(field.seed, static_cast<index_t>(cx * cells),
                                    static_cast<index_t>(cy * cells));
            tensor[0] = tensor[3] = a_scalar;
            tensor[1] = tensor[2] = 0.0;
        } else {
            field.tensor_at((x0 + x1 + x2) / 3.0, (y0 + y1 + y2) / 3.0, tensor);
        }

        for (int i = 0; i < 3; ++i) {
            const index_t gi = dof[t[i]];
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const index_t gj = dof[t[j]];
                if (gj < 0) continue;
                const double kij = area * (gx[i] * (tensor[0] * gx[j] + tensor[1] * gy[j]) +
                                           gy[i] * (tensor[2] * gx[j] + tensor[3] * gy[j]));
                entries[{gi, gj}] += kij;
            }
        }
    }

    std::vector<index_t> rows, cols;
    std::vector<double> vals;
    rows.reserve(entries.size());
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (const auto& [ij, v] : entries) {
        rows.push_back(ij.first);
        cols.push_back(ij.second);
        vals.push_back(v);
    }
    if (interior_of_vertex) *interior_of_vertex = dof;
    return SparseMatrix::from_triplets(n_int, std::move(rows), std::move(cols), std::move(vals),
                                       false);
}

bool is_spd(const SparseMatrix& A, index_t dense_cap) {
    for (index_t i = 0; i < A.n; ++i)
        if (!(A.at(i, i) > 0.0)) return false;
    if (A.n <= dense_cap) {
        try {
            CholeskyFactor chol(DenseMatrix::from_sparse(A));
        } catch (const std::runtime_error&) {
            return false;
        }
        return true;
    }
    SpectrumBounds b = symmetric_lanczos_extremes(as_op(A), A.n, 300, 1e-8);
    return b.lo > 0.0;
}

} // namespace wamg
