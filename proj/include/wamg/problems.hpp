#ifndef WAMG_PROBLEMS_HPP
#define WAMG_PROBLEMS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wamg/sparse.hpp"

namespace wamg {

/// Diffusion coefficient a(x,y) (scalar kinds) or a 2x2 tensor (rotated kind).
///
/// Grid/axis convention used throughout: unknowns are numbered row-major with
/// x varying fastest (index = iy*n + ix), so +-1 neighbours are x-neighbours
/// and +-n neighbours are y-neighbours. For the axial kind, epsilon multiplies
/// the face coefficients along `axis`.
struct CoefficientField {
    enum class Kind { Constant, Axial, Jump, Random, RotatedTensor };

    Kind kind = Kind::Constant;
    double epsilon = 1.0;      // Axial / RotatedTensor strength
    int axis = 0;              // Axial: 0 = x, 1 = y
    double theta = 0.0;        // RotatedTensor angle, in [0, pi)
    std::uint64_t seed = 0;    // Random

    static CoefficientField constant();
    static CoefficientField axial(double eps, int axis = 0);
    static CoefficientField jump();
    static CoefficientField random(std::uint64_t seed);
    static CoefficientField rotated(double theta, double eps);

    void validate() const;

    /// Scalar coefficient at a point (not valid for RotatedTensor).
    double scalar_at(double x, double y) const;

    /// 2x2 tensor at a point: R(theta) diag(1, eps) R(theta)' for the rotated
    /// kind, a(x,y) * I otherwise. Row-major {a11, a12, a21, a22}.
    void tensor_at(double x, double y, double out[4]) const;
};

/// 5-point finite-difference diffusion operator on the unit square with
/// homogeneous Dirichlet boundary, n x n interior unknowns, no h^2 scaling.
/// Face coefficients are arithmetic means of the nodal coefficient values.
/// The constant field reproduces I (x) T + T (x) I with T = tridiag(-1,2,-1)
/// exactly; the axial field reproduces eps-weighted couplings along its axis.
SparseMatrix gen_fd_diffusion(index_t n, const CoefficientField& field);

/// Conforming triangulation of a polygonal domain.
struct TriMesh {
    std::vector<double> vx, vy;           // vertex coordinates
    std::vector<std::array<index_t, 3>> triangles;
    std::vector<std::uint8_t> boundary;   // Dirichlet marker per vertex

    index_t n_vertices() const { return static_cast<index_t>(vx.size()); }
    index_t n_triangles() const { return static_cast<index_t>(triangles.size()); }
    index_t n_interior() const;

    /// Orientation fix, duplicate-vertex detection, boundary-edge consistency.
    void validate() const;
};

/// Uniform right-triangle mesh of the unit square. Level 0 is the square
/// split into 2 triangles; each level quadruples the triangle count.
TriMesh gen_structured_trimesh(int levels);

/// Plain-text mesh format: line 1 "nv nt"; nv lines "x y flag"; nt lines
/// "i j k" with 0-based vertex indices.
TriMesh load_trimesh(const std::string& path);
void save_trimesh(const TriMesh& mesh, const std::string& path);

/// P1 stiffness matrix on the interior (non-Dirichlet) vertices, coefficient
/// evaluated at triangle centroids. Also returns the interior numbering via
/// `interior_of_vertex` when requested (-1 for Dirichlet vertices).
SparseMatrix assemble_p1(const TriMesh& mesh, const CoefficientField& field,
                         std::vector<index_t>* interior_of_vertex = nullptr);

/// SPD check: dense Cholesky for n <= dense_cap, smallest Ritz value > 0
/// otherwise.
bool is_spd(const SparseMatrix& A, index_t dense_cap = 2000);

} // namespace wamg

#endif
