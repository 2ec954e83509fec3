#ifndef WAMG_EIGSOLVE_HPP
#define WAMG_EIGSOLVE_HPP

#include <functional>

#include "wamg/dense.hpp"
#include "wamg/sparse.hpp"
#include "wamg/vec.hpp"

namespace wamg {

/// Matrix-free symmetric operator.
using LinOp = std::function<Vec(const Vec&)>;

inline LinOp as_op(const SparseMatrix& A) {
    return [&A](const Vec& x) { return spmv(A, x); };
}

struct CgResult {
    Vec x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
    Vec residual_history; // relative residual per iteration, starting at iteration 0
};

/// Preconditioned conjugate gradients for SPD `A`. `precond` may be null (no
/// preconditioning). Throws on indefinite curvature.
CgResult cg_solve(const LinOp& A, const Vec& b, double rtol, int max_iter,
                  const LinOp& precond = nullptr, const Vec* x0 = nullptr);

struct EigPair {
    double value = 0.0;
    Vec vector;
    int iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of the pencil S x = sigma A x with S symmetric positive
/// semidefinite and A SPD. Lanczos on inv(A)*S in the A-inner product, with
/// full reorthogonalization and a seeded deterministic start vector.
/// Throws on non-convergence unless `allow_unconverged`.
EigPair largest_generalized_eig_sparse(const LinOp& S, const SparseMatrix& A, double tol,
                                       int max_iter = 400, std::uint64_t seed = 42,
                                       bool allow_unconverged = false);

/// Extreme eigenvalue estimates of a symmetric operator via Lanczos with full
/// reorthogonalization. Ritz bounds: lo >= lambda_min, hi <= lambda_max.
struct SpectrumBounds {
    double lo = 0.0;
    double hi = 0.0;
    double lo_residual = 0.0;
    double hi_residual = 0.0;
    int iterations = 0;
};

SpectrumBounds symmetric_lanczos_extremes(const LinOp& Op, index_t n, int max_iter,
                                          double tol, std::uint64_t seed = 42);

/// Smallest eigenpair of A x = lambda M x (A SPD, M SPD diagonal) by inverse
/// iteration with inner CG solves. Deterministic seeded start.
EigPair smallest_generalized_eig(const SparseMatrix& A, const DiagonalMatrix& M, double tol,
                                 int max_iter = 200, std::uint64_t seed = 42);

} // namespace wamg

#endif
