#include "wamg/eigsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wamg/rng.hpp"

namespace wamg {

CgResult cg_solve(const LinOp& A, const Vec& b, double rtol, int max_iter,
                  const LinOp& precond, const Vec* x0) {
    const std::size_t n = b.size();
    CgResult out;
    out.x.assign(n, 0.0);
    Vec r = b;
    if (x0) {
        out.x = *x0;
        Vec Ax = A(out.x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= Ax[i];
    }
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.x.assign(n, 0.0);
        out.converged = true;
        return out;
    }
    Vec z = precond ? precond(r) : r;
    Vec p = z;
    double rz = dot(r, z);
    for (int it = 0; it < max_iter; ++it) {
        const double rnorm = norm2(r);
        out.rel_residual = rnorm / bnorm;
        out.residual_history.push_back(out.rel_residual);
        if (out.rel_residual <= rtol) {
            out.converged = true;
            out.iterations = it;
            return out;
        }
        if (!(rz > 0.0))
            throw std::runtime_error("cg_solve: breakdown, preconditioner not SPD");
        Vec Ap = A(p);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0))
            throw std::runtime_error("cg_solve: nonpositive curvature (operator not SPD)");
        const double alpha = rz / pAp;
        axpy(alpha, p, out.x);
        axpy(-alpha, Ap, r);
        z = precond ? precond(r) : r;
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        out.iterations = it + 1;
    }
    out.rel_residual = norm2(r) / bnorm;
    out.converged = out.rel_residual <= rtol;
    return out;
}

namespace {

// Eigen-decomposition of a symmetric tridiagonal matrix given by diagonals
// alpha (size m) and off-diagonals beta (size m-1). Reuses the dense solver;
// Krylov bases here are short so the n^3 cost is immaterial.
SymmetricEig tridiag_eig(const Vec& alpha, const Vec& beta) {
    const index_t m = static_cast<index_t>(alpha.size());
    DenseMatrix T(m, m);
    for (index_t i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) {
            T(i, i + 1) = beta[i];
            T(i + 1, i) = beta[i];
        }
    }
    return symmetric_eig(T);
}

} // namespace

EigPair largest_generalized_eig_sparse(const LinOp& S, const SparseMatrix& A, double tol,
                                       int max_iter, std::uint64_t seed,
                                       bool allow_unconverged) {
    if (!(tol > 0.0)) throw std::invalid_argument("largest_generalized_eig_sparse: tol <= 0");
    const std::size_t n = static_cast<std::size_t>(A.n);
    DiagonalMatrix D = diagonal_of(A);
    LinOp jacobi = [&D](const Vec& r) { return D.solve(r); };
    LinOp Aop = as_op(A);

    auto a_inner = [&A](const Vec& u, const Vec& v) { return dot(u, spmv(A, v)); };

    // Lanczos for W = inv(A) S, self-adjoint in the A-inner product.
    Vec v = random_vector(n, seed);
    double vnorm = std::sqrt(a_inner(v, v));
    if (vnorm == 0.0) throw std::runtime_error("largest_generalized_eig_sparse: zero start");
    scale(v, 1.0 / vnorm);

    std::vector<Vec> basis;
    Vec alpha, beta;
    Vec v_prev;
    EigPair out;
    const int m_max = std::min<int>(max_iter, static_cast<int>(n));
    double prev_ritz = -1.0;

    for (int j = 0; j < m_max; ++j) {
        basis.push_back(v);
        Vec Sv = S(v);
        CgResult solve = cg_solve(Aop, Sv, 1e-12, 10000, jacobi);
        Vec w = solve.x;

        const double a = a_inner(w, v);
        alpha.push_back(a);
        axpy(-a, v, w);
        if (j > 0) axpy(-beta[j - 1], v_prev, w);
        // full reorthogonalization against the A-inner-product basis
        for (const Vec& q : basis) {
            const double c = a_inner(w, q);
            axpy(-c, q, w);
        }
        const double b = std::sqrt(std::max(0.0, a_inner(w, w)));

        // convergence check on the top Ritz pair
        SymmetricEig te = tridiag_eig(alpha, beta);
        const index_t m = static_cast<index_t>(alpha.size());
        const double ritz = te.eigenvalues[m - 1];
        const double bottom = te.vectors(m - 1, m - 1);
        const double resid = std::fabs(b * bottom);
        const double denom = std::max(std::fabs(ritz), 1e-30);
        const bool stagnated = j > 2 && std::fabs(ritz - prev_ritz) <= tol * denom;
        if (resid <= tol * denom || b <= 1e-14 || stagnated || j + 1 == m_max) {
            out.value = std::max(0.0, ritz);
            out.vector.assign(n, 0.0);
            for (index_t i = 0; i < m; ++i) axpy(te.vectors(i, m - 1), basis[i], out.vector);
            const double xn = norm2(out.vector);
            if (xn > 0) scale(out.vector, 1.0 / xn);
            out.iterations = j + 1;
            out.converged = resid <= tol * denom || b <= 1e-14 || stagnated;
            if (!out.converged && !allow_unconverged)
                throw std::runtime_error(
                    "largest_generalized_eig_sparse: no convergence after max iterations");
            return out;
        }
        prev_ritz = ritz;
        beta.push_back(b);
        v_prev = v;
        v = w;
        scale(v, 1.0 / b);
    }
    throw std::runtime_error("largest_generalized_eig_sparse: iteration limit");
}

SpectrumBounds symmetric_lanczos_extremes(const LinOp& Op, index_t n, int max_iter, double tol,
                                          std::uint64_t seed) {
    SpectrumBounds out;
    Vec v = random_vector(static_cast<std::size_t>(n), seed);
    double vn = norm2(v);
    scale(v, 1.0 / vn);
    std::vector<Vec> basis;
    Vec alpha, beta;
    Vec v_prev;
    double prev_lo = 0.0, prev_hi = 0.0;
    const int m_max = std::min<int>(max_iter, static_cast<int>(n));

    for (int j = 0; j < m_max; ++j) {
        basis.push_back(v);
        Vec w = Op(v);
        const double a = dot(w, v);
        alpha.push_back(a);
        axpy(-a, v, w);
        if (j > 0) axpy(-beta[j - 1], v_prev, w);
        for (const Vec& q : basis) {
            const double c = dot(w, q);
            axpy(-c, q, w);
        }
        const double b = norm2(w);

        SymmetricEig te = tridiag_eig(alpha, beta);
        const index_t m = static_cast<index_t>(alpha.size());
        out.lo = te.eigenvalues[0];
        out.hi = te.eigenvalues[m - 1];
        out.lo_residual = std::fabs(b * te.vectors(m - 1, 0));
        out.hi_residual = std::fabs(b * te.vectors(m - 1, m - 1));
        out.iterations = j + 1;

        const double scale_ref = std::max({std::fabs(out.lo), std::fabs(out.hi), 1e-30});
        const bool tight = out.lo_residual <= tol * scale_ref && out.hi_residual <= tol * scale_ref;
        const bool stagnated = j > 4 && std::fabs(out.lo - prev_lo) <= tol * scale_ref &&
                               std::fabs(out.hi - prev_hi) <= tol * scale_ref;
        if (tight || stagnated || b <= 1e-14 * scale_ref || j + 1 == m_max) return out;
        prev_lo = out.lo;
        prev_hi = out.hi;

        beta.push_back(b);
        v_prev = v;
        v = w;
        scale(v, 1.0 / b);
    }
    return out;
}

EigPair smallest_generalized_eig(const SparseMatrix& A, const DiagonalMatrix& M, double tol,
                                 int max_iter, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(A.n);
    require_same_size(n, M.entries.size(), "smallest_generalized_eig");
    DiagonalMatrix D = diagonal_of(A);
    LinOp jacobi = [&D](const Vec& r) { return D.solve(r); };
    LinOp Aop = as_op(A);

    // inverse iteration on the pencil (A, M): x <- inv(A) M x
    Vec x = random_vector(n, seed);
    scale(x, 1.0 / norm2(x));
    EigPair out;
    double lambda_prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec Mx = M.apply(x);
        CgResult solve = cg_solve(Aop, Mx, 1e-12, 20000, jacobi);
        x = solve.x;
        scale(x, 1.0 / norm2(x));
        // Rayleigh quotient x'Ax / x'Mx
        const double num = dot(x, spmv(A, x));
        const double den = dot(x, M.apply(x));
        const double lambda = num / den;
        out.value = lambda;
        out.iterations = it + 1;
        if (it > 0 && std::fabs(lambda - lambda_prev) <= tol * std::fabs(lambda)) {
            out.converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if (!out.converged) {
        // check the actual eigen-residual before giving up
        Vec Ax = spmv(A, x);
        Vec Mx = M.apply(x);
        double rn = 0.0;
        for (std::size_t i = 0; i < n; ++i) rn += (Ax[i] - out.value * Mx[i]) * (Ax[i] - out.value * Mx[i]);
        if (std::sqrt(rn) > 1e-6 * std::fabs(out.value) * norm2(Mx))
            throw std::runtime_error("smallest_generalized_eig: no convergence");
        out.converged = true;
    }
    out.vector = x;
    return out;
}

} // namespace wamg
