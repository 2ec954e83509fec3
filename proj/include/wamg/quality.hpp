#ifndef WAMG_QUALITY_HPP
#define WAMG_QUALITY_HPP

#include <limits>
#include <string>
#include <vector>

#include "wamg/coarsening.hpp"
#include "wamg/eigsolve.hpp"
#include "wamg/sparse.hpp"

namespace wamg {

/// Coarse-space quality constant: mu_inv is the largest sigma of
/// D(I - Q) x = sigma A x with Q = P (P'DP)^-1 P'D. Dense path for
/// n <= dense_cap, Lanczos otherwise.
struct MuResult {
    double mu_inv = 0.0;
    Vec worst_vector;
};

MuResult mu_global(const SparseMatrix& A, const DiagonalMatrix& D, const Prolongator& P,
                   double tol = 1e-6, index_t dense_cap = 2000, std::uint64_t seed = 42);

/// Applies y = D (I - Q) x for the aggregate projector.
class CoarseProjector {
public:
    CoarseProjector(const DiagonalMatrix& D, const Prolongator& P);
    Vec apply_Q(const Vec& x) const;
    Vec apply_Qt(const Vec& y) const;
    Vec apply_S(const Vec& x) const; // D (I - Q)
    const DiagonalMatrix& D() const { return D_; }

private:
    DiagonalMatrix D_;
    const SparseMatrix P_;
    index_t n_c_;
    Vec coarse_diag_inv_; // (P'DP)^-1, diagonal
};

struct ProjectorDiagnostics {
    double max_idempotency_dev = 0.0;  // |Q^2 v - Q v|
    double max_selfadjoint_dev = 0.0;  // |D Q v - Q' D v|
    double max_fix_dev = 0.0;          // |Q P h - P h|
};

ProjectorDiagnostics q_projector_check(const DiagonalMatrix& D, const Prolongator& P,
                                       int n_samples = 20, std::uint64_t seed = 42);

/// Per-aggregate spectral data for the local bound. The admissible interval
/// for mu_j^-1 is [1/lambda2, 1/lambda1] (upper end infinite for singular
/// blocks whose kernel lies in the coarse space; then the bound is exactly
/// 1/lambda2).
struct AggregateBound {
    index_t aggregate = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    double contribution = 0.0;
};

struct LocalBoundResult {
    bool available = false;          // false is reported as the dagger in tables
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool splitting_verified = false;
    double delta_factor = 0.0;       // chosen multiple of min(A_j 1)
    std::vector<AggregateBound> per_aggregate;
    std::string detail;              // why unavailable, when it is
};

/// Splitting-based local bound. For each candidate factor t (policy order),
/// subtract t*min(A_j 1) from each pair-or-larger block, verify every block
/// and the remainder are positive semidefinite (eigenvalue >= -1e-10*|A|),
/// and require each block to yield a finite bound contribution. The first
/// candidate passing all checks gives the bound; none passing reproduces the
/// unavailable ("dagger") outcome. Singletons contribute 1.
LocalBoundResult local_bound(const SparseMatrix& A, const AggregateSet& agg,
                             const DiagonalMatrix& D, const SparseMatrix& P_total,
                             const std::vector<double>& delta_policy = {1.0 / 3.0, 0.5, 1.0, 0.0},
                             index_t agg_cap = 8, index_t dense_cap = 2000);

/// Compatible-relaxation convergence ratio rho(I - M_ff^-1 A_ff) with
/// A_ff = P_f' A P_f and M_ff = P_f' M P_f, estimated on the symmetrized
/// operator. Returns 0 (with `no_pairs` set) when P_f is empty.
struct CrResult {
    double rho_f = 0.0;
    bool no_pairs = false;
};

CrResult cr_ratio(const SparseMatrix& A, const ComplementProlongator& comp,
                  const DiagonalMatrix& M, double tol = 1e-6, index_t dense_cap = 2000,
                  std::uint64_t seed = 42);

/// l1-Jacobi smoother with its symmetrization Rbar = 2 M^-1 - M^-1 A M^-1
/// applied matrix-free. Construction verifies Rbar is SPD.
class SymmetrizedSmoother {
public:
    SymmetrizedSmoother(const SparseMatrix& A, const DiagonalMatrix& M);
    Vec apply_Rbar(const Vec& v) const;
    /// z = Rbar^-1 v by conjugate gradients to relative residual rtol.
    Vec solve_Rbar(const Vec& v, double rtol = 1e-10) const;
    const DiagonalMatrix& M() const { return M_; }
    double rho_MinvA() const { return rho_; }

private:
    const SparseMatrix& A_;
    DiagonalMatrix M_;
    double rho_ = 0.0;
};

/// |v|_A^2 / |v|_{Rbar^-1}^2; lies in (0, 1] for SPD Rbar.
double epsilon_smoothness(const Vec& v, const SparseMatrix& A, const SymmetrizedSmoother& S);

/// Eigenvector of the smallest eigenvalue of Tbar = Rbar A, normalized to
/// unit 2-norm with the first nonzero entry positive.
struct TbarEigResult {
    double value = 0.0;
    Vec vector;
};

TbarEigResult smallest_eigvec_Tbar(const SparseMatrix& A, const SymmetrizedSmoother& S,
                                   double tol = 1e-8, std::uint64_t seed = 42);

} // namespace wamg

#endif
