#ifndef WAMG_SOLVER_HPP
#define WAMG_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "wamg/coarsening.hpp"
#include "wamg/dense.hpp"
#include "wamg/eigsolve.hpp"
#include "wamg/sparse.hpp"

namespace wamg {

struct SmootherConfig {
    int sweeps = 1;
    double damping = 1.0;
    bool pre_smooth = true; // V(0,1) when disabled, matching the two-level operator
};

/// x <- x + damping * M^-1 (b - A x), repeated `sweeps` times.
void smooth_apply(const SparseMatrix& A, const DiagonalMatrix& M, Vec& x, const Vec& b,
                  int sweeps = 1, double damping = 1.0);

/// Post-smoothed two-level operator: B g = w + M^-1 (g - A w) with
/// w = P Ac^-1 P' g and exact dense Cholesky on the coarse level.
/// Optional symmetric pre-smoothing.
class TwoLevelSolver {
public:
    TwoLevelSolver(const SparseMatrix& A, const Prolongator& P, const DiagonalMatrix& M,
                   bool pre_smooth = false);
    Vec apply(const Vec& g) const;
    /// e <- (I - B A) e, the error propagation step.
    Vec apply_error(const Vec& e) const;

private:
    const SparseMatrix& A_;
    SparseMatrix P_;
    index_t n_c_;
    DiagonalMatrix M_;
    std::unique_ptr<CholeskyFactor> coarse_;
    bool pre_smooth_;
};

/// Multilevel hierarchy for V-cycles: each level transition is one
/// coarsen_sweeps step (ell pairwise sweeps).
struct MultilevelHierarchy {
    struct Level {
        SparseMatrix A;
        DiagonalMatrix M; // l1-Jacobi diagonal
        SparseMatrix P;   // to next coarser level
        index_t n_c = 0;
    };
    std::vector<Level> levels;      // all but the coarsest
    SparseMatrix A_coarse;
    std::unique_ptr<CholeskyFactor> coarse_solver;
    Vec w_fine;                     // weight vector used to build the hierarchy
};

MultilevelHierarchy build_multilevel(const SparseMatrix& A, const Vec& w,
                                     const MatcherConfig& matcher, int ell,
                                     index_t coarsest_size = 40, int max_levels = 50);

/// V(1,1) cycle with l1-Jacobi pre/post smoothing and an exact coarsest solve.
Vec vcycle_apply(const MultilevelHierarchy& h, const Vec& g, const SmootherConfig& smoother = {});

/// w_k = (I - M^-1 A)^k w0 with infinity-norm renormalization per step.
Vec refine_weight(const SparseMatrix& A, const DiagonalMatrix& M, const Vec& w0, int k);

/// Asymptotic contraction factor of an error operator in the A-norm, by
/// power iteration to relative tolerance `tol`.
double measure_conv_factor(const std::function<Vec(const Vec&)>& apply_E, const SparseMatrix& A,
                           double tol = 1e-4, int max_iter = 1000, std::uint64_t seed = 42);

struct BootstrapConfig {
    int n_hierarchies = 4;   // r
    int inner_iterations = 1; // m composite refinement applications per step
    int ell = 2;
    MatcherConfig matcher;
    SmootherConfig smoother; // V-cycle pre/post smoothing
    index_t coarsest_size = 40;
};

/// Multiplicative composite of V-cycle hierarchies.
class CompositeSolver {
public:
    std::vector<MultilevelHierarchy> hierarchies;
    SmootherConfig smoother;
    const SparseMatrix* A = nullptr;

    Vec apply(const Vec& g) const;
    Vec apply_error(const Vec& e) const; // prod_p (I - B_p A) e
};

struct BootstrapHistory {
    std::vector<double> mu_inv;       // per built hierarchy
    std::vector<double> factor;       // measured composite factor after each addition
    std::vector<Vec> weights;         // weight vector used for each hierarchy
};

struct BootstrapResult {
    CompositeSolver solver;
    BootstrapHistory history;
};

/// Builds r hierarchies; the weight for hierarchy p is obtained by m
/// applications of the composite error operator of hierarchies 0..p-1 to the
/// previous weight. Requires every measured composite factor < 1.
BootstrapResult bootstrap_build(const SparseMatrix& A, const Vec& w0, const BootstrapConfig& cfg,
                                double factor_tol = 1e-4);

struct PcgResult {
    Vec x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
    Vec residual_history;
};

/// Preconditioned conjugate gradients; `precond` may be null.
PcgResult pcg_solve(const SparseMatrix& A, const LinOp& precond, const Vec& b, double rtol,
                    int max_iter = 10000);

/// Convergence history as CSV: "iteration,residual,factor" with factor the
/// per-step residual ratio.
void write_convergence_csv(const Vec& residual_history, const std::string& path);

} // namespace wamg

#endif
