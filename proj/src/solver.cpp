#include "wamg/solver.hpp"

#include <cstdio>
#include <fstream>
#include <cmath>
#include <stdexcept>

#include "wamg/quality.hpp"
#include "wamg/rng.hpp"

namespace wamg {

void smooth_apply(const SparseMatrix& A, const DiagonalMatrix& M, Vec& x, const Vec& b,
                  int sweeps, double damping) {
    require_same_size(x.size(), b.size(), "smooth_apply");
    for (int s = 0; s < sweeps; ++s) {
        Vec r = spmv(A, x);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += damping * (b[i] - r[i]) / M.entries[i];
    }
}

TwoLevelSolver::TwoLevelSolver(const SparseMatrix& A, const Prolongator& P,
                               const DiagonalMatrix& M, bool pre_smooth)
    : A_(A), P_(P.P), n_c_(P.n_c), M_(M), pre_smooth_(pre_smooth) {
    SparseMatrix Ac = galerkin_product(P_, n_c_, A);
    coarse_ = std::make_unique<CholeskyFactor>(DenseMatrix::from_sparse(Ac));
}

Vec TwoLevelSolver::apply(const Vec& g) const {
    Vec x(g.size(), 0.0);
    if (pre_smooth_) smooth_apply(A_, M_, x, g);
    // coarse grid correction on the current residual
    Vec r = g;
    if (pre_smooth_) {
        Vec ax = spmv(A_, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
    }
    Vec rc = spmv_transpose(P_, n_c_, r);
    Vec xc = coarse_->solve(rc);
    Vec w = spmv_rect(P_, n_c_, xc);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[i];
    // post-smoothing
    smooth_apply(A_, M_, x, g);
    return x;
}

Vec TwoLevelSolver::apply_error(const Vec& e) const {
    Vec g = spmv(A_, e);
    Vec be = apply(g);
    Vec out(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = e[i] - be[i];
    return out;
}

MultilevelHierarchy build_multilevel(const SparseMatrix& A, const Vec& w,
                                     const MatcherConfig& matcher, int ell,
                                     index_t coarsest_size, int max_levels) {
    MultilevelHierarchy h;
    h.w_fine = w;
    SparseMatrix A_cur = A;
    Vec w_cur = w;
    for (int lvl = 0; lvl < max_levels && A_cur.n > coarsest_size; ++lvl) {
        Hierarchy step;
        try {
            step = coarsen_sweeps(A_cur, w_cur, matcher, ell);
        } catch (const std::runtime_error&) {
            break; // coarsening stalled; solve what we have exactly
        }
        if (step.n_c >= A_cur.n) break;
        MultilevelHierarchy::Level level;
        level.A = A_cur;
        level.M = l1_jacobi_diagonal(A_cur);
        level.P = step.P_total;
        level.n_c = step.n_c;
        h.levels.push_back(std::move(level));
        A_cur = step.A_coarse;
        w_cur = step.w_coarse;
    }
    h.A_coarse = A_cur;
    h.coarse_solver = std::make_unique<CholeskyFactor>(DenseMatrix::from_sparse(A_cur));
    return h;
}

namespace {

Vec vcycle_recurse(const MultilevelHierarchy& h, std::size_t lvl, const Vec& g,
                   const SmootherConfig& sm) {
    if (lvl == h.levels.size()) return h.coarse_solver->solve(g);
    const auto& L = h.levels[lvl];
    Vec x(g.size(), 0.0);
    if (sm.pre_smooth) smooth_apply(L.A, L.M, x, g, sm.sweeps, sm.damping);
    Vec r = spmv(L.A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = g[i] - r[i];
    Vec rc = spmv_transpose(L.P, L.n_c, r);
    Vec xc = vcycle_recurse(h, lvl + 1, rc, sm);
    Vec corr = spmv_rect(L.P, L.n_c, xc);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += corr[i];
    smooth_apply(L.A, L.M, x, g, sm.sweeps, sm.damping);
    return x;
}

} // namespace

Vec vcycle_apply(const MultilevelHierarchy& h, const Vec& g, const SmootherConfig& smoother) {
    return vcycle_recurse(h, 0, g, smoother);
}

Vec refine_weight(const SparseMatrix& A, const DiagonalMatrix& M, const Vec& w0, int k) {
    if (k < 0) throw std::invalid_argument("refine_weight: negative iteration count");
    Vec w = w0;
    double nw = norm_inf(w);
    if (nw == 0.0) throw std::runtime_error("refine_weight: zero weight vector");
    scale(w, 1.0 / nw);
    for (int it = 0; it < k; ++it) {
        Vec aw = spmv(A, w);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= aw[i] / M.entries[i];
        nw = norm_inf(w);
        if (nw == 0.0) throw std::runtime_error("refine_weight: weight vanished");
        scale(w, 1.0 / nw);
    }
    return w;
}

double measure_conv_factor(const std::function<Vec(const Vec&)>& apply_E, const SparseMatrix& A,
                           double tol, int max_iter, std::uint64_t seed) {
    Vec e = random_vector(static_cast<std::size_t>(A.n), seed);
    auto a_norm = [&A](const Vec& v) { return std::sqrt(std::max(0.0, dot(v, spmv(A, v)))); };
    double ne = a_norm(e);
    if (ne == 0.0) return 0.0;
    scale(e, 1.0 / ne);
    double factor = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec e2 = apply_E(e);
        const double n2 = a_norm(e2);
        if (n2 <= 1e-300) return 0.0;
        const double f = n2; // previous iterate had unit A-norm
        scale(e2, 1.0 / n2);
        e = std::move(e2);
        if (it > 3 && std::fabs(f - factor) <= tol * std::max(f, 1e-30)) return f;
        factor = f;
    }
    return factor;
}

Vec CompositeSolver::apply(const Vec& g) const {
    Vec x(g.size(), 0.0);
    for (const auto& h : hierarchies) {
        Vec r = spmv(*A, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = g[i] - r[i];
        Vec dx = vcycle_apply(h, r, smoother);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

Vec CompositeSolver::apply_error(const Vec& e) const {
    Vec out = e;
    for (const auto& h : hierarchies) {
        Vec g = spmv(*A, out);
        Vec be = vcycle_apply(h, g, smoother);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= be[i];
    }
    return out;
}

BootstrapResult bootstrap_build(const SparseMatrix& A, const Vec& w0, const BootstrapConfig& cfg,
                                double factor_tol) {
    if (cfg.n_hierarchies < 1 || cfg.inner_iterations < 1)
        throw std::invalid_argument("bootstrap_build: r and m must be >= 1");
    BootstrapResult out;
    out.solver.A = &A;
    out.solver.smoother = cfg.smoother;

    Vec w = w0;
    {
        const double nw = norm_inf(w);
        if (nw == 0.0) throw std::runtime_error("bootstrap_build: zero initial weight");
        scale(w, 1.0 / nw);
    }
    DiagonalMatrix D = diagonal_of(A);

    for (int r = 0; r < cfg.n_hierarchies; ++r) {
        if (r > 0) {
            // refine the weight with m composite iterations on the
            // homogeneous system
            for (int j = 0; j < cfg.inner_iterations; ++j) {
                w = out.solver.apply_error(w);
                const double nw = norm_inf(w);
                if (nw == 0.0)
                    throw std::runtime_error("bootstrap_build: weight vanished during refinement");
                scale(w, 1.0 / nw);
            }
        }
        out.history.weights.push_back(w);

        MultilevelHierarchy h = build_multilevel(A, w, cfg.matcher, cfg.ell, cfg.coarsest_size);

        // record the coarsening quality of the new hierarchy's finest step
        Hierarchy step = coarsen_sweeps(A, w, cfg.matcher, cfg.ell);
        Prolongator ptot;
        ptot.P = step.P_total;
        ptot.n_c = step.n_c;
        out.history.mu_inv.push_back(mu_global(A, D, ptot).mu_inv);

        out.solver.hierarchies.push_back(std::move(h));
        const double factor = measure_conv_factor(
            [&](const Vec& e) { return out.solver.apply_error(e); }, A, factor_tol);
        if (factor >= 1.0)
            throw std::runtime_error("bootstrap_build: composite factor " +
                                     std::to_string(factor) + " >= 1 after hierarchy " +
                                     std::to_string(r));
        out.history.factor.push_back(factor);
    }
    return out;
}

PcgResult pcg_solve(const SparseMatrix& A, const LinOp& precond, const Vec& b, double rtol,
                    int max_iter) {
    CgResult r = cg_solve(as_op(A), b, rtol, max_iter, precond);
    PcgResult out;
    out.x = std::move(r.x);
    out.iterations = r.iterations;
    out.rel_residual = r.rel_residual;
    out.converged = r.converged;
    out.residual_history = std::move(r.residual_history);
    return out;
}

void write_convergence_csv(const Vec& residual_history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_convergence_csv: cannot open " + path);
    out << "iteration,residual,factor\n";
    char buf[80];
    for (std::size_t k = 0; k < residual_history.size(); ++k) {
        const double factor = k == 0 ? 0.0 : residual_history[k] / residual_history[k - 1];
        std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.6g", k, residual_history[k], factor);
        out << buf << "\n";
    }
}

} // namespace wamg
