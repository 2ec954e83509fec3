#include "wamg/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wamg {

void AggregateSet::validate() const {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    if (static_cast<index_t>(aggregates.size()) != n_pairs + n_singletons &&
        n_pairs + n_singletons != 0)
        throw std::runtime_error("AggregateSet: pair/singleton counts inconsistent");
    for (index_t a = 0; a < count(); ++a) {
        if (aggregates[a].empty()) throw std::runtime_error("AggregateSet: empty aggregate");
        for (index_t i : aggregates[a]) {
            if (i < 0 || i >= n || seen[i]) throw std::runtime_error("AggregateSet: not a partition");
            seen[i] = 1;
            if (agg_of[i] != a) throw std::runtime_error("AggregateSet: agg_of mismatch");
        }
    }
    for (auto s : seen)
        if (!s) throw std::runtime_error("AggregateSet: uncovered index");
}

AggregateSet build_aggregates(const Matching& m) {
    AggregateSet agg;
    agg.n = static_cast<index_t>(m.partner.size());
    agg.agg_of.assign(static_cast<std::size_t>(agg.n), -1);

    for (index_t i = 0; i < agg.n; ++i) {
        const index_t j = m.partner[i];
        if (j != UNMATCHED && j > i) {
            agg.aggregates.push_back({i, j});
            ++agg.n_pairs;
        }
    }
    for (index_t i = 0; i < agg.n; ++i) {
        if (m.partner[i] == UNMATCHED) {
            agg.aggregates.push_back({i});
            ++agg.n_singletons;
        }
    }
    for (index_t a = 0; a < agg.count(); ++a)
        for (index_t i : agg.aggregates[a]) agg.agg_of[i] = a;
    return agg;
}

std::pair<Prolongator, ComplementProlongator> build_prolongator(const AggregateSet& agg,
                                                                const Vec& w,
                                                                const DiagonalMatrix& D) {
    require_same_size(w.size(), static_cast<std::size_t>(agg.n), "build_prolongator");
    require_same_size(D.entries.size(), static_cast<std::size_t>(agg.n), "build_prolongator");

    // demote matched pairs with a numerically zero weight sub-vector
    std::vector<std::vector<index_t>> groups;
    groups.reserve(agg.aggregates.size());
    std::vector<std::vector<index_t>> demoted;
    for (const auto& g : agg.aggregates) {
        if (g.size() == 2 && std::fabs(w[g[0]]) < 1e-300 && std::fabs(w[g[1]]) < 1e-300) {
            demoted.push_back({g[0]});
            demoted.push_back({g[1]});
        } else {
            groups.push_back(g);
        }
    }
    index_t n_pairs = 0;
    for (const auto& g : groups)
        if (g.size() >= 2) ++n_pairs;
    groups.insert(groups.end(), demoted.begin(), demoted.end());

    Prolongator prol;
    ComplementProlongator comp;
    prol.n_c = static_cast<index_t>(groups.size());
    comp.n_p = n_pairs;
    prol.coarse_weight.assign(static_cast<std::size_t>(prol.n_c), 0.0);
    prol.column_is_pair.assign(static_cast<std::size_t>(prol.n_c), 0);

    std::vector<index_t> p_rows, p_cols, f_rows, f_cols;
    Vec p_vals, f_vals;
    index_t pair_col = 0;
    for (index_t c = 0; c < prol.n_c; ++c) {
        const auto& g = groups[c];
        if (g.size() == 1) {
            const index_t i = g[0];
            double wi = w[i];
            if (std::fabs(wi) < 1e-300) {
                // demoted pair member carries unit weight
                if (agg.agg_of[i] >= 0 && agg.aggregates[agg.agg_of[i]].size() == 2) {
                    wi = 1.0;
                } else {
                    throw std::runtime_error("build_prolongator: zero weight on singleton");
                }
            }
            p_rows.push_back(i);
            p_cols.push_back(c);
            p_vals.push_back(wi > 0 ? 1.0 : -1.0);
            prol.coarse_weight[c] = std::fabs(wi);
        } else if (g.size() == 2) {
            const index_t i = g[0], j = g[1];
            const double nrm = std::sqrt(w[i] * w[i] + w[j] * w[j]);
            p_rows.push_back(i);
            p_cols.push_back(c);
            p_vals.push_back(w[i] / nrm);
            p_rows.push_back(j);
            p_cols.push_back(c);
            p_vals.push_back(w[j] / nrm);
            prol.coarse_weight[c] = nrm;
            prol.column_is_pair[c] = 1;

            // D-orthogonal complement column for the pair
            const double ci = -w[j] / D.entries[i];
            const double cj = w[i] / D.entries[j];
            const double cn = std::sqrt(ci * ci + cj * cj);
            f_rows.push_back(i);
            f_cols.push_back(pair_col);
            f_vals.push_back(ci / cn);
            f_rows.push_back(j);
            f_cols.push_back(pair_col);
            f_vals.push_back(cj / cn);
            ++pair_col;
        } else {
            throw std::runtime_error("build_prolongator: aggregate size > 2 in one sweep");
        }
    }

    // assemble rectangular CSR by hand (from_triplets is for square matrices)
    auto to_csr = [](index_t nrows, const std::vector<index_t>& rows,
                     const std::vector<index_t>& cols, const Vec& vals) {
        SparseMatrix M;
        M.n = nrows;
        M.row_ptr.assign(nrows + 1, 0);
        for (index_t r : rows) ++M.row_ptr[r + 1];
        for (index_t i = 0; i < nrows; ++i) M.row_ptr[i + 1] += M.row_ptr[i];
        M.col_idx.resize(rows.size());
        M.values.resize(rows.size());
        std::vector<index_t> next(M.row_ptr.begin(), M.row_ptr.end() - 1);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const index_t pos = next[rows[k]]++;
            M.col_idx[pos] = cols[k];
            M.values[pos] = vals[k];
        }
        return M;
    };
    prol.P = to_csr(agg.n, p_rows, p_cols, p_vals);
    comp.P_f = to_csr(agg.n, f_rows, f_cols, f_vals);
    return {std::move(prol), std::move(comp)};
}

Hierarchy coarsen_sweeps(const SparseMatrix& A, const Vec& w, const MatcherConfig& matcher,
                         int ell) {
    if (ell < 1) throw std::invalid_argument("coarsen_sweeps: ell must be >= 1");
    Hierarchy h;
    SparseMatrix A_cur = A;
    Vec w_cur = w;

    for (int s = 0; s < ell; ++s) {
        Sweep sweep;
        sweep.A = A_cur;
        sweep.w = w_cur;
        sweep.D = diagonal_of(A_cur);

        EdgeWeights ew = compute_edge_weights(A_cur, w_cur);
        sweep.matching = run_matcher(matcher.kind, ew, matcher.eps_auction,
                                     matcher.exact_edge_budget);
        sweep.matching.validate(ew);
        if (sweep.matching.n_matched_pairs() == 0)
            throw std::runtime_error("coarsen_sweeps: sweep " + std::to_string(s + 1) +
                                     " matched no pairs; coarsening stalled");
        sweep.aggregates = build_aggregates(sweep.matching);
        auto [prol, comp] = build_prolongator(sweep.aggregates, w_cur, sweep.D);
        sweep.prol = std::move(prol);
        sweep.comp = std::move(comp);

        A_cur = galerkin_product(sweep.prol.P, sweep.prol.n_c, A_cur);
        w_cur = sweep.prol.coarse_weight;
        h.sweeps.push_back(std::move(sweep));
    }
    h.A_coarse = A_cur;
    h.w_coarse = w_cur;

    h.P_total = h.sweeps[0].prol.P;
    h.n_c = h.sweeps[0].prol.n_c;
    for (std::size_t s = 1; s < h.sweeps.size(); ++s) {
        h.P_total = multiply(h.P_total, h.sweeps[s].prol.P, h.sweeps[s].prol.n_c);
        h.n_c = h.sweeps[s].prol.n_c;
    }

    // composite aggregates: preimages of coarse indices on the fine level
    h.composite.n = A.n;
    h.composite.agg_of.assign(static_cast<std::size_t>(A.n), -1);
    h.composite.aggregates.assign(static_cast<std::size_t>(h.n_c), {});
    for (index_t i = 0; i < A.n; ++i) {
        const index_t k = h.P_total.row_ptr[i];
        if (k == h.P_total.row_ptr[i + 1])
            throw std::runtime_error("coarsen_sweeps: empty prolongator row");
        const index_t c = h.P_total.col_idx[k];
        h.composite.agg_of[i] = c;
        h.composite.aggregates[c].push_back(i);
    }
    for (auto& g : h.composite.aggregates) std::sort(g.begin(), g.end());
    for (const auto& g : h.composite.aggregates) {
        h.composite.n_pairs += g.size() > 1 ? 1 : 0;
        h.composite.n_singletons += g.size() == 1 ? 1 : 0;
    }
    return h;
}

void write_aggregates_csv(const AggregateSet& agg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_aggregates_csv: cannot open " + path);
    out << "index,aggregate_id\n";
    for (index_t i = 0; i < agg.n; ++i) out << i << "," << agg.agg_of[i] << "\n";
}

} // namespace wamg
