#ifndef WAMG_COARSENING_HPP
#define WAMG_COARSENING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "wamg/matching.hpp"
#include "wamg/sparse.hpp"

namespace wamg {

/// Disjoint partition of the index set into pairs and singletons, ordered
/// pairs-first then singletons, each group by lowest contained index.
struct AggregateSet {
    index_t n = 0;
    std::vector<index_t> agg_of;
    std::vector<std::vector<index_t>> aggregates;
    index_t n_pairs = 0;
    index_t n_singletons = 0;

    index_t count() const { return static_cast<index_t>(aggregates.size()); }
    void validate() const;
};

AggregateSet build_aggregates(const Matching& m);

/// Piecewise-constant prolongator: one nonzero per row, pair columns are the
/// Euclidean-normalized weight sub-vectors, singleton columns are +-1.
struct Prolongator {
    SparseMatrix P; // n x n_c
    index_t n_c = 0;
    Vec coarse_weight;
    std::vector<std::uint8_t> column_is_pair;
};

/// D-orthogonal complement of the coarse space, one unit column per pair.
struct ComplementProlongator {
    SparseMatrix P_f; // n x n_p
    index_t n_p = 0;
};

std::pair<Prolongator, ComplementProlongator> build_prolongator(const AggregateSet& agg,
                                                                const Vec& w,
                                                                const DiagonalMatrix& D);

struct MatcherConfig {
    MatcherKind kind = MatcherKind::Suitor;
    double eps_auction = 1e-2;
    index_t exact_edge_budget = 20000;
};

/// One pairwise sweep: edge weights -> matching -> aggregates -> P, A_c, w_c.
struct Sweep {
    Matching matching;
    AggregateSet aggregates;
    Prolongator prol;
    ComplementProlongator comp;
    SparseMatrix A;      // operator at this (fine) level
    Vec w;               // weight at this level
    DiagonalMatrix D;    // diag(A) at this level
};

/// ell pairwise sweeps composed into one coarsening step.
struct Hierarchy {
    std::vector<Sweep> sweeps;
    SparseMatrix A_coarse;
    Vec w_coarse;
    SparseMatrix P_total; // composite prolongator, n x n_c
    index_t n_c = 0;
    AggregateSet composite; // fine-level preimages of the coarse indices
};

/// Repeats the pairwise matching procedure `ell` times, recomputing edge
/// weights on each collapsed graph. Throws if a sweep matches no pairs
/// (coarsening would stall) or if the matcher fails.
Hierarchy coarsen_sweeps(const SparseMatrix& A, const Vec& w, const MatcherConfig& matcher,
                         int ell);

/// Aggregate map as CSV: "index,aggregate_id" per line.
void write_aggregates_csv(const AggregateSet& agg, const std::string& path);

} // namespace wamg

#endif
