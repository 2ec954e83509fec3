#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "wamg/matching.hpp"
#include "wamg/problems.hpp"
#include "wamg/rng.hpp"

using namespace wamg;

namespace {

EdgeWeights make_ew(index_t n, const std::vector<std::tuple<index_t, index_t, double>>& edges) {
    std::map<std::pair<index_t, index_t>, double> entries;
    for (const auto& [u, v, w] : edges) {
        entries[{u, v}] = w;
        entries[{v, u}] = w;
    }
    EdgeWeights ew;
    ew.n = n;
    ew.row_ptr.assign(n + 1, 0);
    for (const auto& [ij, w] : entries) ++ew.row_ptr[ij.first + 1];
    for (index_t i = 0; i < n; ++i) ew.row_ptr[i + 1] += ew.row_ptr[i];
    ew.col_idx.resize(entries.size());
    ew.weight.resize(entries.size());
    std::vector<index_t> next(ew.row_ptr.begin(), ew.row_ptr.end() - 1);
    for (const auto& [ij, w] : entries) {
        const index_t pos = next[ij.first]++;
        ew.col_idx[pos] = ij.second;
        ew.weight[pos] = w;
    }
    return ew;
}

EdgeWeights random_graph(std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    const index_t n = 2 + static_cast<index_t>(rng.next_below(15)); // 2..16
    std::vector<std::tuple<index_t, index_t, double>> edges;
    for (index_t u = 0; u < n; ++u)
        for (index_t v = u + 1; v < n; ++v)
            if (rng.next_double() < 0.35)
                edges.emplace_back(u, v, 1.0 + rng.next_double() * 4.0); // weights in (1, 5)
    return make_ew(n, edges);
}

} // namespace

TEST_CASE("edge weight formula hand values") {
    // a_ii = a_jj = 4, a_ij = -1, w = 1: 1 + 2/8 = 1.25
    SparseMatrix A = SparseMatrix::from_triplets(2, {0, 0, 1, 1}, {0, 1, 0, 1},
                                                 {4.0, -1.0, -1.0, 4.0});
    EdgeWeights ew = compute_edge_weights(A, {1.0, 1.0});
    CHECK(ew.at(0, 1) == doctest::Approx(1.25));

    EdgeWeights ew2 = compute_edge_weights(A, {1.0, -1.0});
    CHECK(ew2.at(0, 1) == doctest::Approx(0.75));

    // explicit zero entry gives weight exactly 1
    SparseMatrix Z = SparseMatrix::from_triplets(2, {0, 0, 1, 1}, {0, 1, 0, 1},
                                                 {4.0, 0.0, 0.0, 4.0});
    EdgeWeights ew3 = compute_edge_weights(Z, {1.0, 1.0});
    CHECK(ew3.at(0, 1) == 1.0);
}

TEST_CASE("edge weights flag zero weight entries and reject nonpositive diagonals") {
    SparseMatrix A = SparseMatrix::from_triplets(2, {0, 0, 1, 1}, {0, 1, 0, 1},
                                                 {4.0, -1.0, -1.0, 4.0});
    EdgeWeights ew = compute_edge_weights(A, {0.0, 1.0});
    CHECK(ew.zero_w_count == 1);

    SparseMatrix B = SparseMatrix::from_triplets(2, {0, 0, 1, 1}, {0, 1, 0, 1},
                                                 {0.0, -1.0, -1.0, 4.0});
    CHECK_THROWS(compute_edge_weights(B, {1.0, 1.0}));
}

TEST_CASE("edge weights commute with symmetric permutation") {
    SparseMatrix A = gen_fd_diffusion(5, CoefficientField::random(3));
    Vec w = random_vector(25, 17, 0.2, 1.0);
    EdgeWeights ew = compute_edge_weights(A, w);

    // permute: p[i] = (i * 7) % 25 is a bijection on 0..24
    std::vector<index_t> p(25);
    for (index_t i = 0; i < 25; ++i) p[i] = (i * 7) % 25;
    std::vector<index_t> rows, cols;
    Vec vals;
    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            rows.push_back(p[i]);
            cols.push_back(p[A.col_idx[k]]);
            vals.push_back(A.values[k]);
        }
    SparseMatrix Ap = SparseMatrix::from_triplets(25, rows, cols, vals);
    Vec wp(25);
    for (index_t i = 0; i < 25; ++i) wp[p[i]] = w[i];
    EdgeWeights ewp = compute_edge_weights(Ap, wp);

    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = ew.row_ptr[i]; k < ew.row_ptr[i + 1]; ++k)
            CHECK(ewp.at(p[i], p[ew.col_idx[k]]) == doctest::Approx(ew.weight[k]).epsilon(1e-14));
}

TEST_CASE("suitor on trivial graphs") {
    EdgeWeights one = make_ew(2, {{0, 1, 2.0}});
    Matching m = match_suitor(one);
    CHECK(m.partner[0] == 1);
    CHECK(m.partner[1] == 0);

    // path a-b-c with w(ab) = 3 > w(bc) = 2: matches (a, b)
    EdgeWeights path = make_ew(3, {{0, 1, 3.0}, {1, 2, 2.0}});
    Matching mp = match_suitor(path);
    CHECK(mp.partner[0] == 1);
    CHECK(mp.partner[2] == UNMATCHED);

    // 4-cycle with equal weights: perfect matching
    EdgeWeights cyc = make_ew(4, {{0, 1, 2.0}, {1, 2, 2.0}, {2, 3, 2.0}, {0, 3, 2.0}});
    Matching mc = match_suitor(cyc);
    CHECK(mc.n_matched_pairs() == 2);
}

TEST_CASE("preis on star and single edge") {
    EdgeWeights one = make_ew(2, {{0, 1, 5.0}});
    CHECK(match_preis(one).n_matched_pairs() == 1);

    // star K_{1,3}: exactly the heaviest edge is matched
    EdgeWeights star = make_ew(4, {{0, 1, 2.0}, {0, 2, 4.0}, {0, 3, 3.0}});
    Matching m = match_preis(star);
    CHECK(m.n_matched_pairs() == 1);
    CHECK(m.partner[0] == 2);
}

TEST_CASE("auction on trivial graphs") {
    EdgeWeights one = make_ew(2, {{0, 1, 5.0}});
    CHECK(match_auction(one).n_matched_pairs() == 1);

    EdgeWeights star = make_ew(4, {{0, 1, 2.0}, {0, 2, 4.0}, {0, 3, 3.0}});
    Matching m = match_auction(star);
    CHECK(m.n_matched_pairs() == 1);
    CHECK(m.partner[0] == 2);
}

TEST_CASE("exact matcher picks the heavy edge of a triangle") {
    EdgeWeights tri = make_ew(3, {{0, 1, 5.0}, {1, 2, 3.0}, {0, 2, 3.0}});
    Matching m = match_exact(tri);
    CHECK(m.partner[0] == 1);
    CHECK(m.partner[2] == UNMATCHED);
    CHECK(m.product_log == doctest::Approx(std::log(5.0)));
}

TEST_CASE("exact matcher on the 2x2 grid with uniform weights") {
    SparseMatrix A = gen_fd_diffusion(2, CoefficientField::constant());
    EdgeWeights ew = compute_edge_weights(A, Vec(4, 1.0));
    Matching m = match_exact(ew);
    CHECK(m.n_matched_pairs() == 2);
    CHECK(std::exp(m.product_log) == doctest::Approx(1.5625));
}

TEST_CASE("bruteforce basics") {
    EdgeWeights empty = make_ew(3, {});
    Matching m0 = match_bruteforce(empty);
    CHECK(m0.n_matched_pairs() == 0);
    CHECK(m0.product_log == 0.0);

    EdgeWeights one = make_ew(2, {{0, 1, 3.0}});
    Matching m1 = match_bruteforce(one);
    CHECK(m1.n_matched_pairs() == 1);
}

TEST_CASE("exact budget exceeded reports an error") {
    SparseMatrix A = gen_fd_diffusion(6, CoefficientField::constant());
    EdgeWeights ew = compute_edge_weights(A, Vec(36, 1.0));
    CHECK_THROWS(match_exact(ew, 10));
}

TEST_CASE("property: validity, exactness and the half guarantee on 1000 random graphs") {
    int exact_checked = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        EdgeWeights ew = random_graph(1234 + s);
        Matching best = match_bruteforce(ew);

        Matching ex = match_exact(ew);
        Matching su = match_suitor(ew);
        Matching pr = match_preis(ew);
        Matching au = match_auction(ew);
        for (const Matching* m : {&ex, &su, &pr, &au}) {
            CHECK_NOTHROW(m->validate(ew));
        }
        CHECK(ex.product_log == doctest::Approx(best.product_log).epsilon(1e-9));
        ++exact_checked;
        CHECK(su.product_log >= 0.5 * best.product_log - 1e-12);
        CHECK(pr.product_log >= 0.5 * best.product_log - 1e-12);
        CHECK(au.product_log >= 0.5 * best.product_log - 1e-12);
    }
    CHECK(exact_checked == 1000);
}

TEST_CASE("property: matcher determinism") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        EdgeWeights ew = random_graph(777 + s);
        Matching a1 = match_suitor(ew), a2 = match_suitor(ew);
        Matching b1 = match_preis(ew), b2 = match_preis(ew);
        Matching c1 = match_auction(ew), c2 = match_auction(ew);
        Matching d1 = match_exact(ew), d2 = match_exact(ew);
        CHECK(a1.partner == a2.partner);
        CHECK(b1.partner == b2.partner);
        CHECK(c1.partner == c2.partner);
        CHECK(d1.partner == d2.partner);
    }
}

TEST_CASE("half-approximate matchers beat half of optimum on a FD grid") {
    SparseMatrix A = gen_fd_diffusion(3, CoefficientField::constant());
    EdgeWeights ew = compute_edge_weights(A, Vec(9, 1.0));
    Matching best = match_bruteforce(ew);
    for (Matching m : {match_suitor(ew), match_preis(ew), match_auction(ew)})
        CHECK(m.product_log >= 0.5 * best.product_log - 1e-12);
}

TEST_CASE("edges with nonpositive log gain are never matched") {
    // weights below 1 carry negative log gain and must stay unmatched
    EdgeWeights ew = make_ew(4, {{0, 1, 0.9}, {2, 3, 1.5}});
    for (Matching m : {match_suitor(ew), match_preis(ew), match_auction(ew), match_exact(ew),
                       match_bruteforce(ew)}) {
        CHECK(m.partner[0] == UNMATCHED);
        CHECK(m.partner[1] == UNMATCHED);
        CHECK(m.partner[2] == 3);
    }
}

TEST_CASE("bruteforce rejects graphs beyond 16 nodes") {
    SparseMatrix A = gen_fd_diffusion(5, CoefficientField::constant());
    EdgeWeights ew = compute_edge_weights(A, Vec(25, 1.0));
    CHECK_THROWS(match_bruteforce(ew));
}

TEST_CASE("property: exact matcher on dense near-tied graphs") {
    // denser graphs with heavily tied weights exercise the blossom dual
    // updates and zero-slack paths much harder than generic random weights
    for (std::uint64_t s = 0; s < 300; ++s) {
        Xoshiro256pp rng(31337 + s);
        const index_t n = 6 + static_cast<index_t>(rng.next_below(9)); // 6..14
        std::vector<std::tuple<index_t, index_t, double>> edges;
        for (index_t u = 0; u < n; ++u)
            for (index_t v = u + 1; v < n; ++v)
                if (rng.next_double() < 0.6) {
                    // few distinct levels, exactly representable
                    const double w = 1.5 + static_cast<double>(rng.next_below(4)) / 8.0;
                    edges.emplace_back(u, v, w);
                }
        EdgeWeights ew = make_ew(n, edges);
        Matching best = match_bruteforce(ew);
        Matching ex = match_exact(ew);
        CHECK_NOTHROW(ex.validate(ew));
        CHECK(ex.product_log == doctest::Approx(best.product_log).epsilon(1e-10));
    }
}
