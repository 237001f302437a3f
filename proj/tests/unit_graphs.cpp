#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snse/graphs.hpp"
#include "snse/perturbation.hpp"

using namespace snse;
using namespace snse::graphs;

TEST_CASE("admissible trees at low order") {
    auto t0 = admissible_trees(1, 0);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].is_leaf());
    CHECK_FALSE(t0[0].bar);

    auto t1 = admissible_trees(1, 1);
    REQUIRE(t1.size() == 1);
    CHECK(t1[0].children.size() == 3);
    auto census = leaf_census(t1[0]);
    CHECK(census.first == 2);
    CHECK(census.second == 1);

    auto t2 = admissible_trees(1, 2);
    CHECK(t2.size() == 2);
}

TEST_CASE("tree census matches the expansion monomial census") {
    for (int kappa : {1, 2}) {
        int kmax = kappa == 1 ? 4 : 2;
        auto sol = perturb::expand(kappa, kmax);
        for (int k = 0; k <= kmax; ++k) {
            auto trees = admissible_trees(kappa, k);
            CHECK(trees.size() == sol.coefficients[k].terms().size());
            for (const auto& t : trees) {
                CHECK(tree_order(t, kappa) == k);
                auto [np, nb] = leaf_census(t);
                CHECK(np == nb + 1);
            }
        }
    }
}

TEST_CASE("maximal contraction reproduces the closed-form counts") {
    for (int k = 0; k <= 8; ++k) {
        auto want = counts(k, 1);
        for (const auto& t : admissible_trees(1, k)) {
            auto d = maximal_contraction(t);
            CHECK(diagram_counts(d) == want);
        }
    }
    CHECK(counts(0, 1) == std::pair<int, int>{1, 1});
    CHECK(counts(1, 1) == std::pair<int, int>{4, 3});
    CHECK(counts(8, 1) == std::pair<int, int>{25, 17});

    // general nonlinearity: valence 2 kappa + 2 counting
    for (int k = 0; k <= 2; ++k) {
        auto want = counts(k, 2);
        for (const auto& t : admissible_trees(2, k))
            CHECK(diagram_counts(maximal_contraction(t)) == want);
    }
}

TEST_CASE("k = 1 contraction leaves one loop and a dangling leg") {
    auto trees = admissible_trees(1, 1);
    auto d = maximal_contraction(trees[0]);
    auto [L, N] = diagram_counts(d);
    CHECK(L == 4);
    CHECK(N == 3);
    // the merged leaf pair carries two parallel edges into the vertex
    int parallel = 0;
    for (size_t i = 0; i < d.edges.size(); ++i)
        for (size_t j = i + 1; j < d.edges.size(); ++j)
            if (d.edges[i].src == d.edges[j].src && d.edges[i].dst == d.edges[j].dst) ++parallel;
    CHECK(parallel == 1);
}

TEST_CASE("divergence degree arithmetic") {
    CHECK(divergence_degree(4, 3, 1) == 0);
    CHECK(divergence_degree(7, 5, 1) == -1);
    CHECK(divergence_degree(4, 3, 2) == 4);
    CHECK(divergence_degree(1, 1, 1) == 1);
    CHECK_THROWS(divergence_degree(0, 1, 1));
}

TEST_CASE("subcriticality verdicts and the divergent window") {
    auto rep = subcritical_report(1, 1, 10);
    CHECK(rep.subcritical);
    CHECK(rep.max_divergent_order == 1);
    for (const auto& row : rep.rows) {
        CHECK(row.divergent == (row.k <= 1));
        CHECK(row.rho == row.L * 1 - 2 * (row.N - 1));
        // rho decreases strictly as N grows in the subcritical regime
    }
    int last_rho = 1000;
    int last_n = -1;
    for (const auto& row : rep.rows) {
        if (row.N != last_n) {
            if (last_n >= 0) CHECK(row.rho < last_rho);
            last_rho = row.rho;
            last_n = row.N;
        }
    }

    CHECK_FALSE(subcritical_report(2, 1, 4).subcritical);
    CHECK_FALSE(subcritical_report(3, 1, 3).subcritical);
    // the cubic threshold d < 4/3 in disguise: d = 1 is the only integer case
    CHECK(subcritical_report(1, 2, 3).subcritical == (1.0 < 2.0 * 3 / 5));
}

TEST_CASE("csv report shape") {
    auto rep = subcritical_report(1, 1, 2);
    std::string csv = to_csv(rep);
    CHECK(csv.rfind("k,diagram_id,L,N,rho,divergent\n", 0) == 0);
    size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == rep.rows.size() + 1);
}
