#pragma once

#include <string>
#include <utility>
#include <vector>

#include "snse/diagram.hpp"

namespace snse::graphs {

// Rooted admissible tree: internal vertices carry one conjugated child
// branch per nonlinearity power and plain children for the rest; leaves are
// bare legs colored by the branch flavor.
struct TreeNode {
    bool bar = false;
    std::vector<TreeNode> children;   // empty = leaf

    bool is_leaf() const { return children.empty(); }
};

// All distinct admissible trees of the recursion at perturbative order k
// (distinct up to reordering of sibling branches).
std::vector<TreeNode> admissible_trees(int kappa, int k);

int tree_order(const TreeNode& t, int kappa);
std::pair<int, int> leaf_census(const TreeNode& t);   // (plain, barred)

// Pairs plain against barred leaves until a single plain leaf remains; each
// merged pair collapses two leaf vertices into one loop vertex. One external
// slot holds the root line.
deform::Diagram maximal_contraction(const TreeNode& t);

// Edge and vertex count of a contracted diagram, the external slot excluded
// from the vertex count.
std::pair<int, int> diagram_counts(const deform::Diagram& d);

// Closed forms L(k) = (2 kappa + 1) k + 1 and N(k) = (kappa + 1) k + 1.
std::pair<int, int> counts(int k, int kappa = 1);

// Weighted degree of divergence L d - 2 (N - 1) under parabolic weights
// (time 2, space 1).
int divergence_degree(int L, int N, int d);

struct DivergenceRow {
    int k = 0;
    int diagram_id = 0;
    int L = 0;
    int N = 0;
    int rho = 0;
    bool divergent = false;
};

struct DivergenceReport {
    int d = 1;
    int kappa = 1;
    std::vector<DivergenceRow> rows;
    bool subcritical = false;
    int max_divergent_order = -1;
};

// Per-order rows up to k_max plus the subcriticality verdict: the linear
// coefficient of rho in N is negative exactly when d < 2(kappa+1)/(2kappa+1).
DivergenceReport subcritical_report(int d, int kappa, int k_max);

std::string to_csv(const DivergenceReport& r);

} // namespace snse::graphs
