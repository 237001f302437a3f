#include "snse/graphs.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace snse::graphs {

namespace {

std::string tree_key(const TreeNode& t) {
    std::string s = t.bar ? "B(" : "P(";
    for (const auto& c : t.children) s += tree_key(c);
    s += ")";
    return s;
}

void sort_children(TreeNode& t) {
    for (auto& c : t.children) sort_children(c);
    std::stable_sort(t.children.begin(), t.children.end(),
                     [](const TreeNode& a, const TreeNode& b) { return tree_key(a) < tree_key(b); });
}

// ordered compositions of `sum` into `slots` parts
void compositions(int slots, int sum, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (int(cur.size()) == slots - 1) {
        cur.push_back(sum);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= sum; ++v) {
        cur.push_back(v);
        compositions(slots, sum - v, cur, out);
        cur.pop_back();
    }
}

const std::vector<TreeNode>& trees_memo(int kappa, int k, bool bar,
                                        std::map<std::pair<int, bool>, std::vector<TreeNode>>& memo) {
    auto it = memo.find({k, bar});
    if (it != memo.end()) return it->second;
    std::vector<TreeNode> result;
    if (k == 0) {
        result.push_back(TreeNode{bar, {}});
    } else {
        int slots = 2 * kappa + 1;
        std::vector<std::vector<int>> comps;
        std::vector<int> cur;
        compositions(slots, k - 1, cur, comps);
        std::map<std::string, TreeNode> seen;
        for (const auto& comp : comps) {
            // first kappa children are conjugated branches
            std::vector<const std::vector<TreeNode>*> choices;
            for (int i = 0; i < slots; ++i)
                choices.push_back(&trees_memo(kappa, comp[i], (i < kappa) != bar, memo));
            std::vector<size_t> idx(slots, 0);
            while (true) {
                TreeNode node{bar, {}};
                for (int i = 0; i < slots; ++i) node.children.push_back((*choices[i])[idx[i]]);
                sort_children(node);
                seen.emplace(tree_key(node), node);
                int p = slots - 1;
                while (p >= 0 && ++idx[p] == choices[p]->size()) idx[p--] = 0;
                if (p < 0) break;
            }
        }
        for (auto& [key, node] : seen) {
            (void)key;
            result.push_back(std::move(node));
        }
    }
    auto ins = memo.emplace(std::make_pair(k, bar), std::move(result));
    return ins.first->second;
}

} // namespace

std::vector<TreeNode> admissible_trees(int kappa, int k) {
    if (kappa < 1) throw std::invalid_argument("admissible_trees: kappa must be positive");
    if (k < 0) throw std::invalid_argument("admissible_trees: negative order");
    std::map<std::pair<int, bool>, std::vector<TreeNode>> memo;
    return trees_memo(kappa, k, false, memo);
}

int tree_order(const TreeNode& t, int kappa) {
    if (t.is_leaf()) return 0;
    if (int(t.children.size()) != 2 * kappa + 1)
        throw std::invalid_argument("tree_order: vertex valence does not match kappa");
    int k = 1;
    for (const auto& c : t.children) k += tree_order(c, kappa);
    return k;
}

std::pair<int, int> leaf_census(const TreeNode& t) {
    if (t.is_leaf()) return t.bar ? std::pair<int, int>{0, 1} : std::pair<int, int>{1, 0};
    std::pair<int, int> s{0, 0};
    for (const auto& c : t.children) {
        auto cs = leaf_census(c);
        s.first += cs.first;
        s.second += cs.second;
    }
    return s;
}

namespace {

struct FlatTree {
    // vertex 0 is the external slot; vertex 1 the root
    deform::Diagram d;
    std::vector<int> plain_leaves, barred_leaves;

    int add_vertex(bool external) {
        d.vertices.push_back({external, {}});
        return int(d.vertices.size()) - 1;
    }
    void flatten(const TreeNode& t, int parent) {
        int v = add_vertex(false);
        d.edges.push_back({parent, v, t.bar ? deform::EdgeKind::Gbar : deform::EdgeKind::G});
        if (t.is_leaf()) {
            (t.bar ? barred_leaves : plain_leaves).push_back(v);
            return;
        }
        for (const auto& c : t.children) flatten(c, v);
    }
};

} // namespace

deform::Diagram maximal_contraction(const TreeNode& t) {
    FlatTree ft;
    ft.add_vertex(true);
    ft.d.externals.push_back("x1");
    ft.flatten(t, 0);

    auto [np, nb] = leaf_census(t);
    if (np != nb + 1)
        throw std::invalid_argument("maximal_contraction: leaf census is not plain = barred + 1");

    // pair plain with barred leaves in discovery order; each pair merges into
    // one loop vertex
    std::vector<int> remap(ft.d.vertices.size());
    for (size_t i = 0; i < remap.size(); ++i) remap[i] = int(i);
    for (int p = 0; p < nb; ++p) {
        int keep = std::min(ft.plain_leaves[p], ft.barred_leaves[p]);
        int drop = std::max(ft.plain_leaves[p], ft.barred_leaves[p]);
        remap[drop] = keep;
    }
    // compact vertex ids
    std::vector<int> newid(ft.d.vertices.size(), -1);
    deform::Diagram out;
    out.externals = ft.d.externals;
    for (size_t i = 0; i < ft.d.vertices.size(); ++i) {
        if (remap[i] != int(i)) continue;
        newid[i] = int(out.vertices.size());
        out.vertices.push_back(ft.d.vertices[i]);
    }
    for (auto& e : ft.d.edges)
        out.edges.push_back({newid[remap[e.src]], newid[remap[e.dst]], e.kind});
    out.symmetry_factor = Rational(1);
    return out;
}

std::pair<int, int> diagram_counts(const deform::Diagram& d) {
    int ext = 0;
    for (const auto& v : d.vertices)
        if (v.external) ++ext;
    return {int(d.edges.size()), int(d.vertices.size()) - ext};
}

std::pair<int, int> counts(int k, int kappa) {
    if (k < 0 || kappa < 1) throw std::invalid_argument("counts: bad arguments");
    return {(2 * kappa + 1) * k + 1, (kappa + 1) * k + 1};
}

int divergence_degree(int L, int N, int d) {
    if (L < 1 || N < 1 || d < 1) throw std::invalid_argument("divergence_degree: bad arguments");
    return L * d - 2 * (N - 1);
}

DivergenceReport subcritical_report(int d, int kappa, int k_max) {
    if (k_max < 1) throw std::invalid_argument("subcritical_report: k_max must be >= 1");
    DivergenceReport rep;
    rep.d = d;
    rep.kappa = kappa;
    // rho(N) grows linearly in N with coefficient d(2k+1)/(k+1) - 2
    rep.subcritical = double(d) * (2 * kappa + 1) / (kappa + 1) - 2.0 < 0.0;
    for (int k = 0; k <= k_max; ++k) {
        auto trees = admissible_trees(kappa, k);
        int id = 0;
        for (const auto& t : trees) {
            auto diag = maximal_contraction(t);
            auto [L, N] = diagram_counts(diag);
            DivergenceRow row;
            row.k = k;
            row.diagram_id = id++;
            row.L = L;
            row.N = N;
            row.rho = divergence_degree(L, N, d);
            row.divergent = row.rho >= 0;
            if (row.divergent && rep.subcritical)
                rep.max_divergent_order = std::max(rep.max_divergent_order, k);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

std::string to_csv(const DivergenceReport& r) {
    std::ostringstream os;
    os << "k,diagram_id,L,N,rho,divergent\n";
    for (const auto& row : r.rows)
        os << row.k << ',' << row.diagram_id << ',' << row.L << ',' << row.N << ','
           << row.rho << ',' << (row.divergent ? 1 : 0) << '\n';
    return os.str();
}

} // namespace snse::graphs
