#include "snse/diagram_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace snse::num {

using deform::Decoration;
using deform::Diagram;
using deform::EdgeKind;

namespace {

struct EvalEdge {
    int u, v;        // endpoints, kernel first argument at u
    bool bar;        // conjugate kernel
};

struct EvalGraph {
    std::vector<Grid> weight;                 // per-vertex pointwise factor
    std::vector<std::vector<int>> adj;        // edge indices per vertex
    std::vector<EvalEdge> edges;
};

Grid ones(const LatticeSpec& spec) {
    Grid g(spec.nt, spec.nx);
    for (auto& v : g.a) v = 1.0;
    return g;
}

void mul_into(Grid& g, const Grid& f) {
    for (size_t i = 0; i < g.a.size(); ++i) g.a[i] *= f.a[i];
}

const Grid* binding_for(Decoration d, const KernelBindings& b) {
    switch (d) {
    case Decoration::C: return b.c;
    case Decoration::Cbar: return b.cbar;
    case Decoration::DeltaC: return b.delta_c;
    case Decoration::DeltaCbar: return b.delta_cbar;
    default: return nullptr;
    }
}

cplx contract_component(const EvalGraph& g, const LatticeSpec& spec, int root,
                        std::vector<bool>& visited);

Grid subtree_field(const EvalGraph& g, const LatticeSpec& spec, int v, int via_edge,
                   std::vector<bool>& visited) {
    visited[v] = true;
    Grid field = g.weight[v];
    for (int ei : g.adj[v]) {
        if (ei == via_edge) continue;
        const EvalEdge& e = g.edges[ei];
        int child = e.u == v ? e.v : e.u;
        if (visited[child])
            throw std::invalid_argument("evaluate_diagram: diagram contains a loop that "
                                        "cannot be contracted as a tree");
        Grid cf = subtree_field(g, spec, child, ei, visited);
        // kernel K(e.u, e.v): propagate toward v
        Grid prop = (e.u == v) ? propagate_forward(spec, cf, e.bar)
                               : propagate_adjoint(spec, cf, e.bar);
        mul_into(field, prop);
    }
    return field;
}

cplx contract_component(const EvalGraph& g, const LatticeSpec& spec, int root,
                        std::vector<bool>& visited) {
    Grid f = subtree_field(g, spec, root, -1, visited);
    cplx s = 0.0;
    for (const auto& v : f.a) s += v;
    return s * spec.dt() * spec.dx();
}

} // namespace

cplx evaluate_diagram(const Diagram& d, const LatticeSpec& spec,
                      const std::vector<const TestFunction*>& fs, const KernelBindings& bind) {
    spec.validate();
    if (spec.d != 1)
        throw std::invalid_argument("evaluate_diagram: d = 1 lattice only");
    size_t n_ext = d.externals.size();
    if (fs.size() != n_ext)
        throw std::invalid_argument("evaluate_diagram: slot count mismatch");
    if (d.symmetry_factor.is_zero()) return 0.0;

    Grid chi = chi_grid(spec);

    EvalGraph g;
    for (size_t i = 0; i < d.vertices.size(); ++i) {
        const auto& vert = d.vertices[i];
        Grid w = ones(spec);
        if (vert.external) {
            if (i >= n_ext || fs[i] == nullptr)
                throw std::invalid_argument("evaluate_diagram: external slot without test function");
            mul_into(w, fs[i]->values);
        }
        for (Decoration dec : vert.decorations) {
            if (dec == Decoration::Chi) { mul_into(w, chi); continue; }
            if (dec == Decoration::DiagonalId) continue;
            if (dec == Decoration::EtaLeg || dec == Decoration::EtaBarLeg)
                throw std::invalid_argument("evaluate_diagram: unbound eta leg");
            const Grid* b = binding_for(dec, bind);
            if (!b)
                throw std::invalid_argument(std::string("evaluate_diagram: unbound decoration ") +
                                            decoration_name(dec));
            mul_into(w, *b);
        }
        g.weight.push_back(std::move(w));
    }

    // every convolution edge carries the infrared cutoff at its source
    // endpoint (the second kernel argument)
    auto add_edge = [&](int u, int v, bool bar) {
        g.edges.push_back({u, v, bar});
        mul_into(g.weight[v], chi);
    };
    auto hidden = [&]() {
        g.weight.push_back(ones(spec));
        return int(g.weight.size()) - 1;
    };
    for (const auto& e : d.edges) {
        switch (e.kind) {
        case EdgeKind::G: add_edge(e.src, e.dst, false); break;
        case EdgeKind::Gbar: add_edge(e.src, e.dst, true); break;
        case EdgeKind::Q: {
            // Q(a,b) = sum_z G(a,z) Gbar(b,z) chi^2(z)
            int z = hidden();
            add_edge(e.src, z, false);
            add_edge(e.dst, z, true);
            break;
        }
        case EdgeKind::Qbar: {
            int z = hidden();
            add_edge(e.src, z, true);
            add_edge(e.dst, z, false);
            break;
        }
        }
    }
    g.adj.resize(g.weight.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        g.adj[g.edges[i].u].push_back(int(i));
        g.adj[g.edges[i].v].push_back(int(i));
    }

    std::vector<bool> visited(g.weight.size(), false);
    cplx value = d.symmetry_factor.to_double();
    for (size_t v = 0; v < g.weight.size(); ++v)
        if (!visited[v]) value *= contract_component(g, spec, int(v), visited);
    return value;
}

cplx evaluate_diagrams_at(const std::vector<Diagram>& ds, double lambda,
                          const LatticeSpec& spec, const std::vector<const TestFunction*>& fs,
                          const KernelBindings& bind) {
    cplx total = 0.0;
    for (const auto& d : ds)
        total += std::pow(lambda, d.lambda_power) * evaluate_diagram(d, spec, fs, bind);
    return total;
}

} // namespace snse::num
