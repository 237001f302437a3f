#pragma once

#include <vector>

#include "snse/diagram.hpp"
#include "snse/kernels.hpp"

namespace snse::num {

struct KernelBindings {
    const Grid* c = nullptr;
    const Grid* cbar = nullptr;
    const Grid* delta_c = nullptr;
    const Grid* delta_cbar = nullptr;
};

// Lattice value of one kernel diagram paired with one test function per
// external slot, including the symmetry factor (lambda powers excluded).
// Q edges are expanded into hidden cutoff vertices; the resulting graph
// must be a forest (each component contracted by causal propagation).
cplx evaluate_diagram(const deform::Diagram& d, const LatticeSpec& spec,
                      const std::vector<const TestFunction*>& fs,
                      const KernelBindings& bind);

// Sum of factor * lambda^power * value over the diagram list.
cplx evaluate_diagrams_at(const std::vector<deform::Diagram>& ds, double lambda,
                          const LatticeSpec& spec, const std::vector<const TestFunction*>& fs,
                          const KernelBindings& bind);

} // namespace snse::num
