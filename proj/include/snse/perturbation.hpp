#pragma once

#include <string>
#include <vector>

#include "snse/deform.hpp"
#include "snse/diagram.hpp"
#include "snse/expr.hpp"

namespace snse::perturb {

using sym::Expr;

// Perturbative solution of the integral equation
//   Psi = Phi + lambda * G ** (conj(Psi)^kappa Psi^(kappa+1))
// as formal power-series coefficients. `coefficients` are the raw algebra
// elements F_0..F_K, `deformed` their images under the deformation map,
// built along the same recursion so the factor order is the one the
// equation produces (conjugated factors first).
struct PerturbativeSolution {
    int kappa = 1;
    int order = 0;
    std::vector<Expr> coefficients;
    std::vector<Expr> deformed;
};

PerturbativeSolution expand(int kappa, int order);

// Deformed solution evaluated at the zero configuration, summed through
// `order` with lambda powers attached. Identically zero.
Expr expectation(const PerturbativeSolution& sol, int order);
// Same with field legs bound to the background configuration instead.
Expr expectation_shifted(const PerturbativeSolution& sol, int order);

// Two-point correlation of the solution with its conjugate (or with itself
// when conjugated = false), at the zero configuration, through lambda order.
std::vector<deform::Diagram> two_point(const PerturbativeSolution& sol, int order,
                                       bool conjugated = true);

// m-point correlation over alternating solution / conjugate slots. Odd m is
// empty; in strict mode it is rejected instead.
std::vector<deform::Diagram> m_point(const PerturbativeSolution& sol, int m, int order,
                                     bool strict = true);

// Operator-valued counterterm entries M_1..M_K; each monomial carries one
// argument slot. M_k applied to the solution restores the pointwise-product
// form of the equation at order k.
struct CountertermSeries {
    std::vector<Expr> entries;
    const Expr& M(int k) const { return entries.at(k - 1); }
    int order() const { return int(entries.size()); }
};

CountertermSeries counterterms(const PerturbativeSolution& sol, int K);

struct VerifyReport {
    bool pass = true;
    int first_failing_order = -1;
    Expr residual;
    std::string message;
};

VerifyReport verify_renormalized_equation(const PerturbativeSolution& sol,
                                          const CountertermSeries& cts, int K);

} // namespace snse::perturb
