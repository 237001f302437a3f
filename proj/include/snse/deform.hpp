#pragma once

#include <optional>
#include <string>
#include <vector>

#include "snse/expr.hpp"

namespace snse::deform {

using sym::Expr;

// Local deformed product. Sums over all partial matchings that pair plain
// legs of one operand with conjugated legs of the other. A pair whose legs
// both sit at the base point collapses to a coinciding-point token: Cbar
// when the conjugated leg comes from the left operand, C when it comes from
// the right. Any other pair becomes a covariance contraction edge.
Expr deformed_product(const Expr& a, const Expr& b);

// Deformation of a raw expression. Inside each monomial the factors are
// folded left to right with conjugated legs first; convolution wrappers are
// deformed recursively and commute with the fold.
Expr gamma(const Expr& e);

// Deformation of an ordered factor list (left fold of the deformed product
// over the deformed entries). The list order decides which coinciding-point
// token a base contraction produces.
Expr gamma_dot(const std::vector<Expr>& factors);

// Multilocal deformation: contracts plain legs of one slot against
// conjugated legs of every other slot. Slots are never merged, so all
// contractions become kernel edges.
Expr bullet_product(const std::vector<Expr>& slots);

struct CountertermShift {
    std::string label = "delta";
    // When set, the shift vanishes on terms with m <= first+1 or
    // mbar <= second+1 (field degrees of the term).
    std::optional<std::pair<int, int>> window;
};

// Replaces every C / Cbar token by C + deltaC / Cbar + deltaCbar and
// re-expands. Models composing the deformation with a counterterm family.
Expr apply_counterterm_shift(const Expr& e, const CountertermShift& shift);

// Terms free of shift tokens: the image of the zero shift.
Expr drop_shift_terms(const Expr& e);

} // namespace snse::deform
