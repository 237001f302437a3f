#pragma once

#include <string>

#include "snse/expr.hpp"

namespace snse::sym {

// Stable JSON form of an expression. Schema (documented in the README):
//   { "slots": n,
//     "monomials": [ { "coeff": [num, den], "lambda": k,
//                      "slots": [ [atom, ...], ... ] } ] }
// with the recursive atom encoding
//   {"type":"field","bar":b} | {"type":"token","name":s}
//   | {"type":"conv","bar":b,"arg":[atom,...]}
//   | {"type":"pair","bar":b,"id":n} | {"type":"slot"}
// Local expressions additionally flatten "slots" to a single "atoms" array.
std::string to_json(const Expr& e, int indent = -1);
Expr expr_from_json(const std::string& text);

} // namespace snse::sym
