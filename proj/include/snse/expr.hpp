#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snse/rational.hpp"

namespace snse::sym {

// Opaque smooth multipliers. C / Cbar are the renormalized coinciding-point
// kernels (all extension ambiguity flows through them), Chi is the infrared
// cutoff, Eta / EtaBar are the background configurations a field leg binds to
// under a shifted evaluation, DeltaC / DeltaCbar are extension-shift tokens.
enum class Token : uint8_t { C = 0, Cbar, Chi, Eta, EtaBar, DeltaC, DeltaCbar };

// One node of a monomial tree.
//
//   FieldLeg  - a generator leg (bar = conjugated flavor)
//   Conv      - causal convolution wrapper; arg is the wrapped monomial,
//               kept as a canonically sorted atom multiset
//   Tok       - smooth multiplier token
//   PairLeg   - a leg consumed by a covariance contraction; two atoms with
//               the same pair id form one kernel edge, bar tells which side
//               of the (plain, conjugated) pair this atom is
//   OpSlot    - argument hole of an operator-valued expression
struct Atom {
    enum class Kind : uint8_t { FieldLeg = 0, Conv, Tok, PairLeg, OpSlot };

    Kind kind = Kind::FieldLeg;
    bool bar = false;
    Token token = Token::C;
    int pair = -1;
    std::vector<Atom> arg;

    static Atom field(bool b) { Atom a; a.kind = Kind::FieldLeg; a.bar = b; return a; }
    static Atom tok(Token t) { Atom a; a.kind = Kind::Tok; a.token = t; return a; }
    static Atom conv(bool b, std::vector<Atom> inner) {
        Atom a; a.kind = Kind::Conv; a.bar = b; a.arg = std::move(inner); return a;
    }
    static Atom pair_leg(bool bar_side, int id) {
        Atom a; a.kind = Kind::PairLeg; a.bar = bar_side; a.pair = id; return a;
    }
    static Atom op_slot() { Atom a; a.kind = Kind::OpSlot; return a; }
};

int cmp(const Atom& a, const Atom& b);
bool operator==(const Atom& a, const Atom& b);
inline bool operator<(const Atom& a, const Atom& b) { return cmp(a, b) < 0; }

// One monomial of a (possibly multilocal) expression. `slots` holds the atom
// multiset at each tensor slot; contraction pair ids are scoped to the term.
struct Term {
    Rational coeff = Rational(1);
    int lambda = 0;
    std::vector<std::vector<Atom>> slots;

    Term() : slots(1) {}
    explicit Term(int nslots) : slots(nslots) {}
};

struct Grading {
    int m = 0;       // plain field degree
    int mbar = 0;    // conjugated field degree
    int l = 0;       // plain convolution count
    int lbar = 0;    // conjugated convolution count
    friend bool operator==(const Grading&, const Grading&) = default;
};

// Formal sum of monomials with exact rational coefficients and a lambda
// grading. Always kept in canonical form: atoms sorted, pair ids canonical,
// like terms merged, zero terms dropped. Immutable once built.
class Expr {
public:
    Expr() = default;
    explicit Expr(int nslots) : nslots_(nslots) {}
    static Expr zero(int nslots = 1) { return Expr(nslots); }
    static Expr from_terms(int nslots, std::vector<Term> ts);

    int slot_count() const { return nslots_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    int nslots_ = 1;
    std::vector<Term> terms_;
};

enum class Gen { One, Phi, PhiBar };

Expr make_generator(Gen kind);
Expr add(const Expr& a, const Expr& b);
Expr scale(const Expr& a, const Rational& c);
Expr mul_lambda(const Expr& a, int power);
Expr multiply(const Expr& a, const Expr& b);          // pointwise, local only
Expr conjugate(const Expr& a);
Expr convolve(bool bar, const Expr& a);               // local only
Expr tensor(const Expr& a, const Expr& b);            // slot concatenation
Expr truncate_lambda(const Expr& a, int max_power);
Expr lambda_coefficient(const Expr& a, int power);

// Legs at the top level of a monomial's slot; legs inside Conv arguments
// belong to the inner expression.
struct LegCount { int phi = 0; int phibar = 0; };
LegCount leg_count(const Term& t, int slot = 0);
LegCount leg_count_recursive(const Term& t);

Grading grading(const Term& t);
Grading grading(const Expr& e);          // componentwise max over terms
int conv_depth(const Expr& e);

// Drops every monomial carrying a field leg or an eta token anywhere,
// including inside convolution arguments. What survives is a pure kernel
// expression.
Expr evaluate_at_zero(const Expr& a);
// Binds field legs to the background configuration instead of dropping them.
Expr evaluate_at_eta(const Expr& a);

bool has_op_slot(const Term& t);
// Grafts `arg` into the unique OpSlot of every monomial of `op`.
Expr apply_operator(const Expr& op, const Expr& arg);

std::string term_key(const Term& t);     // canonical key, coefficient excluded
std::string pretty(const Term& t);
std::string pretty(const Expr& e);

} // namespace snse::sym
