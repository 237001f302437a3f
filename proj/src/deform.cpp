#include "snse/deform.hpp"

#include <algorithm>
#include <stdexcept>

namespace snse::deform {

using sym::Atom;
using sym::Expr;
using sym::Gen;
using sym::Term;
using sym::Token;

namespace {

struct Leg {
    int id = 0;
    bool bar = false;
    bool at_base = false;
    int slot = 0;
};

void enumerate_legs(const std::vector<Atom>& atoms, bool at_base, int slot, int& counter,
                    std::vector<Leg>& out) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg)
            out.push_back({counter++, a.bar, at_base, slot});
        else if (a.kind == Atom::Kind::Conv)
            enumerate_legs(a.arg, false, slot, counter, out);
    }
}

struct LegAction {
    enum class What : uint8_t { Keep, Drop, ToPair };
    What what = What::Keep;
    bool pair_bar = false;
    int pair_id = -1;
};

std::vector<Atom> rewrite_legs(const std::vector<Atom>& atoms, int& counter,
                               const std::vector<LegAction>& actions) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg) {
            const LegAction& act = actions[counter++];
            if (act.what == LegAction::What::Keep) out.push_back(a);
            else if (act.what == LegAction::What::ToPair)
                out.push_back(Atom::pair_leg(act.pair_bar, act.pair_id));
        } else if (a.kind == Atom::Kind::Conv) {
            Atom c = a;
            c.arg = rewrite_legs(a.arg, counter, actions);
            out.push_back(std::move(c));
        } else {
            out.push_back(a);
        }
    }
    return out;
}

int max_pair(const std::vector<Atom>& atoms) {
    int m = -1;
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) m = std::max(m, a.pair);
        else if (a.kind == Atom::Kind::Conv) m = std::max(m, max_pair(a.arg));
    }
    return m;
}

void shift_pairs(std::vector<Atom>& atoms, int off) {
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) a.pair += off;
        else if (a.kind == Atom::Kind::Conv) shift_pairs(a.arg, off);
    }
}

// All partial injective matchings from xs into ys, each produced once.
void matchings_rec(const std::vector<int>& xs, const std::vector<int>& ys, size_t i,
                   std::vector<bool>& used, std::vector<std::pair<int, int>>& cur,
                   std::vector<std::vector<std::pair<int, int>>>& out) {
    if (i == xs.size()) {
        out.push_back(cur);
        return;
    }
    matchings_rec(xs, ys, i + 1, used, cur, out);
    for (size_t j = 0; j < ys.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        cur.emplace_back(xs[i], ys[j]);
        matchings_rec(xs, ys, i + 1, used, cur, out);
        cur.pop_back();
        used[j] = false;
    }
}

std::vector<std::vector<std::pair<int, int>>> matchings(const std::vector<int>& xs,
                                                        const std::vector<int>& ys) {
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<bool> used(ys.size(), false);
    std::vector<std::pair<int, int>> cur;
    matchings_rec(xs, ys, 0, used, cur, out);
    return out;
}

} // namespace

Expr deformed_product(const Expr& a, const Expr& b) {
    if (a.slot_count() != 1 || b.slot_count() != 1)
        throw std::invalid_argument("deformed_product: local expressions only");

    std::vector<Term> out;
    for (const auto& ta : a.terms()) {
        std::vector<Leg> legs_a;
        int na = 0;
        enumerate_legs(ta.slots[0], true, 0, na, legs_a);
        std::vector<int> phi_a, bar_a;
        for (const auto& l : legs_a) (l.bar ? bar_a : phi_a).push_back(l.id);

        for (const auto& tb : b.terms()) {
            std::vector<Leg> legs_b;
            int nb = 0;
            enumerate_legs(tb.slots[0], true, 0, nb, legs_b);
            std::vector<int> phi_b, bar_b;
            for (const auto& l : legs_b) (l.bar ? bar_b : phi_b).push_back(l.id);

            int off_b = max_pair(ta.slots[0]) + 1;
            std::vector<Atom> b_atoms = tb.slots[0];
            shift_pairs(b_atoms, off_b);
            int fresh0 = off_b + max_pair(tb.slots[0]) + 1;

            auto s1 = matchings(phi_a, bar_b);  // plain left, conjugated right
            auto s2 = matchings(bar_a, phi_b);  // conjugated left, plain right

            for (const auto& m1 : s1) {
                for (const auto& m2 : s2) {
                    std::vector<LegAction> act_a(na), act_b(nb);
                    std::vector<Atom> tokens;
                    int fresh = fresh0;
                    for (const auto& [x, y] : m1) {
                        if (legs_a[x].at_base && legs_b[y].at_base) {
                            act_a[x].what = LegAction::What::Drop;
                            act_b[y].what = LegAction::What::Drop;
                            tokens.push_back(Atom::tok(Token::C));
                        } else {
                            act_a[x] = {LegAction::What::ToPair, false, fresh};
                            act_b[y] = {LegAction::What::ToPair, true, fresh};
                            ++fresh;
                        }
                    }
                    for (const auto& [x, y] : m2) {
                        if (legs_a[x].at_base && legs_b[y].at_base) {
                            act_a[x].what = LegAction::What::Drop;
                            act_b[y].what = LegAction::What::Drop;
                            tokens.push_back(Atom::tok(Token::Cbar));
                        } else {
                            act_a[x] = {LegAction::What::ToPair, true, fresh};
                            act_b[y] = {LegAction::What::ToPair, false, fresh};
                            ++fresh;
                        }
                    }
                    Term t;
                    t.coeff = ta.coeff * tb.coeff;
                    t.lambda = ta.lambda + tb.lambda;
                    int ca = 0, cb = 0;
                    t.slots[0] = rewrite_legs(ta.slots[0], ca, act_a);
                    std::vector<Atom> rb = rewrite_legs(b_atoms, cb, act_b);
                    t.slots[0].insert(t.slots[0].end(), rb.begin(), rb.end());
                    t.slots[0].insert(t.slots[0].end(), tokens.begin(), tokens.end());
                    out.push_back(std::move(t));
                }
            }
        }
    }
    return Expr::from_terms(1, std::move(out));
}

namespace {

Expr gamma_term(const Term& t);

Expr gamma_impl(const Expr& e) {
    Expr acc = Expr::zero(1);
    for (const auto& t : e.terms()) acc = add(acc, gamma_term(t));
    return acc;
}

Expr gamma_term(const Term& t) {
    Term mult;
    mult.coeff = t.coeff;
    mult.lambda = t.lambda;
    std::vector<Expr> factors;
    std::vector<Atom> barred, plain;
    for (const auto& a : t.slots[0]) {
        switch (a.kind) {
        case Atom::Kind::FieldLeg:
            (a.bar ? barred : plain).push_back(a);
            break;
        case Atom::Kind::Conv: {
            Term inner;
            inner.slots[0] = a.arg;
            factors.push_back(convolve(a.bar, gamma_impl(Expr::from_terms(1, {inner}))));
            break;
        }
        case Atom::Kind::PairLeg:
            throw std::invalid_argument("gamma: unresolved contraction marker in input");
        default:
            mult.slots[0].push_back(a);
        }
    }
    // Conjugated legs fold before plain ones; this is the factor order the
    // perturbative recursion produces.
    std::vector<Expr> seq;
    seq.push_back(Expr::from_terms(1, {mult}));
    for (const auto& a : barred) {
        Term s;
        s.slots[0].push_back(a);
        seq.push_back(Expr::from_terms(1, {s}));
    }
    for (const auto& a : plain) {
        Term s;
        s.slots[0].push_back(a);
        seq.push_back(Expr::from_terms(1, {s}));
    }
    seq.insert(seq.end(), factors.begin(), factors.end());

    Expr acc = seq[0];
    for (size_t i = 1; i < seq.size(); ++i) acc = deformed_product(acc, seq[i]);
    return acc;
}

} // namespace

Expr gamma(const Expr& e) { return gamma_impl(e); }

Expr gamma_dot(const std::vector<Expr>& factors) {
    if (factors.empty()) return make_generator(Gen::One);
    Expr acc = gamma(factors[0]);
    for (size_t i = 1; i < factors.size(); ++i)
        acc = deformed_product(acc, gamma(factors[i]));
    return acc;
}

Expr bullet_product(const std::vector<Expr>& slots) {
    if (slots.empty()) throw std::invalid_argument("bullet_product: no slots");
    Expr prod = slots[0];
    for (size_t i = 1; i < slots.size(); ++i) prod = tensor(prod, slots[i]);

    std::vector<Term> out;
    for (const auto& t : prod.terms()) {
        std::vector<Leg> legs;
        int n = 0;
        for (int s = 0; s < prod.slot_count(); ++s)
            enumerate_legs(t.slots[s], true, s, n, legs);
        std::vector<int> phi, bar;
        for (const auto& l : legs) (l.bar ? bar : phi).push_back(l.id);

        int fresh0 = 0;
        for (const auto& s : t.slots) fresh0 = std::max(fresh0, max_pair(s) + 1);

        // Matchings of plain against conjugated legs living in distinct slots.
        auto ms = matchings(phi, bar);
        for (const auto& m : ms) {
            bool ok = true;
            for (const auto& [x, y] : m)
                if (legs[x].slot == legs[y].slot) { ok = false; break; }
            if (!ok) continue;
            std::vector<LegAction> act(n);
            int fresh = fresh0;
            for (const auto& [x, y] : m) {
                act[x] = {LegAction::What::ToPair, false, fresh};
                act[y] = {LegAction::What::ToPair, true, fresh};
                ++fresh;
            }
            Term nt(prod.slot_count());
            nt.coeff = t.coeff;
            nt.lambda = t.lambda;
            int c = 0;
            for (int s = 0; s < prod.slot_count(); ++s)
                nt.slots[s] = rewrite_legs(t.slots[s], c, act);
            out.push_back(std::move(nt));
        }
    }
    return Expr::from_terms(prod.slot_count(), std::move(out));
}

namespace {

void count_c_tokens(const std::vector<Atom>& atoms, int& n) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::Tok && (a.token == Token::C || a.token == Token::Cbar)) ++n;
        else if (a.kind == Atom::Kind::Conv) count_c_tokens(a.arg, n);
    }
}

std::vector<Atom> rewrite_c_tokens(const std::vector<Atom>& atoms, int& counter,
                                   const std::vector<bool>& to_delta) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::Tok && (a.token == Token::C || a.token == Token::Cbar)) {
            int id = counter++;
            if (to_delta[id]) {
                out.push_back(Atom::tok(a.token == Token::C ? Token::DeltaC : Token::DeltaCbar));
            } else {
                out.push_back(a);
            }
        } else if (a.kind == Atom::Kind::Conv) {
            Atom c = a;
            c.arg = rewrite_c_tokens(a.arg, counter, to_delta);
            out.push_back(std::move(c));
        } else {
            out.push_back(a);
        }
    }
    return out;
}

bool has_delta(const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::Tok &&
            (a.token == Token::DeltaC || a.token == Token::DeltaCbar))
            return true;
        if (a.kind == Atom::Kind::Conv && has_delta(a.arg)) return true;
    }
    return false;
}

} // namespace

Expr apply_counterterm_shift(const Expr& e, const CountertermShift& shift) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        if (shift.window) {
            sym::Grading g = sym::grading(t);
            if (g.m <= shift.window->first + 1 || g.mbar <= shift.window->second + 1) {
                out.push_back(t);
                continue;
            }
        }
        int n = 0;
        for (const auto& s : t.slots) count_c_tokens(s, n);
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<bool> to_delta(n);
            for (int i = 0; i < n; ++i) to_delta[i] = (mask >> i) & 1;
            Term nt = t;
            int c = 0;
            for (auto& s : nt.slots) s = rewrite_c_tokens(s, c, to_delta);
            out.push_back(std::move(nt));
        }
    }
    return Expr::from_terms(e.slot_count(), std::move(out));
}

Expr drop_shift_terms(const Expr& e) {
    std::vector<Term> out;
    for (const auto& t : e.terms()) {
        bool skip = false;
        for (const auto& s : t.slots)
            if (has_delta(s)) { skip = true; break; }
        if (!skip) out.push_back(t);
    }
    return Expr::from_terms(e.slot_count(), std::move(out));
}

} // namespace snse::deform
