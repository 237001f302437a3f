#include "snse/expr.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace snse::sym {

int cmp(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return int(a.kind) < int(b.kind) ? -1 : 1;
    if (a.bar != b.bar) return a.bar ? 1 : -1;
    switch (a.kind) {
    case Atom::Kind::FieldLeg:
    case Atom::Kind::OpSlot:
        return 0;
    case Atom::Kind::Tok:
        if (a.token != b.token) return int(a.token) < int(b.token) ? -1 : 1;
        return 0;
    case Atom::Kind::PairLeg:
        if (a.pair != b.pair) return a.pair < b.pair ? -1 : 1;
        return 0;
    case Atom::Kind::Conv: {
        size_t n = std::min(a.arg.size(), b.arg.size());
        for (size_t i = 0; i < n; ++i) {
            int c = cmp(a.arg[i], b.arg[i]);
            if (c != 0) return c;
        }
        if (a.arg.size() != b.arg.size()) return a.arg.size() < b.arg.size() ? -1 : 1;
        return 0;
    }
    }
    return 0;
}

bool operator==(const Atom& a, const Atom& b) { return cmp(a, b) == 0; }

namespace {

void deep_sort(std::vector<Atom>& atoms) {
    for (auto& a : atoms)
        if (a.kind == Atom::Kind::Conv) deep_sort(a.arg);
    std::sort(atoms.begin(), atoms.end());
}

void collect_pairs(const std::vector<Atom>& atoms, std::vector<int>& ids) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) {
            if (std::find(ids.begin(), ids.end(), a.pair) == ids.end())
                ids.push_back(a.pair);
        } else if (a.kind == Atom::Kind::Conv) {
            collect_pairs(a.arg, ids);
        }
    }
}

void relabel_pairs(std::vector<Atom>& atoms, const std::map<int, int>& map) {
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) a.pair = map.at(a.pair);
        else if (a.kind == Atom::Kind::Conv) relabel_pairs(a.arg, map);
    }
}

void offset_pairs(std::vector<Atom>& atoms, int offset) {
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) a.pair += offset;
        else if (a.kind == Atom::Kind::Conv) offset_pairs(a.arg, offset);
    }
}

int max_pair_id(const std::vector<Atom>& atoms) {
    int m = -1;
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::PairLeg) m = std::max(m, a.pair);
        else if (a.kind == Atom::Kind::Conv) m = std::max(m, max_pair_id(a.arg));
    }
    return m;
}

void serialize_atoms(const std::vector<Atom>& atoms, std::string& out) {
    for (const auto& a : atoms) {
        out.push_back(char('A' + int(a.kind)));
        out.push_back(a.bar ? '1' : '0');
        if (a.kind == Atom::Kind::Tok) out.push_back(char('a' + int(a.token)));
        if (a.kind == Atom::Kind::PairLeg) out += std::to_string(a.pair);
        if (a.kind == Atom::Kind::Conv) {
            out.push_back('(');
            serialize_atoms(a.arg, out);
            out.push_back(')');
        }
    }
}

std::string serialize_term(const Term& t) {
    std::string out = std::to_string(t.lambda);
    for (const auto& s : t.slots) {
        out.push_back('[');
        serialize_atoms(s, out);
        out.push_back(']');
    }
    return out;
}

// Canonical form of one term: deep-sorted atoms with contraction pair ids
// relabeled to the permutation minimizing the serialized key. Pair counts are
// tiny here, so exhaustive minimization is cheap and exact.
void canon_term(Term& t) {
    for (auto& s : t.slots) deep_sort(s);
    std::vector<int> ids;
    for (const auto& s : t.slots) collect_pairs(s, ids);
    if (ids.empty()) return;

    std::vector<int> perm(ids.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(ids.begin(), ids.end());

    bool first = true;
    std::string best_key;
    Term best = t;
    do {
        std::map<int, int> map;
        for (size_t i = 0; i < ids.size(); ++i) map[ids[i]] = perm[i];
        Term trial = t;
        for (auto& s : trial.slots) {
            relabel_pairs(s, map);
            deep_sort(s);
        }
        std::string key = serialize_term(trial);
        if (first || key < best_key) {
            first = false;
            best_key = std::move(key);
            best = std::move(trial);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    t = std::move(best);
}

std::vector<Term> normalize(int nslots, std::vector<Term> ts) {
    for (auto& t : ts) {
        if (int(t.slots.size()) != nslots)
            throw std::invalid_argument("term slot count mismatch");
        canon_term(t);
    }
    std::vector<std::pair<std::string, size_t>> keyed(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) keyed[i] = {serialize_term(ts[i]), i};
    std::sort(keyed.begin(), keyed.end());

    std::vector<Term> out;
    for (size_t i = 0; i < keyed.size();) {
        size_t j = i;
        Term merged = ts[keyed[i].second];
        for (++j; j < keyed.size() && keyed[j].first == keyed[i].first; ++j)
            merged.coeff += ts[keyed[j].second].coeff;
        if (!merged.coeff.is_zero()) out.push_back(std::move(merged));
        i = j;
    }
    return out;
}

bool contains_leg_or_eta(const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg) return true;
        if (a.kind == Atom::Kind::Tok && (a.token == Token::Eta || a.token == Token::EtaBar))
            return true;
        if (a.kind == Atom::Kind::Conv && contains_leg_or_eta(a.arg)) return true;
    }
    return false;
}

void legs_to_eta(std::vector<Atom>& atoms) {
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg)
            a = Atom::tok(a.bar ? Token::EtaBar : Token::Eta);
        else if (a.kind == Atom::Kind::Conv)
            legs_to_eta(a.arg);
    }
}

void conj_atoms(std::vector<Atom>& atoms) {
    for (auto& a : atoms) {
        switch (a.kind) {
        case Atom::Kind::FieldLeg:
        case Atom::Kind::PairLeg:
            a.bar = !a.bar;
            break;
        case Atom::Kind::Conv:
            a.bar = !a.bar;
            conj_atoms(a.arg);
            break;
        case Atom::Kind::Tok:
            switch (a.token) {
            case Token::C: a.token = Token::Cbar; break;
            case Token::Cbar: a.token = Token::C; break;
            case Token::Eta: a.token = Token::EtaBar; break;
            case Token::EtaBar: a.token = Token::Eta; break;
            case Token::DeltaC: a.token = Token::DeltaCbar; break;
            case Token::DeltaCbar: a.token = Token::DeltaC; break;
            case Token::Chi: break;
            }
            break;
        case Atom::Kind::OpSlot:
            break;
        }
    }
}

void accumulate_grading(const std::vector<Atom>& atoms, Grading& g) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg) {
            if (a.bar) ++g.mbar; else ++g.m;
        } else if (a.kind == Atom::Kind::Conv) {
            if (a.bar) ++g.lbar; else ++g.l;
            accumulate_grading(a.arg, g);
        }
    }
}

int depth_of(const std::vector<Atom>& atoms) {
    int d = 0;
    for (const auto& a : atoms)
        if (a.kind == Atom::Kind::Conv) d = std::max(d, 1 + depth_of(a.arg));
    return d;
}

bool replace_first_slot(std::vector<Atom>& atoms, const std::vector<Atom>& repl) {
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].kind == Atom::Kind::OpSlot) {
            atoms.erase(atoms.begin() + i);
            atoms.insert(atoms.end(), repl.begin(), repl.end());
            return true;
        }
        if (atoms[i].kind == Atom::Kind::Conv && replace_first_slot(atoms[i].arg, repl))
            return true;
    }
    return false;
}

bool term_has_slot(const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        if (a.kind == Atom::Kind::OpSlot) return true;
        if (a.kind == Atom::Kind::Conv && term_has_slot(a.arg)) return true;
    }
    return false;
}

} // namespace

Expr Expr::from_terms(int nslots, std::vector<Term> ts) {
    Expr e(nslots);
    e.terms_ = normalize(nslots, std::move(ts));
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.nslots_ != b.nslots_ || a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i) {
        const Term& ta = a.terms_[i];
        const Term& tb = b.terms_[i];
        if (ta.coeff != tb.coeff || ta.lambda != tb.lambda) return false;
        if (serialize_term(ta) != serialize_term(tb)) return false;
    }
    return true;
}

Expr make_generator(Gen kind) {
    Term t;
    if (kind == Gen::Phi) t.slots[0].push_back(Atom::field(false));
    if (kind == Gen::PhiBar) t.slots[0].push_back(Atom::field(true));
    return Expr::from_terms(1, {t});
}

Expr add(const Expr& a, const Expr& b) {
    if (a.slot_count() != b.slot_count())
        throw std::invalid_argument("add: slot count mismatch");
    std::vector<Term> ts = a.terms();
    ts.insert(ts.end(), b.terms().begin(), b.terms().end());
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr scale(const Expr& a, const Rational& c) {
    std::vector<Term> ts = a.terms();
    for (auto& t : ts) t.coeff *= c;
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr mul_lambda(const Expr& a, int power) {
    std::vector<Term> ts = a.terms();
    for (auto& t : ts) t.lambda += power;
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr multiply(const Expr& a, const Expr& b) {
    if (a.slot_count() != 1 || b.slot_count() != 1)
        throw std::invalid_argument("multiply: pointwise product is local");
    std::vector<Term> ts;
    for (const auto& ta : a.terms()) {
        int off = max_pair_id(ta.slots[0]) + 1;
        for (const auto& tb : b.terms()) {
            Term t;
            t.coeff = ta.coeff * tb.coeff;
            t.lambda = ta.lambda + tb.lambda;
            t.slots[0] = ta.slots[0];
            std::vector<Atom> rhs = tb.slots[0];
            offset_pairs(rhs, off);
            t.slots[0].insert(t.slots[0].end(), rhs.begin(), rhs.end());
            ts.push_back(std::move(t));
        }
    }
    return Expr::from_terms(1, std::move(ts));
}

Expr conjugate(const Expr& a) {
    std::vector<Term> ts = a.terms();
    for (auto& t : ts)
        for (auto& s : t.slots) conj_atoms(s);
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr convolve(bool bar, const Expr& a) {
    if (a.slot_count() != 1)
        throw std::invalid_argument("convolve: local expressions only");
    std::vector<Term> ts;
    for (const auto& ta : a.terms()) {
        Term t;
        t.coeff = ta.coeff;
        t.lambda = ta.lambda;
        t.slots[0].push_back(Atom::conv(bar, ta.slots[0]));
        ts.push_back(std::move(t));
    }
    return Expr::from_terms(1, std::move(ts));
}

Expr tensor(const Expr& a, const Expr& b) {
    std::vector<Term> ts;
    for (const auto& ta : a.terms()) {
        int off = 0;
        for (const auto& s : ta.slots) off = std::max(off, max_pair_id(s) + 1);
        for (const auto& tb : b.terms()) {
            Term t(a.slot_count() + b.slot_count());
            t.coeff = ta.coeff * tb.coeff;
            t.lambda = ta.lambda + tb.lambda;
            for (int i = 0; i < a.slot_count(); ++i) t.slots[i] = ta.slots[i];
            for (int i = 0; i < b.slot_count(); ++i) {
                t.slots[a.slot_count() + i] = tb.slots[i];
                offset_pairs(t.slots[a.slot_count() + i], off);
            }
            ts.push_back(std::move(t));
        }
    }
    return Expr::from_terms(a.slot_count() + b.slot_count(), std::move(ts));
}

Expr truncate_lambda(const Expr& a, int max_power) {
    std::vector<Term> ts;
    for (const auto& t : a.terms())
        if (t.lambda <= max_power) ts.push_back(t);
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr lambda_coefficient(const Expr& a, int power) {
    std::vector<Term> ts;
    for (const auto& t : a.terms())
        if (t.lambda == power) {
            Term c = t;
            c.lambda = 0;
            ts.push_back(std::move(c));
        }
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

LegCount leg_count(const Term& t, int slot) {
    LegCount lc;
    for (const auto& a : t.slots.at(slot))
        if (a.kind == Atom::Kind::FieldLeg) (a.bar ? lc.phibar : lc.phi)++;
    return lc;
}

LegCount leg_count_recursive(const Term& t) {
    LegCount lc;
    for (const auto& s : t.slots) {
        Grading g;
        accumulate_grading(s, g);
        lc.phi += g.m;
        lc.phibar += g.mbar;
    }
    return lc;
}

Grading grading(const Term& t) {
    Grading g;
    for (const auto& s : t.slots) accumulate_grading(s, g);
    return g;
}

Grading grading(const Expr& e) {
    Grading g;
    for (const auto& t : e.terms()) {
        Grading tg = grading(t);
        g.m = std::max(g.m, tg.m);
        g.mbar = std::max(g.mbar, tg.mbar);
        g.l = std::max(g.l, tg.l);
        g.lbar = std::max(g.lbar, tg.lbar);
    }
    return g;
}

int conv_depth(const Expr& e) {
    int d = 0;
    for (const auto& t : e.terms())
        for (const auto& s : t.slots) d = std::max(d, depth_of(s));
    return d;
}

Expr evaluate_at_zero(const Expr& a) {
    std::vector<Term> ts;
    for (const auto& t : a.terms()) {
        bool dead = false;
        for (const auto& s : t.slots)
            if (contains_leg_or_eta(s)) { dead = true; break; }
        if (!dead) ts.push_back(t);
    }
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

Expr evaluate_at_eta(const Expr& a) {
    std::vector<Term> ts = a.terms();
    for (auto& t : ts)
        for (auto& s : t.slots) legs_to_eta(s);
    return Expr::from_terms(a.slot_count(), std::move(ts));
}

bool has_op_slot(const Term& t) {
    for (const auto& s : t.slots)
        if (term_has_slot(s)) return true;
    return false;
}

Expr apply_operator(const Expr& op, const Expr& arg) {
    if (op.slot_count() != 1 || arg.slot_count() != 1)
        throw std::invalid_argument("apply_operator: local expressions only");
    std::vector<Term> ts;
    for (const auto& to : op.terms()) {
        if (!term_has_slot(to.slots[0]))
            throw std::invalid_argument("apply_operator: operator term lacks a slot");
        int off = max_pair_id(to.slots[0]) + 1;
        for (const auto& ta : arg.terms()) {
            Term t = to;
            t.coeff = to.coeff * ta.coeff;
            t.lambda = to.lambda + ta.lambda;
            std::vector<Atom> repl = ta.slots[0];
            offset_pairs(repl, off);
            replace_first_slot(t.slots[0], repl);
            ts.push_back(std::move(t));
        }
    }
    return Expr::from_terms(1, std::move(ts));
}

std::string term_key(const Term& t) {
    Term c = t;
    canon_term(c);
    return serialize_term(c);
}

namespace {

void pretty_atoms(const std::vector<Atom>& atoms, std::string& out) {
    if (atoms.empty()) { out += "1"; return; }
    size_t i = 0;
    while (i < atoms.size()) {
        size_t j = i;
        while (j < atoms.size() && cmp(atoms[j], atoms[i]) == 0) ++j;
        size_t count = j - i;
        const Atom& a = atoms[i];
        std::string sym;
        switch (a.kind) {
        case Atom::Kind::FieldLeg: sym = a.bar ? "Φ̅" : "Φ"; break;
        case Atom::Kind::Tok:
            switch (a.token) {
            case Token::C: sym = "C"; break;
            case Token::Cbar: sym = "C̅"; break;
            case Token::Chi: sym = "χ"; break;
            case Token::Eta: sym = "η"; break;
            case Token::EtaBar: sym = "η̅"; break;
            case Token::DeltaC: sym = "δC"; break;
            case Token::DeltaCbar: sym = "δC̅"; break;
            }
            break;
        case Atom::Kind::PairLeg:
            sym = (a.bar ? "q̅" : "q") + std::to_string(a.pair);
            break;
        case Atom::Kind::OpSlot: sym = "□"; break;
        case Atom::Kind::Conv: {
            std::string inner;
            pretty_atoms(a.arg, inner);
            sym = (a.bar ? "G̅⊛(" : "G⊛(") + inner + ")";
            break;
        }
        }
        out += sym;
        if (count > 1) out += "^" + std::to_string(count);
        i = j;
    }
}

} // namespace

std::string pretty(const Term& t) {
    std::string out;
    if (!t.coeff.is_one()) out += t.coeff.str() + " ";
    if (t.lambda > 0) {
        out += "λ";
        if (t.lambda > 1) out += "^" + std::to_string(t.lambda);
        out += " ";
    }
    bool first = true;
    for (const auto& s : t.slots) {
        if (!first) out += " ⊗ ";
        first = false;
        pretty_atoms(s, out);
    }
    return out;
}

std::string pretty(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    for (size_t i = 0; i < e.terms().size(); ++i) {
        if (i) out += " + ";
        out += pretty(e.terms()[i]);
    }
    return out;
}

} // namespace snse::sym
