#include "snse/perturbation.hpp"

#include <stdexcept>

namespace snse::perturb {

using deform::Diagram;
using sym::Atom;
using sym::Gen;
using sym::Term;

namespace {

// Ordered tuples (a_1..a_kappa, b_1..b_{kappa+1}) with given sum. The
// conjugated factors come first, matching the nonlinearity conj(Psi)^kappa
// Psi^(kappa+1).
void tuples_rec(int slots, int sum, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
    if (int(cur.size()) == slots - 1) {
        cur.push_back(sum);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= sum; ++v) {
        cur.push_back(v);
        tuples_rec(slots, sum - v, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> tuples(int slots, int sum) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    tuples_rec(slots, sum, cur, out);
    return out;
}

Expr fold_pointwise(const std::vector<Expr>& fs) {
    Expr acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = multiply(acc, fs[i]);
    return acc;
}

Expr fold_deformed(const std::vector<Expr>& fs) {
    Expr acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = deform::deformed_product(acc, fs[i]);
    return acc;
}

// Factor lists for order k: kappa conjugated coefficients followed by
// kappa+1 plain ones, orders summing to k-1.
std::vector<std::vector<Expr>> factor_lists(const std::vector<Expr>& coeff, int kappa, int k) {
    std::vector<std::vector<Expr>> lists;
    for (const auto& tp : tuples(2 * kappa + 1, k - 1)) {
        std::vector<Expr> fs;
        for (int i = 0; i < kappa; ++i) fs.push_back(conjugate(coeff[tp[i]]));
        for (int i = kappa; i < 2 * kappa + 1; ++i) fs.push_back(coeff[tp[i]]);
        lists.push_back(std::move(fs));
    }
    return lists;
}

} // namespace

PerturbativeSolution expand(int kappa, int order) {
    if (kappa < 1) throw std::invalid_argument("expand: kappa must be positive");
    if (order < 0) throw std::invalid_argument("expand: negative order");
    PerturbativeSolution sol;
    sol.kappa = kappa;
    sol.order = order;
    sol.coefficients.push_back(make_generator(Gen::Phi));
    sol.deformed.push_back(make_generator(Gen::Phi));
    for (int k = 1; k <= order; ++k) {
        Expr fk = Expr::zero(1);
        Expr gk = Expr::zero(1);
        for (const auto& tp : tuples(2 * kappa + 1, k - 1)) {
            std::vector<Expr> raw, def;
            for (int i = 0; i < kappa; ++i) {
                raw.push_back(conjugate(sol.coefficients[tp[i]]));
                def.push_back(conjugate(sol.deformed[tp[i]]));
            }
            for (int i = kappa; i < 2 * kappa + 1; ++i) {
                raw.push_back(sol.coefficients[tp[i]]);
                def.push_back(sol.deformed[tp[i]]);
            }
            fk = add(fk, convolve(false, fold_pointwise(raw)));
            gk = add(gk, convolve(false, fold_deformed(def)));
        }
        sol.coefficients.push_back(std::move(fk));
        sol.deformed.push_back(std::move(gk));
    }
    return sol;
}

Expr expectation(const PerturbativeSolution& sol, int order) {
    if (order > sol.order) throw std::invalid_argument("expectation: order beyond expansion");
    Expr acc = Expr::zero(1);
    for (int k = 0; k <= order; ++k)
        acc = add(acc, mul_lambda(evaluate_at_zero(sol.deformed[k]), k));
    return acc;
}

Expr expectation_shifted(const PerturbativeSolution& sol, int order) {
    if (order > sol.order) throw std::invalid_argument("expectation: order beyond expansion");
    Expr acc = Expr::zero(1);
    for (int k = 0; k <= order; ++k)
        acc = add(acc, mul_lambda(evaluate_at_eta(sol.deformed[k]), k));
    return acc;
}

namespace {

Expr truncated_series(const PerturbativeSolution& sol, int order, bool conj_slot) {
    Expr acc = Expr::zero(1);
    for (int k = 0; k <= order; ++k) {
        Expr c = conj_slot ? conjugate(sol.deformed[k]) : sol.deformed[k];
        acc = add(acc, mul_lambda(c, k));
    }
    return acc;
}

std::vector<Diagram> correlation(const PerturbativeSolution& sol,
                                 const std::vector<bool>& conj_pattern, int order) {
    if (order > sol.order) throw std::invalid_argument("correlation: order beyond expansion");
    std::vector<Expr> slots;
    for (bool c : conj_pattern) slots.push_back(truncated_series(sol, order, c));
    Expr bullet = deform::bullet_product(slots);
    Expr kernels = truncate_lambda(evaluate_at_zero(bullet), order);
    std::vector<std::string> labels;
    for (size_t i = 0; i < conj_pattern.size(); ++i)
        labels.push_back("x" + std::to_string(i + 1));
    return deform::to_diagrams(kernels, labels, true);
}

} // namespace

std::vector<Diagram> two_point(const PerturbativeSolution& sol, int order, bool conjugated) {
    return correlation(sol, {false, conjugated}, order);
}

std::vector<Diagram> m_point(const PerturbativeSolution& sol, int m, int order, bool strict) {
    if (m % 2 != 0) {
        if (strict)
            throw std::invalid_argument("m_point: odd correlation functions vanish; "
                                        "pass an even m");
        return {};
    }
    std::vector<bool> pattern;
    for (int i = 0; i < m; ++i) pattern.push_back(i % 2 == 1);
    return correlation(sol, pattern, order);
}

namespace {

// Replaces the first plain field leg (top level first, then convolution
// arguments in order) by the operator slot. Returns false when no plain leg
// exists.
bool slot_first_plain_leg(std::vector<Atom>& atoms) {
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::FieldLeg && !a.bar) {
            a = Atom::op_slot();
            return true;
        }
    }
    for (auto& a : atoms) {
        if (a.kind == Atom::Kind::Conv && slot_first_plain_leg(a.arg)) return true;
    }
    return false;
}

// rhs of the renormalized equation at lambda order k, given counterterm
// entries M_1..M_j for j < bound.
Expr rhs_at_order(const PerturbativeSolution& sol, const std::vector<Expr>& ms, int k) {
    Expr acc = Expr::zero(1);
    for (const auto& fs : factor_lists(sol.deformed, sol.kappa, k))
        acc = add(acc, convolve(false, fold_pointwise(fs)));
    for (int j = 1; j < k && j <= int(ms.size()); ++j)
        acc = add(acc, convolve(false, apply_operator(ms[j - 1], sol.deformed[k - j])));
    return acc;
}

} // namespace

CountertermSeries counterterms(const PerturbativeSolution& sol, int K) {
    if (K < 1) throw std::invalid_argument("counterterms: K must be >= 1");
    if (K > sol.order) throw std::invalid_argument("counterterms: K beyond expansion order");
    std::vector<Expr> ms;
    for (int k = 1; k <= K; ++k) {
        Expr residual = add(sol.deformed[k], scale(rhs_at_order(sol, ms, k), Rational(-1)));
        std::vector<Term> op_terms;
        for (const auto& t : residual.terms()) {
            if (t.slots[0].size() != 1 || t.slots[0][0].kind != Atom::Kind::Conv ||
                t.slots[0][0].bar)
                throw std::runtime_error(
                    "counterterms: residual term not of retarded-convolution form: " +
                    sym::pretty(t));
            Term inner;
            inner.coeff = t.coeff;
            inner.lambda = t.lambda;
            inner.slots[0] = t.slots[0][0].arg;
            if (!slot_first_plain_leg(inner.slots[0]))
                throw std::runtime_error(
                    "counterterms: residual term has no plain field leg, cannot be written "
                    "as an operator acting on the solution: " + sym::pretty(t));
            sym::Grading g = sym::grading(inner);
            if ((g.m + g.mbar) % 2 != 0)
                throw std::runtime_error(
                    "counterterms: extracted operator term has odd field degree: " +
                    sym::pretty(inner));
            op_terms.push_back(std::move(inner));
        }
        ms.push_back(Expr::from_terms(1, std::move(op_terms)));
    }
    CountertermSeries cts;
    cts.entries = std::move(ms);
    return cts;
}

VerifyReport verify_renormalized_equation(const PerturbativeSolution& sol,
                                          const CountertermSeries& cts, int K) {
    VerifyReport rep;
    if (K > sol.order || K > cts.order()) {
        rep.pass = false;
        rep.message = "verification order beyond available data";
        return rep;
    }
    for (int k = 1; k <= K; ++k) {
        Expr rhs = rhs_at_order(sol, cts.entries, k);
        rhs = add(rhs, convolve(false, apply_operator(cts.M(k), make_generator(Gen::Phi))));
        Expr diff = add(sol.deformed[k], scale(rhs, Rational(-1)));
        if (!diff.is_zero()) {
            rep.pass = false;
            rep.first_failing_order = k;
            rep.residual = mul_lambda(diff, k);
            rep.message = "first failure at order " + std::to_string(k) +
                          ", residual = " + sym::pretty(rep.residual);
            return rep;
        }
    }
    rep.message = "renormalized equation holds through order " + std::to_string(K);
    return rep;
}

} // namespace snse::perturb
