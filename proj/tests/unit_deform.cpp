#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "snse/acceptance.hpp"
#include "snse/deform.hpp"
#include "snse/diagram.hpp"

using namespace snse;
using namespace snse::sym;
using namespace snse::deform;

namespace {

Expr phi() { return make_generator(Gen::Phi); }
Expr phibar() { return make_generator(Gen::PhiBar); }
Expr one() { return make_generator(Gen::One); }

Expr pow_of(const Expr& e, int n) {
    Expr acc = one();
    for (int i = 0; i < n; ++i) acc = multiply(acc, e);
    return acc;
}

Expr token(Token t, const Rational& c = Rational(1)) {
    Term term;
    term.coeff = c;
    term.slots[0] = {Atom::tok(t)};
    return Expr::from_terms(1, {term});
}

Expr random_monomial_list_entry(std::mt19937_64& rng) {
    Term t;
    int a = int(rng() % 3), b = int(rng() % 3);
    if (a + b == 0) a = 1;
    for (int i = 0; i < a; ++i) t.slots[0].push_back(Atom::field(false));
    for (int i = 0; i < b; ++i) t.slots[0].push_back(Atom::field(true));
    return Expr::from_terms(1, {t});
}

} // namespace

TEST_CASE("deformed product on generator pairs") {
    // phi .Q phi has no admissible pairing
    CHECK(deformed_product(phi(), phi()) == pow_of(phi(), 2));

    // phi .Q phibar: plain leg left, conjugated right -> C token
    Expr got = deformed_product(phi(), phibar());
    CHECK(got == add(multiply(phi(), phibar()), token(Token::C)));

    // phibar .Q phi: conjugated leg left -> Cbar token
    Expr got2 = deformed_product(phibar(), phi());
    CHECK(got2 == add(multiply(phi(), phibar()), token(Token::Cbar)));

    // phibar .Q phi^2 = phibar phi^2 + 2 Cbar phi
    Expr got3 = deformed_product(phibar(), pow_of(phi(), 2));
    Expr want3 = add(multiply(phibar(), pow_of(phi(), 2)),
                     multiply(token(Token::Cbar, Rational(2)), phi()));
    CHECK(got3 == want3);
}

TEST_CASE("gamma fixes single-leg moduli and the unit") {
    CHECK(gamma_dot({phi()}) == phi());
    CHECK(gamma_dot({phibar()}) == phibar());
    CHECK(gamma_dot({one(), phibar()}) == phibar());
    CHECK(gamma_dot({token(Token::Cbar)}) == token(Token::Cbar));
}

TEST_CASE("gamma on the first perturbative coefficient") {
    Expr got = gamma_dot({phibar(), phi(), phi()});
    Expr want = add(multiply(phibar(), pow_of(phi(), 2)),
                    multiply(token(Token::Cbar, Rational(2)), phi()));
    CHECK(got == want);

    // the deformation passes through the convolution wrapper
    Expr f1 = convolve(false, multiply(phibar(), pow_of(phi(), 2)));
    CHECK(gamma_dot({f1}) == convolve(false, want));
}

TEST_CASE("gamma on a two-by-two product") {
    // [phi, phi, phibar, phibar]: 4 single pairings and 2 double pairings
    Expr got = gamma_dot({phi(), phi(), phibar(), phibar()});
    Expr want = multiply(pow_of(phi(), 2), pow_of(phibar(), 2));
    want = add(want, multiply(token(Token::C, Rational(4)), multiply(phi(), phibar())));
    want = add(want, scale(multiply(token(Token::C), token(Token::C)), Rational(2)));
    CHECK(got == want);
}

TEST_CASE("deformed product is associative") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 80; ++i) {
        Expr a = random_monomial_list_entry(rng);
        Expr b = random_monomial_list_entry(rng);
        Expr c = random_monomial_list_entry(rng);
        CHECK(deformed_product(deformed_product(a, b), c) ==
              deformed_product(a, deformed_product(b, c)));
    }
}

TEST_CASE("gamma is equivariant under conjugating a generator list") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 100; ++i) {
        int n = 1 + int(rng() % 6);
        std::vector<Expr> xs, cxs;
        for (int j = 0; j < n; ++j) {
            bool bar = rng() % 2;
            xs.push_back(bar ? phibar() : phi());
            cxs.push_back(bar ? phi() : phibar());
        }
        CHECK(conjugate(gamma_dot(xs)) == gamma_dot(cxs));
    }
}

TEST_CASE("pairing completeness against the flat matching oracle") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 60; ++i) {
        int nf = 1 + int(rng() % 3);
        std::vector<std::pair<int, int>> factors;
        std::vector<Expr> entries;
        int total = 0;
        for (int f = 0; f < nf; ++f) {
            int a = int(rng() % 3), b = int(rng() % 3);
            if (a + b == 0) b = 1;
            if (total + a + b > 8) break;
            total += a + b;
            factors.push_back({a, b});
            Term t;
            for (int x = 0; x < a; ++x) t.slots[0].push_back(Atom::field(false));
            for (int x = 0; x < b; ++x) t.slots[0].push_back(Atom::field(true));
            entries.push_back(Expr::from_terms(1, {t}));
        }
        if (entries.empty()) continue;
        CHECK(gamma_dot(entries) == oracle::wick_enumerate(factors));
    }
}

TEST_CASE("gamma rejects unresolved contraction markers") {
    Term t;
    t.slots[0] = {Atom::pair_leg(false, 0), Atom::pair_leg(true, 0)};
    CHECK_THROWS(gamma(Expr::from_terms(1, {t})));
}

TEST_CASE("bullet product over two slots") {
    // phi (.) phibar: tensor term plus one cross-slot edge
    Expr b = bullet_product({phi(), phibar()});
    REQUIRE(b.slot_count() == 2);
    CHECK(b.terms().size() == 2);

    // phi (.) phi: no admissible cross pairing
    Expr b2 = bullet_product({phi(), phi()});
    CHECK(b2.terms().size() == 1);
    CHECK(evaluate_at_zero(b2).is_zero());

    // slots are never merged: base-base cross pairs become kernel edges,
    // not coinciding-point tokens
    Expr at_zero = evaluate_at_zero(b);
    REQUIRE(at_zero.terms().size() == 1);
    const Term& t = at_zero.terms()[0];
    REQUIRE(t.slots[0].size() == 1);
    CHECK(t.slots[0][0].kind == Atom::Kind::PairLeg);
    CHECK_FALSE(t.slots[0][0].bar);
    CHECK(t.slots[1][0].kind == Atom::Kind::PairLeg);
    CHECK(t.slots[1][0].bar);
}

TEST_CASE("bullet of a deformed coefficient against a conjugate slot") {
    // slot 1 = G ** (phibar phi^2 + 2 Cbar phi), slot 2 = phibar: the
    // grouped result is the tensor part, the leg-contraction part and the
    // coinciding-point part 2 Qbar.(G ** Cbar 1 (x) 1)
    Expr slot1 = convolve(false, add(multiply(phibar(), pow_of(phi(), 2)),
                                     multiply(token(Token::Cbar, Rational(2)), phi())));
    Expr b = bullet_product({slot1, phibar()});
    CHECK(b.terms().size() == 4);   // the two equivalent leg pairings merge

    Expr kernels = evaluate_at_zero(b);
    REQUIRE(kernels.terms().size() == 1);
    auto ds = to_diagrams(kernels, {"x1", "x2"}, true);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].symmetry_factor == Rational(2));
    CHECK(ds[0].edges ==
          std::vector<Diagram::Edge>{{0, 2, EdgeKind::G}, {1, 2, EdgeKind::Qbar}});
    CHECK(ds[0].vertices[2].decorations == std::vector<Decoration>{Decoration::Cbar});
}

TEST_CASE("slot locality: disjoint slot groups factorize") {
    Expr b4 = bullet_product({phi(), phibar(), phi(), phibar()});
    Expr z = evaluate_at_zero(b4);
    // full contractions at eta = 0: slots (1,2)(3,4) and (1,4)(3,2)
    CHECK(z.terms().size() == 2);
    Expr b2 = evaluate_at_zero(bullet_product({phi(), phibar()}));
    Expr t22 = tensor(b2, b2);
    bool found = false;
    for (const auto& t : z.terms())
        if (term_key(t) == term_key(t22.terms()[0])) found = true;
    CHECK(found);
}

TEST_CASE("diagram emission matches the worked kernels") {
    // Cbar 1: one external slot carrying the token
    Expr ce = token(Token::Cbar);
    auto ds = to_diagrams(ce, {"x1"});
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].vertices.size() == 1);
    CHECK(ds[0].vertices[0].external);
    CHECK(ds[0].vertices[0].decorations == std::vector<Decoration>{Decoration::Cbar});
    CHECK(ds[0].edges.empty());

    // cross-slot edge: two externals joined by one Q edge
    Expr b = evaluate_at_zero(bullet_product({phi(), phibar()}));
    auto dq = to_diagrams(b, {"x1", "x2"}, true);
    REQUIRE(dq.size() == 1);
    CHECK(dq[0].edges == std::vector<Diagram::Edge>{{0, 1, EdgeKind::Q}});

    // 2 Qbar . (G ** Cbar 1 (x) 1): externals x1 x2, internal y with Cbar,
    // G edge from x1 into y, conjugate covariance edge listing x2 first
    Term t(2);
    t.coeff = Rational(2);
    t.lambda = 1;
    t.slots[0] = {Atom::conv(false, {Atom::tok(Token::Cbar), Atom::pair_leg(false, 0)})};
    t.slots[1] = {Atom::pair_leg(true, 0)};
    auto dd = to_diagrams(Expr::from_terms(2, {t}), {"x1", "x2"}, true);
    REQUIRE(dd.size() == 1);
    CHECK(dd[0].vertices.size() == 3);
    CHECK(dd[0].vertices[2].decorations == std::vector<Decoration>{Decoration::Cbar});
    CHECK(dd[0].edges ==
          std::vector<Diagram::Edge>{{0, 2, EdgeKind::G}, {1, 2, EdgeKind::Qbar}});
    CHECK(dd[0].symmetry_factor == Rational(2));
    CHECK(dd[0].lambda_power == 1);

    // strict mode rejects leftover legs
    CHECK_THROWS(to_diagrams(phi(), {"x1"}, true));
    auto dl = to_diagrams(phi(), {"x1"}, false);
    CHECK(dl[0].vertices[0].decorations == std::vector<Decoration>{Decoration::EtaLeg});
}

TEST_CASE("diagram json and dot round trips") {
    Term t(2);
    t.coeff = Rational(2);
    t.lambda = 1;
    t.slots[0] = {Atom::conv(false, {Atom::tok(Token::Cbar), Atom::pair_leg(false, 0)})};
    t.slots[1] = {Atom::pair_leg(true, 0)};
    auto ds = to_diagrams(Expr::from_terms(2, {t}), {"x1", "x2"});
    Diagram back = diagram_from_json(to_json(ds[0]));
    CHECK(back == ds[0]);
    std::string dot = to_dot(ds[0]);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("Qbar") != std::string::npos);
}

TEST_CASE("counterterm shifts expand coinciding-point tokens") {
    Expr e = deformed_product(phi(), phibar());
    CountertermShift sh;
    Expr shifted = apply_counterterm_shift(e, sh);
    Expr want = add(e, token(Token::DeltaC));
    CHECK(shifted == want);

    std::mt19937_64 rng(41);
    for (int i = 0; i < 40; ++i) {
        Expr a = gamma_dot({random_monomial_list_entry(rng), random_monomial_list_entry(rng)});
        // shift commutes with the convolution wrapper
        CHECK(apply_counterterm_shift(convolve(false, a), sh) ==
              convolve(false, apply_counterterm_shift(a, sh)));
        // zero shift: dropping the delta terms restores the input
        CHECK(drop_shift_terms(apply_counterterm_shift(a, sh)) == a);
    }

    // a grading window suppresses the shift on low-degree terms
    CountertermShift windowed;
    windowed.window = std::make_pair(0, 0);   // vanishes when m <= 1 or mbar <= 1
    Expr low = gamma_dot({phibar(), phi()});
    CHECK(apply_counterterm_shift(low, windowed) == low);
    Expr high = gamma_dot({phibar(), phibar(), phibar(), phi(), phi(), phi()});
    CHECK(apply_counterterm_shift(high, windowed) != high);
}
