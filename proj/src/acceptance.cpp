#include "snse/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "snse/deform.hpp"
#include "snse/diagram_eval.hpp"
#include "snse/graphs.hpp"
#include "snse/monte_carlo.hpp"
#include "snse/perturbation.hpp"
#include "snse/scaling.hpp"

namespace snse {

using deform::Decoration;
using deform::Diagram;
using deform::EdgeKind;
using num::cplx;
using num::Extension;
using num::Grid;
using num::LatticeSpec;
using num::TestFunction;
using sym::Atom;
using sym::Expr;
using sym::Term;
using sym::Token;

namespace oracle {

Expr wick_enumerate(const std::vector<std::pair<int, int>>& factors) {
    // flatten: conjugated legs first within each factor
    std::vector<bool> legs;   // true = conjugated
    for (const auto& [plain, conj] : factors) {
        for (int i = 0; i < conj; ++i) legs.push_back(true);
        for (int i = 0; i < plain; ++i) legs.push_back(false);
    }
    std::vector<int> plain_pos, conj_pos;
    for (size_t i = 0; i < legs.size(); ++i) (legs[i] ? conj_pos : plain_pos).push_back(int(i));

    std::vector<Term> terms;
    std::vector<bool> used(conj_pos.size(), false);
    // each partial matching of plain legs with conjugated legs contributes
    // one monomial; the pair whose conjugated leg comes first gives Cbar
    std::function<void(size_t, int, int)> rec = [&](size_t i, int n_c, int n_cbar) {
        if (i == plain_pos.size()) {
            int used_conj = n_c + n_cbar;
            Term t;
            for (int p = 0; p < int(plain_pos.size()) - (n_c + n_cbar); ++p)
                t.slots[0].push_back(Atom::field(false));
            for (int p = 0; p < int(conj_pos.size()) - used_conj; ++p)
                t.slots[0].push_back(Atom::field(true));
            for (int p = 0; p < n_c; ++p) t.slots[0].push_back(Atom::tok(Token::C));
            for (int p = 0; p < n_cbar; ++p) t.slots[0].push_back(Atom::tok(Token::Cbar));
            terms.push_back(std::move(t));
            return;
        }
        rec(i + 1, n_c, n_cbar);
        for (size_t j = 0; j < conj_pos.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            if (plain_pos[i] < conj_pos[j]) rec(i + 1, n_c + 1, n_cbar);
            else rec(i + 1, n_c, n_cbar + 1);
            used[j] = false;
        }
    };
    rec(0, 0, 0);
    return Expr::from_terms(1, std::move(terms));
}

} // namespace oracle

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string fmtc(cplx v) {
    std::ostringstream os;
    os.precision(6);
    os << v.real() << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i";
    return os.str();
}

// ---- criterion helpers -------------------------------------------------

CriterionResult vanishing_mean(const AcceptanceOptions& opt) {
    Timer timer;
    CriterionResult r{"vanishing_mean", true, "", 0.0};
    int k1 = opt.quick ? 3 : 4;
    int k2 = opt.quick ? 2 : 3;
    auto sol1 = perturb::expand(1, k1);
    for (int k = 0; k <= k1 && r.pass; ++k) {
        if (!perturb::expectation(sol1, k).is_zero()) {
            r.pass = false;
            r.details = "kappa=1 order " + std::to_string(k) + " nonzero";
        }
    }
    auto sol2 = perturb::expand(2, k2);
    for (int k = 0; k <= k2 && r.pass; ++k) {
        if (!perturb::expectation(sol2, k).is_zero()) {
            r.pass = false;
            r.details = "kappa=2 order " + std::to_string(k) + " nonzero";
        }
    }
    if (r.pass)
        r.details = "expectation vanishes: kappa=1 through order " + std::to_string(k1) +
                    ", kappa=2 through order " + std::to_string(k2);
    r.seconds = timer.seconds();
    return r;
}

Diagram expected_bare_covariance() {
    Diagram d;
    d.externals = {"x1", "x2"};
    d.vertices = {{true, {}}, {true, {}}};
    d.edges = {{0, 1, EdgeKind::Q}};
    d.symmetry_factor = Rational(1);
    d.lambda_power = 0;
    return d;
}

Diagram expected_first_order_cbar() {
    Diagram d;
    d.externals = {"x1", "x2"};
    d.vertices = {{true, {}}, {true, {}}, {false, {Decoration::Cbar}}};
    d.edges = {{0, 2, EdgeKind::G}, {1, 2, EdgeKind::Qbar}};
    d.symmetry_factor = Rational(2);
    d.lambda_power = 1;
    return d;
}

Diagram expected_first_order_c() {
    Diagram d;
    d.externals = {"x1", "x2"};
    d.vertices = {{true, {}}, {true, {}}, {false, {Decoration::C}}};
    d.edges = {{0, 2, EdgeKind::Q}, {1, 2, EdgeKind::Gbar}};
    d.symmetry_factor = Rational(2);
    d.lambda_power = 1;
    return d;
}

bool same_diagram_set(std::vector<Diagram> got, std::vector<Diagram> want) {
    if (got.size() != want.size()) return false;
    for (const auto& w : want) {
        bool found = false;
        for (size_t i = 0; i < got.size(); ++i) {
            if (got[i] == w) {
                got.erase(got.begin() + long(i));
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return got.empty();
}

CriterionResult first_order_two_point() {
    Timer timer;
    CriterionResult r{"first_order_two_point", false, "", 0.0};
    auto sol = perturb::expand(1, 1);
    auto diags = perturb::two_point(sol, 1);
    std::vector<Diagram> want = {expected_bare_covariance(), expected_first_order_cbar(),
                                 expected_first_order_c()};
    r.pass = same_diagram_set(diags, want);
    r.details = r.pass ? "order-1 set is {Q, 2l Qbar.(G**Cbar 1 (x) 1), 2l Q.(Gbar**C 1 (x) 1)}"
                       : "diagram set mismatch: " + deform::to_json(diags);
    r.seconds = timer.seconds();
    return r;
}

CriterionResult counterterm_structure() {
    Timer timer;
    CriterionResult r{"counterterm_m1_and_renormalized_equation", false, "", 0.0};
    auto sol = perturb::expand(1, 2);
    auto cts = perturb::counterterms(sol, 2);
    Term m1;
    m1.coeff = Rational(2);
    m1.slots[0] = {Atom::tok(Token::Cbar), Atom::op_slot()};
    Expr want = Expr::from_terms(1, {m1});
    bool m1_ok = cts.M(1) == want;
    auto rep = perturb::verify_renormalized_equation(sol, cts, 2);
    r.pass = m1_ok && rep.pass;
    r.details = std::string("M1 = ") + sym::pretty(cts.M(1)) +
                (m1_ok ? " (= 2 Cbar id)" : " (mismatch)") + "; " + rep.message;
    r.seconds = timer.seconds();
    return r;
}

CriterionResult graph_closed_forms() {
    Timer timer;
    CriterionResult r{"graph_closed_forms", true, "", 0.0};
    for (int k = 0; k <= 8 && r.pass; ++k) {
        auto trees = graphs::admissible_trees(1, k);
        auto want = graphs::counts(k, 1);
        for (const auto& t : trees) {
            auto got = graphs::diagram_counts(graphs::maximal_contraction(t));
            if (got != want) {
                r.pass = false;
                r.details = "counts mismatch at k=" + std::to_string(k);
                break;
            }
        }
    }
    if (r.pass) {
        auto rep1 = graphs::subcritical_report(1, 1, 10);
        bool flags_ok = rep1.subcritical && rep1.max_divergent_order == 1;
        for (const auto& row : rep1.rows)
            if (row.divergent != (row.k <= 1)) flags_ok = false;
        auto rep2 = graphs::subcritical_report(2, 1, 4);
        bool d2_ok = !rep2.subcritical;
        r.pass = flags_ok && d2_ok;
        r.details = r.pass ? "L=3k+1, N=2k+1 through k=8; d=1 subcritical with divergences "
                             "only at k<=1; d=2 not subcritical"
                           : "divergence report mismatch";
    }
    r.seconds = timer.seconds();
    return r;
}

CriterionResult wick_oracle(const AcceptanceOptions& opt) {
    Timer timer;
    CriterionResult r{"deformation_wick_oracle", true, "", 0.0};
    std::mt19937_64 rng(20240814u);
    int cases = opt.quick ? 120 : 500;
    for (int c = 0; c < cases && r.pass; ++c) {
        int nf = 1 + int(rng() % 4);
        std::vector<std::pair<int, int>> factors;
        int total = 0;
        for (int i = 0; i < nf; ++i) {
            int a = int(rng() % 3), b = int(rng() % 3);
            if (a + b == 0) a = 1;
            if (total + a + b > 8) break;
            total += a + b;
            factors.push_back({a, b});
        }
        if (factors.empty()) factors.push_back({1, 0});
        std::vector<Expr> entries;
        for (const auto& [a, b] : factors) {
            Term t;
            for (int i = 0; i < a; ++i) t.slots[0].push_back(Atom::field(false));
            for (int i = 0; i < b; ++i) t.slots[0].push_back(Atom::field(true));
            entries.push_back(Expr::from_terms(1, {t}));
        }
        Expr got = deform::gamma_dot(entries);
        Expr want = oracle::wick_enumerate(factors);
        if (!(got == want)) {
            r.pass = false;
            r.details = "case " + std::to_string(c) + ": " + sym::pretty(got) +
                        " != " + sym::pretty(want);
        }
    }
    if (r.pass)
        r.details = std::to_string(opt.quick ? 120 : 500) +
                    " random products match the flat matching enumerator exactly";
    r.seconds = timer.seconds();
    return r;
}

LatticeSpec mc_lattice() {
    LatticeSpec s = LatticeSpec::defaults();
    s.d = 1;
    s.T = 1.0;
    s.Lx = 2.0 * M_PI;
    s.nt = 128;
    s.nx = 128;
    s.epsilon = 4.0 * s.dt();
    s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
    s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
    return s;
}

std::vector<std::pair<TestFunction, TestFunction>> covariance_pairs(const LatticeSpec& s) {
    double xc = 0.5 * s.Lx;
    std::vector<std::pair<TestFunction, TestFunction>> ps;
    ps.emplace_back(TestFunction::bump(s, 0.35, 0.10, xc - 1.0, 0.8),
                    TestFunction::bump(s, 0.75, 0.12, xc + 1.0, 0.8));
    ps.emplace_back(TestFunction::bump(s, 0.50, 0.15, xc, 1.0),
                    TestFunction::bump(s, 0.50, 0.15, xc, 1.0));
    ps.emplace_back(TestFunction::bump(s, 0.25, 0.08, xc + 0.5, 0.6),
                    TestFunction::bump(s, 0.80, 0.10, xc - 0.5, 0.6));
    ps.emplace_back(TestFunction::bump(s, 0.45, 0.12, xc - 1.5, 0.7),
                    TestFunction::bump(s, 0.55, 0.12, xc + 1.5, 0.7));
    ps.emplace_back(TestFunction::bump(s, 0.60, 0.20, xc, 1.8),
                    TestFunction::bump(s, 0.40, 0.08, xc, 0.5));
    return ps;
}

CriterionResult covariance_reproduction(const AcceptanceOptions& opt) {
    Timer timer;
    CriterionResult r{"covariance_reproduction", true, "", 0.0};
    LatticeSpec s = mc_lattice();
    long long n = opt.quick ? std::min<long long>(opt.n_real, 2000) : opt.n_real;
    auto pairs = covariance_pairs(s);
    std::vector<num::ObservablePair> obs;
    for (auto& p : pairs) obs.push_back({&p.first, &p.second});
    auto stats = num::simulate_linear(s, n, obs, opt.seed, opt.threads);
    num::QKernel q(s);
    std::ostringstream det;
    for (size_t i = 0; i < pairs.size(); ++i) {
        cplx qv = q.pair(pairs[i].first.values, pairs[i].second.values);
        double dev = std::abs(stats[i].covariance.mean - qv);
        double dev0 = std::abs(stats[i].pseudo.mean);
        bool ok = dev < 3.0 * stats[i].covariance.stderror &&
                  dev0 < 3.0 * stats[i].pseudo.stderror;
        if (!ok) r.pass = false;
        det << "pair " << i + 1 << ": |mc-Q| = " << fmt(dev) << " vs 3se = "
            << fmt(3.0 * stats[i].covariance.stderror) << ", |E[phi phi]| = " << fmt(dev0)
            << " vs 3se = " << fmt(3.0 * stats[i].pseudo.stderror) << "; ";
    }
    r.details = det.str() + "n = " + std::to_string(n);
    r.seconds = timer.seconds();
    return r;
}

CriterionResult slope_oracle(const AcceptanceOptions& opt) {
    Timer timer;
    CriterionResult r{"order_lambda_slope_oracle", true, "", 0.0};
    LatticeSpec s = mc_lattice();
    long long n = opt.quick ? std::min<long long>(opt.n_real, 2000) : opt.n_real;
    TestFunction f1 = TestFunction::bump(s, 0.40, 0.12, 0.5 * s.Lx - 0.8, 0.9);
    TestFunction f2 = TestFunction::bump(s, 0.75, 0.12, 0.5 * s.Lx + 0.8, 0.9);

    auto sol = perturb::expand(1, 1);
    auto diags = perturb::two_point(sol, 1);
    Grid cbar = num::coeff_C(s, Extension::EpsilonCut);
    num::KernelBindings bind;
    bind.c = &cbar;
    bind.cbar = &cbar;
    cplx predicted = 0.0;
    for (const auto& d : diags)
        if (d.lambda_power == 1)
            predicted += num::evaluate_diagram(d, s, {&f1, &f2}, bind);

    auto run = num::simulate_first_order(s, {0.02, 0.05}, n, f1, f2,
                                         Extension::EpsilonCut, opt.seed + 1, opt.threads);
    std::ostringstream det;
    det << "diagram slope = " << fmtc(predicted) << "; ";
    for (const auto& per : run.per_lambda) {
        double dev = std::abs(per.slope.mean - predicted);
        bool ok = dev < 3.0 * per.slope.stderror;
        if (!ok) r.pass = false;
        det << "lambda=" << per.lambda << ": |mc slope - diagrams| = " << fmt(dev)
            << " vs 3se = " << fmt(3.0 * per.slope.stderror) << "; ";
    }
    r.details = det.str() + "n = " + std::to_string(n);
    r.seconds = timer.seconds();
    return r;
}

CriterionResult scaling_degrees(const AcceptanceOptions& opt) {
    Timer timer;
    CriterionResult r{"parabolic_scaling_degrees", true, "", 0.0};
    LatticeSpec s = LatticeSpec::defaults();
    s.d = 1;
    s.T = 1.0;
    s.Lx = 16.0 * M_PI;
    s.nt = opt.quick ? 2048 : 4096;
    s.nx = 512;
    s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
    s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
    s.epsilon = s.dt();

    num::ScalingOptions so;
    so.nscales = opt.quick ? 3 : 4;
    so.x_halfwidth_frac = 3.0 / s.nx;
    auto g = num::kernel_G(s, false);
    auto fit_g = num::scaling_degree_estimate(g, 2, so);
    auto gg = num::kernel_G_abs2(s);
    auto fit_gg = num::scaling_degree_estimate(gg, 2, so);
    num::KernelGrid cst;
    cst.spec = s;
    cst.kind = "const";
    cst.data = num::Grid(s.nt, s.nx);
    for (auto& v : cst.data.a) v = 1.0;
    auto fit_c = num::scaling_degree_estimate(cst, 2, so);

    bool ok_g = std::abs(fit_g.estimate - 1.0) < 0.15;
    bool ok_gg = std::abs(fit_gg.estimate - 2.0) < 0.2;
    bool ok_c = std::abs(fit_c.estimate) < 0.1;
    r.pass = ok_g && ok_gg && ok_c;
    r.details = "wsd(G) = " + fmt(fit_g.estimate) + " (want 1 +- 0.15), wsd(G.Gbar) = " +
                fmt(fit_gg.estimate) + " (want 2 +- 0.2), wsd(const) = " + fmt(fit_c.estimate) +
                " (want 0 +- 0.1)";
    r.seconds = timer.seconds();
    return r;
}

CriterionResult directional_decay(const AcceptanceOptions&) {
    Timer timer;
    CriterionResult r{"directional_fourier_decay", true, "", 0.0};

    // characteristic ray: base point on the spatial origin, where the
    // localized transform along (omega < 0, 0) falls off only slowly
    LatticeSpec st = LatticeSpec::defaults();
    st.d = 1;
    st.T = 4.0;
    st.Lx = 8.0 * M_PI;
    st.nt = 256;
    st.nx = 256;
    st.chi.time = {0.5 * st.T, 0.45 * st.T, 0.7};
    st.chi.space = {0.5 * st.Lx, 0.45 * st.Lx, 0.7};
    st.epsilon = st.dt();
    TestFunction ft = TestFunction::bump(st, 0.5 * st.T, 0.6, 0.0, 2.0, 1.0, 0.4);
    auto fits_t = num::directional_decay_test(st, ft, {{-1.0, 0.0}, {1.0, 0.0}}, 8, 64);
    double p_neg = fits_t[0].exponent;
    double p_pos = fits_t[1].exponent;

    // non-characteristic ray: base point away from the origin-supported
    // singularity; the tilted ray keeps clear of the characteristic
    // frequencies of the dispersive kernel
    LatticeSpec ss = st;
    ss.T = 2.0;
    ss.Lx = 16.0 * M_PI;
    ss.chi.time = {0.5 * ss.T, 0.45 * ss.T, 0.7};
    ss.chi.space = {0.5 * ss.Lx, 0.45 * ss.Lx, 0.7};
    ss.epsilon = ss.dt();
    TestFunction fs = TestFunction::bump(ss, 0.5 * ss.T, 0.5, 6.0, 3.0, 1.0, 0.15);
    auto fits_s = num::directional_decay_test(ss, fs, {{-1.0, 1.0}, {0.0, 1.0}}, 8, 32);
    double p_clean = fits_s[0].exponent;
    double p_axis = fits_s[1].exponent;

    r.pass = p_neg <= 1.5 && p_clean >= 3.0;
    r.details = "p(omega<0, 0) = " + fmt(p_neg) + " (want <= 1.5), p(omega>0, 0) = " +
                fmt(p_pos) + " (characteristic, reported), p(-1,1) = " + fmt(p_clean) +
                " (non-characteristic, want >= 3), p(0,1) = " + fmt(p_axis) +
                " (window-limited, reported)";
    r.seconds = timer.seconds();
    return r;
}

CriterionResult extension_ambiguity(const AcceptanceOptions&) {
    Timer timer;
    CriterionResult r{"renormalization_ambiguity_structure", true, "", 0.0};
    LatticeSpec s = LatticeSpec::defaults();
    s.d = 1;
    s.T = 1.0;
    s.Lx = 2.0 * M_PI;
    s.nt = 64;
    s.nx = 64;
    s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
    s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
    s.epsilon = 4.0 * s.dt();

    TestFunction f1 = TestFunction::bump(s, 0.40, 0.12, 0.5 * s.Lx - 0.8, 0.9);
    TestFunction f2 = TestFunction::bump(s, 0.75, 0.12, 0.5 * s.Lx + 0.8, 0.9);
    double lambda = 0.25;

    auto sol = perturb::expand(1, 1);
    auto diags = perturb::two_point(sol, 1);

    Grid c_cut = num::coeff_C(s, Extension::EpsilonCut);
    Grid c_log = num::coeff_C(s, Extension::EpsilonCutLogSub);
    Grid c_diff(s.nt, s.nx);
    for (size_t i = 0; i < c_diff.a.size(); ++i) c_diff.a[i] = c_log.a[i] - c_cut.a[i];

    num::KernelBindings cut{&c_cut, &c_cut, nullptr, nullptr};
    num::KernelBindings log{&c_log, &c_log, nullptr, nullptr};
    cplx va = num::evaluate_diagrams_at(diags, lambda, s, {&f1, &f2}, cut);
    cplx vb = num::evaluate_diagrams_at(diags, lambda, s, {&f1, &f2}, log);

    // shift every coinciding-point token and keep the shift part: these are
    // the difference diagrams predicted by the counterterm family
    std::vector<Diagram> diff_diags;
    for (const auto& d : diags) {
        Diagram dd = d;
        bool has_token = false;
        for (auto& v : dd.vertices)
            for (auto& dec : v.decorations) {
                if (dec == Decoration::C) { dec = Decoration::DeltaC; has_token = true; }
                else if (dec == Decoration::Cbar) { dec = Decoration::DeltaCbar; has_token = true; }
            }
        if (has_token) diff_diags.push_back(dd);
    }
    num::KernelBindings diffb{nullptr, nullptr, &c_diff, &c_diff};
    cplx vd = num::evaluate_diagrams_at(diff_diags, lambda, s, {&f1, &f2}, diffb);

    double rel = std::abs((vb - va) - vd) / std::abs(vb - va);
    r.pass = rel < 1e-9 && std::abs(vb - va) > 0.0;
    r.details = "swap changes value by " + fmtc(vb - va) + ", difference diagrams give " +
                fmtc(vd) + ", relative deviation = " + fmt(rel);
    r.seconds = timer.seconds();
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* live) {
    std::vector<CriterionResult> rs;
    auto push = [&](CriterionResult r) {
        if (live)
            (*live) << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << fmt(r.seconds)
                    << " s): " << r.details << "\n";
        rs.push_back(std::move(r));
    };
    push(vanishing_mean(opt));
    push(first_order_two_point());
    push(counterterm_structure());
    push(graph_closed_forms());
    push(wick_oracle(opt));
    push(covariance_reproduction(opt));
    push(slope_oracle(opt));
    push(scaling_degrees(opt));
    push(directional_decay(opt));
    push(extension_ambiguity(opt));
    return rs;
}

bool all_passed(const std::vector<CriterionResult>& rs) {
    for (const auto& r : rs)
        if (!r.pass) return false;
    return true;
}

} // namespace snse
