#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snse/scaling.hpp"

using namespace snse;
using namespace snse::num;

namespace {

LatticeSpec scaling_spec(int nt, int nx, double Lx) {
    LatticeSpec s = LatticeSpec::defaults();
    s.d = 1;
    s.T = 1.0;
    s.Lx = Lx;
    s.nt = nt;
    s.nx = nx;
    s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
    s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
    s.epsilon = s.dt();
    return s;
}

} // namespace

TEST_CASE("scaling estimate recovers the transversal kernel degrees") {
    LatticeSpec s = scaling_spec(2048, 512, 16.0 * M_PI);
    ScalingOptions so;
    so.nscales = 3;
    so.x_halfwidth_frac = 3.0 / s.nx;

    auto g = kernel_G(s, false);
    auto fit_g = scaling_degree_estimate(g, 2, so);
    CHECK(std::abs(fit_g.estimate - 1.0) < 0.15);
    CHECK(fit_g.reliable);

    auto gg = kernel_G_abs2(s);
    auto fit_gg = scaling_degree_estimate(gg, 2, so);
    CHECK(std::abs(fit_gg.estimate - 2.0) < 0.2);

    KernelGrid cst;
    cst.spec = s;
    cst.kind = "const";
    cst.data = Grid(s.nt, s.nx);
    for (auto& v : cst.data.a) v = 1.0;
    auto fit_c = scaling_degree_estimate(cst, 2, so);
    CHECK(std::abs(fit_c.estimate) < 0.1);
}

TEST_CASE("scaling estimate guards its resolution") {
    LatticeSpec s = scaling_spec(64, 64, 2.0 * M_PI);
    auto g = kernel_G(s, false);
    ScalingOptions so;
    so.nscales = 4;
    CHECK_THROWS(scaling_degree_estimate(g, 2, so));   // smallest window unresolved
}

TEST_CASE("weight parameter changes the contraction law") {
    // with weight 1 the same |G| profile reads as degree 1/2
    LatticeSpec s = scaling_spec(2048, 512, 16.0 * M_PI);
    ScalingOptions so;
    so.nscales = 3;
    so.x_halfwidth_frac = 3.0 / s.nx;
    auto g = kernel_G(s, false);
    auto fit = scaling_degree_estimate(g, 1, so);
    CHECK(std::abs(fit.estimate - 0.5) < 0.1);
}

TEST_CASE("directional decay: characteristic ray falls slowly, tilted ray fast") {
    LatticeSpec st = scaling_spec(256, 256, 8.0 * M_PI);
    st.T = 4.0;
    st.chi.time = {0.5 * st.T, 0.45 * st.T, 0.7};
    TestFunction ft = TestFunction::bump(st, 0.5 * st.T, 0.6, 0.0, 2.0, 1.0, 0.4);
    auto fits = directional_decay_test(st, ft, {{-1.0, 0.0}, {1.0, 0.0}}, 8, 64);
    CHECK(fits[0].exponent <= 1.5);
    // the omega > 0 side stays essentially flat (bounded, non-decaying)
    CHECK(fits[1].exponent <= 1.5);

    LatticeSpec ss = scaling_spec(256, 256, 16.0 * M_PI);
    ss.T = 2.0;
    ss.chi.time = {0.5 * ss.T, 0.45 * ss.T, 0.7};
    TestFunction fs = TestFunction::bump(ss, 0.5 * ss.T, 0.5, 6.0, 3.0, 1.0, 0.15);
    auto fits_s = directional_decay_test(ss, fs, {{-1.0, 1.0}}, 8, 32);
    CHECK(fits_s[0].exponent >= 3.0);
}

TEST_CASE("directional decay rejects a vanishing base row") {
    LatticeSpec s = scaling_spec(256, 256, 8.0 * M_PI);
    // bump entirely in the upper half of the centered time axis
    TestFunction f = TestFunction::bump(s, 0.8 * s.T, 0.05, 0.0, 2.0);
    CHECK_THROWS(directional_decay_test(s, f, {{-1.0, 0.0}}, 8, 64));
}
