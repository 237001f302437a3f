#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snse/acceptance.hpp"
#include "snse/deform.hpp"
#include "snse/diagram.hpp"
#include "snse/expr_json.hpp"
#include "snse/graphs.hpp"
#include "snse/monte_carlo.hpp"
#include "snse/perturbation.hpp"
#include "snse/scaling.hpp"

namespace py = pybind11;
using namespace snse;

namespace {

sym::Expr monomial(int plain, int conj) {
    sym::Term t;
    for (int i = 0; i < plain; ++i) t.slots[0].push_back(sym::Atom::field(false));
    for (int i = 0; i < conj; ++i) t.slots[0].push_back(sym::Atom::field(true));
    return sym::Expr::from_terms(1, {t});
}

num::LatticeSpec lattice(int nt, int nx, double T, double Lx, double epsilon) {
    num::LatticeSpec s = num::LatticeSpec::defaults();
    s.nt = nt;
    s.nx = nx;
    s.T = T;
    s.Lx = Lx;
    s.chi.time = {0.5 * T, 0.45 * T, 0.7};
    s.chi.space = {0.5 * Lx, 0.45 * Lx, 0.7};
    s.epsilon = epsilon > 0 ? epsilon : s.dt();
    return s;
}

} // namespace

PYBIND11_MODULE(snse_py, m) {
    m.doc() = "symbolic and lattice engine for the stochastic nonlinear "
              "Schroedinger equation";

    m.def("expand_pretty", [](int kappa, int order) {
        auto sol = perturb::expand(kappa, order);
        std::vector<std::pair<std::string, std::string>> out;
        for (int k = 0; k <= order; ++k)
            out.emplace_back(sym::pretty(sol.coefficients[k]), sym::pretty(sol.deformed[k]));
        return out;
    }, py::arg("kappa") = 1, py::arg("order") = 2);

    m.def("expectation_is_zero", [](int kappa, int order) {
        auto sol = perturb::expand(kappa, order);
        for (int k = 0; k <= order; ++k)
            if (!perturb::expectation(sol, k).is_zero()) return false;
        return true;
    }, py::arg("kappa") = 1, py::arg("order") = 3);

    m.def("gamma_dot_pretty", [](const std::vector<std::pair<int, int>>& factors) {
        std::vector<sym::Expr> entries;
        for (const auto& [a, b] : factors) entries.push_back(monomial(a, b));
        return sym::pretty(deform::gamma_dot(entries));
    });

    m.def("wick_oracle_pretty", [](const std::vector<std::pair<int, int>>& factors) {
        return sym::pretty(oracle::wick_enumerate(factors));
    });

    m.def("two_point_json", [](int order) {
        auto sol = perturb::expand(1, std::max(order, 1));
        return deform::to_json(perturb::two_point(sol, order), 2);
    }, py::arg("order") = 1);

    m.def("counterterm_pretty", [](int kappa, int k) {
        auto sol = perturb::expand(kappa, k);
        auto cts = perturb::counterterms(sol, k);
        return sym::pretty(cts.M(k));
    }, py::arg("kappa") = 1, py::arg("k") = 1);

    m.def("counts", [](int k, int kappa) { return graphs::counts(k, kappa); },
          py::arg("k"), py::arg("kappa") = 1);
    m.def("divergence_degree", &graphs::divergence_degree);
    m.def("subcritical", [](int d, int kappa) {
        return graphs::subcritical_report(d, kappa, 1).subcritical;
    }, py::arg("d") = 1, py::arg("kappa") = 1);
    m.def("divergence_csv", [](int d, int kappa, int k_max) {
        return graphs::to_csv(graphs::subcritical_report(d, kappa, k_max));
    }, py::arg("d") = 1, py::arg("kappa") = 1, py::arg("k_max") = 4);

    m.def("covariance_check",
          [](int nt, int nx, long long n_real, uint64_t seed) {
              auto s = lattice(nt, nx, 1.0, 2.0 * M_PI, 0.0);
              auto f1 = num::TestFunction::bump(s, 0.35, 0.1, 0.5 * s.Lx - 1.0, 0.8);
              auto f2 = num::TestFunction::bump(s, 0.7, 0.1, 0.5 * s.Lx + 1.0, 0.8);
              std::vector<num::ObservablePair> obs{{&f1, &f2}};
              auto stats = num::simulate_linear(s, n_real, obs, seed, 0);
              num::QKernel q(s);
              auto qv = q.pair(f1.values, f2.values);
              py::dict out;
              out["mc"] = stats[0].covariance.mean;
              out["kernel"] = qv;
              out["stderr"] = stats[0].covariance.stderror;
              out["pseudo"] = stats[0].pseudo.mean;
              out["pseudo_stderr"] = stats[0].pseudo.stderror;
              return out;
          },
          py::arg("nt") = 32, py::arg("nx") = 32, py::arg("n_real") = 400,
          py::arg("seed") = 7);

    m.def("scaling_estimate",
          [](int nt, int nx, double Lx, bool squared) {
              auto s = lattice(nt, nx, 1.0, Lx, 0.0);
              num::ScalingOptions so;
              so.nscales = 3;
              so.x_halfwidth_frac = 3.0 / nx;
              auto g = squared ? num::kernel_G_abs2(s) : num::kernel_G(s, false);
              return num::scaling_degree_estimate(g, 2, so).estimate;
          },
          py::arg("nt") = 2048, py::arg("nx") = 512, py::arg("Lx") = 16.0 * M_PI,
          py::arg("squared") = false);
}
