#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "snse/acceptance.hpp"
#include "snse/config.hpp"
#include "snse/diagram_eval.hpp"
#include "snse/expr_json.hpp"
#include "snse/graphs.hpp"
#include "snse/monte_carlo.hpp"
#include "snse/perturbation.hpp"
#include "snse/scaling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using snse::RunConfig;
using snse::num::cplx;
using snse::num::TestFunction;

namespace {

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
    json j = json::parse(snse::config_to_json(cfg));
    j["command"] = command;
    snse::write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

std::pair<TestFunction, TestFunction> default_pair(const snse::num::LatticeSpec& s) {
    double xc = 0.5 * s.Lx;
    return {TestFunction::bump(s, 0.40 * s.T, 0.12 * s.T, xc - 0.8, 0.9),
            TestFunction::bump(s, 0.75 * s.T, 0.12 * s.T, xc + 0.8, 0.9)};
}

std::vector<std::pair<TestFunction, TestFunction>> default_pairs(const snse::num::LatticeSpec& s) {
    double xc = 0.5 * s.Lx;
    std::vector<std::pair<TestFunction, TestFunction>> ps;
    ps.emplace_back(TestFunction::bump(s, 0.35 * s.T, 0.10 * s.T, xc - 1.0, 0.8),
                    TestFunction::bump(s, 0.75 * s.T, 0.12 * s.T, xc + 1.0, 0.8));
    ps.emplace_back(TestFunction::bump(s, 0.50 * s.T, 0.15 * s.T, xc, 1.0),
                    TestFunction::bump(s, 0.50 * s.T, 0.15 * s.T, xc, 1.0));
    ps.emplace_back(TestFunction::bump(s, 0.25 * s.T, 0.08 * s.T, xc + 0.5, 0.6),
                    TestFunction::bump(s, 0.80 * s.T, 0.10 * s.T, xc - 0.5, 0.6));
    ps.emplace_back(TestFunction::bump(s, 0.45 * s.T, 0.12 * s.T, xc - 1.5, 0.7),
                    TestFunction::bump(s, 0.55 * s.T, 0.12 * s.T, xc + 1.5, 0.7));
    ps.emplace_back(TestFunction::bump(s, 0.60 * s.T, 0.20 * s.T, xc, 1.8),
                    TestFunction::bump(s, 0.40 * s.T, 0.08 * s.T, xc, 0.5));
    return ps;
}

int cmd_expand(const RunConfig& cfg) {
    auto sol = snse::perturb::expand(cfg.kappa, cfg.order);
    json j;
    j["kappa"] = cfg.kappa;
    j["order"] = cfg.order;
    json arr = json::array();
    std::string txt;
    for (int k = 0; k <= cfg.order; ++k) {
        json e;
        e["k"] = k;
        e["coefficient"] = json::parse(snse::sym::to_json(sol.coefficients[k]));
        e["deformed"] = json::parse(snse::sym::to_json(sol.deformed[k]));
        arr.push_back(std::move(e));
        txt += "F_" + std::to_string(k) + " = " + snse::sym::pretty(sol.coefficients[k]) + "\n";
        txt += "Gamma(F_" + std::to_string(k) + ") = " + snse::sym::pretty(sol.deformed[k]) + "\n";
    }
    j["coefficients"] = std::move(arr);
    snse::write_text_file((fs::path(cfg.out_dir) / "expansion.json").string(), j.dump(2) + "\n");
    snse::write_text_file((fs::path(cfg.out_dir) / "expansion.txt").string(), txt);
    std::cout << txt;

    if (cfg.order >= 1) {
        auto cts = snse::perturb::counterterms(sol, cfg.order);
        auto rep = snse::perturb::verify_renormalized_equation(sol, cts, cfg.order);
        json cj;
        json entries = json::array();
        for (int k = 1; k <= cfg.order; ++k)
            entries.push_back({{"k", k},
                               {"operator", json::parse(snse::sym::to_json(cts.M(k)))},
                               {"pretty", snse::sym::pretty(cts.M(k))}});
        cj["counterterms"] = std::move(entries);
        cj["renormalized_equation_verified"] = rep.pass;
        cj["message"] = rep.message;
        snse::write_text_file((fs::path(cfg.out_dir) / "counterterms.json").string(),
                              cj.dump(2) + "\n");
        std::cout << "M_1 = " << snse::sym::pretty(cts.M(1)) << "; " << rep.message << "\n";
    }
    return 0;
}

int cmd_expect(const RunConfig& cfg) {
    auto sol = snse::perturb::expand(cfg.kappa, cfg.order);
    json j;
    j["kappa"] = cfg.kappa;
    json arr = json::array();
    bool all_zero = true;
    for (int k = 0; k <= cfg.order; ++k) {
        auto e = snse::perturb::expectation(sol, k);
        auto shifted = snse::perturb::expectation_shifted(sol, k);
        all_zero = all_zero && e.is_zero();
        arr.push_back({{"k", k},
                       {"zero", e.is_zero()},
                       {"value", snse::sym::pretty(e)},
                       {"shifted", snse::sym::pretty(shifted)}});
        std::cout << "order " << k << ": E[psi] = " << snse::sym::pretty(e) << "\n";
    }
    j["orders"] = std::move(arr);
    j["all_zero"] = all_zero;
    snse::write_text_file((fs::path(cfg.out_dir) / "expectation.json").string(), j.dump(2) + "\n");
    return 0;
}

int cmd_correlate(const RunConfig& cfg) {
    auto sol = snse::perturb::expand(cfg.kappa, std::max(cfg.order, 1));
    auto diags = snse::perturb::two_point(sol, cfg.order);
    snse::write_text_file((fs::path(cfg.out_dir) / "diagrams.json").string(),
                          snse::deform::to_json(diags, 2) + "\n");
    for (size_t i = 0; i < diags.size(); ++i)
        snse::write_text_file((fs::path(cfg.out_dir) / ("diagram_" + std::to_string(i) + ".dot")).string(),
                              snse::deform::to_dot(diags[i], "d" + std::to_string(i)));

    auto [f1, f2] = default_pair(cfg.lattice);
    snse::num::Grid cbar = snse::num::coeff_C(cfg.lattice, cfg.extension);
    snse::num::KernelBindings bind;
    bind.c = &cbar;
    bind.cbar = &cbar;
    std::ostringstream csv;
    csv << "diagram_id,lambda_power,factor,value_re,value_im\n";
    cplx total = 0.0;
    size_t skipped = 0;
    for (size_t i = 0; i < diags.size(); ++i) {
        csv << i << ',' << diags[i].lambda_power << ',' << diags[i].symmetry_factor.str() << ',';
        try {
            cplx v = snse::num::evaluate_diagram(diags[i], cfg.lattice, {&f1, &f2}, bind);
            total += std::pow(cfg.lambda, diags[i].lambda_power) * v;
            csv << num17(v.real()) << ',' << num17(v.imag()) << '\n';
            std::cout << "diagram " << i << " (lambda^" << diags[i].lambda_power
                      << "): value = " << v.real() << (v.imag() < 0 ? " - " : " + ")
                      << std::abs(v.imag()) << "i\n";
        } catch (const std::invalid_argument&) {
            // loop-carrying kernels have no tree contraction on this lattice
            ++skipped;
            csv << "unevaluated,unevaluated\n";
            std::cout << "diagram " << i << " (lambda^" << diags[i].lambda_power
                      << "): kernel not tree-contractible, value skipped\n";
        }
    }
    csv << "total_at_lambda," << cfg.lambda << ",," << num17(total.real()) << ','
        << num17(total.imag()) << '\n';
    snse::write_text_file((fs::path(cfg.out_dir) / "two_point.csv").string(), csv.str());
    std::cout << diags.size() << " diagrams written";
    if (skipped) std::cout << " (" << skipped << " not tree-contractible)";
    std::cout << "; evaluated total at lambda = " << cfg.lambda << ": " << total.real()
              << (total.imag() < 0 ? " - " : " + ") << std::abs(total.imag()) << "i\n";
    return 0;
}

int cmd_analyze(const RunConfig& cfg) {
    int k_max = std::max(cfg.order, 1);
    auto rep = snse::graphs::subcritical_report(cfg.lattice.d, cfg.kappa, k_max);
    snse::write_text_file((fs::path(cfg.out_dir) / "divergence.csv").string(),
                          snse::graphs::to_csv(rep));
    json j;
    j["d"] = rep.d;
    j["kappa"] = rep.kappa;
    j["subcritical"] = rep.subcritical;
    j["max_divergent_order"] = rep.max_divergent_order;
    snse::write_text_file((fs::path(cfg.out_dir) / "verdict.json").string(), j.dump(2) + "\n");
    for (int k = 0; k <= std::min(k_max, 3); ++k) {
        auto trees = snse::graphs::admissible_trees(cfg.kappa, k);
        for (size_t i = 0; i < trees.size(); ++i) {
            auto d = snse::graphs::maximal_contraction(trees[i]);
            snse::write_text_file(
                (fs::path(cfg.out_dir) / ("graph_k" + std::to_string(k) + "_" + std::to_string(i) + ".dot")).string(),
                snse::deform::to_dot(d, "g"));
        }
    }
    std::cout << "d = " << rep.d << ", kappa = " << rep.kappa
              << (rep.subcritical ? ": subcritical" : ": not subcritical");
    if (rep.subcritical) std::cout << ", divergent through order " << rep.max_divergent_order;
    std::cout << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    auto pairs = default_pairs(cfg.lattice);
    std::vector<snse::num::ObservablePair> obs;
    for (auto& p : pairs) obs.push_back({&p.first, &p.second});
    auto stats = snse::num::simulate_linear(cfg.lattice, cfg.n_real, obs, cfg.seed, cfg.threads);
    snse::num::QKernel q(cfg.lattice);
    std::ostringstream csv;
    csv << "observable,mean_re,mean_im,stderr,n\n";
    for (size_t i = 0; i < stats.size(); ++i) {
        cplx qv = q.pair(pairs[i].first.values, pairs[i].second.values);
        auto row = [&](const std::string& name, const snse::num::Estimate& e) {
            csv << name << i + 1 << ',' << num17(e.mean.real()) << ',' << num17(e.mean.imag())
                << ',' << num17(e.stderror) << ',' << e.n << '\n';
        };
        row("covariance_", stats[i].covariance);
        row("pseudo_", stats[i].pseudo);
        row("mean_", stats[i].mean1);
        csv << "kernel_Q_" << i + 1 << ',' << num17(qv.real()) << ',' << num17(qv.imag())
            << ",0," << 0 << '\n';
        std::cout << "pair " << i + 1 << ": mc = " << stats[i].covariance.mean.real()
                  << " + " << stats[i].covariance.mean.imag() << "i, Q = " << qv.real() << " + "
                  << qv.imag() << "i, stderr = " << stats[i].covariance.stderror << "\n";
    }
    snse::write_text_file((fs::path(cfg.out_dir) / "estimates.csv").string(), csv.str());
    return 0;
}

int cmd_verify(const RunConfig& cfg, bool quick) {
    snse::AcceptanceOptions opt;
    opt.n_real = cfg.n_real;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    opt.quick = quick;
    auto rs = snse::run_acceptance(opt, &std::cout);
    std::ostringstream csv;
    csv << "criterion,pass,seconds\n";
    for (const auto& r : rs) csv << r.name << ',' << (r.pass ? 1 : 0) << ',' << r.seconds << '\n';
    snse::write_text_file((fs::path(cfg.out_dir) / "criteria.csv").string(), csv.str());

    // side reports of the estimators used above
    {
        snse::num::LatticeSpec s = snse::num::LatticeSpec::defaults();
        s.Lx = 16.0 * M_PI;
        s.nt = quick ? 2048 : 4096;
        s.nx = 512;
        s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
        s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
        s.epsilon = s.dt();
        snse::num::ScalingOptions so;
        so.nscales = quick ? 3 : 4;
        so.x_halfwidth_frac = 3.0 / s.nx;
        std::ostringstream sc;
        sc << "kernel,estimate,max_residual\n";
        auto g = snse::num::kernel_G(s, false);
        auto fg = snse::num::scaling_degree_estimate(g, 2, so);
        sc << "G," << num17(fg.estimate) << ',' << num17(fg.max_residual) << '\n';
        auto gg = snse::num::kernel_G_abs2(s);
        auto fgg = snse::num::scaling_degree_estimate(gg, 2, so);
        sc << "GGbar," << num17(fgg.estimate) << ',' << num17(fgg.max_residual) << '\n';
        snse::write_text_file((fs::path(cfg.out_dir) / "scaling.csv").string(), sc.str());
    }
    {
        snse::num::LatticeSpec st = snse::num::LatticeSpec::defaults();
        st.T = 4.0;
        st.Lx = 8.0 * M_PI;
        st.nt = 256;
        st.nx = 256;
        st.chi.time = {0.5 * st.T, 0.45 * st.T, 0.7};
        st.chi.space = {0.5 * st.Lx, 0.45 * st.Lx, 0.7};
        st.epsilon = st.dt();
        auto ft = TestFunction::bump(st, 0.5 * st.T, 0.6, 0.0, 2.0, 1.0, 0.4);
        auto fits = snse::num::directional_decay_test(st, ft, {{-1.0, 0.0}, {1.0, 0.0}}, 8, 64);
        snse::num::LatticeSpec ss = st;
        ss.T = 2.0;
        ss.Lx = 16.0 * M_PI;
        ss.chi.time = {0.5 * ss.T, 0.45 * ss.T, 0.7};
        ss.chi.space = {0.5 * ss.Lx, 0.45 * ss.Lx, 0.7};
        ss.epsilon = ss.dt();
        auto fsp = TestFunction::bump(ss, 0.5 * ss.T, 0.5, 6.0, 3.0, 1.0, 0.15);
        auto fits2 = snse::num::directional_decay_test(ss, fsp, {{-1.0, 1.0}, {0.0, 1.0}}, 8, 32);
        std::ostringstream dc;
        dc << "direction_omega,direction_k,exponent\n";
        for (const auto& f : fits)
            dc << f.dir.omega << ',' << f.dir.k << ',' << num17(f.exponent) << '\n';
        for (const auto& f : fits2)
            dc << f.dir.omega << ',' << f.dir.k << ',' << num17(f.exponent) << '\n';
        snse::write_text_file((fs::path(cfg.out_dir) / "decay.csv").string(), dc.str());
    }
    return snse::all_passed(rs) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic and lattice engine for the stochastic nonlinear Schroedinger equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int order = -1, kappa = -1, dim = -1;
    double lambda = -1.0;
    long long n_real = -1;
    long long seed = -1;
    int threads = -1;
    bool quick = false;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--order", order, "perturbative order");
    app.add_option("--kappa", kappa, "nonlinearity power");
    app.add_option("--dim", dim, "spatial dimension");
    app.add_option("--lambda", lambda, "coupling constant");
    app.add_option("--realizations", n_real, "Monte Carlo realizations");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_flag("--quick", quick, "reduced sizes (verify only)");

    auto* c_expand = app.add_subcommand("expand", "perturbative coefficients");
    auto* c_expect = app.add_subcommand("expect", "expectation value per order");
    auto* c_corr = app.add_subcommand("correlate", "two-point diagrams and values");
    auto* c_analyze = app.add_subcommand("analyze", "divergence counting report");
    auto* c_sim = app.add_subcommand("simulate", "lattice Monte Carlo covariance check");
    auto* c_verify = app.add_subcommand("verify", "full acceptance suite");
    for (auto* sc : {c_expand, c_expect, c_corr, c_analyze, c_sim, c_verify})
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = snse::load_config_file(config_path);
        if (order >= 0) cfg.order = order;
        if (kappa >= 1) cfg.kappa = kappa;
        if (dim >= 1) cfg.lattice.d = dim;
        if (lambda >= 0.0) cfg.lambda = lambda;
        if (n_real >= 1) cfg.n_real = n_real;
        if (seed >= 0) cfg.seed = uint64_t(seed);
        if (threads >= 0) cfg.threads = threads;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();
        fs::create_directories(cfg.out_dir);

        if (c_expand->parsed()) { write_manifest(cfg, "expand"); return cmd_expand(cfg); }
        if (c_expect->parsed()) { write_manifest(cfg, "expect"); return cmd_expect(cfg); }
        if (c_corr->parsed()) { write_manifest(cfg, "correlate"); return cmd_correlate(cfg); }
        if (c_analyze->parsed()) { write_manifest(cfg, "analyze"); return cmd_analyze(cfg); }
        if (c_sim->parsed()) { write_manifest(cfg, "simulate"); return cmd_simulate(cfg); }
        if (c_verify->parsed()) { write_manifest(cfg, "verify"); return cmd_verify(cfg, quick); }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
