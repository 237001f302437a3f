#include "snse/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace snse::num {

Estimate Accumulator::estimate() const {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    e.mean = sum / double(n);
    if (n > 1) {
        double var = (sum_abs2 - double(n) * std::norm(e.mean)) / double(n - 1);
        if (var < 0.0) var = 0.0;
        e.stderror = std::sqrt(var / double(n));
    }
    return e;
}

Estimate merge(const Estimate& a, const Estimate& b) {
    Accumulator acc;
    acc.sum = a.mean * double(a.n) + b.mean * double(b.n);
    double va = a.stderror * a.stderror * a.n * std::max<long long>(a.n - 1, 0);
    double vb = b.stderror * b.stderror * b.n * std::max<long long>(b.n - 1, 0);
    acc.sum_abs2 = va + double(a.n) * std::norm(a.mean) + vb + double(b.n) * std::norm(b.mean);
    acc.n = a.n + b.n;
    return acc.estimate();
}

namespace {

struct SplitMix64 {
    uint64_t s;
    uint64_t next() {
        uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

struct Xoshiro256pp {
    uint64_t s[4];
    explicit Xoshiro256pp(uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& x : s) x = sm.next();
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t next() {
        uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
    double uniform() {   // in (0, 1]
        return (double(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

} // namespace

uint64_t mix_seed(uint64_t seed, uint64_t index) {
    SplitMix64 sm{seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL)};
    sm.next();
    return sm.next();
}

Grid white_noise(const LatticeSpec& spec, uint64_t seed, uint64_t index) {
    Xoshiro256pp rng(mix_seed(seed, index));
    Grid xi(spec.nt, spec.nx);
    double amp = 1.0 / std::sqrt(2.0 * spec.dt() * spec.dx());
    for (auto& v : xi.a) {
        double u1 = rng.uniform();
        double u2 = rng.uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        v = cplx(amp * r * std::cos(2.0 * M_PI * u2), amp * r * std::sin(2.0 * M_PI * u2));
    }
    return xi;
}

Grid stochastic_convolution(const LatticeSpec& spec, const Grid& noise) {
    return stochastic_convolution(spec, noise, chi_grid(spec));
}

Grid stochastic_convolution(const LatticeSpec& spec, const Grid& noise, const Grid& chi) {
    Grid src(spec.nt, spec.nx);
    for (size_t i = 0; i < src.a.size(); ++i) src.a[i] = chi.a[i].real() * noise.a[i];
    return propagate_forward(spec, src, false);
}

namespace {

// deterministic block-parallel driver: blocks reduced in index order
template <typename State, typename Work>
void run_blocks(long long n, int threads, State& state, Work&& work) {
    const long long block = 256;
    long long nblocks = (n + block - 1) / block;
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    std::vector<State> partial(static_cast<size_t>(nblocks));
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                long long b = next.fetch_add(1);
                if (b >= nblocks) break;
                long long lo = b * block, hi = std::min(n, lo + block);
                for (long long r = lo; r < hi; ++r) work(partial[size_t(b)], r);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& p : partial) state.merge(p);
}

cplx pair_support(const LatticeSpec& spec, const Grid& u, const TestFunction& f) {
    return pair_grid(spec, u, f.values);
}

} // namespace

std::vector<LinearStats> simulate_linear(const LatticeSpec& spec, long long n_real,
                                         const std::vector<ObservablePair>& observables,
                                         uint64_t seed, int threads) {
    spec.validate();
    if (n_real < 1) throw std::invalid_argument("simulate_linear: need realizations");

    struct State {
        std::vector<Accumulator> cov, pseudo, m1, m2;
        void init(size_t k) { cov.resize(k); pseudo.resize(k); m1.resize(k); m2.resize(k); }
        void merge(const State& o) {
            if (cov.empty()) init(o.cov.size());
            for (size_t i = 0; i < cov.size(); ++i) {
                cov[i].merge(o.cov[i]);
                pseudo[i].merge(o.pseudo[i]);
                m1[i].merge(o.m1[i]);
                m2[i].merge(o.m2[i]);
            }
        }
    };
    State total;
    total.init(observables.size());
    Grid chi = chi_grid(spec);

    run_blocks(n_real, threads, total, [&](State& st, long long r) {
        if (st.cov.empty()) st.init(observables.size());
        Grid xi = white_noise(spec, seed, uint64_t(r));
        Grid phi = stochastic_convolution(spec, xi, chi);
        Grid phibar = phi;
        for (auto& v : phibar.a) v = std::conj(v);
        for (size_t i = 0; i < observables.size(); ++i) {
            cplx p1 = pair_support(spec, phi, *observables[i].f1);
            cplx p2 = pair_support(spec, phi, *observables[i].f2);
            cplx p2bar = pair_support(spec, phibar, *observables[i].f2);
            st.cov[i].add(p1 * p2bar);
            st.pseudo[i].add(p1 * p2);
            st.m1[i].add(p1);
            st.m2[i].add(p2);
        }
    });

    std::vector<LinearStats> out(observables.size());
    for (size_t i = 0; i < observables.size(); ++i) {
        out[i].covariance = total.cov[i].estimate();
        out[i].pseudo = total.pseudo[i].estimate();
        out[i].mean1 = total.m1[i].estimate();
        out[i].mean2 = total.m2[i].estimate();
    }
    return out;
}

FirstOrderRun simulate_first_order(const LatticeSpec& spec, const std::vector<double>& lambdas,
                                   long long n_real, const TestFunction& f1,
                                   const TestFunction& f2, Extension ext, uint64_t seed,
                                   int threads) {
    spec.validate();
    if (spec.d != 1) throw std::invalid_argument("simulate_first_order: d = 1 only");

    // Wick shift aligning the naive lattice coinciding-point covariance with
    // the configured extension; enters the cubic term twice (two pairings).
    Grid cbar = coeff_C(spec, ext);
    Grid naive = naive_coincident_covariance(spec);
    Grid shift(spec.nt, spec.nx);
    for (size_t i = 0; i < shift.a.size(); ++i)
        shift.a[i] = naive.a[i].real() - cbar.a[i].real();
    Grid chi = chi_grid(spec);

    struct State {
        Accumulator zero;                  // phi(f1) conj phi(f2)
        std::vector<Accumulator> at, slope, mean_psi;
        void init(size_t k) { at.resize(k); slope.resize(k); mean_psi.resize(k); }
        void merge(const State& o) {
            if (at.empty()) init(o.at.size());
            zero.merge(o.zero);
            for (size_t i = 0; i < at.size(); ++i) {
                at[i].merge(o.at[i]);
                slope[i].merge(o.slope[i]);
                mean_psi[i].merge(o.mean_psi[i]);
            }
        }
    };
    State total;
    total.init(lambdas.size());

    Grid f2conj = f2.values;
    for (auto& v : f2conj.a) v = std::conj(v);

    run_blocks(n_real, threads, total, [&](State& st, long long r) {
        if (st.at.empty()) st.init(lambdas.size());
        Grid xi = white_noise(spec, seed, uint64_t(r));
        Grid phi = stochastic_convolution(spec, xi, chi);

        Grid cubic(spec.nt, spec.nx);
        for (size_t i = 0; i < cubic.a.size(); ++i) {
            cplx p = phi.a[i];
            cubic.a[i] = chi.a[i].real() *
                         (std::conj(p) * p * p - 2.0 * shift.a[i].real() * p);
        }
        Grid psi1 = propagate_forward(spec, cubic, false);

        // pairings of the zeroth and first order parts with both slots
        cplx a0 = pair_grid(spec, phi, f1.values);
        cplx a1 = pair_grid(spec, psi1, f1.values);
        cplx b0 = std::conj(pair_grid(spec, phi, f2conj));
        cplx b1 = std::conj(pair_grid(spec, psi1, f2conj));

        st.zero.add(a0 * b0);
        for (size_t i = 0; i < lambdas.size(); ++i) {
            double l = lambdas[i];
            cplx obs = (a0 + l * a1) * (b0 + l * b1);
            st.at[i].add(obs);
            st.slope[i].add(a1 * b0 + a0 * b1 + l * a1 * b1);
            st.mean_psi[i].add(a0 + l * a1);
        }
    });

    FirstOrderRun run;
    run.linear_two_point = total.zero.estimate();
    for (size_t i = 0; i < lambdas.size(); ++i) {
        FirstOrderStats s;
        s.lambda = lambdas[i];
        s.two_point = total.at[i].estimate();
        s.slope = total.slope[i].estimate();
        s.mean_psi = total.mean_psi[i].estimate();
        run.per_lambda.push_back(s);
    }
    return run;
}

} // namespace snse::num
