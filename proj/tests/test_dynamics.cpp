#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "gtdet/dynamics.hpp"
#include "gtdet/errors.hpp"

using namespace gtdet;

namespace {

// Uniformised generator of two rate-1 walks killed on collision, states (a,b), a<b,
// a in [lo, hi]. Returns P(at (c,d) at time t, alive) by series of (I + Q/2)^k.
double killed_pair_oracle(WeylConfig x, WeylConfig y, double t) {
    std::map<std::pair<std::int64_t, std::int64_t>, double> v{{{x[0], x[1]}, 1.0}}, acc;
    const double lam = 2.0;
    double weight = std::exp(-lam * t);
    for (int k = 0; k < 200; ++k) {
        for (const auto& [s, m] : v) acc[s] += weight * m;
        std::map<std::pair<std::int64_t, std::int64_t>, double> nv;
        for (const auto& [s, m] : v) {
            auto [a, b] = s;
            if (a + 1 < b) nv[{a + 1, b}] += 0.5 * m;
            nv[{a, b + 1}] += 0.5 * m;
        }
        v.swap(nv);
        weight *= lam * t / (k + 1);
    }
    auto it = acc.find({y[0], y[1]});
    return it == acc.end() ? 0.0 : it->second;
}

double binomial_sigma(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-300) / n); }

}  // namespace

TEST_CASE("poisson_pmf") {
    CHECK(poisson_pmf(1.0, -1) == 0.0);
    CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    for (double t : {0.5, 2.0, 10.0}) {
        double s = 0.0;
        for (std::int64_t x = 0; x <= poisson_truncation(t); ++x) s += poisson_pmf(t, x);
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    CHECK(poisson_pmf(1000.0, 1000) == doctest::Approx(0.012614611348721499).epsilon(1e-10));
    CHECK_THROWS_AS(poisson_pmf(0.0, 1), ArgumentError);
    CHECK_THROWS_AS(poisson_pmf(-1.0, 1), ArgumentError);
}

TEST_CASE("charlier transition basics") {
    for (std::int64_t d = -1; d < 6; ++d)
        CHECK(charlier_transition({3}, {3 + d}, 1.7) == doctest::Approx(poisson_pmf(1.7, d)));
    CHECK(charlier_transition({0, 1}, {0, 1}, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(charlier_transition({0, 1}, {0, 2}, 1e-9)) < 1e-8);
    CHECK_THROWS_AS(charlier_transition({1, 0}, {0, 1}, 1.0), ArgumentError);
}

TEST_CASE("charlier row sums converge monotonically") {
    const WeylConfig x{0, 2, 3};
    const double t = 1.5;
    double prev = 0.0;
    const std::int64_t Kmax = poisson_truncation(t, 1e-14) + 4;
    for (std::int64_t K = 2; K <= Kmax; ++K) {
        double s = 0.0;
        for (const auto& y : weyl_window(3, x[0], x[0] + K)) s += charlier_transition(x, y, t);
        CHECK(s >= prev - 1e-14);
        prev = s;
    }
    CHECK(prev > 1.0 - 1e-10);
    CHECK(prev < 1.0 + 1e-10);
}

TEST_CASE("karlin-mcgregor vs killed generator exponential") {
    for (double t : {0.05, 0.3, 1.0}) {
        for (const auto& y : weyl_window(2, 0, 5)) {
            const double km = karlin_mcgregor({0, 1}, y, t);
            CHECK(km >= -1e-15);
            CHECK(km == doctest::Approx(killed_pair_oracle({0, 1}, y, t)).epsilon(1e-10));
        }
    }
    CHECK(karlin_mcgregor({4}, {6}, 2.0) == doctest::Approx(poisson_pmf(2.0, 2)));
}

TEST_CASE("charlier n=2 vs rejection-sampled walks") {
    // Karlin-McGregor coupling: survivors ending at y estimate det(p_t(y_i-x_j)).
    Engine g = make_engine(2024, 1);
    const int M = 1000000;
    const double t = 1.0;
    std::map<WeylConfig, int> hits;
    std::exponential_distribution<double> clock(2.0);
    for (int r = 0; r < M; ++r) {
        std::int64_t a = 0, b = 1;
        bool alive = true;
        for (double s = clock(g); s <= t; s += clock(g)) {
            if (g() & 1) {
                if (++a == b) {
                    alive = false;
                    break;
                }
            } else {
                ++b;
            }
        }
        if (alive) ++hits[{a, b}];
    }
    int checked = 0;
    for (const auto& y : weyl_window(2, 0, 6)) {
        const double km = karlin_mcgregor({0, 1}, y, t);
        const double emp = static_cast<double>(hits[y]) / M;
        CHECK(std::abs(emp - km) <= 3.0 * binomial_sigma(km, M) + 1e-6);
        const double ratio = vandermonde(y) / vandermonde(WeylConfig{0, 1});
        CHECK(charlier_transition({0, 1}, y, t) == doctest::Approx(ratio * km).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked == 21);
}

TEST_CASE("discrete step pmf") {
    DiscreteStepParams p(Rational(1, 3));
    CHECK(discrete_step_pmf(p, 0, 1) == Rational(1, 3));
    CHECK(discrete_step_pmf(p, 0, 0) == Rational(2, 3));
    CHECK(discrete_step_pmf(p, 0, 2) == 0);
    CHECK(discrete_step_pmf(p, 0, -1) == 0);
    CHECK_THROWS_AS(DiscreteStepParams(Rational(0)), ArgumentError);
    CHECK_THROWS_AS(DiscreteStepParams(Rational(1)), ArgumentError);
}

TEST_CASE("discrete charlier transition exact row sums") {
    for (Rational p : {Rational(1, 3), Rational(1, 2), Rational(2, 7)}) {
        DiscreteStepParams dp(p);
        CHECK(discrete_charlier_transition(dp, {0}, {1}) == p);
        for (int n = 1; n <= 4; ++n) {
            for (const auto& x : weyl_window(n, -2, 3)) {
                Rational s = 0;
                for (const auto& y : weyl_window(n, x.front(), x.back() + 1)) {
                    Rational v = discrete_charlier_transition(dp, x, y);
                    CHECK(v >= 0);
                    s += v;
                }
                CHECK(s == 1);
            }
        }
    }
}

TEST_CASE("binomial composition of one-particle step") {
    DiscreteStepParams dp(Rational(1, 3));
    std::map<std::int64_t, Rational> law{{0, 1}};
    const int t = 7;
    for (int s = 0; s < t; ++s) {
        std::map<std::int64_t, Rational> next;
        for (const auto& [x, m] : law)
            for (std::int64_t y : {x, x + 1}) next[y] += m * discrete_charlier_transition(dp, {x}, {y});
        law.swap(next);
    }
    for (int x = 0; x <= t; ++x) {
        BigInt c = 1;
        for (int i = 0; i < x; ++i) c = c * (t - i) / (i + 1);
        Rational expect = Rational(c);
        for (int i = 0; i < x; ++i) expect *= Rational(1, 3);
        for (int i = x; i < t; ++i) expect *= Rational(2, 3);
        CHECK(law[x] == expect);
    }
}

namespace {

// Two particles from (0,1), t/p steps of the exact discrete chain, double accumulation.
double discrete_limit_error(const Rational& pr) {
    DiscreteStepParams dp(pr);
    const long steps = static_cast<long>(std::llround(1.0 / to_double(pr)));
    std::map<WeylConfig, double> law{{{0, 1}, 1.0}};
    std::map<std::pair<std::int64_t, WeylConfig>, double> cache;
    for (long s = 0; s < steps; ++s) {
        std::map<WeylConfig, double> next;
        for (const auto& [x, m] : law) {
            if (m < 1e-18) continue;
            for (std::uint32_t mask = 0; mask < 4; ++mask) {
                WeylConfig y{x[0] + (mask & 1), x[1] + ((mask >> 1) & 1)};
                if (!is_weyl(y)) continue;
                WeylConfig dy{y[0] - x[0], y[1] - x[0]};
                auto key = std::make_pair(x[1] - x[0], dy);
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache.emplace(key, to_double(discrete_charlier_transition(dp, {0, x[1] - x[0]}, dy))).first;
                next[y] += m * it->second;
            }
        }
        law.swap(next);
    }
    double worst = 0.0;
    for (const auto& y : weyl_window(2, 0, 12))
        worst = std::max(worst, std::abs(law[y] - charlier_transition({0, 1}, y, 1.0)));
    return worst;
}

}  // namespace

TEST_CASE("discrete-time limit approaches charlier") {
    // Error is first order in p: Binomial(1/p, p) already differs from Poisson(1)
    // by ~e^{-1} p/2 at the origin, so 1e-4 needs p = 1e-4.
    const double e3 = discrete_limit_error(Rational(1, 1000));
    const double e4 = discrete_limit_error(Rational(1, 10000));
    CHECK(e3 < 2.5e-4);
    CHECK(e4 < 1e-4);
    CHECK(e3 / e4 == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("markov link") {
    CHECK(markov_link({0, 2}, {1}) == Rational(1, 2));
    CHECK(markov_link({0, 2}, {2}) == Rational(1, 2));
    CHECK(markov_link({0, 2}, {0}) == 0);
    CHECK(markov_link({0, 2}, {3}) == 0);
    CHECK(markov_link({-3, -2, -1}, {-2, -1}) == 1);
    for (int n = 2; n <= 5; ++n) {
        for (const auto& upper : weyl_window(n, 0, 6)) {
            Rational s = 0;
            for (const auto& lower : weyl_window(n - 1, 0, 6)) s += markov_link(upper, lower);
            CHECK(s == 1);
        }
    }
}

TEST_CASE("uniform sampling given the top level") {
    Engine g = make_engine(7, 3);
    const int M = 100000;
    int ones = 0;
    for (int r = 0; r < M; ++r) ones += sample_uniform_given_top({0, 2}, g).levels[0][0] == 1;
    CHECK(std::abs(ones / double(M) - 0.5) <= 3.0 * binomial_sigma(0.5, M));

    auto packed = packed_pattern(4);
    CHECK(sample_uniform_given_top(packed.levels.back(), g) == packed);

    auto pats = enumerate_patterns({0, 2, 4});
    REQUIRE(pats.size() == 8);
    std::map<GTPattern, int> freq;
    for (int r = 0; r < M; ++r) ++freq[sample_uniform_given_top({0, 2, 4}, g)];
    double chi2 = 0.0;
    const double e = M / 8.0;
    for (const auto& p : pats) chi2 += (freq[p] - e) * (freq[p] - e) / e;
    CHECK(freq.size() == 8);
    boost::math::chi_squared dist(7);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 1e-3);
}

TEST_CASE("sequential update: one particle is a Bernoulli walk") {
    Engine g = make_engine(3, 0);
    DiscreteStepParams dp(Rational(1, 3));
    SimulationState s{packed_pattern(1), 0.0, 3};
    const int M = 200000;
    long jumps = 0;
    for (int r = 0; r < M; ++r) {
        auto n = sequential_update_step(s, dp, g);
        jumps += n.pattern.levels[0][0] - s.pattern.levels[0][0];
        CHECK(n.time == 1.0);
    }
    CHECK(std::abs(jumps / double(M) - 1.0 / 3.0) <= 3.0 * binomial_sigma(1.0 / 3.0, M));
}

TEST_CASE("sequential update: exact one-step law from packed, N=2") {
    // Direct evaluation of P_1(x^1,y^1) * P_2(x^2,y^2) Λ(y^2,y^1) / (P_2 Λ)(x^2,y^1).
    DiscreteStepParams dp(Rational(1, 2));
    const GTPattern start = packed_pattern(2);
    std::map<GTPattern, Rational> formula;
    for (std::int64_t y1 : {-1, 0}) {
        const Rational p1 = discrete_charlier_transition(dp, start.levels[0], {y1});
        Rational norm = 0;
        std::vector<std::pair<WeylConfig, Rational>> tops;
        for (const auto& y2 : weyl_window(2, -2, 0)) {
            Rational w = discrete_charlier_transition(dp, start.levels[1], y2) * markov_link(y2, {y1});
            norm += w;
            if (w != 0) tops.emplace_back(y2, w);
        }
        for (const auto& [y2, w] : tops) formula[GTPattern{{{y1}, y2}}] += p1 * w / norm;
    }
    Rational total = 0;
    for (const auto& [k, v] : formula) total += v;
    CHECK(total == 1);

    Engine g = make_engine(99, 0);
    const int M = 400000;
    std::map<GTPattern, int> freq;
    for (int r = 0; r < M; ++r) {
        GTPattern p = start;
        sequential_update_inplace(p, 0.5, g);
        ++freq[p];
    }
    for (const auto& [k, c] : freq) CHECK(formula.count(k) == 1);
    for (const auto& [k, v] : formula) {
        const double pv = to_double(v);
        CHECK(std::abs(freq[k] / double(M) - pv) <= 3.0 * binomial_sigma(pv, M));
    }
}

TEST_CASE("sequential update: level laws follow discrete charlier from packed") {
    DiscreteStepParams dp(Rational(1, 2));
    const int N = 3, T = 4, M = 1000000;
    // exact law of level n after T steps
    std::vector<std::map<WeylConfig, Rational>> exact(N);
    for (int n = 1; n <= N; ++n) {
        std::map<WeylConfig, Rational> law{{packed_pattern(n).levels.back(), 1}};
        for (int s = 0; s < T; ++s) {
            std::map<WeylConfig, Rational> next;
            for (const auto& [x, m] : law)
                for (const auto& y : weyl_window(n, x.front(), x.back() + 1)) {
                    Rational v = discrete_charlier_transition(dp, x, y);
                    if (v != 0) next[y] += m * v;
                }
            law.swap(next);
        }
        exact[n - 1] = law;
    }
    Engine g = make_engine(5, 5);
    std::vector<std::map<WeylConfig, int>> freq(N);
    for (int r = 0; r < M; ++r) {
        GTPattern p = packed_pattern(N);
        for (int s = 0; s < T; ++s) sequential_update_inplace(p, 0.5, g);
        for (int n = 0; n < N; ++n) ++freq[n][p.levels[n]];
    }
    int cells = 0, inside = 0;
    for (int n = 0; n < N; ++n) {
        for (const auto& [x, c] : freq[n]) CHECK(exact[n].count(x) == 1);
        for (const auto& [x, v] : exact[n]) {
            const double pv = to_double(v);
            ++cells;
            inside += std::abs(freq[n][x] / double(M) - pv) <= 3.0 * binomial_sigma(pv, M);
        }
    }
    // each cell is a 3σ test; allow the expected ~0.3% of excursions plus slack
    CHECK(inside >= cells - std::max(2, cells / 100));
}

TEST_CASE("continuous time: one particle") {
    Engine g = make_engine(1, 1);
    const int M = 200000;
    const double T = 2.5;
    double s = 0.0;
    for (int r = 0; r < M; ++r) s += continuous_time_simulate(1, T, g).pattern.levels[0][0];
    CHECK(std::abs(s / M - (T - 1.0)) <= 3.0 * std::sqrt(T / M));
}

TEST_CASE("continuous time: interlacing on every event, N=6") {
    set_event_checks(true);
    Engine g = make_engine(8, 0);
    for (int r = 0; r < 2000; ++r) CHECK_NOTHROW(continuous_time_simulate(6, 3.0, g));
    set_event_checks(false);
}

TEST_CASE("continuous time: level law does not depend on N") {
    Engine g = make_engine(10, 2);
    const int M = 200000;
    std::map<WeylConfig, int> a, b;
    for (int r = 0; r < M; ++r) ++a[continuous_time_simulate(3, 1.0, g).pattern.levels[2]];
    for (int r = 0; r < M; ++r) ++b[continuous_time_simulate(5, 1.0, g).pattern.levels[2]];
    std::set<WeylConfig> keys;
    for (auto& [k, v] : a) keys.insert(k);
    for (auto& [k, v] : b) keys.insert(k);
    int bad = 0;
    for (const auto& k : keys) {
        const double pa = a[k] / double(M), pb = b[k] / double(M), pm = 0.5 * (pa + pb);
        bad += std::abs(pa - pb) > 3.0 * std::sqrt(2.0 * pm * (1 - pm) / M) + 1e-12;
    }
    CHECK(bad <= std::max<int>(2, keys.size() / 100));
}

TEST_CASE("tasep projections") {
    CHECK(project_tasep(packed_pattern(3)) == std::vector<std::int64_t>{-1, -2, -3});
    CHECK(project_pushasep(packed_pattern(3)) == std::vector<std::int64_t>{-1, -1, -1});
    Engine g = make_engine(12, 0);
    const int M = 1000000;
    std::map<std::vector<std::int64_t>, int> a, b;
    for (int r = 0; r < M; ++r) {
        auto x = project_tasep(continuous_time_simulate(3, 1.0, g));
        CHECK_MESSAGE((x[1] < x[0] && x[2] < x[1]), "order");
        ++a[x];
    }
    for (int r = 0; r < M; ++r) ++b[direct_tasep_simulate(3, 1.0, g)];
    std::set<std::vector<std::int64_t>> keys;
    for (auto& [k, v] : a) keys.insert(k);
    for (auto& [k, v] : b) keys.insert(k);
    int bad = 0;
    for (const auto& k : keys) {
        const double pa = a[k] / double(M), pb = b[k] / double(M), pm = 0.5 * (pa + pb);
        bad += std::abs(pa - pb) > 3.0 * std::sqrt(2.0 * pm * (1 - pm) / M) + 1e-12;
    }
    CHECK(bad <= std::max<int>(2, keys.size() / 100));
}

namespace {

struct Profile {
    std::vector<double> mean, sigma, xi;
};

// Density in 20 ξ-bins over (-1,1), averaged over M runs of N-particle step TASEP.
Profile burgers_profile(double t, int N, int M, Engine& g) {
    const int bins = 20;
    std::vector<double> occ(bins, 0.0), occ2(bins, 0.0);
    for (int r = 0; r < M; ++r) {
        auto x = direct_tasep_simulate(N, t, g);
        for (int k = 1; k < N; ++k) REQUIRE(x[k] < x[k - 1]);
        std::vector<double> here(bins, 0.0);
        for (auto xi : x) {
            const double s = (xi + 0.5) / t;
            if (s <= -1.0 || s >= 1.0) continue;
            here[static_cast<int>((s + 1.0) / 2.0 * bins)] += 1.0;
        }
        for (int b = 0; b < bins; ++b) {
            const double rho = here[b] / (2.0 * t / bins);
            occ[b] += rho;
            occ2[b] += rho * rho;
        }
    }
    Profile p;
    for (int b = 0; b < bins; ++b) {
        const double mean = occ[b] / M;
        p.mean.push_back(mean);
        p.sigma.push_back(std::sqrt(std::max(occ2[b] / M - mean * mean, 0.0) / M));
        p.xi.push_back(-1.0 + (b + 0.5) * 2.0 / bins);
    }
    return p;
}

double sup_deviation(const Profile& p, double xi_max, double* sigma_at = nullptr) {
    double worst = 0.0;
    for (std::size_t b = 0; b < p.mean.size(); ++b) {
        if (std::abs(p.xi[b]) > xi_max) continue;
        const double dev = std::abs(p.mean[b] - (1.0 - p.xi[b]) / 2.0);
        if (dev > worst) {
            worst = dev;
            if (sigma_at) *sigma_at = p.sigma[b];
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("direct tasep: exclusion and Burgers profile") {
    Engine g = make_engine(21, 0);
    CHECK(direct_tasep_simulate(1, 3.0, g).size() == 1);
    // rear particles never influence the front, so N > 2t reproduces the infinite system on (-t, t)
    auto p50 = burgers_profile(50.0, 120, 4000, g);
    auto p200 = burgers_profile(200.0, 450, 1000, g);
    double sig = 0.0;
    const double bulk = sup_deviation(p50, 0.3, &sig);
    CHECK(bulk <= 0.02 + 3.0 * sig);
    // finite-time broadening near ξ = ±1 shrinks as t grows
    const double full50 = sup_deviation(p50, 1.0), full200 = sup_deviation(p200, 1.0);
    CHECK(full200 < 0.75 * full50);
    CHECK(sup_deviation(p200, 0.6, &sig) <= 0.02 + 3.0 * sig);
}

TEST_CASE("intertwining is exact") {
    auto w2 = weyl_window(2, -3, 3);
    CHECK(verify_intertwining(2, DiscreteStepParams(Rational(1, 3)), w2) == 0);
    auto w3 = weyl_window(3, -3, 3);
    CHECK(verify_intertwining(3, DiscreteStepParams(Rational(1, 2)), w3) == 0);
    CHECK_THROWS_AS(verify_intertwining(1, DiscreteStepParams(Rational(1, 2)), {}), ArgumentError);
}

TEST_CASE("toeplitz identities") {
    auto r2 = verify_toeplitz_props(ToeplitzSymbol::Geometric, {0, 2});
    CHECK(r2.lhs == 2);
    CHECK(r2.defect == 0);
    auto r3 = verify_toeplitz_props(ToeplitzSymbol::Geometric, {0, 2, 4});
    CHECK(r3.lhs == 16);
    CHECK(r3.defect == 0);
    CHECK(verify_toeplitz_props(ToeplitzSymbol::Geometric, {5}).lhs == 1);
    for (int n = 1; n <= 5; ++n)
        for (const auto& x : weyl_window(n, -1, 4)) {
            CHECK(verify_toeplitz_props(ToeplitzSymbol::Geometric, x).defect == 0);
            CHECK(verify_toeplitz_props(ToeplitzSymbol::Bernoulli, x, Rational(1, 3)).defect == 0);
        }
}

TEST_CASE("interlacing sign is constant over interlaced pairs") {
    for (std::size_t n = 1; n <= 5; ++n) {
        const int s = interlacing_sign(n);
        CHECK(std::abs(s) == 1);
        for (const auto& upper : weyl_window(static_cast<int>(n), 0, 5))
            for (const auto& lower : interlacing_lowers(upper)) CHECK(interlacing_indicator_det(lower, upper) == s);
    }
}

TEST_CASE("charlier level law") {
    auto law = charlier_level_law(1, 2.0);
    CHECK(law[{-1}] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    double s = 0.0;
    for (auto& [k, v] : charlier_level_law(3, 2.0)) s += v;
    CHECK(s == doctest::Approx(1.0));
}
