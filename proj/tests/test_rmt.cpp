#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtdet/errors.hpp"
#include "gtdet/fredholm.hpp"
#include "gtdet/kernels.hpp"
#include "gtdet/quadrature.hpp"
#include "gtdet/rmt.hpp"

using namespace gtdet;

namespace {

double normal_cdf(double x, double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); }

// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

// Critical values at level 0.001: one-sample 1.95/√n, two-sample 1.95·√(2/n).
double ks_crit(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

struct Moments {
    double mean = 0.0, var = 0.0;
};
Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("GUE sampling: Hermitian, diagonal variance N, E|H12|^2 = N") {
    Engine g = make_engine(11, 1);
    for (int N : {1, 3}) {
        const int n = 100000;
        std::vector<double> d, off;
        for (int s = 0; s < n; ++s) {
            HermitianMatrix h = sample_gue(N, g);
            CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
            d.push_back(h(0, 0).real());
            CHECK(h(0, 0).imag() == 0.0);
            if (N > 1) off.push_back(std::norm(h(0, 1)));
        }
        // Sample variance of a Gaussian has sd var·√(2/n).
        CHECK(std::abs(moments(d).var - N) < 3.0 * N * std::sqrt(2.0 / n));
        // |H12|² is exponential with mean N and sd N.
        if (N > 1) CHECK(std::abs(moments(off).mean - N) < 3.0 * N / std::sqrt(static_cast<double>(n)));
    }
    CHECK_THROWS_AS(sample_gue(0, g), ArgumentError);
}

TEST_CASE("OU step: t = 0 is the identity, Cov(H11(0), H11(t)) = N q") {
    Engine g = make_engine(11, 2);
    HermitianMatrix h0 = sample_gue(4, g);
    CHECK((ou_step(h0, 0.0, 4, g) - h0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(ou_step(h0, -1.0, 4, g), ArgumentError);
    CHECK_THROWS_AS(ou_step(h0, 1.0, 3, g), ArgumentError);

    const int N = 2, n = 100000;
    const double t = 1.0, q = std::exp(-t / (2.0 * N));
    double c = 0.0;
    for (int s = 0; s < n; ++s) {
        HermitianMatrix a = sample_gue(N, g);
        HermitianMatrix b = ou_step(a, t, N, g);
        c += a(0, 0).real() * b(0, 0).real();
    }
    c /= n;
    // Var(XY) = N²(1 + q²) for a centred Gaussian pair with variance N and correlation q.
    CHECK(std::abs(c - N * q) < 3.0 * N * std::sqrt((1.0 + q * q) / n));
}

TEST_CASE("OU step: long evolution forgets H0 (two-sample KS on lambda_max)") {
    Engine g = make_engine(11, 3);
    const int N = 4, n = 10000;
    HermitianMatrix start = HermitianMatrix::Identity(N, N) * 10.0 * N;
    std::vector<double> evolved, fresh;
    for (int s = 0; s < n; ++s) {
        evolved.push_back(eigenvalues(ou_step(start, 40.0 * N, N, g)).values.back());
        fresh.push_back(eigenvalues(sample_gue(N, g)).values.back());
    }
    CHECK(ks_two_sample(evolved, fresh) < ks_crit(n) * std::sqrt(2.0));
}

TEST_CASE("Matrix Brownian motion: variance t/2, independent increments, N = 1 Gaussian law") {
    Engine g = make_engine(11, 4);
    CHECK_THROWS_AS(sample_matrix_bm(2, {1.0, 0.5}, g), ArgumentError);
    CHECK_THROWS_AS(sample_matrix_bm(2, {-1.0}, g), ArgumentError);

    const int n = 100000;
    const double t1 = 0.7, t2 = 1.9;
    std::vector<double> h11, cov, x1, x2, mix;
    for (int s = 0; s < n; ++s) {
        auto p = sample_matrix_bm(2, {t1, t2}, g);
        h11.push_back(p[1](0, 0).real() * p[1](0, 0).real());
        cov.push_back((p[1](0, 1) - p[0](0, 1)).real() * p[0](0, 1).real());
        CHECK((p[1] - p[1].adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
    // E[H11²] = t/2; the square has sd (t/2)√2.
    CHECK(std::abs(moments(h11).mean - t2 / 2.0) < 3.0 * (t2 / 2.0) * std::sqrt(2.0 / n));
    // Re parts have variances t1/4 and (t2 − t1)/4; the product has sd √(t1(t2 − t1))/4.
    CHECK(std::abs(moments(cov).mean) < 3.0 * std::sqrt(t1 * (t2 - t1)) / 4.0 / std::sqrt(static_cast<double>(n)));

    // N = 1: (H(t1), H(t2)) is centred Gaussian with Cov = min(t1, t2)/2.
    for (int s = 0; s < n; ++s) {
        auto p = sample_matrix_bm(1, {t1, t2}, g);
        x1.push_back(p[0](0, 0).real());
        x2.push_back(p[1](0, 0).real());
        mix.push_back(p[0](0, 0).real() + p[1](0, 0).real());
    }
    const double vmix = t1 / 2.0 + t2 / 2.0 + t1;
    CHECK(ks_distance(x1, [&](double x) { return normal_cdf(x, t1 / 2.0); }) < ks_crit(n));
    CHECK(ks_distance(x2, [&](double x) { return normal_cdf(x, t2 / 2.0); }) < ks_crit(n));
    CHECK(ks_distance(mix, [&](double x) { return normal_cdf(x, vmix); }) < ks_crit(n));
    // The same sum under independent coordinates would have variance (t1 + t2)/2; the test must see that.
    CHECK(ks_distance(mix, [&](double x) { return normal_cdf(x, (t1 + t2) / 2.0); }) > ks_crit(n));
}

TEST_CASE("Eigensolver: diagonal input, trace, 2x2 closed form") {
    HermitianMatrix d = HermitianMatrix::Zero(4, 4);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.5;
    d(3, 3) = 0.0;
    CHECK(eigenvalues(d).values == std::vector<double>{-1.0, 0.0, 2.5, 3.0});

    Engine g = make_engine(11, 5);
    for (int N : {2, 7, 30}) {
        HermitianMatrix h = sample_gue(N, g);
        auto v = eigenvalues(h).values;
        CHECK(std::is_sorted(v.begin(), v.end()));
        CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - h.trace().real()) < 1e-10 * N * N);
    }
    for (int s = 0; s < 50; ++s) {
        HermitianMatrix h = sample_gue(2, g);
        double a = h(0, 0).real(), c = h(1, 1).real(), b2 = std::norm(h(0, 1));
        double m = 0.5 * (a + c), r = std::sqrt(0.25 * (a - c) * (a - c) + b2);
        auto v = eigenvalues(h).values;
        CHECK(std::abs(v[0] - (m - r)) < 1e-12 * (1.0 + r));
        CHECK(std::abs(v[1] - (m + r)) < 1e-12 * (1.0 + r));
    }
    HermitianMatrix bad = HermitianMatrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(eigenvalues(bad), ArgumentError);
}

TEST_CASE("Minors interlace: N = 2 always, N = 5 over 10^4 samples") {
    Engine g = make_engine(11, 6);
    for (int s = 0; s < 1000; ++s) {
        MinorPattern p = minor_eigenvalues(sample_gue(2, g));
        CHECK(p.levels[1][0] <= p.levels[0][0] + 1e-9);
        CHECK(p.levels[0][0] <= p.levels[1][1] + 1e-9);
    }
    int violations = 0;
    for (int s = 0; s < 10000; ++s) {
        MinorPattern p = minor_eigenvalues(sample_gue(5, g));
        REQUIRE(p.levels.size() == 5);
        violations += interlacing_violation(p) > 1e-9;
    }
    CHECK(violations == 0);
    MinorPattern broken{{{0.0}, {0.5, 1.0}}};
    CHECK(interlacing_violation(broken) == doctest::Approx(0.5));
}

TEST_CASE("Minor one-point densities match the GUE-minor kernel after the variance bridge") {
    // Sampling convention at N = 3 maps to the kernel convention by x = c λ, c = √(1/2N).
    const int N = 3, n = 20000;
    const double c = gue_to_kernel_scale(N);
    Engine g = make_engine(11, 7);
    std::vector<MinorPattern> pats;
    for (int s = 0; s < n; ++s) pats.push_back(minor_eigenvalues(sample_gue(N, g)));

    std::vector<double> edges{-8.0};
    for (double e = -3.0; e <= 3.0 + 1e-12; e += 0.5) edges.push_back(e);
    edges.push_back(8.0);
    const std::size_t bins = edges.size() - 1;
    for (int level = 1; level <= N; ++level) {
        std::vector<double> counts(bins, 0.0);
        for (const auto& p : pats)
            for (double lam : p.levels[static_cast<std::size_t>(level - 1)]) {
                double x = c * lam;
                auto it = std::upper_bound(edges.begin(), edges.end(), x);
                std::size_t b = std::clamp<std::size_t>(static_cast<std::size_t>(it - edges.begin()), 1, bins) - 1;
                counts[b] += 1.0;
            }
        double chi2 = 0.0, mass = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            QuadratureRule r = gauss_legendre(40, edges[b], edges[b + 1]);
            double p = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) p += r.weights[k] * gue_minor_kernel(r.nodes[k], level, r.nodes[k], level);
            mass += p;
            double expected = n * p;
            chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
        }
        CHECK(std::abs(mass - level) < 1e-10);
        const double df = static_cast<double>(bins - 1);
        CHECK(std::abs(chi2 - df) < 3.0 * std::sqrt(2.0 * df));
    }
}

TEST_CASE("Haar unitary: unitary, |U11|^2 uniform for N = 2") {
    Engine g = make_engine(11, 8);
    Eigen::MatrixXcd u = haar_unitary(5, g);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-13);
    std::vector<double> p;
    for (int s = 0; s < 20000; ++s) p.push_back(std::norm(haar_unitary(2, g)(0, 0)));
    CHECK(ks_distance(p, [](double x) { return std::clamp(x, 0.0, 1.0); }) < ks_crit(p.size()));
}

TEST_CASE("HCIZ: exact formula, permutation invariance, Monte Carlo z-scores") {
    CHECK(hciz_exact({0.7}, {-1.3}) == doctest::Approx(std::exp(-0.91)).epsilon(1e-15));
    // |U22|² is uniform for N = 2, so the integral is ∫₀¹ e^{2p} dp.
    CHECK(std::abs(hciz_exact({0.0, 1.0}, {0.0, 2.0}) - (std::exp(2.0) - 1.0) / 2.0) < 1e-14);
    CHECK(std::abs(hciz_exact({0.5, -1.0, 2.0}, {0.1, 0.4, -0.3}) - hciz_exact({2.0, 0.5, -1.0}, {0.1, 0.4, -0.3})) < 1e-13);
    CHECK_THROWS_AS(hciz_exact({0.0, 1e-9}, {0.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(hciz_exact({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}), ArgumentError);
    CHECK_THROWS_AS(hciz_exact({0.0, 1.0}, {0.0}), ArgumentError);

    Engine g = make_engine(11, 9);
    auto one = hciz_check({0.7}, {-1.3}, 100, g);
    CHECK(std::abs(one.mc_estimate - one.exact_value) < 1e-14);

    struct Case {
        std::vector<double> a, b;
    };
    for (const Case& k : {Case{{0.0, 1.0}, {0.0, 2.0}}, Case{{0.0, 0.5, 1.0}, {-1.0, 0.0, 1.0}},
                          Case{{-0.5, 0.0, 0.3, 0.6}, {0.2, -0.4, 0.0, 0.5}}}) {
        HcizResult r = hciz_check(k.a, k.b, 1000000, g);
        CHECK(std::abs(r.z_score) <= 3.0);
        CHECK(r.std_error > 0.0);
    }
}

TEST_CASE("Tridiagonal lambda_max sampler has the law of the dense sampler") {
    Engine g = make_engine(11, 10);
    const int N = 20, n = 4000;
    std::vector<double> tri, dense;
    for (int s = 0; s < n; ++s) {
        tri.push_back(sample_gue_lambda_max(N, g));
        dense.push_back(eigenvalues(sample_gue(N, g)).values.back());
    }
    CHECK(ks_two_sample(tri, dense) < ks_crit(n) * std::sqrt(2.0));
    Engine h = make_engine(11, 11);
    std::vector<double> one;
    for (int s = 0; s < 20000; ++s) one.push_back(sample_gue_lambda_max(1, h));
    CHECK(ks_distance(one, [](double x) { return normal_cdf(x, 1.0); }) < ks_crit(one.size()));
}

TEST_CASE("Tabulated F2 matches both exact routes") {
    for (double s : {-6.0, -3.3, -1.77, 0.0, 1.25, 4.0}) {
        CHECK(std::abs(tw2_cdf_fast(s) - tw2_cdf(s).value) < 1e-9);
    }
    CHECK(tw2_cdf_fast(-9.0) == 0.0);
    CHECK(tw2_cdf_fast(9.0) == 1.0);
}

TEST_CASE("Edge MC: KS to F2 at N = 200, improvement along N = 2, 16, 400") {
    Engine g = make_engine(11, 12);
    auto r = edge_process_mc(200, {0.0}, g, 5000);
    CHECK(r.ks_to_f2[0] <= 0.05);
    double prev = 1.0;
    for (int N : {2, 16, 400}) {
        Engine h = make_engine(11, 100 + static_cast<std::uint64_t>(N));
        double ks = edge_process_mc(N, {0.0}, h, 5000).ks_to_f2[0];
        CHECK(ks < prev);
        prev = ks;
    }
    CHECK_THROWS_AS(edge_process_mc(401, {0.0}, g, 10), ArgumentError);
    CHECK_THROWS_AS(edge_process_mc(10, {1.0, 0.0}, g, 10), ArgumentError);
    CHECK_THROWS_AS(edge_process_mc(10, {0.0}, g, 200000), ArgumentError);
}

TEST_CASE("Edge MC: two-time correlation is 1 at gap 0, decreasing, and matches the Airy2 joint CDF") {
    Engine g = make_engine(11, 13);
    const std::size_t trials = 2000;
    auto same = edge_process_mc(30, {0.0, 0.0}, g, 200);
    CHECK(same.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> times{0.0, 0.25, 0.5, 1.0, 2.0};
    auto r = edge_process_mc(50, times, g, trials);
    for (std::size_t k = 1; k < times.size(); ++k) CHECK(r.correlation(0, static_cast<Eigen::Index>(k)) < r.correlation(0, static_cast<Eigen::Index>(k - 1)));
    // Pre-registered: 3 binomial sd plus 0.02 for finite N = 50.
    for (std::size_t k : {1u, 3u})
        for (double a : {-2.5, -1.5, -0.5})
            for (double b : {-2.0, -1.0}) {
                double exact = airy2_joint_cdf({times[0], times[k]}, {a, b}).value;
                double emp = empirical_joint_cdf(r, 0, k, a, b);
                double sd = std::sqrt(std::max(exact * (1.0 - exact), 1e-4) / trials);
                CHECK(std::abs(emp - exact) < 3.0 * sd + 0.02);
            }
}

TEST_CASE("Brownian route: smallest eigenvalue of the minors follows S_v A2(u/S_h)") {
    Engine g = make_engine(11, 14);
    BmEdgeParams p;
    p.L = 60.0;
    auto r = edge_process_bm(p, {0.0, 0.5, 1.5}, g, 1500);
    REQUIRE(r.N == 60);
    // At u = 0 the finite-L correction vanishes to leading order. Pre-registered: KS critical value + 0.03.
    CHECK(r.ks_to_f2[0] < ks_crit(1500) + 0.03);
    CHECK(r.correlation(0, 1) > r.correlation(0, 2));
    CHECK(r.correlation(0, 1) > 0.0);
    BmEdgeParams m = p;
    m.alpha = 1.0;
    m.beta = 0.0;
    auto rm = edge_process_bm(m, {0.0, 1.0}, g, 1500);
    CHECK(rm.ks_to_f2[0] < ks_crit(1500) + 0.03);
    CHECK(rm.correlation(0, 1) > 0.0);
    CHECK(rm.correlation(0, 1) < 1.0);
    CHECK_THROWS_AS(edge_process_bm(p, {1.0, 0.0}, g, 10), ArgumentError);
    p.L = 500.0;
    CHECK_THROWS_AS(edge_process_bm(p, {0.0}, g, 10), ArgumentError);
}

TEST_CASE("Brownian route away from u = 0: KS to S_v F2 shrinks along L = 15, 60, 240") {
    // The O(u L^{-1/3}) correction dominates at u = 1.5; only convergence is asserted.
    for (auto [alpha, beta] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.5, 0.5}}) {
        double prev = 1.0;
        for (double L : {15.0, 60.0, 240.0}) {
            BmEdgeParams p;
            p.L = L;
            p.alpha = alpha;
            p.beta = beta;
            Engine g = make_engine(11, 200 + static_cast<std::uint64_t>(L));
            double ks = edge_process_bm(p, {1.5}, g, 4000).ks_to_f2[0];
            CHECK(ks < prev);
            prev = ks;
        }
    }
}
