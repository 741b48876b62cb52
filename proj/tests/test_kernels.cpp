#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/airy.hpp>

#include "gtdet/airy.hpp"
#include "gtdet/dynamics.hpp"
#include "gtdet/errors.hpp"
#include "gtdet/kernels.hpp"
#include "gtdet/patterns.hpp"
#include "gtdet/quadrature.hpp"
#include "gtdet/rng.hpp"

using namespace gtdet;

namespace {

double binom_real(double p, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (p - i) / (i + 1);
    return r;
}

double fact(int k) { return std::tgamma(k + 1.0); }

// Discrete kernel by exact residues. The w-integral around 0 is a finite Laurent extraction:
// a_j = [w^j] e^{t1 w}(1−w)^{n1}. The remaining z-integral around 1 is an order-n2 pole,
// expanded by Leibniz on z^{p} e^{−t2 z}.
double residue_kernel(int n1, double t1, long x1, int n2, double t2, long x2) {
    double d = 0.0;
    long m = x1 + n1;
    for (long k = 0; k <= m; ++k) {
        long j = m - k;
        double a = 0.0;
        for (int l = 0; l <= std::min<long>(j, n1); ++l)
            a += binom_real(n1, l) * (l % 2 ? -1.0 : 1.0) * std::pow(t1, j - l) / fact(j - l);
        double p = x2 + n2 - k - 1;
        double r = 0.0;
        for (int jj = 0; jj <= n2 - 1; ++jj)
            r += binom_real(p, jj) * std::pow(-t2, n2 - 1 - jj) / fact(n2 - 1 - jj);
        r *= std::exp(-t2) * ((n2 % 2) ? -1.0 : 1.0);
        d += -a * r;
    }
    double s = 0.0;
    if (kernel_indicator(n1, t1, n2, t2)) {
        long dn = n2 - n1, deg = (x1 - x2) - dn;
        double dt = t1 - t2;
        for (long j = 0; j <= deg; ++j) s += binom_real(dn + j - 1, j) * std::pow(dt, deg - j) / fact(deg - j);
    }
    return d - s;
}

double det2(double k11, double k12, double k21, double k22) { return k11 * k22 - k12 * k21; }

// Orthonormal Hermite functions for the weight e^{−x²}.
double hermite_function(int k, double x) {
    double h0 = 1.0, h1 = 2.0 * x;
    double h = k == 0 ? h0 : h1;
    for (int j = 2; j <= k; ++j) {
        h = 2.0 * x * h1 - 2.0 * (j - 1) * h0;
        h0 = h1;
        h1 = h;
    }
    double norm = std::sqrt(std::pow(2.0, k) * fact(k) * std::sqrt(M_PI));
    return h * std::exp(-x * x / 2.0) / norm;
}

// Independent fixed Gauss-Legendre quadrature of ∫_a^b w(λ) Ai(x+λ)Ai(y+λ) dλ using Boost's Ai.
template <class W>
double boost_airy_integral(double x, double y, double a, double b, int panels, W weight) {
    auto rule = gauss_legendre_panels(a, b, panels, 20);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double l = rule.nodes[i];
        s += rule.weights[i] * weight(l) * boost::math::airy_ai(x + l) * boost::math::airy_ai(y + l);
    }
    return s;
}

}  // namespace

TEST_CASE("Ai matches Boost on the documented range") {
    double worst = 0.0;
    for (double x = -30.0; x <= 30.0; x += 0.037) worst = std::max(worst, std::abs(airy_ai(x) - boost::math::airy_ai(x)));
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(airy_ai(30.5), ArgumentError);
    CHECK_THROWS_AS(airy_ai(-31.0), ArgumentError);
}

TEST_CASE("Ai(0) closed form and the defining ODE") {
    CHECK(std::abs(airy_ai(0.0) - std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)) < 1e-14);
    double h = 1e-2;
    for (double x : {-2.0, 0.0, 2.0}) {
        // fourth-order central stencil
        double second = (-airy_ai(x + 2 * h) + 16 * airy_ai(x + h) - 30 * airy_ai(x) + 16 * airy_ai(x - h) -
                         airy_ai(x - 2 * h)) /
                        (12 * h * h);
        CHECK(std::abs(second - x * airy_ai(x)) < 1e-8);
    }
}

TEST_CASE("Ai positive and decreasing on the right half-line, continuous across the seam") {
    double prev = airy_ai(0.0);
    for (double x = 0.05; x <= 30.0; x += 0.05) {
        double v = airy_ai(x);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
    for (double s : {-kAirySeriesSeam, kAirySeriesSeam}) {
        CHECK(std::abs(detail::airy_ai_series(s) - detail::airy_ai_contour(s)) < 1e-12);
    }
}

TEST_CASE("Airy kernel: symmetry, positivity, independent quadrature") {
    for (double x : {-8.0, -2.5, 0.0, 1.0, 4.0})
        for (double y : {-6.0, -1.0, 0.5, 3.0}) {
            CHECK(std::abs(airy_kernel(x, y) - airy_kernel(y, x)) < 1e-12);
        }
    for (double x : {-10.0, -3.0, 0.0, 2.0, 7.0}) CHECK(airy_kernel(x, x) >= 0.0);
    double oracle = boost_airy_integral(0.0, 0.0, 0.0, 30.0, 120, [](double) { return 1.0; });
    CHECK(std::abs(airy_kernel(0.0, 0.0) - oracle) < 1e-10);
    // Christoffel-Darboux form at x ≠ y.
    auto cd = [](double x, double y) {
        double h = 1e-4;
        double dx = (airy_ai(x + h) - airy_ai(x - h)) / (2 * h), dy = (airy_ai(y + h) - airy_ai(y - h)) / (2 * h);
        return (airy_ai(x) * dy - dx * airy_ai(y)) / (x - y);
    };
    CHECK(std::abs(airy_kernel(-1.0, 0.7) - cd(-1.0, 0.7)) < 1e-7);
}

TEST_CASE("extended Airy kernel: branch reduction, negative-half-line branch, full-line closed form") {
    for (double x : {-2.0, 0.0, 1.5}) {
        CHECK(std::abs(extended_airy_kernel(x, 0.3, 0.4, 0.3) - airy_kernel(x, 0.4)) < 1e-12);
    }
    for (double delta : {0.3, 1.0, 2.5, 6.0}) {
        double x = -0.7, y = 0.4;
        // t > t' branch against direct quadrature of −∫_{ℝ−} e^{δλ} Ai Ai.
        double lo = -(40.0 / delta + 12.0);
        double direct = -boost_airy_integral(x, y, lo, 0.0, static_cast<int>(-2 * lo), [&](double l) { return std::exp(delta * l); });
        CHECK(std::abs(extended_airy_kernel(x, delta, y, 0.0) - direct) < 1e-8);
        // full line computed two ways
        double full = boost_airy_integral(x, y, lo, 30.0, static_cast<int>(2 * (30 - lo)), [&](double l) { return std::exp(delta * l); });
        double cf = airy_full_line_closed_form(x, y, delta);
        CHECK(std::abs(full - cf) < 1e-8 * std::max(1.0, std::abs(cf)));
    }
    // t <= t' branch against direct quadrature
    double x = 0.2, y = -0.5, d = 0.8;
    double plus = boost_airy_integral(x, y, 0.0, 30.0, 120, [&](double l) { return std::exp(-d * l); });
    CHECK(std::abs(extended_airy_kernel(x, 0.0, y, d) - plus) < 1e-10);
}

TEST_CASE("extended Airy kernel decays to the right") {
    for (auto [t, tp] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.5, 0.5}}) {
        double prev = std::abs(extended_airy_kernel(5.0, t, 0.0, tp));
        for (double x = 5.5; x <= 14.0; x += 0.5) {
            double v = std::abs(extended_airy_kernel(x, t, 0.0, tp));
            CHECK(v <= prev);
            prev = v;
        }
        CHECK(prev < 1e-8);
    }
}

TEST_CASE("extended Airy matrix equals entrywise evaluation") {
    std::vector<std::vector<double>> xs{{-1.0, 0.0, 1.3}, {-0.5, 0.8}};
    std::vector<double> ts{0.0, 0.7};
    Eigen::MatrixXd m = extended_airy_matrix(xs, ts);
    std::size_t r = 0;
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (double x : xs[a]) {
            std::size_t c = 0;
            for (std::size_t b = 0; b < xs.size(); ++b)
                for (double y : xs[b]) {
                    CHECK(std::abs(m(r, c) - extended_airy_kernel(x, ts[a], y, ts[b])) < 1e-10);
                    ++c;
                }
            ++r;
        }
}

TEST_CASE("kernel indicator truth table") {
    CHECK(kernel_indicator(1, 1.0, 2, 1.0));
    CHECK(kernel_indicator(1, 2.0, 1, 1.0));
    CHECK(kernel_indicator(1, 2.0, 3, 0.5));
    CHECK_FALSE(kernel_indicator(1, 1.0, 1, 1.0));
    CHECK_FALSE(kernel_indicator(2, 1.0, 1, 1.0));
    CHECK_FALSE(kernel_indicator(1, 1.0, 1, 2.0));
    CHECK_FALSE(kernel_indicator(2, 0.5, 1, 2.0));
}

TEST_CASE("TASEP kernel equals the exact residue evaluation") {
    double worst = 0.0;
    for (int n1 = 1; n1 <= 3; ++n1)
        for (int n2 = 1; n2 <= 3; ++n2)
            for (double t1 : {0.0, 1.0})
                for (double t2 : {0.0, 1.0})
                    for (long x1 = -5; x1 <= 5; ++x1)
                        for (long x2 = -5; x2 <= 5; ++x2) {
                            double q = tasep_spacelike_kernel({n1, t1, x1}, {n2, t2, x2});
                            worst = std::max(worst, std::abs(q - residue_kernel(n1, t1, x1, n2, t2, x2)));
                        }
    CHECK(worst < 1e-10);
}

TEST_CASE("TASEP kernel: node doubling and contour validation") {
    TasepContours big;
    big.w.nodes = 512;
    big.z.nodes = 512;
    double worst = 0.0;
    for (int n1 = 1; n1 <= 4; ++n1)
        for (int n2 = 1; n2 <= 4; ++n2)
            for (long x1 = -4; x1 <= 4; x1 += 2)
                for (long x2 = -4; x2 <= 4; x2 += 2) {
                    TasepPoint a{n1, 2.0, x1}, b{n2, 1.5, x2};
                    worst = std::max(worst, std::abs(tasep_spacelike_kernel(a, b) - tasep_spacelike_kernel(a, b, big)));
                }
    CHECK(worst < 1e-10);
    TasepContours bad;
    bad.w.radius = 0.8;
    CHECK_THROWS_AS(tasep_spacelike_kernel({1, 1.0, 0}, {1, 1.0, 0}, bad), ArgumentError);
    TasepContours encloses;
    encloses.z.radius = 1.2;
    CHECK_THROWS_AS(tasep_spacelike_kernel({1, 1.0, 0}, {1, 1.0, 0}, encloses), ArgumentError);
}

TEST_CASE("TASEP one-point density against Monte Carlo") {
    const int runs = 20000;
    Engine g = make_engine(11, 2);
    int hits = 0;
    for (int r = 0; r < runs; ++r) {
        GTPattern pat = packed_pattern(3);
        continuous_time_advance(pat, 1.0, g);
        if (pat.level(1)[0] == 0) ++hits;
    }
    double rho = tasep_spacelike_kernel({1, 1.0, 0}, {1, 1.0, 0});
    CHECK(std::abs(rho - std::exp(-1.0)) < 1e-12);
    double p = static_cast<double>(hits) / runs;
    CHECK(std::abs(p - rho) < 3.0 * std::sqrt(rho * (1 - rho) / runs));
}

TEST_CASE("TASEP kernel: two levels at one time against the exact Charlier law") {
    double t = 1.5;
    auto law = charlier_level_law(2, t);
    double worst = 0.0;
    for (long a = -1; a <= 5; ++a)
        for (long b = -2; b <= 6; ++b) {
            // Level 1 given level 2 = (x0 < x1) is uniform on (x0, x1].
            double exact = 0.0;
            for (const auto& [x, pr] : law) {
                if (x[0] != b && x[1] != b) continue;
                if (x[0] < a && a <= x[1]) exact += pr / static_cast<double>(x[1] - x[0]);
            }
            TasepPoint p1{1, t, a}, p2{2, t, b};
            double d = det2(tasep_spacelike_kernel(p1, p1), tasep_spacelike_kernel(p1, p2),
                            tasep_spacelike_kernel(p2, p1), tasep_spacelike_kernel(p2, p2));
            worst = std::max(worst, std::abs(d - exact));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("TASEP kernel: one level at two times against the Poisson walk") {
    double t1 = 2.0, t2 = 1.0, worst = 0.0;
    for (long a = -1; a <= 5; ++a)
        for (long b = -1; b <= 5; ++b) {
            double exact = poisson_pmf(t2, b + 1) * (a >= b ? poisson_pmf(t1 - t2, a - b) : 0.0);
            TasepPoint p1{1, t1, a}, p2{1, t2, b};
            double d = det2(tasep_spacelike_kernel(p1, p1), tasep_spacelike_kernel(p1, p2),
                            tasep_spacelike_kernel(p2, p1), tasep_spacelike_kernel(p2, p2));
            worst = std::max(worst, std::abs(d - exact));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("TASEP kernel matrix: conjugation leaves gap probabilities unchanged") {
    std::vector<TasepPoint> pts;
    for (long x = -6; x <= -2; ++x) pts.push_back({4, 10.0, x});
    for (long x = -7; x <= -3; ++x) pts.push_back({6, 8.0, x});
    TasepContours c = auto_tasep_contours(pts);
    Eigen::MatrixXd plain = tasep_kernel_matrix(pts, c, 0.0);
    Eigen::MatrixXd conj = tasep_kernel_matrix(pts, c, tasep_reference_point(pts));
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(pts.size(), pts.size());
    double g0 = (id - plain).determinant(), g1 = (id - conj).determinant();
    CHECK(g0 > 0.0);
    CHECK(g0 < 1.0);
    CHECK(std::abs(g0 - g1) < 1e-10);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(plain(i, i) - conj(i, i)) < 1e-10);
}

TEST_CASE("diffusion kernel equals the extended GUE kernel on a 27-point grid") {
    std::vector<GuePoint> grid;
    for (int n : {1, 2, 4})
        for (double t : {0.5, 1.0, 2.0})
            for (double x : {-1.2, 0.3, 1.5}) grid.push_back({n, t, x});
    double worst = 0.0;
    for (const auto& a : grid)
        for (const auto& b : grid) worst = std::max(worst, std::abs(diffusion_kernel(a, b) - extended_gue_kernel(a, b)));
    CHECK(worst < 1e-8);
    for (const auto& a : grid) CHECK(diffusion_kernel(a, a) > 0.0);
}

TEST_CASE("extended GUE kernel at one time and level is the Hermite Dyson kernel") {
    double worst = 0.0;
    for (int n : {1, 3, 6})
        for (double x : {-2.0, -0.4, 0.9})
            for (double y : {-1.1, 0.0, 2.2}) {
                double dyson = 0.0;
                for (int k = 0; k < n; ++k) dyson += hermite_function(k, x) * hermite_function(k, y);
                // the kernels agree up to conjugation; compare the conjugation-invariant products
                double kxy = extended_gue_kernel({n, 1.0, x}, {n, 1.0, y});
                double kyx = extended_gue_kernel({n, 1.0, y}, {n, 1.0, x});
                worst = std::max(worst, std::abs(kxy * kyx - dyson * dyson));
                if (x == y) worst = std::max(worst, std::abs(kxy - dyson));
            }
    CHECK(worst < 1e-10);
    // time t is the time-1 ensemble dilated by √t
    for (double x : {-1.0, 0.5})
        CHECK(std::abs(extended_gue_kernel({3, 2.0, x}, {3, 2.0, x}) -
                       extended_gue_kernel({3, 1.0, x / std::sqrt(2.0)}, {3, 1.0, x / std::sqrt(2.0)}) / std::sqrt(2.0)) <
              1e-10);
}

TEST_CASE("GUE minor kernel: N=1 density, trace, evenness") {
    double worst = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.25)
        worst = std::max(worst, std::abs(gue_minor_kernel(x, 1, x, 1) - std::exp(-x * x) / std::sqrt(M_PI)));
    CHECK(worst < 1e-8);
    for (int n : {1, 2, 5}) {
        double edge = std::sqrt(2.0 * n) + 6.0;
        auto rule = gauss_legendre_panels(-edge, edge, 24, 20);
        double trace = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
            trace += rule.weights[i] * gue_minor_kernel(rule.nodes[i], n, rule.nodes[i], n);
        CHECK(std::abs(trace - n) < 1e-6);
        for (double x : {0.3, 1.1, 2.4})
            CHECK(std::abs(gue_minor_kernel(x, n, x, n) - gue_minor_kernel(-x, n, -x, n)) < 1e-12);
    }
}

TEST_CASE("extended GUE: two-time gap probabilities lie in [0,1]") {
    for (double x0 : {-1.0, 0.0, 0.8}) {
        std::vector<GuePoint> pts;
        auto rule = gauss_legendre(8, x0, x0 + 0.6);
        for (double t : {1.0, 1.5})
            for (double x : rule.nodes) pts.push_back({1, t, x});
        Eigen::MatrixXd m(pts.size(), pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j)
                m(i, j) = std::sqrt(rule.weights[i % 8] * rule.weights[j % 8]) * extended_gue_kernel(pts[i], pts[j]);
        double gap = (Eigen::MatrixXd::Identity(pts.size(), pts.size()) - m).determinant();
        CHECK(gap >= 0.0);
        CHECK(gap <= 1.0);
    }
}

TEST_CASE("GUE kernel matrix agrees with pointwise evaluation up to conjugation") {
    std::vector<GuePoint> pts{{3, 1.0, -2.0}, {3, 1.0, -1.4}, {4, 1.2, -2.3}};
    GueMatrixResult m = gue_kernel_matrix(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(m.value(i, i) - diffusion_kernel(pts[i], pts[i])) < 1e-9);
        for (std::size_t j = 0; j < i; ++j) {
            double a = m.value(i, j) * m.value(j, i);
            double b = diffusion_kernel(pts[i], pts[j]) * diffusion_kernel(pts[j], pts[i]);
            CHECK(std::abs(a - b) < 1e-9);
        }
    }
}

TEST_CASE("scaling constants transcribe their formulas") {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    for (int k = 0; k < 20; ++k) {
        double eta = U(g), tau = U(g), al = U(g), be = U(g);
        auto s = GueScaling::from(eta, tau, al, be);
        CHECK(s.z_c == doctest::Approx(std::sqrt(eta / (2 * tau))).epsilon(1e-15));
        CHECK(s.kappa == doctest::Approx(std::pow(2 * tau, 1.5) / std::sqrt(eta)).epsilon(1e-15));
        CHECK(s.S_h == doctest::Approx(2 * std::pow(eta, 2.0 / 3.0) * tau / (al * tau + be * eta)).epsilon(1e-15));
        CHECK(s.S_v == doctest::Approx(std::sqrt(tau / 2) / std::pow(eta, 1.0 / 6.0)).epsilon(1e-15));
        double a = U(g) / 3.1;
        auto t = TasepScaling::from_alpha(a);
        double r = std::sqrt(a);
        CHECK(t.S_v == doctest::Approx(std::pow(1 - r, 2.0 / 3.0) / std::pow(a, 1.0 / 6.0)).epsilon(1e-15));
        CHECK(t.S_h == doctest::Approx(std::pow(a, 2.0 / 3.0) * std::cbrt(1 - r)).epsilon(1e-15));
        CHECK(t.z_c == doctest::Approx(1 - r).epsilon(1e-15));
        CHECK(t.kappa == doctest::Approx(1 / (r * (1 - r))).epsilon(1e-15));
    }
    CHECK(std::isinf(GueScaling::from(1, 1, 0, 0).S_h));
    CHECK_THROWS_AS(TasepScaling::from_alpha(0.0), ArgumentError);
    CHECK_THROWS_AS(TasepScaling::from_alpha(1.0), ArgumentError);
}

TEST_CASE("TASEP edge: diagonal approaches the Airy kernel along the t ladder") {
    auto p = TasepScaling::from_alpha(0.25);
    double prev = 1e9;
    for (double t : {500.0, 2000.0, 8000.0}) {
        auto r = rescaled_edge_kernel_tasep(t, 0.0, 0.0, 0.0, 0.0, p);
        double err = std::abs(r.value - r.limit);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.02);
    auto r = rescaled_edge_kernel_tasep(8000.0, 0.0, 0.0, 0.0, 0.0, p);
    CHECK(std::abs(r.limit - airy_kernel(r.s1 / p.S_v, r.s1 / p.S_v) / p.S_v) < 1e-12);
}

TEST_CASE("GUE edge: sup over the 3x3 grid decreases along the L ladder") {
    auto p = GueScaling::from(1, 1, 1, 1);
    double prev = 1e9;
    for (double L : {200.0, 800.0, 3200.0}) {
        double sup = 0.0;
        for (double u1 : {-0.25, 0.0, 0.25})
            for (double s1 : {-1.0, 0.0, 1.0})
                for (double u2 : {-0.25, 0.0, 0.25})
                    for (double s2 : {-1.0, 0.0, 1.0}) {
                        auto r = rescaled_edge_kernel_gue(L, u1, s1, u2, s2, p);
                        sup = std::max(sup, std::abs(r.value - r.limit));
                    }
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev < 0.03);
}

TEST_CASE("GUE edge with alpha = beta = 0 matches the rescaled minor kernel") {
    auto p = GueScaling::from(1, 1, 0, 0);
    double L = 400.0;
    for (double s1 : {-1.0, 0.5})
        for (double s2 : {-0.5, 1.0}) {
            auto r = rescaled_edge_kernel_gue(L, 0.0, s1, 0.0, s2, p);
            auto r21 = rescaled_edge_kernel_gue(L, 0.0, s2, 0.0, s1, p);
            int n = static_cast<int>(L);
            double sq = std::sqrt(L), l13 = std::cbrt(L);
            double x1 = -std::sqrt(2.0 * n * L) - r.s1 * l13, x2 = -std::sqrt(2.0 * n * L) - r.s2 * l13;
            double k12 = gue_minor_kernel(x1 / sq, n, x2 / sq, n) / sq * l13;
            double k21 = gue_minor_kernel(x2 / sq, n, x1 / sq, n) / sq * l13;
            CHECK(std::abs(r.value * r21.value - k12 * k21) < 1e-8);
        }
}
