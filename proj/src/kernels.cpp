#include "gtdet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "gtdet/airy.hpp"
#include "gtdet/errors.hpp"
#include "gtdet/quadrature.hpp"

namespace gtdet {

using C = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

constexpr double kImagTolerance = 1e-8;
constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(double v) {
    std::size_t m = 1;
    while (static_cast<double>(m) < v) m <<= 1;
    return m;
}

MatrixXd real_part_checked(const MatrixXcd& m, const char* what) {
    double worst = m.imag().cwiseAbs().maxCoeff();
    if (worst > kImagTolerance)
        throw NumericError(std::string(what) + ": imaginary part " + std::to_string(worst) +
                           " exceeds 1e-8");
    return m.real();
}

std::vector<C> circle_nodes(const CircleContour& c) {
    std::vector<C> out(c.nodes);
    for (std::size_t j = 0; j < c.nodes; ++j) {
        double th = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(c.nodes);
        out[j] = c.center + c.radius * C(std::cos(th), std::sin(th));
    }
    return out;
}

// Physicists' Hermite polynomials H_0..H_m at u.
std::vector<double> hermite_values(int m, double u) {
    std::vector<double> h(static_cast<std::size_t>(std::max(m, 0)) + 1);
    h[0] = 1.0;
    if (m >= 1) h[1] = 2.0 * u;
    for (int j = 1; j < m; ++j) h[j + 1] = 2.0 * u * h[j] - 2.0 * j * h[j - 1];
    return h;
}

}  // namespace

bool kernel_indicator(int n1, double t1, int n2, double t2) {
    return n1 <= n2 && t1 >= t2 && !(n1 == n2 && t1 == t2);
}

// ======================================================================================
// Discrete TASEP kernel

void TasepContours::validate() const {
    if (!(w.radius > 0.0) || !(z.radius > 0.0) || w.nodes < 8 || z.nodes < 8)
        throw ArgumentError("TasepContours: radii must be positive and node counts >= 8");
    if (std::abs(w.center) >= w.radius)
        throw ArgumentError("TasepContours: the w-circle must enclose 0");
    if (std::abs(z.center - 1.0) >= z.radius)
        throw ArgumentError("TasepContours: the z-circle must enclose 1");
    if (std::abs(z.center) <= z.radius)
        throw ArgumentError("TasepContours: the z-circle must not enclose 0");
    if (std::abs(w.center - 1.0) <= w.radius)
        throw ArgumentError("TasepContours: the w-circle must not enclose 1");
    if (std::abs(w.center - z.center) <= w.radius + z.radius)
        throw ArgumentError("TasepContours: the w- and z-circles intersect or are nested");
}

double tasep_reference_point(const std::vector<TasepPoint>& pts) {
    if (pts.empty()) throw ArgumentError("tasep_reference_point: no points");
    double acc = 0.0;
    for (const auto& p : pts) acc += p.t > 0.0 ? 1.0 - std::sqrt(p.n / p.t) : 0.0;
    return std::clamp(acc / static_cast<double>(pts.size()), 0.45, 0.9);
}

TasepContours auto_tasep_contours(const std::vector<TasepPoint>& pts) {
    double zeta = tasep_reference_point(pts);
    double tbar = 0.0;
    for (const auto& p : pts) tbar += p.t;
    tbar /= static_cast<double>(pts.size());
    // Gap between the circles on the real axis: the saddle's natural scale t^{-1/3}.
    double gap = tbar > 0.0 ? std::clamp(0.5 * std::cbrt(1.0 / tbar), 0.02, 0.3) : 0.3;
    TasepContours c;
    c.w = {{0.0, 0.0}, zeta - gap / 2.0, 0};
    c.z = {{1.0, 0.0}, 1.0 - zeta - gap / 2.0, 0};
    std::size_t m = std::clamp<std::size_t>(next_pow2(40.0 * c.w.radius / gap), 256, 4096);
    c.w.nodes = m;
    c.z.nodes = m;
    c.validate();
    return c;
}

namespace {

// log of e^{tw}(1−w)^n w^{−(x+n)}; integer powers make the branch choice irrelevant.
C tasep_log(const TasepPoint& p, C w) {
    return p.t * w + static_cast<double>(p.n) * std::log(1.0 - w) -
           static_cast<double>(p.x + p.n) * std::log(w);
}

double tasep_log_ref(const TasepPoint& p, double zeta) {
    if (zeta == 0.0) return 0.0;
    return p.t * zeta + p.n * std::log(1.0 - zeta) - static_cast<double>(p.x + p.n) * std::log(zeta);
}

MatrixXcd tasep_matrix_complex(const std::vector<TasepPoint>& pts, const TasepContours& c,
                               double zeta) {
    c.validate();
    for (const auto& p : pts)
        if (p.n < 1 || p.t < 0.0) throw ArgumentError("tasep kernel: need n >= 1 and t >= 0");
    const std::size_t P = pts.size();
    const auto wn = circle_nodes(c.w);
    const auto zn = circle_nodes(c.z);
    const std::size_t Mw = wn.size(), Mz = zn.size();
    std::vector<double> ref(P);
    for (std::size_t i = 0; i < P; ++i) ref[i] = tasep_log_ref(pts[i], zeta);

    // (1/2πi)∮ f dw ≈ (1/M) Σ f(w_j)(w_j − center).
    MatrixXcd W(P, Mw), Z(P, Mz), Cm(Mw, Mz);
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < Mw; ++j)
            W(i, j) = std::exp(tasep_log(pts[i], wn[j]) - std::log(wn[j]) - ref[i]) *
                      (wn[j] - c.w.center) / static_cast<double>(Mw);
        for (std::size_t k = 0; k < Mz; ++k)
            Z(i, k) = std::exp(-tasep_log(pts[i], zn[k]) + ref[i]) * (zn[k] - c.z.center) /
                      static_cast<double>(Mz);
    }
    for (std::size_t j = 0; j < Mw; ++j)
        for (std::size_t k = 0; k < Mz; ++k) Cm(j, k) = 1.0 / (wn[j] - zn[k]);
    MatrixXcd K = W * Cm * Z.transpose();

    // Single integral on the w-circle: integrand e^{L_i(w) − L_j(w)}/w.
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            if (!kernel_indicator(pts[i].n, pts[i].t, pts[j].n, pts[j].t)) continue;
            C s = 0.0;
            for (std::size_t m = 0; m < Mw; ++m)
                s += std::exp(tasep_log(pts[i], wn[m]) - tasep_log(pts[j], wn[m]) - ref[i] + ref[j]) *
                     (wn[m] - c.w.center) / wn[m];
            K(i, j) -= s / static_cast<double>(Mw);
        }
    return K;
}

}  // namespace

MatrixXd tasep_kernel_matrix(const std::vector<TasepPoint>& pts, const TasepContours& c, double zeta) {
    if (zeta < 0.0 || zeta >= 1.0) throw ArgumentError("tasep_kernel_matrix: ζ must lie in [0, 1)");
    return real_part_checked(tasep_matrix_complex(pts, c, zeta), "tasep_spacelike_kernel");
}

double tasep_spacelike_kernel(const TasepPoint& a, const TasepPoint& b, const TasepContours& c) {
    return tasep_kernel_matrix({a, b}, c, 0.0)(0, 1);
}

KernelValue tasep_spacelike_kernel_checked(const TasepPoint& a, const TasepPoint& b,
                                           const TasepContours& c) {
    TasepContours fine = c;
    fine.w.nodes *= 2;
    fine.z.nodes *= 2;
    double v1 = tasep_spacelike_kernel(a, b, c);
    double v2 = tasep_spacelike_kernel(a, b, fine);
    return {v2, std::abs(v2 - v1)};
}

// ======================================================================================
// Diffusion / extended GUE kernel

void LineCircleContours::validate() const {
    if (!(delta > 0.0) || !(z_radius > 0.0) || !(z_radius < delta))
        throw ArgumentError("LineCircleContours: need 0 < circle radius < line offset");
    if (z_nodes < 8 || panels_per_unit < 1)
        throw ArgumentError("LineCircleContours: too few nodes");
}

namespace {

double gue_zeta(const std::vector<GuePoint>& pts) {
    double acc = 0.0;
    for (const auto& p : pts) {
        if (p.n < 1 || !(p.t > 0.0)) throw ArgumentError("gue kernel: need n >= 1 and t > 0");
        acc += std::sqrt(p.n / (2.0 * p.t));
    }
    return acc / static_cast<double>(pts.size());
}

C gue_log(const GuePoint& p, C w) {
    return p.t * w * w - 2.0 * p.x * w + static_cast<double>(p.n) * std::log(w);
}

double gue_log_ref(const GuePoint& p, double zeta) {
    if (zeta == 0.0) return 0.0;
    return p.t * zeta * zeta - 2.0 * p.x * zeta + p.n * std::log(zeta);
}

// Half-height Y of the line δ + iy beyond which Re(τw² − 2ξw + m log w) has dropped
// by `drop` below its maximum over y and keeps decreasing.
double line_height(double tau, double xi, double m, double delta, double drop) {
    auto re = [&](double y) {
        return tau * (delta * delta - y * y) - 2.0 * xi * delta + 0.5 * m * std::log(delta * delta + y * y);
    };
    double ystar = std::sqrt(std::max(0.0, m / (2.0 * tau) - delta * delta));
    double top = re(ystar);
    double Y = std::max(ystar, 1.0 / std::sqrt(tau));
    while (re(Y) > top - drop) Y *= 1.25;
    return Y;
}

// (1/2π)∫_{−Y}^{Y} g(δ + iy) dy with Gauss-Legendre panels.
C line_quadrature(const std::function<C(C)>& g, double delta, double Y, std::size_t panels_per_unit) {
    std::size_t panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * Y * panels_per_unit)));
    QuadratureRule q = gauss_legendre_panels(-Y, Y, panels, 20);
    C s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += q.weights[j] * g(C(delta, q.nodes[j]));
    return s / (2.0 * kPi);
}

// (1/2πi)∫_{δ+iℝ} e^{Δτ w² − 2Δξ w} w^{−k} dw · e^{shift}, Δτ >= 0.
C gue_single_integral(double dtau, double dxi, int k, double shift, double delta,
                      std::size_t panels_per_unit) {
    if (dtau == 0.0) {
        // Inverse Laplace transform of w^{−k}: s^{k−1}/(k−1)! at s = −2Δξ > 0.
        if (k < 1) throw InternalError("gue single integral: equal times need k >= 1");
        double s = -2.0 * dxi;
        if (k == 1 && s == 0.0) return 0.5 * std::exp(shift);  // midpoint of the jump
        if (s <= 0.0) return 0.0;
        return std::exp((k - 1) * std::log(s) - std::lgamma(static_cast<double>(k)) + shift);
    }
    double Y = line_height(dtau, dxi, -k, delta, 45.0);
    auto g = [&](C w) { return std::exp(dtau * w * w - 2.0 * dxi * w - static_cast<double>(k) * std::log(w) + shift); };
    return line_quadrature(g, delta, Y, panels_per_unit);
}

// Conjugated complex kernel matrix by double-contour quadrature.
MatrixXcd gue_matrix_complex(const std::vector<GuePoint>& pts, const LineCircleContours& c, double zeta) {
    c.validate();
    const std::size_t P = pts.size();
    std::vector<double> ref(P);
    double Y = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        ref[i] = gue_log_ref(pts[i], zeta);
        Y = std::max(Y, line_height(pts[i].t, pts[i].x, pts[i].n, c.delta, 45.0));
    }
    std::size_t panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * Y * c.panels_per_unit)));
    QuadratureRule q = gauss_legendre_panels(-Y, Y, panels, 20);
    const std::size_t Mw = q.size(), Mz = c.z_nodes;
    const auto zn = circle_nodes({{0.0, 0.0}, c.z_radius, Mz});

    MatrixXcd W(P, Mw), Z(P, Mz), Cm(Mw, Mz);
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < Mw; ++j) {
            C w(c.delta, q.nodes[j]);
            W(i, j) = std::exp(gue_log(pts[i], w) - ref[i]) * (q.weights[j] / (2.0 * kPi));
        }
        for (std::size_t k = 0; k < Mz; ++k)
            Z(i, k) = std::exp(-gue_log(pts[i], zn[k]) + ref[i]) * zn[k] / static_cast<double>(Mz);
    }
    for (std::size_t j = 0; j < Mw; ++j)
        for (std::size_t k = 0; k < Mz; ++k) Cm(j, k) = 1.0 / (C(c.delta, q.nodes[j]) - zn[k]);
    MatrixXcd K = 2.0 * (W * Cm * Z.transpose());

    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            if (!kernel_indicator(pts[i].n, pts[i].t, pts[j].n, pts[j].t)) continue;
            K(i, j) -= 2.0 * gue_single_integral(pts[i].t - pts[j].t, pts[i].x - pts[j].x,
                                                 pts[j].n - pts[i].n, ref[j] - ref[i], c.delta,
                                                 c.panels_per_unit);
        }
    return K;
}

LineCircleContours paper_contours(const std::vector<GuePoint>& pts) {
    // Line at δ, circle at δ/2, straddling the mean critical point ζ.
    double zeta = gue_zeta(pts);
    LineCircleContours c;
    c.delta = 4.0 * zeta / 3.0;
    c.z_radius = c.delta / 2.0;
    c.z_nodes = 128;
    c.panels_per_unit = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(2.0 * zeta)));
    return c;
}

}  // namespace

LineCircleContours auto_line_circle_contours(const std::vector<GuePoint>& pts) {
    return paper_contours(pts);
}

double diffusion_kernel(const GuePoint& a, const GuePoint& b, const LineCircleContours& c) {
    // Evaluated conjugated at the mean critical point (keeps e^{±F} in range for large n), then undone.
    double zeta = gue_zeta({a, b});
    double k = real_part_checked(gue_matrix_complex({a, b}, c, zeta), "diffusion_kernel")(0, 1);
    return k * std::exp(gue_log_ref(a, zeta) - gue_log_ref(b, zeta));
}

namespace {

// Coefficient of z^k in e^{a z² + b z}, times e^{shift}.
double exp_quadratic_coefficient(double a, double b, int k, double shift) {
    if (k < 0) return 0.0;
    double s = 0.0;
    for (int l = 0; 2 * l <= k; ++l) {
        int r = k - 2 * l;
        double mag = shift - std::lgamma(l + 1.0) - std::lgamma(r + 1.0);
        double sign = 1.0;
        if (l > 0) {
            if (a == 0.0) continue;
            mag += l * std::log(std::abs(a));
            if (a < 0.0 && l % 2 == 1) sign = -sign;
        }
        if (r > 0) {
            if (b == 0.0) continue;
            mag += r * std::log(std::abs(b));
            if (b < 0.0 && r % 2 == 1) sign = -sign;
        }
        s += sign * std::exp(mag);
    }
    return s;
}

struct EdgeSetup {
    std::vector<GuePoint> q;  // points after the optional reflection
    bool reflect = false;
    LineCircleContours contours;
};

// Contours straddling the critical points of the (reflected) mean point. Outside the bulk the two
// real critical points w− < w+ separate and the circle/line sit on them.
EdgeSetup edge_setup(const std::vector<GuePoint>& pts, std::size_t refine) {
    double xbar = 0.0, nbar = 0.0, tbar = 0.0;
    for (const auto& p : pts) {
        xbar += p.x;
        nbar += p.n;
        tbar += p.t;
    }
    const double P = static_cast<double>(pts.size());
    xbar /= P;
    nbar /= P;
    tbar /= P;
    EdgeSetup e;
    e.reflect = xbar < 0.0;
    e.q = pts;
    if (e.reflect) {
        for (auto& p : e.q) p.x = -p.x;
        xbar = -xbar;
    }
    double zeta = gue_zeta(e.q);
    double gap = zeta * std::clamp(2.0 * std::cbrt(1.0 / nbar), 0.05, 0.66);
    double r = zeta - gap / 2.0, delta = zeta + gap / 2.0;
    double disc = xbar * xbar - 2.0 * nbar * tbar;
    if (disc > 0.0) {
        r = std::min(r, (xbar - std::sqrt(disc)) / (2.0 * tbar));
        delta = std::max(delta, (xbar + std::sqrt(disc)) / (2.0 * tbar));
    }
    e.contours.delta = delta;
    e.contours.z_radius = r;
    e.contours.z_nodes = std::clamp<std::size_t>(next_pow2(40.0 * zeta / gap), 128, 4096) * refine;
    e.contours.panels_per_unit = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(4.0 / gap))) * refine;
    return e;
}

// Kernel at the original points from the reflected evaluation:
// K(ξ) = (−1)^{n₁−n₂}[K(−ξ) − 2c(1 − 1[≺])], c = [z^{n₂−n₁−1}] e^{Δτz² + 2Δξz}.
// With keep_sign = false the sign, a conjugation, is dropped.
MatrixXd edge_evaluate(const std::vector<GuePoint>& pts, const EdgeSetup& e, double zeta, bool keep_sign) {
    MatrixXd K = real_part_checked(gue_matrix_complex(e.q, e.contours, zeta), "gue_kernel_matrix");
    if (!e.reflect) return K;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (!kernel_indicator(pts[i].n, pts[i].t, pts[j].n, pts[j].t)) {
                double shift = gue_log_ref(e.q[j], zeta) - gue_log_ref(e.q[i], zeta);
                K(i, j) -= 2.0 * exp_quadratic_coefficient(pts[i].t - pts[j].t, 2.0 * (pts[i].x - pts[j].x),
                                                           pts[j].n - pts[i].n - 1, shift);
            }
            if (keep_sign && (pts[i].n - pts[j].n) % 2 != 0) K(i, j) = -K(i, j);
        }
    return K;
}

GueMatrixResult gue_matrix_edge(const std::vector<GuePoint>& pts, std::size_t refine, double zeta_ref) {
    EdgeSetup e = edge_setup(pts, refine);
    double zeta = zeta_ref > 0.0 ? zeta_ref : gue_zeta(e.q);
    return {edge_evaluate(pts, e, zeta, false), 0.0};
}

}  // namespace

namespace {

// Paper contours only serve the right half of the bulk.
bool needs_edge_route(const GuePoint& a, const GuePoint& b) {
    double x = 0.5 * (a.x + b.x), n = 0.5 * (a.n + b.n), t = 0.5 * (a.t + b.t);
    return x < 0.0 || x * x > 2.0 * n * t;
}

double diffusion_edge(const GuePoint& a, const GuePoint& b, std::size_t refine) {
    EdgeSetup e = edge_setup({a, b}, refine);
    double zeta = gue_zeta(e.q);
    double k = edge_evaluate({a, b}, e, zeta, true)(0, 1);
    return k * std::exp(gue_log_ref(e.q[0], zeta) - gue_log_ref(e.q[1], zeta));
}

}  // namespace

// For ξ < 0 the contour sums are dominated by the far side of both contours, and beyond the edge
// the prescribed contours miss the real critical points; either way the two sums cancel to below
// their own rounding. Those points go through the reflected edge route.
double diffusion_kernel(const GuePoint& a, const GuePoint& b) {
    if (needs_edge_route(a, b)) return diffusion_edge(a, b, 1);
    return diffusion_kernel(a, b, paper_contours({a, b}));
}

KernelValue diffusion_kernel_checked(const GuePoint& a, const GuePoint& b) {
    if (needs_edge_route(a, b)) {
        double v1 = diffusion_edge(a, b, 1), v2 = diffusion_edge(a, b, 2);
        return {v2, std::abs(v2 - v1)};
    }
    LineCircleContours c = paper_contours({a, b});
    double v1 = diffusion_kernel(a, b, c);
    c.z_nodes *= 2;
    c.panels_per_unit *= 2;
    double v2 = diffusion_kernel(a, b, c);
    return {v2, std::abs(v2 - v1)};
}

namespace {

// I(τ, ξ, m) = (1/2πi)∫_{δ+iℝ} e^{τw² − 2ξw} w^m dw.
double gaussian_moment(double tau, double xi, int m) {
    const double g0 = std::exp(-xi * xi / tau) / (2.0 * std::sqrt(kPi * tau));
    if (m >= 0) {
        // Entire integrand: move the line to iℝ, then (iy)^m = (−½∂_ξ)^m acting on the Gaussian.
        double u = xi / std::sqrt(tau);
        auto h = hermite_values(m, u);
        return std::pow(0.5 / std::sqrt(tau), m) * h[static_cast<std::size_t>(m)] * g0;
    }
    if (m == -1) return 0.5 * std::erfc(xi / std::sqrt(tau));
    int k = -m;
    double delta = (xi + std::sqrt(xi * xi + 2.0 * tau * k)) / (2.0 * tau);
    double Y = line_height(tau, xi, m, delta, 45.0);
    auto g = [&](C w) { return std::exp(tau * w * w - 2.0 * xi * w + static_cast<double>(m) * std::log(w)); };
    return line_quadrature(g, delta, Y, 4).real();
}

}  // namespace

double extended_gue_kernel(const GuePoint& a, const GuePoint& b) {
    if (a.n < 1 || b.n < 1 || !(a.t > 0.0) || !(b.t > 0.0))
        throw ArgumentError("extended_gue_kernel: need n >= 1 and t > 0");
    if (a.n > kResidueMaxLevel || b.n > kResidueMaxLevel)
        throw ArgumentError("extended_gue_kernel: levels above " + std::to_string(kResidueMaxLevel) +
                            " are outside the residue route's range");
    // Residue of e^{−τ₂z² + 2ξ₂z} z^{−n₂}/(w − z) at z = 0: Σ_k b_{n₂−1−k} w^{−k−1},
    // with b_j = τ₂^{j/2} H_j(ξ₂/√τ₂)/j!.
    const double u2 = b.x / std::sqrt(b.t);
    auto h = hermite_values(b.n - 1, u2);
    double dbl = 0.0;
    for (int k = 0; k < b.n; ++k) {
        int j = b.n - 1 - k;
        double bj = std::pow(b.t, 0.5 * j) * h[static_cast<std::size_t>(j)] / std::tgamma(j + 1.0);
        dbl += bj * gaussian_moment(a.t, a.x, a.n - k - 1);
    }
    double single = 0.0;
    if (kernel_indicator(a.n, a.t, b.n, b.t)) {
        double dtau = a.t - b.t, dxi = a.x - b.x;
        int k = b.n - a.n;
        if (dtau == 0.0) {
            double s = -2.0 * dxi;
            // k = 1 at s = 0 takes the midpoint ½ (the Δτ → 0 limit of ½erfc).
            if (k == 1 && s == 0.0) single = 0.5;
            else single = s > 0.0 ? std::pow(s, k - 1) / std::tgamma(static_cast<double>(k)) : 0.0;
        } else {
            single = gaussian_moment(dtau, dxi, -k);
        }
    }
    return 2.0 * dbl - 2.0 * single;
}

double gue_minor_kernel(double x1, int n1, double x2, int n2) {
    return diffusion_kernel(GuePoint{n1, 1.0, x1}, GuePoint{n2, 1.0, x2});
}

GueMatrixResult gue_kernel_matrix(const std::vector<GuePoint>& pts, double zeta) {
    if (pts.empty()) throw ArgumentError("gue_kernel_matrix: no points");
    if (zeta < 0.0) throw ArgumentError("gue_kernel_matrix: ζ must be >= 0");
    GueMatrixResult a = gue_matrix_edge(pts, 1, zeta);
    GueMatrixResult b = gue_matrix_edge(pts, 2, zeta);
    b.error_estimate = (b.value - a.value).cwiseAbs().maxCoeff();
    return b;
}

// ======================================================================================
// Airy kernels

namespace {

constexpr double kAiryTailArg = 18.0;  // Ai(18)² < 1e-43

// Adaptive Gauss-Legendre (10 vs 20 nodes) on [a, b].
double adaptive_gl(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    auto rule = [&](std::size_t n, double lo, double hi) {
        const QuadratureRule& r = gauss_legendre(n);
        double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += r.weights[j] * f(mid + half * r.nodes[j]);
        return s * half;
    };
    double coarse = rule(10, a, b), fine = rule(20, a, b);
    if (std::abs(fine - coarse) <= tol || depth >= 12) return fine;
    double m = 0.5 * (a + b);
    return adaptive_gl(f, a, m, tol / 2.0, depth + 1) + adaptive_gl(f, m, b, tol / 2.0, depth + 1);
}

double integrate_panels(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
    double h = (b - a) / panels, s = 0.0;
    for (int p = 0; p < panels; ++p) s += adaptive_gl(f, a + h * p, a + h * (p + 1), 1e-15, 0);
    return s;
}

// ∫_0^U e^{cλ} Ai(x+λ)Ai(y+λ) dλ with U putting both arguments past kAiryTailArg
// (clipped to the Airy range). For c < 2 the discarded tail is below 1e-19.
double airy_half_line(double x, double y, double c) {
    double U = std::max(0.0, kAiryTailArg - std::min(x, y));
    U = std::min(U, kAiryMaxAbsArg - std::max(x, y));
    auto f = [&](double l) { return std::exp(c * l) * airy_ai(x + l) * airy_ai(y + l); };
    return integrate_panels(f, 0.0, U);
}

double negative_branch_lower(double x, double y, double delta) {
    double lo = -36.0 / delta;  // e^{δλ} < 3e-16 below
    if (std::min(x, y) + lo < -kAiryMaxAbsArg)
        throw ArgumentError("extended_airy_kernel: negative branch leaves the Airy range");
    return lo;
}

}  // namespace

double airy_kernel(double x, double y) {
    if (x < -10.0 || y < -10.0) throw ArgumentError("airy_kernel: arguments must be >= -10");
    return airy_half_line(x, y, 0.0);
}

double airy_full_line_closed_form(double x, double y, double delta) {
    if (!(delta > 0.0)) throw ArgumentError("airy_full_line_closed_form: δ must be positive");
    return std::exp(delta * delta * delta / 12.0 - (x + y) * delta / 2.0 - (x - y) * (x - y) / (4.0 * delta)) /
           std::sqrt(4.0 * kPi * delta);
}

double extended_airy_kernel(double x, double t, double xp, double tp) {
    double d = tp - t;
    if (std::abs(d) > 10.0) throw ArgumentError("extended_airy_kernel: |t − t'| must be <= 10");
    if (d >= 0.0) return airy_half_line(x, xp, -d);
    double delta = -d;
    if (delta < 2.0) return airy_half_line(x, xp, delta) - airy_full_line_closed_form(x, xp, delta);
    double lo = negative_branch_lower(x, xp, delta);
    auto f = [&](double l) { return std::exp(delta * l) * airy_ai(x + l) * airy_ai(xp + l); };
    return -integrate_panels(f, lo, 0.0);
}

MatrixXd extended_airy_matrix(const std::vector<std::vector<double>>& xs, const std::vector<double>& ts) {
    if (xs.size() != ts.size() || xs.empty()) throw ArgumentError("extended_airy_matrix: block mismatch");
    const std::size_t B = xs.size();
    std::vector<std::size_t> off(B + 1, 0);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (std::size_t a = 0; a < B; ++a) {
        off[a + 1] = off[a] + xs[a].size();
        for (double v : xs[a]) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
    }
    double dmax = 0.0;
    for (std::size_t a = 0; a < B; ++a)
        for (std::size_t b = 0; b < B; ++b) dmax = std::max(dmax, std::abs(ts[a] - ts[b]));
    if (dmax > 10.0) throw ArgumentError("extended_airy_matrix: |t − t'| must be <= 10");

    // λ ≥ 0 grid, unit panels of 20 nodes.
    double U = std::min(std::max(0.0, kAiryTailArg - xmin), kAiryMaxAbsArg - xmax);
    QuadratureRule plus = gauss_legendre_panels(0.0, std::max(U, 1e-3), std::max(1, static_cast<int>(std::ceil(U))), 20);
    // λ ≤ 0 grid for pairs using the direct negative branch (δ >= 2).
    double dneg = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < B; ++a)
        for (std::size_t b = 0; b < B; ++b)
            if (ts[a] - ts[b] >= 2.0) dneg = std::min(dneg, ts[a] - ts[b]);
    QuadratureRule minus;
    if (std::isfinite(dneg)) {
        double lo = negative_branch_lower(xmin, xmin, dneg);
        minus = gauss_legendre_panels(lo, 0.0, static_cast<std::size_t>(std::ceil(-lo)), 20);
    }
    auto table = [&](const std::vector<double>& x, const QuadratureRule& r) {
        MatrixXd A(x.size(), r.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t k = 0; k < r.size(); ++k) A(i, k) = airy_ai(x[i] + r.nodes[k]);
        return A;
    };
    std::vector<MatrixXd> Ap(B), Am(B);
    for (std::size_t a = 0; a < B; ++a) {
        Ap[a] = table(xs[a], plus);
        if (minus.size()) Am[a] = table(xs[a], minus);
    }
    MatrixXd K(off[B], off[B]);
    for (std::size_t a = 0; a < B; ++a)
        for (std::size_t b = 0; b < B; ++b) {
            double d = ts[b] - ts[a];
            MatrixXd blk;
            if (d >= 0.0 || -d < 2.0) {
                Eigen::VectorXd wt(plus.size());
                for (std::size_t k = 0; k < plus.size(); ++k) wt[k] = plus.weights[k] * std::exp(-plus.nodes[k] * d);
                blk = Ap[a] * wt.asDiagonal() * Ap[b].transpose();
                if (d < 0.0)
                    for (std::size_t i = 0; i < xs[a].size(); ++i)
                        for (std::size_t j = 0; j < xs[b].size(); ++j)
                            blk(i, j) -= airy_full_line_closed_form(xs[a][i], xs[b][j], -d);
            } else {
                Eigen::VectorXd wt(minus.size());
                for (std::size_t k = 0; k < minus.size(); ++k) wt[k] = minus.weights[k] * std::exp(-minus.nodes[k] * d);
                blk = -(Am[a] * wt.asDiagonal() * Am[b].transpose());
            }
            K.block(off[a], off[b], xs[a].size(), xs[b].size()) = blk;
        }
    return K;
}

// ======================================================================================
// Edge scaling

TasepScaling TasepScaling::from_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("TasepScaling: α must lie in (0, 1)");
    TasepScaling s;
    s.alpha = alpha;
    double ra = std::sqrt(alpha);
    s.S_v = std::pow(1.0 - ra, 2.0 / 3.0) / std::pow(alpha, 1.0 / 6.0);
    s.S_h = std::pow(alpha, 2.0 / 3.0) * std::cbrt(1.0 - ra);
    s.z_c = 1.0 - ra;
    s.kappa = 1.0 / (ra * (1.0 - ra));
    return s;
}

GueScaling GueScaling::from(double eta, double tau, double alpha, double beta) {
    if (!(eta > 0.0) || !(tau > 0.0) || alpha < 0.0 || beta < 0.0)
        throw ArgumentError("GueScaling: need η, τ > 0 and α, β >= 0");
    GueScaling s;
    s.eta = eta;
    s.tau = tau;
    s.alpha = alpha;
    s.beta = beta;
    s.z_c = std::sqrt(eta / (2.0 * tau));
    s.kappa = std::pow(2.0 * tau, 1.5) / std::sqrt(eta);
    double den = alpha * tau + beta * eta;
    s.S_h = den > 0.0 ? 2.0 * std::pow(eta, 2.0 / 3.0) * tau / den : std::numeric_limits<double>::infinity();
    s.S_v = std::sqrt(tau / 2.0) / std::pow(eta, 1.0 / 6.0);
    return s;
}

namespace {

// exp(u s/(S_h S_v) − u³/(3 S_h³)): the factor produced by completing the cube in the
// steepest-descent limit; dividing it out leaves the extended Airy kernel itself.
double airy_gauge(double u, double s, double S_h, double S_v) {
    if (!std::isfinite(S_h)) return 0.0;
    return u * s / (S_h * S_v) - u * u * u / (3.0 * S_h * S_h * S_h);
}

}  // namespace

RescaledValue rescaled_edge_kernel_tasep(double t, double u1, double s1, double u2, double s2,
                                         const TasepScaling& p) {
    TasepScaling chk = TasepScaling::from_alpha(p.alpha);
    if (!(t > 0.0)) throw ArgumentError("rescaled_edge_kernel_tasep: t must be positive");
    const double t13 = std::cbrt(t), t23 = t13 * t13, ra = std::sqrt(p.alpha);
    auto lattice = [&](double u, double s, double& ue, double& se) {
        long long n = std::llround(p.alpha * t + 2.0 * u * t23);
        if (n < 1) throw ArgumentError("rescaled_edge_kernel_tasep: level n(u) < 1");
        ue = (static_cast<double>(n) - p.alpha * t) / (2.0 * t23);
        double xu = (1.0 - 2.0 * ra) * t - 2.0 * ue * t23 / ra + ue * ue * t13 / std::pow(p.alpha, 1.5);
        long long x = std::llround(xu - s * t13);
        se = (xu - static_cast<double>(x)) / t13;
        return TasepPoint{static_cast<int>(n), t, static_cast<std::int64_t>(x)};
    };
    RescaledValue r;
    std::vector<TasepPoint> pts{lattice(u1, s1, r.u1, r.s1), lattice(u2, s2, r.u2, r.s2)};
    TasepContours c = auto_tasep_contours(pts);
    double k1 = tasep_kernel_matrix(pts, c, chk.z_c)(0, 1);
    c.w.nodes *= 2;
    c.z.nodes *= 2;
    double k2 = tasep_kernel_matrix(pts, c, chk.z_c)(0, 1);
    double gauge = std::exp(airy_gauge(r.u1, r.s1, chk.S_h, chk.S_v) - airy_gauge(r.u2, r.s2, chk.S_h, chk.S_v));
    r.value = t13 * k2 * gauge;
    r.error_estimate = t13 * std::abs(k2 - k1) * gauge;
    r.limit = extended_airy_kernel(r.s1 / chk.S_v, -r.u1 / chk.S_h, r.s2 / chk.S_v, -r.u2 / chk.S_h) / chk.S_v;
    return r;
}

RescaledValue rescaled_edge_kernel_gue(double L, double u1, double s1, double u2, double s2,
                                       const GueScaling& p) {
    GueScaling chk = GueScaling::from(p.eta, p.tau, p.alpha, p.beta);
    if (!(L > 0.0)) throw ArgumentError("rescaled_edge_kernel_gue: L must be positive");
    const double L13 = std::cbrt(L), L23 = L13 * L13;
    auto point = [&](double u, double s, double& ue, double& se) {
        long long n = std::llround(p.eta * L - p.alpha * u * L23);
        if (n < 1) throw ArgumentError("rescaled_edge_kernel_gue: level n(u) < 1");
        ue = p.alpha > 0.0 ? (p.eta * L - static_cast<double>(n)) / (p.alpha * L23) : u;
        se = s;
        double t = p.tau * L + p.beta * ue * L23;
        if (!(t > 0.0)) throw ArgumentError("rescaled_edge_kernel_gue: time t(u) <= 0");
        return GuePoint{static_cast<int>(n), t, -std::sqrt(2.0 * static_cast<double>(n) * t) - s * L13};
    };
    RescaledValue r;
    std::vector<GuePoint> pts{point(u1, s1, r.u1, r.s1), point(u2, s2, r.u2, r.s2)};
    GueMatrixResult m = gue_kernel_matrix(pts, chk.z_c);
    // The w-part carries +Φ here (−Φ for TASEP), so the gauge enters with the opposite sign.
    double gauge = std::exp(airy_gauge(r.u2, r.s2, chk.S_h, chk.S_v) - airy_gauge(r.u1, r.s1, chk.S_h, chk.S_v));
    r.value = m.value(0, 1) * gauge * L13;
    r.error_estimate = m.error_estimate * gauge * L13;
    double h1 = std::isfinite(chk.S_h) ? r.u1 / chk.S_h : 0.0;
    double h2 = std::isfinite(chk.S_h) ? r.u2 / chk.S_h : 0.0;
    r.limit = extended_airy_kernel(r.s1 / chk.S_v, h1, r.s2 / chk.S_v, h2) / chk.S_v;
    return r;
}

}  // namespace gtdet
