#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gtdet {

// Kernel-side branch rule for the single-integral term: the first argument sits at a
// level no higher and a time no earlier than the second, and the pairs differ.
// This is the reverse of `precedes`; with the other orientation the line integrals diverge.
bool kernel_indicator(int n1, double t1, int n2, double t2);

struct KernelValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

// ---------------------------------------------------------------------------------------
// Discrete TASEP / interlacing-particle kernel along space-like paths.

struct TasepPoint {
    int n = 1;
    double t = 0.0;
    std::int64_t x = 0;
};

struct CircleContour {
    std::complex<double> center;
    double radius = 0.0;
    std::size_t nodes = 256;
};

// w-circle around 0, z-circle around 1. Must be disjoint and must not enclose each other's pole.
struct TasepContours {
    CircleContour w{{0.0, 0.0}, 0.4, 256};
    CircleContour z{{1.0, 0.0}, 0.3, 256};
    void validate() const;  // ArgumentError on intersecting or misplaced circles
};

// Contours through (or just beside) the double critical point of the given points,
// node count scaled with the sharpness of the saddle.
TasepContours auto_tasep_contours(const std::vector<TasepPoint>& pts);

// Critical point ζ = 1 − √(n/t) of the leftmost particle at level n, clamped into (0,1).
double tasep_reference_point(const std::vector<TasepPoint>& pts);

// Plain kernel value. NumericError if |Im| > 1e-8 before discarding.
double tasep_spacelike_kernel(const TasepPoint& a, const TasepPoint& b, const TasepContours& c = {});

// Value plus node-doubling error estimate.
KernelValue tasep_spacelike_kernel_checked(const TasepPoint& a, const TasepPoint& b,
                                           const TasepContours& c = {});

// Matrix K(p_i, p_j) conjugated by h(p) = e^{tζ}(1−ζ)^n ζ^{−(x+n)}:
//   out(i,j) = K(p_i,p_j) h(p_j)/h(p_i).
// ζ = 0 disables conjugation. Gap probabilities are unchanged by the conjugation.
Eigen::MatrixXd tasep_kernel_matrix(const std::vector<TasepPoint>& pts, const TasepContours& c,
                                    double zeta);

// ---------------------------------------------------------------------------------------
// Diffusion limit / extended GUE kernel. Points carry (level n, time τ, position ξ).

struct GuePoint {
    int n = 1;
    double t = 1.0;
    double x = 0.0;
};

// w on the line δ + iℝ (Gauss-Legendre panels on [−Y, Y]), z on the circle |z| = r < δ.
struct LineCircleContours {
    double delta = 1.0;
    double z_radius = 0.5;
    std::size_t z_nodes = 128;
    std::size_t panels_per_unit = 2;  // panels per unit of y, 20 nodes each
    void validate() const;
};

// δ and r = δ/2 around the mean edge critical point √(n/2t).
LineCircleContours auto_line_circle_contours(const std::vector<GuePoint>& pts);

// Double-contour quadrature of the two-term line + circle formula.
KernelValue diffusion_kernel_checked(const GuePoint& a, const GuePoint& b);
double diffusion_kernel(const GuePoint& a, const GuePoint& b);
double diffusion_kernel(const GuePoint& a, const GuePoint& b, const LineCircleContours& c);

// Same formula, evaluated by a second route: the z-integral as an exact residue at 0
// (Hermite coefficients), leaving one-dimensional w-integrals that are Gaussian moments,
// erfc, or a single line quadrature. Levels are limited to kResidueMaxLevel.
inline constexpr int kResidueMaxLevel = 40;
double extended_gue_kernel(const GuePoint& a, const GuePoint& b);

// GUE minors at matrix time 1 (density ∝ e^{−Tr H²}); branch indicator 1[n1 < n2].
double gue_minor_kernel(double x1, int n1, double x2, int n2);

// Conjugated matrix for a point set, with contours adapted to the edge. Points whose mean
// position is negative are evaluated through the reflection x → −x (conjugation by (−1)^n
// absorbed). out(i,j) = K(p_i,p_j) h(p_j)/h(p_i), h(p) = e^{tζ² − 2|x|ζ} ζ^n at the reference ζ
// (ζ = 0 picks the mean critical point √(n/2t) of the points).
struct GueMatrixResult {
    Eigen::MatrixXd value;
    double error_estimate = 0.0;
};
GueMatrixResult gue_kernel_matrix(const std::vector<GuePoint>& pts, double zeta = 0.0);

// ---------------------------------------------------------------------------------------
// Airy kernels.

// ∫_0^∞ Ai(x+μ)Ai(y+μ) dμ, adaptive Gauss-Legendre with certified tail bound; x, y >= −10.
double airy_kernel(double x, double y);

// t <= t': ∫_{ℝ+} e^{−λ(t'−t)} Ai(x+λ)Ai(x'+λ) dλ;  t > t': −∫_{ℝ−} (same) dλ.
double extended_airy_kernel(double x, double t, double xp, double tp);

// ∫_ℝ e^{δλ} Ai(x+λ)Ai(y+λ) dλ = (4πδ)^{−1/2} exp(δ³/12 − (x+y)δ/2 − (x−y)²/(4δ)), δ > 0.
double airy_full_line_closed_form(double x, double y, double delta);

// Block matrix of the extended Airy kernel on nodes xs[a] at times ts[a], evaluated with one
// shared λ-grid per block (one Airy table per block instead of one quadrature per entry).
Eigen::MatrixXd extended_airy_matrix(const std::vector<std::vector<double>>& xs,
                                     const std::vector<double>& ts);

// ---------------------------------------------------------------------------------------
// Edge scaling.

struct TasepScaling {
    double alpha = 0.25;
    double S_v = 0.0, S_h = 0.0, z_c = 0.0, kappa = 0.0;
    static TasepScaling from_alpha(double alpha);  // ArgumentError unless 0 < α < 1
};

// S_h = +∞ when α = β = 0 (no u-dependence left).
struct GueScaling {
    double eta = 1.0, tau = 1.0, alpha = 0.0, beta = 0.0;
    double S_v = 0.0, S_h = 0.0, z_c = 0.0, kappa = 0.0;
    static GueScaling from(double eta, double tau, double alpha, double beta);
};

// Rescaled value plus the effective (u, s) after lattice rounding; `limit` is
// S_v^{-1} K_2(s1/S_v, u1/S_h; s2/S_v, u2/S_h) at the effective arguments.
struct RescaledValue {
    double value = 0.0;
    double error_estimate = 0.0;
    double limit = 0.0;
    double u1 = 0.0, s1 = 0.0, u2 = 0.0, s2 = 0.0;
};

// t^{1/3} K(n(u1), t, x(u1) − s1 t^{1/3}; n(u2), t, x(u2) − s2 t^{1/3}) with n and x rounded to
// integers (n's remainder moves u, x's remainder moves s). Conjugation: the factor
// h(p) = e^{tz_c}(1−z_c)^n z_c^{−(x+n)} from the saddle, times exp(u s/(S_h S_v) − u³/(3S_h³)),
// which turns the steepest-descent limit into the extended Airy kernel literally.
RescaledValue rescaled_edge_kernel_tasep(double t, double u1, double s1, double u2, double s2,
                                         const TasepScaling& p);

// L^{1/3} K(n(u1), t(u1), x(u1, s1); …) with n(u) = ηL − αuL^{2/3} (rounded, remainder into u),
// t(u) = τL + βuL^{2/3}, x(u, ξ) = −√(2n t) − ξL^{1/3}. Conjugation at the exact saddle z_c; the
// gauge is exp(u s/(S_h S_v) − u³/(3S_h³)) with the roles of the two points swapped relative to
// TASEP, since here the w-integrand carries the cubic with the opposite sign.
RescaledValue rescaled_edge_kernel_gue(double L, double u1, double s1, double u2, double s2,
                                       const GueScaling& p);

}  // namespace gtdet
