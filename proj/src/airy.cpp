#include "gtdet/airy.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "gtdet/errors.hpp"

namespace gtdet {

namespace detail {

double airy_ai_series(double x) {
    // Ai = c1 f − c2 g with f, g the two power-series solutions of y'' = x y.
    const double c1 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
    const double c2 = std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
    const double x3 = x * x * x;
    double tf = 1.0, tg = x, f = 1.0, g = x;
    for (int k = 0; k < 200; ++k) {
        tf *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        f += tf;
        g += tg;
        if (std::abs(tf) + std::abs(tg) < 1e-18 * (std::abs(f) + std::abs(g) + 1e-300)) break;
    }
    return c1 * f - c2 * g;
}

namespace {

// x > 0: the vertical line through the saddle √x gives
// Ai(x) = e^{−ζ}/π ∫_0^∞ e^{−√x t²} cos(t³/3) dt, ζ = 2x^{3/2}/3.
// The integrand is entire and Gaussian in the strip |Im t| < √x, so trapezoid converges geometrically.
double airy_positive(double x) {
    const double a = std::sqrt(x);
    const double zeta = 2.0 / 3.0 * x * a;
    const double h = 0.05;
    const double T = std::sqrt(50.0 / a);
    double sum = 0.5;
    for (double t = h; t <= T; t += h) sum += std::exp(-a * t * t) * std::cos(t * t * t / 3.0);
    return std::exp(-zeta) / std::numbers::pi * h * sum;
}

// x = −y < 0: exact steepest-descent path through the upper saddle i√y,
//   z(s) = (s−1)·√(y(s+2)/(3s)) + i√y·s,   s ∈ (0, ∞),
// running from ∞e^{iπ} to ∞e^{iπ/3}. The lower half is its mirror image, so
// Ai(−y) = Im(∫ e^{z³/3 + yz} dz)/π. Parametrized by s = e^τ and summed by trapezoid.
double airy_negative(double y) {
    using C = std::complex<double>;
    const double ry = std::sqrt(y);
    const double c = std::sqrt(y / 3.0);
    auto integrand = [&](double tau) -> C {
        double s = std::exp(tau);
        double r = std::sqrt(1.0 + 2.0 / s);
        double u = (s - 1.0) * c * r;
        double du = c * r - (s - 1.0) * c / (s * s * r);
        C z(u, ry * s);
        C dz = C(du, ry) * s;
        C f = z * z * z / 3.0 + y * z;
        return std::exp(f) * dz;
    };
    // Saddle width in τ scales like y^{-3/4}.
    const double h = 0.04 * std::pow(y, -0.75);
    C sum = integrand(0.0);
    for (int dir : {-1, 1}) {
        for (int j = 1; j < 200000; ++j) {
            C v = integrand(dir * h * j);
            sum += v;
            if (std::abs(v) < 1e-20 && j > 10) break;
        }
    }
    return (h * sum).imag() / std::numbers::pi;
}

}  // namespace

double airy_ai_contour(double x) {
    if (x > 0) return airy_positive(x);
    if (x < 0) return airy_negative(-x);
    throw ArgumentError("airy_ai_contour: x = 0 sits on both saddles");
}

}  // namespace detail

double airy_ai(double x) {
    if (!(std::abs(x) <= kAiryMaxAbsArg))
        throw ArgumentError("airy_ai: |x| must be <= 30, got " + std::to_string(x));
    if (std::abs(x) <= kAirySeriesSeam) return detail::airy_ai_series(x);
    return detail::airy_ai_contour(x);
}

}  // namespace gtdet
