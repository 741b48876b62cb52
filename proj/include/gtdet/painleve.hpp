#pragma once

#include <cstddef>
#include <vector>

namespace gtdet {

// Hastings–McLeod solution of q″ = xq + 2q³ on a uniform mesh.
struct PainleveSolution {
    std::vector<double> x;
    std::vector<double> q;
    double h = 0.0;
    double newton_residual = 0.0;  // sup-norm of the Numerov equations at the last Newton step

    // q at an arbitrary point of [x.front(), x.back()] by local degree-5 interpolation.
    double at(double xv) const;
};

struct PainleveOptions {
    double a = -10.0;            // in [−10, −2]; F₂ is available for s >= a
    double b = 8.0;              // >= 8
    std::size_t per_unit = 400;  // mesh intervals per unit length
};

// Two-point BVP: q(b) = Ai(b), q(a) from the left asymptote
//   q(x) ≈ √(−x/2) (1 + 1/(8x³) − 73/(128x⁶)).
// Numerov discretization (fourth order), damped Newton with a tridiagonal solve.
// ArgumentError for a outside [−10, −2], b < 8, or a mesh that does not put a and b on nodes;
// NumericError if Newton does not bring the residual below 1e-10.
PainleveSolution painleve2_solve(const PainleveOptions& opt = {});

// exp(−∫_s^∞ (x − s) q(x)² dx): Simpson on the mesh over [s, b], and the tail beyond b with
// q = Ai (the cubic correction there is below 1e-20). Uses a cached default solution.
// The weight is (x − s), not (x − s)²: (log F₂)″ = −q² must hold, and the Fredholm route
// confirms it to 1e-6.
double tw2_cdf_painleve(double s);
double tw2_cdf_painleve(double s, const PainleveSolution& sol);

}  // namespace gtdet
