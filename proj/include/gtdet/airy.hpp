#pragma once

namespace gtdet {

inline constexpr double kAiryMaxAbsArg = 30.0;
inline constexpr double kAirySeriesSeam = 4.5;

// Ai(x) for |x| <= 30, absolute accuracy 1e-12. Maclaurin series inside the seam,
// contour quadrature of (1/2πi)∫ exp(z³/3 − xz) dz outside it.
double airy_ai(double x);

namespace detail {
// Exposed so the two regimes can be compared at the seam.
double airy_ai_series(double x);
double airy_ai_contour(double x);  // requires x != 0
}  // namespace detail

}  // namespace gtdet
