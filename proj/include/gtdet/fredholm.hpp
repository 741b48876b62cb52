#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gtdet/patterns.hpp"

namespace gtdet {

struct FredholmResult {
    double value = 0.0;
    double error_estimate = 0.0;  // >= 0
    std::size_t nodes_used = 0;   // total quadrature nodes (or lattice sites) in the final matrix
    std::string truncation;
};

// det(I − A) by LU.
double det_one_minus(const Eigen::MatrixXd& a);

// Builds the weighted Nyström matrix W^{1/2} K W^{1/2} for the given node count per block.
using NystromAssembler = std::function<Eigen::MatrixXd(std::size_t nodes_per_block)>;

struct NystromOptions {
    std::size_t nodes = 64;         // per block, first attempt
    std::size_t max_nodes = 1024;   // per block
    double tolerance = 1e-10;       // accept once |det(n) − det(n/2)| falls below this
};

// Node doubling driver. NumericError when the doubling difference stops decreasing or the cap
// is reached before the tolerance.
FredholmResult nystrom_doubling(const NystromAssembler& assemble, const NystromOptions& opt = {},
                                const std::string& truncation = {});

// det(1 − K) on L²((a, b]) for a scalar kernel.
FredholmResult fredholm_nystrom(const std::function<double(double, double)>& kernel, double a, double b,
                                const NystromOptions& opt = {});

// Block version: kernel(i, x, j, y) on ⊕_i L²(intervals[i]).
FredholmResult fredholm_nystrom_blocks(
    const std::function<double(std::size_t, double, std::size_t, double)>& kernel,
    const std::vector<std::pair<double, double>>& intervals, const NystromOptions& opt = {});

// Length of the truncated interval above each threshold: Ai(x)² < 1e-24 beyond s + 14 for s >= −8.
inline constexpr double kAiryTruncation = 14.0;
inline constexpr double kTw2MinArg = -8.0;

// F₂(s) = det(1 − K_Airy) on (s, ∞), truncated to (s, s + 14]. ArgumentError for s < −8.
FredholmResult tw2_cdf(double s);

// P(A₂(t_k) <= s_k for all k) with the extended Airy kernel; 1 <= m <= 4, times strictly
// increasing, spread <= 10.
FredholmResult airy2_joint_cdf(const std::vector<double>& times, const std::vector<double>& s);

// P(x_1^{n_k}(t_k) >= s_k for all k) for TASEP from the step initial condition x_1^n(0) = −n.
// Points must form a chain (n₁,t₁) ≺ … ≺ (n_m,t_m). Lattice window per point:
// max(s − M, −n) <= x < s with M = ⌈6 t^{1/3}⌉ + 20 unless `depth` > 0; sites below −n are empty.
// The error estimate adds the contour node-doubling change and the one-point mass of the next
// M sites below the window (an upper bound on the probability a particle sits there).
FredholmResult tasep_joint_cdf_discrete(const std::vector<SpaceTimePoint>& points,
                                        const std::vector<std::int64_t>& s, std::int64_t depth = 0);

}  // namespace gtdet
