#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gtdet/rng.hpp"

namespace gtdet {

// Hermitian by construction: only the upper triangle is drawn, the lower one is its conjugate.
using HermitianMatrix = Eigen::MatrixXcd;

// Conventions. Sampling uses density ∝ exp(−Tr H²/(2N)): H_ii ~ N(0, N), Re/Im H_ij ~ N(0, N/2).
// The kernels use ∝ exp(−Tr H²/t) (matrix Brownian motion at time t). The bridge is
//   H_sample = √(2N/t) · H_kernel,   so   ρ_sample(λ) = √(t/2N) ρ_kernel(λ √(t/2N)).
double gue_to_kernel_scale(int N, double t = 1.0);  // √(t/2N)

HermitianMatrix sample_gue(int N, Engine& g);

// Exact Ornstein–Uhlenbeck transition: q H₀ + √(1−q²) G, q = e^{−t/2N}, G ~ sample_gue(N).
HermitianMatrix ou_step(const HermitianMatrix& h0, double t, int N, Engine& g);

// Matrix Brownian motion from 0: H_ii = b_ii/√2, H_ij = (b_ij + i b̃_ij)/2, at ascending times >= 0.
std::vector<HermitianMatrix> sample_matrix_bm(int N, const std::vector<double>& times, Engine& g);

struct EigenSample {
    std::vector<double> values;  // ascending
    double time = 0.0;
    std::uint64_t seed = 0;
};

// Dense Hermitian eigensolver. NumericError on solver failure or when some pair has
// ‖Hv − λv‖ > 1e-10 ‖H‖ (‖·‖ the Frobenius norm).
EigenSample eigenvalues(const HermitianMatrix& h);

// levels[m−1] = ascending eigenvalues of the leading m×m block, m = 1..N.
struct MinorPattern {
    std::vector<std::vector<double>> levels;
};
MinorPattern minor_eigenvalues(const HermitianMatrix& h);

// Largest violation of λ_k^{m+1} <= λ_k^m <= λ_{k+1}^{m+1}; 0 when interlaced.
double interlacing_violation(const MinorPattern& p);

// Haar unitary from QR of a complex Ginibre matrix, R's diagonal phases moved into Q.
Eigen::MatrixXcd haar_unitary(int N, Engine& g);

struct HcizResult {
    double mc_estimate = 0.0;
    double std_error = 0.0;
    double exact_value = 0.0;
    double z_score = 0.0;
};

// det(e^{a_i b_j}) ∏_{p<N} p! / (Δ(a)Δ(b)). ArgumentError for N > 4 or |Δ| < 1e-8.
double hciz_exact(const std::vector<double>& a, const std::vector<double>& b);

// Monte-Carlo mean of exp(Tr(A U B U*)) over Haar U against hciz_exact.
HcizResult hciz_check(const std::vector<double>& a, const std::vector<double>& b, std::size_t samples, Engine& g);

// Largest eigenvalue of one GUE matrix (sampling convention) via the β = 2 tridiagonal model:
// √N · tridiag(diag N(0,1), off-diagonal χ_{2(N−k)}/√2). Same law as λ_max of sample_gue(N),
// O(N²) instead of O(N³). NumericError if Σλ or Σλ² drift from the matrix invariants by > 1e-10.
double sample_gue_lambda_max(int N, Engine& g);

struct EdgeMcResult {
    int N = 0;
    std::vector<double> times;                   // rescaled times t_k
    std::vector<std::vector<double>> samples;    // samples[k][trial] = (λ_max(2 t_k N^{2/3}) − 2N)/N^{1/3}
    std::vector<double> ks_to_f2;                // per time
    Eigen::MatrixXd correlation;                 // empirical correlation between times
};

// Stationary OU route: H(0) ~ GUE, then exact OU transitions over the gaps 2(t_k − t_{k−1})N^{2/3}.
// A single time uses the tridiagonal sampler. ArgumentError for N > 400, trials > 1e5, or
// non-ascending times.
EdgeMcResult edge_process_mc(int N, const std::vector<double>& times, Engine& g, std::size_t trials);

// Brownian route on the smallest eigenvalue of the minors: with n(u) = ηL − αuL^{2/3} and
// t(u) = τL + βuL^{2/3}, samples[k] = (λ₁^{n(u_k)}(t(u_k)) + √(2 n t)) / (−L^{1/3}), whose limit is
// S_v A₂(u/S_h), S_v = √(τ/2)/η^{1/6}. ks_to_f2 compares against F₂(·/S_v).
// Finite-L corrections are O(u L^{−1/3}). A single u uses the tridiagonal sampler.
// ArgumentError unless u ascending, t(u) ascending, 1 <= n(u) <= 400, trials in [2, 1e5].
struct BmEdgeParams {
    double L = 100.0;
    double eta = 1.0, tau = 1.0, alpha = 0.0, beta = 1.0;
};
EdgeMcResult edge_process_bm(const BmEdgeParams& p, const std::vector<double>& us, Engine& g, std::size_t trials);

// sup |F_emp − F| over the sample points.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// F₂ on [−8, 8] from a cached table of the Painlevé route (agrees with the Fredholm route to
// 1e-12), cubic interpolation; 0 below −8, 1 above 8.
double tw2_cdf_fast(double s);

// Fraction of trials with A(t_i) <= a and A(t_j) <= b.
double empirical_joint_cdf(const EdgeMcResult& r, std::size_t i, std::size_t j, double a, double b);

}  // namespace gtdet
