#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gtdet {

using KernelMatrix = Eigen::MatrixXd;

// Square L over a finite ground set. If `in_Y` is non-empty the matrix defines the
// conditional ensemble on Y = {i : in_Y[i]}, with the complement as phantom rows.
struct LMatrix {
    Eigen::MatrixXd L;
    std::vector<char> in_Y;

    explicit LMatrix(Eigen::MatrixXd l, std::vector<char> y = {}, bool validate = true);

    bool conditional() const { return !in_Y.empty(); }
    std::vector<int> y_points() const;      // indices with in_Y set, ascending
    std::vector<int> phantom_points() const;
};

inline constexpr std::size_t kValidateMaxSize = 12;
inline constexpr std::size_t kBruteForceMaxPoints = 18;  // 2^18 configurations

// K = L (1 + L)^{-1}.
KernelMatrix lensemble_kernel(const LMatrix& l);

// K = 1_Y - (1_Y + L)^{-1} restricted to Y x Y; rows/cols follow y_points().
KernelMatrix conditional_kernel(const LMatrix& l);

// P(X) = det(L_X)/det(1+L), or det(L_{X ∪ Y^c})/det(1_Y + L) in the conditional case.
// X holds ground-set indices (conditional: indices into the full matrix, all in Y).
double lensemble_probability(const LMatrix& l, const std::vector<int>& X);

// det(K(x_i, x_j)); 0 for repeated points.
double correlation(const KernelMatrix& k, const std::vector<int>& points);

// det(1 - K) restricted to B.
double gap_probability(const KernelMatrix& k, const std::vector<int>& B);

// f(x) K(x,y) / f(y); f must be positive.
KernelMatrix conjugate_kernel(const KernelMatrix& k, const Eigen::VectorXd& f);

using ContinuousKernel = std::function<double(double, double)>;

// K'(x', y') = b K(a + b x', a + b y').
ContinuousKernel rescale_kernel(ContinuousKernel k, double a, double b);

// Kernel over a disjoint union of blocks; block s occupies rows offset[s] .. offset[s+1]-1.
struct ExtendedKernel {
    KernelMatrix K;
    std::vector<int> offset;
    double g_condition = 0.0;

    int index(int block, int local) const { return offset.at(block) + local; }
    int blocks() const { return static_cast<int>(offset.size()) - 1; }
    int block_size(int s) const { return offset[s + 1] - offset[s]; }
};

// det[Φ_i(x^{(1)}_j)] ∏ det[T_{k,k+1}(x^{(k)}_i, x^{(k+1)}_j)] det[Ψ_i(x^{(m)}_j)].
struct EynardMehtaSpec {
    Eigen::MatrixXd Phi;             // N x |X1|, Phi(i, x) = Φ_i(x)
    std::vector<Eigen::MatrixXd> T;  // T[k] : |X_{k+1}| x |X_{k+2}|
    Eigen::MatrixXd Psi;             // |Xm| x N, Psi(x, i) = Ψ_i(x)

    int N() const { return static_cast<int>(Psi.cols()); }
    int m() const { return static_cast<int>(T.size()) + 1; }
    std::vector<int> sizes() const;
};

// ∏_n det[φ_n(x^{n-1}_i, x^n_j)] det[Ψ_i(x^N_j)], x^{n-1}_n = virt.
struct MinorsSpec {
    std::vector<Eigen::RowVectorXd> phi_virt;  // phi_virt[n-1] = φ_n(virt, ·) on X_n
    std::vector<Eigen::MatrixXd> phi;          // phi[n-2] = φ_n(x, y), X_{n-1} x X_n
    Eigen::MatrixXd Psi;                       // |X_N| x N

    int N() const { return static_cast<int>(Psi.cols()); }
    std::vector<int> sizes() const;
};

// Level n observed at c(n)+1 times t_{c(n)}^n >= ... >= t_0^n; blocks are ordered
// (1,c(1)), ..., (1,0), (2,c(2)), ..., (N,0).
struct SpacelikeSpec {
    std::vector<int> c;                           // c[n-1] = c(n)
    std::vector<Eigen::RowVectorXd> phi_virt;     // φ_n(virt, ·) on X_n
    std::vector<Eigen::MatrixXd> phi;             // phi[n-2] = φ_n, X_{n-1} x X_n
    std::vector<std::vector<Eigen::MatrixXd>> T;  // T[n-1][a-1] = T_{t_a^n, t_{a-1}^n}, X_n x X_n
    Eigen::MatrixXd Psi;                          // |X_N| x N
    std::vector<std::vector<double>> times;       // optional: times[n-1][a] = t_a^n

    int N() const { return static_cast<int>(Psi.cols()); }
    int block(int n, int a) const;  // 1-based level, a in [0, c(n)]
    int level_of(int block) const;
    std::vector<int> sizes() const;
};

ExtendedKernel eynard_mehta_kernel(const EynardMehtaSpec& spec);
ExtendedKernel minors_kernel(const MinorsSpec& spec);

enum class SpacelikeForm { GInverse, Biorthogonal };

// Biorthogonal form needs G upper triangular (else NumericError).
ExtendedKernel spacelike_kernel_general(const SpacelikeSpec& spec, SpacelikeForm form = SpacelikeForm::GInverse);

// max |Φ_i^b * Ψ_j^b - δ_ij| over blocks b and i, j <= level(b).
double biorthogonality_residual(const SpacelikeSpec& spec);

// Block-form L with N phantom rows first, then the blocks in order.
LMatrix eynard_mehta_lmatrix(const EynardMehtaSpec& spec);
LMatrix minors_lmatrix(const MinorsSpec& spec);
LMatrix spacelike_lmatrix(const SpacelikeSpec& spec);

// Same measure expressed through the general form with c(n) = 0.
SpacelikeSpec as_spacelike(const MinorsSpec& spec);

std::string kernel_to_json(const KernelMatrix& k);

}  // namespace gtdet
