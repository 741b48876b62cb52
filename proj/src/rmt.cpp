#include "gtdet/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "gtdet/errors.hpp"
#include "gtdet/painleve.hpp"

namespace gtdet {

using C = std::complex<double>;

namespace {

// Hermitian Gaussian with diagonal variance vd and Re/Im off-diagonal variance vo each.
HermitianMatrix gaussian_hermitian(int N, double vd, double vo, Engine& g) {
    std::normal_distribution<double> nd(0.0, std::sqrt(vd)), no(0.0, std::sqrt(vo));
    HermitianMatrix h(N, N);
    for (int i = 0; i < N; ++i) {
        h(i, i) = nd(g);
        for (int j = i + 1; j < N; ++j) {
            double re = no(g), im = no(g);
            h(i, j) = C(re, im);
            h(j, i) = C(re, -im);
        }
    }
    return h;
}

void require_size(int N, const char* what) {
    if (N < 1) throw ArgumentError(std::string(what) + ": N must be >= 1");
}


Eigen::MatrixXd sample_correlation(const std::vector<std::vector<double>>& samples) {
    const std::size_t m = samples.size(), trials = samples[0].size();
    Eigen::MatrixXd corr(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    std::vector<double> mean(m, 0.0), sd(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        for (double v : samples[k]) mean[k] += v;
        mean[k] /= static_cast<double>(trials);
        for (double v : samples[k]) sd[k] += (v - mean[k]) * (v - mean[k]);
        sd[k] = std::sqrt(sd[k] / static_cast<double>(trials));
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double c = 0.0;
            for (std::size_t s = 0; s < trials; ++s) c += (samples[i][s] - mean[i]) * (samples[j][s] - mean[j]);
            corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                c / static_cast<double>(trials) / (sd[i] * sd[j]);
        }
    return corr;
}

}  // namespace

double gue_to_kernel_scale(int N, double t) {
    require_size(N, "gue_to_kernel_scale");
    if (!(t > 0.0)) throw ArgumentError("gue_to_kernel_scale: t must be > 0");
    return std::sqrt(t / (2.0 * N));
}

HermitianMatrix sample_gue(int N, Engine& g) {
    require_size(N, "sample_gue");
    return gaussian_hermitian(N, N, N / 2.0, g);
}

HermitianMatrix ou_step(const HermitianMatrix& h0, double t, int N, Engine& g) {
    require_size(N, "ou_step");
    if (h0.rows() != N || h0.cols() != N) throw ArgumentError("ou_step: H0 must be N x N");
    if (!(t >= 0.0)) throw ArgumentError("ou_step: t must be >= 0");
    if (t == 0.0) return h0;
    double q = std::exp(-t / (2.0 * N));
    return q * h0 + std::sqrt(1.0 - q * q) * sample_gue(N, g);
}

std::vector<HermitianMatrix> sample_matrix_bm(int N, const std::vector<double>& times, Engine& g) {
    require_size(N, "sample_matrix_bm");
    std::vector<HermitianMatrix> out;
    HermitianMatrix h = HermitianMatrix::Zero(N, N);
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev)) throw ArgumentError("sample_matrix_bm: times must be ascending and >= 0");
        double dt = t - prev;
        if (dt > 0.0) h += gaussian_hermitian(N, dt / 2.0, dt / 4.0, g);
        out.push_back(h);
        prev = t;
    }
    return out;
}

EigenSample eigenvalues(const HermitianMatrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw ArgumentError("eigenvalues: need a nonempty square matrix");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw ArgumentError("eigenvalues: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<HermitianMatrix> es(h);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalues: solver did not converge");
    const double norm = h.norm();
    const auto& v = es.eigenvectors();
    const auto& lam = es.eigenvalues();
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        double r = (h * v.col(k) - lam[k] * v.col(k)).norm();
        if (r > 1e-10 * std::max(norm, 1e-300)) throw NumericError("eigenvalues: backward error above 1e-10 ‖H‖");
    }
    EigenSample s;
    s.values.assign(lam.data(), lam.data() + lam.size());
    return s;
}

MinorPattern minor_eigenvalues(const HermitianMatrix& h) {
    MinorPattern p;
    for (Eigen::Index m = 1; m <= h.rows(); ++m) p.levels.push_back(eigenvalues(h.topLeftCorner(m, m)).values);
    return p;
}

double interlacing_violation(const MinorPattern& p) {
    double worst = 0.0;
    for (std::size_t m = 0; m + 1 < p.levels.size(); ++m) {
        const auto& lo = p.levels[m];
        const auto& up = p.levels[m + 1];
        for (std::size_t k = 0; k < lo.size(); ++k) {
            worst = std::max(worst, up[k] - lo[k]);
            worst = std::max(worst, lo[k] - up[k + 1]);
        }
    }
    return worst;
}

Eigen::MatrixXcd haar_unitary(int N, Engine& g) {
    require_size(N, "haar_unitary");
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXcd z(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) z(i, j) = C(nd(g), nd(g));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < N; ++k) {
        C d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return q;
}

double hciz_exact(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t N = a.size();
    if (N == 0 || b.size() != N) throw ArgumentError("hciz: a and b must have the same nonzero length");
    if (N > 4) throw ArgumentError("hciz: N must be <= 4");
    double da = 1.0, db = 1.0, fact = 1.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            da *= a[j] - a[i];
            db *= b[j] - b[i];
        }
    if (std::abs(da) < 1e-8 || std::abs(db) < 1e-8) throw ArgumentError("hciz: a or b (nearly) degenerate");
    for (std::size_t p = 1; p < N; ++p) fact *= std::tgamma(static_cast<double>(p) + 1.0);
    Eigen::MatrixXd e(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) e(i, j) = std::exp(a[i] * b[j]);
    return e.partialPivLu().determinant() * fact / (da * db);
}

HcizResult hciz_check(const std::vector<double>& a, const std::vector<double>& b, std::size_t samples, Engine& g) {
    HcizResult r;
    r.exact_value = hciz_exact(a, b);
    if (samples < 2) throw ArgumentError("hciz_check: need at least 2 samples");
    const int N = static_cast<int>(a.size());
    double mean = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        Eigen::MatrixXcd u = haar_unitary(N, g);
        // Tr(A U B U*) = Σ_ij a_i b_j |U_ij|²
        double tr = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) tr += a[i] * b[j] * std::norm(u(i, j));
        double v = std::exp(tr);
        double d = v - mean;
        mean += d / static_cast<double>(s + 1);
        m2 += d * (v - mean);
    }
    r.mc_estimate = mean;
    r.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    r.z_score = r.std_error > 0.0 ? (mean - r.exact_value) / r.std_error : 0.0;
    return r;
}

double sample_gue_lambda_max(int N, Engine& g) {
    require_size(N, "sample_gue_lambda_max");
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd d(N), e(std::max(N - 1, 0));
    for (int k = 0; k < N; ++k) d[k] = nd(g);
    for (int k = 0; k + 1 < N; ++k) {
        std::chi_squared_distribution<double> chi(2.0 * (N - 1 - k));
        e[k] = std::sqrt(chi(g) / 2.0);
    }
    if (N == 1) return std::sqrt(static_cast<double>(N)) * d[0];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("sample_gue_lambda_max: solver did not converge");
    const auto& lam = es.eigenvalues();
    double tr = d.sum(), fro = d.squaredNorm() + 2.0 * e.squaredNorm();
    if (std::abs(lam.sum() - tr) > 1e-10 * std::sqrt(fro) * N || std::abs(lam.squaredNorm() - fro) > 1e-10 * fro)
        throw NumericError("sample_gue_lambda_max: spectrum does not reproduce the matrix invariants");
    return std::sqrt(static_cast<double>(N)) * lam[N - 1];
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ArgumentError("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

double tw2_cdf_fast(double s) {
    constexpr double lo = -8.0, hi = 8.0, step = 0.01;
    static std::vector<double> table;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int i = 0; lo + i * step <= hi + 1e-12; ++i) table.push_back(tw2_cdf_painleve(lo + i * step));
    });
    if (s <= lo) return 0.0;
    if (s >= hi) return 1.0;
    // Cubic Lagrange on the four surrounding nodes.
    const int n = static_cast<int>(table.size());
    int i = std::clamp(static_cast<int>(std::floor((s - lo) / step)) - 1, 0, n - 4);
    double v = 0.0;
    for (int j = i; j < i + 4; ++j) {
        double l = 1.0;
        for (int k = i; k < i + 4; ++k)
            if (k != j) l *= (s - (lo + k * step)) / ((j - k) * step);
        v += l * table[static_cast<std::size_t>(j)];
    }
    return std::clamp(v, 0.0, 1.0);
}

EdgeMcResult edge_process_mc(int N, const std::vector<double>& times, Engine& g, std::size_t trials) {
    require_size(N, "edge_process_mc");
    if (N > 400) throw ArgumentError("edge_process_mc: N must be <= 400");
    if (trials < 2 || trials > 100000) throw ArgumentError("edge_process_mc: trials must lie in [2, 1e5]");
    if (times.empty()) throw ArgumentError("edge_process_mc: no times");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] >= times[k - 1])) throw ArgumentError("edge_process_mc: times must be ascending");

    EdgeMcResult r;
    r.N = N;
    r.times = times;
    r.samples.assign(times.size(), std::vector<double>(trials));
    const double center = 2.0 * N, scale = std::cbrt(static_cast<double>(N));
    const double tscale = 2.0 * std::pow(static_cast<double>(N), 2.0 / 3.0);
    for (std::size_t s = 0; s < trials; ++s) {
        if (times.size() == 1) {
            r.samples[0][s] = (sample_gue_lambda_max(N, g) - center) / scale;
            continue;
        }
        HermitianMatrix h = sample_gue(N, g);
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (k > 0) h = ou_step(h, (times[k] - times[k - 1]) * tscale, N, g);
            r.samples[k][s] = (eigenvalues(h).values.back() - center) / scale;
        }
    }
    for (const auto& col : r.samples) r.ks_to_f2.push_back(ks_distance(col, tw2_cdf_fast));
    r.correlation = sample_correlation(r.samples);
    return r;
}

EdgeMcResult edge_process_bm(const BmEdgeParams& p, const std::vector<double>& us, Engine& g, std::size_t trials) {
    if (!(p.L > 0.0 && p.eta > 0.0 && p.tau > 0.0 && p.alpha >= 0.0 && p.beta >= 0.0))
        throw ArgumentError("edge_process_bm: need L, η, τ > 0 and α, β >= 0");
    if (trials < 2 || trials > 100000) throw ArgumentError("edge_process_bm: trials must lie in [2, 1e5]");
    if (us.empty()) throw ArgumentError("edge_process_bm: no u values");
    const double l23 = std::pow(p.L, 2.0 / 3.0), l13 = std::cbrt(p.L);
    std::vector<int> levels;
    std::vector<double> times;
    for (std::size_t k = 0; k < us.size(); ++k) {
        if (k > 0 && !(us[k] >= us[k - 1])) throw ArgumentError("edge_process_bm: u must be ascending");
        double n = std::round(p.eta * p.L - p.alpha * us[k] * l23);
        double t = p.tau * p.L + p.beta * us[k] * l23;
        if (n < 1 || n > 400) throw ArgumentError("edge_process_bm: levels n(u) must lie in [1, 400]");
        if (!(t > 0.0)) throw ArgumentError("edge_process_bm: times t(u) must be > 0");
        levels.push_back(static_cast<int>(n));
        times.push_back(t);
    }
    const int N = *std::max_element(levels.begin(), levels.end());
    EdgeMcResult r;
    r.N = N;
    r.times = us;
    r.samples.assign(us.size(), std::vector<double>(trials));
    for (std::size_t s = 0; s < trials; ++s) {
        if (us.size() == 1) {
            // GUE symmetry: λ₁ⁿ(t) has the law of −√(t/2n) λ_max of sample_gue(n).
            const int n = levels[0];
            double lam = -std::sqrt(times[0] / (2.0 * n)) * sample_gue_lambda_max(n, g);
            r.samples[0][s] = (lam + std::sqrt(2.0 * n * times[0])) / -l13;
            continue;
        }
        std::vector<HermitianMatrix> path = sample_matrix_bm(N, times, g);
        for (std::size_t k = 0; k < us.size(); ++k) {
            const int n = levels[k];
            double lam = eigenvalues(path[k].topLeftCorner(n, n)).values.front();
            r.samples[k][s] = (lam + std::sqrt(2.0 * n * times[k])) / -l13;
        }
    }
    const double sv = std::sqrt(p.tau / 2.0) / std::pow(p.eta, 1.0 / 6.0);
    for (const auto& col : r.samples) r.ks_to_f2.push_back(ks_distance(col, [sv](double x) { return tw2_cdf_fast(x / sv); }));
    r.correlation = sample_correlation(r.samples);
    return r;
}

double empirical_joint_cdf(const EdgeMcResult& r, std::size_t i, std::size_t j, double a, double b) {
    if (i >= r.samples.size() || j >= r.samples.size()) throw ArgumentError("empirical_joint_cdf: bad time index");
    std::size_t hits = 0, n = r.samples[i].size();
    for (std::size_t s = 0; s < n; ++s) hits += (r.samples[i][s] <= a && r.samples[j][s] <= b);
    return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace gtdet
