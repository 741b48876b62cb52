#include "gtdet/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "gtdet/errors.hpp"
#include "gtdet/linalg.hpp"

namespace gtdet {

namespace {

Eigen::MatrixXd principal(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(idx[i], idx[j]);
    return m;
}

std::vector<int> prefix_offsets(const std::vector<int>& sizes) {
    std::vector<int> off(sizes.size() + 1, 0);
    for (std::size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
    return off;
}

// Chain of blocks joined by transition matrices M[s] : block s -> block s+1.
// prod(s1, s2) = M[s1] ... M[s2-1], identity when s1 == s2.
struct Chain {
    std::vector<int> sizes;
    std::vector<Eigen::MatrixXd> M;

    Eigen::MatrixXd prod(int s1, int s2) const {
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(sizes[s1], sizes[s1]);
        for (int s = s1; s < s2; ++s) p = p * M[s];
        return p;
    }

    void check() const {
        for (std::size_t s = 0; s < M.size(); ++s)
            if (M[s].rows() != sizes[s] || M[s].cols() != sizes[s + 1])
                throw ArgumentError("block measure: transition " + std::to_string(s) + " has inconsistent dimensions");
    }
};

// K(s1,x1; s2,x2) = -prod(s1,s2)(x1,x2) 1[s1<s2] + (Psi^{s1} G^{-1} Phi^{s2})(x1,x2)
// where Phi^{s} rows vanish for sources not yet entered at block s.
ExtendedKernel assemble(const Chain& ch, const std::vector<Eigen::MatrixXd>& psi_at,
                        const std::vector<Eigen::MatrixXd>& phi_at, const Eigen::MatrixXd& ginv, double cond) {
    ExtendedKernel ek;
    ek.offset = prefix_offsets(ch.sizes);
    ek.g_condition = cond;
    const int S = static_cast<int>(ch.sizes.size());
    ek.K = Eigen::MatrixXd::Zero(ek.offset.back(), ek.offset.back());
    for (int s1 = 0; s1 < S; ++s1) {
        Eigen::MatrixXd left = psi_at[s1] * ginv;
        for (int s2 = 0; s2 < S; ++s2) {
            Eigen::MatrixXd blk = left * phi_at[s2];
            if (s1 < s2) blk -= ch.prod(s1, s2);
            ek.K.block(ek.offset[s1], ek.offset[s2], ch.sizes[s1], ch.sizes[s2]) = blk;
        }
    }
    return ek;
}

struct ChainSources {
    std::vector<int> entry;                  // entry block of source l
    std::vector<Eigen::RowVectorXd> vec;     // source row vector on its entry block
};

void chain_phi_psi(const Chain& ch, const ChainSources& src, const Eigen::MatrixXd& Psi,
                   std::vector<Eigen::MatrixXd>& psi_at, std::vector<Eigen::MatrixXd>& phi_at, Eigen::MatrixXd& G) {
    const int S = static_cast<int>(ch.sizes.size());
    const int N = static_cast<int>(Psi.cols());
    psi_at.assign(S, {});
    phi_at.assign(S, {});
    Eigen::MatrixXd acc = Psi;
    for (int s = S - 1; s >= 0; --s) {
        psi_at[s] = acc;
        if (s > 0) acc = ch.M[s - 1] * acc;
    }
    for (int s = 0; s < S; ++s) phi_at[s] = Eigen::MatrixXd::Zero(N, ch.sizes[s]);
    for (int l = 0; l < N; ++l) {
        Eigen::RowVectorXd v = src.vec[l];
        for (int s = src.entry[l]; s < S; ++s) {
            phi_at[s].row(l) = v;
            if (s + 1 < S) v = v * ch.M[s];
        }
    }
    G = phi_at[S - 1] * Psi;
}

LMatrix chain_lmatrix(const Chain& ch, const ChainSources& src, const Eigen::MatrixXd& Psi,
                      const Eigen::MatrixXd* phi_block) {
    const int N = static_cast<int>(Psi.cols());
    auto off = prefix_offsets(ch.sizes);
    const int total = N + off.back();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(total, total);
    if (phi_block) {
        L.block(0, N, N, ch.sizes[0]) = *phi_block;
    } else {
        for (int l = 0; l < N; ++l) L.block(l, N + off[src.entry[l]], 1, ch.sizes[src.entry[l]]) = src.vec[l];
    }
    for (std::size_t s = 0; s + 1 < ch.sizes.size(); ++s)
        L.block(N + off[s], N + off[s + 1], ch.sizes[s], ch.sizes[s + 1]) = -ch.M[s];
    const int last = static_cast<int>(ch.sizes.size()) - 1;
    L.block(N + off[last], 0, ch.sizes[last], N) = Psi;
    std::vector<char> inY(total, 1);
    std::fill(inY.begin(), inY.begin() + N, 0);
    return LMatrix(std::move(L), std::move(inY), false);
}

Chain spacelike_chain(const SpacelikeSpec& spec, ChainSources* src) {
    const int N = spec.N();
    if (static_cast<int>(spec.c.size()) != N || static_cast<int>(spec.phi_virt.size()) != N ||
        static_cast<int>(spec.phi.size()) != N - 1 || static_cast<int>(spec.T.size()) != N)
        throw ArgumentError("spacelike spec: per-level lists must have N entries (phi: N-1)");
    Chain ch;
    ch.sizes = spec.sizes();
    for (int n = 1; n <= N; ++n) {
        if (static_cast<int>(spec.T[n - 1].size()) != spec.c[n - 1])
            throw ArgumentError("spacelike spec: T[n] must hold c(n) matrices");
        for (int a = spec.c[n - 1]; a >= 1; --a) ch.M.push_back(spec.T[n - 1][a - 1]);
        if (n < N) ch.M.push_back(spec.phi[n - 1]);
    }
    ch.check();
    if (src) {
        src->entry.resize(N);
        src->vec.resize(N);
        for (int l = 1; l <= N; ++l) {
            src->entry[l - 1] = spec.block(l, spec.c[l - 1]);
            src->vec[l - 1] = spec.phi_virt[l - 1];
            if (src->vec[l - 1].size() != ch.sizes[src->entry[l - 1]])
                throw ArgumentError("spacelike spec: phi_virt size mismatch");
        }
    }
    if (spec.Psi.rows() != ch.sizes.back()) throw ArgumentError("spacelike spec: Psi rows must match |X_N|");
    if (!spec.times.empty()) {
        // t_0^N <= ... <= t_{c(N)}^N = t_0^{N-1} <= ... <= t_{c(1)}^1
        double prev = -INFINITY;
        for (int n = N; n >= 1; --n) {
            if (static_cast<int>(spec.times.at(n - 1).size()) != spec.c[n - 1] + 1)
                throw ArgumentError("spacelike spec: times[n] must hold c(n)+1 values");
            if (n < N && spec.times[n - 1][0] != spec.times[n][spec.c[n]])
                throw ArgumentError("spacelike spec: t_0^n must equal t_{c(n+1)}^{n+1}");
            for (double t : spec.times[n - 1]) {
                if (t < prev) throw ArgumentError("spacelike spec: observation points are not space-like ordered");
                prev = t;
            }
        }
    }
    return ch;
}

}  // namespace

LMatrix::LMatrix(Eigen::MatrixXd l, std::vector<char> y, bool validate) : L(std::move(l)), in_Y(std::move(y)) {
    if (L.rows() != L.cols()) throw ArgumentError("LMatrix: not square");
    if (!in_Y.empty() && static_cast<Eigen::Index>(in_Y.size()) != L.rows())
        throw ArgumentError("LMatrix: subset mask size mismatch");
    if (!L.allFinite()) throw ArgumentError("LMatrix: non-finite entry");
    if (!validate || static_cast<std::size_t>(L.rows()) > kValidateMaxSize) return;
    const auto ys = conditional() ? y_points() : [&] {
        std::vector<int> all(L.rows());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }();
    const auto ph = phantom_points();
    Eigen::MatrixXd one_y = L;
    for (int i : ys) one_y(i, i) += 1.0;
    const double z = det_lu(one_y);
    const double tol = 1e-10 * std::max(1.0, std::abs(z));
    for (std::uint32_t mask = 0; mask < (1u << ys.size()); ++mask) {
        std::vector<int> idx = ph;
        for (std::size_t b = 0; b < ys.size(); ++b)
            if (mask & (1u << b)) idx.push_back(ys[b]);
        const double d = det_lu(principal(L, idx));
        if (d * (z < 0 ? -1.0 : 1.0) < -tol)
            throw ArgumentError("LMatrix: principal minor has the wrong sign, not a probability measure");
    }
}

std::vector<int> LMatrix::y_points() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < in_Y.size(); ++i)
        if (in_Y[i]) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> LMatrix::phantom_points() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < in_Y.size(); ++i)
        if (!in_Y[i]) out.push_back(static_cast<int>(i));
    return out;
}

KernelMatrix lensemble_kernel(const LMatrix& l) {
    const auto n = l.L.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + l.L;
    auto inv = inverse_checked(a, "lensemble_kernel: 1 + L");
    return l.L * inv.inverse;
}

KernelMatrix conditional_kernel(const LMatrix& l) {
    if (!l.conditional()) throw ArgumentError("conditional_kernel: LMatrix has no designated subset");
    const auto n = l.L.rows();
    Eigen::MatrixXd one_y = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (l.in_Y[i]) one_y(i, i) = 1.0;
    auto inv = inverse_checked(one_y + l.L, "conditional_kernel: 1_Y + L");
    Eigen::MatrixXd full = one_y - inv.inverse;
    return principal(full, l.y_points());
}

double lensemble_probability(const LMatrix& l, const std::vector<int>& X) {
    const auto n = l.L.rows();
    Eigen::MatrixXd a = l.L;
    std::vector<int> idx = X;
    if (l.conditional()) {
        for (int x : X)
            if (!l.in_Y.at(x)) throw ArgumentError("lensemble_probability: point outside Y");
        for (Eigen::Index i = 0; i < n; ++i)
            if (l.in_Y[i]) a(i, i) += 1.0;
        auto ph = l.phantom_points();
        idx.insert(idx.end(), ph.begin(), ph.end());
    } else {
        a += Eigen::MatrixXd::Identity(n, n);
    }
    return det_lu(principal(l.L, idx)) / det_lu(a);
}

double correlation(const KernelMatrix& k, const std::vector<int>& points) {
    return det_lu(principal(k, points));
}

double gap_probability(const KernelMatrix& k, const std::vector<int>& B) {
    Eigen::MatrixXd m = -principal(k, B);
    m.diagonal().array() += 1.0;
    return det_lu(m);
}

KernelMatrix conjugate_kernel(const KernelMatrix& k, const Eigen::VectorXd& f) {
    if (f.size() != k.rows()) throw ArgumentError("conjugate_kernel: size mismatch");
    if ((f.array() <= 0.0).any()) throw ArgumentError("conjugate_kernel: f must be positive");
    return f.asDiagonal() * k * f.cwiseInverse().asDiagonal();
}

ContinuousKernel rescale_kernel(ContinuousKernel k, double a, double b) {
    if (b == 0.0) throw ArgumentError("rescale_kernel: b must be nonzero");
    return [k = std::move(k), a, b](double x, double y) { return b * k(a + b * x, a + b * y); };
}

std::vector<int> EynardMehtaSpec::sizes() const {
    std::vector<int> s{static_cast<int>(Phi.cols())};
    for (const auto& t : T) s.push_back(static_cast<int>(t.cols()));
    return s;
}

std::vector<int> MinorsSpec::sizes() const {
    std::vector<int> s;
    for (const auto& v : phi_virt) s.push_back(static_cast<int>(v.size()));
    return s;
}

int SpacelikeSpec::block(int n, int a) const {
    int b = 0;
    for (int k = 1; k < n; ++k) b += c.at(k - 1) + 1;
    return b + (c.at(n - 1) - a);
}

int SpacelikeSpec::level_of(int blk) const {
    for (int n = 1; n <= static_cast<int>(c.size()); ++n) {
        if (blk <= c[n - 1]) return n;
        blk -= c[n - 1] + 1;
    }
    throw ArgumentError("SpacelikeSpec::level_of: block out of range");
}

std::vector<int> SpacelikeSpec::sizes() const {
    std::vector<int> s;
    for (std::size_t n = 0; n < c.size(); ++n)
        for (int a = 0; a <= c[n]; ++a) s.push_back(static_cast<int>(phi_virt.at(n).size()));
    return s;
}

ExtendedKernel eynard_mehta_kernel(const EynardMehtaSpec& spec) {
    const int N = spec.N();
    if (spec.Phi.rows() != N) throw ArgumentError("eynard_mehta_kernel: Phi must have N rows");
    Chain ch{spec.sizes(), spec.T};
    ch.check();
    if (spec.Psi.rows() != ch.sizes.back()) throw ArgumentError("eynard_mehta_kernel: Psi rows must match |X_m|");
    const int m = spec.m();
    // Phi_l * T_{1,t2} and T_{t1,m} * Psi_k
    std::vector<Eigen::MatrixXd> psi_at(m), phi_at(m);
    for (int t = 0; t < m; ++t) {
        phi_at[t] = spec.Phi * ch.prod(0, t);
        psi_at[t] = ch.prod(t, m - 1) * spec.Psi;
    }
    Eigen::MatrixXd G = phi_at[m - 1] * spec.Psi;
    auto inv = inverse_checked(G, "eynard_mehta_kernel: G");
    return assemble(ch, psi_at, phi_at, inv.inverse, inv.condition);
}

ExtendedKernel minors_kernel(const MinorsSpec& spec) {
    const int N = spec.N();
    if (static_cast<int>(spec.phi_virt.size()) != N || static_cast<int>(spec.phi.size()) != N - 1)
        throw ArgumentError("minors_kernel: need N virtual rows and N-1 links");
    Chain ch{spec.sizes(), spec.phi};
    ch.check();
    if (spec.Psi.rows() != ch.sizes.back()) throw ArgumentError("minors_kernel: Psi rows must match |X_N|");
    // (φ_{n1,N} * Ψ_k)(x1) and (φ_l * φ_{l,n2})(virt, x2) for l <= n2
    std::vector<Eigen::MatrixXd> psi_at(N), phi_at(N);
    for (int n = 1; n <= N; ++n) {
        psi_at[n - 1] = ch.prod(n - 1, N - 1) * spec.Psi;
        phi_at[n - 1] = Eigen::MatrixXd::Zero(N, ch.sizes[n - 1]);
        for (int l = 1; l <= n; ++l) phi_at[n - 1].row(l - 1) = spec.phi_virt[l - 1] * ch.prod(l - 1, n - 1);
    }
    Eigen::MatrixXd G(N, N);
    for (int i = 1; i <= N; ++i) G.row(i - 1) = spec.phi_virt[i - 1] * ch.prod(i - 1, N - 1) * spec.Psi;
    auto inv = inverse_checked(G, "minors_kernel: G");
    return assemble(ch, psi_at, phi_at, inv.inverse, inv.condition);
}

ExtendedKernel spacelike_kernel_general(const SpacelikeSpec& spec, SpacelikeForm form) {
    ChainSources src;
    Chain ch = spacelike_chain(spec, &src);
    std::vector<Eigen::MatrixXd> psi_at, phi_at;
    Eigen::MatrixXd G;
    chain_phi_psi(ch, src, spec.Psi, psi_at, phi_at, G);
    auto inv = inverse_checked(G, "spacelike_kernel_general: G");
    if (form == SpacelikeForm::GInverse) return assemble(ch, psi_at, phi_at, inv.inverse, inv.condition);

    const int N = spec.N();
    const double scale = G.cwiseAbs().maxCoeff();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(G(i, j)) > 1e-12 * scale)
                throw NumericError("spacelike_kernel_general: G is not upper triangular, biorthogonal form unavailable");
    // Φ_k^{b}(x) = Σ_{l<=n} [G^{-1}]_{kl} (φ_l * φ^{(.,b)})(virt, x), k <= n; K = -φ + Σ_{k<=n2} Ψ_k Φ_k
    ExtendedKernel ek;
    ek.offset = prefix_offsets(ch.sizes);
    ek.g_condition = inv.condition;
    const int S = static_cast<int>(ch.sizes.size());
    ek.K = Eigen::MatrixXd::Zero(ek.offset.back(), ek.offset.back());
    std::vector<Eigen::MatrixXd> biorth(S);
    for (int s = 0; s < S; ++s) {
        const int n = spec.level_of(s);
        biorth[s] = inv.inverse.topLeftCorner(n, n) * phi_at[s].topRows(n);
    }
    for (int s1 = 0; s1 < S; ++s1)
        for (int s2 = 0; s2 < S; ++s2) {
            const int n2 = spec.level_of(s2);
            Eigen::MatrixXd blk = psi_at[s1].leftCols(n2) * biorth[s2];
            if (s1 < s2) blk -= ch.prod(s1, s2);
            ek.K.block(ek.offset[s1], ek.offset[s2], ch.sizes[s1], ch.sizes[s2]) = blk;
        }
    return ek;
}

double biorthogonality_residual(const SpacelikeSpec& spec) {
    ChainSources src;
    Chain ch = spacelike_chain(spec, &src);
    std::vector<Eigen::MatrixXd> psi_at, phi_at;
    Eigen::MatrixXd G;
    chain_phi_psi(ch, src, spec.Psi, psi_at, phi_at, G);
    auto inv = inverse_checked(G, "biorthogonality_residual: G");
    double worst = 0.0;
    for (int s = 0; s < static_cast<int>(ch.sizes.size()); ++s) {
        const int n = spec.level_of(s);
        Eigen::MatrixXd phi_hat = inv.inverse.topLeftCorner(n, n) * phi_at[s].topRows(n);
        Eigen::MatrixXd gram = phi_hat * psi_at[s].leftCols(n);
        worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    return worst;
}

LMatrix eynard_mehta_lmatrix(const EynardMehtaSpec& spec) {
    Chain ch{spec.sizes(), spec.T};
    ch.check();
    return chain_lmatrix(ch, {}, spec.Psi, &spec.Phi);
}

SpacelikeSpec as_spacelike(const MinorsSpec& spec) {
    SpacelikeSpec s;
    const int N = spec.N();
    s.c.assign(N, 0);
    s.phi_virt = spec.phi_virt;
    s.phi = spec.phi;
    s.T.assign(N, {});
    s.Psi = spec.Psi;
    return s;
}

LMatrix minors_lmatrix(const MinorsSpec& spec) { return spacelike_lmatrix(as_spacelike(spec)); }

LMatrix spacelike_lmatrix(const SpacelikeSpec& spec) {
    ChainSources src;
    Chain ch = spacelike_chain(spec, &src);
    return chain_lmatrix(ch, src, spec.Psi, nullptr);
}

std::string kernel_to_json(const KernelMatrix& k) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back(k(i, c));
        j.push_back(row);
    }
    return j.dump();
}

}  // namespace gtdet
