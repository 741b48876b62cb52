#include "gtdet/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtdet/errors.hpp"
#include "gtdet/kernels.hpp"
#include "gtdet/quadrature.hpp"

namespace gtdet {

using Eigen::MatrixXd;

double det_one_minus(const MatrixXd& a) {
    if (a.rows() != a.cols()) throw ArgumentError("det_one_minus: matrix must be square");
    if (a.rows() == 0) return 1.0;
    return (MatrixXd::Identity(a.rows(), a.cols()) - a).partialPivLu().determinant();
}

FredholmResult nystrom_doubling(const NystromAssembler& assemble, const NystromOptions& opt,
                                const std::string& truncation) {
    if (opt.nodes < 2 || opt.max_nodes < opt.nodes) throw ArgumentError("nystrom: bad node counts");
    std::size_t n = opt.nodes;
    MatrixXd m = assemble(n);
    double prev = det_one_minus(m);
    double prev_diff = std::numeric_limits<double>::infinity();
    while (2 * n <= opt.max_nodes) {
        n *= 2;
        MatrixXd m2 = assemble(n);
        double v = det_one_minus(m2);
        double diff = std::abs(v - prev);
        if (diff < opt.tolerance) return {v, diff, static_cast<std::size_t>(m2.rows()), truncation};
        if (!(diff < prev_diff)) {
            std::ostringstream os;
            os << "nystrom: doubling stalled at " << n << " nodes per block (|Δ| = " << diff << ")";
            throw NumericError(os.str());
        }
        prev = v;
        prev_diff = diff;
    }
    std::ostringstream os;
    os << "nystrom: no convergence to " << opt.tolerance << " within " << opt.max_nodes << " nodes per block";
    throw NumericError(os.str());
}

FredholmResult fredholm_nystrom(const std::function<double(double, double)>& kernel, double a, double b,
                                const NystromOptions& opt) {
    return fredholm_nystrom_blocks([&](std::size_t, double x, std::size_t, double y) { return kernel(x, y); },
                                   {{a, b}}, opt);
}

FredholmResult fredholm_nystrom_blocks(
    const std::function<double(std::size_t, double, std::size_t, double)>& kernel,
    const std::vector<std::pair<double, double>>& intervals, const NystromOptions& opt) {
    if (intervals.empty()) throw ArgumentError("fredholm_nystrom: no intervals");
    for (const auto& [a, b] : intervals)
        if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw ArgumentError("fredholm_nystrom: bad interval");
    auto assemble = [&](std::size_t n) {
        const std::size_t B = intervals.size();
        std::vector<QuadratureRule> rules;
        for (const auto& [a, b] : intervals) rules.push_back(gauss_legendre(n, a, b));
        MatrixXd m(B * n, B * n);
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t j = 0; j < B; ++j)
                    for (std::size_t q = 0; q < n; ++q)
                        m(i * n + p, j * n + q) = std::sqrt(rules[i].weights[p] * rules[j].weights[q]) *
                                                  kernel(i, rules[i].nodes[p], j, rules[j].nodes[q]);
        return m;
    };
    return nystrom_doubling(assemble, opt);
}

namespace {

// Airy-kernel blocks on (s_k, s_k + 14] through the shared-table matrix builder.
FredholmResult airy_blocks(const std::vector<double>& times, const std::vector<double>& s) {
    auto assemble = [&](std::size_t n) {
        std::vector<std::vector<double>> xs;
        std::vector<double> sw;
        for (double sk : s) {
            QuadratureRule r = gauss_legendre(n, sk, sk + kAiryTruncation);
            xs.push_back(r.nodes);
            for (double w : r.weights) sw.push_back(std::sqrt(w));
        }
        MatrixXd k = extended_airy_matrix(xs, times);
        Eigen::Map<Eigen::VectorXd> d(sw.data(), static_cast<Eigen::Index>(sw.size()));
        return MatrixXd(d.asDiagonal() * k * d.asDiagonal());
    };
    FredholmResult r = nystrom_doubling(assemble, {}, "(s, s + 14] per block; Airy tail < 1e-12");
    if (r.value < -r.error_estimate - 1e-12 || r.value > 1.0 + r.error_estimate + 1e-12)
        throw NumericError("airy Fredholm determinant outside [0, 1]");
    return r;
}

}  // namespace

FredholmResult tw2_cdf(double s) {
    if (!std::isfinite(s) || s < kTw2MinArg) throw ArgumentError("tw2_cdf: s must be >= −8");
    return airy_blocks({0.0}, {s});
}

FredholmResult airy2_joint_cdf(const std::vector<double>& times, const std::vector<double>& s) {
    if (times.empty() || times.size() != s.size()) throw ArgumentError("airy2_joint_cdf: need matching times and thresholds");
    if (times.size() > 4) throw ArgumentError("airy2_joint_cdf: at most 4 times");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || !std::isfinite(s[k])) throw ArgumentError("airy2_joint_cdf: non-finite input");
        if (s[k] < kTw2MinArg) throw ArgumentError("airy2_joint_cdf: thresholds must be >= −8");
        if (k > 0 && !(times[k] > times[k - 1])) throw ArgumentError("airy2_joint_cdf: times must increase strictly");
    }
    if (times.back() - times.front() > 10.0) throw ArgumentError("airy2_joint_cdf: time spread must be <= 10");
    return airy_blocks(times, s);
}

FredholmResult tasep_joint_cdf_discrete(const std::vector<SpaceTimePoint>& points,
                                        const std::vector<std::int64_t>& s, std::int64_t depth) {
    if (points.empty() || points.size() != s.size()) throw ArgumentError("tasep_joint_cdf: need matching points and thresholds");
    for (const auto& p : points)
        if (p.n < 1 || !(p.t >= 0.0) || !std::isfinite(p.t)) throw ArgumentError("tasep_joint_cdf: need n >= 1, t >= 0");
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
        if (!precedes(points[k], points[k + 1])) throw ArgumentError("tasep_joint_cdf: points are not space-like ordered");
    if (depth < 0) throw ArgumentError("tasep_joint_cdf: depth must be >= 0");

    std::vector<TasepPoint> window, below;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        std::int64_t M = depth > 0 ? depth : static_cast<std::int64_t>(std::ceil(6.0 * std::cbrt(p.t))) + 20;
        std::int64_t floor_site = -static_cast<std::int64_t>(p.n);  // x_1^n(t) >= −n always
        std::int64_t lo = std::max(s[k] - M, floor_site);
        for (std::int64_t x = lo; x < s[k]; ++x) window.push_back({p.n, p.t, x});
        for (std::int64_t x = std::max(lo - M, floor_site); x < lo; ++x) below.push_back({p.n, p.t, x});
    }
    if (window.empty()) return {1.0, 0.0, 0, "all thresholds at or below the leftmost reachable site"};

    TasepContours c = auto_tasep_contours(window);
    double zeta = tasep_reference_point(window);
    double v1 = det_one_minus(tasep_kernel_matrix(window, c, zeta));
    TasepContours c2 = c;
    c2.w.nodes *= 2;
    c2.z.nodes *= 2;
    double v2 = det_one_minus(tasep_kernel_matrix(window, c2, zeta));

    // One-point mass just below the window bounds the probability that the truncation matters.
    double tail = 0.0;
    if (!below.empty()) {
        TasepContours cb = auto_tasep_contours(below);
        MatrixXd kb = tasep_kernel_matrix(below, cb, tasep_reference_point(below));
        for (Eigen::Index i = 0; i < kb.rows(); ++i) tail += std::abs(kb(i, i));
    }
    FredholmResult r;
    r.value = v2;
    r.error_estimate = std::abs(v2 - v1) + tail;
    r.nodes_used = window.size();
    std::ostringstream os;
    os << "lattice window of " << window.size() << " sites; one-point mass below it " << tail;
    r.truncation = os.str();
    if (r.value < -r.error_estimate - 1e-10 || r.value > 1.0 + r.error_estimate + 1e-10)
        throw NumericError("tasep_joint_cdf: determinant outside [0, 1]");
    return r;
}

}  // namespace gtdet
