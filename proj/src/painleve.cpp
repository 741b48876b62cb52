#include "gtdet/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtdet/airy.hpp"
#include "gtdet/errors.hpp"
#include "gtdet/quadrature.hpp"

namespace gtdet {

namespace {

double left_asymptote(double x) {
    double x3 = x * x * x;
    return std::sqrt(-x / 2.0) * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3));
}

// Numerov residuals G_i, i = 1..N−1 (G_0 = G_N = 0 for the fixed ends).
std::vector<double> numerov_residual(const std::vector<double>& x, const std::vector<double>& q, double h) {
    const std::size_t N = q.size() - 1;
    std::vector<double> f(N + 1), g(N + 1, 0.0);
    for (std::size_t i = 0; i <= N; ++i) f[i] = x[i] * q[i] + 2.0 * q[i] * q[i] * q[i];
    const double c = h * h / 12.0;
    for (std::size_t i = 1; i < N; ++i) g[i] = q[i + 1] - 2.0 * q[i] + q[i - 1] - c * (f[i + 1] + 10.0 * f[i] + f[i - 1]);
    return g;
}

double sup(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

}  // namespace

double PainleveSolution::at(double xv) const {
    if (x.empty()) throw ArgumentError("PainleveSolution: empty");
    if (xv < x.front() - 1e-12 || xv > x.back() + 1e-12) throw ArgumentError("PainleveSolution: point outside the mesh");
    const long n = static_cast<long>(x.size());
    long i = static_cast<long>(std::floor((xv - x.front()) / h));
    long lo = std::clamp(i - 2, 0L, n - 6);
    double s = 0.0;
    for (long j = lo; j < lo + 6; ++j) {
        double l = 1.0;
        for (long k = lo; k < lo + 6; ++k)
            if (k != j) l *= (xv - x[k]) / (x[j] - x[k]);
        s += l * q[j];
    }
    return s;
}

PainleveSolution painleve2_solve(const PainleveOptions& opt) {
    if (!(opt.a >= -10.0 && opt.a <= -2.0)) throw ArgumentError("painleve2_solve: a must lie in [−10, −2]");
    if (!(opt.b >= 8.0)) throw ArgumentError("painleve2_solve: b must be >= 8");
    if (opt.per_unit < 20) throw ArgumentError("painleve2_solve: mesh too coarse");
    double span = (opt.b - opt.a) * static_cast<double>(opt.per_unit);
    if (std::abs(span - std::round(span)) > 1e-9) throw ArgumentError("painleve2_solve: a, b must sit on the mesh");
    const std::size_t N = static_cast<std::size_t>(std::llround(span));

    PainleveSolution sol;
    sol.h = 1.0 / static_cast<double>(opt.per_unit);
    const double h = sol.h;
    sol.x.resize(N + 1);
    sol.q.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        double xv = opt.a + h * static_cast<double>(i);
        sol.x[i] = xv;
        sol.q[i] = std::max(airy_ai(xv), xv < 0.0 ? std::sqrt(-xv / 2.0) : 0.0);
    }
    sol.q[0] = left_asymptote(opt.a);
    sol.q[N] = airy_ai(opt.b);

    const double c = h * h / 12.0;
    std::vector<double> g = numerov_residual(sol.x, sol.q, h);
    double r = sup(g);
    std::vector<double> lower(N + 1), diag(N + 1), upper(N + 1), rhs(N + 1), delta(N + 1);
    for (int it = 0; it < 60 && r >= 1e-13; ++it) {
        // Tridiagonal Jacobian on the interior unknowns 1..N−1.
        for (std::size_t i = 1; i < N; ++i) {
            auto fp = [&](std::size_t j) { return sol.x[j] + 6.0 * sol.q[j] * sol.q[j]; };
            diag[i] = -2.0 - 10.0 * c * fp(i);
            lower[i] = i > 1 ? 1.0 - c * fp(i - 1) : 0.0;
            upper[i] = i + 1 < N ? 1.0 - c * fp(i + 1) : 0.0;
            rhs[i] = -g[i];
        }
        // Thomas algorithm.
        for (std::size_t i = 2; i < N; ++i) {
            double m = lower[i] / diag[i - 1];
            diag[i] -= m * upper[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        delta[N - 1] = rhs[N - 1] / diag[N - 1];
        for (std::size_t i = N - 2; i >= 1; --i) delta[i] = (rhs[i] - upper[i] * delta[i + 1]) / diag[i];

        // Halve the step until the residual drops; stop when no step helps (rounding floor).
        bool improved = false;
        std::vector<double> trial = sol.q;
        for (double lambda = 1.0; lambda >= 1e-4 && !improved; lambda /= 2.0) {
            for (std::size_t i = 1; i < N; ++i) trial[i] = sol.q[i] + lambda * delta[i];
            std::vector<double> gt = numerov_residual(sol.x, trial, h);
            double rt = sup(gt);
            if (rt < r) {
                sol.q = trial;
                g = std::move(gt);
                r = rt;
                improved = true;
            }
        }
        if (!improved) break;
    }
    sol.newton_residual = r;
    if (!(r < 1e-10)) {
        std::ostringstream os;
        os << "painleve2_solve: Newton stopped at residual " << r;
        throw NumericError(os.str());
    }
    for (double v : sol.q)
        if (!(v > 0.0)) throw NumericError("painleve2_solve: solution left the positive branch");
    return sol;
}

double tw2_cdf_painleve(double s, const PainleveSolution& sol) {
    if (sol.x.empty()) throw ArgumentError("tw2_cdf_painleve: empty solution");
    const double a = sol.x.front(), b = sol.x.back();
    if (s < a || s > b) throw ArgumentError("tw2_cdf_painleve: s outside the solution domain");
    auto f = [&](double x, double qv) { return (x - s) * qv * qv; };

    // Partial cell [s, x_k], then Simpson over [x_k, x_m] with an even number of cells, and one
    // leftover cell by Gauss-Legendre on the interpolant.
    std::size_t k = static_cast<std::size_t>(std::ceil((s - a) / sol.h - 1e-9));
    k = std::min(k, sol.x.size() - 1);
    double integral = 0.0;
    if (sol.x[k] > s) {
        QuadratureRule r = gauss_legendre(8, s, sol.x[k]);
        for (std::size_t j = 0; j < r.size(); ++j) integral += r.weights[j] * f(r.nodes[j], sol.at(r.nodes[j]));
    }
    std::size_t last = sol.x.size() - 1;
    std::size_t cells = last - k;
    std::size_t even = cells - cells % 2;
    for (std::size_t i = k; i + 2 <= k + even; i += 2) {
        integral += sol.h / 3.0 *
                    (f(sol.x[i], sol.q[i]) + 4.0 * f(sol.x[i + 1], sol.q[i + 1]) + f(sol.x[i + 2], sol.q[i + 2]));
    }
    if (cells % 2) {
        QuadratureRule r = gauss_legendre(8, sol.x[last - 1], b);
        for (std::size_t j = 0; j < r.size(); ++j) integral += r.weights[j] * f(r.nodes[j], sol.at(r.nodes[j]));
    }
    // Tail beyond b with q = Ai; Ai(30)² < 1e-90 closes it.
    double tail_end = std::max(b + 1.0, kAiryMaxAbsArg);
    QuadratureRule t = gauss_legendre_panels(b, tail_end, static_cast<std::size_t>(std::ceil(tail_end - b)), 20);
    for (std::size_t j = 0; j < t.size(); ++j) integral += t.weights[j] * f(t.nodes[j], airy_ai(t.nodes[j]));
    return std::exp(-integral);
}

double tw2_cdf_painleve(double s) {
    static const PainleveSolution sol = painleve2_solve();
    return tw2_cdf_painleve(s, sol);
}

}  // namespace gtdet
