#include "gtdet/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "gtdet/errors.hpp"

namespace gtdet {

namespace {

QuadratureRule build_rule(std::size_t n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw ArgumentError("gauss_legendre: n must be positive");
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(build_rule(n));
    return *slot;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    const QuadratureRule& ref = gauss_legendre(n);
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * ref.nodes[i];
        r.weights[i] = half * ref.weights[i];
    }
    return r;
}

QuadratureRule gauss_legendre_panels(double a, double b, std::size_t panels, std::size_t per_panel) {
    if (panels == 0) throw ArgumentError("gauss_legendre_panels: need at least one panel");
    QuadratureRule r;
    r.nodes.reserve(panels * per_panel);
    r.weights.reserve(panels * per_panel);
    double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        QuadratureRule q = gauss_legendre(per_panel, a + h * p, a + h * (p + 1));
        r.nodes.insert(r.nodes.end(), q.nodes.begin(), q.nodes.end());
        r.weights.insert(r.weights.end(), q.weights.begin(), q.weights.end());
    }
    return r;
}

}  // namespace gtdet
