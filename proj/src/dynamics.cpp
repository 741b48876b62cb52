#include "gtdet/dynamics.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "gtdet/errors.hpp"

namespace gtdet {

namespace {

bool g_event_checks = false;

Rational vdm_rational(const WeylConfig& x) { return Rational(vandermonde_exact(x)); }

BigInt factorial(std::size_t n) {
    BigInt f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

double det_small(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

// All y with y_i - x_i in {0,1}, strictly increasing.
std::vector<WeylConfig> one_step_targets(const WeylConfig& x) {
    std::vector<WeylConfig> out;
    const std::size_t n = x.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        WeylConfig y(x);
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) ++y[i];
        if (is_weyl(y)) out.push_back(std::move(y));
    }
    return out;
}

}  // namespace

void set_event_checks(bool on) { g_event_checks = on; }

double poisson_pmf(double t, std::int64_t x) {
    if (!(t > 0.0)) throw ArgumentError("poisson_pmf: t must be positive");
    if (x < 0) return 0.0;
    const double xd = static_cast<double>(x);
    return std::exp(-t + xd * std::log(t) - std::lgamma(xd + 1.0));
}

std::int64_t poisson_truncation(double t, double eps) {
    if (!(t > 0.0)) throw ArgumentError("poisson_truncation: t must be positive");
    const double target = std::log(eps);
    std::int64_t K = static_cast<std::int64_t>(std::ceil(t)) + 1;
    while (-t + K * (1.0 + std::log(t) - std::log(static_cast<double>(K))) >= target) ++K;
    return K;
}

double karlin_mcgregor(const WeylConfig& x, const WeylConfig& y, double t) {
    if (x.size() != y.size()) throw ArgumentError("karlin_mcgregor: level mismatch");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = poisson_pmf(t, y[i] - x[j]);
    return det_small(m);
}

double charlier_transition(const WeylConfig& x, const WeylConfig& y, double t) {
    require_weyl(x, "charlier_transition(x)");
    require_weyl(y, "charlier_transition(y)");
    if (x.size() != y.size()) throw ArgumentError("charlier_transition: level mismatch");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = poisson_pmf(t, y[j] - x[i]);
    return vandermonde(y) / vandermonde(x) * det_small(m);
}

DiscreteStepParams::DiscreteStepParams(Rational p_) : p(std::move(p_)) {
    if (!(p > 0 && p < 1)) throw ArgumentError("DiscreteStepParams: p must lie in (0,1)");
}

Rational discrete_step_pmf(const DiscreteStepParams& params, std::int64_t x, std::int64_t y) {
    if (y == x + 1) return params.p;
    if (y == x) return 1 - params.p;
    return 0;
}

Rational discrete_charlier_transition(const DiscreteStepParams& params, const WeylConfig& x, const WeylConfig& y) {
    require_weyl(x, "discrete_charlier_transition(x)");
    require_weyl(y, "discrete_charlier_transition(y)");
    if (x.size() != y.size()) throw ArgumentError("discrete_charlier_transition: level mismatch");
    const std::size_t n = x.size();
    RationalMatrix m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = discrete_step_pmf(params, x[i], y[j]);
    Rational d = det_exact(std::move(m));
    if (d == 0) return 0;
    return vdm_rational(y) / vdm_rational(x) * d;
}

Rational markov_link(const WeylConfig& upper, const WeylConfig& lower) {
    if (lower.size() + 1 != upper.size()) throw ArgumentError("markov_link: levels must differ by one");
    require_weyl(upper, "markov_link(upper)");
    if (!is_weyl(lower) || !is_interlaced(lower, upper)) return 0;
    return Rational(factorial(lower.size()) * vandermonde_exact(lower)) / vdm_rational(upper);
}

GTPattern sample_uniform_given_top(const WeylConfig& top, Engine& rng) {
    require_weyl(top, "sample_uniform_given_top");
    GTPattern p;
    p.levels.resize(top.size());
    p.levels.back() = top;
    for (std::size_t n = top.size(); n >= 2; --n) {
        auto lowers = interlacing_lowers(p.levels[n - 1]);
        std::vector<double> w;
        w.reserve(lowers.size());
        for (const auto& l : lowers) w.push_back(vandermonde(l));
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        p.levels[n - 2] = lowers[lowers.size() == 1 ? 0 : pick(rng)];
    }
    return p;
}

void sequential_update_inplace(GTPattern& pat, double p, Engine& rng) {
    const std::size_t N = pat.levels.size();
    std::bernoulli_distribution coin(p);
    WeylConfig below_old;
    for (std::size_t L = 0; L < N; ++L) {
        WeylConfig& x = pat.levels[L];
        const WeylConfig old = x;
        for (std::size_t k = 0; k <= L; ++k) {
            // pushed by new x_{k-1}^{n-1}, blocked by new x_k^{n-1}
            const bool pushed = L > 0 && k > 0 && pat.levels[L - 1][k - 1] > old[k];
            const bool blocked = L > 0 && k < L && old[k] + 1 == pat.levels[L - 1][k];
            if (pushed)
                x[k] = old[k] + 1;
            else if (!blocked && coin(rng))
                x[k] = old[k] + 1;
        }
        if (L > 0 && !is_interlaced(pat.levels[L - 1], x))
            throw InternalError("sequential_update_step: interlacing violated");
    }
}

SimulationState sequential_update_step(const SimulationState& state, const DiscreteStepParams& params, Engine& rng) {
    if (!state.pattern.valid()) throw ArgumentError("sequential_update_step: invalid pattern");
    SimulationState next = state;
    sequential_update_inplace(next.pattern, params.p_double(), rng);
    next.time += 1.0;
    return next;
}

void continuous_time_advance(GTPattern& pat, double dt, Engine& rng) {
    if (dt < 0) throw ArgumentError("continuous_time_advance: negative duration");
    const std::size_t N = pat.levels.size();
    const std::size_t total = N * (N + 1) / 2;
    if (total == 0) return;
    std::exponential_distribution<double> clock(static_cast<double>(total));
    std::uniform_int_distribution<std::size_t> who(0, total - 1);
    double t = clock(rng);
    while (t <= dt) {
        std::size_t idx = who(rng);
        std::size_t L = 0;
        while (idx > L) {
            idx -= L + 1;
            ++L;
        }
        const std::size_t k = idx;
        auto& lev = pat.levels;
        const bool blocked = L > 0 && k < L && lev[L][k] + 1 == lev[L - 1][k];
        if (!blocked) {
            ++lev[L][k];
            std::size_t m = L, c = k;
            while (m + 1 < N && lev[m + 1][c + 1] < lev[m][c]) {
                ++lev[m + 1][c + 1];
                ++m;
                ++c;
            }
            if (g_event_checks && !pat.valid()) throw InternalError("continuous_time_advance: interlacing violated");
        }
        t += clock(rng);
    }
}

SimulationState continuous_time_simulate(int N, double T, Engine& rng, std::uint64_t seed) {
    if (T < 0) throw ArgumentError("continuous_time_simulate: T must be >= 0");
    SimulationState s{packed_pattern(N), 0.0, seed};
    continuous_time_advance(s.pattern, T, rng);
    s.time = T;
    return s;
}

std::vector<std::int64_t> project_tasep(const GTPattern& pat) {
    std::vector<std::int64_t> out;
    out.reserve(pat.levels.size());
    for (const auto& l : pat.levels) out.push_back(l.front());
    return out;
}

std::vector<std::int64_t> project_pushasep(const GTPattern& pat) {
    std::vector<std::int64_t> out;
    out.reserve(pat.levels.size());
    for (const auto& l : pat.levels) out.push_back(l.back());
    return out;
}

std::vector<std::int64_t> direct_tasep_simulate(int N, double T, Engine& rng) {
    if (N < 1) throw ArgumentError("direct_tasep_simulate: N must be >= 1");
    if (T < 0) throw ArgumentError("direct_tasep_simulate: T must be >= 0");
    std::vector<std::int64_t> x(N);
    for (int k = 0; k < N; ++k) x[k] = -(k + 1);
    std::exponential_distribution<double> clock(static_cast<double>(N));
    std::uniform_int_distribution<int> who(0, N - 1);
    for (double t = clock(rng); t <= T; t += clock(rng)) {
        const int k = who(rng);
        if (k == 0 || x[k] + 1 < x[k - 1]) ++x[k];
    }
    return x;
}

std::vector<WeylConfig> weyl_window(int n, std::int64_t lo, std::int64_t hi) {
    std::vector<WeylConfig> out;
    WeylConfig x(n);
    std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t from) {
        if (i == n) {
            out.push_back(x);
            return;
        }
        for (std::int64_t v = from; v <= hi - (n - 1 - i); ++v) {
            x[i] = v;
            rec(i + 1, v + 1);
        }
    };
    rec(0, lo);
    return out;
}

Rational verify_intertwining(int n, const DiscreteStepParams& params, const std::vector<WeylConfig>& window) {
    if (n < 2) throw ArgumentError("verify_intertwining: n must be >= 2");
    Rational worst = 0;
    for (const auto& x : window) {
        if (static_cast<int>(x.size()) != n || !is_weyl(x)) throw ArgumentError("verify_intertwining: bad window entry");
        std::map<WeylConfig, Rational> lhs, rhs;
        for (const auto& y : one_step_targets(x)) {
            Rational pxy = discrete_charlier_transition(params, x, y);
            if (pxy == 0) continue;
            for (const auto& yl : interlacing_lowers(y)) lhs[yl] += pxy * markov_link(y, yl);
        }
        for (const auto& xl : interlacing_lowers(x)) {
            Rational lam = markov_link(x, xl);
            for (const auto& yl : one_step_targets(xl)) rhs[yl] += lam * discrete_charlier_transition(params, xl, yl);
        }
        for (const auto& [k, v] : lhs) {
            auto it = rhs.find(k);
            Rational d = abs(v - (it == rhs.end() ? Rational(0) : it->second));
            if (d > worst) worst = d;
        }
        for (const auto& [k, v] : rhs)
            if (!lhs.count(k) && abs(v) > worst) worst = abs(v);
    }
    return worst;
}

int interlacing_sign(std::size_t n) {
    if (n == 0) throw ArgumentError("interlacing_sign: n must be >= 1");
    WeylConfig upper(n), lower(n - 1);
    for (std::size_t i = 0; i < n; ++i) upper[i] = 2 * static_cast<std::int64_t>(i);
    for (std::size_t i = 0; i + 1 < n; ++i) lower[i] = 2 * static_cast<std::int64_t>(i) + 1;
    return interlacing_indicator_det(lower, upper);
}

ToeplitzReport verify_toeplitz_props(ToeplitzSymbol symbol, const WeylConfig& x, const Rational& p) {
    require_weyl(x, "verify_toeplitz_props");
    const std::size_t n = x.size();
    if (n == 0 || n > 5) throw ArgumentError("verify_toeplitz_props: 1 <= n <= 5");
    ToeplitzReport r;
    r.rhs = vdm_rational(x);
    const std::int64_t lo = x.front() - 1, hi = x.back() + 1;
    if (symbol == ToeplitzSymbol::Bernoulli) {
        if (!(p > 0 && p < 1)) throw ArgumentError("verify_toeplitz_props: p must lie in (0,1)");
        auto f = [&](std::int64_t m) -> Rational { return m == -1 ? p : (m == 0 ? 1 - p : Rational(0)); };
        for (const auto& y : weyl_window(static_cast<int>(n), lo, hi)) {
            RationalMatrix m(n, std::vector<Rational>(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m[i][j] = f(x[i] - y[j]);
            r.lhs += vdm_rational(y) * det_exact(std::move(m));
        }
    } else {
        r.sign = interlacing_sign(n);
        const Rational fact(factorial(n - 1));
        auto ys = n == 1 ? std::vector<WeylConfig>{WeylConfig{}} : weyl_window(static_cast<int>(n - 1), lo, hi);
        for (const auto& y : ys) {
            RationalMatrix m(n, std::vector<Rational>(n));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j + 1 < n; ++j) m[i][j] = (x[i] - y[j] >= 0) ? 1 : 0;
                m[i][n - 1] = 1;
            }
            r.lhs += fact * vdm_rational(y) * det_exact(std::move(m));
        }
        r.lhs *= r.sign;
    }
    r.defect = abs(r.lhs - r.rhs);
    return r;
}

std::map<WeylConfig, double> charlier_level_law(int n, double t, double eps) {
    if (n < 1) throw ArgumentError("charlier_level_law: n must be >= 1");
    const std::int64_t K = poisson_truncation(t, eps) + n;
    std::map<WeylConfig, double> law;
    double z = 0.0;
    for (const auto& x : weyl_window(n, -n, K - n)) {
        double w = 1.0;
        for (auto xi : x) w *= poisson_pmf(t, xi + n);
        const double v = vandermonde(x);
        w *= v * v;
        law[x] = w;
        z += w;
    }
    for (auto& [k, v] : law) v /= z;
    return law;
}

}  // namespace gtdet
