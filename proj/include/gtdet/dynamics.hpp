#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "gtdet/exact.hpp"
#include "gtdet/patterns.hpp"
#include "gtdet/rng.hpp"

namespace gtdet {

// ---- one-particle and Weyl-chamber transition kernels ----

// e^{-t} t^x / x! for x >= 0, else 0. Throws ArgumentError for t <= 0.
double poisson_pmf(double t, std::int64_t x);

// Smallest K >= t with e^{-t}(et/K)^K < eps; bounds the Poisson tail beyond K.
std::int64_t poisson_truncation(double t, double eps = 1e-14);

// det(p_t(y_i - x_j)): probability of reaching y without collision.
double karlin_mcgregor(const WeylConfig& x, const WeylConfig& y, double t);

// Delta(y)/Delta(x) * det(p_t(y_j - x_i)).
double charlier_transition(const WeylConfig& x, const WeylConfig& y, double t);

struct DiscreteStepParams {
    Rational p;
    explicit DiscreteStepParams(Rational p_);
    double p_double() const { return to_double(p); }
};

Rational discrete_step_pmf(const DiscreteStepParams& params, std::int64_t x, std::int64_t y);

// Delta(y)/Delta(x) * det(P(x_i, y_j)).
Rational discrete_charlier_transition(const DiscreteStepParams& params, const WeylConfig& x, const WeylConfig& y);

// (n-1)! Delta_{n-1}(lower) / Delta_n(upper) * 1[lower ≺ upper].
Rational markov_link(const WeylConfig& upper, const WeylConfig& lower);

// ---- samplers ----

GTPattern sample_uniform_given_top(const WeylConfig& top, Engine& rng);

struct SimulationState {
    GTPattern pattern;
    double time = 0.0;
    std::uint64_t rng_seed = 0;
};

// One discrete step, level 1 first. Throws InternalError if interlacing breaks.
SimulationState sequential_update_step(const SimulationState& state, const DiscreteStepParams& params, Engine& rng);
void sequential_update_inplace(GTPattern& pat, double p, Engine& rng);

// Rate-1 exponential clocks on every particle, blocking from below,
// pushes propagated upward in the same instant. Runs pattern forward by dt.
void continuous_time_advance(GTPattern& pat, double dt, Engine& rng);

// From packed_pattern(N) at time 0 up to time T.
SimulationState continuous_time_simulate(int N, double T, Engine& rng, std::uint64_t seed = 0);

// Events checked against interlacing after every jump when enabled.
void set_event_checks(bool on);

// (x_1^1, x_1^2, ..., x_1^N): TASEP under step initial condition.
std::vector<std::int64_t> project_tasep(const GTPattern& pat);
inline std::vector<std::int64_t> project_tasep(const SimulationState& s) { return project_tasep(s.pattern); }

// (x_1^1, x_2^2, ..., x_N^N): the right edge.
std::vector<std::int64_t> project_pushasep(const GTPattern& pat);

// N-particle TASEP from x_k(0) = -k; returns (x_1, ..., x_N) at time T.
std::vector<std::int64_t> direct_tasep_simulate(int N, double T, Engine& rng);

// ---- exact verifiers ----

// Every x in W_n with entries in [lo, hi], lexicographic.
std::vector<WeylConfig> weyl_window(int n, std::int64_t lo, std::int64_t hi);

// max over x^n in window, y^{n-1} of |(P_n Λ)(x, y) - (Λ P_{n-1})(x, y)|.
Rational verify_intertwining(int n, const DiscreteStepParams& params, const std::vector<WeylConfig>& window);

enum class ToeplitzSymbol {
    Bernoulli,  // F(z) = 1 - p + p/z
    Geometric,  // F(z) = (1 - z)^{-1}, with virtual column
};

struct ToeplitzReport {
    Rational lhs;
    Rational rhs;
    Rational defect;  // |lhs - rhs|
    int sign = 1;     // overall sign of the virtual-column determinant
};

ToeplitzReport verify_toeplitz_props(ToeplitzSymbol symbol, const WeylConfig& x,
                                     const Rational& p = Rational(1, 2));

// Constant sign of det(phi(x^{n-1}_i, x^n_j)) with virtual last row over interlaced pairs.
int interlacing_sign(std::size_t n);

// Law of level n at time t from the packed start, proportional to
// Delta_n(x)^2 prod omega_t(x_i + n), normalised over x_i + n <= K.
std::map<WeylConfig, double> charlier_level_law(int n, double t, double eps = 1e-14);

}  // namespace gtdet
