#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gtdet {

// One oracle comparison. pass requires measured <= threshold and, when time_limit > 0,
// seconds <= time_limit.
struct CheckResult {
    std::string id;
    std::string title;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;
    double time_limit = 0.0;
    std::string detail;
};

struct SuiteCheck {
    std::string id;
    bool exact = true;  // deterministic arithmetic or quadrature; false for Monte Carlo and the long ladders
    std::function<CheckResult()> run;
};

// Ordered registry; ids "c1".."c11" are the acceptance criteria.
const std::vector<SuiteCheck>& verification_checks();

// suite "exact": entries with exact = true; "all": every entry. ArgumentError otherwise.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const std::function<void(const CheckResult&)>& on_result = {});

// Acceptance criteria.
CheckResult check_pattern_counts();       // c1: count_patterns vs box enumeration, tops in [0,6]^N, N <= 4
CheckResult check_intertwining();         // c2: exact defect 0, n <= 4, p ∈ {1/3, 1/2}, windows >= 200
CheckResult check_dpp_oracles();          // c3: four kernel routes vs enumerated correlations, 1e-8
CheckResult check_tw2_two_routes();       // c4: Fredholm vs Painlevé, 17 points on [−5, 3], 1e-6
CheckResult check_gue_kernel_identity();  // c5: diffusion kernel vs extended GUE kernel, 27 points, 1e-8
CheckResult check_edge_ladders();         // c6: sup over the 3x3 (u,s) grid decreases along both ladders
CheckResult check_johansson();            // c7: discrete Fredholm at t = 1000 within 0.02 of F₂
CheckResult check_dynamics_vs_kernel();   // c8: one-point functions within 3σ per site; projection vs direct TASEP
CheckResult check_charlier_marginal();    // c9: level marginals within the 3σ TV bound
CheckResult check_rmt();                  // c10: the three random-matrix checks below
CheckResult check_airy2_limits();         // c11: gap 8 factorises, gap 1e-3 collapses, within 5e-3

// Random-matrix invariants (Monte Carlo, fixed seeds).
CheckResult check_minor_interlacing();    // N = 5, 10⁴ matrices, zero violations beyond 1e-9
CheckResult check_hciz();                 // |z| <= 3 at 10⁶ samples for N = 2, 3, 4
CheckResult check_edge_mc();              // KS to F₂ <= 0.05 at N = 200, 5000 trials

}  // namespace gtdet
