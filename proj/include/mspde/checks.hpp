#pragma once

#include "mspde/experiments.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mspde {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Work sizes for the property/acceptance checks. The defaults are the
/// full acceptance scale; selftest shrinks them to stay inside its time
/// budget.
struct CheckScale {
    int graph_triples = 10000;
    int operator_inputs = 1000;
    int positivity_inputs = 1000;
    int ito_seeds = 10;
    int ito_levels = 6;
    int ito_coarse_steps = 64; // h = 2^-6 down to 2^-11 over six levels
    int continuity_seeds = 10;
    int continuity_levels = 5;
    int continuity_coarse_steps = 32;
    int localization_seeds = 20;
    int localization_candidates = 200;
    int moment_samples = 200;
    int lipschitz_samples = 500;
    int regularity_samples = 12;
    double ergodic_t_long = 100.0;
    double ergodic_h = 0.005;
    uint64_t seed = 420730ULL;
    bool parallel = true;
    int threads = 0;

    static CheckScale selftest();
};

// One function per acceptance criterion, in spec order.
CheckResult check_graph_calculus(const CheckScale& s);   // 1
CheckResult check_operator_axioms(const CheckScale& s);  // 2
CheckResult check_positivity(const CheckScale& s);       // 3
CheckResult check_ito_energy(const CheckScale& s);       // 4
CheckResult check_continuity(const CheckScale& s);       // 5
CheckResult check_localization(const CheckScale& s);     // 6
CheckResult check_moments(const CheckScale& s);          // 7
CheckResult check_lipschitz(const CheckScale& s);        // 8
CheckResult check_regularity(const CheckScale& s);       // 9
CheckResult check_invariant_measure(const CheckScale& s);// 10

std::vector<CheckResult> run_all_checks(const CheckScale& s);

/// The graph catalog the property sweeps exercise.
std::vector<MonotoneGraph> standard_catalog();

} // namespace mspde
