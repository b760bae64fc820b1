#pragma once

#include "mspde/solver.hpp"

#include <vector>

namespace mspde {

/// Cumulative energy-identity defect of one solved path: R(t_K) is the
/// running sum of the ledger residuals; the report row keeps max_K |R|.
double energy_residual(const SolutionPath& p, const EllipticOperator& op,
                       const DiffusionCoefficient& diffusion, const WienerPath& w);

struct RefinementLevel {
    int level;
    double h;
    double value; // max residual or max increment, per study
};

struct EnergyResidualReport {
    std::vector<RefinementLevel> levels;
    double fitted_order = 0.0; // least squares on the last fit_window levels
    uint64_t path_seed = 0;
};

struct ContinuityReport {
    std::vector<RefinementLevel> levels; // value = M(h) = max_k |X_{k+1} - X_k|
    double fitted_order = 0.0;
    bool strictly_decreasing = false;
    uint64_t path_seed = 0;
};

struct FenchelAuditResult {
    double displaced_gap;         // gap at (resolvent(lambda, X), xi); <= 1e-8
    double regularization_defect; // gap at (X, xi) itself; O(lambda)
};

/// Max Fenchel gap over all (step, node) pairs, measured at the displaced
/// point where graph membership of xi is exact, plus the O(lambda) defect
/// at the un-displaced state.
FenchelAuditResult fenchel_audit(const SolutionPath& p, const MonotoneGraph& graph,
                                 double lambda);

/// Fit log2(value) against log2(h) by least squares over the final
/// `fit_window` levels (coarse levels are pre-asymptotic).
double fit_convergence_order(const std::vector<RefinementLevel>& levels, int fit_window = 4);

/// Solve the same Brownian trajectory at `levels` successive bridge
/// refinements and report the max energy-identity defect per level.
EnergyResidualReport energy_refinement_study(const GridFunction& x0,
                                             const WienerPath& coarse,
                                             const SolverConfig& cfg,
                                             const EllipticOperator& op,
                                             const MonotoneGraph& graph,
                                             const DiffusionCoefficient& diffusion,
                                             int levels);

/// Same refinement procedure, tracking the max step increment M(h).
ContinuityReport continuity_study(const GridFunction& x0, const WienerPath& coarse,
                                  const SolverConfig& cfg, const EllipticOperator& op,
                                  const MonotoneGraph& graph,
                                  const DiffusionCoefficient& diffusion, int levels);

/// Max step increment of one solved path.
double max_increment(const SolutionPath& p);

/// Discrete positivity audit: min over steps of <A_lambda X_k,
/// beta_lambda(X_k)> along the path (sub-Markov resolvent plus convexity
/// make this nonnegative up to rounding).
double positivity_min_pairing(const SolutionPath& p, const EllipticOperator& op,
                              const MonotoneGraph& graph, double lambda);

} // namespace mspde
