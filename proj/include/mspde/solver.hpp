#pragma once

#include "mspde/elliptic.hpp"
#include "mspde/mesh.hpp"
#include "mspde/monotone_graph.hpp"
#include "mspde/noise.hpp"

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mspde {

enum class TruncationMode { None, Fixed, Adaptive };

struct TruncationPolicy {
    TruncationMode mode = TruncationMode::None;
    double fixed_radius = 0.0;
    int start_level = 1;  // adaptive: initial ball radius n0
    int max_level = 1000; // adaptive: cap, exceeded -> TruncationCapReached
};

struct SolverConfig {
    double h_time = 1e-2;
    double yosida_lambda = 0.0; // 0 means "tie to h_time"
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    int max_step_halvings = 5;
    TruncationPolicy truncation{};

    double lambda() const { return yosida_lambda > 0.0 ? yosida_lambda : h_time; }
    void validate() const;
};

struct TauRecord {
    int level;      // truncation level n
    int step_index; // first step k with running sup |X_k| >= n
};

/// Discrete counterpart of the solution pair (X, xi): nodal states on the
/// closed time grid, drift selections per step, truncation-level history
/// and stopping-step records.
struct SolutionPath {
    Mesh mesh;
    double h_time = 0.0;
    double yosida_lambda = 0.0;
    SolverConfig config;
    std::vector<GridFunction> x;       // steps+1 entries
    std::vector<GridFunction> xi;      // steps entries, xi_k = beta_lambda(x_{k+1})
    std::vector<double> radius_used;   // per step, +inf when sigma inactive
    std::vector<int> substeps;         // per step, 0 = direct solve
    std::vector<TauRecord> tau_records;

    int steps() const { return static_cast<int>(xi.size()); }
    double time(int k) const { return k * h_time; }

    double sup_h_norm() const;
};

/// One semi-implicit step: solve
///   u + h A u + h beta_lambda(u) = x + B(t, sigma_R(x)) dw
/// by damped Newton on the tridiagonal-plus-diagonal system, returning
/// (x_plus, xi) with xi = beta_lambda(x_plus). R comes from the config's
/// fixed policy (adaptive levels are managed by solve_path).
std::pair<GridFunction, GridFunction> step(const GridFunction& x, double t,
                                           std::span<const double> dw,
                                           const SolverConfig& cfg,
                                           const EllipticOperator& op,
                                           const MonotoneGraph& graph,
                                           const DiffusionCoefficient& diffusion);

/// Iterate `step` over the Wiener grid. Under the adaptive policy the
/// level n is raised (and tau_n recorded) whenever the running sup of the
/// H-norm reaches n, mirroring the stopping-time localization; exceeding
/// the cap raises TruncationCapReached. Deterministic in (x0, w, cfg).
SolutionPath solve_path(const GridFunction& x0, const WienerPath& w,
                        const SolverConfig& cfg, const EllipticOperator& op,
                        const MonotoneGraph& graph,
                        const DiffusionCoefficient& diffusion);

/// The five discrete energy-identity terms, per step:
///   d_kinetic      = 1/2 |X_{k+1}|^2 - 1/2 |X_k|^2
///   dissipation    = h <A X_{k+1}, X_{k+1}>
///   drift_pairing  = h <xi_k, X_{k+1}>
///   ito_correction = 1/2 h |B(t_k, sigma(X_k))|_HS^2
///   noise_pairing  = <X_k, B(t_k, sigma(X_k)) dW_k>
struct EnergyLedgerRow {
    double d_kinetic;
    double dissipation;
    double drift_pairing;
    double ito_correction;
    double noise_pairing;
    double residual() const {
        return d_kinetic + dissipation + drift_pairing - ito_correction - noise_pairing;
    }
};

std::vector<EnergyLedgerRow> pathwise_energy_terms(const SolutionPath& p,
                                                   const EllipticOperator& op,
                                                   const DiffusionCoefficient& diffusion,
                                                   const WienerPath& w);

/// Max over directly-solved steps of the re-substituted one-step residual
/// (h-norm). Must stay below 10 * newton_tol.
double scheme_consistency_residual(const SolutionPath& p, const EllipticOperator& op,
                                   const MonotoneGraph& graph,
                                   const DiffusionCoefficient& diffusion,
                                   const WienerPath& w);

/// CSV row per time step (t, nodal values, H-norm, V-norm) plus a plain
/// text metadata sidecar with config, seed and tau records.
void save_solution_csv(const SolutionPath& p, const EllipticOperator& op,
                       const std::string& csv_path, const std::string& meta_path,
                       uint64_t seed, const std::string& config_hash);

} // namespace mspde
