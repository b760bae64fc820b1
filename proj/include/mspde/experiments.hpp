#pragma once

#include "mspde/solver.hpp"
#include "mspde/stats.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mspde {

/// One concrete equation instance: graph drift, elliptic part, diffusion.
struct Model {
    Mesh mesh;
    MonotoneGraph graph = MonotoneGraph::linear(0.0);
    EllipticOperator op = EllipticOperator::dirichlet_laplacian(Mesh(2));
    DiffusionCoefficient noise;
};

/// Path-space functionals of one trajectory: E-norm (sup-in-time H plus
/// quadrature L2(0,T;V)), its two pieces, and the convex-potential
/// bookkeeping integral for the solution-space membership surrogate.
struct PathFunctionals {
    double sup_h = 0.0;
    double l2_v = 0.0;
    double e_norm = 0.0;
    double potential_integral = 0.0; // int int j(X) + j*(xi)
};

PathFunctionals path_functionals(const SolutionPath& p, const EllipticOperator& op,
                                 const MonotoneGraph& graph);

/// Random smooth datum: combination of the first few sine modes with
/// coefficients ~ N(0,1)/k, unit-order H-norm.
GridFunction sample_smooth_datum(const Mesh& mesh, Rng& rng, int modes = 4);

/// White-noise-like nodal datum normalized to a fixed H-norm; its V-norm
/// grows like n with the mesh.
GridFunction sample_rough_datum(const Mesh& mesh, Rng& rng, double target_h_norm = 1.0);

struct MomentCell {
    double p;
    double scale;
    double input_norm;  // |X0|_{L^p(Omega; H)}
    double output_norm; // |X|_{L^p(Omega; E)}
    double fitted_c;    // output^2 / (1 + input^2)
    ConfidenceInterval output_ci;
    double potential_lp; // L^{p/2}(Omega) norm of the potential integral
};

struct MomentReport {
    std::vector<MomentCell> cells;
    std::vector<double> failed_scales; // scale levels aborted by solver errors
    int samples = 0;
    uint64_t master_seed = 0;
};

using InitialSampler = std::function<GridFunction(const Mesh&, Rng&)>;

/// Monte Carlo moment scan: for each scale s the initial datum is s*zeta
/// with zeta drawn from the sampler (smooth random combination by
/// default); the same zeta and Wiener draws are reused across scales so
/// the fitted constants compare like for like. Requires samples >= 50; a
/// solver error aborts that scale level only and records it in
/// failed_scales.
MomentReport moment_scan(std::span<const double> p_list, std::span<const double> scales,
                         int samples, const Model& model, const SolverConfig& cfg,
                         double T, int steps, uint64_t master_seed, bool parallel = true,
                         int threads = 0, const InitialSampler& sampler = {});

/// Largest relative deviation of fitted_c from its mean across the cells
/// of one p (used with the top input scales).
double moment_stability(const MomentReport& report, double p,
                        std::span<const double> scales);

struct LipschitzCell {
    double p; // 0 encodes the metric d(f,g) = E(|f-g|_E ^ 1)
    double delta;
    double input_norm;
    double output_norm;
    double ratio;
};

struct LipschitzReport {
    std::vector<LipschitzCell> cells;
    int samples = 0;
    uint64_t master_seed = 0;
};

/// Common-noise coupling study of the solution map: Y0 = X0 + delta e_1.
/// Requires a (B1) diffusion.
LipschitzReport lipschitz_scan(std::span<const double> p_list,
                               std::span<const double> deltas, int samples,
                               const Model& model, const SolverConfig& cfg, double T,
                               int steps, uint64_t master_seed, bool parallel = true,
                               int threads = 0);

struct RegularityCell {
    int mesh_n;
    double smooth_sup_v_sq; // E sup_t |X|_V^2, smooth V datum
    double smooth_int_au_sq; // E int |AX|^2 dt
    double rough_sup_v_sq;
    double rough_int_au_sq;
    double rough_x0_v_sq; // discrete |x0|_V^2 of the rough datum (diagnostic)
};

/// Mesh-refinement study of the regularity lifting: V-valued noise, smooth
/// versus rough initial data across mesh sizes.
std::vector<RegularityCell> regularity_study(const std::function<Model(int)>& make_model,
                                             std::span<const int> mesh_sizes, int samples,
                                             const SolverConfig& cfg, double T, int steps,
                                             uint64_t master_seed, bool parallel = true,
                                             int threads = 0);

struct ErgodicQuantity {
    std::string name;
    double average = 0.0;
    double drift = 0.0; // relative drift of the running mean over the final half
    ConfidenceInterval ci;
};

struct ErgodicReport {
    double t_long = 0.0;
    double burn_in = 0.0;
    std::vector<ErgodicQuantity> quantities; // h_sq, v_sq, j_int, jstar_int, au_sq
    std::vector<int> fn_ladder;
    std::vector<ErgodicQuantity> fn_averages;
    std::vector<double> trace_time;               // post burn-in sample times
    std::vector<std::vector<double>> trace_values; // per quantity column
};

const ErgodicQuantity& ergodic_quantity(const ErgodicReport& r, const std::string& name);

/// Long single-trajectory time averaging after burn-in; the occupation
/// measure stands in for the invariant measure.
ErgodicReport ergodic_run(const Model& model, const GridFunction& x0, double t_long,
                          double burn_in, const SolverConfig& cfg, uint64_t seed,
                          std::span<const int> fn_ladder);

} // namespace mspde
