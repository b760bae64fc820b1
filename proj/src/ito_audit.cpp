#include "mspde/ito_audit.hpp"

#include "mspde/stats.hpp"

#include <cmath>

namespace mspde {

double energy_residual(const SolutionPath& p, const EllipticOperator& op,
                       const DiffusionCoefficient& diffusion, const WienerPath& w) {
    const auto rows = pathwise_energy_terms(p, op, diffusion, w);
    double running = 0.0;
    double worst = 0.0;
    for (const auto& row : rows) {
        running += row.residual();
        worst = std::max(worst, std::abs(running));
    }
    return worst;
}

FenchelAuditResult fenchel_audit(const SolutionPath& p, const MonotoneGraph& graph,
                                 double lambda) {
    FenchelAuditResult out{0.0, 0.0};
    for (int k = 0; k < p.steps(); ++k) {
        const GridFunction& xk1 = p.x[static_cast<size_t>(k) + 1];
        const GridFunction& xi = p.xi[static_cast<size_t>(k)];
        for (int i = 0; i < xk1.size(); ++i) {
            const double displaced = graph.resolvent(lambda, xk1[i]);
            out.displaced_gap =
                std::max(out.displaced_gap, graph.fenchel_gap(displaced, xi[i]));
            out.regularization_defect =
                std::max(out.regularization_defect, graph.fenchel_gap(xk1[i], xi[i]));
        }
    }
    return out;
}

double fit_convergence_order(const std::vector<RefinementLevel>& levels, int fit_window) {
    std::vector<double> lx, ly;
    const int start = std::max(0, static_cast<int>(levels.size()) - fit_window);
    for (size_t i = static_cast<size_t>(start); i < levels.size(); ++i) {
        if (levels[i].value <= 0.0) return 0.0; // exact-zero defects: no rate to fit
        lx.push_back(std::log2(levels[i].h));
        ly.push_back(std::log2(levels[i].value));
    }
    return ls_slope(lx, ly);
}

namespace {

template <typename Measure>
std::vector<RefinementLevel> refinement_sweep(const GridFunction& x0,
                                              const WienerPath& coarse,
                                              const SolverConfig& cfg,
                                              const EllipticOperator& op,
                                              const MonotoneGraph& graph,
                                              const DiffusionCoefficient& diffusion,
                                              int levels, Measure&& measure) {
    std::vector<RefinementLevel> out;
    WienerPath w = coarse;
    for (int lvl = 0; lvl < levels; ++lvl) {
        SolverConfig level_cfg = cfg;
        level_cfg.h_time = w.h_time();
        level_cfg.yosida_lambda = cfg.yosida_lambda > 0.0 ? cfg.yosida_lambda : w.h_time();
        const SolutionPath p = solve_path(x0, w, level_cfg, op, graph, diffusion);
        out.push_back({lvl, w.h_time(), measure(p, w)});
        if (lvl + 1 < levels) w = refine_path(w);
    }
    return out;
}

} // namespace

EnergyResidualReport energy_refinement_study(const GridFunction& x0,
                                             const WienerPath& coarse,
                                             const SolverConfig& cfg,
                                             const EllipticOperator& op,
                                             const MonotoneGraph& graph,
                                             const DiffusionCoefficient& diffusion,
                                             int levels) {
    EnergyResidualReport report;
    report.path_seed = coarse.seed;
    report.levels = refinement_sweep(
        x0, coarse, cfg, op, graph, diffusion, levels,
        [&](const SolutionPath& p, const WienerPath& w) {
            return energy_residual(p, op, diffusion, w);
        });
    report.fitted_order = fit_convergence_order(report.levels);
    return report;
}

double max_increment(const SolutionPath& p) {
    double m = 0.0;
    for (size_t k = 0; k + 1 < p.x.size(); ++k)
        m = std::max(m, h_norm(p.x[k + 1] - p.x[k]));
    return m;
}

ContinuityReport continuity_study(const GridFunction& x0, const WienerPath& coarse,
                                  const SolverConfig& cfg, const EllipticOperator& op,
                                  const MonotoneGraph& graph,
                                  const DiffusionCoefficient& diffusion, int levels) {
    if (levels < 3) throw ConfigError("continuity study needs at least 3 levels");
    ContinuityReport report;
    report.path_seed = coarse.seed;
    report.levels = refinement_sweep(
        x0, coarse, cfg, op, graph, diffusion, levels,
        [&](const SolutionPath& p, const WienerPath&) { return max_increment(p); });
    report.fitted_order = fit_convergence_order(report.levels);
    report.strictly_decreasing = true;
    for (size_t i = 1; i < report.levels.size(); ++i)
        if (report.levels[i].value >= report.levels[i - 1].value)
            report.strictly_decreasing = false;
    return report;
}

double positivity_min_pairing(const SolutionPath& p, const EllipticOperator& op,
                              const MonotoneGraph& graph, double lambda) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& xk : p.x) {
        if (op.is_zero()) return 0.0;
        const GridFunction alu = op.yosida_apply(lambda, xk);
        GridFunction blu(xk.mesh);
        for (int i = 0; i < xk.size(); ++i) blu[i] = graph.yosida(lambda, xk[i]);
        worst = std::min(worst, h_inner(alu, blu));
    }
    return worst;
}

} // namespace mspde
