#include "mspde/solver.hpp"

#include "mspde/csv.hpp"
#include "mspde/errors.hpp"
#include "mspde/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mspde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct NewtonWorkspace {
    std::vector<double> diag;
    std::vector<double> residual;
    std::vector<double> direction;
    std::vector<double> trial;
    std::vector<double> scratch;
};

/// rhs and the implicit solve for one step at explicit truncation radius.
/// Returns (x_plus, xi).
std::pair<GridFunction, GridFunction> step_at_radius(const GridFunction& x, double t,
                                                     std::span<const double> dw,
                                                     double radius,
                                                     const SolverConfig& cfg,
                                                     const EllipticOperator& op,
                                                     const MonotoneGraph& graph,
                                                     const DiffusionCoefficient& diffusion,
                                                     NewtonWorkspace& ws) {
    const int n = x.size();
    const double h = cfg.h_time;
    const double lam = cfg.lambda();
    const double hx = x.mesh.h();
    const double w = op.scale() > 0.0 ? h * op.scale() / (hx * hx) : 0.0;

    GridFunction rhs = x;
    if (!diffusion.is_zero()) {
        const GridFunction arg = std::isfinite(radius) ? truncate_to_ball(x, radius) : x;
        axpy(1.0, diffusion.apply(t, arg, dw), rhs);
    }

    // F(u) = u + h A u + h beta_lambda(u) - rhs, gradient of a strongly
    // convex functional; damped Newton with the tridiagonal-plus-diagonal
    // Jacobian I + hA + h diag(beta_lambda').
    GridFunction u = x;
    ws.diag.resize(static_cast<size_t>(n));
    ws.residual.resize(static_cast<size_t>(n));
    ws.direction.resize(static_cast<size_t>(n));
    ws.trial.resize(static_cast<size_t>(n));

    auto eval_residual = [&](const std::vector<double>& v, std::vector<double>& out) {
        double norm_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double left = i > 0 ? v[static_cast<size_t>(i - 1)] : 0.0;
            const double right = i + 1 < n ? v[static_cast<size_t>(i + 1)] : 0.0;
            const double vi = v[static_cast<size_t>(i)];
            double r = vi + w * (2.0 * vi - left - right) + h * graph.yosida(lam, vi) - rhs[i];
            out[static_cast<size_t>(i)] = r;
            norm_sq += r * r;
        }
        return std::sqrt(hx * norm_sq);
    };

    double res = eval_residual(u.values, ws.residual);
    for (int it = 0; it < cfg.newton_max_iter && res > cfg.newton_tol; ++it) {
        for (int i = 0; i < n; ++i)
            ws.diag[static_cast<size_t>(i)] =
                1.0 + 2.0 * w + h * graph.yosida_derivative(lam, u[i]);
        for (int i = 0; i < n; ++i) ws.residual[static_cast<size_t>(i)] *= -1.0;
        solve_tridiag_const_off(ws.diag, -w, ws.residual, ws.direction, ws.scratch);

        double damping = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            for (int i = 0; i < n; ++i)
                ws.trial[static_cast<size_t>(i)] =
                    u[i] + damping * ws.direction[static_cast<size_t>(i)];
            const double trial_res = eval_residual(ws.trial, ws.residual);
            if (trial_res < res) {
                u.values = ws.trial;
                res = trial_res;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(res <= cfg.newton_tol))
        throw NewtonDivergence("implicit step stalled at residual " + std::to_string(res));

    GridFunction xi(x.mesh);
    for (int i = 0; i < n; ++i) xi[i] = graph.yosida(lam, u[i]);
    return {std::move(u), std::move(xi)};
}

} // namespace

void SolverConfig::validate() const {
    if (h_time <= 0.0) throw ConfigError("h_time must be positive");
    if (newton_tol <= 0.0) throw ConfigError("newton_tol must be positive");
    if (newton_max_iter < 1) throw ConfigError("newton_max_iter must be >= 1");
    if (lambda() <= 0.0 || lambda() > 1.0)
        throw ConfigError("yosida lambda must lie in (0, 1]");
    if (truncation.mode == TruncationMode::Fixed && truncation.fixed_radius <= 0.0)
        throw ConfigError("fixed truncation needs a positive radius");
    if (truncation.mode == TruncationMode::Adaptive &&
        (truncation.start_level < 1 || truncation.max_level < truncation.start_level))
        throw ConfigError("adaptive truncation needs 1 <= start_level <= max_level");
}

double SolutionPath::sup_h_norm() const {
    double s = 0.0;
    for (const auto& g : x) s = std::max(s, h_norm(g));
    return s;
}

std::pair<GridFunction, GridFunction> step(const GridFunction& x, double t,
                                           std::span<const double> dw,
                                           const SolverConfig& cfg,
                                           const EllipticOperator& op,
                                           const MonotoneGraph& graph,
                                           const DiffusionCoefficient& diffusion) {
    cfg.validate();
    const double radius =
        cfg.truncation.mode == TruncationMode::Fixed ? cfg.truncation.fixed_radius : kInf;
    NewtonWorkspace ws;
    return step_at_radius(x, t, dw, radius, cfg, op, graph, diffusion, ws);
}

SolutionPath solve_path(const GridFunction& x0, const WienerPath& w,
                        const SolverConfig& cfg, const EllipticOperator& op,
                        const MonotoneGraph& graph,
                        const DiffusionCoefficient& diffusion) {
    cfg.validate();
    for (double v : x0.values)
        if (!std::isfinite(v)) throw ConfigError("initial datum contains non-finite values");
    if (!diffusion.is_zero() && diffusion.k_modes() != w.k_modes)
        throw DimensionMismatch("wiener path mode count does not match diffusion");

    SolverConfig step_cfg = cfg;
    step_cfg.h_time = w.h_time(); // the grid comes from the Wiener path
    step_cfg.validate();

    SolutionPath path;
    path.mesh = x0.mesh;
    path.h_time = w.h_time();
    path.yosida_lambda = step_cfg.lambda();
    path.config = step_cfg;
    path.x.reserve(static_cast<size_t>(w.steps) + 1);
    path.xi.reserve(static_cast<size_t>(w.steps));
    path.radius_used.reserve(static_cast<size_t>(w.steps));
    path.substeps.reserve(static_cast<size_t>(w.steps));
    path.x.push_back(x0);

    const bool adaptive = cfg.truncation.mode == TruncationMode::Adaptive;
    double running_sup = h_norm(x0);
    int next_level = 1; // smallest integer level not yet reached by the sup
    auto record_crossings = [&](int step_index) {
        while (running_sup >= static_cast<double>(next_level)) {
            path.tau_records.push_back({next_level, step_index});
            ++next_level;
        }
    };
    record_crossings(0);

    NewtonWorkspace ws;
    std::vector<double> sub_dw(static_cast<size_t>(w.k_modes));

    for (int k = 0; k < w.steps; ++k) {
        const GridFunction& xk = path.x.back();
        double radius = kInf;
        if (cfg.truncation.mode == TruncationMode::Fixed) radius = cfg.truncation.fixed_radius;
        if (adaptive) {
            // past tau_n the glued process is driven through sigma_{n+1},
            // so the active level always exceeds the running sup
            const int level = std::max(cfg.truncation.start_level, next_level);
            if (level > cfg.truncation.max_level)
                throw TruncationCapReached("truncation level exceeded cap at step " +
                                           std::to_string(k));
            radius = static_cast<double>(level);
        }

        const double t = k * path.h_time;
        std::pair<GridFunction, GridFunction> out{GridFunction(path.mesh),
                                                  GridFunction(path.mesh)};
        int used_substeps = 0;
        step_cfg.h_time = path.h_time;
        try {
            out = step_at_radius(xk, t, w.step_increments(k), radius, step_cfg, op, graph,
                                 diffusion, ws);
        } catch (const NewtonDivergence&) {
            // retry with halved steps; the increment is split evenly, which
            // keeps the total increment and determinism on the master grid
            bool solved = false;
            for (int halving = 1; halving <= cfg.max_step_halvings && !solved; ++halving) {
                const int pieces = 1 << halving;
                SolverConfig sub_cfg = step_cfg;
                sub_cfg.h_time = path.h_time / pieces;
                GridFunction cur = xk;
                GridFunction last_xi(path.mesh);
                try {
                    for (int j = 0; j < pieces; ++j) {
                        for (int m = 0; m < w.k_modes; ++m)
                            sub_dw[static_cast<size_t>(m)] = w.inc(k, m) / pieces;
                        auto sub = step_at_radius(cur, t + j * sub_cfg.h_time, sub_dw, radius,
                                                  sub_cfg, op, graph, diffusion, ws);
                        cur = std::move(sub.first);
                        last_xi = std::move(sub.second);
                    }
                    out = {std::move(cur), std::move(last_xi)};
                    used_substeps = pieces;
                    solved = true;
                } catch (const NewtonDivergence&) {
                    // try the next halving
                }
            }
            if (!solved)
                throw NewtonDivergence("step " + std::to_string(k) +
                                       " failed after substep retries");
        }

        running_sup = std::max(running_sup, h_norm(out.first));
        path.x.push_back(std::move(out.first));
        path.xi.push_back(std::move(out.second));
        path.radius_used.push_back(radius);
        path.substeps.push_back(used_substeps);
        record_crossings(k + 1);
    }
    return path;
}

std::vector<EnergyLedgerRow> pathwise_energy_terms(const SolutionPath& p,
                                                   const EllipticOperator& op,
                                                   const DiffusionCoefficient& diffusion,
                                                   const WienerPath& w) {
    std::vector<EnergyLedgerRow> rows;
    rows.reserve(static_cast<size_t>(p.steps()));
    for (int k = 0; k < p.steps(); ++k) {
        const GridFunction& xk = p.x[static_cast<size_t>(k)];
        const GridFunction& xk1 = p.x[static_cast<size_t>(k) + 1];
        EnergyLedgerRow row{};
        row.d_kinetic = 0.5 * (h_norm_sq(xk1) - h_norm_sq(xk));
        row.dissipation = p.h_time * op.dirichlet_form(xk1, xk1);
        row.drift_pairing = p.h_time * h_inner(p.xi[static_cast<size_t>(k)], xk1);
        if (!diffusion.is_zero()) {
            const double t = p.time(k);
            const double radius = p.radius_used[static_cast<size_t>(k)];
            const GridFunction arg =
                std::isfinite(radius) ? truncate_to_ball(xk, radius) : xk;
            row.ito_correction = 0.5 * p.h_time * diffusion.hs_norm_sq(t, arg);
            row.noise_pairing = h_inner(xk, diffusion.apply(t, arg, w.step_increments(k)));
        }
        rows.push_back(row);
    }
    return rows;
}

double scheme_consistency_residual(const SolutionPath& p, const EllipticOperator& op,
                                   const MonotoneGraph& graph,
                                   const DiffusionCoefficient& diffusion,
                                   const WienerPath& w) {
    double worst = 0.0;
    const double h = p.h_time;
    const double lam = p.yosida_lambda;
    for (int k = 0; k < p.steps(); ++k) {
        if (p.substeps[static_cast<size_t>(k)] != 0) continue; // validated per substep
        const GridFunction& xk = p.x[static_cast<size_t>(k)];
        const GridFunction& xk1 = p.x[static_cast<size_t>(k) + 1];
        GridFunction rhs = xk;
        if (!diffusion.is_zero()) {
            const double radius = p.radius_used[static_cast<size_t>(k)];
            const GridFunction arg =
                std::isfinite(radius) ? truncate_to_ball(xk, radius) : xk;
            axpy(1.0, diffusion.apply(p.time(k), arg, w.step_increments(k)), rhs);
        }
        GridFunction lhs = xk1 + h * op.apply(xk1);
        for (int i = 0; i < lhs.size(); ++i) lhs[i] += h * graph.yosida(lam, xk1[i]);
        worst = std::max(worst, h_norm(lhs - rhs));
    }
    return worst;
}

void save_solution_csv(const SolutionPath& p, const EllipticOperator& op,
                       const std::string& csv_path, const std::string& meta_path,
                       uint64_t seed, const std::string& config_hash) {
    CsvWriter csv(csv_path);
    csv.comment("config_hash=" + config_hash + " seed=" + std::to_string(seed));
    std::vector<std::string> header{"t"};
    for (int i = 0; i < p.mesh.n; ++i) header.push_back("x" + std::to_string(i + 1));
    header.push_back("h_norm");
    header.push_back("v_norm");
    csv.header(header);
    for (size_t k = 0; k < p.x.size(); ++k) {
        std::vector<std::string> row;
        row.push_back(format_real(static_cast<double>(k) * p.h_time));
        for (double v : p.x[k].values) row.push_back(format_real(v));
        row.push_back(format_real(h_norm(p.x[k])));
        row.push_back(format_real(op.v_norm(p.x[k])));
        csv.row(row);
    }

    std::ofstream meta(meta_path);
    meta << "config_hash=" << config_hash << "\n";
    meta << "seed=" << seed << "\n";
    meta << "mesh_n=" << p.mesh.n << "\n";
    meta << "h_time=" << format_real(p.h_time) << "\n";
    meta << "yosida_lambda=" << format_real(p.yosida_lambda) << "\n";
    meta << "newton_tol=" << format_real(p.config.newton_tol) << "\n";
    meta << "steps=" << p.steps() << "\n";
    for (const auto& tr : p.tau_records)
        meta << "tau_level_" << tr.level << "=" << tr.step_index << "\n";
}

} // namespace mspde
