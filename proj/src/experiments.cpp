#include "mspde/experiments.hpp"

#include "mspde/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mspde {

PathFunctionals path_functionals(const SolutionPath& p, const EllipticOperator& op,
                                 const MonotoneGraph& graph) {
    PathFunctionals f;
    double l2v_sq = 0.0;
    for (size_t k = 0; k < p.x.size(); ++k) {
        f.sup_h = std::max(f.sup_h, h_norm(p.x[k]));
        if (k > 0) l2v_sq += p.h_time * op.v_norm_sq(p.x[k]);
    }
    f.l2_v = std::sqrt(l2v_sq);
    f.e_norm = f.sup_h + f.l2_v;

    const double hx = p.mesh.h();
    double pot = 0.0;
    for (int k = 0; k < p.steps(); ++k) {
        const GridFunction& xk1 = p.x[static_cast<size_t>(k) + 1];
        const GridFunction& xi = p.xi[static_cast<size_t>(k)];
        double cell = 0.0;
        for (int i = 0; i < xk1.size(); ++i)
            cell += graph.potential(xk1[i]) + graph.conjugate(xi[i]);
        pot += p.h_time * hx * cell;
    }
    f.potential_integral = pot;
    return f;
}

GridFunction sample_smooth_datum(const Mesh& mesh, Rng& rng, int modes) {
    const auto op = EllipticOperator::dirichlet_laplacian(mesh);
    GridFunction out(mesh);
    for (int k = 1; k <= modes; ++k) {
        const double c = draw_normal(rng, 1.0) / k;
        axpy(c, op.eigenvector(k), out);
    }
    return out;
}

GridFunction sample_rough_datum(const Mesh& mesh, Rng& rng, double target_h_norm) {
    GridFunction out(mesh);
    for (double& v : out.values) v = draw_uniform(rng, -1.0, 1.0);
    const double norm = h_norm(out);
    if (norm > 0.0)
        for (double& v : out.values) v *= target_h_norm / norm;
    return out;
}

MomentReport moment_scan(std::span<const double> p_list, std::span<const double> scales,
                         int samples, const Model& model, const SolverConfig& cfg,
                         double T, int steps, uint64_t master_seed, bool parallel,
                         int threads, const InitialSampler& sampler) {
    if (samples < 50) throw ConfigError("moment scan needs samples >= 50");
    MomentReport report;
    report.samples = samples;
    report.master_seed = master_seed;
    const InitialSampler draw_datum =
        sampler ? sampler : [](const Mesh& mesh, Rng& rng) {
            return sample_smooth_datum(mesh, rng);
        };

    for (double scale : scales) {
        std::vector<double> input(static_cast<size_t>(samples));
        std::vector<double> output(static_cast<size_t>(samples));
        std::vector<double> potential(static_cast<size_t>(samples));
        std::vector<char> failed(static_cast<size_t>(samples), 0);

        for_each_index(
            samples,
            [&](int j) {
                Rng rng = make_rng(master_seed, static_cast<uint64_t>(2 * j));
                const GridFunction zeta = draw_datum(model.mesh, rng);
                const GridFunction x0 = scale * zeta;
                const WienerPath w =
                    sample_wiener_path(model.noise.k_modes(), steps, T,
                                       derive_seed(master_seed, static_cast<uint64_t>(2 * j + 1)));
                try {
                    const SolutionPath path =
                        solve_path(x0, w, cfg, model.op, model.graph, model.noise);
                    const PathFunctionals f = path_functionals(path, model.op, model.graph);
                    input[static_cast<size_t>(j)] = h_norm(x0);
                    output[static_cast<size_t>(j)] = f.e_norm;
                    potential[static_cast<size_t>(j)] = f.potential_integral;
                } catch (const std::exception&) {
                    failed[static_cast<size_t>(j)] = 1;
                }
            },
            parallel, threads);

        bool scale_failed = false;
        for (char fl : failed) scale_failed = scale_failed || fl != 0;
        if (scale_failed) {
            report.failed_scales.push_back(scale);
            continue;
        }

        for (double p : p_list) {
            MomentCell cell;
            cell.p = p;
            cell.scale = scale;
            cell.input_norm = lp_norm_estimate(input, p);
            cell.output_norm = lp_norm_estimate(output, p);
            cell.fitted_c = cell.output_norm * cell.output_norm /
                            (1.0 + cell.input_norm * cell.input_norm);
            cell.output_ci = bootstrap_ci(
                output, [p](std::span<const double> v) { return lp_norm_estimate(v, p); },
                500, derive_seed(master_seed, 777));
            cell.potential_lp = lp_norm_estimate(potential, 0.5 * p);
            report.cells.push_back(cell);
        }
    }
    return report;
}

double moment_stability(const MomentReport& report, double p,
                        std::span<const double> scales) {
    std::vector<double> cs;
    for (const auto& cell : report.cells) {
        if (cell.p != p) continue;
        for (double s : scales)
            if (cell.scale == s) cs.push_back(cell.fitted_c);
    }
    if (cs.empty()) return std::numeric_limits<double>::infinity();
    const double m = mean(cs);
    double worst = 0.0;
    for (double c : cs) worst = std::max(worst, std::abs(c - m) / m);
    return worst;
}

LipschitzReport lipschitz_scan(std::span<const double> p_list,
                               std::span<const double> deltas, int samples,
                               const Model& model, const SolverConfig& cfg, double T,
                               int steps, uint64_t master_seed, bool parallel,
                               int threads) {
    if (!model.noise.lipschitz_constant() && !model.noise.is_zero())
        throw ConfigError("lipschitz scan requires a globally Lipschitz diffusion");
    LipschitzReport report;
    report.samples = samples;
    report.master_seed = master_seed;

    const GridFunction dir = model.op.eigenvector(1); // unit H-norm direction

    // per path index: base solution once, perturbed solution per delta
    std::vector<std::vector<double>> e_dist(deltas.size(),
                                            std::vector<double>(static_cast<size_t>(samples)));
    std::vector<char> failed(static_cast<size_t>(samples), 0);

    for_each_index(
        samples,
        [&](int j) {
            Rng rng = make_rng(master_seed, static_cast<uint64_t>(2 * j));
            const GridFunction x0 = sample_smooth_datum(model.mesh, rng);
            const WienerPath w =
                sample_wiener_path(model.noise.k_modes(), steps, T,
                                   derive_seed(master_seed, static_cast<uint64_t>(2 * j + 1)));
            try {
                const SolutionPath base =
                    solve_path(x0, w, cfg, model.op, model.graph, model.noise);
                for (size_t d = 0; d < deltas.size(); ++d) {
                    GridFunction y0 = x0;
                    axpy(deltas[d], dir, y0);
                    const SolutionPath moved =
                        solve_path(y0, w, cfg, model.op, model.graph, model.noise);
                    double sup = 0.0;
                    double l2v = 0.0;
                    for (size_t k = 0; k < base.x.size(); ++k) {
                        const GridFunction diff = moved.x[k] - base.x[k];
                        sup = std::max(sup, h_norm(diff));
                        if (k > 0) l2v += base.h_time * model.op.v_norm_sq(diff);
                    }
                    e_dist[d][static_cast<size_t>(j)] = sup + std::sqrt(l2v);
                }
            } catch (const std::exception&) {
                failed[static_cast<size_t>(j)] = 1;
            }
        },
        parallel, threads);

    for (char fl : failed)
        if (fl) throw NewtonDivergence("lipschitz scan path failed");

    for (double p : p_list) {
        for (size_t d = 0; d < deltas.size(); ++d) {
            LipschitzCell cell;
            cell.p = p;
            cell.delta = deltas[d];
            if (p > 0.0) {
                cell.input_norm = deltas[d]; // deterministic shift
                cell.output_norm = lp_norm_estimate(e_dist[d], p);
            } else {
                cell.input_norm = std::min(deltas[d], 1.0);
                std::vector<double> capped = e_dist[d];
                for (double& v : capped) v = std::min(v, 1.0);
                cell.output_norm = mean(capped);
            }
            cell.ratio = cell.input_norm > 0.0 ? cell.output_norm / cell.input_norm : 0.0;
            report.cells.push_back(cell);
        }
    }
    return report;
}

std::vector<RegularityCell> regularity_study(const std::function<Model(int)>& make_model,
                                             std::span<const int> mesh_sizes, int samples,
                                             const SolverConfig& cfg, double T, int steps,
                                             uint64_t master_seed, bool parallel,
                                             int threads) {
    std::vector<RegularityCell> cells;
    for (int n : mesh_sizes) {
        const Model model = make_model(n);
        const Mesh mesh = model.mesh;

        // fixed smooth V-datum: first eigenmode plus a slower second mode
        GridFunction smooth = model.op.eigenvector(1);
        axpy(0.5, model.op.eigenvector(2), smooth);

        std::vector<double> smooth_sup(static_cast<size_t>(samples));
        std::vector<double> smooth_int(static_cast<size_t>(samples));
        std::vector<double> rough_sup(static_cast<size_t>(samples));
        std::vector<double> rough_int(static_cast<size_t>(samples));
        std::vector<double> rough_v0(static_cast<size_t>(samples));
        std::vector<char> failed(static_cast<size_t>(samples), 0);

        for_each_index(
            samples,
            [&](int j) {
                Rng rng = make_rng(master_seed, static_cast<uint64_t>(2 * j));
                const WienerPath w =
                    sample_wiener_path(model.noise.k_modes(), steps, T,
                                       derive_seed(master_seed, static_cast<uint64_t>(2 * j + 1)));
                try {
                    auto measure = [&](const GridFunction& x0, double& sup_v_sq,
                                       double& int_au_sq) {
                        const SolutionPath p =
                            solve_path(x0, w, cfg, model.op, model.graph, model.noise);
                        double sup = 0.0, integral = 0.0;
                        for (size_t k = 0; k < p.x.size(); ++k) {
                            sup = std::max(sup, model.op.v_norm_sq(p.x[k]));
                            if (k > 0)
                                integral += p.h_time * h_norm_sq(model.op.apply(p.x[k]));
                        }
                        sup_v_sq = sup;
                        int_au_sq = integral;
                    };
                    measure(smooth, smooth_sup[static_cast<size_t>(j)],
                            smooth_int[static_cast<size_t>(j)]);
                    const GridFunction rough = sample_rough_datum(mesh, rng);
                    rough_v0[static_cast<size_t>(j)] = model.op.v_norm_sq(rough);
                    measure(rough, rough_sup[static_cast<size_t>(j)],
                            rough_int[static_cast<size_t>(j)]);
                } catch (const std::exception&) {
                    failed[static_cast<size_t>(j)] = 1;
                }
            },
            parallel, threads);

        for (char fl : failed)
            if (fl)
                throw NewtonDivergence("regularity path failed at n = " + std::to_string(n));

        RegularityCell cell;
        cell.mesh_n = n;
        cell.smooth_sup_v_sq = mean(smooth_sup);
        cell.smooth_int_au_sq = mean(smooth_int);
        cell.rough_sup_v_sq = mean(rough_sup);
        cell.rough_int_au_sq = mean(rough_int);
        cell.rough_x0_v_sq = mean(rough_v0);
        cells.push_back(cell);
    }
    return cells;
}

const ErgodicQuantity& ergodic_quantity(const ErgodicReport& r, const std::string& name) {
    for (const auto& q : r.quantities)
        if (q.name == name) return q;
    throw ConfigError("no ergodic quantity named " + name);
}

namespace {

ErgodicQuantity summarize_series(const std::string& name, std::span<const double> series,
                                 uint64_t seed) {
    ErgodicQuantity q;
    q.name = name;
    q.average = mean(series);

    // relative drift of the running mean over the final half
    const size_t half = series.size() / 2;
    double mid_mean = mean(series.subspan(0, std::max<size_t>(half, 1)));
    q.drift = std::abs(q.average - mid_mean) /
              std::max(std::abs(q.average), 1e-300);

    const auto batches = batch_means(series, 20);
    q.ci = bootstrap_mean_ci(batches, 500, seed);
    return q;
}

} // namespace

ErgodicReport ergodic_run(const Model& model, const GridFunction& x0, double t_long,
                          double burn_in, const SolverConfig& cfg, uint64_t seed,
                          std::span<const int> fn_ladder) {
    if (burn_in < 0.0 || burn_in >= t_long)
        throw ConfigError("burn-in must lie in [0, t_long)");
    const int steps = static_cast<int>(std::llround(t_long / cfg.h_time));
    const WienerPath w =
        sample_wiener_path(model.noise.k_modes(), steps, t_long, seed);
    const SolutionPath path = solve_path(x0, w, cfg, model.op, model.graph, model.noise);

    ErgodicReport report;
    report.t_long = t_long;
    report.burn_in = burn_in;
    report.fn_ladder.assign(fn_ladder.begin(), fn_ladder.end());

    const std::vector<std::string> names{"h_sq", "v_sq", "j_int", "jstar_int", "au_sq"};
    std::vector<std::vector<double>> series(names.size() + fn_ladder.size());

    const double hx = model.mesh.h();
    for (int k = 0; k <= path.steps(); ++k) {
        const double t = path.time(k);
        if (t < burn_in) continue;
        const GridFunction& u = path.x[static_cast<size_t>(k)];
        double j_int = 0.0, jstar_int = 0.0;
        for (double v : u.values) {
            j_int += model.graph.potential(v);
            jstar_int += model.graph.conjugate(model.graph.minimal_section(v));
        }
        series[0].push_back(h_norm_sq(u));
        series[1].push_back(model.op.v_norm_sq(u));
        series[2].push_back(hx * j_int);
        series[3].push_back(hx * jstar_int);
        series[4].push_back(h_norm_sq(model.op.apply(u)));
        for (size_t m = 0; m < fn_ladder.size(); ++m) {
            const double n = static_cast<double>(fn_ladder[m]);
            const double a = h_norm_sq(model.op.yosida_apply(1.0 / n, u));
            series[names.size() + m].push_back(std::min(a, n * n));
        }
        report.trace_time.push_back(t);
    }

    for (size_t q = 0; q < names.size(); ++q)
        report.quantities.push_back(
            summarize_series(names[q], series[q], derive_seed(seed, 1000 + q)));
    for (size_t m = 0; m < fn_ladder.size(); ++m)
        report.fn_averages.push_back(
            summarize_series("f_" + std::to_string(fn_ladder[m]),
                             series[names.size() + m],
                             derive_seed(seed, 2000 + m)));
    report.trace_values = std::move(series);
    return report;
}

} // namespace mspde
