#include "mspde/checks.hpp"
#include "mspde/config.hpp"
#include "mspde/csv.hpp"
#include "mspde/ito_audit.hpp"
#include "mspde/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace mspde;
using nlohmann::json;

namespace {

struct Assertion {
    std::string name;
    bool pass;
    std::string detail;
};

struct RunContext {
    RunConfig cfg;
    std::string hash;
    fs::path out;
    std::vector<Assertion> assertions;
    json manifest;

    void note(const std::string& name, bool pass, const std::string& detail) {
        assertions.push_back({name, pass, detail});
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    }

    CsvWriter make_csv(const std::string& filename) {
        CsvWriter csv((out / filename).string());
        csv.comment("config_hash=" + hash + " seed=" + std::to_string(cfg.seed));
        return csv;
    }

    int finish(const std::string& subcommand) {
        manifest["subcommand"] = subcommand;
        manifest["config_hash"] = hash;
        manifest["seed"] = cfg.seed;
        manifest["model"] = {{"graph", cfg.graph_id},
                             {"n", cfg.mesh_n},
                             {"noise", cfg.noise_kind},
                             {"k_modes", cfg.k_modes},
                             {"decay", cfg.noise_decay}};
        json checks = json::array();
        bool all = true;
        for (const auto& a : assertions) {
            checks.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
            all = all && a.pass;
        }
        manifest["assertions"] = checks;
        manifest["pass"] = all;
        std::ofstream mf(out / "manifest.json");
        mf << manifest.dump(2) << "\n";
        if (!all) {
            std::cout << "failed assertions:\n";
            for (const auto& a : assertions)
                if (!a.pass) std::cout << "  " << a.name << ": " << a.detail << "\n";
        }
        return all ? 0 : 1;
    }
};

std::string real_cell(double x) { return format_real(x); }

void write_levels_csv(RunContext& ctx, const std::string& filename,
                      const std::vector<RefinementLevel>& levels, double fitted_order,
                      uint64_t seed) {
    CsvWriter csv = ctx.make_csv(filename);
    csv.header({"seed", "level", "h", "value", "fitted_order"});
    for (const auto& lv : levels)
        csv.row({std::to_string(seed), std::to_string(lv.level), real_cell(lv.h),
                 real_cell(lv.value), real_cell(fitted_order)});
}

int cmd_simulate(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    const SolverConfig scfg = build_solver_config(ctx.cfg);
    const WienerPath w = sample_wiener_path(model.noise.k_modes(), ctx.cfg.steps, ctx.cfg.T,
                                            ctx.cfg.seed);
    GridFunction x0 = model.op.eigenvector(1);
    const SolutionPath p = solve_path(x0, w, scfg, model.op, model.graph, model.noise);

    save_solution_csv(p, model.op, (ctx.out / "path.csv").string(),
                      (ctx.out / "path_meta.txt").string(), ctx.cfg.seed, ctx.hash);
    save_wiener_path(w, (ctx.out / "wiener.bin").string());

    const double resid = scheme_consistency_residual(p, model.op, model.graph, model.noise, w);
    ctx.note("scheme-consistency", resid <= 10.0 * scfg.newton_tol,
             "residual=" + std::to_string(resid));
    return ctx.finish("simulate");
}

int cmd_audit_ito(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    SolverConfig scfg = build_solver_config(ctx.cfg);
    GridFunction x0 = model.op.eigenvector(1);
    axpy(0.5, model.op.eigenvector(2), x0);

    const WienerPath coarse = sample_wiener_path(model.noise.k_modes(), ctx.cfg.steps,
                                                 ctx.cfg.T, ctx.cfg.seed);
    const auto report =
        energy_refinement_study(x0, coarse, scfg, model.op, model.graph, model.noise, 6);
    write_levels_csv(ctx, "ito_energy.csv", report.levels, report.fitted_order,
                     ctx.cfg.seed);
    ctx.note("ito-energy-order", report.fitted_order >= 0.4,
             "fitted_order=" + std::to_string(report.fitted_order));
    return ctx.finish("audit-ito");
}

int cmd_audit_continuity(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    SolverConfig scfg = build_solver_config(ctx.cfg);
    GridFunction x0 = model.op.eigenvector(2);

    const WienerPath coarse = sample_wiener_path(model.noise.k_modes(), ctx.cfg.steps,
                                                 ctx.cfg.T, ctx.cfg.seed);
    const auto report =
        continuity_study(x0, coarse, scfg, model.op, model.graph, model.noise, 5);
    write_levels_csv(ctx, "continuity.csv", report.levels, report.fitted_order,
                     ctx.cfg.seed);
    const double ratio = report.levels.front().value / report.levels.back().value;
    ctx.note("continuity-decrease", ratio >= 4.0 && report.strictly_decreasing,
             "coarse/fine=" + std::to_string(ratio) +
                 (report.strictly_decreasing ? " monotone" : " not monotone"));
    return ctx.finish("audit-continuity");
}

int cmd_audit_fenchel(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    const SolverConfig scfg = build_solver_config(ctx.cfg);
    const WienerPath w = sample_wiener_path(model.noise.k_modes(), ctx.cfg.steps, ctx.cfg.T,
                                            ctx.cfg.seed);
    GridFunction x0 = model.op.eigenvector(1);
    const SolutionPath p = solve_path(x0, w, scfg, model.op, model.graph, model.noise);
    const auto audit = fenchel_audit(p, model.graph, p.yosida_lambda);

    CsvWriter csv = ctx.make_csv("fenchel.csv");
    csv.header({"lambda", "displaced_gap", "regularization_defect"});
    csv.row({real_cell(p.yosida_lambda), real_cell(audit.displaced_gap),
             real_cell(audit.regularization_defect)});
    ctx.note("fenchel-gap", audit.displaced_gap <= 1e-8,
             "displaced_gap=" + std::to_string(audit.displaced_gap));
    return ctx.finish("audit-fenchel");
}

int cmd_moments(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    const SolverConfig scfg = build_solver_config(ctx.cfg);
    const auto report =
        moment_scan(ctx.cfg.p_list, ctx.cfg.scales, ctx.cfg.samples, model, scfg, ctx.cfg.T,
                    ctx.cfg.steps, ctx.cfg.seed);

    CsvWriter csv = ctx.make_csv("moments.csv");
    csv.header({"p", "scale", "input_norm", "output_norm", "fitted_c", "ci_lower",
                "ci_upper", "potential_lp"});
    for (const auto& c : report.cells)
        csv.row({real_cell(c.p), real_cell(c.scale), real_cell(c.input_norm),
                 real_cell(c.output_norm), real_cell(c.fitted_c),
                 real_cell(c.output_ci.lower), real_cell(c.output_ci.upper),
                 real_cell(c.potential_lp)});

    ctx.note("moment-scales-complete", report.failed_scales.empty(),
             std::to_string(report.failed_scales.size()) + " aborted scale levels");
    for (double p : ctx.cfg.p_list) {
        const double st = moment_stability(report, p, ctx.cfg.scales);
        ctx.note("moment-stability-p" + std::to_string(p), st <= 0.30,
                 "stability=" + std::to_string(st));
    }
    return ctx.finish("moments");
}

int cmd_lipschitz(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    const SolverConfig scfg = build_solver_config(ctx.cfg);
    std::vector<double> p_list = ctx.cfg.p_list;
    p_list.push_back(0.0); // metric version
    const auto report = lipschitz_scan(p_list, ctx.cfg.deltas, ctx.cfg.samples, model, scfg,
                                       ctx.cfg.T, ctx.cfg.steps, ctx.cfg.seed);

    CsvWriter csv = ctx.make_csv("lipschitz.csv");
    csv.header({"p", "delta", "input_norm", "output_norm", "ratio"});
    for (const auto& c : report.cells)
        csv.row({real_cell(c.p), real_cell(c.delta), real_cell(c.input_norm),
                 real_cell(c.output_norm), real_cell(c.ratio)});

    for (double p : p_list) {
        double first = 0.0, last = 0.0;
        for (const auto& c : report.cells) {
            if (c.p != p) continue;
            if (c.delta == ctx.cfg.deltas.front()) first = c.ratio;
            if (c.delta == ctx.cfg.deltas.back()) last = c.ratio;
        }
        ctx.note("lipschitz-bounded-p" + std::to_string(p), first <= 2.0 * last,
                 "ratio(" + std::to_string(ctx.cfg.deltas.front()) + ")=" +
                     std::to_string(first) + " ratio(" +
                     std::to_string(ctx.cfg.deltas.back()) + ")=" + std::to_string(last));
    }
    return ctx.finish("lipschitz");
}

int cmd_regularity(RunContext& ctx) {
    const SolverConfig scfg = build_solver_config(ctx.cfg);
    auto make_model = [&](int n) { return build_model_for_mesh(ctx.cfg, n); };
    const auto cells = regularity_study(make_model, ctx.cfg.mesh_sizes, ctx.cfg.samples,
                                        scfg, ctx.cfg.T, ctx.cfg.steps, ctx.cfg.seed);

    CsvWriter csv = ctx.make_csv("regularity.csv");
    csv.header({"n", "smooth_sup_v_sq", "smooth_int_au_sq", "rough_sup_v_sq",
                "rough_int_au_sq", "rough_x0_v_sq"});
    for (const auto& c : cells)
        csv.row({std::to_string(c.mesh_n), real_cell(c.smooth_sup_v_sq),
                 real_cell(c.smooth_int_au_sq), real_cell(c.rough_sup_v_sq),
                 real_cell(c.rough_int_au_sq), real_cell(c.rough_x0_v_sq)});

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool rough_monotone = true;
    for (size_t i = 0; i < cells.size(); ++i) {
        lo = std::min(lo, cells[i].smooth_int_au_sq);
        hi = std::max(hi, cells[i].smooth_int_au_sq);
        if (i > 0 && cells[i].rough_int_au_sq <= cells[i - 1].rough_int_au_sq)
            rough_monotone = false;
    }
    ctx.note("regularity-smooth-stable", (hi - lo) / lo <= 0.5,
             "spread=" + std::to_string((hi - lo) / lo));
    ctx.note("regularity-rough-grows", rough_monotone,
             rough_monotone ? "monotone" : "not monotone");
    return ctx.finish("regularity");
}

int cmd_invariant(RunContext& ctx) {
    const Model model = build_model(ctx.cfg);
    SolverConfig scfg = build_solver_config(ctx.cfg);
    const double burn = ctx.cfg.effective_burn_in();

    const GridFunction x0_a(model.mesh);
    const GridFunction x0_b = 2.0 * model.op.eigenvector(1);
    const auto run_a = ergodic_run(model, x0_a, ctx.cfg.t_long, burn, scfg, ctx.cfg.seed,
                                   ctx.cfg.fn_ladder);
    const auto run_b = ergodic_run(model, x0_b, ctx.cfg.t_long, burn, scfg,
                                   derive_seed(ctx.cfg.seed, 1), ctx.cfg.fn_ladder);

    CsvWriter csv = ctx.make_csv("invariant.csv");
    csv.header({"run", "quantity", "average", "drift", "ci_lower", "ci_upper"});
    auto dump = [&](const char* tag, const ErgodicReport& r) {
        for (const auto& q : r.quantities)
            csv.row({tag, q.name, real_cell(q.average), real_cell(q.drift),
                     real_cell(q.ci.lower), real_cell(q.ci.upper)});
        for (const auto& q : r.fn_averages)
            csv.row({tag, q.name, real_cell(q.average), real_cell(q.drift),
                     real_cell(q.ci.lower), real_cell(q.ci.upper)});
    };
    dump("a", run_a);
    dump("b", run_b);

    CsvWriter trace = ctx.make_csv("invariant_trace.csv");
    {
        std::vector<std::string> header{"t", "h_sq", "v_sq", "j_int", "jstar_int", "au_sq"};
        for (int nfn : ctx.cfg.fn_ladder) header.push_back("f_" + std::to_string(nfn));
        trace.header(header);
        for (size_t i = 0; i < run_a.trace_time.size(); ++i) {
            std::vector<std::string> row{real_cell(run_a.trace_time[i])};
            for (const auto& col : run_a.trace_values) row.push_back(real_cell(col[i]));
            trace.row(row);
        }
    }

    double worst_drift = 0.0;
    for (const auto& q : run_a.quantities) worst_drift = std::max(worst_drift, q.drift);
    ctx.note("invariant-stabilized", worst_drift < 0.05,
             "worst_drift=" + std::to_string(worst_drift));

    const auto& au = ergodic_quantity(run_a, "au_sq");
    bool monotone = true, bounded = true;
    for (size_t m = 0; m < run_a.fn_averages.size(); ++m) {
        if (m > 0 && run_a.fn_averages[m].average < run_a.fn_averages[m - 1].average - 1e-12)
            monotone = false;
        if (run_a.fn_averages[m].average > au.average + au.ci.half_width()) bounded = false;
    }
    ctx.note("invariant-fn-ladder", monotone && bounded,
             std::string(monotone ? "monotone" : "not-monotone") + " " +
                 (bounded ? "bounded" : "not-bounded"));

    const auto& ha = ergodic_quantity(run_a, "h_sq");
    const auto& hb = ergodic_quantity(run_b, "h_sq");
    const double gap = std::abs(ha.average - hb.average);
    const double ci = ha.ci.half_width() + hb.ci.half_width();
    ctx.note("invariant-mixing", gap <= ci,
             "gap=" + std::to_string(gap) + " combined_ci=" + std::to_string(ci));
    return ctx.finish("invariant");
}

int cmd_selftest(RunContext& ctx) {
    CheckScale scale = CheckScale::selftest();
    scale.seed = ctx.cfg.seed;
    scale.threads = 0;
    const auto results = run_all_checks(scale);

    CsvWriter csv = ctx.make_csv("selftest.csv");
    csv.header({"check", "pass", "seconds", "detail"});
    for (const auto& r : results) {
        csv.row({r.name, r.pass ? "1" : "0", real_cell(r.seconds), r.detail});
        ctx.note(r.name, r.pass, r.detail);
    }
    return ctx.finish("selftest");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"monotone-spde: simulation and audits for semilinear SPDEs with "
                 "maximal monotone drift"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_override;
    uint64_t seed_override = 0;
    bool seed_given = false;
    int threads = 0;

    app.add_option("--config", config_path, "plain-text config file (key=value sections)");
    app.add_option("--out", out_override, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed_override, "master seed (overrides config)");
    app.add_option("--threads", threads,
                   "worker threads (fallback: MONOTONE_SPDE_THREADS, then OpenMP default)");

    const std::vector<std::pair<std::string, int (*)(RunContext&)>> commands{
        {"simulate", cmd_simulate},       {"audit-ito", cmd_audit_ito},
        {"audit-continuity", cmd_audit_continuity}, {"audit-fenchel", cmd_audit_fenchel},
        {"moments", cmd_moments},         {"lipschitz", cmd_lipschitz},
        {"regularity", cmd_regularity},   {"invariant", cmd_invariant},
        {"selftest", cmd_selftest}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    seed_given = seed_opt->count() > 0;

    try {
        RunContext ctx;
        ctx.cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
        if (seed_given) ctx.cfg.seed = seed_override;
        if (!out_override.empty()) ctx.cfg.out_dir = out_override;
        ctx.hash = config_hash(ctx.cfg);
        ctx.out = ctx.cfg.out_dir;
        fs::create_directories(ctx.out);

#ifdef _OPENMP
        omp_set_num_threads(resolve_thread_count(threads));
#endif

        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) return fn(ctx);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
