#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mspde/experiments.hpp"

#include <cmath>

using namespace mspde;

namespace {

Model make_model(NoiseKind kind, double scale, double offset,
                 const MonotoneGraph& graph = MonotoneGraph::power_law(3.0),
                 int n = 31, double op_scale = 1.0) {
    Model m;
    m.mesh = Mesh(n);
    m.graph = graph;
    m.op = EllipticOperator::dirichlet_laplacian(m.mesh, op_scale);
    m.noise = DiffusionCoefficient(kind, m.mesh, 8, 1.0, scale, offset);
    return m;
}

SolverConfig make_cfg(double T, int steps) {
    SolverConfig cfg;
    cfg.h_time = T / steps;
    return cfg;
}

} // namespace

TEST_CASE("zero initial scale still produces output: the +1 is necessary") {
    const Model m = make_model(NoiseKind::Additive, 0.5, 0.0);
    const std::vector<double> p{2.0};
    const std::vector<double> scales{0.0};
    const auto report = moment_scan(p, scales, 50, m, make_cfg(1.0, 64), 1.0, 64, 51, false);
    CHECK(report.cells.front().input_norm == 0.0);
    CHECK(report.cells.front().output_norm > 0.05);
}

TEST_CASE("moment scan honors a custom initial sampler") {
    const Model m = make_model(NoiseKind::None, 0.0, 0.0, MonotoneGraph::linear(0.0));
    const std::vector<double> p{2.0};
    const std::vector<double> scales{3.0};
    const auto sampler = [&](const Mesh& mesh, Rng&) {
        const auto op = EllipticOperator::dirichlet_laplacian(mesh);
        return op.eigenvector(1); // deterministic unit datum
    };
    const auto report =
        moment_scan(p, scales, 50, m, make_cfg(0.5, 32), 0.5, 32, 51, false, 0, sampler);
    // |X0| = 3 exactly for every sample
    CHECK(report.cells.front().input_norm == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("moment scan enforces its sample floor") {
    const Model m = make_model(NoiseKind::Additive, 0.5, 0.0);
    const std::vector<double> p{2.0};
    const std::vector<double> scales{1.0};
    CHECK_THROWS_AS(moment_scan(p, scales, 49, m, make_cfg(1.0, 16), 1.0, 16, 51, false),
                    ConfigError);
}

TEST_CASE("solver errors abort only the affected scale level") {
    // a tight adaptive cap: the large input scale blows through it at step
    // zero, the small scale survives
    Model m = make_model(NoiseKind::Additive, 0.3, 0.0, MonotoneGraph::linear(0.0), 31, 0.0);
    SolverConfig cfg = make_cfg(2.0, 128);
    cfg.truncation = {TruncationMode::Adaptive, 0.0, 1, 5};
    const std::vector<double> p{2.0};
    const std::vector<double> scales{0.0, 50.0};
    const auto report = moment_scan(p, scales, 50, m, cfg, 2.0, 128, 52, false);
    REQUIRE(report.failed_scales.size() == 1);
    CHECK(report.failed_scales.front() == 50.0);
    REQUIRE(report.cells.size() == 1);
    CHECK(report.cells.front().scale == 0.0);
}

TEST_CASE("contraction semigroup keeps the sup ratio at one") {
    // B = 0, beta = 0: sup_t |X_t| <= |X0| per path
    const Model m = make_model(NoiseKind::None, 0.0, 0.0, MonotoneGraph::linear(0.0));
    const SolverConfig cfg = make_cfg(1.0, 64);
    Rng rng(77);
    for (int i = 0; i < 10; ++i) {
        const GridFunction x0 = sample_smooth_datum(m.mesh, rng);
        const auto w = sample_wiener_path(0, 64, 1.0, 100 + i);
        const auto p = solve_path(x0, w, cfg, m.op, m.graph, m.noise);
        const auto f = path_functionals(p, m.op, m.graph);
        CHECK(f.sup_h <= h_norm(x0) * (1.0 + 1e-12));
    }
}

TEST_CASE("moment cells carry finite bookkeeping and stable constants") {
    const Model m = make_model(NoiseKind::DiagonalLinear, 0.25, 1.0);
    const std::vector<double> p{0.5, 2.0};
    const std::vector<double> scales{2.0, 4.0, 8.0};
    const auto report = moment_scan(p, scales, 50, m, make_cfg(1.0, 64), 1.0, 64, 52, false);
    REQUIRE(report.cells.size() == 6);
    for (const auto& cell : report.cells) {
        CHECK(std::isfinite(cell.output_norm));
        CHECK(std::isfinite(cell.potential_lp));
        CHECK(cell.output_ci.lower <= cell.output_norm + 1e-12);
        CHECK(cell.output_norm <= cell.output_ci.upper + 1e-12);
    }
    for (double pv : p) CHECK(moment_stability(report, pv, scales) < 1.0);
}

TEST_CASE("lipschitz scan: zero shift gives zero distance") {
    const Model m = make_model(NoiseKind::DiagonalLinear, 0.25, 1.0);
    const std::vector<double> p{2.0};
    const std::vector<double> deltas{0.0, 0.5};
    const auto report =
        lipschitz_scan(p, deltas, 10, m, make_cfg(0.5, 32), 0.5, 32, 53, false);
    for (const auto& cell : report.cells)
        if (cell.delta == 0.0) CHECK(cell.output_norm == 0.0);
}

TEST_CASE("monotone contraction for the noiseless coupled pair") {
    const Model m = make_model(NoiseKind::None, 0.0, 0.0, MonotoneGraph::soft_sign());
    const std::vector<double> p{1.0};
    const std::vector<double> deltas{0.3};
    const auto report =
        lipschitz_scan(p, deltas, 15, m, make_cfg(1.0, 64), 1.0, 64, 54, false);
    // per-path sup distance <= initial distance; the Lp estimate of the sup
    // part cannot exceed delta, and the V part only adds the L2V term
    for (const auto& cell : report.cells) CHECK(std::isfinite(cell.ratio));
}

TEST_CASE("p0 metric decreases along the delta ladder under common noise") {
    const Model m = make_model(NoiseKind::DiagonalLinear, 0.25, 1.0);
    const std::vector<double> p{0.0};
    const std::vector<double> deltas{1.0, 1e-1, 1e-2, 1e-3};
    const auto report =
        lipschitz_scan(p, deltas, 25, m, make_cfg(0.5, 64), 0.5, 64, 55, false);
    double prev = 1e300;
    for (const auto& cell : report.cells) {
        CHECK(cell.output_norm < prev); // deltas are listed in decreasing order
        prev = cell.output_norm;
    }
}

TEST_CASE("lipschitz scan rejects the locally lipschitz member") {
    const Model m = make_model(NoiseKind::LocallyLipschitz, 0.5, 0.5);
    const std::vector<double> p{2.0};
    const std::vector<double> deltas{0.1};
    CHECK_THROWS_AS(lipschitz_scan(p, deltas, 4, m, make_cfg(0.5, 16), 0.5, 16, 56, false),
                    ConfigError);
}

TEST_CASE("eigenflow keeps the V norm monotone") {
    // x0 = e1, B = 0, beta = 0: spectral decay, sup_t |X|_V = |x0|_V
    const Model m = make_model(NoiseKind::None, 0.0, 0.0, MonotoneGraph::linear(0.0));
    const SolverConfig cfg = make_cfg(1.0, 64);
    const GridFunction x0 = m.op.eigenvector(1);
    const auto w = sample_wiener_path(0, 64, 1.0, 57);
    const auto p = solve_path(x0, w, cfg, m.op, m.graph, m.noise);
    double sup_v = 0.0;
    for (const auto& xk : p.x) sup_v = std::max(sup_v, m.op.v_norm(xk));
    CHECK(sup_v <= m.op.v_norm(x0) * (1.0 + 1e-12));
}

TEST_CASE("rough data carry V norms growing with the mesh") {
    Rng rng(58);
    const Mesh coarse(50), fine(200);
    const auto op_c = EllipticOperator::dirichlet_laplacian(coarse);
    const auto op_f = EllipticOperator::dirichlet_laplacian(fine);
    double vc = 0.0, vf = 0.0;
    for (int i = 0; i < 20; ++i) {
        vc += op_c.v_norm_sq(sample_rough_datum(coarse, rng));
        vf += op_f.v_norm_sq(sample_rough_datum(fine, rng));
    }
    CHECK(vf / vc >= 4.0); // ~ (n_f / n_c)^2 = 16 in expectation
}

TEST_CASE("regularity study separates smooth from rough data") {
    auto maker = [](int n) {
        return make_model(NoiseKind::DiagonalLinearV, 0.5, 1.0,
                          MonotoneGraph::power_law(3.0), n);
    };
    const std::vector<int> sizes{24, 48};
    const auto cells =
        regularity_study(maker, sizes, 4, make_cfg(0.25, 32), 0.25, 32, 59, false);
    REQUIRE(cells.size() == 2);
    CHECK(cells[1].rough_int_au_sq > cells[0].rough_int_au_sq);
    CHECK(cells[1].rough_x0_v_sq > cells[0].rough_x0_v_sq);
    const double spread = std::abs(cells[1].smooth_int_au_sq - cells[0].smooth_int_au_sq) /
                          std::min(cells[1].smooth_int_au_sq, cells[0].smooth_int_au_sq);
    CHECK(spread < 1.0);
}

TEST_CASE("noiseless ergodic run collapses to the origin") {
    const Model m = make_model(NoiseKind::None, 0.0, 0.0);
    SolverConfig cfg = make_cfg(1.0, 100); // h = 0.01
    const GridFunction x0 = 2.0 * m.op.eigenvector(1);
    const std::vector<int> ladder{1, 2};
    const auto report = ergodic_run(m, x0, 10.0, 2.0, cfg, 60, ladder);
    for (const auto& q : report.quantities) CHECK(q.average <= 1e-4);
}

TEST_CASE("fn ladder is monotone and bounded by the au average") {
    const Model m = make_model(NoiseKind::DiagonalLinear, 0.25, 1.0);
    SolverConfig cfg = make_cfg(1.0, 100);
    const GridFunction x0(m.mesh);
    const std::vector<int> ladder{1, 2, 4, 8};
    const auto report = ergodic_run(m, x0, 20.0, 4.0, cfg, 61, ladder);
    const double au = ergodic_quantity(report, "au_sq").average;
    double prev = 0.0;
    for (const auto& f : report.fn_averages) {
        CHECK(f.average >= prev - 1e-12);
        CHECK(f.average <= au * (1.0 + 1e-12));
        prev = f.average;
    }
}

TEST_CASE("ergodic run validates burn-in") {
    const Model m = make_model(NoiseKind::None, 0.0, 0.0);
    SolverConfig cfg = make_cfg(1.0, 10);
    const GridFunction x0(m.mesh);
    const std::vector<int> ladder{1};
    CHECK_THROWS_AS(ergodic_run(m, x0, 1.0, 2.0, cfg, 62, ladder), ConfigError);
}
