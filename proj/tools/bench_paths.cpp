// Benchmark comparing the serial reference Monte Carlo driver with the
// OpenMP driver on a representative moment-scan workload, and verifying
// that both produce identical estimates.

#include "mspde/experiments.hpp"
#include "mspde/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace mspde;

namespace {

double run_once(const Model& model, const SolverConfig& cfg, int samples, bool parallel,
                double* out_norm) {
    const std::vector<double> p_list{2.0};
    const std::vector<double> scales{4.0};
    const auto t0 = std::chrono::steady_clock::now();
    const auto report =
        moment_scan(p_list, scales, samples, model, cfg, 1.0, 128, 99991ULL, parallel);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out_norm = report.cells.front().output_norm;
    return dt;
}

} // namespace

int main(int argc, char** argv) {
    // the moment scan requires at least 50 paths
    const int samples = std::max(argc > 1 ? std::atoi(argv[1]) : 64, 50);

    Model model;
    model.mesh = Mesh(63);
    model.graph = MonotoneGraph::power_law(3.0);
    model.op = EllipticOperator::dirichlet_laplacian(model.mesh);
    model.noise = DiffusionCoefficient(NoiseKind::DiagonalLinear, model.mesh, 16, 1.0,
                                       0.25, 1.0);
    SolverConfig cfg;
    cfg.h_time = 1.0 / 128;

    double serial_norm = 0.0, parallel_norm = 0.0;
    const double t_serial = run_once(model, cfg, samples, false, &serial_norm);
    const double t_parallel = run_once(model, cfg, samples, true, &parallel_norm);

    std::printf("paths              : %d\n", samples);
    std::printf("threads            : %d\n", resolve_thread_count(0));
    std::printf("serial reference   : %8.3f s\n", t_serial);
    std::printf("openmp             : %8.3f s\n", t_parallel);
    std::printf("speedup            : %8.2fx\n", t_serial / t_parallel);
    std::printf("identical estimate : %s (%.17g vs %.17g)\n",
                serial_norm == parallel_norm ? "yes" : "NO", serial_norm, parallel_norm);
    return serial_norm == parallel_norm ? 0 : 1;
}
