#pragma once

#include "mspde/experiments.hpp"
#include "mspde/solver.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mspde {

/// Runner configuration parsed from a plain-text key=value file with
/// [section] headers. Unknown keys are rejected. The defaults below are
/// the shipped "default config".
struct RunConfig {
    // [model]
    std::string graph_id = "power:3";
    int mesh_n = 63;
    std::string noise_kind = "diagonal";
    int k_modes = 16;
    double noise_decay = 1.0;
    double noise_scale = 0.25;
    double noise_offset = 1.0;
    double operator_scale = 1.0;

    // [solver]
    double T = 1.0;
    int steps = 256;
    double yosida_lambda = 0.0; // 0 = tie to the time step
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    std::string truncation = "none"; // none | fixed:R | adaptive:n0,nmax

    // [experiment]
    std::vector<double> p_list{0.5, 1.0, 2.0, 4.0};
    std::vector<double> scales{8.0, 16.0, 32.0};
    std::vector<double> deltas{1e-3, 1e-2, 1e-1, 1.0};
    std::vector<int> mesh_sizes{50, 100, 200};
    std::vector<int> fn_ladder{1, 2, 4, 8, 16};
    int samples = 200;
    double t_long = 100.0;
    double burn_in = -1.0; // negative = default 20% of t_long

    // [run]
    uint64_t seed = 20240801ULL;
    std::string out_dir = "out";

    double effective_burn_in() const { return burn_in < 0.0 ? 0.2 * t_long : burn_in; }
};

/// Parse a config file. Throws ConfigError naming the offending key on
/// unknown keys, malformed values, or unreadable files.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Canonical key=value rendering (stable order) used for hashing and the
/// run manifest.
std::string canonical_config(const RunConfig& cfg, bool include_run_section = true);

/// FNV-1a hash of the canonical model/solver/experiment sections, as 16
/// hex digits. Seed and output directory are deliberately excluded.
std::string config_hash(const RunConfig& cfg);

/// Assemble the concrete model and solver settings for this config.
Model build_model(const RunConfig& cfg);
Model build_model_for_mesh(const RunConfig& cfg, int mesh_n);
SolverConfig build_solver_config(const RunConfig& cfg);

} // namespace mspde
