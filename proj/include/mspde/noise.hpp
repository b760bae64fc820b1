#pragma once

#include "mspde/mesh.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mspde {

/// K-mode truncation of a cylindrical Wiener path on a uniform time grid
/// over [0, T]. Increments are N(0, h_time) per mode, reproducible from
/// the seed; refinement inserts Brownian-bridge midpoints so a trajectory
/// can be reused across time resolutions.
struct WienerPath {
    int k_modes = 0;
    int steps = 0;
    double T = 0.0;
    uint64_t seed = 0;
    int refine_level = 0;
    std::vector<double> increments; // steps x k_modes, row-major

    double h_time() const { return T / steps; }
    double inc(int step, int mode) const {
        return increments[static_cast<size_t>(step) * k_modes + mode];
    }
    std::span<const double> step_increments(int step) const {
        return {increments.data() + static_cast<size_t>(step) * k_modes,
                static_cast<size_t>(k_modes)};
    }
};

WienerPath sample_wiener_path(int k_modes, int steps, double T, uint64_t seed);

/// Halve the time step by bridge midpoint insertion; coarse sums of the
/// refined increments reproduce the original increments to within one ulp
/// of the larger half.
WienerPath refine_path(const WienerPath& w);

/// Binary round-trip: header (k_modes, steps, T, seed as 64-bit fields)
/// followed by row-major little-endian f64 increments.
void save_wiener_path(const WienerPath& w, const std::string& path);
WienerPath load_wiener_path(const std::string& path);

enum class NoiseKind { None, Additive, DiagonalLinear, LocallyLipschitz, DiagonalLinearV };

NoiseKind parse_noise_kind(const std::string& name);
std::string noise_kind_name(NoiseKind k);

/// Diffusion coefficient B mapping the K coordinate modes of U onto the
/// first K discrete sine eigenvectors. All members grow at most linearly
/// in the state:
///
///   Additive         B(x) e_k = scale k^-gamma e_k          (B1, constant)
///   DiagonalLinear   B(x) e_k = scale k^-gamma (<x,e_k> + offset) e_k  (B1)
///   LocallyLipschitz B(x) e_k = (scale |x| cos|x| + offset) k^-gamma e_k
///                    — linear growth but no global Lipschitz constant (B2)
///   DiagonalLinearV  DiagonalLinear with decay gamma+1, Hilbert-Schmidt
///                    into V (regularity studies)
class DiffusionCoefficient {
public:
    DiffusionCoefficient() = default;
    DiffusionCoefficient(NoiseKind kind, Mesh mesh, int k_modes, double decay,
                         double scale, double offset);

    NoiseKind kind() const { return kind_; }
    int k_modes() const { return k_modes_; }
    double decay() const { return decay_; }
    const Mesh& mesh() const { return mesh_; }
    bool is_zero() const { return kind_ == NoiseKind::None || k_modes_ == 0; }

    /// B(t, x) dw as a grid function.
    GridFunction apply(double t, const GridFunction& x, std::span<const double> dw) const;

    /// Hilbert-Schmidt norm squared: sum_k |B(t,x) e_k|^2.
    double hs_norm_sq(double t, const GridFunction& x) const;

    /// N with |B(t,x)|_HS <= N (1 + |x|).
    double growth_constant() const;

    /// Global Lipschitz constant for (B1) members; empty for the (B2)-only
    /// member.
    std::optional<double> lipschitz_constant() const;

    /// N_R: Lipschitz constant on the H-ball of radius R (affine in R for
    /// the (B2) member).
    double lipschitz_on_ball(double radius) const;

    /// k-th sine mode, normalized in H (k = 1..K).
    const GridFunction& mode(int k) const { return modes_[static_cast<size_t>(k - 1)]; }

private:
    double mode_weight(int k) const; // scale factor k^-decay (or k^-(decay+1))
    double state_factor(const GridFunction& x, int k) const;

    NoiseKind kind_ = NoiseKind::None;
    Mesh mesh_;
    int k_modes_ = 0;
    double decay_ = 1.0;
    double scale_ = 1.0;
    double offset_ = 1.0;
    std::vector<GridFunction> modes_;
    double weight_sq_sum_ = 0.0; // sum_k mode_weight(k)^2
};

/// sigma_R followed by the base coefficient: agrees with the base on the
/// ball of radius R and is globally Lipschitz with constant N_R.
class TruncatedDiffusion {
public:
    TruncatedDiffusion(const DiffusionCoefficient& base, double radius)
        : base_(&base), radius_(radius) {}

    double radius() const { return radius_; }
    const DiffusionCoefficient& base() const { return *base_; }

    GridFunction apply(double t, const GridFunction& x, std::span<const double> dw) const {
        return base_->apply(t, truncate_to_ball(x, radius_), dw);
    }
    double hs_norm_sq(double t, const GridFunction& x) const {
        return base_->hs_norm_sq(t, truncate_to_ball(x, radius_));
    }
    double lipschitz_constant() const { return base_->lipschitz_on_ball(radius_); }

private:
    const DiffusionCoefficient* base_;
    double radius_;
};

} // namespace mspde
