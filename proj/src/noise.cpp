#include "mspde/noise.hpp"

#include "mspde/errors.hpp"
#include "mspde/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace mspde {

WienerPath sample_wiener_path(int k_modes, int steps, double T, uint64_t seed) {
    if (steps < 1) throw ConfigError("wiener path needs steps >= 1");
    if (T <= 0.0) throw ConfigError("wiener path needs T > 0");
    if (k_modes < 0) throw ConfigError("wiener path needs k_modes >= 0");
    WienerPath w;
    w.k_modes = k_modes;
    w.steps = steps;
    w.T = T;
    w.seed = seed;
    w.increments.resize(static_cast<size_t>(steps) * k_modes);
    const double sd = std::sqrt(T / steps);
    Rng rng(derive_seed(seed, 0));
    for (double& x : w.increments) x = draw_normal(rng, sd);
    return w;
}

WienerPath refine_path(const WienerPath& w) {
    WienerPath fine;
    fine.k_modes = w.k_modes;
    fine.steps = 2 * w.steps;
    fine.T = w.T;
    fine.seed = w.seed;
    fine.refine_level = w.refine_level + 1;
    fine.increments.resize(static_cast<size_t>(fine.steps) * fine.k_modes);
    // Bridge midpoint: conditionally on the coarse increment D over a step
    // of length h, the first half-increment is D/2 + N(0, h/4) and the
    // second is its complement. Pair sums then reproduce D up to one ulp
    // of the larger half; a bitwise-exact complement is not representable
    // once the bridge draw dwarfs the increment.
    //
    // The bridge stream is keyed on the step count, which doubles per
    // level, so repeated refinement stays independent even for a path that
    // went through the binary round trip (the file header cannot carry the
    // refinement depth).
    const double sd = 0.5 * std::sqrt(w.h_time());
    Rng rng(derive_seed(w.seed, 0x9e370001ULL + static_cast<uint64_t>(w.steps)));
    for (int s = 0; s < w.steps; ++s) {
        for (int k = 0; k < w.k_modes; ++k) {
            const double coarse = w.inc(s, k);
            const double first = 0.5 * coarse + draw_normal(rng, sd);
            fine.increments[static_cast<size_t>(2 * s) * fine.k_modes + k] = first;
            fine.increments[static_cast<size_t>(2 * s + 1) * fine.k_modes + k] = coarse - first;
        }
    }
    return fine;
}

void save_wiener_path(const WienerPath& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    const int64_t k = w.k_modes, s = w.steps;
    out.write(reinterpret_cast<const char*>(&k), sizeof(k));
    out.write(reinterpret_cast<const char*>(&s), sizeof(s));
    out.write(reinterpret_cast<const char*>(&w.T), sizeof(w.T));
    out.write(reinterpret_cast<const char*>(&w.seed), sizeof(w.seed));
    out.write(reinterpret_cast<const char*>(w.increments.data()),
              static_cast<std::streamsize>(w.increments.size() * sizeof(double)));
}

WienerPath load_wiener_path(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    int64_t k = 0, s = 0;
    WienerPath w;
    in.read(reinterpret_cast<char*>(&k), sizeof(k));
    in.read(reinterpret_cast<char*>(&s), sizeof(s));
    in.read(reinterpret_cast<char*>(&w.T), sizeof(w.T));
    in.read(reinterpret_cast<char*>(&w.seed), sizeof(w.seed));
    if (!in || k < 0 || s < 1) throw ConfigError("corrupt wiener path file " + path);
    w.k_modes = static_cast<int>(k);
    w.steps = static_cast<int>(s);
    w.increments.resize(static_cast<size_t>(w.steps) * w.k_modes);
    in.read(reinterpret_cast<char*>(w.increments.data()),
            static_cast<std::streamsize>(w.increments.size() * sizeof(double)));
    if (!in) throw ConfigError("corrupt wiener path file " + path);
    return w;
}

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "none") return NoiseKind::None;
    if (name == "additive") return NoiseKind::Additive;
    if (name == "diagonal") return NoiseKind::DiagonalLinear;
    if (name == "loclip") return NoiseKind::LocallyLipschitz;
    if (name == "vdiagonal") return NoiseKind::DiagonalLinearV;
    throw ConfigError("unknown noise kind: " + name);
}

std::string noise_kind_name(NoiseKind k) {
    switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Additive: return "additive";
    case NoiseKind::DiagonalLinear: return "diagonal";
    case NoiseKind::LocallyLipschitz: return "loclip";
    case NoiseKind::DiagonalLinearV: return "vdiagonal";
    }
    return "?";
}

DiffusionCoefficient::DiffusionCoefficient(NoiseKind kind, Mesh mesh, int k_modes,
                                           double decay, double scale, double offset)
    : kind_(kind), mesh_(mesh), k_modes_(kind == NoiseKind::None ? 0 : k_modes),
      decay_(decay), scale_(scale), offset_(offset) {
    if (k_modes_ < 0 || k_modes_ > mesh.n)
        throw ConfigError("k_modes must lie in [0, mesh n]");
    if (decay_ <= 0.5 && kind_ != NoiseKind::None)
        throw ConfigError("mode decay must exceed 1/2 for a Hilbert-Schmidt limit");
    modes_.reserve(static_cast<size_t>(k_modes_));
    const double h = mesh_.h();
    for (int k = 1; k <= k_modes_; ++k) {
        GridFunction e(mesh_);
        for (int i = 0; i < mesh_.n; ++i)
            e[i] = std::sqrt(2.0) * std::sin(k * std::numbers::pi * (i + 1) * h);
        modes_.push_back(std::move(e));
        const double wk = mode_weight(k);
        weight_sq_sum_ += wk * wk;
    }
}

double DiffusionCoefficient::mode_weight(int k) const {
    const double g = kind_ == NoiseKind::DiagonalLinearV ? decay_ + 1.0 : decay_;
    return std::pow(static_cast<double>(k), -g);
}

double DiffusionCoefficient::state_factor(const GridFunction& x, int k) const {
    switch (kind_) {
    case NoiseKind::Additive: return scale_;
    case NoiseKind::DiagonalLinear:
    case NoiseKind::DiagonalLinearV:
        return scale_ * (h_inner(x, mode(k)) + offset_);
    case NoiseKind::LocallyLipschitz: {
        const double r = h_norm(x);
        return scale_ * r * std::cos(r) + offset_;
    }
    default: return 0.0;
    }
}

GridFunction DiffusionCoefficient::apply(double /*t*/, const GridFunction& x,
                                         std::span<const double> dw) const {
    if (!(x.mesh == mesh_)) throw MeshMismatch("diffusion/grid mesh mismatch");
    if (static_cast<int>(dw.size()) != k_modes_)
        throw DimensionMismatch("increment count does not match mode count");
    GridFunction out(mesh_);
    for (int k = 1; k <= k_modes_; ++k) {
        const double amp = mode_weight(k) * state_factor(x, k) * dw[static_cast<size_t>(k - 1)];
        if (amp != 0.0) axpy(amp, mode(k), out);
    }
    return out;
}

double DiffusionCoefficient::hs_norm_sq(double /*t*/, const GridFunction& x) const {
    if (!(x.mesh == mesh_)) throw MeshMismatch("diffusion/grid mesh mismatch");
    double s = 0.0;
    for (int k = 1; k <= k_modes_; ++k) {
        const double a = mode_weight(k) * state_factor(x, k);
        s += a * a; // modes are H-normalized
    }
    return s;
}

double DiffusionCoefficient::growth_constant() const {
    const double root = std::sqrt(weight_sq_sum_);
    switch (kind_) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::Additive: return scale_ * root;
    case NoiseKind::DiagonalLinear:
    case NoiseKind::DiagonalLinearV:
        // |B(x)|_HS <= scale (|offset| root + |x|)
        return scale_ * std::max(std::abs(offset_) * root, 1.0);
    case NoiseKind::LocallyLipschitz:
        // |scale r cos r + offset| <= scale r + |offset|
        return std::max(scale_, std::abs(offset_)) * std::max(root, 1.0);
    }
    return 0.0;
}

std::optional<double> DiffusionCoefficient::lipschitz_constant() const {
    switch (kind_) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::Additive: return 0.0;
    case NoiseKind::DiagonalLinear:
    case NoiseKind::DiagonalLinearV:
        return scale_; // sum_k w_k^2 (x_k - y_k)^2 <= |x - y|^2
    case NoiseKind::LocallyLipschitz: return std::nullopt;
    }
    return std::nullopt;
}

double DiffusionCoefficient::lipschitz_on_ball(double radius) const {
    if (auto global = lipschitz_constant()) return *global;
    // derivative of r cos r is bounded by 1 + r on [0, R]
    return scale_ * std::sqrt(weight_sq_sum_) * (1.0 + radius);
}

} // namespace mspde
