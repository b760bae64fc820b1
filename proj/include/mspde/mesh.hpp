#pragma once

#include "mspde/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace mspde {

/// Uniform mesh of interior nodes of the unit interval (0,1).
/// n interior nodes at x_i = i*h, i = 1..n, with spacing h = 1/(n+1).
struct Mesh {
    int n = 0;

    Mesh() = default;
    explicit Mesh(int interior_nodes) : n(interior_nodes) {
        if (n < 2) throw ConfigError("Mesh: need at least 2 interior nodes");
    }

    double h() const { return 1.0 / (n + 1); }
    double node(int i) const { return (i + 1) * h(); } // i = 0..n-1

    friend bool operator==(const Mesh& a, const Mesh& b) { return a.n == b.n; }
};

/// Real-valued function on the interior nodes of a Mesh. One container,
/// three norms (H, V, V') — the V norms live with the elliptic operator.
struct GridFunction {
    Mesh mesh;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(Mesh m) : mesh(m), values(static_cast<size_t>(m.n), 0.0) {}
    GridFunction(Mesh m, std::vector<double> v) : mesh(m), values(std::move(v)) {
        if (static_cast<int>(values.size()) != mesh.n)
            throw MeshMismatch("GridFunction: value count does not match mesh");
    }

    int size() const { return mesh.n; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

inline void require_same_mesh(const GridFunction& u, const GridFunction& v) {
    if (!(u.mesh == v.mesh)) throw MeshMismatch("grid functions on different meshes");
}

/// Quadrature L2 pairing: h * sum_i u_i v_i. Extended-precision
/// accumulation keeps the operator symmetry and contraction audits below
/// their 1e-12 tolerances on fine meshes.
inline double h_inner(const GridFunction& u, const GridFunction& v) {
    require_same_mesh(u, v);
    long double s = 0.0L;
    for (int i = 0; i < u.size(); ++i)
        s += static_cast<long double>(u[i]) * static_cast<long double>(v[i]);
    return static_cast<double>(static_cast<long double>(u.mesh.h()) * s);
}

inline double h_norm_sq(const GridFunction& u) {
    long double s = 0.0L;
    for (double x : u.values) s += static_cast<long double>(x) * static_cast<long double>(x);
    return static_cast<double>(static_cast<long double>(u.mesh.h()) * s);
}

inline double h_norm(const GridFunction& u) { return std::sqrt(h_norm_sq(u)); }

inline GridFunction operator+(const GridFunction& u, const GridFunction& v) {
    require_same_mesh(u, v);
    GridFunction w = u;
    for (int i = 0; i < w.size(); ++i) w[i] += v[i];
    return w;
}

inline GridFunction operator-(const GridFunction& u, const GridFunction& v) {
    require_same_mesh(u, v);
    GridFunction w = u;
    for (int i = 0; i < w.size(); ++i) w[i] -= v[i];
    return w;
}

inline GridFunction operator*(double a, const GridFunction& u) {
    GridFunction w = u;
    for (double& x : w.values) x *= a;
    return w;
}

/// w += a*u
inline void axpy(double a, const GridFunction& u, GridFunction& w) {
    require_same_mesh(u, w);
    for (int i = 0; i < w.size(); ++i) w[i] += a * u[i];
}

/// H-ball truncation: identity inside the ball of radius R, radial
/// projection outside.
inline GridFunction truncate_to_ball(const GridFunction& x, double radius) {
    const double nx = h_norm(x);
    if (nx <= radius) return x;
    return (radius / nx) * x;
}

} // namespace mspde
