#include "mspde/elliptic.hpp"

#include "mspde/rng.hpp"
#include "mspde/tridiag.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mspde {

EllipticOperator EllipticOperator::dirichlet_laplacian(Mesh mesh, double scale) {
    if (scale < 0.0) throw ConfigError("operator scale must be >= 0");
    return {mesh, scale};
}

GridFunction EllipticOperator::apply(const GridFunction& u) const {
    if (!(u.mesh == mesh_)) throw MeshMismatch("operator/grid mesh mismatch");
    GridFunction out(mesh_);
    if (scale_ == 0.0) return out;
    const int n = mesh_.n;
    const double w = scale_ / (mesh_.h() * mesh_.h());
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = w * (2.0 * u[i] - left - right);
    }
    return out;
}

double EllipticOperator::dirichlet_form(const GridFunction& u, const GridFunction& v) const {
    return h_inner(apply(u), v);
}

double EllipticOperator::v_norm_sq(const GridFunction& u) const {
    if (!(u.mesh == mesh_)) throw MeshMismatch("operator/grid mesh mismatch");
    if (scale_ == 0.0) return 0.0;
    // Dirichlet energy via first differences; equals <Au,u> with the
    // homogeneous boundary values made explicit.
    const int n = mesh_.n;
    double s = u[0] * u[0] + u[n - 1] * u[n - 1];
    for (int i = 0; i + 1 < n; ++i) {
        const double d = u[i + 1] - u[i];
        s += d * d;
    }
    return scale_ * s / mesh_.h();
}

double EllipticOperator::v_norm(const GridFunction& u) const { return std::sqrt(v_norm_sq(u)); }

GridFunction EllipticOperator::resolvent(double delta, const GridFunction& f) const {
    if (delta <= 0.0) throw ConfigError("resolvent needs delta > 0");
    if (!(f.mesh == mesh_)) throw MeshMismatch("operator/grid mesh mismatch");
    if (scale_ == 0.0) return f;
    const int n = mesh_.n;
    const double w = delta * scale_ / (mesh_.h() * mesh_.h());
    std::vector<double> diag(static_cast<size_t>(n), 1.0 + 2.0 * w);
    GridFunction out(mesh_);
    std::vector<double> work;
    solve_tridiag_const_off(diag, -w, f.values, out.values, work);
    return out;
}

GridFunction EllipticOperator::solve(const GridFunction& f) const {
    if (scale_ == 0.0) throw ConfigError("zero operator is not invertible");
    if (!(f.mesh == mesh_)) throw MeshMismatch("operator/grid mesh mismatch");
    const int n = mesh_.n;
    const double w = scale_ / (mesh_.h() * mesh_.h());
    std::vector<double> diag(static_cast<size_t>(n), 2.0 * w);
    GridFunction out(mesh_);
    std::vector<double> work;
    solve_tridiag_const_off(diag, -w, f.values, out.values, work);
    return out;
}

double EllipticOperator::v_dual_norm(const GridFunction& f) const {
    return std::sqrt(h_inner(solve(f), f));
}

GridFunction EllipticOperator::yosida_apply(double lambda, const GridFunction& u) const {
    GridFunction out = u - resolvent(lambda, u);
    for (double& x : out.values) x /= lambda;
    return out;
}

CoercivityReport EllipticOperator::check_coercivity(int probes, uint64_t seed) const {
    if (scale_ == 0.0) return {0.0, 0.0};
    Rng rng(seed);
    double cmin = std::numeric_limits<double>::infinity();
    GridFunction u(mesh_);
    for (int p = 0; p < probes; ++p) {
        for (double& x : u.values) x = draw_uniform(rng, -1.0, 1.0);
        const double form = dirichlet_form(u, u);
        const double vsq = v_norm_sq(u);
        if (vsq > 0.0) cmin = std::min(cmin, form / vsq);
    }

    // Poincare constant by inverse power iteration on A.
    GridFunction v(mesh_);
    for (double& x : v.values) x = draw_uniform(rng, 0.1, 1.0);
    double lam = 0.0;
    for (int it = 0; it < 200; ++it) {
        GridFunction w = solve(v);
        const double nw = h_norm(w);
        for (double& x : w.values) x /= nw;
        const double next = dirichlet_form(w, w) / h_norm_sq(w);
        const bool done = std::abs(next - lam) <= 1e-12 * std::max(1.0, next);
        lam = next;
        v = w;
        if (done) break;
    }
    return {cmin, lam};
}

GridFunction EllipticOperator::eigenvector(int k) const {
    GridFunction e(mesh_);
    const double h = mesh_.h();
    const double norm = std::sqrt(2.0); // |sqrt(2) sin(k pi x)|_h = 1 for k <= n
    for (int i = 0; i < mesh_.n; ++i)
        e[i] = norm * std::sin(k * std::numbers::pi * (i + 1) * h);
    return e;
}

double EllipticOperator::eigenvalue(int k) const {
    const double h = mesh_.h();
    const double s = std::sin(0.5 * k * std::numbers::pi * h);
    return scale_ * 4.0 / (h * h) * s * s;
}

} // namespace mspde
