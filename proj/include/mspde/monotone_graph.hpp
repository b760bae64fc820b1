#pragma once

#include <string>
#include <string_view>

namespace mspde {

enum class GraphKind { Linear, PowerLaw, SoftSign, Exponential, JumpAtZero };

/// Scalar maximal monotone graph beta with convex potential j, conjugate
/// j*, resolvent (proximal map), Yosida approximation, and minimal
/// section. Every catalog member has full domain, passes through the
/// origin, and carries closed forms for j and j*; the resolvent is closed
/// form where available and a safeguarded Newton/bisection solve otherwise.
///
/// Catalog:
///   Linear(c)        beta(r) = c r                      (c >= 0)
///   PowerLaw(m)      beta(r) = sign(r) |r|^m            (m > 0)
///   SoftSign         beta = subdifferential of |.|
///   Exponential      beta(r) = sinh(r)
///   JumpAtZero(a,b)  step a -> b with the jump at 0 filled in (a <= b)
class MonotoneGraph {
public:
    static MonotoneGraph linear(double c);
    static MonotoneGraph power_law(double m);
    static MonotoneGraph soft_sign();
    static MonotoneGraph exponential();
    static MonotoneGraph jump_at_zero(double a, double b);

    /// Parse a catalog id: "linear:c", "power:m", "softsign", "exp",
    /// "jump:a,b". Throws ConfigError on anything else.
    static MonotoneGraph parse(std::string_view id);

    GraphKind kind() const { return kind_; }
    std::string id() const;

    /// j(r): the convex potential with j(0) = 0, beta = dj.
    double potential(double r) const;

    /// j*(s) = sup_r (r s - j(r)). +infinity where the supremum diverges;
    /// infinity is a value, not an error.
    double conjugate(double s) const;

    /// The unique u with u + lambda*beta(u) containing r; equals the
    /// proximal map of lambda*j. 1-Lipschitz in r.
    double resolvent(double lambda, double r) const;

    /// beta_lambda(r) = (r - resolvent(lambda, r)) / lambda. Lies in
    /// beta(resolvent(lambda, r)).
    double yosida(double lambda, double r) const;

    /// d/dr of yosida(lambda, .), in [0, 1/lambda]. At kinks the
    /// generalized derivative used by the semismooth Newton solver.
    double yosida_derivative(double lambda, double r) const;

    /// Element of beta(r) with least absolute value; the lambda -> 0
    /// limit of the Yosida approximation.
    double minimal_section(double r) const;

    /// j(r) + j*(s) - r s >= 0, zero (to tolerance) iff s in beta(r).
    double fenchel_gap(double r, double s) const;

    /// sup over a log-spaced probe grid |r| in [1, 1e6] of
    /// j(r)/max(j(-r), eps). Probes where both sides overflow are skipped.
    /// Empirical stand-in for the symmetry-control hypothesis on j.
    double symmetry_constant() const;

private:
    MonotoneGraph(GraphKind k, double p0, double p1) : kind_(k), p0_(p0), p1_(p1) {}

    double solve_resolvent(double lambda, double r) const;
    double beta_smooth(double u) const;      // single-valued branch value
    double beta_smooth_prime(double u) const;

    GraphKind kind_;
    double p0_ = 0.0; // Linear: c; PowerLaw: m; JumpAtZero: a
    double p1_ = 0.0; // JumpAtZero: b
};

} // namespace mspde
