#include "mspde/monotone_graph.hpp"

#include "mspde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mspde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxSolveIter = 200;
constexpr double kResidualTol = 1e-13;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }
} // namespace

MonotoneGraph MonotoneGraph::linear(double c) {
    if (c < 0.0) throw ConfigError("linear graph needs c >= 0");
    return {GraphKind::Linear, c, 0.0};
}

MonotoneGraph MonotoneGraph::power_law(double m) {
    if (m <= 0.0) throw ConfigError("power-law graph needs m > 0");
    return {GraphKind::PowerLaw, m, 0.0};
}

MonotoneGraph MonotoneGraph::soft_sign() { return {GraphKind::SoftSign, 0.0, 0.0}; }

MonotoneGraph MonotoneGraph::exponential() { return {GraphKind::Exponential, 0.0, 0.0}; }

MonotoneGraph MonotoneGraph::jump_at_zero(double a, double b) {
    if (a > b) throw ConfigError("jump graph needs a <= b");
    return {GraphKind::JumpAtZero, a, b};
}

MonotoneGraph MonotoneGraph::parse(std::string_view id) {
    auto num = [](std::string_view s) {
        size_t pos = 0;
        double v = std::stod(std::string(s), &pos);
        if (pos != s.size()) throw ConfigError("bad number in graph id");
        return v;
    };
    if (id == "softsign") return soft_sign();
    if (id == "exp") return exponential();
    if (id.starts_with("linear:")) return linear(num(id.substr(7)));
    if (id.starts_with("power:")) return power_law(num(id.substr(6)));
    if (id.starts_with("jump:")) {
        auto rest = id.substr(5);
        auto comma = rest.find(',');
        if (comma == std::string_view::npos) throw ConfigError("jump id needs two parameters");
        return jump_at_zero(num(rest.substr(0, comma)), num(rest.substr(comma + 1)));
    }
    throw ConfigError("unknown graph id: " + std::string(id));
}

std::string MonotoneGraph::id() const {
    std::ostringstream os;
    switch (kind_) {
    case GraphKind::Linear: os << "linear:" << p0_; break;
    case GraphKind::PowerLaw: os << "power:" << p0_; break;
    case GraphKind::SoftSign: os << "softsign"; break;
    case GraphKind::Exponential: os << "exp"; break;
    case GraphKind::JumpAtZero: os << "jump:" << p0_ << "," << p1_; break;
    }
    return os.str();
}

double MonotoneGraph::potential(double r) const {
    switch (kind_) {
    case GraphKind::Linear: return 0.5 * p0_ * r * r;
    case GraphKind::PowerLaw: return std::pow(std::abs(r), p0_ + 1.0) / (p0_ + 1.0);
    case GraphKind::SoftSign: return std::abs(r);
    case GraphKind::Exponential: {
        // cosh(r) - 1 without cancellation near 0
        const double s = std::sinh(0.5 * r);
        return 2.0 * s * s;
    }
    case GraphKind::JumpAtZero: return r >= 0.0 ? p1_ * r : p0_ * r;
    }
    return 0.0;
}

double MonotoneGraph::conjugate(double s) const {
    switch (kind_) {
    case GraphKind::Linear:
        if (p0_ == 0.0) return s == 0.0 ? 0.0 : kInf;
        return 0.5 * s * s / p0_;
    case GraphKind::PowerLaw: {
        const double q = (p0_ + 1.0) / p0_; // conjugate exponent of m+1
        return (p0_ / (p0_ + 1.0)) * std::pow(std::abs(s), q);
    }
    case GraphKind::SoftSign: return std::abs(s) <= 1.0 ? 0.0 : kInf;
    case GraphKind::Exponential:
        // s*asinh(s) - (sqrt(1+s^2) - 1), the latter written stably
        return s * std::asinh(s) - s * s / (std::hypot(1.0, s) + 1.0);
    case GraphKind::JumpAtZero: return (s >= p0_ && s <= p1_) ? 0.0 : kInf;
    }
    return 0.0;
}

double MonotoneGraph::beta_smooth(double u) const {
    switch (kind_) {
    case GraphKind::Linear: return p0_ * u;
    case GraphKind::PowerLaw:
        if (p0_ == 3.0) return u * u * u;
        if (p0_ == 2.0) return std::copysign(u * u, u);
        return std::copysign(std::pow(std::abs(u), p0_), u);
    case GraphKind::Exponential: return std::sinh(u);
    default: return 0.0; // not used for the multi-valued members
    }
}

double MonotoneGraph::beta_smooth_prime(double u) const {
    switch (kind_) {
    case GraphKind::Linear: return p0_;
    case GraphKind::PowerLaw:
        if (p0_ == 3.0) return 3.0 * u * u;
        if (p0_ == 2.0) return 2.0 * std::abs(u);
        return p0_ * std::pow(std::abs(u), p0_ - 1.0);
    case GraphKind::Exponential: return std::cosh(u);
    default: return 0.0;
    }
}

/// Safeguarded Newton/bisection for u + lambda*beta(u) = r. The root is
/// bracketed by [min(0,r), max(0,r)] intersected with the growth bracket
/// [r - lambda*C, r + lambda*C], C = |beta^0(r)|; bisection makes
/// convergence unconditional for monotone scalar equations.
double MonotoneGraph::solve_resolvent(double lambda, double r) const {
    double lo = std::min(0.0, r);
    double hi = std::max(0.0, r);
    const double growth = lambda * std::abs(minimal_section(r));
    if (std::isfinite(growth)) {
        lo = std::max(lo, r - growth);
        hi = std::min(hi, r + growth);
    }

    const double tol = kResidualTol * std::max(1.0, std::abs(r));
    auto f = [&](double u) { return u + lambda * beta_smooth(u) - r; };

    double u = clamp(r / (1.0 + lambda), lo, hi);
    for (int it = 0; it < kMaxSolveIter; ++it) {
        const double fu = f(u);
        if (std::abs(fu) <= tol) return u;
        if (std::isfinite(fu)) {
            if (fu > 0.0) hi = u; else lo = u;
        } else {
            // overflow in beta: shrink toward the origin side
            if (u > 0.0) hi = u; else lo = u;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u)))
            return 0.5 * (lo + hi);
        const double denom = 1.0 + lambda * beta_smooth_prime(u);
        double next = std::isfinite(denom) ? u - fu / denom : u;
        if (!std::isfinite(next) || next <= lo || next >= hi || next == u)
            next = 0.5 * (lo + hi);
        u = next;
    }
    throw NonConvergence("resolvent solve exceeded iteration cap for graph " + id());
}

double MonotoneGraph::resolvent(double lambda, double r) const {
    if (lambda <= 0.0) throw ConfigError("resolvent needs lambda > 0");
    switch (kind_) {
    case GraphKind::Linear: return r / (1.0 + lambda * p0_);
    case GraphKind::SoftSign:
        if (r > lambda) return r - lambda;
        if (r < -lambda) return r + lambda;
        return 0.0;
    case GraphKind::JumpAtZero: return r - lambda * clamp(r / lambda, p0_, p1_);
    case GraphKind::PowerLaw:
        if (p0_ == 1.0) return r / (1.0 + lambda);
        return solve_resolvent(lambda, r);
    case GraphKind::Exponential: return solve_resolvent(lambda, r);
    }
    return r;
}

double MonotoneGraph::yosida(double lambda, double r) const {
    if (lambda <= 0.0) throw ConfigError("yosida needs lambda > 0");
    switch (kind_) {
    case GraphKind::Linear: return p0_ * r / (1.0 + lambda * p0_);
    case GraphKind::SoftSign: return clamp(r / lambda, -1.0, 1.0);
    case GraphKind::JumpAtZero: return clamp(r / lambda, p0_, p1_);
    default: return (r - resolvent(lambda, r)) / lambda;
    }
}

double MonotoneGraph::yosida_derivative(double lambda, double r) const {
    switch (kind_) {
    case GraphKind::Linear: return p0_ / (1.0 + lambda * p0_);
    case GraphKind::SoftSign: return std::abs(r) <= lambda ? 1.0 / lambda : 0.0;
    case GraphKind::JumpAtZero: {
        const double q = r / lambda;
        return (q >= p0_ && q <= p1_) ? 1.0 / lambda : 0.0;
    }
    default: {
        const double bp = beta_smooth_prime(resolvent(lambda, r));
        if (!std::isfinite(bp)) return 1.0 / lambda;
        return bp / (1.0 + lambda * bp);
    }
    }
}

double MonotoneGraph::minimal_section(double r) const {
    switch (kind_) {
    case GraphKind::Linear: return p0_ * r;
    case GraphKind::PowerLaw: return beta_smooth(r);
    case GraphKind::SoftSign:
        if (r > 0.0) return 1.0;
        if (r < 0.0) return -1.0;
        return 0.0;
    case GraphKind::Exponential: return std::sinh(r);
    case GraphKind::JumpAtZero:
        if (r > 0.0) return p1_;
        if (r < 0.0) return p0_;
        return clamp(0.0, p0_, p1_); // least-norm selection in [a, b]
    }
    return 0.0;
}

double MonotoneGraph::fenchel_gap(double r, double s) const {
    const double jr = potential(r);
    const double js = conjugate(s);
    if (!std::isfinite(js) || !std::isfinite(jr)) return kInf;
    return jr + js - r * s;
}

double MonotoneGraph::symmetry_constant() const {
    const double eps = std::numeric_limits<double>::epsilon();
    double sup = 0.0;
    const int points_per_decade = 25;
    for (int k = 0; k <= 6 * points_per_decade; ++k) {
        const double r = std::pow(10.0, static_cast<double>(k) / points_per_decade);
        for (double sign : {1.0, -1.0}) {
            const double num = potential(sign * r);
            const double den = potential(-sign * r);
            if (!std::isfinite(num) || !std::isfinite(den)) continue;
            sup = std::max(sup, num / std::max(den, eps));
        }
    }
    return sup;
}

} // namespace mspde
