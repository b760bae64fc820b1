#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace mspde {

/// Thomas algorithm for a tridiagonal system with constant off-diagonals
/// and per-row main diagonal. No pivoting; every system we assemble is
/// strictly diagonally dominant.
///
/// Solves (diag[i]) x[i] + off*(x[i-1] + x[i+1]) = rhs[i].
inline void solve_tridiag_const_off(std::span<const double> diag,
                                    double off,
                                    std::span<const double> rhs,
                                    std::span<double> x,
                                    std::vector<double>& work) {
    const size_t n = diag.size();
    assert(rhs.size() == n && x.size() == n);
    work.resize(n);

    // forward elimination
    double inv = 1.0 / diag[0];
    work[0] = off * inv;
    x[0] = rhs[0] * inv;
    for (size_t i = 1; i < n; ++i) {
        inv = 1.0 / (diag[i] - off * work[i - 1]);
        work[i] = off * inv;
        x[i] = (rhs[i] - off * x[i - 1]) * inv;
    }
    // back substitution
    for (size_t i = n - 1; i-- > 0;) x[i] -= work[i] * x[i + 1];
}

} // namespace mspde
