// tracedist.hpp
// Trace distance between truncated Fock matrices and certified-precision trace
// distance between Gaussian states by Fock truncation.

#pragma once

#include "fock.hpp"
#include "tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace bosonic {

struct TraceDistanceResult {
    double estimate = 0.0;         // clamped to [0, 1]
    double certified_error = 0.0;  // tail bounds + eigensolve residual
    int cutoff = 0;
    std::pair<double, double> tail_bounds{0.0, 0.0};
    int fock_dim = 0;
};

struct FiniteTraceDistance {
    double value = 0.0;
    double residual = 0.0;  // bound on the eigensolve error
};

// 1/2 sum |eig(a - b)| on the Hermitized difference.
inline FiniteTraceDistance finite_trace_distance_detail(const FockMatrix& a, const FockMatrix& b) {
    detail::require(a.basis == b.basis, "finite_trace_distance: basis mismatch");
    CMatrix delta = detail::hermitize(a.entries - b.entries);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(delta, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numerical_error("finite_trace_distance: eigensolver failed");
    const Vector& ev = es.eigenvalues();
    const double dim = static_cast<double>(ev.size());
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    return {0.5 * ev.cwiseAbs().sum(), 0.5 * dim * dim * std::numeric_limits<double>::epsilon() * scale};
}

inline double finite_trace_distance(const FockMatrix& a, const FockMatrix& b) {
    return finite_trace_distance_detail(a, b).value;
}

// Truncate both states at the smallest M whose trace-distance truncation bound
// is <= eps/3 for each, renormalize, and diagonalize the difference.
inline TraceDistanceResult gaussian_trace_distance(const GaussianState& r1, const GaussianState& r2, double eps,
                                                   std::int64_t fock_cap = kDefaultFockCap) {
    detail::require(r1.modes() == r2.modes(), "gaussian_trace_distance: mode count mismatch");
    detail::require(eps > 0.0 && eps < 1.0, "gaussian_trace_distance: eps must lie in (0, 1)");
    require_valid(r1);
    require_valid(r2);
    const double budget = eps / 3.0;
    const std::int64_t m = std::max(cutoff_for_error(r1, budget), cutoff_for_error(r2, budget));
    detail::require(m <= std::numeric_limits<int>::max(), "gaussian_trace_distance: cutoff overflow");
    const int cutoff = static_cast<int>(m);

    FockMatrix f1 = truncate_normalize(fock_matrix_elements(r1, cutoff, fock_cap));
    FockMatrix f2 = truncate_normalize(fock_matrix_elements(r2, cutoff, fock_cap));
    FiniteTraceDistance fd = finite_trace_distance_detail(f1, f2);

    TraceDistanceResult out;
    out.tail_bounds = {trace_distance_truncation_bound(r1, m), trace_distance_truncation_bound(r2, m)};
    out.estimate = std::clamp(fd.value, 0.0, 1.0);
    out.certified_error = out.tail_bounds.first + out.tail_bounds.second + fd.residual;
    out.cutoff = cutoff;
    out.fock_dim = f1.basis.size();
    return out;
}

}  // namespace bosonic
