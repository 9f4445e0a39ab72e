// spectral.hpp
// Williamson decomposition, symplectic spectra and closed-form entropic
// quantities of Gaussian states. All logarithms are base 2.

#pragma once

#include "gaussian.hpp"

#include <complex>
#include <vector>

namespace bosonic {

struct WilliamsonDecomposition {
    Matrix symplectic;  // S with V = S diag(d1, d1, ..., dn, dn) S^T
    Vector eigenvalues;  // d, descending
};

namespace detail {

inline Matrix sqrtm_spd(const Matrix& v) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(v));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw validation_error("covariance matrix is not positive definite");
    return symmetrize(es.operatorSqrt());
}

// Symplectic eigenvalues within this distance of 1 are treated as exactly 1.
inline double pure_snap_tol(const Matrix& v) {
    const double norm = spectral_norm_sym(v);
    return std::max(1e-10 * std::max(1.0, norm), symplectic_noise_floor(norm));
}

}  // namespace detail

// Spectral method on A = V^{1/2} Omega V^{1/2}: for each eigenvector w of iA
// with eigenvalue -d, the real pair (sqrt2 Re w, sqrt2 Im w) spans the block of
// an orthogonal O with A = O (+)[[0, d], [-d, 0]] O^T, and S = V^{1/2} O D^{-1/2}.
inline WilliamsonDecomposition williamson(const Matrix& v) {
    detail::require(v.rows() == v.cols() && v.rows() % 2 == 0 && v.rows() >= 2,
                    "williamson: covariance must be square with even dimension");
    const int n = static_cast<int>(v.rows() / 2);
    Matrix root = detail::sqrtm_spd(v);
    Matrix a = root * symplectic_form(n) * root;
    CMatrix h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    Matrix o(2 * n, 2 * n);
    Vector d(n);
    for (int k = 0; k < n; ++k) {
        d(k) = -es.eigenvalues()(k);
        const CVector w = es.eigenvectors().col(k);
        o.col(2 * k) = std::sqrt(2.0) * w.real();
        o.col(2 * k + 1) = std::sqrt(2.0) * w.imag();
    }
    Vector dinv(2 * n);
    for (int k = 0; k < n; ++k) dinv(2 * k) = dinv(2 * k + 1) = 1.0 / std::sqrt(d(k));
    return {root * o * dinv.asDiagonal(), d};
}

inline Vector symplectic_eigenvalues(const Matrix& v) {
    detail::require(v.rows() == v.cols() && v.rows() % 2 == 0 && v.rows() >= 2,
                    "symplectic_eigenvalues: covariance must be square with even dimension");
    const int n = static_cast<int>(v.rows() / 2);
    Matrix root = detail::sqrtm_spd(v);
    CMatrix h = std::complex<double>(0.0, 1.0) * (root * symplectic_form(n) * root).cast<std::complex<double>>();
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    Vector d(n);
    for (int k = 0; k < n; ++k) d(k) = -es.eigenvalues()(k);
    return d;
}

// h(x) = (x+1) log2(x+1) - x log2 x, written as log2(1+x) + x log2(1 + 1/x).
inline double h_function(double x) {
    detail::require(x >= 0.0, "h_function: argument must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
    return (std::log1p(x) + x * std::log1p(1.0 / x)) / std::log(2.0);
}

inline double von_neumann_entropy(const GaussianState& s) {
    Vector d = symplectic_eigenvalues(s.cov());
    double tol = detail::pure_snap_tol(s.cov());
    double total = 0.0;
    for (int k = 0; k < d.size(); ++k)
        if (d(k) > 1.0 + tol) total += h_function((d(k) - 1.0) / 2.0);
    return total;
}

namespace detail {

inline std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline std::vector<int> range(int begin, int end) {
    std::vector<int> r;
    for (int k = begin; k < end; ++k) r.push_back(k);
    return r;
}

}  // namespace detail

// I_c(A>B) = S(B) - S(AB)
inline double coherent_information(const GaussianState& s, const std::vector<int>& a,
                                   const std::vector<int>& b) {
    detail::check_modes(detail::concat(a, b), s.modes());
    return von_neumann_entropy(reduce(s, b)) - von_neumann_entropy(reduce(s, detail::concat(a, b)));
}

// Bipartite cut with A = first n_a modes, B = the rest.
inline double coherent_information(const GaussianState& s, int n_a) {
    return coherent_information(s, detail::range(0, n_a), detail::range(n_a, s.modes()));
}

struct SqrtData {
    Matrix v_sqrt;
    double log2_det;  // log2 det V_sqrt
};

inline SqrtData v_sqrt_data(const Matrix& v) {
    WilliamsonDecomposition w = williamson(v);
    const double tol = detail::pure_snap_tol(v);
    const int n = static_cast<int>(w.eigenvalues.size());
    Vector f(2 * n);
    double log2_det = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = w.eigenvalues(k);
        const double fk = (d <= 1.0 + tol) ? 1.0 : d + std::sqrt((d - 1.0) * (d + 1.0));
        f(2 * k) = f(2 * k + 1) = fk;
        log2_det += 2.0 * std::log2(fk);
    }
    Matrix out = w.symplectic * f.asDiagonal() * w.symplectic.transpose();
    return {detail::symmetrize(out), log2_det};
}

// Covariance of sqrt(rho) / Tr sqrt(rho):
// [1 + sqrt(1 - (i V Omega)^{-2})] V = S diag(d + sqrt(d^2 - 1)) S^T.
inline Matrix v_sqrt(const Matrix& v) { return v_sqrt_data(v).v_sqrt; }

// Tr sqrt(rho) = det(V_sqrt)^{1/4}
inline double trace_sqrt(const GaussianState& s) {
    return std::exp2(v_sqrt_data(s.cov()).log2_det / 4.0);
}

namespace detail {

inline double log2_det_spd(const Matrix& m) {
    Eigen::LLT<Matrix> llt(symmetrize(m));
    if (llt.info() != Eigen::Success) throw validation_error("matrix is not positive definite");
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += std::log2(llt.matrixL()(i, i));
    return 2.0 * s;
}

}  // namespace detail

// H_{1/2}(A|B) = 2 log2 Tr[sqrt(rho_AB) (1_A (x) sqrt(rho_B))]
//             = log2( sqrt(det Vs(AB) det Vs(B)) / det[(Vs(AB)|_B + Vs(B)) / 2] ).
inline double petz_conditional_entropy_half(const GaussianState& s, const std::vector<int>& a,
                                            const std::vector<int>& b) {
    detail::check_modes(detail::concat(a, b), s.modes());
    detail::require(!a.empty() && !b.empty(), "petz_conditional_entropy_half: empty subsystem");
    GaussianState ab = reduce(s, detail::concat(a, b));
    GaussianState bb = reduce(s, b);
    SqrtData sab = v_sqrt_data(ab.cov());
    SqrtData sb = v_sqrt_data(bb.cov());
    const int kb = 2 * static_cast<int>(b.size());
    Matrix mid = 0.5 * (sab.v_sqrt.bottomRightCorner(kb, kb) + sb.v_sqrt);
    return 0.5 * (sab.log2_det + sb.log2_det) - detail::log2_det_spd(mid);
}

inline double petz_conditional_entropy_half(const GaussianState& s, int n_a) {
    return petz_conditional_entropy_half(s, detail::range(0, n_a), detail::range(n_a, s.modes()));
}

// Tr[rho sigma] = det((V1 + V2)/2)^{-1/2} exp(-d^T (V1 + V2)^{-1} d), d = m1 - m2.
inline double gaussian_overlap(const GaussianState& a, const GaussianState& b) {
    detail::require(a.modes() == b.modes(), "gaussian_overlap: mode count mismatch");
    Matrix sum = detail::symmetrize(a.cov() + b.cov());
    Vector delta = a.mean() - b.mean();
    Eigen::LLT<Matrix> llt(sum);
    if (llt.info() != Eigen::Success) throw validation_error("gaussian_overlap: V1 + V2 not positive definite");
    double quad = delta.dot(llt.solve(delta));
    double log2_det_half = detail::log2_det_spd(0.5 * sum);
    return std::exp2(-0.5 * log2_det_half) * std::exp(-quad);
}

// N (N+1) log2(1 + 1/N)^2, zero at N = 0.
inline double thermal_entropy_variance(double mean_photons) {
    detail::require(mean_photons >= 0.0, "thermal_entropy_variance: mean photon number must be >= 0");
    if (mean_photons == 0.0) return 0.0;
    const double l = std::log1p(1.0 / mean_photons) / std::log(2.0);
    return mean_photons * (mean_photons + 1.0) * l * l;
}

enum class VarianceCut { AE, BE };

// Conditional entropy variances V(A|E) = V(A|B) and V(B|E) = V(B|A) of the
// pure-loss output of a TMSV input, extended continuously to lambda in {0, 1}.
inline double entropy_variance_pure_loss(double lambda, double ns, VarianceCut cut) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "entropy_variance_pure_loss: lambda must lie in [0, 1]");
    detail::require(ns >= 0.0 && std::isfinite(ns), "entropy_variance_pure_loss: N_s must be finite and >= 0");
    auto lg = [](double x) { return -std::log1p(1.0 / x) / std::log(2.0); };
    const double a = lambda * ns;
    const double e = (1.0 - lambda) * ns;
    if (cut == VarianceCut::AE) {
        double cross_term = (a > 0.0 && e > 0.0) ? 2.0 * (1.0 - lambda) * lambda * ns * ns * lg(e) * lg(a) : 0.0;
        return std::max(0.0, thermal_entropy_variance(a) + thermal_entropy_variance(e) - cross_term);
    }
    double cross_term = (e > 0.0) ? 2.0 * (1.0 - lambda) * ns * (1.0 + ns) * lg(e) * lg(ns) : 0.0;
    return std::max(0.0, thermal_entropy_variance(ns) + thermal_entropy_variance(e) - cross_term);
}

}  // namespace bosonic
