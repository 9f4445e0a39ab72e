// gaussian.hpp
// Phase-space representation of bosonic Gaussian states and Gaussian unitaries.
//
// Conventions: quadratures ordered (x1, p1, ..., xn, pn) with [x, p] = i, and
// covariance V = Tr[{R - m, (R - m)^T} rho], so the vacuum has V = 1 and a
// coherent state with amplitude alpha has |alpha|^2 = |m|^2 / 2. Covariances
// in the hbar = 1 convention (vacuum 1/2) must be doubled before loading.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bosonic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Invalid parameters, states or dimensions.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation would exceed a configured memory or size cap.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical health check failed.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kUncertaintyTol = 1e-9;
inline constexpr double kSymplecticTol = 1e-10;

namespace detail {

inline Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

inline void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

inline double spectral_norm_sym(const Matrix& v) {
    if (v.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(v), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Attainable accuracy of symplectic eigenvalues near 1 for a covariance of the given norm.
inline double symplectic_noise_floor(double norm) {
    return 8.0 * std::numeric_limits<double>::epsilon() * norm * norm;
}

// Attainable accuracy of eigenvalues of V + i Omega for a covariance of the given norm.
inline double uncertainty_noise_floor(double norm) { return 16.0 * std::numeric_limits<double>::epsilon() * norm; }

// Quadrature indices (2k, 2k+1) for each listed mode, in list order.
inline std::vector<int> quadrature_indices(const std::vector<int>& modes) {
    std::vector<int> idx;
    idx.reserve(2 * modes.size());
    for (int m : modes) {
        idx.push_back(2 * m);
        idx.push_back(2 * m + 1);
    }
    return idx;
}

inline void check_modes(const std::vector<int>& modes, int n, bool allow_empty = false) {
    require(allow_empty || !modes.empty(), "mode list must be non-empty");
    std::vector<int> sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "mode indices must be distinct");
    for (int m : modes)
        require(m >= 0 && m < n, "mode index " + std::to_string(m) + " out of range [0, " +
                                     std::to_string(n) + ")");
}

}  // namespace detail

// Direct sum of n copies of [[0, 1], [-1, 0]].
inline Matrix symplectic_form(int n) {
    detail::require(n >= 1, "symplectic_form: mode count must be >= 1");
    Matrix omega = Matrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

class GaussianState {
public:
    GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        detail::require(cov_.rows() == cov_.cols(), "covariance must be square");
        detail::require(cov_.rows() >= 2 && cov_.rows() % 2 == 0,
                        "covariance dimension must be a positive even number");
        detail::require(mean_.size() == cov_.rows(), "mean length must equal covariance dimension");
        modes_ = static_cast<int>(cov_.rows() / 2);
    }

    int modes() const { return modes_; }
    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }

private:
    int modes_ = 0;
    Vector mean_;
    Matrix cov_;
};

struct SymplecticTransform {
    Matrix matrix;
    Vector displacement;

    explicit SymplecticTransform(Matrix s) : matrix(std::move(s)) {
        displacement = Vector::Zero(matrix.rows());
        check();
    }
    SymplecticTransform(Matrix s, Vector r) : matrix(std::move(s)), displacement(std::move(r)) {
        check();
    }

    int modes() const { return static_cast<int>(matrix.rows() / 2); }

    // max |S Omega S^T - Omega|
    double symplecticity_residual() const {
        Matrix omega = symplectic_form(modes());
        return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff();
    }

    static SymplecticTransform displacement_only(const Vector& r) {
        return SymplecticTransform(Matrix::Identity(r.size(), r.size()), r);
    }

private:
    void check() const {
        detail::require(matrix.rows() == matrix.cols() && matrix.rows() >= 2 && matrix.rows() % 2 == 0,
                        "symplectic matrix must be square with even dimension");
        detail::require(displacement.size() == matrix.rows(), "displacement length mismatch");
        detail::require(symplecticity_residual() <= kSymplecticTol * std::max(1.0, matrix.squaredNorm()),
                        "matrix is not symplectic");
    }
};

// Channel as a Gaussian unitary on (input modes, vacuum environment modes).
// Modes of the dilated system are numbered 0..n_in-1 for the input and
// n_in..n_in+n_env-1 for the environment; output_modes selects B.
struct ChannelDilation {
    int input_modes = 1;
    int env_modes = 1;
    SymplecticTransform transform;
    std::vector<int> output_modes;

    ChannelDilation(int n_in, int n_env, SymplecticTransform t, std::vector<int> out)
        : input_modes(n_in), env_modes(n_env), transform(std::move(t)), output_modes(std::move(out)) {
        detail::require(n_in >= 1 && n_env >= 0, "invalid dilation mode counts");
        detail::require(transform.modes() == n_in + n_env, "dilation transform size mismatch");
        detail::require(static_cast<int>(output_modes.size()) == n_in, "need one output mode per input mode");
        detail::check_modes(output_modes, n_in + n_env);
    }
};

struct ValidityReport {
    bool dimensions_ok = true;
    double symmetry_residual = 0.0;  // ||V - V^T|| (max abs)
    double symmetry_tolerance = 0.0;
    bool symmetric = true;
    double min_uncertainty_eigenvalue = 0.0;  // min eig of V + i Omega
    bool uncertainty_ok = true;
    bool uncertainty_warning = false;  // within [-tol, 0)
    double min_symplectic_eigenvalue = 0.0;
    bool symplectic_ok = true;

    bool valid() const { return dimensions_ok && symmetric && uncertainty_ok && symplectic_ok; }
};

inline ValidityReport validate_state(const GaussianState& s) {
    ValidityReport r;
    const Matrix& v = s.cov();
    const int n = s.modes();
    double vnorm = detail::spectral_norm_sym(v);
    r.symmetry_residual = (v - v.transpose()).cwiseAbs().maxCoeff();
    r.symmetry_tolerance = kSymmetryTol * std::max(1.0, vnorm);
    r.symmetric = r.symmetry_residual <= r.symmetry_tolerance;

    Matrix vs = detail::symmetrize(v);
    CMatrix h = vs.cast<std::complex<double>>() +
                std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    r.min_uncertainty_eigenvalue = es.eigenvalues().minCoeff();
    r.uncertainty_ok =
        r.min_uncertainty_eigenvalue >= -std::max(kUncertaintyTol, detail::uncertainty_noise_floor(vnorm));
    r.uncertainty_warning = r.uncertainty_ok && r.min_uncertainty_eigenvalue < 0.0;

    // Symplectic eigenvalues as |eig(i V Omega)|.
    Eigen::ComplexEigenSolver<CMatrix> ces(
        std::complex<double>(0.0, 1.0) * (vs * symplectic_form(n)).cast<std::complex<double>>(), false);
    Eigen::VectorXd mags = ces.eigenvalues().cwiseAbs();
    r.min_symplectic_eigenvalue = mags.minCoeff();
    r.symplectic_ok =
        r.min_symplectic_eigenvalue >= 1.0 - std::max(kUncertaintyTol, detail::symplectic_noise_floor(vnorm));
    return r;
}

inline GaussianState require_valid(const GaussianState& s) {
    ValidityReport r = validate_state(s);
    if (!r.valid())
        throw validation_error("invalid Gaussian state: min eig(V + i Omega) = " +
                               std::to_string(r.min_uncertainty_eigenvalue) +
                               ", min symplectic eigenvalue = " + std::to_string(r.min_symplectic_eigenvalue) +
                               ", symmetry residual = " + std::to_string(r.symmetry_residual));
    return s;
}

inline GaussianState vacuum_state(int n) {
    detail::require(n >= 1, "vacuum_state: mode count must be >= 1");
    return GaussianState(Vector::Zero(2 * n), Matrix::Identity(2 * n, 2 * n));
}

// Thermal state tau_N: V = (2N + 1) 1_2.
inline GaussianState thermal_state(double mean_photons) {
    detail::require(mean_photons >= 0.0 && std::isfinite(mean_photons),
                    "thermal_state: mean photon number must be finite and >= 0");
    return GaussianState(Vector::Zero(2), (2.0 * mean_photons + 1.0) * Matrix::Identity(2, 2));
}

// Two-mode squeezed vacuum with local mean photon number N:
// [[(2N+1) 1, 2 sqrt(N(N+1)) Z], [2 sqrt(N(N+1)) Z, (2N+1) 1]], Z = diag(1, -1).
inline GaussianState tmsv_state(double mean_photons) {
    detail::require(mean_photons >= 0.0 && std::isfinite(mean_photons),
                    "tmsv_state: mean photon number must be finite and >= 0");
    const double a = 2.0 * mean_photons + 1.0;
    const double c = 2.0 * std::sqrt(mean_photons * (mean_photons + 1.0));
    Matrix v = Matrix::Zero(4, 4);
    v.diagonal().setConstant(a);
    v(0, 2) = v(2, 0) = c;
    v(1, 3) = v(3, 1) = -c;
    return GaussianState(Vector::Zero(4), v);
}

// Beam splitter of transmissivity lambda: [[sqrt(l) 1, sqrt(1-l) 1], [-sqrt(1-l) 1, sqrt(l) 1]].
inline SymplecticTransform beam_splitter(double lambda) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "beam_splitter: transmissivity must lie in [0, 1]");
    const double t = std::sqrt(lambda), r = std::sqrt(1.0 - lambda);
    Matrix s = Matrix::Zero(4, 4);
    for (int k = 0; k < 2; ++k) {
        s(k, k) = t;
        s(k, 2 + k) = r;
        s(2 + k, k) = -r;
        s(2 + k, 2 + k) = t;
    }
    return SymplecticTransform(s);
}

// Two-mode squeezer of gain g: [[sqrt(g) 1, sqrt(g-1) Z], [sqrt(g-1) Z, sqrt(g) 1]].
inline SymplecticTransform two_mode_squeezer(double gain) {
    detail::require(gain >= 1.0 && std::isfinite(gain), "two_mode_squeezer: gain must be >= 1");
    const double a = std::sqrt(gain), b = std::sqrt(gain - 1.0);
    Matrix s = Matrix::Zero(4, 4);
    s.diagonal().setConstant(a);
    s(0, 2) = s(2, 0) = b;
    s(1, 3) = s(3, 1) = -b;
    return SymplecticTransform(s);
}

// Permutation matrix P with (P v) listing the quadratures of `front` first,
// followed by the remaining modes in increasing order.
inline Matrix mode_permutation(const std::vector<int>& front, int n) {
    std::vector<int> order = front;
    for (int m = 0; m < n; ++m)
        if (std::find(front.begin(), front.end(), m) == front.end()) order.push_back(m);
    std::vector<int> q = detail::quadrature_indices(order);
    Matrix p = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) p(i, q[i]) = 1.0;
    return p;
}

// Applies t to target_modes (in the order given), identity on the rest:
// m -> S m + r, V -> S V S^T on the embedded block.
inline GaussianState apply_transform(const GaussianState& s, const SymplecticTransform& t,
                                     const std::vector<int>& target_modes) {
    const int n = s.modes();
    detail::check_modes(target_modes, n);
    detail::require(static_cast<int>(target_modes.size()) == t.modes(),
                    "apply_transform: transform size does not match target mode count");
    const int k = 2 * t.modes();
    Matrix p = mode_permutation(target_modes, n);
    Matrix block = Matrix::Identity(2 * n, 2 * n);
    block.topLeftCorner(k, k) = t.matrix;
    Vector shift = Vector::Zero(2 * n);
    shift.head(k) = t.displacement;
    Matrix full = p.transpose() * block * p;
    Vector mean = full * s.mean() + p.transpose() * shift;
    Matrix cov = detail::symmetrize(full * s.cov() * full.transpose());
    return GaussianState(mean, cov);
}

inline GaussianState apply_transform(const GaussianState& s, const SymplecticTransform& t) {
    std::vector<int> all(s.modes());
    std::iota(all.begin(), all.end(), 0);
    return apply_transform(s, t, all);
}

inline GaussianState tensor(const std::vector<GaussianState>& states) {
    detail::require(!states.empty(), "tensor: empty state list");
    int dim = 0;
    for (const auto& st : states) dim += 2 * st.modes();
    Vector mean(dim);
    Matrix cov = Matrix::Zero(dim, dim);
    int off = 0;
    for (const auto& st : states) {
        const int k = 2 * st.modes();
        mean.segment(off, k) = st.mean();
        cov.block(off, off, k, k) = st.cov();
        off += k;
    }
    return GaussianState(mean, cov);
}

inline GaussianState tensor(const GaussianState& a, const GaussianState& b) { return tensor({a, b}); }

// Marginal on `keep`, with modes reordered as listed.
inline GaussianState reduce(const GaussianState& s, const std::vector<int>& keep) {
    detail::check_modes(keep, s.modes());
    std::vector<int> q = detail::quadrature_indices(keep);
    const int k = static_cast<int>(q.size());
    Vector mean(k);
    Matrix cov(k, k);
    for (int i = 0; i < k; ++i) {
        mean(i) = s.mean()(q[i]);
        for (int j = 0; j < k; ++j) cov(i, j) = s.cov()(q[i], q[j]);
    }
    return GaussianState(mean, cov);
}

// N = Tr[V - 1]/4 + |m|^2/2
inline double mean_photon_number(const GaussianState& s) {
    return (s.cov().trace() - 2.0 * s.modes()) / 4.0 + s.mean().squaredNorm() / 2.0;
}

// Upper bound on ||V||_inf for a state with total mean photon number N.
inline double cov_norm_bound(double mean_photons) {
    detail::require(mean_photons >= 0.0, "cov_norm_bound: mean photon number must be >= 0");
    return 1.0 + 2.0 * mean_photons + 2.0 * std::sqrt(mean_photons * mean_photons + mean_photons);
}

inline double cov_operator_norm(const GaussianState& s) { return detail::spectral_norm_sym(s.cov()); }

inline ChannelDilation dilate_pure_loss(double lambda) {
    return ChannelDilation(1, 1, beam_splitter(lambda), {0});
}

inline ChannelDilation dilate_pure_amplifier(double gain) {
    return ChannelDilation(1, 1, two_mode_squeezer(gain), {0});
}

// Output of the dilation on an input whose last ch.input_modes modes are the
// channel input A' and whose leading modes are the ancilla A. The result is
// ordered (A, B, E): ancilla, channel outputs, then environment outputs.
inline GaussianState stinespring_output(const ChannelDilation& ch, const GaussianState& input) {
    const int n_anc = input.modes() - ch.input_modes;
    detail::require(n_anc >= 0, "stinespring_output: input has fewer modes than the channel input");
    const int n_sys = ch.input_modes + ch.env_modes;
    std::vector<GaussianState> parts{input};
    if (ch.env_modes > 0) parts.push_back(vacuum_state(ch.env_modes));
    GaussianState joint = tensor(parts);
    std::vector<int> targets(n_sys);
    std::iota(targets.begin(), targets.end(), n_anc);
    GaussianState evolved = apply_transform(joint, ch.transform, targets);
    std::vector<int> order(n_anc);
    std::iota(order.begin(), order.end(), 0);
    for (int m : ch.output_modes) order.push_back(n_anc + m);
    for (int m = 0; m < n_sys; ++m)
        if (std::find(ch.output_modes.begin(), ch.output_modes.end(), m) == ch.output_modes.end())
            order.push_back(n_anc + m);
    return reduce(evolved, order);
}

// Channel output B alone for a state living on the channel input modes.
inline GaussianState channel_output(const ChannelDilation& ch, const GaussianState& input) {
    detail::require(input.modes() == ch.input_modes, "channel_output: input mode count mismatch");
    GaussianState abe = stinespring_output(ch, input);
    std::vector<int> b(ch.input_modes);
    std::iota(b.begin(), b.end(), 0);
    return reduce(abe, b);
}

}  // namespace bosonic
