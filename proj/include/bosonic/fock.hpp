// fock.hpp
// Truncated multi-mode Fock representations of Gaussian states: basis
// enumeration, density-matrix elements by Bargmann recursion, projection and
// renormalization, and beam-splitter amplitudes on Fock states.

#pragma once

#include "gaussian.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace bosonic {

inline constexpr std::int64_t kDefaultFockCap = 20000;

// Multi-indices k in N^n with |k| <= M in graded lexicographic order:
// by total photon number, then lexicographically descending in (k_1, ..., k_n),
// e.g. (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
class FockBasis {
public:
    FockBasis(int modes, int cutoff, std::int64_t cap = kDefaultFockCap) : modes_(modes), cutoff_(cutoff) {
        detail::require(modes >= 1, "FockBasis: modes must be >= 1");
        detail::require(cutoff >= 0, "FockBasis: cutoff must be >= 0");
        const std::int64_t d = dimension(modes, cutoff, cap);
        if (d > cap)
            throw resource_error("Fock dimension binom(M+n, n) = " + (d == std::numeric_limits<std::int64_t>::max()
                                                                           ? std::string("overflow")
                                                                           : std::to_string(d)) +
                                 " for n = " + std::to_string(modes) + ", M = " + std::to_string(cutoff) +
                                 " exceeds the cap " + std::to_string(cap) +
                                 "; the certified algorithm runs in time O((2^6 (n+1) E log(2/eps))^{3n}), "
                                 "exponential in the mode count n");
        build();
    }

    // binom(M + n, n), saturating at INT64_MAX once it exceeds cap
    static std::int64_t dimension(int modes, int cutoff, std::int64_t cap = std::numeric_limits<std::int64_t>::max()) {
        std::int64_t d = 1;
        for (int k = 1; k <= modes; ++k) {
            const std::int64_t num = static_cast<std::int64_t>(cutoff) + k;
            if (d > (std::numeric_limits<std::int64_t>::max() / num)) return std::numeric_limits<std::int64_t>::max();
            d = d * num / k;
            if (d > cap) return d;  // binom(M+k, k) is nondecreasing in k
        }
        return d;
    }

    int modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    int size() const { return static_cast<int>(index_.size()); }
    const std::vector<int>& multi_index(int p) const { return index_[p]; }
    int total(int p) const { return total_[p]; }

    // Dense position of k, or -1 when |k| > M.
    int find(const std::vector<int>& k) const {
        detail::require(static_cast<int>(k.size()) == modes_, "FockBasis::find: wrong multi-index length");
        int t = 0;
        for (int v : k) {
            detail::require(v >= 0, "FockBasis::find: negative occupation");
            t += v;
        }
        if (t > cutoff_) return -1;
        int p = (t == 0) ? 0 : static_cast<int>(dimension(modes_, t - 1));
        int remaining = t;
        for (int i = 0; i < modes_ - 1; ++i) {
            // entries with k_i' > k_i at position i come first
            for (int v = remaining; v > k[i]; --v) p += static_cast<int>(shell_count(modes_ - i - 1, remaining - v));
            remaining -= k[i];
        }
        return p;
    }

    // position of k - e_j, or -1 when k_j = 0
    int down(int p, int j) const { return down_[static_cast<std::size_t>(p) * modes_ + j]; }

    bool operator==(const FockBasis& o) const { return modes_ == o.modes_ && cutoff_ == o.cutoff_; }

private:
    // number of multi-indices in m modes with total exactly t
    static std::int64_t shell_count(int m, int t) {
        if (m == 0) return t == 0 ? 1 : 0;
        return dimension(m - 1, t);
    }

    void build() {
        std::vector<int> k(modes_, 0);
        for (int t = 0; t <= cutoff_; ++t) enumerate_shell(k, 0, t);
        down_.assign(index_.size() * modes_, -1);
        for (int p = 0; p < size(); ++p) {
            std::vector<int> q = index_[p];
            for (int j = 0; j < modes_; ++j) {
                if (q[j] == 0) continue;
                --q[j];
                down_[static_cast<std::size_t>(p) * modes_ + j] = find(q);
                ++q[j];
            }
        }
    }

    void enumerate_shell(std::vector<int>& k, int pos, int remaining) {
        if (pos == modes_ - 1) {
            k[pos] = remaining;
            index_.push_back(k);
            int t = 0;
            for (int v : k) t += v;
            total_.push_back(t);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            k[pos] = v;
            enumerate_shell(k, pos + 1, remaining - v);
        }
        k[pos] = 0;
    }

    int modes_;
    int cutoff_;
    std::vector<std::vector<int>> index_;
    std::vector<int> total_;
    std::vector<int> down_;
};

inline FockBasis enumerate_basis(int modes, int cutoff, std::int64_t cap = kDefaultFockCap) {
    return FockBasis(modes, cutoff, cap);
}

struct FockMatrix {
    FockBasis basis;
    CMatrix entries;

    std::complex<double> trace() const { return entries.trace(); }
};

namespace detail {

inline CMatrix hermitize(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

}  // namespace detail

// <k|rho|l> for all |k|, |l| <= M. The generating function
// sum_{k,l} <k|rho|l> u^k w^l / sqrt(k! l!) = T exp(z^T A z / 2 + b^T z), z = (u, w),
// follows from the Husimi function with x = (u + w)/sqrt2, p = i(u - w)/sqrt2:
// A = X - 2 L^T (V + 1)^{-1} L, b = 2 L^T (V + 1)^{-1} m, T = e^{-m^T (V+1)^{-1} m} / sqrt(det((V + 1)/2)),
// where X swaps u and w. Coefficients obey
// sqrt(nu_i + 1) R_{nu + e_i} = b_i R_nu + sum_j A_ij sqrt(nu_j) R_{nu - e_j}.
inline FockMatrix fock_matrix_elements(const GaussianState& s, int cutoff, std::int64_t cap = kDefaultFockCap) {
    require_valid(s);
    const int n = s.modes();
    FockBasis basis(n, cutoff, cap);
    const int dim = basis.size();

    using C = std::complex<double>;
    const C I(0.0, 1.0);
    Matrix vp = detail::symmetrize(s.cov() + Matrix::Identity(2 * n, 2 * n));
    Eigen::LLT<Matrix> llt(vp);
    if (llt.info() != Eigen::Success) throw numerical_error("fock_matrix_elements: V + 1 is not positive definite");
    Matrix minv = llt.solve(Matrix::Identity(2 * n, 2 * n));
    minv = detail::symmetrize(minv);
    Vector y = minv * s.mean();

    // A blocks uu, uw, ww (each n x n; wu is the transpose of uw) and the u, w parts of b.
    CMatrix auu(n, n), auw(n, n), aww(n, n);
    CVector bu(n), bw(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = minv(2 * i, 2 * j), b = minv(2 * i, 2 * j + 1);
            const double c = minv(2 * i + 1, 2 * j), d = minv(2 * i + 1, 2 * j + 1);
            const C uu = 0.5 * (a - d + I * (b + c));
            const C uw = 0.5 * (a + d + I * (c - b));
            const C ww = 0.5 * (a - d - I * (b + c));
            auu(i, j) = -2.0 * uu;
            auw(i, j) = -2.0 * uw + (i == j ? 1.0 : 0.0);
            aww(i, j) = -2.0 * ww;
        }
        bu(i) = std::sqrt(2.0) * (y(2 * i) + I * y(2 * i + 1));
        bw(i) = std::sqrt(2.0) * (y(2 * i) - I * y(2 * i + 1));
    }
    const double log_t = -s.mean().dot(y) - 0.5 * std::log((0.5 * vp).determinant());

    std::vector<double> root(cutoff + 2);
    for (int k = 0; k < static_cast<int>(root.size()); ++k) root[k] = std::sqrt(static_cast<double>(k));

    CMatrix r = CMatrix::Zero(dim, dim);
    r(0, 0) = 1.0;
    for (int pk = 0; pk < dim; ++pk) {
        const std::vector<int>& k = basis.multi_index(pk);
        int ik = -1;
        for (int i = 0; i < n; ++i)
            if (k[i] > 0) {
                ik = i;
                break;
            }
        for (int pl = 0; pl < dim; ++pl) {
            if (pk == 0 && pl == 0) continue;
            const std::vector<int>& l = basis.multi_index(pl);
            C acc = 0.0;
            if (ik >= 0) {
                // R(k, l) from R(k - e_i, .)
                const int pkp = basis.down(pk, ik);
                acc = bu(ik) * r(pkp, pl);
                for (int j = 0; j < n; ++j) {
                    const int kj = k[j] - (j == ik ? 1 : 0);
                    if (kj > 0) acc += auu(ik, j) * root[kj] * r(basis.down(pkp, j), pl);
                    if (l[j] > 0) acc += auw(ik, j) * root[l[j]] * r(pkp, basis.down(pl, j));
                }
                r(pk, pl) = acc / root[k[ik]];
            } else {
                // first row: R(0, l) from R(0, l - e_i)
                int il = 0;
                while (l[il] == 0) ++il;
                const int plp = basis.down(pl, il);
                acc = bw(il) * r(0, plp);
                for (int j = 0; j < n; ++j) {
                    const int lj = l[j] - (j == il ? 1 : 0);
                    if (lj > 0) acc += aww(il, j) * root[lj] * r(0, basis.down(plp, j));
                }
                r(0, pl) = acc / root[l[il]];
            }
        }
    }
    r *= std::exp(log_t);
    FockMatrix out{std::move(basis), detail::hermitize(r)};
    const double tr = out.entries.trace().real();
    if (!std::isfinite(tr) || !out.entries.allFinite())
        throw numerical_error("fock_matrix_elements: recursion produced non-finite entries");
    if (tr > 1.0 + 1e-6)
        throw numerical_error("fock_matrix_elements: trace " + std::to_string(tr) +
                              " exceeds 1 + 1e-6, recursion unstable at this cutoff");
    return out;
}

// Pi_M rho Pi_M / Tr[Pi_M rho Pi_M]
inline FockMatrix truncate_normalize(const FockMatrix& f) {
    const double tr = f.entries.trace().real();
    detail::require(tr > 0.0, "truncate_normalize: trace must be positive");
    return FockMatrix{f.basis, detail::hermitize(f.entries / tr)};
}

// U_lambda |i>|j> = sum_{m=0}^{i+j} c_m |i+j-m>|m>,
// c_m = (i! j!)^{-1/2} sum_k (-1)^k sqrt(m! (i+j-m)!) C(i,k) C(j,m-k) lambda^{(i+m-2k)/2} (1-lambda)^{(j+2k-m)/2}.
inline std::vector<double> beam_splitter_fock_coeffs(int i, int j, double lambda) {
    detail::require(i >= 0 && j >= 0, "beam_splitter_fock_coeffs: occupations must be >= 0");
    detail::require(lambda >= 0.0 && lambda <= 1.0, "beam_splitter_fock_coeffs: lambda must lie in [0, 1]");
    auto lf = [](int x) { return std::lgamma(static_cast<double>(x) + 1.0); };
    auto lbinom = [&](int a, int b) { return lf(a) - lf(b) - lf(a - b); };
    const int total = i + j;
    std::vector<double> c(total + 1, 0.0);
    for (int m = 0; m <= total; ++m) {
        double sum = 0.0;
        for (int k = std::max(0, m - j); k <= std::min(i, m); ++k) {
            const double mag = std::exp(0.5 * (lf(m) + lf(total - m) - lf(i) - lf(j)) + lbinom(i, k) + lbinom(j, m - k));
            const double term = mag * std::pow(lambda, 0.5 * (i + m - 2 * k)) * std::pow(1.0 - lambda, 0.5 * (j + 2 * k - m));
            sum += (k % 2 == 0) ? term : -term;
        }
        c[m] = sum;
    }
    return c;
}

}  // namespace bosonic
