// tail.hpp
// Photon-number tail bounds P(N > M) for Gaussian states, the induced
// trace-distance truncation bounds, and cutoff selection.

#pragma once

#include "gaussian.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace bosonic {

struct TailBoundResult {
    double bound = 1.0;                  // clamped to [0, 1]
    std::optional<double> optimizer_x;   // x > ||V||_inf chosen by the optimizer
    double decay_rate = 0.0;             // bits of the exponent per unit M
    double alpha = 0.0;                  // prefactor at the reported x
    bool fallback = false;               // optimizer degraded, closed choice x = 8N+4 used
};

inline constexpr std::int64_t kDefaultCutoffCap = 1'000'000;

namespace detail {

// log of e^{m^T (x - V)^{-1} m} / sqrt(det[(x - V)/(x - 1)]) * e^{-2 arccoth(x) M},
// parametrised by t = arccoth(x), so x - 1 = 2 / expm1(2t).
class TailObjective {
public:
    explicit TailObjective(const GaussianState& s) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s.cov()));
        eig_ = es.eigenvalues();
        proj_ = (es.eigenvectors().transpose() * s.mean()).cwiseAbs2();
        norm_ = eig_.cwiseAbs().maxCoeff();
        const double snap = 1e-12 * std::max(1.0, norm_);
        for (int i = 0; i < eig_.size(); ++i)
            if (std::abs(eig_(i) - 1.0) <= snap) eig_(i) = 1.0;
        photons_ = mean_photon_number(s);
        free_boundary_ = (eig_.maxCoeff() == 1.0) && s.mean().squaredNorm() == 0.0;
    }

    double norm() const { return norm_; }
    double photons() const { return photons_; }
    bool free_boundary() const { return free_boundary_; }

    // log prefactor (natural log) at t
    double log_prefactor(double t) const {
        const double u = 2.0 / std::expm1(2.0 * t);  // x - 1
        double val = 0.0;
        for (int i = 0; i < eig_.size(); ++i) {
            const double gap = u + (1.0 - eig_(i));  // x - v_i
            if (proj_(i) > 0.0) val += proj_(i) / gap;
            if (eig_(i) != 1.0) val -= 0.5 * std::log(gap / u);
        }
        return val;
    }

    double log_value(double t, std::int64_t m) const {
        return log_prefactor(t) - 2.0 * t * static_cast<double>(m);
    }

private:
    Vector eig_;
    Vector proj_;
    double norm_ = 0.0;
    double photons_ = 0.0;
    bool free_boundary_ = false;
};

inline double arccoth(double x) { return std::atanh(1.0 / x); }

inline TailBoundResult tail_closed(const TailObjective& obj, std::int64_t m) {
    const double n = obj.photons();
    const double x = 8.0 * n + 4.0;
    const double log_alpha = obj.log_prefactor(arccoth(x));
    TailBoundResult r;
    r.alpha = std::exp(log_alpha);
    const double log_bound = log_alpha - static_cast<double>(m) / (4.0 * n + 2.0);
    r.bound = std::clamp(std::exp(std::min(0.0, log_bound)), 0.0, 1.0);
    r.decay_rate = 1.0 / ((4.0 * n + 2.0) * std::log(2.0));
    return r;
}

inline TailBoundResult tail_optimized(const TailObjective& obj, std::int64_t m) {
    const double n = obj.photons();
    const double norm = obj.norm();
    const double x_closed = 8.0 * n + 4.0;
    const double cap = 700.0 / (2.0 * static_cast<double>(m) + 1.0);
    const double delta = 1e-6 * (1.0 + norm);
    double t_hi = obj.free_boundary() ? cap : std::min(cap, arccoth(norm + delta));
    double t_lo = std::min(arccoth(10.0 * x_closed), 0.5 * t_hi);
    auto f = [&](double t) { return obj.log_value(t, m); };

    // Coarse logarithmic scan, then golden-section refinement around the best node.
    constexpr int kNodes = 64;
    const double ratio = std::log(t_hi / t_lo);
    auto node = [&](int j) { return t_lo * std::exp(ratio * j / (kNodes - 1)); };
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kNodes; ++j) {
        const double v = f(node(j));
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    double a = node(std::max(0, best - 1));
    double b = node(std::min(kNodes - 1, best + 1));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    double t_best = node(best);
    if (fc < best_val) {
        best_val = fc;
        t_best = c;
    }
    if (fd < best_val) {
        best_val = fd;
        t_best = d;
    }

    TailBoundResult r;
    const double t_closed = arccoth(x_closed);
    const double v_closed = f(t_closed);
    if (!std::isfinite(best_val) && !(best_val == -std::numeric_limits<double>::infinity())) {
        r.fallback = true;
        best_val = v_closed;
        t_best = t_closed;
    } else if (v_closed <= best_val) {
        best_val = v_closed;
        t_best = t_closed;
    }
    r.optimizer_x = 1.0 / std::tanh(t_best);
    r.alpha = std::exp(obj.log_prefactor(t_best));
    r.bound = std::clamp(std::exp(std::min(0.0, best_val)), 0.0, 1.0);
    r.decay_rate = 2.0 * t_best / std::log(2.0);
    return r;
}

}  // namespace detail

// P(N > M) <= alpha e^{-M/(4N+2)}, alpha = e^{m^T((8N+4) - V)^{-1} m} / sqrt(det[((8N+4) - V)/(8N+3)]).
inline TailBoundResult tail_bound_closed(const GaussianState& s, std::int64_t m) {
    detail::require(m >= 0, "tail bound: cutoff M must be >= 0");
    return detail::tail_closed(detail::TailObjective(s), m);
}

// Infimum over x > ||V||_inf of e^{m^T(x - V)^{-1} m} / sqrt(det[(x - V)/(x - 1)]) e^{-2 arccoth(x) M}.
inline TailBoundResult tail_bound_optimized(const GaussianState& s, std::int64_t m) {
    detail::require(m >= 0, "tail bound: cutoff M must be >= 0");
    return detail::tail_optimized(detail::TailObjective(s), m);
}

// 1/2 || rho - rho_M ||_1 <= sqrt(P(N > M))
inline double trace_distance_truncation_bound(const GaussianState& s, std::int64_t m) {
    return std::sqrt(tail_bound_optimized(s, m).bound);
}

// Smallest M with trace_distance_truncation_bound(s, M) <= target, found by
// doubling and bisection.
inline std::int64_t cutoff_for_error(const GaussianState& s, double target, std::int64_t cap = kDefaultCutoffCap) {
    detail::require(target > 0.0 && target < 1.0, "cutoff_for_error: target must lie in (0, 1)");
    detail::TailObjective obj(s);
    auto ok = [&](std::int64_t m) { return std::sqrt(detail::tail_optimized(obj, m).bound) <= target; };
    if (ok(0)) return 0;
    std::int64_t hi = 1;
    while (!ok(hi)) {
        if (hi >= cap)
            throw resource_error("cutoff_for_error: no cutoff M <= " + std::to_string(cap) +
                                 " reaches trace-distance error " + std::to_string(target));
        hi = std::min(cap, 2 * hi);
    }
    std::int64_t lo = hi / 2;  // ok(lo) is false or lo == 0 already excluded
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Cutoff M = ceil(9 N / eps^2) from 1/2 || rho - rho_M ||_1 <= sqrt(N / M) for arbitrary states.
inline std::int64_t cutoff_nongaussian(double mean_photons, double eps) {
    detail::require(mean_photons >= 0.0, "cutoff_nongaussian: mean photon number must be >= 0");
    detail::require(eps > 0.0 && eps < 1.0, "cutoff_nongaussian: eps must lie in (0, 1)");
    const double raw = 9.0 * mean_photons / (eps * eps);
    return static_cast<std::int64_t>(std::ceil(raw * (1.0 - 1e-12)));
}

}  // namespace bosonic
