// capacity.hpp
// Asymptotic and n-shot capacity bounds for the pure loss and pure amplifier
// channels, the generic AEP lower bound for Gaussian channels, and
// channel-complexity inversion. All values are in bits.

#pragma once

#include "gaussian.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bosonic {

enum class Task { Q, Q2, K };
enum class Direction { lower, upper };
enum class Method { asymptotic, aep, improved_variance, ec_aep, ec_variance, mmmm_upper };
enum class ChannelKind { loss, amplifier };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Channel {
    ChannelKind kind = ChannelKind::loss;
    double param = 1.0;  // transmissivity lambda or gain g

    static Channel loss(double lambda) {
        detail::require(lambda >= 0.0 && lambda <= 1.0, "pure loss: lambda must lie in [0, 1]");
        return {ChannelKind::loss, lambda};
    }
    static Channel amplifier(double gain) {
        detail::require(gain >= 1.0 && std::isfinite(gain), "pure amplifier: g must be finite and >= 1");
        return {ChannelKind::amplifier, gain};
    }
};

// value = linear * n - sqrt_n * sqrt(n) - constant for every family; further
// entries record the ingredients (Petz terms, variances).
struct CapacityBound {
    double value = 0.0;
    Direction direction = Direction::lower;
    Task task = Task::Q2;
    Method method = Method::asymptotic;
    std::int64_t n = 0;
    double eps = 0.0;
    std::optional<Channel> channel;  // empty for the generic Gaussian-channel bound
    std::optional<double> ns;
    bool preconditions_met = true;
    std::string precondition_reason;
    bool vacuous = false;
    std::map<std::string, double> breakdown;
};

inline std::string to_string(Task t) {
    switch (t) {
        case Task::Q: return "Q";
        case Task::Q2: return "Q2";
        case Task::K: return "K";
    }
    return "?";
}

inline std::string to_string(Direction d) { return d == Direction::lower ? "lower" : "upper"; }

inline std::string to_string(Method m) {
    switch (m) {
        case Method::asymptotic: return "asymptotic";
        case Method::aep: return "aep";
        case Method::improved_variance: return "improved_variance";
        case Method::ec_aep: return "ec_aep";
        case Method::ec_variance: return "ec_variance";
        case Method::mmmm_upper: return "mmmm_upper";
    }
    return "?";
}

inline std::string to_string(ChannelKind k) { return k == ChannelKind::loss ? "loss" : "amp"; }

inline Task parse_task(const std::string& s) {
    if (s == "Q") return Task::Q;
    if (s == "Q2") return Task::Q2;
    if (s == "K") return Task::K;
    throw validation_error("unknown task '" + s + "' (expected Q, Q2 or K)");
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::asymptotic, Method::aep, Method::improved_variance, Method::ec_aep, Method::ec_variance,
                     Method::mmmm_upper})
        if (to_string(m) == s) return m;
    throw validation_error("unknown method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Asymptotic capacities

// Loss: Q = max(0, log2(lambda/(1-lambda))), Q2 = K = log2(1/(1-lambda)).
// Amplifier: Q = Q2 = K = log2(g/(g-1)). lambda = 1 and g = 1 give +inf.
inline double asymptotic_capacity(const Channel& ch, Task task) {
    if (ch.kind == ChannelKind::loss) {
        const double l = ch.param;
        if (l == 1.0) return kInfinity;
        if (task == Task::Q) return l <= 0.5 ? 0.0 : std::log2(l / (1.0 - l));
        return -std::log2(1.0 - l);
    }
    const double g = ch.param;
    if (g == 1.0) return kInfinity;
    return std::log2(g / (g - 1.0));
}

// Loss Q: max(0, h(lambda Ns) - h((1-lambda) Ns)); loss Q2/K: R = h(Ns) - h((1-lambda) Ns);
// amplifier (all tasks): h(g Ns + g - 1) - h((g-1)(Ns+1)).
inline double ec_asymptotic(const Channel& ch, Task task, double ns) {
    detail::require(ns >= 0.0 && std::isfinite(ns), "ec_asymptotic: N_s must be finite and >= 0");
    if (ch.kind == ChannelKind::loss) {
        const double l = ch.param;
        if (task == Task::Q) return std::max(0.0, h_function(l * ns) - h_function((1.0 - l) * ns));
        return h_function(ns) - h_function((1.0 - l) * ns);
    }
    const double g = ch.param;
    return h_function(g * ns + g - 1.0) - h_function((g - 1.0) * (ns + 1.0));
}

// ---------------------------------------------------------------------------
// Conditional Petz-Renyi entropies of the channel output on a TMSV input

struct PetzTermsLoss {
    double ab, ae, ba, be;
};

struct PetzTermsAmplifier {
    double ab, ae;
};

inline PetzTermsLoss petz_terms_pure_loss(double lambda, double ns) {
    detail::require(lambda > 0.0 && lambda < 1.0, "petz_terms_pure_loss: lambda must lie in (0, 1)");
    detail::require(ns > 0.0 && std::isfinite(ns), "petz_terms_pure_loss: N_s must be finite and > 0");
    const double l = lambda, e = 1.0 - lambda, n = ns;
    const double root_a = std::sqrt(l * n * (1.0 + l * n));
    const double root_e = std::sqrt(e * n * (1.0 + e * n));
    const double root_n = std::sqrt(n * (1.0 + n));
    const double log2_num = std::log2(1.0 + 2.0 * e * n + 2.0 * root_e) + std::log2(1.0 + 2.0 * l * n + 2.0 * root_a);
    const double log2_num2 = std::log2(1.0 + 2.0 * n + 2.0 * root_n) + std::log2(1.0 + 2.0 * e * n + 2.0 * root_e);
    const double den_ab = 1.0 + root_a + l * (2.0 * n + std::sqrt(e * n * n * n / (1.0 + e * n)));
    const double den_ae = 1.0 + root_e + e * (2.0 * n + std::sqrt(l * n * n * n / (1.0 + l * n)));
    const double den_ba = 1.0 + 2.0 * n + root_n + (1.0 + n) * std::sqrt(1.0 - 1.0 / (1.0 + e * n));
    const double den_be = 1.0 + e * (2.0 * n + root_n) + root_e;
    return {log2_num - 2.0 * std::log2(den_ab), log2_num - 2.0 * std::log2(den_ae),
            log2_num2 - 2.0 * std::log2(den_ba), log2_num2 - 2.0 * std::log2(den_be)};
}

inline PetzTermsAmplifier petz_terms_amplifier(double gain, double ns) {
    detail::require(gain > 1.0 && std::isfinite(gain), "petz_terms_amplifier: g must be finite and > 1");
    detail::require(ns > 0.0 && std::isfinite(ns), "petz_terms_amplifier: N_s must be finite and > 0");
    const double g = gain, n = ns;
    const double log2_num = std::log2(2.0 * g * (1.0 + n) - 1.0 + 2.0 * std::sqrt(g * (1.0 + n) * (g * (1.0 + n) - 1.0))) +
                            std::log2(2.0 * g * (1.0 + n) - 1.0 - 2.0 * n +
                                      2.0 * std::sqrt((g - 1.0) * (1.0 + n) * (g + (g - 1.0) * n)));
    const double den_ab = g * (2.0 * n + 1.0) + std::sqrt(g * n * (g * n + 1.0)) +
                          g * (n + 1.0) * std::sqrt((g - 1.0) * (n + 1.0) / ((g - 1.0) * n + g));
    const double den_ae = g + (g - 1.0) * (2.0 * n + 1.0) + std::sqrt((g - 1.0) * (n + 1.0) * ((g - 1.0) * n + g)) +
                          (g - 1.0) * (n + 1.0) * std::sqrt((g * n + g) / (g * n + g - 1.0));
    return {log2_num - 2.0 * std::log2(den_ab), log2_num - 2.0 * std::log2(den_ae)};
}

// Tripartite state (A, B, E) produced by sending one arm of tmsv(Ns) through the channel.
inline GaussianState channel_tripartite_state(const Channel& ch, double ns) {
    ChannelDilation dil = ch.kind == ChannelKind::loss ? dilate_pure_loss(ch.param) : dilate_pure_amplifier(ch.param);
    return stinespring_output(dil, tmsv_state(ns));
}

// ---------------------------------------------------------------------------
// Shared pieces of the n-shot bounds

// n >= 2 log2(2/eps^2)
inline double aep_threshold(double eps) { return 2.0 * std::log2(2.0 / (eps * eps)); }

namespace detail {

inline void require_eps(double eps) { require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)"); }

inline void require_n(std::int64_t n) { require(n >= 1, "number of channel uses n must be >= 1"); }

// sqrt(log2(2^9/eps^2)) for Q, sqrt(log2(8/eps)) for Q2/K
inline double aep_sqrt_factor(Task task, double eps) {
    return task == Task::Q ? std::sqrt(std::log2(512.0 / (eps * eps))) : std::sqrt(std::log2(8.0 / eps));
}

// log2(2^18/(3 eps^4)) for Q, log2(16/eps^2) for Q2/K
inline double aep_constant(Task task, double eps) {
    return task == Task::Q ? 18.0 - std::log2(3.0) - 4.0 * std::log2(eps) : 4.0 - 2.0 * std::log2(eps);
}

// 4 log2(sqrt(2^H1) + sqrt(2^H2) + 1)
inline double aep_log_term(double h1, double h2) {
    return 4.0 * std::log2(std::exp2(0.5 * h1) + std::exp2(0.5 * h2) + 1.0);
}

// log2(2^23 (32-eps)^2 / ((16-eps) eps^6)) for Q,
// log2(2^6 3 (4-sqrt eps)^2 / ((2-sqrt eps) eps^3)) for Q2/K
inline double improved_constant(Task task, double eps) {
    if (task == Task::Q)
        return 23.0 + 2.0 * std::log2(32.0 - eps) - std::log2(16.0 - eps) - 6.0 * std::log2(eps);
    const double r = std::sqrt(eps);
    return 6.0 + std::log2(3.0) + 2.0 * std::log2(4.0 - r) - std::log2(2.0 - r) - 3.0 * std::log2(eps);
}

inline double assemble(double a, double b, double c, std::int64_t n) {
    const double nd = static_cast<double>(n);
    if (std::isinf(a)) return a > 0 ? kInfinity : -kInfinity;
    if (std::isinf(b)) return -kInfinity;
    return a * nd - b * std::sqrt(nd) - c;
}

inline CapacityBound make_bound(Direction dir, Task task, Method method, std::optional<Channel> ch, std::optional<double> ns,
                                std::int64_t n, double eps, double a, double b, double c) {
    CapacityBound out;
    out.direction = dir;
    out.task = task;
    out.method = method;
    out.channel = ch;
    out.ns = ns;
    out.n = n;
    out.eps = eps;
    out.value = assemble(a, b, c, n);
    out.vacuous = dir == Direction::lower && out.value < 0.0;
    out.breakdown["linear"] = a;
    out.breakdown["sqrt_n"] = b;
    out.breakdown["constant"] = c;
    return out;
}

inline void flag_aep_threshold(CapacityBound& out) {
    const double t = aep_threshold(out.eps);
    if (static_cast<double>(out.n) < t) {
        out.preconditions_met = false;
        out.precondition_reason = "n = " + std::to_string(out.n) + " is below the AEP threshold 2 log2(2/eps^2) = " +
                                  std::to_string(t);
    }
}

inline void require_interior(const Channel& ch, const char* what) {
    if (ch.kind == ChannelKind::loss)
        require(ch.param > 0.0 && ch.param < 1.0, std::string(what) + ": lambda must lie in (0, 1)");
    else
        require(ch.param > 1.0, std::string(what) + ": g must be > 1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lower bounds from the asymptotic equipartition property

// Generic Gaussian channel with a pure input on A (x) A'; the ancilla A is the
// leading input.modes() - ch.input_modes modes.
inline CapacityBound aep_lower_bound_generic(const ChannelDilation& ch, const GaussianState& input, std::int64_t n,
                                             double eps, Task task) {
    detail::require_eps(eps);
    detail::require_n(n);
    require_valid(input);
    Vector d = symplectic_eigenvalues(input.cov());
    const double purity_tol = std::max(1e-6, detail::symplectic_noise_floor(detail::spectral_norm_sym(input.cov())));
    for (int k = 0; k < d.size(); ++k)
        if (std::abs(d(k) - 1.0) > purity_tol)
            throw validation_error("aep_lower_bound_generic: input state must be pure (symplectic eigenvalue " +
                                   std::to_string(d(k)) + ")");
    const int n_anc = input.modes() - ch.input_modes;
    detail::require(n_anc >= 1, "aep_lower_bound_generic: input needs at least one ancilla mode");
    GaussianState psi = stinespring_output(ch, input);
    const std::vector<int> a = detail::range(0, n_anc);
    const std::vector<int> b = detail::range(n_anc, n_anc + ch.input_modes);
    const std::vector<int> e = detail::range(n_anc + ch.input_modes, psi.modes());

    const double s_ab = von_neumann_entropy(reduce(psi, detail::concat(a, b)));
    const double ic_direct = von_neumann_entropy(reduce(psi, b)) - s_ab;
    const double ic_reverse = von_neumann_entropy(reduce(psi, a)) - s_ab;
    const double sq = detail::aep_sqrt_factor(task, eps);
    const double c = detail::aep_constant(task, eps);

    auto petz = [&](const std::vector<int>& x, const std::vector<int>& y) {
        return y.empty() ? -kInfinity : petz_conditional_entropy_half(psi, x, y);
    };
    const double h_ab = petz(a, b);
    const double h_ae = petz(a, e);
    const double b_direct = detail::aep_log_term(h_ab, h_ae) * sq;

    CapacityBound best = detail::make_bound(Direction::lower, task, Method::aep, std::nullopt, std::nullopt, n, eps, ic_direct,
                                            b_direct, c);
    best.breakdown["I_c(A>B)"] = ic_direct;
    best.breakdown["H(A|B)"] = h_ab;
    best.breakdown["H(A|E)"] = h_ae;
    if (task != Task::Q) {
        const double h_ba = petz(b, a);
        const double h_be = petz(b, e);
        const double b_reverse = detail::aep_log_term(h_ba, h_be) * sq;
        CapacityBound rev = detail::make_bound(Direction::lower, task, Method::aep, std::nullopt, std::nullopt, n, eps,
                                               ic_reverse, b_reverse, c);
        rev.breakdown["I_c(B>A)"] = ic_reverse;
        rev.breakdown["H(B|A)"] = h_ba;
        rev.breakdown["H(B|E)"] = h_be;
        if (rev.value > best.value) best = rev;
    }
    detail::flag_aep_threshold(best);
    return best;
}

namespace detail {

inline CapacityBound aep_closed(const Channel& ch, std::int64_t n, double eps, Task task) {
    require_eps(eps);
    require_n(n);
    require_interior(ch, "aep_lower_bound");
    double a, b;
    const double p = ch.param;
    if (ch.kind == ChannelKind::loss) {
        a = asymptotic_capacity(ch, task);
        b = task == Task::Q ? 4.0 * std::log2(std::sqrt((1.0 - p) / p) + std::sqrt(p / (1.0 - p)) + 1.0)
                            : 4.0 * std::log2(std::sqrt(1.0 - p) + std::sqrt(1.0 / (1.0 - p)) + 1.0);
    } else {
        a = asymptotic_capacity(ch, task);
        b = 4.0 * std::log2(std::sqrt((p - 1.0) / p) + std::sqrt(p / (p - 1.0)) + 1.0);
    }
    b *= aep_sqrt_factor(task, eps);
    CapacityBound out = make_bound(Direction::lower, task, Method::aep, ch, std::nullopt, n, eps, a, b,
                                   aep_constant(task, eps));
    flag_aep_threshold(out);
    return out;
}

}  // namespace detail

inline CapacityBound aep_lower_bound_pure_loss(double lambda, std::int64_t n, double eps, Task task) {
    return detail::aep_closed(Channel::loss(lambda), n, eps, task);
}

inline CapacityBound aep_lower_bound_amplifier(double gain, std::int64_t n, double eps, Task task) {
    return detail::aep_closed(Channel::amplifier(gain), n, eps, task);
}

// ---------------------------------------------------------------------------
// Improved (entropy-variance) bounds for the pure loss channel, no energy constraint

inline CapacityBound improved_lower_bound_pure_loss(double lambda, std::int64_t n, double eps, Task task) {
    detail::require_eps(eps);
    detail::require_n(n);
    Channel ch = Channel::loss(lambda);
    return detail::make_bound(Direction::lower, task, Method::improved_variance, ch, std::nullopt, n, eps,
                              asymptotic_capacity(ch, task), 0.0, detail::improved_constant(task, eps));
}

// ---------------------------------------------------------------------------
// Upper bound n Q2 + log2 6 + 2 log2((1+eps)/(1-eps)) on the two-way and key capacities

inline CapacityBound upper_bound_nshot(const Channel& ch, std::int64_t n, double eps, Task task = Task::Q2) {
    detail::require_eps(eps);
    detail::require_n(n);
    if (ch.kind == ChannelKind::loss)
        detail::require(ch.param < 1.0, "upper_bound_nshot: lambda must be < 1");
    else
        detail::require(ch.param > 1.0, "upper_bound_nshot: g must be > 1");
    const double c = -(std::log2(6.0) + 2.0 * std::log2((1.0 + eps) / (1.0 - eps)));
    CapacityBound out = detail::make_bound(Direction::upper, task, Method::mmmm_upper, ch, std::nullopt, n, eps,
                                           asymptotic_capacity(ch, Task::Q2), 0.0, c);
    if (task == Task::Q) {
        out.preconditions_met = false;
        out.precondition_reason = "upper bound is stated for Q2 and K; reported for Q through Q <= Q2";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Energy-constrained lower bounds

// Loss Q: n Q(lambda, Ns) - sqrt(n) 4 log2(sqrt 2^H(A|B) + sqrt 2^H(A|E) + 1) sqrt(log2(2^9/eps^2)) - log2(2^18/(3 eps^4)).
// Loss Q2/K: n R - sqrt(n) 4 log2(sqrt 2^H(B|A) + sqrt 2^H(B|E) + 1) sqrt(log2(8/eps)) - log2(16/eps^2).
// Amplifier: linear term h(g Ns + g - 1) - h((g-1)(Ns+1)) with the (A|B, A|E) terms for every task.
inline CapacityBound ec_aep_lower_bound(const Channel& ch, double ns, std::int64_t n, double eps, Task task) {
    detail::require_eps(eps);
    detail::require_n(n);
    detail::require_interior(ch, "ec_aep_lower_bound");
    detail::require(ns > 0.0 && std::isfinite(ns), "ec_aep_lower_bound: N_s must be finite and > 0");
    const double a = ec_asymptotic(ch, task, ns);
    const double sq = detail::aep_sqrt_factor(task, eps);
    const double c = detail::aep_constant(task, eps);
    std::map<std::string, double> extra;
    double b;
    if (ch.kind == ChannelKind::loss) {
        PetzTermsLoss t = petz_terms_pure_loss(ch.param, ns);
        if (task == Task::Q) {
            b = detail::aep_log_term(t.ab, t.ae) * sq;
            extra = {{"H(A|B)", t.ab}, {"H(A|E)", t.ae}};
        } else {
            b = detail::aep_log_term(t.ba, t.be) * sq;
            extra = {{"H(B|A)", t.ba}, {"H(B|E)", t.be}};
        }
    } else {
        PetzTermsAmplifier t = petz_terms_amplifier(ch.param, ns);
        const double h_ab = petz_conditional_entropy_half(channel_tripartite_state(ch, ns), {0}, {1});
        b = detail::aep_log_term(h_ab, t.ae) * sq;
        extra = {{"H(A|B)", h_ab}, {"H(A|B)_closed_form", t.ab}, {"H(A|E)", t.ae}};
    }
    CapacityBound out = detail::make_bound(Direction::lower, task, Method::ec_aep, ch, ns, n, eps, a, b, c);
    out.breakdown.insert(extra.begin(), extra.end());
    detail::flag_aep_threshold(out);
    return out;
}

// Q: n Q(lambda, Ns) - 4 sqrt(n V(A|E)/eps) - log2(2^23 (32-eps)^2/((16-eps) eps^6)).
// Q2/K: n R - sqrt(2 n V(B|E)) / eps^{1/4} - log2(2^6 3 (4-sqrt eps)^2/((2-sqrt eps) eps^3)).
inline CapacityBound ec_variance_lower_bound(double lambda, double ns, std::int64_t n, double eps, Task task) {
    detail::require_eps(eps);
    detail::require_n(n);
    Channel ch = Channel::loss(lambda);
    detail::require(ns > 0.0 && std::isfinite(ns), "ec_variance_lower_bound: N_s must be finite and > 0");
    const double a = ec_asymptotic(ch, task, ns);
    double b, v;
    if (task == Task::Q) {
        v = entropy_variance_pure_loss(lambda, ns, VarianceCut::AE);
        b = 4.0 * std::sqrt(v / eps);
    } else {
        v = entropy_variance_pure_loss(lambda, ns, VarianceCut::BE);
        b = std::sqrt(2.0 * v) / std::pow(eps, 0.25);
    }
    CapacityBound out = detail::make_bound(Direction::lower, task, Method::ec_variance, ch, ns, n, eps, a, b,
                                           detail::improved_constant(task, eps));
    out.breakdown[task == Task::Q ? "V(A|E)" : "V(B|E)"] = v;
    return out;
}

// ---------------------------------------------------------------------------
// Best applicable lower bound

// Without Ns: improved (loss) and AEP families; with Ns: energy-constrained
// families. Candidates with unmet preconditions are used only when no other
// candidate remains.
inline CapacityBound best_lower_bound(const Channel& ch, std::optional<double> ns, std::int64_t n, double eps,
                                      Task task) {
    std::vector<CapacityBound> cands;
    const bool interior = ch.kind == ChannelKind::loss ? (ch.param > 0.0 && ch.param < 1.0) : ch.param > 1.0;
    if (!ns) {
        if (ch.kind == ChannelKind::loss) cands.push_back(improved_lower_bound_pure_loss(ch.param, n, eps, task));
        if (interior) cands.push_back(detail::aep_closed(ch, n, eps, task));
    } else {
        if (interior) cands.push_back(ec_aep_lower_bound(ch, *ns, n, eps, task));
        if (ch.kind == ChannelKind::loss) cands.push_back(ec_variance_lower_bound(ch.param, *ns, n, eps, task));
    }
    if (cands.empty()) throw validation_error("best_lower_bound: no bound family applies at these parameters");
    bool any_met = false;
    for (const auto& c : cands) any_met = any_met || c.preconditions_met;
    const CapacityBound* best = nullptr;
    for (const auto& c : cands) {
        if (any_met && !c.preconditions_met) continue;
        if (!best || c.value > best->value) best = &c;
    }
    return *best;
}

// ---------------------------------------------------------------------------
// Channel complexity

// Smallest integer n >= min_n with a n - b sqrt(n) - c >= k, from the root
// sqrt(n) >= (b + sqrt(b^2 + 4 a (c + k))) / (2a), checked by substitution.
inline std::int64_t invert_sqrt_bound(double a, double b, double c, double k, std::int64_t min_n = 0) {
    detail::require(a > 0.0, "invert_sqrt_bound: linear coefficient a must be > 0");
    detail::require(b >= 0.0, "invert_sqrt_bound: sqrt(n) coefficient b must be >= 0");
    detail::require(std::isfinite(b) && std::isfinite(c) && std::isfinite(k), "invert_sqrt_bound: non-finite input");
    if (std::isinf(a)) return std::max<std::int64_t>(min_n, 1);
    auto ok = [&](std::int64_t n) {
        const double nd = static_cast<double>(n);
        return a * nd - b * std::sqrt(nd) - c >= k;
    };
    std::int64_t n = 0;
    if (c + k > 0.0 || b > 0.0) {
        const double disc = b * b + 4.0 * a * std::max(0.0, c + k);
        const double root = (b + std::sqrt(disc)) / (2.0 * a);
        const double nn = std::ceil(root * root);
        detail::require(nn < 9.0e15, "invert_sqrt_bound: required n exceeds the representable range");
        n = static_cast<std::int64_t>(nn);
        while (n > 0 && ok(n - 1)) --n;
        while (!ok(n)) ++n;
    }
    return std::max(n, min_n);
}

namespace detail {

inline std::int64_t aep_min_n(double eps) { return static_cast<std::int64_t>(std::ceil(aep_threshold(eps))); }

inline std::int64_t invert_bound(const CapacityBound& b, double k, std::int64_t min_n) {
    return invert_sqrt_bound(b.breakdown.at("linear"), b.breakdown.at("sqrt_n"), b.breakdown.at("constant"), k, min_n);
}

}  // namespace detail

// Unconstrained loss: ceil((k + improved constant) / capacity). Unconstrained
// amplifier: inversion of the AEP bound. Energy-constrained: the smallest n over
// the applicable families, AEP-based families respecting their n threshold.
inline std::int64_t channel_uses_sufficient(const Channel& ch, double k, double eps, Task task,
                                            std::optional<double> ns = std::nullopt) {
    detail::require_eps(eps);
    detail::require(k > 0.0 && std::isfinite(k), "channel_uses_sufficient: k must be finite and > 0");
    if (!ns) {
        const double cap = asymptotic_capacity(ch, task);
        if (!(cap > 0.0))
            throw validation_error("channel_uses_sufficient: capacity is zero for task " + to_string(task) +
                                   " at these channel parameters");
        if (ch.kind == ChannelKind::loss)
            return invert_sqrt_bound(cap, 0.0, detail::improved_constant(task, eps), k, 1);
        if (std::isinf(cap)) return 1;
        return detail::invert_bound(detail::aep_closed(ch, 1, eps, task), k, detail::aep_min_n(eps));
    }
    std::optional<std::int64_t> best;
    auto consider = [&](const CapacityBound& b, std::int64_t min_n) {
        if (!(b.breakdown.at("linear") > 0.0)) return;
        const std::int64_t n = detail::invert_bound(b, k, min_n);
        if (!best || n < *best) best = n;
    };
    const bool interior = ch.kind == ChannelKind::loss ? (ch.param > 0.0 && ch.param < 1.0) : ch.param > 1.0;
    if (interior) consider(ec_aep_lower_bound(ch, *ns, 1, eps, task), detail::aep_min_n(eps));
    if (ch.kind == ChannelKind::loss) consider(ec_variance_lower_bound(ch.param, *ns, 1, eps, task), 1);
    if (!best)
        throw validation_error("channel_uses_sufficient: energy-constrained rate is zero for task " + to_string(task) +
                               " at these parameters");
    return *best;
}

// ceil(max(0, (k - log2(6 (1+eps)^2/(1-eps)^2)) / C)) with C = log2(1/(1-lambda)) for the
// loss channel and C = log2(g/(g-1)) for the amplifier.
inline std::int64_t channel_uses_necessary(const Channel& ch, double k, double eps) {
    detail::require_eps(eps);
    detail::require(k >= 0.0 && std::isfinite(k), "channel_uses_necessary: k must be finite and >= 0");
    detail::require_interior(ch, "channel_uses_necessary");
    const double cap = asymptotic_capacity(ch, Task::Q2);
    const double x = (k - std::log2(6.0) - 2.0 * std::log2((1.0 + eps) / (1.0 - eps))) / cap;
    if (x <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

}  // namespace bosonic
