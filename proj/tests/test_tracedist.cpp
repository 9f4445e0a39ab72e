#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bosonic;

namespace {

FockMatrix diagonal(const std::vector<double>& d) {
    CMatrix x = CMatrix::Zero(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) x(i, i) = d[i];
    return FockMatrix{enumerate_basis(1, static_cast<int>(d.size()) - 1), x};
}

// 1/2 sum_k |p_k - q_k| for two thermal states
double thermal_oracle(double n1, double n2) {
    double s = 0.0;
    for (int k = 0; k < 20000; ++k) s += std::abs(support::thermal_p(n1, k) - support::thermal_p(n2, k));
    return 0.5 * s;
}

GaussianState coherent(double re, double im) {
    Vector m(2);
    m << std::sqrt(2.0) * re, std::sqrt(2.0) * im;
    return GaussianState(m, Matrix::Identity(2, 2));
}

}  // namespace

TEST(FiniteTraceDistance, Examples) {
    FockMatrix a = diagonal({1.0, 0.0}), b = diagonal({0.0, 1.0});
    EXPECT_NEAR(finite_trace_distance(a, a), 0.0, 1e-16);
    EXPECT_NEAR(finite_trace_distance(a, b), 1.0, 1e-15);
    FockMatrix t = truncate_normalize(diagonal({0.5, 0.25, 0.125}));
    EXPECT_NEAR(finite_trace_distance(t, diagonal({1.0, 0.0, 0.0})), 3.0 / 7.0, 1e-15);
}

TEST(FiniteTraceDistance, SymmetricWithResidual) {
    std::mt19937_64 rng(support::kSeed + 40);
    FockMatrix a = truncate_normalize(fock_matrix_elements(support::random_state(2, rng, 1.0, 0.5), 8));
    FockMatrix b = truncate_normalize(fock_matrix_elements(support::random_state(2, rng, 1.0, 0.5), 8));
    FiniteTraceDistance ab = finite_trace_distance_detail(a, b), ba = finite_trace_distance_detail(b, a);
    EXPECT_LE(std::abs(ab.value - ba.value), 2.0 * std::max(ab.residual, ba.residual));
    EXPECT_GT(ab.residual, 0.0);
    EXPECT_LT(ab.residual, 1e-10);
}

TEST(FiniteTraceDistance, PureStatesMatchFidelity) {
    // For pure states, 1/2 ||psi - phi||_1 = sqrt(1 - |<psi|phi>|^2).
    const int d = 5;
    CVector u(d), v(d);
    u << 1.0, 0.5, std::complex<double>(0.0, 0.3), 0.2, -0.1;
    v << 0.2, -0.4, 1.0, std::complex<double>(0.1, 0.1), 0.3;
    u.normalize();
    v.normalize();
    FockBasis basis = enumerate_basis(1, d - 1);
    double expected = std::sqrt(1.0 - std::norm(u.dot(v)));
    EXPECT_NEAR(finite_trace_distance(FockMatrix{basis, u * u.adjoint()}, FockMatrix{basis, v * v.adjoint()}), expected,
                1e-14);
}

TEST(FiniteTraceDistance, BasisMismatchThrows) {
    EXPECT_THROW(finite_trace_distance(diagonal({1.0, 0.0}), diagonal({1.0, 0.0, 0.0})), validation_error);
}

TEST(GaussianTraceDistance, SelfDistanceIsZero) {
    TraceDistanceResult r = gaussian_trace_distance(thermal_state(1.0), thermal_state(1.0), 1e-3);
    EXPECT_LE(r.estimate, 1e-3);
    EXPECT_LE(r.certified_error, 1e-3);
}

TEST(GaussianTraceDistance, VacuumVersusThermal) {
    const double eps = 1e-3;
    TraceDistanceResult r = gaussian_trace_distance(vacuum_state(1), thermal_state(1.0), eps);
    EXPECT_NEAR(r.estimate, 0.5, eps);
    EXPECT_NEAR(thermal_oracle(0.0, 1.0), 0.5, 1e-15);
    EXPECT_LE(r.certified_error, eps);
    EXPECT_LE(r.tail_bounds.first, eps / 3.0);
    EXPECT_LE(r.tail_bounds.second, eps / 3.0);
    EXPECT_EQ(r.fock_dim, r.cutoff + 1);
}

TEST(GaussianTraceDistance, ThermalPairsMatchDiagonalOracle) {
    const double eps = 1e-4;
    TraceDistanceResult r = gaussian_trace_distance(thermal_state(0.5), thermal_state(1.0), eps);
    EXPECT_NEAR(r.estimate, thermal_oracle(0.5, 1.0), eps);
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 0.3}, {0.2, 2.0}, {1.5, 3.0}}) {
        TraceDistanceResult q = gaussian_trace_distance(thermal_state(a), thermal_state(b), 1e-3);
        EXPECT_NEAR(q.estimate, thermal_oracle(a, b), 1e-3);
    }
}

TEST(GaussianTraceDistance, CoherentStatesMatchOverlapFormula) {
    GaussianState a = coherent(0.6, 0.0), b = coherent(-0.2, 0.5);
    const double eps = 1e-3;
    double expected = std::sqrt(1.0 - std::exp(-(0.8 * 0.8 + 0.5 * 0.5)));
    TraceDistanceResult r = gaussian_trace_distance(a, b, eps);
    EXPECT_NEAR(r.estimate, expected, eps);
    EXPECT_NEAR(r.estimate, std::sqrt(1.0 - gaussian_overlap(a, b)), eps);
}

TEST(GaussianTraceDistance, SqueezedPureStatesMatchOverlapFormula) {
    Matrix v1 = Matrix::Identity(2, 2), v2 = Matrix::Identity(2, 2);
    v1(0, 0) = std::exp(-0.6);
    v1(1, 1) = std::exp(0.6);
    v2(0, 0) = std::exp(0.4);
    v2(1, 1) = std::exp(-0.4);
    GaussianState a(Vector::Zero(2), v1), b(Vector::Zero(2), v2);
    TraceDistanceResult r = gaussian_trace_distance(a, b, 1e-3);
    EXPECT_NEAR(r.estimate, std::sqrt(1.0 - gaussian_overlap(a, b)), 1e-3);
}

TEST(GaussianTraceDistance, SymmetricAndInRange) {
    std::mt19937_64 rng(support::kSeed + 41);
    for (int trial = 0; trial < 3; ++trial) {
        GaussianState a = support::random_state(1, rng, 1.0, 0.8), b = support::random_state(1, rng, 1.0, 0.8);
        TraceDistanceResult ab = gaussian_trace_distance(a, b, 1e-3), ba = gaussian_trace_distance(b, a, 1e-3);
        EXPECT_NEAR(ab.estimate, ba.estimate, 1e-12);
        EXPECT_GE(ab.estimate, 0.0);
        EXPECT_LE(ab.estimate, 1.0);
        EXPECT_LE(ab.certified_error, 1e-3);
    }
}

TEST(GaussianTraceDistance, TriangleInequalityOnThermalTriples) {
    const double eps = 1e-3;
    double ab = gaussian_trace_distance(thermal_state(0.2), thermal_state(0.9), eps).estimate;
    double bc = gaussian_trace_distance(thermal_state(0.9), thermal_state(2.0), eps).estimate;
    double ac = gaussian_trace_distance(thermal_state(0.2), thermal_state(2.0), eps).estimate;
    EXPECT_LE(ac, ab + bc + 3.0 * eps);
}

TEST(GaussianTraceDistance, BeamSplitterInvariance) {
    const double eps = 0.02;
    GaussianState a = thermal_state(0.3), b = thermal_state(0.6);
    double direct = gaussian_trace_distance(a, b, eps).estimate;
    SymplecticTransform u = beam_splitter(0.4);
    GaussianState ua = apply_transform(tensor(a, vacuum_state(1)), u);
    GaussianState ub = apply_transform(tensor(b, vacuum_state(1)), u);
    double rotated = gaussian_trace_distance(ua, ub, eps).estimate;
    EXPECT_NEAR(rotated, direct, 2.0 * eps);
    EXPECT_NEAR(direct, thermal_oracle(0.3, 0.6), eps);
}

TEST(GaussianTraceDistance, Errors) {
    EXPECT_THROW(gaussian_trace_distance(vacuum_state(1), vacuum_state(2), 0.1), validation_error);
    EXPECT_THROW(gaussian_trace_distance(vacuum_state(1), vacuum_state(1), 0.0), validation_error);
    EXPECT_THROW(gaussian_trace_distance(vacuum_state(1), vacuum_state(1), 1.0), validation_error);
    EXPECT_THROW(gaussian_trace_distance(thermal_state(5.0), thermal_state(5.0), 1e-3, 50), resource_error);
    GaussianState bad(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    EXPECT_THROW(gaussian_trace_distance(bad, vacuum_state(1), 0.1), validation_error);
}
