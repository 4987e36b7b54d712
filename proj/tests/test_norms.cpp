#include "entrain/linalg.hpp"
#include "entrain/norms.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace entrain;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 2.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

std::vector<NormSpec> norm_family(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> w(0.2, 3.0);
    Vector weights(n);
    for (Eigen::Index i = 0; i < n; ++i) weights(i) = w(rng);
    Matrix full = random_matrix(rng, n) + 4.0 * Matrix::Identity(n, n);
    return {NormSpec(NormKind::L1),
            NormSpec(NormKind::L2),
            NormSpec(NormKind::Linf),
            NormSpec::diagonal(NormKind::L1, weights),
            NormSpec::diagonal(NormKind::L2, weights),
            NormSpec(NormKind::L2, full),
            NormSpec(NormKind::L1, full),
            NormSpec(NormKind::Linf, full)};
}

} // namespace

TEST(VectorNorm, L1OfSimpleVector) { EXPECT_DOUBLE_EQ(vector_norm(NormSpec(NormKind::L1), Vector{{1.0, -2.0}}), 3.0); }

TEST(VectorNorm, ScaledL2) {
    EXPECT_DOUBLE_EQ(vector_norm(NormSpec::diagonal(NormKind::L2, Vector{{2.0, 1.0}}), Vector{{1.0, 0.0}}), 2.0);
}

TEST(VectorNorm, ScaledL1WithTranscriptionalWeight) {
    const double d = 0.9161;
    EXPECT_NEAR(vector_norm(NormSpec::diagonal(NormKind::L1, Vector{{d, 1.0}}), Vector{{1.0, 1.0}}), 1.9161, 1e-15);
}

TEST(VectorNorm, LinfAndZero) {
    EXPECT_DOUBLE_EQ(vector_norm(NormSpec(NormKind::Linf), Vector{{1.0, -5.0, 2.0}}), 5.0);
    EXPECT_EQ(vector_norm(NormSpec(NormKind::L2), Vector::Zero(3)), 0.0);
}

TEST(VectorNorm, DimensionMismatchThrows) {
    const NormSpec spec = NormSpec::diagonal(NormKind::L1, Vector{{1.0, 2.0}});
    EXPECT_THROW(vector_norm(spec, Vector::Ones(3)), DimensionError);
}

TEST(NormSpec, SingularScalingRejected) {
    Matrix d(2, 2);
    d << 1.0, 2.0, 2.0, 4.0;
    EXPECT_THROW(NormSpec(NormKind::L2, d), InputError);
    EXPECT_THROW(NormSpec::diagonal(NormKind::L1, Vector{{1.0, 0.0}}), InputError);
    EXPECT_THROW(NormSpec(NormKind::L1, Matrix::Ones(2, 3)), DimensionError);
}

TEST(NormSpec, ParseAndDescribe) {
    EXPECT_EQ(parse_norm_kind("l1"), NormKind::L1);
    EXPECT_EQ(parse_norm_kind("linf"), NormKind::Linf);
    EXPECT_THROW(parse_norm_kind("l3"), InputError);
    EXPECT_EQ(NormSpec(NormKind::L2).describe(), "l2");
    EXPECT_EQ(NormSpec::diagonal(NormKind::L1, Vector{{0.5, 1.0}}).describe(), "l1[D=diag(0.5,1)]");
}

TEST(MatrixMeasure, L1ColumnSums) {
    Matrix a(2, 2);
    a << -2.0, 1.0, 0.5, -3.0;
    EXPECT_DOUBLE_EQ(matrix_measure(NormSpec(NormKind::L1), a), -1.5);
}

TEST(MatrixMeasure, LinfRowSums) {
    Matrix a(2, 2);
    a << -2.0, 1.0, 0.5, -3.0;
    EXPECT_DOUBLE_EQ(matrix_measure(NormSpec(NormKind::Linf), a), -1.0);
}

TEST(MatrixMeasure, L2OfDiagonal) {
    EXPECT_NEAR(matrix_measure(NormSpec(NormKind::L2), Matrix(Vector{{-1.0, -2.0}}.asDiagonal())), -1.0, 1e-14);
}

TEST(MatrixMeasure, L2MatchesQuadraticFormula) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix a = random_matrix(rng, 2);
        const auto [lo, hi] = oracle::sym2_eigs(a(0, 0), 0.5 * (a(0, 1) + a(1, 0)), a(1, 1));
        (void)lo;
        EXPECT_NEAR(matrix_measure(NormSpec(NormKind::L2), a), hi, 1e-12);
    }
}

TEST(MatrixMeasure, ZeroMatrixHasZeroMeasure) {
    for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
        EXPECT_EQ(matrix_measure(NormSpec(k), Matrix::Zero(3, 3)), 0.0);
    }
}

TEST(MatrixMeasure, TranscriptionalJacobianCertified) {
    const double delta = 1.0, k1 = 1.0, k2 = 5.0, eT = 2.0;
    const double d = oracle::transmod_d(delta, k1, k2, eT);
    const double eta = oracle::transmod_eta(delta, k1, k2, eT, d);
    EXPECT_NEAR(d, 0.9161, 1e-4);
    EXPECT_NEAR(eta, 0.0839, 1e-4);
    const NormSpec spec = NormSpec::diagonal(NormKind::L1, Vector{{d, 1.0}});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> x1(0.0, (1.0 + k1 * eT) / delta), x2(0.0, eT);
    for (int i = 0; i < 500; ++i) {
        const double a = x1(rng), b = x2(rng);
        Matrix j(2, 2);
        j << -delta - k2 * (eT - b), k1 + k2 * a, k2 * (eT - b), -k1 - k2 * a;
        EXPECT_LE(matrix_measure(spec, j), -eta + 1e-12);
    }
}

TEST(MatrixMeasure, NonSquareRejected) {
    EXPECT_THROW(matrix_measure(NormSpec(NormKind::L1), Matrix::Ones(2, 3)), DimensionError);
    EXPECT_THROW(matrix_measure(NormSpec::diagonal(NormKind::L1, Vector::Ones(2)), Matrix::Ones(3, 3)),
                 DimensionError);
}

TEST(MatrixMeasure, ScaledConsistency) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const Matrix a = random_matrix(rng, n);
        const Matrix d = random_matrix(rng, n) + 5.0 * Matrix::Identity(n, n);
        const Matrix conj = d * a * d.inverse();
        for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
            EXPECT_NEAR(matrix_measure(NormSpec(k, d), a), matrix_measure(NormSpec(k), conj), 1e-12 * (1.0 + conj.norm()));
        }
    }
}

TEST(MatrixMeasure, SubadditivityAndHomogeneity) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Matrix a = random_matrix(rng, n);
        const Matrix b = random_matrix(rng, n);
        for (const NormSpec& spec : norm_family(rng, n)) {
            const double mu_a = matrix_measure(spec, a);
            EXPECT_LE(matrix_measure(spec, a + b), mu_a + matrix_measure(spec, b) + 1e-9);
            for (double c : {0.0, 0.3, 1.0, 4.0, 25.0}) {
                EXPECT_NEAR(matrix_measure(spec, c * a), c * mu_a, 1e-9 * (1.0 + std::abs(c * mu_a)));
            }
            EXPECT_TRUE(measure_subadditivity_check(spec, a, b));
        }
    }
}

TEST(MatrixMeasure, DominatesSpectralAbscissa) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Matrix a = random_matrix(rng, n);
        const double alpha = spectral_abscissa(a);
        if (n == 2) {
            EXPECT_NEAR(alpha, oracle::abscissa2(a(0, 0), a(0, 1), a(1, 0), a(1, 1)), 1e-10);
        }
        for (const NormSpec& spec : norm_family(rng, n)) {
            EXPECT_GE(matrix_measure(spec, a), alpha - 1e-9);
        }
    }
}

TEST(SubadditivityCheck, SpecExamples) {
    const Matrix i2 = Matrix::Identity(2, 2);
    EXPECT_TRUE(measure_subadditivity_check(NormSpec(NormKind::L1), i2, -i2));
    std::mt19937_64 rng(3);
    EXPECT_TRUE(measure_subadditivity_check(NormSpec(NormKind::L2), random_matrix(rng, 3), random_matrix(rng, 3)));
    EXPECT_THROW(measure_subadditivity_check(NormSpec(NormKind::L1), i2, i2, {-1.0}), InputError);
    EXPECT_THROW(measure_subadditivity_check(NormSpec(NormKind::L1), i2, Matrix::Identity(3, 3)), DimensionError);
}
