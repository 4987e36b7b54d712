#include "entrain/models.hpp"
#include "entrain/presets.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace entrain;

namespace {

Vector random_interior(std::mt19937_64& rng, const StateBox& box) {
    std::uniform_real_distribution<double> u(0.02, 0.98);
    Vector x(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i) x(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
    return x;
}

std::vector<DynSystem> catalog() {
    Matrix a(2, 2);
    a << -1.0, 2.0, -0.5, -3.0;
    return {model_scalar_ex33(2.0),
            model_rfm2(4.0, 0.5, 4.0, 2.0),
            model_rfm({2.0, 1.0, 0.7, 1.3, 0.9}),
            model_transcriptional(1.0, 1.0, 5.0, 2.0, PeriodicInput::cosine(2.0, 1.0, 1.0)),
            model_ex52(1.0, 2.0, 10.0),
            model_lti(LtiSystem(a, Matrix(Vector{{1.0, 0.5}})), PeriodicInput::cosine(0.3, 1.0, 2.0), 10.0)};
}

} // namespace

TEST(PeriodicInput, HarmonicCheck) {
    EXPECT_THROW(PeriodicInput(0.0, {{1.0, 1.0, 0.0}}, 2.0), InputError);
    EXPECT_NO_THROW(PeriodicInput(0.0, {{1.0, 2.0 * oracle::pi, 0.0}, {0.5, 6.0 * oracle::pi, 1.0}}, 1.0));
    EXPECT_THROW(PeriodicInput(0.0, {}, 0.0), InputError);
    EXPECT_THROW(PeriodicInput(0.0, {{1.0, -1.0, 0.0}}, 2.0 * oracle::pi), InputError);
}

TEST(PeriodicInput, PeriodicityMeanAndSwing) {
    const PeriodicInput u(0.5, {{1.0, 2.0, 0.3}, {0.25, 4.0, -1.0}, {0.1, 0.0, 0.0}}, oracle::pi);
    for (double t : {0.0, 0.3, 1.7, 5.2}) EXPECT_NEAR(u(t + u.period()), u(t), 1e-13);
    EXPECT_DOUBLE_EQ(u.mean(), 0.6);
    EXPECT_DOUBLE_EQ(u.swing(), 1.25);
    const PeriodicInput s = PeriodicInput::sine(4.0, 1.0, oracle::pi);
    EXPECT_NEAR(s(0.5), 5.0, 1e-15);
    EXPECT_DOUBLE_EQ(s.period(), 2.0);
    EXPECT_DOUBLE_EQ(s.lower_bound(), 3.0);
    EXPECT_DOUBLE_EQ(s.deviation().mean(), 0.0);
    EXPECT_TRUE(PeriodicInput::constant(2.0).is_constant());
}

TEST(Ex33, FieldJacobianCertificate) {
    const DynSystem sys = model_scalar_ex33(oracle::pi);
    EXPECT_NEAR(sys.field(0.0, Vector::Constant(1, 1.0))(0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(sys.jacobian(0.7, Vector::Constant(1, 1.3))(0, 0), -1.0);
    ASSERT_TRUE(sys.analytic_certificate);
    EXPECT_DOUBLE_EQ(sys.analytic_certificate->eta, 1.0);
    EXPECT_THROW(model_scalar_ex33(0.0), InputError);
}

TEST(Ex33, ClosedFormOrbit) {
    EXPECT_NEAR(gamma_ex33(2.0 * oracle::pi, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(gamma_ex33(1e6, 0.25e6), 2.0, 1e-5);
    for (double T : {0.5, 2.0, 100.0}) {
        for (double t : {0.0, 0.1 * T, 0.77 * T}) EXPECT_NEAR(gamma_ex33(T, t), oracle::ex33_gamma(T, t), 1e-14);
    }
    EXPECT_NEAR(ex33_weighted_mismatch(3.0, 1.7), oracle::ex33_c(3.0, 1.7), 1e-14);
}

TEST(Rfm, JacobianAtOrigin) {
    const DynSystem sys = model_rfm({4.0, 0.5, 4.0});
    Matrix expected(2, 2);
    expected << -4.5, 0.0, 0.5, -4.0;
    EXPECT_LE((sys.jacobian(0.0, Vector::Zero(2)) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rfm, CertificateAndProductionRate) {
    const DynSystem sys = model_rfm2(4.0, 0.5, 4.0, 2.0);
    ASSERT_TRUE(sys.analytic_certificate);
    EXPECT_DOUBLE_EQ(sys.analytic_certificate->eta, 3.0);
    const DynSystem five = model_rfm({1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    EXPECT_DOUBLE_EQ(rfm_production_rate(five, Vector::Ones(5)), 6.0);
    EXPECT_THROW(model_rfm({1.0, -1.0, 1.0}), InputError);
    EXPECT_THROW(rfm2_certificate(0.0, 1.0), CertificationError);
    EXPECT_FALSE(model_rfm2(0.5, 0.5, 4.0, 2.0).analytic_certificate);
}

TEST(Rfm, EquilibriumClosedForm) {
    const Vector e = rfm2_equilibrium(4.0, 0.5, 4.0);
    EXPECT_NEAR(e(0), 0.8990, 5e-5);
    EXPECT_NEAR(e(1), 0.1010, 5e-5);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> rate(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double l0 = rate(rng), l1 = rate(rng), l2 = rate(rng);
        const Vector x = rfm2_equilibrium(l0, l1, l2);
        const auto [o1, o2] = oracle::rfm2_equilibrium(l0, l1, l2);
        EXPECT_NEAR(x(0), o1, 1e-10);
        EXPECT_NEAR(x(1), o2, 1e-10);
        EXPECT_GT(x(0), 0.0);
        EXPECT_LT(x(0), 1.0);
        EXPECT_LE(model_rfm({l0, l1, l2}).rhs(x, l0).cwiseAbs().maxCoeff(), 1e-12 * std::max({l0, l1, l2}));
        EXPECT_NEAR(l0 * (1.0 - x(0)), l2 * x(1), 1e-12 * (l0 + l2));
    }
}

TEST(Transcriptional, JacobianAndScaling) {
    const DynSystem sys = model_transcriptional(1.0, 1.0, 5.0, 2.0, PeriodicInput::cosine(2.0, 1.0, 1.0));
    EXPECT_DOUBLE_EQ(sys.state_jacobian(Vector{{0.3, 2.0}}, 0.0)(0, 0), -1.0);
    const ScalingChoice best = optimize_scaling_d(1.0, 1.0, 5.0, 2.0);
    EXPECT_TRUE(best.closed_form);
    EXPECT_NEAR(best.d, (-10.0 + std::sqrt(140.0)) / 2.0, 1e-12);
    EXPECT_NEAR(best.d, oracle::transmod_d(1.0, 1.0, 5.0, 2.0), 1e-12);
    EXPECT_NEAR(best.eta, 0.0839, 1e-4);
    EXPECT_NEAR(best.eta, std::min(1.0 - best.d, 1.0 + 10.0 * (1.0 - 1.0 / best.d)), 1e-12);
    EXPECT_GT(best.d, 10.0 / 11.0);
    EXPECT_LT(best.d, 1.0);
    ASSERT_TRUE(sys.analytic_certificate);
    EXPECT_NEAR(sys.analytic_certificate->eta, best.eta, 1e-15);
    EXPECT_FALSE(sys.heuristic_box);
}

TEST(Transcriptional, RandomParametersMatchOracle) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> p(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double delta = p(rng), k1 = p(rng), k2 = p(rng), eT = p(rng);
        const ScalingChoice best = optimize_scaling_d(delta, k1, k2, eT);
        EXPECT_NEAR(best.d, oracle::transmod_d(delta, k1, k2, eT), 1e-9);
        EXPECT_NEAR(best.eta, oracle::transmod_eta(delta, k1, k2, eT, best.d), 1e-12);
    }
}

TEST(Transcriptional, WeakBindingLimit) {
    const ScalingChoice best = optimize_scaling_d(1.0, 1.0, 1e-9, 1.0);
    EXPECT_NEAR(best.eta, std::min(1.0 - best.d, 1.0 + 1e-9 * (1.0 - 1.0 / best.d)), 1e-12);
    EXPECT_LT(best.d, 1e-4);
    EXPECT_NEAR(best.eta, 1.0, 1e-4);
}

TEST(Transcriptional, NegativeInputFlagsHeuristicBox) {
    const DynSystem sys = model_transcriptional(1.0, 1.0, 5.0, 2.0, PeriodicInput::cosine(0.0, 1.0, 1.0));
    EXPECT_TRUE(sys.heuristic_box);
}

TEST(Ex52, BoxAndClosedForms) {
    const DynSystem sys = model_ex52(1.5, 2.0, 30.0);
    EXPECT_DOUBLE_EQ(sys.box.lower(1), -1.5);
    EXPECT_DOUBLE_EQ(sys.box.upper(0), 2.25);
    EXPECT_NEAR(sys.analytic_certificate->eta, 0.9, 1e-15);
    EXPECT_THROW(model_ex52(1.0, 1.0, 2.0), InputError);
    for (double w : {0.1, 1.0, 3.0}) {
        double amp = 0.0;
        for (int k = 0; k < 1000; ++k) amp = std::max(amp, std::abs(ex52_gamma(1.0, w, 2.0 * oracle::pi * k / (1000 * w))(1)));
        EXPECT_NEAR(amp, 1.0 / std::sqrt(1.0 + w * w), 1e-5);
        EXPECT_NEAR(ex52_gamma(1.0, w, 0.4)(0), oracle::ex52_gamma1(1.0, w, 0.4), 1e-15);
        EXPECT_NEAR(ex52_max_gamma1(1.0, w), oracle::ex52_max_gamma1_sampled(1.0, w), 1e-12);
    }
    EXPECT_NEAR(ex52_max_gamma1(1.0, 1.0), (1.0 + std::sqrt(5.0)) / (4.0 * std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(ex52_max_gamma1(1.0, 1.0), 0.36180, 1e-5);
}

TEST(Ex52, ClosedFormSolvesTheOde) {
    const double a = 1.3, w = 2.1, h = 1e-5;
    const DynSystem sys = model_ex52(a, w, 100.0);
    for (double t : {0.0, 0.4, 1.9}) {
        const Vector d = (ex52_gamma(a, w, t + h) - ex52_gamma(a, w, t - h)) / (2.0 * h);
        EXPECT_LE((d - sys.field(t, ex52_gamma(a, w, t))).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Catalog, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(10);
    for (const DynSystem& sys : catalog()) {
        for (int trial = 0; trial < 100; ++trial) {
            const Vector x = random_interior(rng, sys.box);
            const double t = sys.period() * trial / 100.0;
            const Matrix j = sys.jacobian(t, x);
            for (Eigen::Index c = 0; c < sys.dim; ++c) {
                const double h = 1e-6 * (1.0 + std::abs(x(c)));
                Vector xp = x, xm = x;
                xp(c) += h;
                xm(c) -= h;
                const Vector fd = (sys.field(t, xp) - sys.field(t, xm)) / (2.0 * h);
                for (Eigen::Index r = 0; r < sys.dim; ++r) {
                    EXPECT_NEAR(fd(r), j(r, c), 1e-5 * (1.0 + std::abs(j(r, c)))) << sys.name;
                }
            }
            const double u = sys.input(t);
            const double hu = 1e-6 * (1.0 + std::abs(u));
            const Vector du = (sys.rhs(x, u + hu) - sys.rhs(x, u - hu)) / (2.0 * hu);
            EXPECT_LE((du - sys.input_gain(x, u)).cwiseAbs().maxCoeff(), 1e-5) << sys.name;
        }
    }
}

TEST(Catalog, FieldIsPeriodic) {
    std::mt19937_64 rng(12);
    for (const DynSystem& sys : catalog()) {
        const Vector x = random_interior(rng, sys.box);
        for (double t : {0.1, 0.9}) {
            EXPECT_LE((sys.field(t, x) - sys.field(t + sys.period(), x)).cwiseAbs().maxCoeff(), 1e-12) << sys.name;
        }
    }
}

TEST(CheckContraction, Rfm2SampledMatchesAnalytic) {
    const ContractionCertificate c = check_contraction(model_rfm2(4.0, 0.5, 4.0, 2.0), NormSpec(NormKind::L1));
    EXPECT_EQ(c.kind, CertificateKind::Sampled);
    EXPECT_NEAR(c.eta, 3.0, 1e-6);
    EXPECT_EQ(c.grid_per_axis, 16);
}

TEST(CheckContraction, Ex33IsExactlyOne) {
    EXPECT_DOUBLE_EQ(check_contraction(model_scalar_ex33(5.0), NormSpec(NormKind::L2)).eta, 1.0);
}

TEST(CheckContraction, Rfm2LowInitiationFails) {
    try {
        check_contraction(model_rfm2(0.5, 0.5, 4.0, 2.0), NormSpec(NormKind::L1));
        FAIL() << "expected a certification error";
    } catch (const CertificationError& e) {
        EXPECT_EQ(e.state.size(), 2);
        EXPECT_GE(-model_rfm2(0.5, 0.5, 4.0, 2.0).input(e.time), 0.0);
    }
}

TEST(CheckContraction, AnalyticCertificatesConfirmed) {
    for (const DynSystem& sys : catalog()) {
        if (!sys.analytic_certificate || !sys.uncertifiable_reason.empty()) continue;
        const ContractionCertificate c = check_contraction(sys, sys.analytic_certificate->norm);
        EXPECT_GE(c.eta, sys.analytic_certificate->eta - 1e-6) << sys.name;
    }
}

TEST(CheckContraction, ContradictedAnalyticCertificateDetected) {
    DynSystem sys = model_scalar_ex33(1.0);
    sys.analytic_certificate->eta = 2.0;
    EXPECT_THROW(check_contraction(sys, NormSpec(NormKind::L1)), CertificationError);
}

TEST(CheckContraction, LongRfmRefused) {
    const DynSystem sys = model_rfm({1.0, 1.0, 1.0, 1.0});
    EXPECT_THROW(check_contraction(sys, NormSpec(NormKind::L1)), CertificationError);
    EXPECT_THROW(certify(sys), CertificationError);
    EXPECT_NE(sys.uncertifiable_reason.find("uncertified (n>2)"), std::string::npos);
}

TEST(CheckInvariance, CatalogBoxes) {
    EXPECT_TRUE(check_invariance(model_rfm2(4.0, 0.5, 4.0, 2.0)).invariant);
    EXPECT_TRUE(check_invariance(model_scalar_ex33(3.0)).invariant);
    EXPECT_TRUE(check_invariance(model_transcriptional(1.0, 1.0, 5.0, 2.0, PeriodicInput::cosine(1.0, 1.0, 1.0)))
                    .invariant);
    EXPECT_TRUE(check_invariance(model_ex52(1.0, 1.0, 10.0)).invariant);
}

TEST(CheckInvariance, WitnessOnViolation) {
    DynSystem sys = model_scalar_ex33(3.0);
    sys.box = StateBox(Vector::Zero(1), Vector::Ones(1));
    const InvarianceReport r = check_invariance(sys);
    EXPECT_FALSE(r.invariant);
    EXPECT_EQ(r.coordinate, 0);
    EXPECT_DOUBLE_EQ(r.state(0), 1.0);
    EXPECT_GT(r.outward_rate, 0.0);
}

TEST(Linearize, RfmMatchesHandDerivation) {
    const Vector e = rfm2_equilibrium(4.0, 0.5, 4.0);
    const DynSystem sys = model_rfm2(4.0, 0.5, 4.0, 2.0);
    const LtiSystem lti = linearize(sys, e, 4.0);
    EXPECT_NEAR(lti.a(0, 0), -4.0 - 0.5 * (1.0 - e(1)), 1e-15);
    EXPECT_NEAR(lti.a(0, 1), 0.5 * e(0), 1e-15);
    EXPECT_NEAR(lti.a(1, 1), -0.5 * e(0) - 4.0, 1e-15);
    EXPECT_NEAR(lti.b(0, 0), 1.0 - e(0), 1e-15);
    const Vector newton = equilibrium(sys, 4.0, Vector::Constant(2, 0.5));
    EXPECT_LE((newton - e).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Presets, TranscriptionalRefitCertifies) {
    const entrain::Setup s = setup_transmod({}, PeriodicInput::cosine(0.0, 1.0, 5.0));
    EXPECT_TRUE(s.sys.heuristic_box);
    EXPECT_EQ(s.cert.kind, CertificateKind::Sampled);
    EXPECT_GT(s.cert.eta, 0.0);
    EXPECT_LT(s.sys.box.lower(0), 0.0);
}
