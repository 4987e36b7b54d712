#pragma once

// Ready-made (system, certificate, approximant) setups for the catalog
// models, including the published parameter sets.

#include "entrain/bounds.hpp"
#include "entrain/core.hpp"
#include "entrain/linalg.hpp"
#include "entrain/models.hpp"
#include "entrain/norms.hpp"
#include "entrain/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace entrain {

struct RfmParams {
    double lam0 = 4.0;
    double lam1 = 0.5;
    double lam2 = 4.0;
    double period = 2.0;
};

struct TransmodParams {
    double delta = 1.0;
    double k1 = 1.0;
    double k2 = 5.0;
    double total = 2.0;
};

/// A certified system with its start state and both approximants.
struct Setup {
    DynSystem sys;
    ContractionCertificate cert;
    Vector x0;
    // Constant-input approximant: kappa = z.
    std::optional<Vector> z;
    // LTI approximant driven by lti_input.
    std::optional<LtiSystem> lti;
    std::optional<PeriodicInput> lti_input;
    std::string note;
};

/// Forced scalar relaxation against the trivial approximant kappa = 0.
inline Setup setup_ex33(double period) {
    Setup s;
    s.sys = model_scalar_ex33(period);
    s.cert = certify(s.sys);
    s.x0 = Vector::Constant(1, 1.0);
    s.z = Vector::Zero(1);
    s.lti = LtiSystem(Matrix::Constant(1, 1, -1.0), Matrix::Zero(1, 1), Vector::Zero(1));
    s.lti_input = s.sys.input.deviation();
    return s;
}

/// 2-site RFM with u0 = lam0 + sin(2 pi t / T), approximated by the
/// equilibrium e of the averaged input and by the linearization at e.
inline Setup setup_rfm2(const RfmParams& p = {}) {
    Setup s;
    s.sys = model_rfm2(p.lam0, p.lam1, p.lam2, p.period);
    s.cert = certify(s.sys);
    const Vector e = rfm2_equilibrium(p.lam0, p.lam1, p.lam2);
    s.x0 = e;
    s.z = e;
    s.lti = linearize(s.sys, e, s.sys.input.mean());
    s.lti_input = s.sys.input.deviation();
    return s;
}

/// The diagonal scaling diag(d, 1), d in [lo, hi], whose l1 measure has the
/// smallest sampled worst case over the model box: a 101-point scan refined
/// by golden-section search around the best scan point.
inline NormSpec best_l1_scaling(const DynSystem& sys, double lo, double hi) {
    auto worst = [&sys](double d) {
        return worst_measure(sys, NormSpec::diagonal(NormKind::L1, Vector{{d, 1.0}})).worst;
    };
    constexpr int kScan = 101;
    double best_d = lo;
    double best = worst(lo);
    for (int i = 1; i < kScan; ++i) {
        const double d = lo + (hi - lo) * i / (kScan - 1);
        const double w = worst(d);
        if (w < best) {
            best = w;
            best_d = d;
        }
    }
    const double step = (hi - lo) / (kScan - 1);
    double a = std::max(lo, best_d - step);
    double c = std::min(hi, best_d + step);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 40; ++it) {
        const double x1 = c - ratio * (c - a);
        const double x2 = a + ratio * (c - a);
        if (worst(x1) < worst(x2)) {
            c = x2;
        } else {
            a = x1;
        }
    }
    const double refined = 0.5 * (a + c);
    return NormSpec::diagonal(NormKind::L1, Vector{{worst(refined) < best ? refined : best_d, 1.0}});
}

/// Transcriptional module under `input`, linearized at the equilibrium of
/// the mean input.
///
/// With a nonnegative input the nominal box and the closed-form scaled-l1
/// certificate are used. Otherwise the box is refitted to the simulated
/// trajectory and the LTI orbit, and certified by sampling in the scaled l1
/// norm whose d is re-optimized for the refitted box.
inline Setup setup_transmod(const TransmodParams& p, const PeriodicInput& input,
                            int steps_per_period = kDefaultStepsPerPeriod) {
    Setup s;
    s.sys = model_transcriptional(p.delta, p.k1, p.k2, p.total, input);
    const double u_bar = s.sys.input.mean();
    const Vector guess = Vector{{std::max(u_bar, 0.0) / p.delta, 0.0}};
    const Vector e = equilibrium(s.sys, u_bar, guess);
    s.x0 = e;
    s.z = e;
    s.lti = linearize(s.sys, e, u_bar);
    s.lti_input = s.sys.input.deviation();
    const ScalingChoice scaling = optimize_scaling_d(p.delta, p.k1, p.k2, p.total);
    if (!s.sys.heuristic_box) {
        s.cert = certify(s.sys);
        s.note = "nominal box, d = " + std::to_string(scaling.d);
        return s;
    }
    const NormSpec nominal = NormSpec::diagonal(NormKind::L1, Vector{{scaling.d, 1.0}});
    const PeriodicOrbit kappa = lti_periodic_orbit(*s.lti, *s.lti_input, 256);
    s.sys = refit_box(s.sys, e, nominal, kappa.samples(), 0.1, kDefaultOrbitTolerance, steps_per_period);
    s.cert = check_contraction(s.sys, best_l1_scaling(s.sys, 0.5, 1.0));
    s.note = "input dips below zero: box refitted to the simulated trajectory (heuristic); nominal eta " +
             std::to_string(scaling.eta) + " at d = " + std::to_string(scaling.d) + ", sampled eta " +
             std::to_string(s.cert.eta) + " in " + s.cert.norm.describe();
    return s;
}

/// Quadratic cascade with scaling D = diag(1, c), linearized at the origin.
inline Setup setup_ex52(double amplitude, double omega, double c) {
    Setup s;
    s.sys = model_ex52(amplitude, omega, c);
    s.cert = certify(s.sys);
    s.x0 = Vector::Zero(2);
    s.z = Vector::Zero(2);
    s.lti = linearize(s.sys, Vector::Zero(2), 0.0);
    s.lti_input = s.sys.input.deviation();
    return s;
}

/// Default ex52 scaling: c = 1e4 a, so eta = 1 - 2e-4.
inline double ex52_default_c(double amplitude) { return 1e4 * amplitude; }

/// LTI system as the true system, approximated by the equilibrium of the
/// mean input and by itself.
inline Setup setup_lti(const LtiSystem& lti, const PeriodicInput& input) {
    Setup s;
    s.sys = model_lti(lti, input);
    s.cert = certify(s.sys);
    const Vector z = lti.offset - lu_solve<double>(lti.a, Vector(lti.b.col(0) * input.mean()));
    s.x0 = z;
    s.z = z;
    s.lti = lti;
    s.lti_input = input;
    return s;
}

inline SweepCase to_sweep_case(const Setup& s) {
    if (!s.lti || !s.lti_input) throw InputError(s.sys.name + ": setup has no LTI approximant");
    return {s.sys, s.cert, *s.lti, *s.lti_input, s.x0};
}

/// ex52 at amplitude a for each omega, scaling c (default 1e4 a).
inline SweepFactory ex52_sweep_factory(double amplitude, std::optional<double> c = std::nullopt) {
    const double scale = c.value_or(ex52_default_c(amplitude));
    return [amplitude, scale](double omega) { return to_sweep_case(setup_ex52(amplitude, omega, scale)); };
}

/// Transcriptional module under u = offset + amplitude cos(omega t).
inline SweepFactory transmod_sweep_factory(const TransmodParams& p, double offset = 0.0, double amplitude = 1.0,
                                           int steps_per_period = kDefaultStepsPerPeriod) {
    return [p, offset, amplitude, steps_per_period](double omega) {
        return to_sweep_case(setup_transmod(p, PeriodicInput::cosine(offset, amplitude, omega), steps_per_period));
    };
}

} // namespace entrain
