#pragma once

// Periodically forced systems x' = F(x, u(t)) with Jacobians, invariant
// boxes, and contraction certificates, plus the catalog of example models:
// a forced scalar relaxation, the ribosome flow model, a transcriptional
// module, and a quadratic cascade whose periodic orbit is known in closed form.

#include "entrain/core.hpp"
#include "entrain/linalg.hpp"
#include "entrain/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace entrain {

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

/// a * cos(omega t + phase)
struct CosineTerm {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

/// u(t) = offset + sum_i a_i cos(w_i t + phi_i), every w_i a multiple of 2 pi / T.
class PeriodicInput {
public:
    PeriodicInput() = default;

    PeriodicInput(double offset, std::vector<CosineTerm> terms, double period)
        : offset_(offset), terms_(std::move(terms)), period_(period) {
        if (!(period_ > 0.0) || !std::isfinite(period_)) {
            throw InputError("PeriodicInput: period must be positive and finite");
        }
        if (!std::isfinite(offset_)) {
            throw InputError("PeriodicInput: offset must be finite");
        }
        for (const auto& term : terms_) {
            if (!std::isfinite(term.amplitude) || !std::isfinite(term.omega) || !std::isfinite(term.phase)) {
                throw InputError("PeriodicInput: non-finite term");
            }
            if (term.omega < 0.0) {
                throw InputError("PeriodicInput: frequencies must be nonnegative");
            }
            const double k = term.omega * period_ / kTwoPi;
            if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
                throw InputError("PeriodicInput: frequency " + std::to_string(term.omega) +
                                 " is not a harmonic of period " + std::to_string(period_));
            }
        }
    }

    static PeriodicInput constant(double value, double period = 1.0) { return {value, {}, period}; }

    /// offset + amplitude * sin(omega t), period 2 pi / omega.
    static PeriodicInput sine(double offset, double amplitude, double omega) {
        return {offset, {{amplitude, omega, -0.5 * kPi}}, kTwoPi / omega};
    }

    /// offset + amplitude * cos(omega t), period 2 pi / omega.
    static PeriodicInput cosine(double offset, double amplitude, double omega) {
        return {offset, {{amplitude, omega, 0.0}}, kTwoPi / omega};
    }

    double operator()(double t) const {
        double u = offset_;
        for (const auto& term : terms_) {
            u += term.amplitude * std::cos(term.omega * t + term.phase);
        }
        return u;
    }

    double offset() const { return offset_; }
    const std::vector<CosineTerm>& terms() const { return terms_; }
    double period() const { return period_; }
    bool is_constant() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const CosineTerm& t) { return t.amplitude == 0.0 || t.omega == 0.0; });
    }

    /// Exact average over one period: zero-frequency terms survive, the rest vanish.
    double mean() const {
        double m = offset_;
        for (const auto& term : terms_) {
            if (term.omega == 0.0) m += term.amplitude * std::cos(term.phase);
        }
        return m;
    }

    /// sum |a_i| over oscillating terms; max_t |u(t) - mean| is at most this
    /// and equals it for a single tone.
    double swing() const {
        double s = 0.0;
        for (const auto& term : terms_) {
            if (term.omega != 0.0) s += std::abs(term.amplitude);
        }
        return s;
    }

    double lower_bound() const { return mean() - swing(); }
    double upper_bound() const { return mean() + swing(); }

    /// Same input with the mean removed.
    PeriodicInput deviation() const {
        std::vector<CosineTerm> osc;
        for (const auto& term : terms_) {
            if (term.omega != 0.0) osc.push_back(term);
        }
        return {0.0, std::move(osc), period_};
    }

private:
    double offset_ = 0.0;
    std::vector<CosineTerm> terms_;
    double period_ = 1.0;
};

// ---------------------------------------------------------------------------
// State boxes and certificates
// ---------------------------------------------------------------------------

struct StateBox {
    Vector lower;
    Vector upper;

    StateBox() = default;
    StateBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
        detail::require_size(upper.size(), lower.size(), "StateBox");
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            if (!(lower(i) <= upper(i))) {
                throw InputError("StateBox: lower bound exceeds upper bound in coordinate " + std::to_string(i));
            }
        }
    }

    Eigen::Index dim() const { return lower.size(); }

    bool contains(const Vector& x, double slack = 0.0) const {
        if (x.size() != lower.size()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (!(x(i) >= lower(i) - slack && x(i) <= upper(i) + slack)) return false;
        }
        return true;
    }

    Vector center() const { return 0.5 * (lower + upper); }
    Vector widths() const { return upper - lower; }

    /// Largest distance between two points of the box in `norm`.
    double diameter(const NormSpec& norm) const {
        // The norm of a difference is convex, so the max over the box of |a - b|
        // is attained at a pair of opposite vertices.
        const Eigen::Index n = dim();
        if (n > 20) return vector_norm(norm, widths()) * std::sqrt(static_cast<double>(n));
        double best = 0.0;
        const std::uint64_t count = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            Vector d(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                d(i) = (mask >> i) & 1U ? widths()(i) : -widths()(i);
            }
            best = std::max(best, vector_norm(norm, d));
        }
        return best;
    }
};

enum class CertificateKind { Analytic, Sampled };

/// mu(J(t, x)) <= -eta on the model box for all t.
struct ContractionCertificate {
    NormSpec norm;
    double eta = 0.0;
    CertificateKind kind = CertificateKind::Analytic;
    int grid_per_axis = 0;
    int time_samples = 0;
    double worst_measure = 0.0;
    std::string note;
};

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

using ParamList = std::vector<std::pair<std::string, double>>;

struct DynSystem {
    std::string name;
    Eigen::Index dim = 0;
    std::function<Vector(const Vector&, double)> rhs;            // F(x, u)
    std::function<Matrix(const Vector&, double)> state_jacobian; // dF/dx
    std::function<Vector(const Vector&, double)> input_gain;     // dF/du
    PeriodicInput input;
    StateBox box;
    ParamList params;
    std::optional<ContractionCertificate> analytic_certificate;
    // Set when the box is a guess that must be refitted to simulated orbits.
    bool heuristic_box = false;
    // Whether F(e + z, u + v) - A z - B v is multiaffine in (z, v).
    bool multiaffine_mismatch = false;
    // Empty when certification may be attempted; otherwise the refusal reason.
    std::string uncertifiable_reason;

    Vector field(double t, const Vector& x) const { return rhs(x, input(t)); }
    Matrix jacobian(double t, const Vector& x) const { return state_jacobian(x, input(t)); }
    double period() const { return input.period(); }

    double param(const std::string& key) const {
        for (const auto& [k, v] : params) {
            if (k == key) return v;
        }
        throw InputError("model '" + name + "' has no parameter '" + key + "'");
    }
};

// ---------------------------------------------------------------------------
// Forced scalar relaxation: x' = -x + 1 + sin(2 pi t / T) on [0, 2]
// ---------------------------------------------------------------------------

inline DynSystem model_scalar_ex33(double period) {
    if (!(period > 0.0)) throw InputError("ex33: period must be positive");
    DynSystem sys;
    sys.name = "ex33";
    sys.dim = 1;
    sys.rhs = [](const Vector& x, double u) { return Vector::Constant(1, -x(0) + 1.0 + u); };
    sys.state_jacobian = [](const Vector&, double) { return Matrix::Constant(1, 1, -1.0); };
    sys.input_gain = [](const Vector&, double) { return Vector::Ones(1); };
    sys.input = PeriodicInput::sine(0.0, 1.0, kTwoPi / period);
    sys.box = StateBox(Vector::Zero(1), Vector::Constant(1, 2.0));
    sys.params = {{"period", period}};
    sys.analytic_certificate = ContractionCertificate{NormSpec(NormKind::L1), 1.0, CertificateKind::Analytic, 0, 0, -1.0,
                                                      "J = -1"};
    sys.multiaffine_mismatch = true;
    return sys;
}

/// The entrained orbit of the forced scalar relaxation.
inline double gamma_ex33(double period, double t) {
    if (!(period > 0.0)) throw InputError("gamma_ex33: period must be positive");
    const double w = kTwoPi * t / period;
    return 1.0 + (period * period * std::sin(w) - kTwoPi * period * std::cos(w)) /
                     (4.0 * kPi * kPi + period * period);
}

/// int_0^alpha e^{-(alpha - s)} |1 + sin(2 pi s / T)| ds in closed form.
inline double ex33_weighted_mismatch(double period, double alpha) {
    const double w = kTwoPi * alpha / period;
    const double ea = std::exp(-alpha);
    return 1.0 - ea +
           (kTwoPi * period * ea - kTwoPi * period * std::cos(w) + period * period * std::sin(w)) /
               (4.0 * kPi * kPi + period * period);
}

// ---------------------------------------------------------------------------
// Ribosome flow model
// ---------------------------------------------------------------------------

/// Certificate for the 2-site RFM in l1: mu_1(J) = max{-u0(t), -lambda_2}.
inline ContractionCertificate rfm2_certificate(double initiation_floor, double lambda2) {
    if (!(initiation_floor > 0.0)) {
        throw CertificationError("rfm2: analytic certificate needs min_t u0(t) > 0 (got " +
                                 std::to_string(initiation_floor) + ")");
    }
    const double eta = std::min(initiation_floor, lambda2);
    return {NormSpec(NormKind::L1), eta, CertificateKind::Analytic, 0, 0, -eta, "eta = min{min_t u0, lambda2}"};
}

/// n-site RFM with rates (lambda_0, ..., lambda_n). The input drives the
/// initiation rate; when `input` is absent, u0 = lambda_0 constant.
inline DynSystem model_rfm(const std::vector<double>& rates, std::optional<PeriodicInput> input = std::nullopt) {
    if (rates.size() < 2) throw InputError("rfm: need at least lambda_0 and lambda_1");
    for (double r : rates) {
        if (!(r > 0.0) || !std::isfinite(r)) throw InputError("rfm: rates must be positive");
    }
    const auto n = static_cast<Eigen::Index>(rates.size() - 1);
    DynSystem sys;
    sys.name = n == 2 ? "rfm2" : "rfm";
    sys.dim = n;
    // Flows g_0 = u (1 - x_1), g_k = l_k x_k (1 - x_{k+1}), g_n = l_n x_n.
    sys.rhs = [rates, n](const Vector& x, double u) {
        Vector flow(n + 1);
        flow(0) = u * (1.0 - x(0));
        for (Eigen::Index k = 1; k < n; ++k) {
            flow(k) = rates[static_cast<std::size_t>(k)] * x(k - 1) * (1.0 - x(k));
        }
        flow(n) = rates[static_cast<std::size_t>(n)] * x(n - 1);
        Vector dx(n);
        for (Eigen::Index i = 0; i < n; ++i) dx(i) = flow(i) - flow(i + 1);
        return dx;
    };
    sys.state_jacobian = [rates, n](const Vector& x, double u) {
        // dg_k/dx_j is nonzero only for j = k (index k-1) and j = k+1 (index k).
        Matrix dflow = Matrix::Zero(n + 1, n);
        dflow(0, 0) = -u;
        for (Eigen::Index k = 1; k < n; ++k) {
            const double lk = rates[static_cast<std::size_t>(k)];
            dflow(k, k - 1) = lk * (1.0 - x(k));
            dflow(k, k) = -lk * x(k - 1);
        }
        dflow(n, n - 1) = rates[static_cast<std::size_t>(n)];
        Matrix jac(n, n);
        for (Eigen::Index i = 0; i < n; ++i) jac.row(i) = dflow.row(i) - dflow.row(i + 1);
        return jac;
    };
    sys.input_gain = [n](const Vector& x, double) {
        Vector b = Vector::Zero(n);
        b(0) = 1.0 - x(0);
        return b;
    };
    sys.input = input ? *input : PeriodicInput::constant(rates[0]);
    sys.box = StateBox(Vector::Zero(n), Vector::Ones(n));
    for (std::size_t k = 0; k < rates.size(); ++k) {
        sys.params.emplace_back("lam" + std::to_string(k), rates[k]);
    }
    sys.params.emplace_back("period", sys.input.period());
    sys.multiaffine_mismatch = true;
    if (n == 2) {
        const double floor = sys.input.lower_bound();
        if (floor > 0.0) sys.analytic_certificate = rfm2_certificate(floor, rates[2]);
    } else {
        sys.uncertifiable_reason = "uncertified (n>2): the RFM is only weakly contractive on [0,1]^n for n > 2";
    }
    return sys;
}

/// 2-site RFM with u0(t) = lambda_0 + sin(2 pi t / T).
inline DynSystem model_rfm2(double lambda0, double lambda1, double lambda2, double period) {
    if (!(period > 0.0)) throw InputError("rfm2: period must be positive");
    return model_rfm({lambda0, lambda1, lambda2}, PeriodicInput::sine(lambda0, 1.0, kTwoPi / period));
}

/// R = lambda_n x_n.
inline double rfm_production_rate(const DynSystem& rfm, const Vector& x) {
    return rfm.param("lam" + std::to_string(rfm.dim)) * x(rfm.dim - 1);
}

/// Closed-form equilibrium of the 2-site RFM with constant initiation rate.
inline Vector rfm2_equilibrium(double lambda0, double lambda1, double lambda2) {
    if (!(lambda0 > 0.0 && lambda1 > 0.0 && lambda2 > 0.0)) {
        throw InputError("rfm2_equilibrium: rates must be positive");
    }
    const double mix = lambda0 * lambda1 - lambda0 * lambda2 - lambda1 * lambda2;
    const double sq = std::sqrt(4.0 * lambda0 * lambda0 * lambda1 * lambda2 + mix * mix);
    Vector e(2);
    e(0) = (mix + sq) / (2.0 * lambda0 * lambda1);
    e(1) = (lambda0 * lambda1 + lambda0 * lambda2 + lambda1 * lambda2 - sq) / (2.0 * lambda1 * lambda2);
    return e;
}

// ---------------------------------------------------------------------------
// Transcriptional module
// ---------------------------------------------------------------------------

struct ScalingChoice {
    double d = 0.0;
    double eta = 0.0;
    bool closed_form = true;
};

/// The two column-sum margins of diag(d, 1) J diag(d, 1)^{-1} over the box.
inline double transcriptional_eta(double delta, double k1, double k2, double total, double d) {
    return std::min(k1 * (1.0 - d), delta + k2 * total * (1.0 - 1.0 / d));
}

/// Maximizes eta(d) over the admissible window (k2 eT / (k2 eT + delta), 1).
///
/// eta is the min of a decreasing and an increasing branch, so the optimum
/// is their crossing: the positive root of k1 d^2 + (delta + k2 eT - k1) d - k2 eT = 0.
inline ScalingChoice optimize_scaling_d(double delta, double k1, double k2, double total) {
    if (!(delta > 0.0 && k1 > 0.0 && k2 > 0.0 && total > 0.0)) {
        throw InputError("optimize_scaling_d: parameters must be positive");
    }
    const double lo = k2 * total / (k2 * total + delta);
    const double hi = 1.0;
    if (!(lo < hi)) throw ModelError("optimize_scaling_d: empty admissible window");

    const double b = delta + k2 * total - k1;
    const double disc = std::sqrt(b * b + 4.0 * k1 * k2 * total);
    // Cancellation-free form of (-b + disc) / (2 k1).
    const double root = b > 0.0 ? 2.0 * k2 * total / (b + disc) : (-b + disc) / (2.0 * k1);
    if (root > lo && root < hi) {
        return {root, transcriptional_eta(delta, k1, k2, total, root), true};
    }

    // Golden-section on the unimodal eta(d).
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double c = hi;
    double x1 = c - ratio * (c - a);
    double x2 = a + ratio * (c - a);
    double f1 = transcriptional_eta(delta, k1, k2, total, x1);
    double f2 = transcriptional_eta(delta, k1, k2, total, x2);
    for (int it = 0; it < 200 && c - a > 1e-15; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (c - a);
            f2 = transcriptional_eta(delta, k1, k2, total, x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - ratio * (c - a);
            f1 = transcriptional_eta(delta, k1, k2, total, x1);
        }
    }
    const double d = 0.5 * (a + c);
    return {d, transcriptional_eta(delta, k1, k2, total, d), false};
}

/// x1' = u - delta x1 + k1 x2 - k2 (eT - x2) x1,  x2' = -k1 x2 + k2 (eT - x2) x1.
///
/// Box [0, (c + k1 eT)/delta] x [0, eT] with c = max_t u. When u dips below
/// zero the box is not invariant; the model is then flagged heuristic and the
/// box should be refitted to simulated orbits before certification.
inline DynSystem model_transcriptional(double delta, double k1, double k2, double total, PeriodicInput input,
                                       std::optional<double> scaling_d = std::nullopt) {
    if (!(delta > 0.0 && k1 > 0.0 && k2 > 0.0 && total > 0.0)) {
        throw InputError("transmod: parameters must be positive");
    }
    DynSystem sys;
    sys.name = "transmod";
    sys.dim = 2;
    sys.rhs = [=](const Vector& x, double u) {
        const double binding = k2 * (total - x(1)) * x(0);
        Vector dx(2);
        dx(0) = u - delta * x(0) + k1 * x(1) - binding;
        dx(1) = -k1 * x(1) + binding;
        return dx;
    };
    sys.state_jacobian = [=](const Vector& x, double) {
        Matrix j(2, 2);
        j << -delta - k2 * (total - x(1)), k1 + k2 * x(0), k2 * (total - x(1)), -k1 - k2 * x(0);
        return j;
    };
    sys.input_gain = [](const Vector&, double) { return Vector::Unit(2, 0); };
    const double cap = std::max(0.0, input.upper_bound());
    sys.heuristic_box = input.lower_bound() < 0.0;
    sys.input = std::move(input);
    Vector hi(2);
    hi << (cap + k1 * total) / delta, total;
    sys.box = StateBox(Vector::Zero(2), hi);
    sys.params = {{"delta", delta}, {"k1", k1}, {"k2", k2}, {"eT", total}, {"period", sys.input.period()}};
    sys.multiaffine_mismatch = true;

    const ScalingChoice best = optimize_scaling_d(delta, k1, k2, total);
    const double d = scaling_d.value_or(best.d);
    const double eta = transcriptional_eta(delta, k1, k2, total, d);
    if (eta > 0.0) {
        sys.analytic_certificate = ContractionCertificate{NormSpec::diagonal(NormKind::L1, Vector{{d, 1.0}}), eta,
                                                          CertificateKind::Analytic, 0, 0, -eta,
                                                          "eta = min{k1(1-d), delta + k2 eT (1 - 1/d)}"};
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Quadratic cascade: x1' = -x1 + x2^2, x2' = -x2 + a sin(w t)
// ---------------------------------------------------------------------------

/// Certificate in |z|_{1,D}, D = diag(1, c): eta = 1 - 2a/c for c > 2a.
inline DynSystem model_ex52(double amplitude, double omega, double c) {
    if (!(amplitude > 0.0 && omega > 0.0)) throw InputError("ex52: a and omega must be positive");
    if (!(c > 2.0 * amplitude)) throw InputError("ex52: scaling c must exceed 2a");
    DynSystem sys;
    sys.name = "ex52";
    sys.dim = 2;
    sys.rhs = [](const Vector& x, double u) {
        Vector dx(2);
        dx << -x(0) + x(1) * x(1), -x(1) + u;
        return dx;
    };
    sys.state_jacobian = [](const Vector& x, double) {
        Matrix j(2, 2);
        j << -1.0, 2.0 * x(1), 0.0, -1.0;
        return j;
    };
    sys.input_gain = [](const Vector&, double) { return Vector::Unit(2, 1); };
    sys.input = PeriodicInput::sine(0.0, amplitude, omega);
    // x1' <= -x1 + a^2 and x1' >= -x1 give the x1 range [0, a^2].
    sys.box = StateBox(Vector{{0.0, -amplitude}}, Vector{{amplitude * amplitude, amplitude}});
    sys.params = {{"a", amplitude}, {"omega", omega}, {"c", c}};
    const double eta = 1.0 - 2.0 * amplitude / c;
    sys.analytic_certificate = ContractionCertificate{NormSpec::diagonal(NormKind::L1, Vector{{1.0, c}}), eta,
                                                      CertificateKind::Analytic, 0, 0, -eta, "eta = 1 - 2a/c"};
    sys.multiaffine_mismatch = false;
    return sys;
}

/// Closed-form entrained orbit of the quadratic cascade.
inline Vector ex52_gamma(double amplitude, double omega, double t) {
    const double w2 = omega * omega;
    const double m = amplitude * amplitude / (2.0 * (1.0 + w2) * (1.0 + w2) * (1.0 + 4.0 * w2));
    Vector g(2);
    g(0) = m * (1.0 + 5.0 * w2 + 4.0 * w2 * w2 + (5.0 * w2 - 1.0) * std::cos(2.0 * omega * t) +
                2.0 * omega * (w2 - 2.0) * std::sin(2.0 * omega * t));
    g(1) = amplitude / std::sqrt(1.0 + w2) * std::sin(omega * t - std::atan(omega));
    return g;
}

/// max_t |gamma_1(t)| for the quadratic cascade.
inline double ex52_max_gamma1(double amplitude, double omega) {
    const double root = std::sqrt(4.0 * omega * omega + 1.0);
    return amplitude * amplitude * (1.0 + root) / (2.0 * (1.0 + omega * omega) * root);
}

// ---------------------------------------------------------------------------
// LTI systems as models
// ---------------------------------------------------------------------------

/// y' = A (y - e) + b u with the Lyapunov-scaled Euclidean certificate.
/// The box is a large cube around e; LTI contraction is global.
inline DynSystem model_lti(const LtiSystem& lti, PeriodicInput input, double box_radius = 1e6) {
    detail::require_size(lti.inputs(), 1, "model_lti: B columns");
    const LyapunovScaling scaling = lyapunov_scaling(lti.a);
    DynSystem sys;
    sys.name = "lti";
    sys.dim = lti.dim();
    sys.rhs = [lti](const Vector& x, double u) { return lti.field(x, u); };
    sys.state_jacobian = [a = lti.a](const Vector&, double) { return a; };
    sys.input_gain = [b = Vector(lti.b.col(0))](const Vector&, double) { return b; };
    sys.input = std::move(input);
    sys.box = StateBox(lti.offset.array() - box_radius, lti.offset.array() + box_radius);
    sys.params = {{"period", sys.input.period()}};
    sys.analytic_certificate = ContractionCertificate{NormSpec(NormKind::L2, scaling.p), scaling.eta,
                                                      CertificateKind::Analytic, 0, 0, -scaling.eta,
                                                      "Lyapunov scaling, eta = 0.9 * stability margin"};
    sys.multiaffine_mismatch = true;
    return sys;
}

// ---------------------------------------------------------------------------
// Equilibria and linearization
// ---------------------------------------------------------------------------

/// Newton iteration for F(x, u) = 0 from `guess`.
inline Vector equilibrium(const DynSystem& sys, double u, Vector guess) {
    detail::require_size(guess.size(), sys.dim, "equilibrium guess");
    Vector x = std::move(guess);
    for (int it = 0; it < 100; ++it) {
        const Vector f = sys.rhs(x, u);
        if (f.cwiseAbs().maxCoeff() < 1e-14) return x;
        const Vector step = lu_solve<double>(sys.state_jacobian(x, u), f);
        x -= step;
        if (step.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + x.cwiseAbs().maxCoeff())) return x;
    }
    if (sys.rhs(x, u).cwiseAbs().maxCoeff() < 1e-10) return x;
    throw ModelError("equilibrium: Newton iteration did not converge for model " + sys.name);
}

/// A = dF/dx(e, u_bar), B = dF/du(e, u_bar), offset e.
inline LtiSystem linearize(const DynSystem& sys, const Vector& e, double u_bar) {
    return LtiSystem(sys.state_jacobian(e, u_bar), Matrix(sys.input_gain(e, u_bar)), e);
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

namespace detail {

/// Calls visit(x) for every point of a uniform grid with `per_axis` points per axis.
template <typename Visit>
void for_each_grid_point(const StateBox& box, int per_axis, Visit&& visit) {
    const Eigen::Index n = box.dim();
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Vector x(n);
    while (true) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double frac = per_axis == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(i)]) / (per_axis - 1);
            x(i) = box.lower(i) + frac * (box.upper(i) - box.lower(i));
        }
        visit(static_cast<const Vector&>(x));
        Eigen::Index pos = 0;
        while (pos < n && ++idx[static_cast<std::size_t>(pos)] == per_axis) {
            idx[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n) break;
    }
}

inline std::string format_state(const Vector& x) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(x(i));
    }
    return s + ")";
}

} // namespace detail

/// Largest mu(J(t, x)) over a per-axis grid of the box and `time_samples`
/// instants of one input period, with its location.
struct MeasureSample {
    double worst = -std::numeric_limits<double>::infinity();
    double time = 0.0;
    Vector state;
    int time_samples = 0;
};

inline MeasureSample worst_measure(const DynSystem& sys, const NormSpec& norm, int grid_per_axis = 16,
                                   int time_samples = 64) {
    if (grid_per_axis < 2) throw InputError("worst_measure: grid_per_axis must be at least 2");
    if (time_samples < 1) throw InputError("worst_measure: time_samples must be positive");
    MeasureSample out;
    out.time_samples = sys.input.is_constant() ? 1 : time_samples;
    for (int k = 0; k < out.time_samples; ++k) {
        const double t = sys.period() * k / out.time_samples;
        const double u = sys.input(t);
        detail::for_each_grid_point(sys.box, grid_per_axis, [&](const Vector& x) {
            const double mu = matrix_measure(norm, sys.state_jacobian(x, u));
            if (mu > out.worst) {
                out.worst = mu;
                out.time = t;
                out.state = x;
            }
        });
    }
    return out;
}

/// Grid certification via worst_measure. Throws CertificationError carrying
/// the offending (t, x) when the worst measure is not negative, and when the
/// model's analytic certificate (same norm) is contradicted.
inline ContractionCertificate check_contraction(const DynSystem& sys, const NormSpec& norm, int grid_per_axis = 16,
                                                int time_samples = 64) {
    if (!sys.uncertifiable_reason.empty()) {
        throw CertificationError(sys.name + ": " + sys.uncertifiable_reason);
    }
    const MeasureSample sample = worst_measure(sys, norm, grid_per_axis, time_samples);
    const double worst = sample.worst;
    const double worst_t = sample.time;
    const Vector& worst_x = sample.state;
    const int instants = sample.time_samples;
    if (!(worst < 0.0)) {
        throw CertificationError(sys.name + ": not certified contractive at this resolution (mu = " +
                                     std::to_string(worst) + " at t = " + std::to_string(worst_t) + ", x = " +
                                     detail::format_state(worst_x) + ")",
                                 worst_t, worst_x);
    }
    ContractionCertificate cert{norm, -worst, CertificateKind::Sampled, grid_per_axis, instants, worst, ""};
    if (sys.analytic_certificate && sys.analytic_certificate->norm.describe() == norm.describe()) {
        const double claimed = sys.analytic_certificate->eta;
        if (cert.eta < claimed - 1e-6) {
            throw CertificationError(sys.name + ": analytic certificate eta = " + std::to_string(claimed) +
                                         " contradicted by sampled mu = " + std::to_string(worst),
                                     worst_t, worst_x);
        }
        cert.note = "analytic eta " + std::to_string(claimed) + " confirmed";
    }
    return cert;
}

/// The certificate to use for a model: analytic when present, otherwise a
/// 16-per-axis grid certificate in `fallback`.
inline ContractionCertificate certify(const DynSystem& sys, const std::optional<NormSpec>& fallback = std::nullopt) {
    if (!sys.uncertifiable_reason.empty()) {
        throw CertificationError(sys.name + ": " + sys.uncertifiable_reason);
    }
    if (sys.analytic_certificate && !sys.heuristic_box) return *sys.analytic_certificate;
    const NormSpec norm = fallback ? *fallback
                          : sys.analytic_certificate ? sys.analytic_certificate->norm
                                                     : NormSpec(NormKind::L1);
    return check_contraction(sys, norm);
}

struct InvarianceReport {
    bool invariant = true;
    // Witness of the first violation found.
    double time = 0.0;
    Vector state;
    Eigen::Index coordinate = -1;
    double outward_rate = 0.0;
};

/// Samples every face of the box and one input period, checking that the
/// field does not point outward through the active face (tolerance 1e-12).
inline InvarianceReport check_invariance(const DynSystem& sys, int boundary_samples = 16) {
    if (boundary_samples < 2) throw InputError("check_invariance: boundary_samples must be at least 2");
    const Eigen::Index n = sys.dim;
    const int instants = sys.input.is_constant() ? 1 : boundary_samples;
    constexpr double kTol = 1e-12;
    InvarianceReport report;
    for (int k = 0; k < instants && report.invariant; ++k) {
        const double t = sys.period() * k / instants;
        for (Eigen::Index i = 0; i < n && report.invariant; ++i) {
            for (int side = 0; side < 2 && report.invariant; ++side) {
                StateBox face = sys.box;
                const double level = side == 0 ? sys.box.lower(i) : sys.box.upper(i);
                face.lower(i) = level;
                face.upper(i) = level;
                detail::for_each_grid_point(face, boundary_samples, [&](const Vector& x) {
                    if (!report.invariant) return;
                    const double rate = sys.field(t, x)(i);
                    const double outward = side == 0 ? -rate : rate;
                    if (outward > kTol) {
                        report = {false, t, x, i, outward};
                    }
                });
            }
        }
    }
    return report;
}

} // namespace entrain
