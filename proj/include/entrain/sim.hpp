#pragma once

// Fixed-step RK4 integration, entrained-orbit extraction by iterating the
// period map, and closed-form steady states of sinusoidally forced LTI systems.

#include "entrain/core.hpp"
#include "entrain/linalg.hpp"
#include "entrain/models.hpp"
#include "entrain/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace entrain {

inline constexpr int kDefaultStepsPerPeriod = 4096;
inline constexpr double kDefaultOrbitTolerance = 1e-9;

struct IntegrationOptions {
    int steps_per_period = kDefaultStepsPerPeriod;
    bool enforce_box = true;
    double box_slack = 1e-7;
};

/// Samples x(t0 + k h), k = 0..K.
struct Trajectory {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<Vector> states;

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
    const Vector& final_state() const { return states.back(); }
};

namespace detail {

inline Vector rk4_step(const DynSystem& sys, double t, const Vector& x, double h) {
    const Vector k1 = sys.field(t, x);
    const Vector k2 = sys.field(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = sys.field(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = sys.field(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline std::size_t step_count(const DynSystem& sys, double t0, double t1, int steps_per_period) {
    if (!(t1 > t0)) throw InputError("integrate: need t1 > t0");
    if (steps_per_period < 64) throw InputError("integrate: steps_per_period must be at least 64");
    const double nominal = sys.period() / steps_per_period;
    const double count = std::ceil((t1 - t0) / nominal - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, count));
}

inline void check_start(const DynSystem& sys, const Vector& x0, const IntegrationOptions& opts) {
    detail::require_size(x0.size(), sys.dim, "initial state");
    if (opts.enforce_box && !sys.box.contains(x0, opts.box_slack)) {
        throw InputError(sys.name + ": initial state " + format_state(x0) + " lies outside the model box");
    }
}

/// Integrates from t0 to t1, calling observe(k, t_k, x_k) at every sample.
template <typename Observe>
Vector march(const DynSystem& sys, Vector x, double t0, double t1, const IntegrationOptions& opts,
             Observe&& observe) {
    check_start(sys, x, opts);
    const std::size_t steps = step_count(sys, t0, t1, opts.steps_per_period);
    const double h = (t1 - t0) / static_cast<double>(steps);
    observe(std::size_t{0}, t0, static_cast<const Vector&>(x));
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        x = rk4_step(sys, t, x, h);
        const double t_next = t0 + static_cast<double>(k + 1) * h;
        if (!x.allFinite() || (opts.enforce_box && !sys.box.contains(x, opts.box_slack))) {
            throw TrajectoryEscapeError(sys.name + ": trajectory left the model box at t = " + std::to_string(t_next) +
                                            ", x = " + format_state(x),
                                        t_next, x);
        }
        observe(k + 1, t_next, static_cast<const Vector&>(x));
    }
    return x;
}

} // namespace detail

/// Classic RK4 with h = (t1 - t0) / ceil((t1 - t0) / (T / steps_per_period)).
inline Trajectory integrate(const DynSystem& sys, const Vector& x0, double t0, double t1,
                            const IntegrationOptions& opts = {}) {
    Trajectory traj;
    traj.t0 = t0;
    traj.h = (t1 - t0) / static_cast<double>(detail::step_count(sys, t0, t1, opts.steps_per_period));
    detail::march(sys, x0, t0, t1, opts, [&](std::size_t, double, const Vector& x) { traj.states.push_back(x); });
    return traj;
}

inline Trajectory integrate(const DynSystem& sys, const Vector& x0, double t0, double t1, int steps_per_period) {
    IntegrationOptions opts;
    opts.steps_per_period = steps_per_period;
    return integrate(sys, x0, t0, t1, opts);
}

/// x(t1, t0, x0) without storing the path.
inline Vector flow(const DynSystem& sys, const Vector& x0, double t0, double t1, const IntegrationOptions& opts = {}) {
    return detail::march(sys, x0, t0, t1, opts, [](std::size_t, double, const Vector&) {});
}

/// One period of a T-periodic trajectory on the uniform grid t_k = k T / N.
class PeriodicOrbit {
public:
    PeriodicOrbit() = default;
    PeriodicOrbit(double period, std::vector<Vector> samples, double closure_defect = 0.0)
        : period_(period), samples_(std::move(samples)), closure_defect_(closure_defect) {
        if (!(period_ > 0.0)) throw InputError("PeriodicOrbit: period must be positive");
        if (samples_.empty()) throw InputError("PeriodicOrbit: no samples");
        for (const auto& s : samples_) detail::require_size(s.size(), samples_.front().size(), "PeriodicOrbit sample");
    }

    double period() const { return period_; }
    std::size_t size() const { return samples_.size(); }
    Eigen::Index dim() const { return samples_.front().size(); }
    double closure_defect() const { return closure_defect_; }
    double time(std::size_t k) const { return period_ * static_cast<double>(k) / static_cast<double>(size()); }
    const Vector& sample(std::size_t k) const { return samples_[k % size()]; }
    const std::vector<Vector>& samples() const { return samples_; }

    /// Value at grid index k of an N-point grid over the same period.
    /// Exact lookup when the grids align, linear interpolation otherwise.
    Vector on_grid(std::size_t k, std::size_t n) const {
        const std::size_t m = size();
        if (n == m) return sample(k);
        const std::size_t num = (k % n) * m;
        const std::size_t i = num / n;
        const std::size_t rem = num % n;
        if (rem == 0) return sample(i);
        const double frac = static_cast<double>(rem) / static_cast<double>(n);
        return (1.0 - frac) * sample(i) + frac * sample(i + 1);
    }

    /// Periodic linear interpolation.
    Vector operator()(double t) const {
        const double phase = t / period_ - std::floor(t / period_);
        const double pos = phase * static_cast<double>(size());
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        if (frac == 0.0) return sample(i);
        return (1.0 - frac) * sample(i) + frac * sample(i + 1);
    }

private:
    double period_ = 1.0;
    std::vector<Vector> samples_;
    double closure_defect_ = 0.0;
};

struct OrbitOptions {
    int steps_per_period = kDefaultStepsPerPeriod;
    std::size_t grid = 0; // defaults to steps_per_period; must divide it
    double box_slack = 1e-7;
};

namespace detail {

inline PeriodicOrbit record_period(const DynSystem& sys, const Vector& start, const NormSpec& norm,
                                   const OrbitOptions& opts) {
    const auto steps = static_cast<std::size_t>(opts.steps_per_period);
    const std::size_t n = opts.grid == 0 ? steps : opts.grid;
    if (n == 0 || steps % n != 0) throw InputError("periodic_orbit: grid size must divide steps_per_period");
    const std::size_t stride = steps / n;
    std::vector<Vector> samples;
    samples.reserve(n);
    IntegrationOptions io{opts.steps_per_period, true, opts.box_slack};
    const Vector end = march(sys, start, 0.0, sys.period(), io, [&](std::size_t k, double, const Vector& x) {
        if (k % stride == 0 && k < steps) samples.push_back(x);
    });
    return {sys.period(), std::move(samples), vector_norm(norm, end - start)};
}

} // namespace detail

/// Entrained orbit by iterating the period map x -> x(T; 0, x).
///
/// Stops when successive period-start states differ by less than `tol` in
/// the certificate norm. The map contracts by e^{-eta T}, so the iteration
/// cap is ceil(ln(diam / tol) / (eta T)) + 10.
inline PeriodicOrbit periodic_orbit(const DynSystem& sys, const ContractionCertificate& cert, const Vector& x0,
                                    double tol = kDefaultOrbitTolerance, const OrbitOptions& opts = {}) {
    if (!(cert.eta > 0.0)) throw InputError("periodic_orbit: certificate rate must be positive");
    if (!(tol > 0.0)) throw InputError("periodic_orbit: tolerance must be positive");
    const double period = sys.period();
    const double diam = sys.box.diameter(cert.norm);
    const double decades = diam > tol ? std::log(diam / tol) : 0.0;
    const auto cap = static_cast<long>(std::ceil(decades / (cert.eta * period))) + 10;

    IntegrationOptions io{opts.steps_per_period, true, opts.box_slack};
    Vector x = x0;
    double change = std::numeric_limits<double>::infinity();
    long iterations = 0;
    while (!(change < tol)) {
        if (iterations >= cap) {
            throw OrbitConvergenceError(sys.name + ": period map did not converge within " + std::to_string(cap) +
                                        " periods (last change " + std::to_string(change) + ")");
        }
        Vector next = flow(sys, x, 0.0, period, io);
        change = vector_norm(cert.norm, next - x);
        x = std::move(next);
        ++iterations;
    }
    return detail::record_period(sys, x, cert.norm, opts);
}

/// Period-map iteration without a certificate (e.g. the n-site RFM, n > 2).
/// Convergence is observed, not guaranteed.
inline PeriodicOrbit periodic_orbit_uncertified(const DynSystem& sys, const Vector& x0, const NormSpec& norm,
                                                double tol = kDefaultOrbitTolerance, long max_periods = 100000,
                                                const OrbitOptions& opts = {}) {
    IntegrationOptions io{opts.steps_per_period, true, opts.box_slack};
    Vector x = x0;
    for (long k = 0; k < max_periods; ++k) {
        Vector next = flow(sys, x, 0.0, sys.period(), io);
        const double change = vector_norm(norm, next - x);
        x = std::move(next);
        if (change < tol) return detail::record_period(sys, x, norm, opts);
    }
    throw OrbitConvergenceError(sys.name + ": no periodic orbit found within " + std::to_string(max_periods) +
                                " periods");
}

/// Steady state of y' = A (y - e) + b v(t) for a cosine-sum input v:
/// kappa(t) = e + g(0) mean(v) + sum_i a_i Re(g(j w_i) e^{j(w_i t + phi_i)}).
class SteadyStateResponse {
public:
    SteadyStateResponse(const LtiSystem& lti, const PeriodicInput& input) : offset_(lti.offset), period_(input.period()) {
        if (!is_hurwitz(lti.a)) throw NotHurwitzError("lti_periodic_orbit: A is not Hurwitz");
        dc_ = frequency_response(lti, 0.0).values.real() * input.mean();
        for (const auto& term : input.terms()) {
            if (term.omega == 0.0) continue;
            tones_.push_back({term, frequency_response(lti, term.omega).values});
        }
    }

    Vector operator()(double t) const {
        Vector y = offset_ + dc_;
        for (const auto& tone : tones_) {
            const Complex rot = std::polar(tone.term.amplitude, tone.term.omega * t + tone.term.phase);
            y += (tone.response * rot).real();
        }
        return y;
    }

    /// Componentwise bound on |kappa_r(t) - e_r|, exact for a single tone.
    Vector swing() const {
        Vector s = dc_.cwiseAbs();
        for (const auto& tone : tones_) s += std::abs(tone.term.amplitude) * tone.response.cwiseAbs();
        return s;
    }

    const Vector& offset() const { return offset_; }
    double period() const { return period_; }

private:
    struct Tone {
        CosineTerm term;
        ComplexVector response;
    };
    Vector offset_;
    Vector dc_;
    double period_;
    std::vector<Tone> tones_;
};

inline PeriodicOrbit sample_orbit(const SteadyStateResponse& response, std::size_t n) {
    if (n == 0) throw InputError("sample_orbit: empty grid");
    std::vector<Vector> samples;
    samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        samples.push_back(response(response.period() * static_cast<double>(k) / static_cast<double>(n)));
    }
    return {response.period(), std::move(samples), 0.0};
}

/// Closed-form T-periodic orbit of an LTI system under a cosine-sum input.
inline PeriodicOrbit lti_periodic_orbit(const LtiSystem& lti, const PeriodicInput& input,
                                        std::size_t n = kDefaultStepsPerPeriod) {
    return sample_orbit(SteadyStateResponse(lti, input), n);
}

/// tau_k -> |gamma(tau_k) - kappa(tau_k)| on the finer of the two grids.
inline std::vector<double> orbit_distance_curve(const PeriodicOrbit& gamma, const PeriodicOrbit& kappa,
                                                const NormSpec& norm) {
    if (std::abs(gamma.period() - kappa.period()) > 1e-9 * std::max(gamma.period(), kappa.period())) {
        throw InputError("orbit_distance_curve: period mismatch");
    }
    detail::require_size(kappa.dim(), gamma.dim(), "orbit_distance_curve");
    const std::size_t n = std::max(gamma.size(), kappa.size());
    std::vector<double> curve(n);
    for (std::size_t k = 0; k < n; ++k) {
        curve[k] = vector_norm(norm, gamma.on_grid(k, n) - kappa.on_grid(k, n));
    }
    return curve;
}

/// Bounding box of a simulated path (plus extra points), inflated by
/// `margin` times each width and by `floor` absolutely.
inline StateBox hull_box(const std::vector<Vector>& points, double margin = 0.1, double floor = 1e-6) {
    if (points.empty()) throw InputError("hull_box: no points");
    Vector lo = points.front();
    Vector hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vector pad = (margin * (hi - lo)).array() + floor;
    return {lo - pad, hi + pad};
}

/// Replaces a heuristic box by the inflated hull of the trajectory from x0,
/// followed until successive period-start states differ by less than `tol`,
/// together with `extra` points (typically the approximating orbit). The
/// analytic certificate no longer applies to the new box and is dropped;
/// certify the result with check_contraction.
inline DynSystem refit_box(const DynSystem& sys, const Vector& x0, const NormSpec& norm,
                           const std::vector<Vector>& extra = {}, double margin = 0.1,
                           double tol = kDefaultOrbitTolerance, int steps_per_period = kDefaultStepsPerPeriod,
                           long max_periods = 100000) {
    IntegrationOptions io{steps_per_period, false, 0.0};
    std::vector<Vector> points = extra;
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(steps_per_period) / 256);
    Vector x = x0;
    points.push_back(x);
    for (long k = 0;; ++k) {
        if (k >= max_periods) {
            throw OrbitConvergenceError(sys.name + ": trajectory did not settle while fitting the box");
        }
        Vector next = detail::march(sys, x, 0.0, sys.period(), io, [&](std::size_t i, double, const Vector& y) {
            if (i % stride == 0) points.push_back(y);
        });
        const double change = vector_norm(norm, next - x);
        x = std::move(next);
        if (change < tol) break;
    }
    DynSystem out = sys;
    out.box = hull_box(points, margin);
    out.analytic_certificate.reset();
    out.heuristic_box = true;
    return out;
}

} // namespace entrain
