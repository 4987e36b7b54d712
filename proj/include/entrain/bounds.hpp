#pragma once

// Error bounds between the entrained orbit gamma of a contractive system and
// the periodic orbit kappa of an approximating system (constant input or LTI).

#include "entrain/core.hpp"
#include "entrain/linalg.hpp"
#include "entrain/models.hpp"
#include "entrain/norms.hpp"
#include "entrain/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace entrain {

// ---------------------------------------------------------------------------
// Weighted quadrature c(alpha) = int_0^alpha e^{-eta (alpha - s)} v(s) ds
// ---------------------------------------------------------------------------

namespace detail {

/// Panel update c_{k+1} = decay c_k + w0 v_k + w1 v_{k+1}: the exponential
/// weight integrated exactly against the linear interpolant of v.
struct PanelWeights {
    double decay = 1.0;
    double w0 = 0.0;
    double w1 = 0.0;
};

inline PanelWeights panel_weights(double eta, double h) {
    const double z = eta * h;
    PanelWeights p;
    p.decay = std::exp(-z);
    if (z < 1e-3) {
        p.w0 = h * (0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0 + z * z * z * z / 144.0);
        p.w1 = h * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0 + z * z * z * z / 720.0);
    } else {
        const double one_minus = -std::expm1(-z);
        const double mixed = (one_minus - z * p.decay) / (z * z);
        p.w0 = h * mixed;
        p.w1 = h * (one_minus / z - mixed);
    }
    return p;
}

} // namespace detail

/// Running c(t_k) for samples v_0..v_K on a uniform grid of spacing h.
inline std::vector<double> weighted_quadrature_curve(const std::vector<double>& values, double h, double eta) {
    if (values.empty()) throw InputError("weighted_quadrature: no samples");
    if (eta < 0.0) throw InputError("weighted_quadrature: eta must be nonnegative");
    if (!(h > 0.0)) throw InputError("weighted_quadrature: step must be positive");
    const detail::PanelWeights p = detail::panel_weights(eta, h);
    std::vector<double> c(values.size(), 0.0);
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        c[k + 1] = p.decay * c[k] + p.w0 * values[k] + p.w1 * values[k + 1];
    }
    return c;
}

/// c(alpha) from samples v(k alpha / K), k = 0..K.
inline double weighted_quadrature(const std::vector<double>& values, double alpha, double eta) {
    if (values.size() < 2) {
        if (values.size() == 1 && alpha == 0.0) return 0.0;
        throw InputError("weighted_quadrature: need at least two samples");
    }
    return weighted_quadrature_curve(values, alpha / static_cast<double>(values.size() - 1), eta).back();
}

struct QuadratureOptions {
    std::size_t initial_panels = 1024;
    double rel_tol = 1e-6;
    int max_halvings = 12;
};

/// c(alpha) for a callable v, halving the step until successive estimates
/// agree to `rel_tol` relative.
template <typename Fn>
    requires std::invocable<Fn&, double>
double weighted_quadrature(Fn&& v, double alpha, double eta, const QuadratureOptions& opts = {}) {
    if (!(alpha >= 0.0)) throw InputError("weighted_quadrature: alpha must be nonnegative");
    if (alpha == 0.0) return 0.0;
    auto estimate = [&](std::size_t panels) {
        std::vector<double> samples(panels + 1);
        for (std::size_t k = 0; k <= panels; ++k) {
            samples[k] = v(alpha * static_cast<double>(k) / static_cast<double>(panels));
        }
        return weighted_quadrature(samples, alpha, eta);
    };
    std::size_t panels = std::max<std::size_t>(opts.initial_panels, 2);
    double prev = estimate(panels);
    for (int i = 0; i < opts.max_halvings; ++i) {
        panels *= 2;
        const double next = estimate(panels);
        if (std::abs(next - prev) <= opts.rel_tol * std::abs(next) || next == prev) return next;
        prev = next;
    }
    return prev;
}

// ---------------------------------------------------------------------------
// Periodic-orbit bound
// ---------------------------------------------------------------------------

/// s_k = |f(t_k, kappa(t_k)) - g(t_k, kappa(t_k))| at t_k = k T / N.
struct MismatchSignal {
    double period = 1.0;
    std::vector<double> samples;

    double time(std::size_t k) const { return period * static_cast<double>(k) / static_cast<double>(samples.size()); }
    double max() const { return samples.empty() ? 0.0 : *std::max_element(samples.begin(), samples.end()); }
};

struct BoundCurve {
    double c_period = 0.0;       // c(T)
    std::vector<double> c_tau;   // c(tau_k)
    std::vector<double> values;  // bound at tau_k
};

namespace detail {

inline void require_contraction(double eta) {
    if (!(eta > 0.0)) throw InputError("bound requires strict contraction (eta > 0)");
}

} // namespace detail

/// e^{-eta tau} c(T) / (1 - e^{-eta T}) + c(tau) on the mismatch grid.
inline BoundCurve periodic_bound_curve(const MismatchSignal& mismatch, double eta) {
    detail::require_contraction(eta);
    const std::size_t n = mismatch.samples.size();
    if (n == 0) throw InputError("periodic_bound_curve: empty mismatch");
    for (double s : mismatch.samples) {
        if (!(s >= 0.0)) throw InputError("periodic_bound_curve: mismatch must be nonnegative");
    }
    std::vector<double> extended = mismatch.samples;
    extended.push_back(mismatch.samples.front());
    const double h = mismatch.period / static_cast<double>(n);
    std::vector<double> c = weighted_quadrature_curve(extended, h, eta);

    BoundCurve out;
    out.c_period = c.back();
    c.pop_back();
    const double gain = out.c_period / -std::expm1(-eta * mismatch.period);
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = std::exp(-eta * mismatch.time(k)) * gain + c[k];
    }
    out.c_tau = std::move(c);
    return out;
}

/// (1 / eta) max_t mismatch(t).
inline double max_form_bound(const MismatchSignal& mismatch, double eta) {
    detail::require_contraction(eta);
    return mismatch.max() / eta;
}

// ---------------------------------------------------------------------------
// Box-constrained program
// ---------------------------------------------------------------------------

struct BoxProgramResult {
    double value = 0.0;   // max |H| / eta
    bool exact = false;   // vertex enumeration on a multiaffine H
    Vector z;             // maximizer
    double v = 0.0;
};

/// max |H(z, v)| / eta subject to |z_r| <= caps_z(r), |v| <= cap_v.
///
/// Multiaffine H: every coordinate section of |H| is convex, so the max sits
/// at one of the 2^{n+1} vertices. Otherwise a uniform grid followed by
/// coordinate-wise line scans; the result is then a lower estimate.
inline BoxProgramResult box_program_bound(const std::function<Vector(const Vector&, double)>& h, const Vector& caps_z,
                                          double cap_v, double eta, const NormSpec& norm, bool multiaffine) {
    detail::require_contraction(eta);
    if ((caps_z.array() < 0.0).any() || cap_v < 0.0) throw InputError("box_program_bound: caps must be nonnegative");
    const Eigen::Index n = caps_z.size();
    const Eigen::Index dims = n + 1;
    Vector caps(dims);
    caps << caps_z, cap_v;

    BoxProgramResult best;
    best.z = Vector::Zero(n);
    best.value = -1.0;
    auto consider = [&](const Vector& point) {
        const double value = vector_norm(norm, h(point.head(n), point(n)));
        if (value > best.value) {
            best.value = value;
            best.z = point.head(n);
            best.v = point(n);
        }
    };

    if (multiaffine) {
        if (dims > 24) throw InputError("box_program_bound: too many vertices");
        const std::uint64_t count = std::uint64_t{1} << dims;
        Vector point(dims);
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            for (Eigen::Index i = 0; i < dims; ++i) point(i) = (mask >> i) & 1U ? caps(i) : -caps(i);
            consider(point);
        }
        best.exact = true;
    } else {
        const double budget = 2.0e5;
        const int per_axis = std::max(3, static_cast<int>(std::floor(std::pow(budget, 1.0 / static_cast<double>(dims)))));
        detail::for_each_grid_point(StateBox(-caps, caps), per_axis | 1, consider);
        Vector point(dims);
        point << best.z, best.v;
        constexpr int kScan = 201;
        for (int round = 0; round < 20; ++round) {
            const double before = best.value;
            for (Eigen::Index i = 0; i < dims; ++i) {
                point << best.z, best.v;
                for (int s = 0; s < kScan; ++s) {
                    point(i) = -caps(i) + 2.0 * caps(i) * s / (kScan - 1);
                    consider(point);
                }
            }
            if (!(best.value > before * (1.0 + 1e-12))) break;
        }
        best.exact = false;
    }
    best.value /= eta;
    return best;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct BoundOptions {
    double validity_slack = 1e-4;
    // Absolute floor for the validity check, for grids where both curves vanish.
    double validity_floor = 1e-12;
    // Relative slack (to the box widths) when checking kappa in the box.
    double domain_slack = 1e-9;
};

struct BoundReport {
    std::string model;
    ParamList params;
    std::string approx;
    std::string norm;
    double eta = 0.0;
    double period = 0.0;
    std::size_t grid = 0;
    double c_period = 0.0;
    std::vector<double> tau;
    std::vector<double> mismatch;
    std::vector<double> curve;
    std::vector<double> measured;
    double constant_bound = 0.0; // (1 / eta) max_t mismatch
    std::optional<BoxProgramResult> box_program;
    double max_ratio = 0.0;
    double validity_slack = 1e-4;
    double validity_floor = 1e-12;

    /// Index of the first tau with measured > curve (1 + slack) + floor.
    std::optional<std::size_t> first_violation() const {
        for (std::size_t k = 0; k < measured.size(); ++k) {
            if (measured[k] > curve[k] * (1.0 + validity_slack) + validity_floor) return k;
        }
        return std::nullopt;
    }
    bool valid() const { return !first_violation().has_value(); }
    double max_measured() const {
        return measured.empty() ? 0.0 : *std::max_element(measured.begin(), measured.end());
    }
    double max_curve() const { return curve.empty() ? 0.0 : *std::max_element(curve.begin(), curve.end()); }
};

namespace detail {

inline BoundReport assemble_report(const DynSystem& sys, std::string approx, const PeriodicOrbit& gamma,
                                   const PeriodicOrbit& kappa, MismatchSignal mismatch, double eta,
                                   const NormSpec& norm, const BoundOptions& opts) {
    BoundReport r;
    r.model = sys.name;
    r.params = sys.params;
    r.approx = std::move(approx);
    r.norm = norm.describe();
    r.eta = eta;
    r.period = sys.period();
    r.grid = mismatch.samples.size();
    const BoundCurve curve = periodic_bound_curve(mismatch, eta);
    r.c_period = curve.c_period;
    r.curve = curve.values;
    r.constant_bound = max_form_bound(mismatch, eta);
    r.measured = orbit_distance_curve(gamma, kappa, norm);
    if (r.measured.size() != r.curve.size()) throw InputError("bound: orbit grid differs from mismatch grid");
    r.tau.resize(r.grid);
    for (std::size_t k = 0; k < r.grid; ++k) r.tau[k] = mismatch.time(k);
    r.mismatch = std::move(mismatch.samples);
    r.validity_slack = opts.validity_slack;
    r.validity_floor = opts.validity_floor;
    for (std::size_t k = 0; k < r.grid; ++k) {
        if (r.curve[k] > 0.0) r.max_ratio = std::max(r.max_ratio, r.measured[k] / r.curve[k]);
    }
    return r;
}

inline void require_in_box(const DynSystem& sys, const Vector& x, double t, double slack, const char* what) {
    const Vector tol = slack * (1.0 + sys.box.widths().array());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < sys.box.lower(i) - tol(i) || x(i) > sys.box.upper(i) + tol(i)) {
            throw DomainError(sys.name + ": " + what + " leaves the certified box at t = " + std::to_string(t) +
                              ", state " + format_state(x));
        }
    }
}

} // namespace detail

/// Constant-input approximant y' = 0 with kappa = z: the mismatch is |F(z, u(s))|.
inline BoundReport averaged_input_bound(const DynSystem& sys, const PeriodicOrbit& gamma, const Vector& z, double eta,
                                        const NormSpec& norm, const BoundOptions& opts = {}) {
    detail::require_size(z.size(), sys.dim, "averaged_input_bound z");
    detail::require_in_box(sys, z, 0.0, opts.domain_slack, "z");
    const std::size_t n = gamma.size();
    MismatchSignal mismatch{sys.period(), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        mismatch.samples[k] = vector_norm(norm, sys.field(mismatch.time(k), z));
    }
    const PeriodicOrbit kappa(sys.period(), std::vector<Vector>(n, z));
    return detail::assemble_report(sys, "averaged", gamma, kappa, std::move(mismatch), eta, norm, opts);
}

/// Running transient bound int_0^t e^{-eta (t - s)} |F(z, u(s))| ds for
/// t in [0, horizon], sampled every T / steps_per_period.
struct TransientBound {
    std::vector<double> times;
    std::vector<double> bound;
};

inline TransientBound averaged_transient_bound(const DynSystem& sys, const Vector& z, double eta, const NormSpec& norm,
                                               double horizon, int steps_per_period = kDefaultStepsPerPeriod) {
    if (!(horizon > 0.0)) throw InputError("averaged_transient_bound: horizon must be positive");
    if (eta < 0.0) throw InputError("averaged_transient_bound: eta must be nonnegative");
    const auto steps = static_cast<std::size_t>(
        std::ceil(horizon / (sys.period() / static_cast<double>(steps_per_period)) - 1e-9));
    const double h = horizon / static_cast<double>(steps);
    TransientBound out;
    out.times.resize(steps + 1);
    std::vector<double> v(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        out.times[k] = h * static_cast<double>(k);
        v[k] = vector_norm(norm, sys.field(out.times[k], z));
    }
    out.bound = weighted_quadrature_curve(v, h, eta);
    return out;
}

/// LTI approximant y' = A (y - e) + B v(t) where the system input is
/// u(t) = u_bar + v(t) with u_bar the mean of the system input.
///
/// The mismatch is |F(kappa, u) - G(kappa, v)|. When u = u_bar + v holds on
/// the grid the box program is also evaluated, with caps
/// |z_r| <= |dc_r| + sum_i |a_i| |g_r(j w_i)| and |v| <= |mean v| + swing(v).
inline BoundReport linearized_bound(const DynSystem& sys, const PeriodicOrbit& gamma, const LtiSystem& lti,
                                    const PeriodicInput& lti_input, double eta, const NormSpec& norm,
                                    const BoundOptions& opts = {}) {
    detail::require_size(lti.dim(), sys.dim, "linearized_bound LTI dimension");
    if (std::abs(lti_input.period() - sys.period()) > 1e-9 * sys.period()) {
        throw InputError("linearized_bound: LTI input period differs from the system period");
    }
    const SteadyStateResponse response(lti, lti_input);
    const std::size_t n = gamma.size();
    std::vector<Vector> kappa_samples(n);
    MismatchSignal mismatch{sys.period(), std::vector<double>(n)};
    const double u_bar = sys.input.mean();
    bool decomposes = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = mismatch.time(k);
        kappa_samples[k] = response(t);
        detail::require_in_box(sys, kappa_samples[k], t, opts.domain_slack, "kappa");
        const double u = sys.input(t);
        const double v = lti_input(t);
        mismatch.samples[k] = vector_norm(norm, sys.rhs(kappa_samples[k], u) - lti.field(kappa_samples[k], v));
        if (std::abs(u - u_bar - v) > 1e-12 * (1.0 + std::abs(u))) decomposes = false;
    }
    const PeriodicOrbit kappa(sys.period(), std::move(kappa_samples));
    BoundReport report = detail::assemble_report(sys, "linearized", gamma, kappa, std::move(mismatch), eta, norm, opts);
    if (decomposes) {
        const Vector e = lti.offset;
        const Matrix a = lti.a;
        const Vector b = lti.b.col(0);
        auto h = [&sys, e, a, b, u_bar](const Vector& z, double v) {
            return Vector(sys.rhs(e + z, u_bar + v) - a * z - b * v);
        };
        const double cap_v = std::abs(lti_input.mean()) + lti_input.swing();
        report.box_program = box_program_bound(h, response.swing(), cap_v, eta, norm, sys.multiaffine_mismatch);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Frequency sweep
// ---------------------------------------------------------------------------

/// Everything needed to compare gamma and kappa at one forcing frequency.
struct SweepCase {
    DynSystem sys;
    ContractionCertificate cert;
    LtiSystem lti;
    PeriodicInput lti_input;
    Vector x0;
};

using SweepFactory = std::function<SweepCase(double omega)>;

struct SweepRow {
    double omega = 0.0;
    double measured_max = std::numeric_limits<double>::quiet_NaN();
    double bound_max = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string message;
};

struct SweepOptions {
    OrbitOptions orbit;
    double tol = kDefaultOrbitTolerance;
    unsigned threads = 0; // 0: THREADS env, else hardware concurrency
};

inline unsigned sweep_thread_count(unsigned requested, std::size_t jobs) {
    unsigned threads = requested;
    if (threads == 0) {
        if (const char* env = std::getenv("THREADS")) {
            const long parsed = std::strtol(env, nullptr, 10);
            if (parsed > 0) threads = static_cast<unsigned>(parsed);
        }
    }
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
}

/// One sweep row: entrained orbit, LTI orbit, sup distance and the max-form
/// bound, all in the certificate norm.
inline SweepRow sweep_point(const SweepFactory& factory, double omega, const SweepOptions& opts = {}) {
    SweepRow row;
    row.omega = omega;
    try {
        const SweepCase c = factory(omega);
        const PeriodicOrbit gamma = periodic_orbit(c.sys, c.cert, c.x0, opts.tol, opts.orbit);
        const BoundReport report = linearized_bound(c.sys, gamma, c.lti, c.lti_input, c.cert.eta, c.cert.norm);
        row.measured_max = report.max_measured();
        row.bound_max = report.constant_bound;
        row.eta = c.cert.eta;
        row.ok = true;
    } catch (const Error& e) {
        row.message = e.what();
    }
    return row;
}

/// Rows in the order of `omegas`, whatever the thread count.
inline std::vector<SweepRow> lowpass_sweep(const SweepFactory& factory, const std::vector<double>& omegas,
                                           const SweepOptions& opts = {}) {
    std::vector<SweepRow> rows(omegas.size());
    const unsigned threads = sweep_thread_count(opts.threads, omegas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < omegas.size(); i = next++) rows[i] = sweep_point(factory, omegas[i], opts);
    };
    if (threads <= 1) {
        worker();
        return rows;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return rows;
}

/// Least-squares slope of log(value) against log(omega) over rows with
/// lo <= omega <= hi and a positive finite value.
inline double loglog_slope(const std::vector<SweepRow>& rows, double lo, double hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (!r.ok || r.omega < lo || r.omega > hi || !(r.measured_max > 0.0)) continue;
        const double x = std::log(r.omega);
        const double y = std::log(r.measured_max);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / denom;
}

/// omega_k = lo (hi / lo)^{k / (count - 1)}.
inline std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi >= lo) || count < 1) throw InputError("log_grid: need 0 < lo <= hi and count >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
    }
    if (count > 1) out.back() = hi;
    return out;
}

} // namespace entrain
