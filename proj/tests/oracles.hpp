#pragma once

// Reference values computed independently of the library: closed forms,
// scalar root finding and brute-force sampling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

/// Eigenvalues (ascending) of [[a, b], [b, c]] by the quadratic formula.
inline std::pair<double, double> sym2_eigs(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    return {mean - rad, mean + rad};
}

/// Largest real part of the eigenvalues of [[a, b], [c, d]].
inline double abscissa2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    return disc >= 0.0 ? tr / 2.0 + std::sqrt(disc) : tr / 2.0;
}

/// (jw I - A)^{-1} b for 2x2 A by Cramer's rule.
inline std::pair<std::complex<double>, std::complex<double>> freq2(double a11, double a12, double a21, double a22,
                                                                   double b1, double b2, double w) {
    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> m11 = j * w - a11, m12 = -a12, m21 = -a21, m22 = j * w - a22;
    const std::complex<double> det = m11 * m22 - m12 * m21;
    return {(b1 * m22 - m12 * b2) / det, (m11 * b2 - m21 * b1) / det};
}

/// Bisection for a sign change of f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// 2-site RFM equilibrium from the flow balance l0 (1 - e1) = l1 e1 (1 - e2) = l2 e2.
inline std::pair<double, double> rfm2_equilibrium(double l0, double l1, double l2) {
    auto e2_of = [&](double e1) { return l0 * (1.0 - e1) / l2; };
    const double e1 = bisect([&](double e1) { return l0 * (1.0 - e1) - l1 * e1 * (1.0 - e2_of(e1)); }, 0.0, 1.0);
    return {e1, e2_of(e1)};
}

/// Entrained orbit of x' = -x + 1 + sin(2 pi t / T).
inline double ex33_gamma(double T, double t) {
    const double w = 2.0 * pi / T;
    // Particular solution of x' + x = sin(w t): (sin(w t) - w cos(w t)) / (1 + w^2).
    return 1.0 + (std::sin(w * t) - w * std::cos(w * t)) / (1.0 + w * w);
}

/// int_0^alpha e^{-(alpha - s)} (1 + sin(2 pi s / T)) ds.
inline double ex33_c(double T, double alpha) {
    return 1.0 - std::exp(-alpha) + 2.0 * pi * T * std::exp(-alpha) / (4.0 * pi * pi + T * T) -
           (2.0 * pi * T * std::cos(2.0 * pi * alpha / T) - T * T * std::sin(2.0 * pi * alpha / T)) /
               (4.0 * pi * pi + T * T);
}

/// Piecewise closed form of the averaged-input periodic bound for the 2-site
/// RFM, mismatch (1 - e1) |sin(2 pi s / T)|.
inline double rfm2_periodic_bound(double tau, double e1, double eta, double T) {
    const double denom = 4.0 * pi * pi + eta * eta * T * T;
    const double ph = 2.0 * pi * tau / T;
    double r;
    if (tau < T / 2.0) {
        r = 2.0 * pi * std::exp(-eta * tau) + eta * T * std::sin(ph) - 2.0 * pi * std::cos(ph);
    } else {
        r = 2.0 * pi * std::exp(-eta * tau) * (1.0 + 2.0 * std::exp(eta * T / 2.0)) - eta * T * std::sin(ph) +
            2.0 * pi * std::cos(ph);
    }
    return 2.0 * pi * T * (1.0 - e1) / std::tanh(eta * T / 4.0) / (std::exp(eta * tau) * denom) +
           T * (1.0 - e1) / denom * r;
}

/// First component of the entrained orbit of x1' = -x1 + x2^2, x2' = -x2 + a sin(w t).
inline double ex52_gamma1(double a, double w, double t) {
    const double w2 = w * w;
    const double m = a * a / (2.0 * (1.0 + w2) * (1.0 + w2) * (1.0 + 4.0 * w2));
    return m * (1.0 + 5.0 * w2 + 4.0 * w2 * w2 + (5.0 * w2 - 1.0) * std::cos(2.0 * w * t) +
                2.0 * w * (w2 - 2.0) * std::sin(2.0 * w * t));
}

/// max_t gamma1 by dense sampling of one period plus golden refinement.
inline double ex52_max_gamma1_sampled(double a, double w) {
    const double T = pi / w; // gamma1 has period pi / w
    constexpr int n = 20000;
    int best = 0;
    double bv = -1.0;
    for (int k = 0; k < n; ++k) {
        const double v = ex52_gamma1(a, w, T * k / n);
        if (v > bv) {
            bv = v;
            best = k;
        }
    }
    double lo = T * (best - 1) / n, hi = T * (best + 1) / n;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (ex52_gamma1(a, w, x1) > ex52_gamma1(a, w, x2)) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    return std::max(bv, ex52_gamma1(a, w, 0.5 * (lo + hi)));
}

/// Optimal transcriptional scaling: positive root of k1 d^2 + (delta + k2 eT - k1) d - k2 eT = 0.
inline double transmod_d(double delta, double k1, double k2, double eT) {
    const double b = delta + k2 * eT - k1;
    return (-b + std::sqrt(b * b + 4.0 * k1 * k2 * eT)) / (2.0 * k1);
}

inline double transmod_eta(double delta, double k1, double k2, double eT, double d) {
    return std::min(k1 * (1.0 - d), delta + k2 * eT * (1.0 - 1.0 / d));
}

} // namespace oracle
