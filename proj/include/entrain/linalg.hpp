#pragma once

// Small dense linear algebra: pivoted LU, cyclic Jacobi for symmetric
// matrices, Lyapunov-based scaling of Hurwitz matrices, and frequency
// responses of single-input LTI systems.

#include "entrain/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace entrain {

/// Solves m * x = rhs by LU with partial pivoting.
///
/// Works for real and complex scalars. A pivot that is zero relative to the
/// largest entry of m (n * machine epsilon) raises SingularMatrixError.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lu_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
    detail::require_square(m, "lu_solve");
    detail::require_size(rhs.size(), m.rows(), "lu_solve rhs");

    const Eigen::Index n = m.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lu = m;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = rhs;
    if (n == 0) {
        return x;
    }

    const double scale = lu.cwiseAbs().maxCoeff();
    const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
    if (scale == 0.0) {
        throw SingularMatrixError("lu_solve: zero matrix");
    }

    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        double best = std::abs(lu(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                pivot = i;
            }
        }
        if (best <= tiny) {
            throw SingularMatrixError("lu_solve: matrix is singular to working precision (column " +
                                      std::to_string(k) + ")");
        }
        if (pivot != k) {
            lu.row(k).swap(lu.row(pivot));
            std::swap(x(k), x(pivot));
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const Scalar factor = lu(i, k) / lu(k, k);
            lu(i, k) = factor;
            for (Eigen::Index j = k + 1; j < n; ++j) {
                lu(i, j) -= factor * lu(k, j);
            }
            x(i) -= factor * x(k);
        }
    }

    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Scalar acc = x(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            acc -= lu(i, j) * x(j);
        }
        x(i) = acc / lu(i, i);
    }
    return x;
}

/// Invertibility test via the LU pivots; used to validate scaling matrices.
inline bool is_invertible(const Matrix& m) {
    detail::require_square(m, "is_invertible");
    try {
        (void)lu_solve<double>(m, Vector::Ones(m.rows()));
    } catch (const SingularMatrixError&) {
        return false;
    }
    return true;
}

inline Matrix inverse(const Matrix& m) {
    detail::require_square(m, "inverse");
    const Eigen::Index n = m.rows();
    Matrix inv(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        inv.col(j) = lu_solve<double>(m, Vector::Unit(n, j));
    }
    return inv;
}

struct SymmetricEigen {
    Vector values;  // ascending
    Matrix vectors; // columns are orthonormal eigenvectors
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps rotate away every off-diagonal entry above a threshold until the
/// off-diagonal Frobenius mass drops below 1e-14 of the matrix norm.
inline SymmetricEigen symmetric_eig(const Matrix& s) {
    detail::require_square(s, "symmetric_eig");
    const Eigen::Index n = s.rows();
    const double norm = s.norm();
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, norm)) {
        throw InputError("symmetric_eig: input is not symmetric");
    }

    Matrix a = 0.5 * (s + s.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double target = 1e-14 * std::max(norm, std::numeric_limits<double>::min());

    auto off_mass = [&] {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j) {
                    sum += a(i, j) * a(i, j);
                }
            }
        }
        return std::sqrt(sum);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_mass();
        if (off < target) {
            break;
        }
        // Early sweeps skip small entries; later ones rotate everything.
        const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= threshold || apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        out.values(i) = a(src, src);
        out.vectors.col(i) = v.col(src);
    }
    return out;
}

inline double max_symmetric_eigenvalue(const Matrix& s) {
    return symmetric_eig(s).values.maxCoeff();
}

/// Eigenvalues of a general real matrix (Hessenberg QR via Eigen).
inline ComplexVector eigenvalues(const Matrix& a) {
    detail::require_square(a, "eigenvalues");
    if (a.rows() == 0) {
        return ComplexVector(0);
    }
    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error("eigenvalues: QR iteration did not converge");
    }
    return solver.eigenvalues();
}

/// Largest real part of the spectrum.
inline double spectral_abscissa(const Matrix& a) {
    return eigenvalues(a).real().maxCoeff();
}

inline bool is_hurwitz(const Matrix& a) {
    return a.rows() > 0 && spectral_abscissa(a) < 0.0;
}

/// Q, its square root P, and the rate eta with QA + A'Q <= -2 eta Q.
struct LyapunovScaling {
    Matrix q;
    Matrix p;
    double eta = 0.0;
};

/// Builds a scaled-Euclidean contraction certificate for a Hurwitz matrix.
///
/// eta is 0.9 of the stability margin. Q solves (A + eta I)'Q + Q(A + eta I) = -I,
/// so QA + A'Q + 2 eta Q = -I, and P = Q^{1/2}. Then mu_{2,P}(A) <= -eta.
inline LyapunovScaling lyapunov_scaling(const Matrix& a) {
    detail::require_square(a, "lyapunov_scaling");
    const double abscissa = spectral_abscissa(a);
    if (!(abscissa < 0.0)) {
        throw NotHurwitzError("lyapunov_scaling: matrix is not Hurwitz (spectral abscissa " +
                              std::to_string(abscissa) + ")");
    }
    const Eigen::Index n = a.rows();
    const double eta = 0.9 * -abscissa;
    const Matrix shifted = a + eta * Matrix::Identity(n, n);

    // Column-major vec: vec(S'Q + QS) = (I kron S' + S' kron I) vec(Q).
    const Eigen::Index nn = n * n;
    Matrix system = Matrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index row = i + j * n; // entry (i, j) of the equation
            for (Eigen::Index k = 0; k < n; ++k) {
                system(row, k + j * n) += shifted(k, i); // (S'Q)_{ij} = sum_k S_{ki} Q_{kj}
                system(row, i + k * n) += shifted(k, j); // (QS)_{ij} = sum_k Q_{ik} S_{kj}
            }
        }
    }
    Vector rhs = Vector::Zero(nn);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i + i * n) = -1.0;
    }
    const Vector vec_q = lu_solve<double>(system, rhs);

    Matrix q(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            q(i, j) = vec_q(i + j * n);
        }
    }
    q = 0.5 * (q + q.transpose());

    const SymmetricEigen eig = symmetric_eig(q);
    if (eig.values.minCoeff() <= 0.0) {
        throw Error("lyapunov_scaling: Lyapunov solution is not positive definite");
    }
    const Matrix p = eig.vectors * eig.values.cwiseSqrt().asDiagonal() * eig.vectors.transpose();
    return {q, 0.5 * (p + p.transpose()), eta};
}

/// dy/dt = A (y - offset) + B u.
struct LtiSystem {
    Matrix a;
    Matrix b;
    Vector offset;

    LtiSystem() = default;
    LtiSystem(Matrix a_in, Matrix b_in, Vector offset_in = {})
        : a(std::move(a_in)), b(std::move(b_in)), offset(std::move(offset_in)) {
        detail::require_square(a, "LtiSystem A");
        detail::require_size(b.rows(), a.rows(), "LtiSystem B rows");
        if (offset.size() == 0) {
            offset = Vector::Zero(a.rows());
        }
        detail::require_size(offset.size(), a.rows(), "LtiSystem offset");
    }

    Eigen::Index dim() const { return a.rows(); }
    Eigen::Index inputs() const { return b.cols(); }

    Vector field(const Vector& y, double u) const {
        detail::require_size(b.cols(), 1, "LtiSystem scalar input");
        return a * (y - offset) + b.col(0) * u;
    }
};

/// g(jw) = (jw I - A)^{-1} b.
struct FrequencyResponse {
    double omega = 0.0;
    ComplexVector values;

    double gain(Eigen::Index r) const { return std::abs(values(r)); }
    double phase(Eigen::Index r) const { return std::arg(values(r)); }
};

inline FrequencyResponse frequency_response(const LtiSystem& sys, double omega) {
    detail::require_size(sys.inputs(), 1, "frequency_response: single-input systems only; B columns");
    const Eigen::Index n = sys.dim();
    ComplexMatrix m = -sys.a.cast<Complex>();
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) += Complex(0.0, omega);
    }
    const ComplexVector b = sys.b.col(0).cast<Complex>();
    return {omega, lu_solve<Complex>(m, b)};
}

} // namespace entrain
