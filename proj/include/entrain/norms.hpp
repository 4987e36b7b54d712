#pragma once

// Vector norms l1 / l2 / linf, optionally scaled by an invertible matrix D
// (|z|_{*,D} = |D z|_*), and the matrix measures they induce.

#include "entrain/core.hpp"
#include "entrain/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace entrain {

enum class NormKind { L1, L2, Linf };

inline std::string to_string(NormKind kind) {
    switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
    }
    return "?";
}

inline NormKind parse_norm_kind(const std::string& name) {
    if (name == "l1" || name == "L1") return NormKind::L1;
    if (name == "l2" || name == "L2") return NormKind::L2;
    if (name == "linf" || name == "Linf" || name == "inf") return NormKind::Linf;
    throw InputError("unknown norm '" + name + "' (expected l1, l2 or linf)");
}

class NormSpec {
public:
    NormSpec() = default;
    explicit NormSpec(NormKind kind) : kind_(kind) {}

    NormSpec(NormKind kind, Matrix scaling) : kind_(kind) {
        detail::require_square(scaling, "NormSpec scaling");
        if (!is_invertible(scaling)) {
            throw InputError("NormSpec: scaling matrix is singular");
        }
        const Matrix off = scaling - Matrix(scaling.diagonal().asDiagonal());
        diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
        inverse_ = diagonal_ ? Matrix(scaling.diagonal().cwiseInverse().asDiagonal()) : entrain::inverse(scaling);
        scaling_ = std::move(scaling);
    }

    static NormSpec diagonal(NormKind kind, const Vector& weights) {
        return NormSpec(kind, Matrix(weights.asDiagonal()));
    }

    NormKind kind() const { return kind_; }
    bool scaled() const { return scaling_.has_value(); }
    bool diagonal_scaling() const { return diagonal_; }
    const std::optional<Matrix>& scaling() const { return scaling_; }

    /// Dimension pinned by D; 0 when unscaled (any dimension accepted).
    Eigen::Index dim() const { return scaling_ ? scaling_->rows() : 0; }

    Vector apply(const Vector& z) const {
        if (!scaling_) return z;
        detail::require_size(z.size(), scaling_->rows(), "norm argument");
        if (diagonal_) return scaling_->diagonal().cwiseProduct(z);
        return *scaling_ * z;
    }

    /// D A D^{-1}; A itself when unscaled.
    Matrix conjugate(const Matrix& a) const {
        detail::require_square(a, "matrix measure argument");
        if (!scaling_) return a;
        detail::require_size(a.rows(), scaling_->rows(), "matrix measure argument");
        if (diagonal_) {
            return scaling_->diagonal().asDiagonal() * a * inverse_.diagonal().asDiagonal();
        }
        return *scaling_ * a * inverse_;
    }

    std::string describe() const {
        std::ostringstream out;
        out << to_string(kind_);
        if (scaling_) {
            out.precision(15);
            if (diagonal_) {
                out << "[D=diag(";
                for (Eigen::Index i = 0; i < scaling_->rows(); ++i) {
                    out << (i ? "," : "") << (*scaling_)(i, i);
                }
                out << ")]";
            } else {
                out << "[D=" << scaling_->rows() << "x" << scaling_->cols() << "]";
            }
        }
        return out.str();
    }

private:
    NormKind kind_ = NormKind::L1;
    std::optional<Matrix> scaling_;
    Matrix inverse_;
    bool diagonal_ = false;
};

inline double unscaled_norm(NormKind kind, const Vector& z) {
    switch (kind) {
    case NormKind::L1: return z.cwiseAbs().sum();
    case NormKind::L2: return z.norm();
    case NormKind::Linf: return z.size() == 0 ? 0.0 : z.cwiseAbs().maxCoeff();
    }
    return 0.0;
}

/// |D z| in the base norm.
inline double vector_norm(const NormSpec& spec, const Vector& z) {
    return unscaled_norm(spec.kind(), spec.apply(z));
}

/// Closed-form induced measure of the base norm.
inline double unscaled_measure(NormKind kind, const Matrix& a) {
    detail::require_square(a, "matrix_measure");
    const Eigen::Index n = a.rows();
    if (n == 0) return 0.0;
    switch (kind) {
    case NormKind::L1: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            double c = a(j, j);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i != j) c += std::abs(a(i, j));
            }
            best = std::max(best, c);
        }
        return best;
    }
    case NormKind::Linf: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = a(i, i);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j) r += std::abs(a(i, j));
            }
            best = std::max(best, r);
        }
        return best;
    }
    case NormKind::L2:
        return max_symmetric_eigenvalue(0.5 * (a + a.transpose()));
    }
    return 0.0;
}

/// mu_{*,D}(A) = mu_*(D A D^{-1}).
inline double matrix_measure(const NormSpec& spec, const Matrix& a) {
    return unscaled_measure(spec.kind(), spec.conjugate(a));
}

/// Checks subadditivity for (A, B) and homogeneity of A for each c >= 0 in
/// `scales`. Tolerances are 1e-9 (absolute for subadditivity, relative to
/// 1 + |c mu(A)| for homogeneity).
inline bool measure_subadditivity_check(const NormSpec& spec, const Matrix& a, const Matrix& b,
                                        std::initializer_list<double> scales = {0.0, 0.5, 1.0, 2.0, 10.0}) {
    detail::require_square(a, "measure_subadditivity_check");
    detail::require_size(b.rows(), a.rows(), "measure_subadditivity_check");
    detail::require_size(b.cols(), a.cols(), "measure_subadditivity_check");
    constexpr double kTol = 1e-9;
    const double mu_a = matrix_measure(spec, a);
    const double mu_b = matrix_measure(spec, b);
    if (matrix_measure(spec, a + b) > mu_a + mu_b + kTol) {
        return false;
    }
    for (double c : scales) {
        if (c < 0.0) {
            throw InputError("measure_subadditivity_check: homogeneity needs c >= 0");
        }
        const double lhs = matrix_measure(spec, c * a);
        if (std::abs(lhs - c * mu_a) > kTol * (1.0 + std::abs(c * mu_a))) {
            return false;
        }
    }
    return true;
}

} // namespace entrain
