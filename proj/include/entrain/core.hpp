#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrain {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error hierarchy. The CLI maps these onto exit codes, so keep the
// input/model/internal split intact when adding new types.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad caller input: shapes, parse failures, out-of-range parameters.
struct InputError : Error {
    using Error::Error;
};

struct DimensionError : InputError {
    using InputError::InputError;
};

struct SingularMatrixError : Error {
    using Error::Error;
};

/// Anything that means "this model does not satisfy the hypotheses".
struct ModelError : Error {
    using Error::Error;
};

struct NotHurwitzError : ModelError {
    using ModelError::ModelError;
};

struct CertificationError : ModelError {
    CertificationError(const std::string& what, double t, Vector x)
        : ModelError(what), time(t), state(std::move(x)) {}
    explicit CertificationError(const std::string& what) : ModelError(what) {}

    double time = 0.0;
    Vector state;
};

struct TrajectoryEscapeError : ModelError {
    TrajectoryEscapeError(const std::string& what, double t, Vector x)
        : ModelError(what), time(t), state(std::move(x)) {}

    double time;
    Vector state;
};

struct OrbitConvergenceError : ModelError {
    using ModelError::ModelError;
};

/// The approximating orbit leaves the certified set.
struct DomainError : ModelError {
    using ModelError::ModelError;
};

/// A computed bound was violated. Never expected; signals a bug.
struct BoundViolationError : Error {
    using Error::Error;
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::EigenBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

inline void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                             " vs " + std::to_string(want) + ")");
    }
}

} // namespace detail

} // namespace entrain
