#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdgeo {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Points of both spaces are flat vectors; matrix-valued spaces keep their
// shape next to the data (column-major), so the Frobenius inner product is
// the plain dot product.
struct Shape {
    Index rows = 0;
    Index cols = 1;

    Index size() const { return rows * cols; }
    bool is_matrix() const { return cols > 1; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an oracle returns non-finite data, a line search cannot find
/// a sufficient decrease, or a dense kernel fails to converge.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_size(Index got, Index expected, const char* what)
{
    if (got != expected) {
        throw DimensionError(std::string(what) + ": expected dimension "
                             + std::to_string(expected) + ", got "
                             + std::to_string(got));
    }
}

inline bool all_finite(const Vector& v)
{
    return v.allFinite();
}

inline void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw NumericalFailure(std::string(what) + ": non-finite value");
    }
}

inline void require_finite(const Vector& v, const char* what)
{
    if (!v.allFinite()) {
        throw NumericalFailure(std::string(what) + ": non-finite entries");
    }
}

inline Matrix as_matrix(const Vector& v, Shape shape)
{
    require_size(v.size(), shape.size(), "as_matrix");
    return Eigen::Map<const Matrix>(v.data(), shape.rows, shape.cols);
}

inline Vector as_vector(const Matrix& m)
{
    return Eigen::Map<const Vector>(m.data(), m.size());
}

} // namespace pdgeo
