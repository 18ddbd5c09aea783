#pragma once

// Dense SPD linear algebra used throughout: sample moments, Cholesky
// factors with log-determinants, quadratic forms and symmetric square roots.
// Inverses are never formed explicitly; every S^{-1} application is a
// triangular solve against the Cholesky factor.

#include <Eigen/Dense>

#include <cstddef>

namespace mdqda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Symmetric p x p matrix. Positive definiteness is established by cholesky().
class SpdMatrix {
public:
    SpdMatrix() = default;
    // Throws ValidationError if m is not square or not symmetric to 1e-10
    // (relative to its largest entry).
    explicit SpdMatrix(Matrix m);

    static SpdMatrix identity(std::size_t p);
    static SpdMatrix diagonal(const Vector& d);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Matrix m_;
};

// Lower-triangular L with S = L L^T.
class CholFactor {
public:
    CholFactor() = default;
    // Adopts an existing factor (used when reloading a serialized model).
    CholFactor(Matrix lower, double log_det);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
    const Matrix& lower() const noexcept { return lower_; }
    double log_det() const noexcept { return log_det_; }

    // Solves L y = v in place.
    void solve_lower_in_place(Vector& v) const;

private:
    Matrix lower_;
    double log_det_ = 0.0;
};

// p x n matrix whose columns are observations. Every entry must be finite.
class DataMatrix {
public:
    DataMatrix() = default;
    explicit DataMatrix(Matrix columns);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t count() const noexcept { return static_cast<std::size_t>(x_.cols()); }
    const Matrix& columns() const noexcept { return x_; }

    // Coordinates [first, first + len) of every observation.
    DataMatrix row_block(std::size_t first, std::size_t len) const;
    // Observations [first, first + len).
    DataMatrix column_block(std::size_t first, std::size_t len) const;

private:
    Matrix x_;
};

Vector sample_mean(const DataMatrix& x);

// Unbiased (divisor n - 1) covariance, exactly symmetric. A singular result is
// returned as is; it is rejected later by cholesky().
SpdMatrix sample_covariance(const DataMatrix& x);
// Same, reusing an already computed mean.
SpdMatrix sample_covariance(const DataMatrix& x, const Vector& mean);

// Throws NotPositiveDefinite carrying the index of the first non-positive pivot.
CholFactor cholesky(const SpdMatrix& s);

// v^T S^{-1} v = |L^{-1} v|^2.
double quad_form(const Vector& v, const CholFactor& f);

// Symmetric A with A A = S, via the symmetric eigendecomposition. Eigenvalues
// in [-1e-10 lambda_max, 0] are clamped to zero; anything more negative is an
// error.
SpdMatrix sqrt_spd(const SpdMatrix& s);

}  // namespace mdqda
