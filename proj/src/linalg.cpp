#include "mdqda/linalg.hpp"

#include "mdqda/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdqda {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kPsdTol = 1e-10;
// Squared pivots at or below kPivotTol * p * max|a_ii| count as zero.
constexpr double kPivotTol = 1e-14;

// Unblocked Cholesky used only to report where LLT broke down.
std::size_t first_bad_pivot(const Matrix& a) {
    const Eigen::Index p = a.rows();
    Matrix l = Matrix::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double d = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return static_cast<std::size_t>(j);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < p; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    // LLT rejected a pivot the plain recurrence accepted (rounding at the
    // boundary); report the smallest diagonal entry.
    Eigen::Index idx = 0;
    l.diagonal().minCoeff(&idx);
    return static_cast<std::size_t>(idx);
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ValidationError("matrix is not square (" + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + ")");
    }
    if (!m_.allFinite()) throw ValidationError("matrix has non-finite entries");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw ValidationError("matrix is not symmetric");
    }
}

SpdMatrix SpdMatrix::identity(std::size_t p) {
    return SpdMatrix(Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
}

SpdMatrix SpdMatrix::diagonal(const Vector& d) { return SpdMatrix(Matrix(d.asDiagonal())); }

CholFactor::CholFactor(Matrix lower, double log_det) : lower_(std::move(lower)), log_det_(log_det) {
    if (lower_.rows() != lower_.cols()) throw ValidationError("Cholesky factor is not square");
}

void CholFactor::solve_lower_in_place(Vector& v) const {
    if (v.size() != lower_.rows()) {
        throw ValidationError("dimension mismatch: vector of length " + std::to_string(v.size()) +
                              " against factor of dimension " + std::to_string(lower_.rows()));
    }
    lower_.triangularView<Eigen::Lower>().solveInPlace(v);
}

DataMatrix::DataMatrix(Matrix columns) : x_(std::move(columns)) {
    if (!x_.allFinite()) throw ValidationError("data matrix has non-finite entries");
}

DataMatrix DataMatrix::row_block(std::size_t first, std::size_t len) const {
    if (first + len > dim()) throw ValidationError("row block out of range");
    return DataMatrix(x_.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(len)));
}

DataMatrix DataMatrix::column_block(std::size_t first, std::size_t len) const {
    if (first + len > count()) throw ValidationError("column block out of range");
    return DataMatrix(x_.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(len)));
}

Vector sample_mean(const DataMatrix& x) {
    if (x.count() == 0) throw ValidationError("empty sample");
    return x.columns().rowwise().mean();
}

SpdMatrix sample_covariance(const DataMatrix& x) {
    if (x.count() < 2) throw ValidationError("insufficient sample");
    return sample_covariance(x, sample_mean(x));
}

SpdMatrix sample_covariance(const DataMatrix& x, const Vector& mean) {
    const auto n = x.count();
    if (n < 2) throw ValidationError("insufficient sample");
    if (static_cast<std::size_t>(mean.size()) != x.dim()) throw ValidationError("mean has wrong dimension");
    const Eigen::Index p = static_cast<Eigen::Index>(x.dim());
    const Matrix centered = x.columns().colwise() - mean;
    Matrix s = Matrix::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(n - 1));
    // Only the lower triangle was written; mirror it, then (A + A^T)/2 is exact.
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return SpdMatrix(std::move(s));
}

CholFactor cholesky(const SpdMatrix& s) {
    const Matrix& a = s.matrix();
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite(first_bad_pivot(a));
    Matrix l = llt.matrixL();
    // A rank-deficient input can factor with roundoff-sized positive pivots;
    // treat those as failures too.
    const double floor = kPivotTol * static_cast<double>(a.rows()) * std::max(a.diagonal().cwiseAbs().maxCoeff(), 0.0);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) * l(i, i) > floor)) throw NotPositiveDefinite(static_cast<std::size_t>(i));
        log_det += std::log(l(i, i));
    }
    return CholFactor(std::move(l), 2.0 * log_det);
}

double quad_form(const Vector& v, const CholFactor& f) {
    Vector y = v;
    f.solve_lower_in_place(y);
    return y.squaredNorm();
}

SpdMatrix sqrt_spd(const SpdMatrix& s) {
    if (s.dim() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Vector lambda = eig.eigenvalues();
    const double lmax = std::max(0.0, lambda.maxCoeff());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -kPsdTol * lmax) throw NumericalError("not PSD");
        lambda(i) = std::sqrt(std::max(0.0, lambda(i)));
    }
    const Matrix& u = eig.eigenvectors();
    Matrix root = u * lambda.asDiagonal() * u.transpose();
    root = 0.5 * (root + root.transpose()).eval();
    return SpdMatrix(std::move(root));
}

}  // namespace mdqda
