#pragma once

// Generators and comparison helpers shared by the unit and acceptance tests.

#include "mdqda/linalg.hpp"
#include "mdqda/random.hpp"

#include <cmath>
#include <cstddef>
#include <random>

namespace mdqda::testing {

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> g;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = g(rng);
    }
    return m;
}

// G G^T / p + floor * I: well conditioned but far from diagonal.
inline SpdMatrix random_spd(std::size_t p, Rng& rng, double floor = 0.5) {
    const Matrix g = gaussian_matrix(p, p, rng);
    Matrix s = g * g.transpose() / static_cast<double>(p);
    s.diagonal().array() += floor;
    return SpdMatrix((s + s.transpose()) / 2.0);
}

inline Vector random_vector(std::size_t p, Rng& rng) {
    return gaussian_matrix(p, 1, rng).col(0);
}

inline DataMatrix gaussian_sample(std::size_t p, std::size_t n, Rng& rng, double scale = 1.0, double shift = 0.0) {
    Matrix x = gaussian_matrix(p, n, rng) * scale;
    x.array() += shift;
    return DataMatrix(std::move(x));
}

inline std::size_t uniform_index(std::size_t lo, std::size_t hi, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(double lo, double hi, Rng& rng) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace mdqda::testing
