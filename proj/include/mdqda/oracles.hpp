#pragma once

// Numerical checks of two random-matrix limits the rate formulas rest on.
//
// Diagonal limit: with S the centered sample covariance (divisor n - 1) of
// p x n standard normal data and C = V^T S^{-1} V,
//     (1/p) sum_i C_ii^2  ->  M / (1 - c)^2,   M = (1/p) sum_i (v_i^T v_i)^2.
//
// Quadratic-form CLT: for z from class 1,
//     D1(z)/sqrt(p) - sqrt(p) s0n  ->  N(0, (m4 - 3) s0^2 + 2 s0'),
// with s0 = 1/(1 - c1), s0' = 1/(1 - c1)^3.

#include "mdqda/linalg.hpp"
#include "mdqda/qda.hpp"

#include <cstddef>
#include <cstdint>

namespace mdqda {

double rmt_diag_target(std::size_t p, std::size_t n, const Matrix& v);

// Monte Carlo mean over `reps` draws of (1/p) sum_i C_ii^2.
double rmt_diag_oracle(std::size_t p, std::size_t n, const Matrix& v, std::size_t reps, std::uint64_t seed);

struct CltSummary {
    double mean = 0.0;
    double variance = 0.0;  // divisor reps - 1
    double skewness = 0.0;
    double std_err_mean = 0.0;
    double target_variance = 0.0;
    std::size_t reps = 0;
};

double clt_target_variance(std::size_t p, std::size_t n1, double m4);

CltSummary clt_check(std::size_t p, std::size_t n1, const Noise& noise, std::size_t reps, std::uint64_t seed);

}  // namespace mdqda
