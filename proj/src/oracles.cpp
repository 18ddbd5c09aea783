#include "mdqda/oracles.hpp"

#include "mdqda/error.hpp"
#include "mdqda/random.hpp"
#include "mdqda/sampling.hpp"

#include <cmath>
#include <vector>

namespace mdqda {

namespace {

void check_dims(std::size_t p, std::size_t n) {
    if (p == 0 || p + 1 >= n) throw ValidationError("oracle needs 0 < p < n - 1");
}

}  // namespace

double rmt_diag_target(std::size_t p, std::size_t n, const Matrix& v) {
    check_dims(p, n);
    if (static_cast<std::size_t>(v.rows()) != p || static_cast<std::size_t>(v.cols()) != p) {
        throw ValidationError("V must be p x p");
    }
    const double m = v.colwise().squaredNorm().array().square().mean();
    const double c = static_cast<double>(p) / static_cast<double>(n);
    return m / ((1.0 - c) * (1.0 - c));
}

double rmt_diag_oracle(std::size_t p, std::size_t n, const Matrix& v, std::size_t reps, std::uint64_t seed) {
    check_dims(p, n);
    if (static_cast<std::size_t>(v.rows()) != p || static_cast<std::size_t>(v.cols()) != p) {
        throw ValidationError("V must be p x p");
    }
    if (reps == 0) throw ValidationError("reps must be at least 1");
    double total = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = make_rng(seed, r, Stream::oracle);
        const DataMatrix x(draw_standardized(p, n, Noise::normal(), rng));
        const CholFactor chol = cholesky(sample_covariance(x));
        // C_ii = |L^{-1} v_i|^2
        Matrix w = v;
        chol.lower().triangularView<Eigen::Lower>().solveInPlace(w);
        total += w.colwise().squaredNorm().array().square().mean();
    }
    return total / static_cast<double>(reps);
}

double clt_target_variance(std::size_t p, std::size_t n1, double m4) {
    check_dims(p, n1);
    const double c = static_cast<double>(p) / static_cast<double>(n1);
    const double s0 = 1.0 / (1.0 - c);
    return (m4 - 3.0) * s0 * s0 + 2.0 * s0 * s0 * s0;
}

CltSummary clt_check(std::size_t p, std::size_t n1, const Noise& noise, std::size_t reps, std::uint64_t seed) {
    check_dims(p, n1);
    if (reps < 2) throw ValidationError("reps must be at least 2");
    const double pd = static_cast<double>(p);
    const double s0n = 1.0 / (1.0 - pd / static_cast<double>(n1));
    std::vector<double> stats(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng train_rng = make_rng(seed, r, Stream::train1);
        Rng test_rng = make_rng(seed, r, Stream::test);
        const DataMatrix x(draw_standardized(p, n1, noise, train_rng));
        const Vector z = draw_standardized(p, 1, noise, test_rng).col(0);
        const ClassFit f = fit_class(x, 1);
        stats[r] = quad_form(z - f.mean, f.chol) / std::sqrt(pd) - std::sqrt(pd) * s0n;
    }
    const double n = static_cast<double>(reps);
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double s : stats) {
        const double d = s - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    CltSummary out;
    out.reps = reps;
    out.mean = mean;
    out.variance = m2 / (n - 1.0);
    out.skewness = (m3 / n) / std::pow(m2 / n, 1.5);
    out.std_err_mean = std::sqrt(out.variance / n);
    out.target_variance = clt_target_variance(p, n1, noise.fourth_moment());
    return out;
}

}  // namespace mdqda
