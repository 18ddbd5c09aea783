#include "mdqda/cases.hpp"

#include "mdqda/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace mdqda {

namespace {

CovarianceCase diagonal_case(CaseId id, const Vector& d2) {
    const auto p = static_cast<std::size_t>(d2.size());
    CovarianceCase c;
    c.id = id;
    c.p = p;
    c.sigma1 = SpdMatrix::identity(p);
    c.root1 = SpdMatrix::identity(p);
    c.sigma2 = SpdMatrix::diagonal(d2);
    c.root2 = SpdMatrix::diagonal(d2.cwiseSqrt());
    return c;
}

CovarianceCase rotated_case(CaseId id, std::size_t p, double lo, double hi, std::size_t aux_n, Rng& rng) {
    const auto pi = static_cast<Eigen::Index>(p);
    const std::size_t n = aux_n == 0 ? 2 * p : aux_n;
    Matrix z(pi, static_cast<Eigen::Index>(n));
    std::normal_distribution<double> normal;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        for (Eigen::Index i = 0; i < pi; ++i) z(i, j) = normal(rng);
    Matrix gram = Matrix::Zero(pi, pi);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / static_cast<double>(n));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);  // reads the lower triangle
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed while building case");
    const Matrix& u = eig.eigenvectors();

    std::uniform_real_distribution<double> uniform(lo, hi);
    Vector lambda(pi);
    for (Eigen::Index i = 0; i < pi; ++i) lambda(i) = uniform(rng);

    Matrix sigma = u * lambda.asDiagonal() * u.transpose();
    Matrix root = u * lambda.cwiseSqrt().asDiagonal() * u.transpose();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    root = 0.5 * (root + root.transpose()).eval();

    CovarianceCase c;
    c.id = id;
    c.p = p;
    c.sigma1 = SpdMatrix::identity(p);
    c.root1 = SpdMatrix::identity(p);
    c.sigma2 = SpdMatrix(std::move(sigma));
    c.root2 = SpdMatrix(std::move(root));
    return c;
}

}  // namespace

std::string case_name(CaseId id) {
    return id == CaseId::custom ? "custom" : std::to_string(static_cast<int>(id));
}

CaseId parse_case(std::string_view text) {
    if (text == "custom") return CaseId::custom;
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '7') return static_cast<CaseId>(text[0] - '0');
    throw ValidationError("unknown case '" + std::string(text) + "' (expected 1..7 or custom)");
}

MeanMode parse_mean_mode(std::string_view text) {
    if (text == "equal") return MeanMode::equal;
    if (text == "uniform") return MeanMode::uniform;
    throw ValidationError("unknown mean mode '" + std::string(text) + "'");
}

std::string_view to_string(MeanMode m) noexcept { return m == MeanMode::equal ? "equal" : "uniform"; }

std::size_t hard_block_size(std::size_t p) {
    const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))));
    return std::min(p, 3 * root);
}

bool case_is_random(CaseId id, MeanMode mean_mode) {
    return mean_mode == MeanMode::uniform || id == CaseId::case3 || id == CaseId::case4 || id == CaseId::case7;
}

CovarianceCase make_case(CaseId id, std::size_t p, Rng& rng, MeanMode mean_mode, std::size_t aux_n) {
    if (p < 4) throw ValidationError("cases need p >= 4");
    const auto pi = static_cast<Eigen::Index>(p);
    const auto k = static_cast<Eigen::Index>(hard_block_size(p));
    CovarianceCase c;
    switch (id) {
        case CaseId::case1: c = diagonal_case(id, Vector::Constant(pi, 2.0)); break;
        case CaseId::case2: c = diagonal_case(id, Vector::Constant(pi, 3.0)); break;
        case CaseId::case3: c = rotated_case(id, p, 1.5, 2.5, aux_n, rng); break;
        case CaseId::case4: c = rotated_case(id, p, 2.5, 3.5, aux_n, rng); break;
        case CaseId::case5:
        case CaseId::case6: {
            Vector d = Vector::Ones(pi);
            d.head(k).setConstant(id == CaseId::case5 ? 4.0 : 5.0);
            c = diagonal_case(id, d);
            break;
        }
        case CaseId::case7: {
            // Partial Fisher-Yates: the first k entries become a uniform k-subset.
            std::vector<Eigen::Index> idx(p);
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
            for (Eigen::Index i = 0; i < k; ++i) {
                std::uniform_int_distribution<Eigen::Index> pick(i, pi - 1);
                std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
            }
            Vector d = Vector::Ones(pi);
            for (Eigen::Index i = 0; i < k; ++i) d(idx[static_cast<std::size_t>(i)]) = 4.0;
            c = diagonal_case(id, d);
            break;
        }
        case CaseId::custom: throw ValidationError("custom cases are built with custom_case()");
    }
    c.mean_mode = mean_mode;
    c.mu1 = Vector::Zero(pi);
    c.mu2 = Vector::Zero(pi);
    if (mean_mode == MeanMode::uniform) {
        std::uniform_real_distribution<double> uniform(-0.6, 0.6);
        for (Eigen::Index i = 0; i < pi; ++i) c.mu2(i) = uniform(rng);
    }
    return c;
}

CovarianceCase make_case(CaseId id, std::size_t p, std::uint64_t seed, MeanMode mean_mode, std::size_t aux_n) {
    Rng rng = make_rng(seed, 0, Stream::case_randomness);
    return make_case(id, p, rng, mean_mode, aux_n);
}

CovarianceCase custom_case(Vector mu1, Vector mu2, SpdMatrix sigma1, SpdMatrix sigma2) {
    const auto p = sigma1.dim();
    if (sigma2.dim() != p || static_cast<std::size_t>(mu1.size()) != p || static_cast<std::size_t>(mu2.size()) != p) {
        throw ValidationError("custom case: inconsistent dimensions");
    }
    (void)cholesky(sigma1);
    (void)cholesky(sigma2);
    CovarianceCase c;
    c.id = CaseId::custom;
    c.p = p;
    c.mu1 = std::move(mu1);
    c.mu2 = std::move(mu2);
    c.root1 = sigma1.matrix().isDiagonal(0.0) ? SpdMatrix::diagonal(sigma1.matrix().diagonal().cwiseSqrt())
                                              : sqrt_spd(sigma1);
    c.root2 = sigma2.matrix().isDiagonal(0.0) ? SpdMatrix::diagonal(sigma2.matrix().diagonal().cwiseSqrt())
                                              : sqrt_spd(sigma2);
    c.sigma1 = std::move(sigma1);
    c.sigma2 = std::move(sigma2);
    return c;
}

}  // namespace mdqda
