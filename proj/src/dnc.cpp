#include "mdqda/dnc.hpp"

#include "mdqda/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdqda {

namespace {

void check_pair(const DataMatrix& train1, const DataMatrix& train2) {
    if (train1.dim() != train2.dim()) throw ValidationError("training sets have different dimensions");
}

void check_p0(std::size_t p0, std::size_t p) {
    if (p0 == 0 || p0 > p) {
        throw ValidationError("p0 must be in [1, p] (p0=" + std::to_string(p0) + ", p=" + std::to_string(p) + ")");
    }
}

Matrix principal_submatrix(const Matrix& a, const std::vector<std::size_t>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            out(i, j) = a(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
    return out;
}

Vector subvector(const Vector& v, const std::vector<std::size_t>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
    return out;
}

ClassFit class_from_moments(Vector mean, const Matrix& cov, std::size_t n, int which) {
    ClassFit fit;
    fit.n = n;
    fit.mean = std::move(mean);
    try {
        fit.chol = cholesky(SpdMatrix(cov));
    } catch (const NotPositiveDefinite& e) {
        throw NumericalError("class " + std::to_string(which) + " sample covariance " + e.what());
    }
    return fit;
}

}  // namespace

std::size_t default_p0(std::size_t p) {
    const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))));
    return std::max<std::size_t>(1, std::min(p, 3 * root));
}

// ---------------------------------------------------------------------------
// Subgroup screening
// ---------------------------------------------------------------------------

SubgroupScreen::SubgroupScreen(const DataMatrix& train1, const DataMatrix& train2, std::size_t p0)
    : p_(train1.dim()), p0_(p0) {
    check_pair(train1, train2);
    check_p0(p0, train1.dim());
    const std::size_t blocks = train1.dim() / p0;
    models_.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        models_.push_back(
            fit(train1.row_block(b * p0, p0), train2.row_block(b * p0, p0), Variant::generalized));
    }
}

ScreenResult SubgroupScreen::classify(const Vector& z) const {
    if (static_cast<std::size_t>(z.size()) != p_) throw ValidationError("query point has wrong dimension");
    std::size_t best = 0;
    double best_gap = -1.0;
    double best_delta = 0.0;
    for (std::size_t b = 0; b < models_.size(); ++b) {
        const double delta = models_[b].discriminant(z.segment(static_cast<Eigen::Index>(b * p0_),
                                                               static_cast<Eigen::Index>(p0_)));
        const double gap = std::abs(delta);
        if (gap > best_gap) {
            best = b;
            best_gap = gap;
            best_delta = delta;
        }
    }
    ScreenResult out;
    out.selection.method = ScreenMethod::subgroup;
    out.selection.p0 = p0_;
    out.selection.indices.resize(p0_);
    std::iota(out.selection.indices.begin(), out.selection.indices.end(), best * p0_);
    out.label = label_from_score(best_delta);
    return out;
}

ScreenResult subgroup_screen(const DataMatrix& train1, const DataMatrix& train2, const Vector& z, std::size_t p0) {
    return SubgroupScreen(train1, train2, p0).classify(z);
}

// ---------------------------------------------------------------------------
// Component-wise screening
// ---------------------------------------------------------------------------

ComponentwiseScreen::ComponentwiseScreen(const DataMatrix& train1, const DataMatrix& train2, std::size_t p0)
    : p0_(p0), n1_(train1.count()), n2_(train2.count()) {
    check_pair(train1, train2);
    check_p0(p0, train1.dim());
    unit_constants_ = correction_constants(1, n1_, n2_);
    refit_constants_ = correction_constants(p0, n1_, n2_);
    mean1_ = sample_mean(train1);
    mean2_ = sample_mean(train2);
    cov1_ = sample_covariance(train1, mean1_).matrix();
    cov2_ = sample_covariance(train2, mean2_).matrix();
    for (Eigen::Index j = 0; j < cov1_.rows(); ++j) {
        if (!(cov1_(j, j) > 0.0) || !(cov2_(j, j) > 0.0)) {
            throw NumericalError("coordinate " + std::to_string(j) + " has zero sample variance");
        }
    }
}

std::vector<double> ComponentwiseScreen::component_scores(const Vector& z) const {
    if (z.size() != mean1_.size()) throw ValidationError("query point has wrong dimension");
    if (!z.allFinite()) throw ValidationError("point has non-finite coordinates");
    const auto& k = unit_constants_;
    std::vector<double> scores(static_cast<std::size_t>(z.size()));
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double v1 = cov1_(j, j);
        const double v2 = cov2_(j, j);
        const double e1 = z(j) - mean1_(j);
        const double e2 = z(j) - mean2_(j);
        const double left = e1 * e1 / v1 / k.s0n + std::log(v1) - k.l1n;
        const double right = e2 * e2 / v2 / k.m0n + std::log(v2) - k.l2n;
        scores[static_cast<std::size_t>(j)] = std::abs(left - right);
    }
    return scores;
}

ScreenResult ComponentwiseScreen::classify(const Vector& z) const {
    const auto scores = component_scores(z);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(p0_));
    std::sort(chosen.begin(), chosen.end());

    FittedQda model(class_from_moments(subvector(mean1_, chosen), principal_submatrix(cov1_, chosen), n1_, 1),
                    class_from_moments(subvector(mean2_, chosen), principal_submatrix(cov2_, chosen), n2_, 2),
                    refit_constants_, Variant::generalized);
    ScreenResult out;
    out.selection.method = ScreenMethod::componentwise;
    out.selection.p0 = p0_;
    out.label = model.classify(subvector(z, chosen));
    out.selection.indices = std::move(chosen);
    return out;
}

ScreenResult componentwise_screen(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                                  std::size_t p0) {
    return ComponentwiseScreen(train1, train2, p0).classify(z);
}

// ---------------------------------------------------------------------------
// Sample splitting
// ---------------------------------------------------------------------------

SplitPlan make_split_plan(std::size_t p, std::size_t n1, std::size_t n2, std::size_t groups) {
    if (groups == 0) throw ValidationError("number of groups must be positive");
    SplitPlan plan{groups, n1 / groups, n2 / groups};
    if (p == 0 || p + 1 >= std::min(plan.m1, plan.m2)) {
        throw ValidationError("group too small for dimension (p=" + std::to_string(p) +
                              ", m1=" + std::to_string(plan.m1) + ", m2=" + std::to_string(plan.m2) + ")");
    }
    return plan;
}

SampleSplitQda::SampleSplitQda(const DataMatrix& train1, const DataMatrix& train2, std::size_t groups)
    : plan_(make_split_plan(train1.dim(), train1.count(), train2.count(), groups)) {
    check_pair(train1, train2);
    models_.reserve(groups);
    for (std::size_t k = 0; k < groups; ++k) {
        models_.push_back(fit(train1.column_block(k * plan_.m1, plan_.m1),
                              train2.column_block(k * plan_.m2, plan_.m2), Variant::generalized));
    }
}

std::vector<double> SampleSplitQda::group_discriminants(const Vector& z) const {
    std::vector<double> out;
    out.reserve(models_.size());
    for (const auto& m : models_) out.push_back(m.discriminant(z));
    return out;
}

double SampleSplitQda::weighted(const Vector& z) const {
    const auto d = group_discriminants(z);
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

ClassLabel SampleSplitQda::classify_majority(const Vector& z) const {
    const auto d = group_discriminants(z);
    const auto votes = static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double v) { return v < 0.0; }));
    return 2 * votes > d.size() ? ClassLabel::class1 : ClassLabel::class2;
}

double sample_split_weighted(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                             std::size_t groups) {
    return SampleSplitQda(train1, train2, groups).weighted(z);
}

ClassLabel sample_split_majority(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                                 std::size_t groups) {
    return SampleSplitQda(train1, train2, groups).classify_majority(z);
}

}  // namespace mdqda
