#pragma once

// Divide-and-conquer refinements of the generalized rule.
//
// Over dimension (screening, per query point z):
//   subgroup      - contiguous blocks of p0 coordinates (H = floor(p/p0),
//                   trailing remainder dropped); keep the block with the
//                   largest |left - right| and classify with it.
//   componentwise - score every coordinate with a 1-d generalized rule, keep
//                   the p0 largest |left - right| and refit on them.
// Ties in argmax / top-k go to the smaller index.
//
// Over samples (splitting): H contiguous groups of m_i = floor(n_i/H)
// observations, leftovers discarded; weighted voting averages the group
// discriminants, majority voting counts D_k < 0 against H/2.

#include "mdqda/qda.hpp"

#include <cstddef>
#include <vector>

namespace mdqda {

enum class ScreenMethod { subgroup, componentwise };

struct ScreenSelection {
    ScreenMethod method = ScreenMethod::subgroup;
    std::size_t p0 = 0;
    std::vector<std::size_t> indices;  // 0-based, strictly increasing
};

struct ScreenResult {
    ScreenSelection selection;
    ClassLabel label = ClassLabel::class2;
};

// 3 * floor(sqrt(p)), capped at p.
std::size_t default_p0(std::size_t p);

// Block models depend only on the training data, so they are fitted once and
// reused across query points.
class SubgroupScreen {
public:
    SubgroupScreen(const DataMatrix& train1, const DataMatrix& train2, std::size_t p0);

    std::size_t p0() const noexcept { return p0_; }
    std::size_t blocks() const noexcept { return models_.size(); }
    ScreenResult classify(const Vector& z) const;

private:
    std::size_t p_;
    std::size_t p0_;
    std::vector<FittedQda> models_;
};

class ComponentwiseScreen {
public:
    ComponentwiseScreen(const DataMatrix& train1, const DataMatrix& train2, std::size_t p0);

    std::size_t p0() const noexcept { return p0_; }
    // |T1j - T2j| for every coordinate j at z.
    std::vector<double> component_scores(const Vector& z) const;
    ScreenResult classify(const Vector& z) const;

private:
    std::size_t p0_;
    std::size_t n1_;
    std::size_t n2_;
    Vector mean1_;
    Vector mean2_;
    Matrix cov1_;
    Matrix cov2_;
    CorrectionConstants unit_constants_;
    CorrectionConstants refit_constants_;
};

ScreenResult subgroup_screen(const DataMatrix& train1, const DataMatrix& train2, const Vector& z, std::size_t p0);
ScreenResult componentwise_screen(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                                  std::size_t p0);

struct SplitPlan {
    std::size_t groups = 1;  // H
    std::size_t m1 = 0;
    std::size_t m2 = 0;
};

// Throws ValidationError "group too small for dimension" unless p < min(m1, m2) - 1.
SplitPlan make_split_plan(std::size_t p, std::size_t n1, std::size_t n2, std::size_t groups);

class SampleSplitQda {
public:
    SampleSplitQda(const DataMatrix& train1, const DataMatrix& train2, std::size_t groups);

    const SplitPlan& plan() const noexcept { return plan_; }
    std::vector<double> group_discriminants(const Vector& z) const;
    // (1/H) sum_k D_k
    double weighted(const Vector& z) const;
    ClassLabel classify_weighted(const Vector& z) const { return label_from_score(weighted(z)); }
    // class 1 iff #{k : D_k < 0} > H/2
    ClassLabel classify_majority(const Vector& z) const;

private:
    SplitPlan plan_;
    std::vector<FittedQda> models_;
};

double sample_split_weighted(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                             std::size_t groups);
ClassLabel sample_split_majority(const DataMatrix& train1, const DataMatrix& train2, const Vector& z,
                                 std::size_t groups);

}  // namespace mdqda
