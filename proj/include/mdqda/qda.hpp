#pragma once

// Two-class quadratic discriminant rules: the optimal rule on population
// parameters, the plug-in sample rule, and the dimension-corrected
// generalized rule.
//
// Every rule scores z through a discriminant
//     delta(z) = left(z) - right(z)
// and assigns class 1 iff delta(z) < 0. A tie (delta == 0) goes to class 2.

#include "mdqda/linalg.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace mdqda {

enum class ClassLabel { class1 = 1, class2 = 2 };

inline ClassLabel label_from_score(double delta) noexcept {
    return delta < 0.0 ? ClassLabel::class1 : ClassLabel::class2;
}

// Base law of the i.i.d. standardized components.
struct Noise {
    enum class Kind { standard_normal, standardized_t };

    Kind kind = Kind::standard_normal;
    int df = 0;  // only for standardized_t, >= 5

    static Noise normal() { return {}; }
    static Noise student_t(int df);

    // E X^4 of one standardized component.
    double fourth_moment() const;
    std::string name() const;
    // Accepts "normal" and "t<df>" (e.g. "t5").
    static Noise parse(std::string_view text);
};

struct PopulationSpec {
    Vector mu;
    SpdMatrix sigma;
    Noise noise;

    PopulationSpec() = default;
    // Validates dimensions and that sigma factorizes.
    PopulationSpec(Vector mu, SpdMatrix sigma, Noise noise = Noise::normal());

    std::size_t dim() const noexcept { return sigma.dim(); }
};

struct CorrectionConstants {
    double s0n = 1.0;
    double m0n = 1.0;
    double l1n = 0.0;
    double l2n = 0.0;

    // (1, 1, 0, 0): the uncorrected sample rule.
    static constexpr CorrectionConstants identity() { return {}; }
};

// s0n = 1/(1 - p/n1), m0n = 1/(1 - p/n2),
// l_in = ((p/n_i - 1)/(p/n_i)) log(1 - p/n_i) - 1.
// Requires 0 < p < min(n1, n2) - 1.
CorrectionConstants correction_constants(std::size_t p, std::size_t n1, std::size_t n2);

// log-determinant recentering term l for a single ratio p/n in (0, 1).
double logdet_shift(double ratio);

enum class Variant { sample, generalized };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view text);

// Mean, covariance factor and size of one training class.
struct ClassFit {
    Vector mean;
    CholFactor chol;
    std::size_t n = 0;
};

// Fits one class; `which` (1 or 2) only labels error messages.
ClassFit fit_class(const DataMatrix& x, int which);

// The two sides of the comparison; delta = left - right.
struct Sides {
    double left = 0.0;
    double right = 0.0;
    double delta() const noexcept { return left - right; }
};

class FittedQda {
public:
    FittedQda() = default;
    // Assembles a model from fitted classes. Constants are stored as given;
    // the sample variant evaluates with CorrectionConstants::identity().
    FittedQda(ClassFit class1, ClassFit class2, CorrectionConstants constants, Variant variant);

    std::size_t dim() const noexcept { return class1_.mean.size(); }
    Variant variant() const noexcept { return variant_; }
    const ClassFit& class1() const noexcept { return class1_; }
    const ClassFit& class2() const noexcept { return class2_; }
    // Constants computed from (p, n1, n2) at fit time.
    const CorrectionConstants& constants() const noexcept { return constants_; }
    // Constants the discriminant actually uses.
    CorrectionConstants effective_constants() const noexcept;

    Sides sides(const Vector& z) const;
    double discriminant(const Vector& z) const { return sides(z).delta(); }
    ClassLabel classify(const Vector& z) const { return label_from_score(discriminant(z)); }

private:
    ClassFit class1_;
    ClassFit class2_;
    CorrectionConstants constants_;
    Variant variant_ = Variant::generalized;
};

FittedQda fit(const DataMatrix& train1, const DataMatrix& train2, Variant variant);

// Optimal rule with the population factorizations cached.
class OptimalQda {
public:
    OptimalQda(const PopulationSpec& pop1, const PopulationSpec& pop2);

    std::size_t dim() const noexcept { return mu1_.size(); }
    // [d1(z) + log|Sigma1|] - [d2(z) + log|Sigma2|]
    double discriminant(const Vector& z) const;
    ClassLabel classify(const Vector& z) const { return label_from_score(discriminant(z)); }

private:
    Vector mu1_;
    Vector mu2_;
    CholFactor chol1_;
    CholFactor chol2_;
};

double optimal_discriminant(const PopulationSpec& pop1, const PopulationSpec& pop2, const Vector& z);
ClassLabel classify_optimal(const PopulationSpec& pop1, const PopulationSpec& pop2, const Vector& z);

}  // namespace mdqda
