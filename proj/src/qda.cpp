#include "mdqda/qda.hpp"

#include "mdqda/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mdqda {

namespace {

void check_point(const Vector& z, std::size_t p) {
    if (static_cast<std::size_t>(z.size()) != p) {
        throw ValidationError("dimension mismatch: point has " + std::to_string(z.size()) +
                              " coordinates, model has " + std::to_string(p));
    }
    if (!z.allFinite()) throw ValidationError("point has non-finite coordinates");
}

}  // namespace

Noise Noise::student_t(int df) {
    if (df < 5) throw ValidationError("standardized t needs df >= 5 for a finite fourth moment");
    return {Kind::standardized_t, df};
}

double Noise::fourth_moment() const {
    if (kind == Kind::standard_normal) return 3.0;
    return 3.0 + 6.0 / (df - 4.0);
}

std::string Noise::name() const {
    return kind == Kind::standard_normal ? "normal" : "t" + std::to_string(df);
}

Noise Noise::parse(std::string_view text) {
    if (text == "normal") return normal();
    if (text.size() > 1 && text.front() == 't') {
        int df = 0;
        const auto* first = text.data() + 1;
        const auto* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, df);
        if (ec == std::errc() && ptr == last) return student_t(df);
    }
    throw ValidationError("unknown noise '" + std::string(text) + "' (expected normal or t<df>)");
}

PopulationSpec::PopulationSpec(Vector mu_, SpdMatrix sigma_, Noise noise_)
    : mu(std::move(mu_)), sigma(std::move(sigma_)), noise(noise_) {
    if (static_cast<std::size_t>(mu.size()) != sigma.dim()) {
        throw ValidationError("population mean and covariance dimensions differ");
    }
    if (!mu.allFinite()) throw ValidationError("population mean has non-finite entries");
    (void)cholesky(sigma);
}

double logdet_shift(double ratio) {
    // ((c - 1)/c) log(1 - c) - 1, with log1p for small c.
    return (ratio - 1.0) / ratio * std::log1p(-ratio) - 1.0;
}

CorrectionConstants correction_constants(std::size_t p, std::size_t n1, std::size_t n2) {
    if (p == 0 || p + 1 >= std::min(n1, n2)) {
        throw ValidationError("moderate-dimension precondition violated: need 0 < p < min(n1, n2) - 1 (p=" +
                              std::to_string(p) + ", n1=" + std::to_string(n1) +
                              ", n2=" + std::to_string(n2) + ")");
    }
    const double c1 = static_cast<double>(p) / static_cast<double>(n1);
    const double c2 = static_cast<double>(p) / static_cast<double>(n2);
    return {1.0 / (1.0 - c1), 1.0 / (1.0 - c2), logdet_shift(c1), logdet_shift(c2)};
}

std::string_view to_string(Variant v) noexcept {
    return v == Variant::sample ? "sample" : "generalized";
}

Variant parse_variant(std::string_view text) {
    if (text == "sample") return Variant::sample;
    if (text == "generalized") return Variant::generalized;
    throw ValidationError("unknown variant '" + std::string(text) + "'");
}

ClassFit fit_class(const DataMatrix& x, int which) {
    ClassFit out;
    out.n = x.count();
    out.mean = sample_mean(x);
    try {
        out.chol = cholesky(sample_covariance(x, out.mean));
    } catch (const NotPositiveDefinite& e) {
        throw NumericalError("class " + std::to_string(which) + " sample covariance " + e.what());
    }
    return out;
}

FittedQda::FittedQda(ClassFit class1, ClassFit class2, CorrectionConstants constants, Variant variant)
    : class1_(std::move(class1)), class2_(std::move(class2)), constants_(constants), variant_(variant) {
    const auto p = static_cast<std::size_t>(class1_.mean.size());
    if (static_cast<std::size_t>(class2_.mean.size()) != p || class1_.chol.dim() != p ||
        class2_.chol.dim() != p) {
        throw ValidationError("class blocks have inconsistent dimensions");
    }
}

CorrectionConstants FittedQda::effective_constants() const noexcept {
    return variant_ == Variant::sample ? CorrectionConstants::identity() : constants_;
}

Sides FittedQda::sides(const Vector& z) const {
    const std::size_t p = dim();
    check_point(z, p);
    const CorrectionConstants k = effective_constants();
    const double pd = static_cast<double>(p);
    const double d1 = quad_form(z - class1_.mean, class1_.chol);
    const double d2 = quad_form(z - class2_.mean, class2_.chol);
    return {d1 / k.s0n + class1_.chol.log_det() - pd * k.l1n,
            d2 / k.m0n + class2_.chol.log_det() - pd * k.l2n};
}

FittedQda fit(const DataMatrix& train1, const DataMatrix& train2, Variant variant) {
    if (train1.dim() != train2.dim()) {
        throw ValidationError("training sets have different dimensions (" + std::to_string(train1.dim()) +
                              " vs " + std::to_string(train2.dim()) + ")");
    }
    const auto constants = correction_constants(train1.dim(), train1.count(), train2.count());
    return FittedQda(fit_class(train1, 1), fit_class(train2, 2), constants, variant);
}

OptimalQda::OptimalQda(const PopulationSpec& pop1, const PopulationSpec& pop2)
    : mu1_(pop1.mu), mu2_(pop2.mu), chol1_(cholesky(pop1.sigma)), chol2_(cholesky(pop2.sigma)) {
    if (pop1.dim() != pop2.dim()) throw ValidationError("populations have different dimensions");
}

double OptimalQda::discriminant(const Vector& z) const {
    check_point(z, dim());
    return (quad_form(z - mu1_, chol1_) + chol1_.log_det()) - (quad_form(z - mu2_, chol2_) + chol2_.log_det());
}

double optimal_discriminant(const PopulationSpec& pop1, const PopulationSpec& pop2, const Vector& z) {
    return OptimalQda(pop1, pop2).discriminant(z);
}

ClassLabel classify_optimal(const PopulationSpec& pop1, const PopulationSpec& pop2, const Vector& z) {
    return label_from_score(optimal_discriminant(pop1, pop2, z));
}

}  // namespace mdqda
