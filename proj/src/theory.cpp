#include "mdqda/theory.hpp"

#include "mdqda/error.hpp"

#include <algorithm>
#include <cmath>

namespace mdqda::theory {

namespace {

void check_pair(const SpdMatrix& sigma1, const SpdMatrix& sigma2) {
    if (sigma1.dim() != sigma2.dim()) throw ValidationError("covariances have different dimensions");
    if (sigma1.dim() == 0) throw ValidationError("empty covariance");
}

// A = S_a^{1/2} S_b^{-1} S_a^{1/2}, formed as W^T W with W = L_b^{-1} S_a^{1/2}.
Matrix sandwich(const SpdMatrix& a, const CholFactor& chol_b) {
    Matrix w = sqrt_spd(a).matrix();
    chol_b.lower().triangularView<Eigen::Lower>().solveInPlace(w);
    return w.transpose() * w;
}

// tr(S_a S_b^{-1}) = |L_b^{-1} L_a|_F^2
double trace_ratio(const CholFactor& chol_a, const CholFactor& chol_b) {
    Matrix w = chol_a.lower();
    chol_b.lower().triangularView<Eigen::Lower>().solveInPlace(w);
    return w.squaredNorm();
}

double ratio_term(double c) { return c / (1.0 - c); }

// Phi(T/psi) with the psi -> 0 limit when the variance is degenerate.
double phi_term(double T, double psi2, bool& degenerate) {
    if (psi2 < -kDegenerateVariance) throw ValidationError("negative variance");
    if (psi2 <= kDegenerateVariance) {
        degenerate = true;
        if (T > 0.0) return 1.0;
        if (T < 0.0) return 0.0;
        return 0.5;
    }
    return normal_cdf(T / std::sqrt(psi2));
}

}  // namespace

MomentSet moment_set(const SpdMatrix& sigma1, const SpdMatrix& sigma2, std::size_t n1, std::size_t n2, double m4) {
    check_pair(sigma1, sigma2);
    const auto p = sigma1.dim();
    if (n1 == 0 || n2 == 0) throw ValidationError("sample sizes must be positive");
    const double pd = static_cast<double>(p);
    const CholFactor chol1 = cholesky(sigma1);
    const CholFactor chol2 = cholesky(sigma2);

    const Matrix a = sandwich(sigma1, chol2);
    const Matrix b = sandwich(sigma2, chol1);

    MomentSet m;
    m.M1 = a.trace() / pd;
    m.M2 = a.diagonal().squaredNorm() / pd;
    m.M3 = b.trace() / pd;
    m.M4 = b.diagonal().squaredNorm() / pd;
    m.M5 = a.squaredNorm() / pd;
    m.M6 = b.squaredNorm() / pd;
    m.c1 = pd / static_cast<double>(n1);
    m.c2 = pd / static_cast<double>(n2);
    m.m4 = m4;
    return m;
}

DriftTerms drift_terms(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma1, const SpdMatrix& sigma2) {
    check_pair(sigma1, sigma2);
    const auto p = sigma1.dim();
    if (static_cast<std::size_t>(mu1.size()) != p || static_cast<std::size_t>(mu2.size()) != p) {
        throw ValidationError("mean vectors do not match covariance dimension");
    }
    const double pd = static_cast<double>(p);
    const double root_p = std::sqrt(pd);
    const CholFactor chol1 = cholesky(sigma1);
    const CholFactor chol2 = cholesky(sigma2);
    const Vector d = mu1 - mu2;
    const double logdet_ratio = chol1.log_det() - chol2.log_det();

    DriftTerms t;
    t.T2 = (pd - trace_ratio(chol1, chol2) + logdet_ratio) / root_p;
    t.T3 = -quad_form(d, chol2) / root_p;
    t.T2t = (pd - trace_ratio(chol2, chol1) - logdet_ratio) / root_p;
    t.T3t = -quad_form(d, chol1) / root_p;
    t.T = -t.T2 - t.T3;
    t.Tt = -t.T2t - t.T3t;
    return t;
}

VariancePair psi_optimal(const MomentSet& m) {
    const double k = m.m4 - 3.0;
    return {k * (1.0 - 2.0 * m.M1 + m.M2) + 2.0 * (1.0 - 2.0 * m.M1 + m.M5),
            k * (1.0 - 2.0 * m.M3 + m.M4) + 2.0 * (1.0 - 2.0 * m.M3 + m.M6)};
}

VariancePair psi_generalized(const MomentSet& m) {
    if (!(m.c1 > 0.0 && m.c1 < 1.0 && m.c2 > 0.0 && m.c2 < 1.0)) {
        throw ValidationError("dimension ratios must lie in (0, 1)");
    }
    const double k = m.m4 - 3.0;
    const double psi2 = k * (1.0 - 2.0 * m.M1 + m.M2) +
                        2.0 * (1.0 / (1.0 - m.c1) - 2.0 * m.M1 + m.M5 + ratio_term(m.c2) * m.M1 * m.M1);
    const double psit2 = k * (1.0 - 2.0 * m.M3 + m.M4) +
                         2.0 * (1.0 / (1.0 - m.c2) - 2.0 * m.M3 + m.M6 + ratio_term(m.c1) * m.M3 * m.M3);
    return {psi2, psit2};
}

VariancePair psi_dnc_samples(const MomentSet& m, std::size_t groups) {
    if (groups == 0) throw ValidationError("number of groups must be positive");
    const double h = static_cast<double>(groups);
    const double c1h = m.c1 * h;
    const double c2h = m.c2 * h;
    if (!(c1h < 1.0 && c2h < 1.0)) throw ValidationError("groups too small for dimension");
    if (!(m.c1 > 0.0 && m.c2 > 0.0)) throw ValidationError("dimension ratios must lie in (0, 1)");
    const auto [psi02, psit02] = psi_optimal(m);
    return {psi02 + 2.0 / h * (ratio_term(c1h) + ratio_term(c2h) * m.M1 * m.M1),
            psit02 + 2.0 / h * (ratio_term(c2h) + ratio_term(c1h) * m.M3 * m.M3)};
}

SampleRuleTerms psi_sample(const MomentSet& m, const CorrectionConstants& k, const Vector& mu1, const Vector& mu2,
                           const SpdMatrix& sigma1, const SpdMatrix& sigma2) {
    if (!(m.c1 > 0.0 && m.c1 < 1.0 && m.c2 > 0.0 && m.c2 < 1.0)) {
        throw ValidationError("dimension ratios must lie in (0, 1)");
    }
    check_pair(sigma1, sigma2);
    const double pd = static_cast<double>(sigma1.dim());
    const double root_p = std::sqrt(pd);
    const CholFactor chol1 = cholesky(sigma1);
    const CholFactor chol2 = cholesky(sigma2);
    const Vector d = mu1 - mu2;
    const double logdet_ratio = chol1.log_det() - chol2.log_det();

    const double s0 = k.s0n;
    const double m0 = k.m0n;
    const double s0_prime = 1.0 / std::pow(1.0 - m.c1, 3);
    const double m0_prime = 1.0 / std::pow(1.0 - m.c2, 3);
    const double kurt = m.m4 - 3.0;

    SampleRuleTerms out;
    out.T_S = -(s0 * pd - m0 * trace_ratio(chol1, chol2)) / root_p - logdet_ratio / root_p +
              root_p * (k.l2n - k.l1n) + m0 * quad_form(d, chol2) / root_p;
    out.Tt_S = -(m0 * pd - s0 * trace_ratio(chol2, chol1)) / root_p + logdet_ratio / root_p +
               root_p * (k.l1n - k.l2n) + s0 * quad_form(d, chol1) / root_p;
    out.psi2 = kurt * (s0 * s0 - 2.0 * s0 * m0 * m.M1 + m0 * m0 * m.M2) +
               2.0 * (s0_prime - 2.0 * s0 * m0 * m.M1 + m0 * m0 * (m.M5 + ratio_term(m.c2) * m.M1 * m.M1));
    out.psit2 = kurt * (m0 * m0 - 2.0 * s0 * m0 * m.M3 + s0 * s0 * m.M4) +
                2.0 * (m0_prime - 2.0 * s0 * m0 * m.M3 + s0 * s0 * (m.M6 + ratio_term(m.c1) * m.M3 * m.M3));
    return out;
}

std::string_view to_string(Rule r) noexcept {
    switch (r) {
        case Rule::optimal: return "optimal";
        case Rule::sample: return "sample";
        case Rule::generalized: return "generalized";
        case Rule::dnc_samples: return "dnc_samples";
    }
    return "unknown";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

RateLimit rate_limit(double T, double Tt, double psi2, double psit2) {
    RateLimit out;
    out.T = T;
    out.Tt = Tt;
    const double phi = phi_term(T, psi2, out.degenerate);
    const double phit = phi_term(Tt, psit2, out.degenerate);
    out.psi = std::sqrt(std::max(0.0, psi2));
    out.psit = std::sqrt(std::max(0.0, psit2));
    out.rate = std::clamp(1.0 - 0.5 * (phi + phit), 0.0, 1.0);
    return out;
}

RateLimit rate_limit(Rule rule, double T, double Tt, VariancePair variances) {
    RateLimit out = rate_limit(T, Tt, variances.first, variances.second);
    out.rule = rule;
    return out;
}

SeparationDiagnostics separation_diagnostics(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma1,
                                             const SpdMatrix& sigma2, double eps) {
    check_pair(sigma1, sigma2);
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    const auto p = sigma1.dim();
    if (static_cast<std::size_t>(mu1.size()) != p || static_cast<std::size_t>(mu2.size()) != p) {
        throw ValidationError("mean vectors do not match covariance dimension");
    }
    // L2^{-1} S1 L2^{-T} is symmetric and similar to S1 S2^{-1}.
    const CholFactor chol2 = cholesky(sigma2);
    const auto l2 = chol2.lower().triangularView<Eigen::Lower>();
    Matrix w = sigma1.matrix();
    l2.solveInPlace(w);
    Matrix wt = w.transpose();
    l2.solveInPlace(wt);
    wt = 0.5 * (wt + wt.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(wt, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

    SeparationDiagnostics out;
    out.eps = eps;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double dev = std::abs(eig.eigenvalues()(i) - 1.0);
        if (dev > 1e-10) ++out.s;
        if (dev > eps) ++out.s_eps;
    }
    const double root_p = std::sqrt(static_cast<double>(p));
    out.zeta1 = (mu1 - mu2).squaredNorm() / root_p;
    out.zeta2 = static_cast<double>(out.s) / root_p;
    out.zeta_eps = static_cast<double>(out.s_eps) / root_p;
    return out;
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::easy_separable: return "easy_separable";
        case Regime::easy_degenerate: return "easy_degenerate";
        case Regime::hard: return "hard";
    }
    return "unknown";
}

Regime classify_regime(const SeparationDiagnostics& d, RegimeThresholds t) {
    if (d.zeta1 > t.high || d.zeta_eps > t.high) return Regime::easy_separable;
    if (d.zeta1 < t.low && d.zeta2 < t.low) return Regime::easy_degenerate;
    return Regime::hard;
}

}  // namespace mdqda::theory
