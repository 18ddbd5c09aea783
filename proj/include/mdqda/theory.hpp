#pragma once

// Closed-form asymptotics of the QDA rules in the regime p/n_i -> c_i in (0,1).
//
// All "limit" quantities are evaluated at the actual (p, n1, n2): M1..M6 from
// the given covariances, c_i = p/n_i, s0 = s0n, and so on.
//
// Rate of a rule with drifts (T, T~) and variances (psi^2, psi~^2):
//     R = 1 - [Phi(T/psi) + Phi(T~/psi~)] / 2.

#include "mdqda/linalg.hpp"
#include "mdqda/qda.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

namespace mdqda::theory {

struct MomentSet {
    double M1 = 1.0;  // (1/p) tr(S1 S2^-1)
    double M2 = 1.0;  // (1/p) sum_i [(S1^1/2 S2^-1 S1^1/2)_ii]^2
    double M3 = 1.0;  // (1/p) tr(S2 S1^-1)
    double M4 = 1.0;  // (1/p) sum_i [(S2^1/2 S1^-1 S2^1/2)_ii]^2
    double M5 = 1.0;  // (1/p) tr((S1 S2^-1)^2)
    double M6 = 1.0;  // (1/p) tr((S2 S1^-1)^2)
    double c1 = 0.0;
    double c2 = 0.0;
    double m4 = 3.0;
};

MomentSet moment_set(const SpdMatrix& sigma1, const SpdMatrix& sigma2, std::size_t n1, std::size_t n2, double m4);

struct DriftTerms {
    double T2 = 0.0;
    double T3 = 0.0;
    double T2t = 0.0;
    double T3t = 0.0;
    double T = 0.0;   // -T2 - T3
    double Tt = 0.0;  // -T2t - T3t
};

// T2  = (1/sqrt p)[tr(I - S1 S2^-1) + log|S1 S2^-1|],  T3  = -(1/sqrt p) d^T S2^-1 d
// T2~ = (1/sqrt p)[tr(I - S2 S1^-1) + log|S2 S1^-1|],  T3~ = -(1/sqrt p) d^T S1^-1 d
DriftTerms drift_terms(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma1, const SpdMatrix& sigma2);

// (psi^2, psi~^2) pairs.
using VariancePair = std::pair<double, double>;

VariancePair psi_generalized(const MomentSet& m);
VariancePair psi_optimal(const MomentSet& m);
// Weighted sample-splitting over H groups; group ratios are c_i * H.
// Throws ValidationError "groups too small for dimension" if c_i H >= 1.
VariancePair psi_dnc_samples(const MomentSet& m, std::size_t groups);

struct SampleRuleTerms {
    double T_S = 0.0;
    double psi2 = 0.0;
    double Tt_S = 0.0;
    double psit2 = 0.0;
};

// Uncorrected sample rule; s0, m0 are taken as s0n, m0n from `constants`.
SampleRuleTerms psi_sample(const MomentSet& m, const CorrectionConstants& constants, const Vector& mu1,
                           const Vector& mu2, const SpdMatrix& sigma1, const SpdMatrix& sigma2);

enum class Rule { optimal, sample, generalized, dnc_samples };
std::string_view to_string(Rule r) noexcept;

inline constexpr double kDegenerateVariance = 1e-12;

struct RateLimit {
    Rule rule = Rule::generalized;
    std::size_t groups = 1;  // only for dnc_samples
    double T = 0.0;
    double Tt = 0.0;
    double psi = 0.0;
    double psit = 0.0;
    double rate = 0.5;
    // Set when either variance is <= 1e-12; the affected half then uses the
    // limiting value of Phi(T/psi) as psi -> 0 (1, 0 or 1/2 by the sign of T).
    bool degenerate = false;
};

double normal_cdf(double x);

RateLimit rate_limit(double T, double Tt, double psi2, double psit2);
RateLimit rate_limit(Rule rule, double T, double Tt, VariancePair variances);

struct SeparationDiagnostics {
    double zeta1 = 0.0;     // |mu1 - mu2|^2 / sqrt p
    double zeta2 = 0.0;     // s / sqrt p
    double zeta_eps = 0.0;  // s(eps) / sqrt p
    double eps = 0.05;
    std::size_t s = 0;      // #{|lambda_i - 1| > 1e-10}
    std::size_t s_eps = 0;  // #{|lambda_i - 1| > eps}
};

// lambda_i are the eigenvalues of S1 S2^-1, computed from a symmetric matrix
// similar to it.
SeparationDiagnostics separation_diagnostics(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma1,
                                             const SpdMatrix& sigma2, double eps = 0.05);

enum class Regime { easy_separable, easy_degenerate, hard };
std::string_view to_string(Regime r) noexcept;

struct RegimeThresholds {
    double low = 0.1;
    double high = 10.0;
};

// easy_separable if zeta1 > high or zeta(eps) > high; easy_degenerate if
// zeta1 < low and zeta2 < low; hard otherwise.
Regime classify_regime(const SeparationDiagnostics& d, RegimeThresholds t = {});

}  // namespace mdqda::theory
