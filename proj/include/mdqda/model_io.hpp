#pragma once

// JSON model documents:
//   {format_version, p, n1, n2, variant, mean1, mean2, chol1, chol2,
//    logdet1, logdet2, s0n, m0n, l1n, l2n}
// chol_i holds the lower triangle of the Cholesky factor, row-major.
// Doubles are written with round-trip precision, so a reloaded model scores
// identically.

#include "mdqda/qda.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace mdqda {

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const FittedQda& model);
FittedQda load_model(std::string_view document);

void save_model_file(const FittedQda& model, const std::filesystem::path& path);
FittedQda load_model_file(const std::filesystem::path& path);

}  // namespace mdqda
