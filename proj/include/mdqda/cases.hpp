#pragma once

// Covariance scenarios. Sigma1 = I throughout; Sigma2 is
//   case 1: 2I                 case 2: 3I
//   case 3: U L1 U^T, L1 ~ U(1.5, 2.5)   case 4: U L2 U^T, L2 ~ U(2.5, 3.5)
//           (U: eigenvectors of Z Z^T / n for a p x n standard normal Z)
//   case 5: blk(4 I_k, I_{p-k})  case 6: blk(5 I_k, I_{p-k}),  k = 3 floor(sqrt p)
//   case 7: value 4 at k uniformly random diagonal positions, 1 elsewhere.
// mu1 = 0; mu2 = 0 or, in uniform mode, i.i.d. U(-0.6, 0.6) entries.

#include "mdqda/linalg.hpp"
#include "mdqda/qda.hpp"
#include "mdqda/random.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace mdqda {

enum class CaseId { custom = 0, case1 = 1, case2, case3, case4, case5, case6, case7 };
enum class MeanMode { equal, uniform };

std::string case_name(CaseId id);
CaseId parse_case(std::string_view text);
MeanMode parse_mean_mode(std::string_view text);
std::string_view to_string(MeanMode m) noexcept;

// min(p, 3 floor(sqrt p)): size of the perturbed block in cases 5-7.
std::size_t hard_block_size(std::size_t p);

struct CovarianceCase {
    CaseId id = CaseId::custom;
    std::size_t p = 0;
    MeanMode mean_mode = MeanMode::equal;
    Vector mu1;
    Vector mu2;
    SpdMatrix sigma1;
    SpdMatrix sigma2;
    // Symmetric square roots of sigma1 / sigma2.
    SpdMatrix root1;
    SpdMatrix root2;

    PopulationSpec population1(const Noise& noise) const { return {mu1, sigma1, noise}; }
    PopulationSpec population2(const Noise& noise) const { return {mu2, sigma2, noise}; }
};

// True when the case consumes randomness (cases 3, 4, 7 or uniform means) and
// must therefore be redrawn for every replication.
bool case_is_random(CaseId id, MeanMode mean_mode);

// `aux_n` is the column count of Z for cases 3-4 (0 means 2p).
CovarianceCase make_case(CaseId id, std::size_t p, Rng& rng, MeanMode mean_mode = MeanMode::equal,
                         std::size_t aux_n = 0);
CovarianceCase make_case(CaseId id, std::size_t p, std::uint64_t seed, MeanMode mean_mode = MeanMode::equal,
                         std::size_t aux_n = 0);

CovarianceCase custom_case(Vector mu1, Vector mu2, SpdMatrix sigma1, SpdMatrix sigma2);

}  // namespace mdqda
