#pragma once

// Draws x = Sigma^{1/2} x0 + mu, where x0 has i.i.d. components with mean 0,
// variance 1 (standard normal, or t(df) divided by sqrt(df/(df-2))).

#include "mdqda/linalg.hpp"
#include "mdqda/qda.hpp"
#include "mdqda/random.hpp"

#include <cstddef>

namespace mdqda {

// p x n matrix of standardized noise, filled column by column.
Matrix draw_standardized(std::size_t p, std::size_t n, const Noise& noise, Rng& rng);

// x -> root * x + mu with a symmetric root; a diagonal root is applied
// elementwise.
class AffineMap {
public:
    AffineMap() = default;
    AffineMap(SpdMatrix root, Vector mu);
    static AffineMap for_population(const PopulationSpec& pop);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(mu_.size()); }
    void apply(Matrix& x) const;

private:
    Matrix root_;
    Vector diag_;
    Vector mu_;
    bool diagonal_ = false;
};

DataMatrix draw_sample(const AffineMap& map, const Noise& noise, std::size_t n, Rng& rng);
DataMatrix draw_sample(const PopulationSpec& pop, std::size_t n, Rng& rng);

}  // namespace mdqda
