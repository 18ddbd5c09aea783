#include "mdqda/sampling.hpp"

#include "mdqda/error.hpp"

#include <cmath>
#include <random>

namespace mdqda {

Matrix draw_standardized(std::size_t p, std::size_t n, const Noise& noise, Rng& rng) {
    Matrix x(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
    double* data = x.data();
    const std::size_t total = p * n;
    if (noise.kind == Noise::Kind::standard_normal) {
        std::normal_distribution<double> dist;
        for (std::size_t i = 0; i < total; ++i) data[i] = dist(rng);
    } else {
        const double df = noise.df;
        const double scale = 1.0 / std::sqrt(df / (df - 2.0));
        std::student_t_distribution<double> dist(df);
        for (std::size_t i = 0; i < total; ++i) data[i] = dist(rng) * scale;
    }
    return x;
}

AffineMap::AffineMap(SpdMatrix root, Vector mu) : mu_(std::move(mu)) {
    if (root.dim() != static_cast<std::size_t>(mu_.size())) throw ValidationError("affine map dimension mismatch");
    const Matrix& r = root.matrix();
    diagonal_ = r.isDiagonal(0.0);
    if (diagonal_) {
        diag_ = r.diagonal();
    } else {
        root_ = r;
    }
}

AffineMap AffineMap::for_population(const PopulationSpec& pop) {
    const Matrix& s = pop.sigma.matrix();
    if (s.isDiagonal(0.0)) return AffineMap(SpdMatrix::diagonal(s.diagonal().cwiseSqrt()), pop.mu);
    return AffineMap(sqrt_spd(pop.sigma), pop.mu);
}

void AffineMap::apply(Matrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim()) throw ValidationError("affine map dimension mismatch");
    if (diagonal_) {
        x = diag_.asDiagonal() * x;
    } else {
        x = (root_ * x).eval();
    }
    x.colwise() += mu_;
}

DataMatrix draw_sample(const AffineMap& map, const Noise& noise, std::size_t n, Rng& rng) {
    Matrix x = draw_standardized(map.dim(), n, noise, rng);
    map.apply(x);
    return DataMatrix(std::move(x));
}

DataMatrix draw_sample(const PopulationSpec& pop, std::size_t n, Rng& rng) {
    return draw_sample(AffineMap::for_population(pop), pop.noise, n, rng);
}

}  // namespace mdqda
