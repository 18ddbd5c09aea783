#include "mdqda/error.hpp"
#include "mdqda/qda.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mdqda;
using namespace mdqda::testing;

namespace {

// ((c - 1)/c) log(1 - c) - 1, written out independently of the library.
double reference_shift(double c) { return (c - 1.0) / c * std::log(1.0 - c) - 1.0; }

Matrix permuted_rows(const Matrix& x, const Eigen::PermutationMatrix<Eigen::Dynamic>& perm) { return perm * x; }

}  // namespace

TEST_CASE("correction constants") {
    const auto big = correction_constants(1, 1000000, 1000000);
    CHECK(big.s0n == doctest::Approx(1.0 + 1e-6).epsilon(1e-9));
    CHECK(std::abs(big.l1n) < 1e-6);
    CHECK(big.l1n < 0.0);

    const auto c08 = correction_constants(80, 100, 100);
    CHECK(c08.s0n == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(c08.m0n == doctest::Approx(5.0).epsilon(1e-14));

    const auto c05 = correction_constants(50, 100, 100);
    CHECK(c05.l1n == doctest::Approx(-0.306852819440054690).epsilon(1e-14));
    CHECK(c05.l2n == c05.l1n);

    const auto uneven = correction_constants(30, 100, 300);
    CHECK(uneven.s0n == doctest::Approx(1.0 / 0.7));
    CHECK(uneven.m0n == doctest::Approx(1.0 / 0.9));
    CHECK(uneven.l1n == doctest::Approx(reference_shift(0.3)).epsilon(1e-13));
    CHECK(uneven.l2n == doctest::Approx(reference_shift(0.1)).epsilon(1e-13));

    CHECK_THROWS_WITH_AS(correction_constants(99, 100, 200), doctest::Contains("moderate-dimension precondition violated"),
                         ValidationError);
    CHECK_THROWS_AS(correction_constants(0, 100, 100), ValidationError);
    CHECK_NOTHROW(correction_constants(98, 100, 100));
}

TEST_CASE("logdet_shift small-ratio accuracy") {
    // l(c) = -c/2 - c^2/6 - ... near zero; the naive formula loses digits.
    const double c = 1e-9;
    CHECK(logdet_shift(c) == doctest::Approx(-c / 2.0 - c * c / 6.0).epsilon(1e-6));
}

TEST_CASE("label rule") {
    CHECK(label_from_score(-1e-300) == ClassLabel::class1);
    CHECK(label_from_score(0.0) == ClassLabel::class2);
    CHECK(label_from_score(-0.0) == ClassLabel::class2);
    CHECK(label_from_score(2.0) == ClassLabel::class2);
}

TEST_CASE("noise") {
    CHECK(Noise::normal().fourth_moment() == 3.0);
    CHECK(Noise::student_t(5).fourth_moment() == 9.0);
    CHECK(Noise::parse("t5").df == 5);
    CHECK(Noise::parse("t5").name() == "t5");
    CHECK(Noise::parse("normal").kind == Noise::Kind::standard_normal);
    CHECK_THROWS_AS(Noise::parse("t4"), ValidationError);
    CHECK_THROWS_AS(Noise::parse("cauchy"), ValidationError);
}

TEST_CASE("optimal discriminant examples") {
    const std::size_t p = 4;
    Vector mu2 = Vector::Zero(p);
    mu2(0) = 2.0;
    const PopulationSpec pop1(Vector::Zero(p), SpdMatrix::identity(p));
    const PopulationSpec pop2(mu2, SpdMatrix::identity(p));
    CHECK(optimal_discriminant(pop1, pop2, Vector::Zero(p)) == doctest::Approx(-4.0));
    CHECK(classify_optimal(pop1, pop2, Vector::Zero(p)) == ClassLabel::class1);
    CHECK(optimal_discriminant(pop1, pop2, mu2 / 2.0) == 0.0);
    CHECK(classify_optimal(pop1, pop2, mu2 / 2.0) == ClassLabel::class2);

    const PopulationSpec a(Vector::Zero(2), SpdMatrix::identity(2));
    const PopulationSpec b(Vector::Zero(2), SpdMatrix(Matrix(2.0 * Matrix::Identity(2, 2))));
    const Vector z = Vector::Ones(2);
    CHECK(optimal_discriminant(a, b, z) == doctest::Approx(1.0 - 2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(classify_optimal(a, b, z) == ClassLabel::class1);

    CHECK_THROWS_AS((void)optimal_discriminant(a, b, Vector::Ones(3)), ValidationError);
}

TEST_CASE("optimal discriminant is invariant to common rescaling") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = uniform_index(1, 8, rng);
        const double a = uniform_real(0.2, 5.0, rng);
        const PopulationSpec pop1(random_vector(p, rng), random_spd(p, rng));
        const PopulationSpec pop2(random_vector(p, rng), random_spd(p, rng));
        const PopulationSpec s1(a * pop1.mu, SpdMatrix(Matrix(a * a * pop1.sigma.matrix())));
        const PopulationSpec s2(a * pop2.mu, SpdMatrix(Matrix(a * a * pop2.sigma.matrix())));
        const Vector z = random_vector(p, rng);
        const double base = optimal_discriminant(pop1, pop2, z);
        CHECK(optimal_discriminant(s1, s2, a * z) == doctest::Approx(base).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("fitted discriminant against a hand evaluation (p = 1)") {
    // Class 1 {-1, 0, 1}: mean 0, var 1. Class 2 {-2, 0, 2}: mean 0, var 4.
    Matrix x1(1, 3);
    x1 << -1, 0, 1;
    Matrix x2(1, 3);
    x2 << -2, 0, 2;
    const FittedQda sample = fit(DataMatrix(x1), DataMatrix(x2), Variant::sample);
    // z = 0: [0 + log 1] - [0 + log 4] = -log 4.
    CHECK(sample.discriminant(Vector::Zero(1)) == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
    CHECK(sample.classify(Vector::Zero(1)) == ClassLabel::class1);

    Matrix y1(1, 4);
    y1 << -1, 1, -1, 1;  // var 4/3
    Matrix y2(1, 4);
    y2 << -2, 2, -2, 2;  // var 16/3
    const FittedQda gen = fit(DataMatrix(y1), DataMatrix(y2), Variant::generalized);
    CHECK(gen.discriminant(Vector::Zero(1)) == doctest::Approx(-std::log(4.0)).epsilon(1e-13));
    CHECK(gen.classify(Vector::Zero(1)) == ClassLabel::class1);

    // z = 1 exercises both corrections: s0n = m0n = 4/3, l = l(1/4).
    const double s = 4.0 / 3.0;
    const double l = reference_shift(0.25);
    const double left = (1.0 / (4.0 / 3.0)) / s + std::log(4.0 / 3.0) - l;
    const double right = (1.0 / (16.0 / 3.0)) / s + std::log(16.0 / 3.0) - l;
    CHECK(gen.discriminant(Vector::Ones(1)) == doctest::Approx(left - right).epsilon(1e-13));
    CHECK(gen.sides(Vector::Ones(1)).left == doctest::Approx(left).epsilon(1e-13));
}

TEST_CASE("identical training sets give a zero discriminant and a class 2 label") {
    Rng rng(12);
    const DataMatrix x = gaussian_sample(5, 30, rng);
    for (Variant v : {Variant::sample, Variant::generalized}) {
        const FittedQda m = fit(x, x, v);
        for (int i = 0; i < 10; ++i) {
            const Vector z = random_vector(5, rng);
            CHECK(m.discriminant(z) == 0.0);
            CHECK(m.classify(z) == ClassLabel::class2);
        }
    }
}

TEST_CASE("fit errors") {
    Rng rng(13);
    CHECK_THROWS_AS(fit(gaussian_sample(3, 20, rng), gaussian_sample(4, 20, rng), Variant::generalized), ValidationError);
    CHECK_THROWS_AS(fit(gaussian_sample(10, 11, rng), gaussian_sample(10, 40, rng), Variant::generalized), ValidationError);

    // Rank-deficient class 2 with a valid (p, n): constant first coordinate.
    Matrix bad = gaussian_sample(3, 20, rng).columns();
    bad.row(0).setConstant(1.0);
    try {
        (void)fit(gaussian_sample(3, 20, rng), DataMatrix(bad), Variant::generalized);
        FAIL("expected failure");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("class 2") != std::string::npos);
    }

    const FittedQda m = fit(gaussian_sample(3, 20, rng), gaussian_sample(3, 20, rng), Variant::generalized);
    Vector z = Vector::Zero(3);
    z(1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)m.discriminant(z), ValidationError);
    CHECK_THROWS_AS((void)m.discriminant(Vector::Zero(2)), ValidationError);
}

TEST_CASE("identity constants reduce the generalized rule to the sample rule bit for bit") {
    Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t p = uniform_index(1, 10, rng);
        const std::size_t n1 = uniform_index(p + 2, 60, rng);
        const std::size_t n2 = uniform_index(p + 2, 60, rng);
        const FittedQda gen = fit(gaussian_sample(p, n1, rng), gaussian_sample(p, n2, rng, 1.5), Variant::generalized);
        const FittedQda forced(gen.class1(), gen.class2(), CorrectionConstants::identity(), Variant::generalized);
        const FittedQda sample(gen.class1(), gen.class2(), gen.constants(), Variant::sample);
        for (int i = 0; i < 5; ++i) {
            const Vector z = random_vector(p, rng);
            CHECK(forced.discriminant(z) == sample.discriminant(z));
        }
    }
}

TEST_CASE("coordinate permutation leaves the discriminant unchanged") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = uniform_index(2, 8, rng);
        const DataMatrix x1 = gaussian_sample(p, 40, rng);
        const DataMatrix x2 = gaussian_sample(p, 50, rng, 2.0);
        const Vector z = random_vector(p, rng);
        Eigen::VectorXi idx(static_cast<Eigen::Index>(p));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        const Eigen::PermutationMatrix<Eigen::Dynamic> perm(idx);
        for (Variant v : {Variant::sample, Variant::generalized}) {
            const double base = fit(x1, x2, v).discriminant(z);
            const FittedQda pm =
                fit(DataMatrix(permuted_rows(x1.columns(), perm)), DataMatrix(permuted_rows(x2.columns(), perm)), v);
            const double moved = pm.discriminant(perm * z);
            CHECK(moved == doctest::Approx(base).epsilon(1e-10).scale(1.0));
            CHECK(label_from_score(moved) == label_from_score(base));
        }
    }
}

TEST_CASE("swapping the classes negates the discriminant when n1 = n2") {
    Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = uniform_index(1, 8, rng);
        const std::size_t n = uniform_index(p + 2, 50, rng);
        const DataMatrix x1 = gaussian_sample(p, n, rng);
        const DataMatrix x2 = gaussian_sample(p, n, rng, 1.7, 0.3);
        const Vector z = random_vector(p, rng);
        const double a = fit(x1, x2, Variant::generalized).discriminant(z);
        const double b = fit(x2, x1, Variant::generalized).discriminant(z);
        CHECK(std::abs(a + b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("generalized and sample rules converge as n grows") {
    const std::size_t p = 5;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        Rng rng(17);
        const DataMatrix x1 = gaussian_sample(p, n, rng);
        const DataMatrix x2 = gaussian_sample(p, n, rng, 1.5);
        const FittedQda gen = fit(x1, x2, Variant::generalized);
        const FittedQda smp(gen.class1(), gen.class2(), gen.constants(), Variant::sample);
        double gap = 0.0;
        Rng zr(99);
        for (int i = 0; i < 200; ++i) {
            const Vector z = random_vector(p, zr);
            gap += std::abs(gen.discriminant(z) - smp.discriminant(z));
        }
        gap /= 200.0;
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
}
